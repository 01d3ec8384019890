#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

namespace qdio {

// Non-owning callable reference; cheaper than std::function on hot paths.
template <class Sig>
class FunctionRef;

template <class R, class... Args>
class FunctionRef<R(Args...)> {
 public:
  template <class F, class = std::enable_if_t<!std::is_same_v<std::decay_t<F>, FunctionRef>>>
  FunctionRef(F&& f)  // NOLINT: implicit like std::function
      : obj_(const_cast<void*>(static_cast<const void*>(&f))),
        call_([](void* o, Args... a) -> R { return (*static_cast<std::remove_reference_t<F>*>(o))(std::forward<Args>(a)...); }) {}

  R operator()(Args... a) const { return call_(obj_, std::forward<Args>(a)...); }

 private:
  void* obj_;
  R (*call_)(void*, Args...);
};

// Worker count: 0 means "all hardware threads".
unsigned resolve_threads(unsigned requested);

// Runs body(task, worker) for every task in [0, n); tasks are handed out
// dynamically, so bodies must not depend on which worker runs them.
template <class Body>
void parallel_tasks(std::size_t n, unsigned threads, Body body) {
  threads = resolve_threads(threads);
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i, 0u);
    return;
  }
  if (threads > n) threads = static_cast<unsigned>(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) body(i, w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Per-worker accumulators merged in worker order. The result is thread-count
// independent as long as `merge` is commutative and associative.
template <class Acc, class Body>
Acc parallel_reduce(std::size_t n, unsigned threads, const Acc& init, Body body) {
  unsigned w = resolve_threads(threads);
  if (w > n && n > 0) w = static_cast<unsigned>(n);
  if (w == 0) w = 1;
  std::vector<Acc> parts(w, init);
  parallel_tasks(n, w, [&](std::size_t i, unsigned worker) { body(parts[worker], i); });
  for (unsigned k = 1; k < w; ++k) parts[0].merge(std::move(parts[k]));
  return std::move(parts[0]);
}

}  // namespace qdio
