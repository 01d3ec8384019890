#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qdio::cli {

enum class Format { Csv, Json };

struct RunConfig {
  std::string subcommand;
  std::string form_path;
  std::int64_t tmax = 256;
  std::int64_t hmax = 1024;
  std::string sgrid = "0:16:1";   // exponents of 2: a:b:step
  std::string psi_a = "1";
  std::string psi_b = "1";
  std::uint64_t seed = 0;
  Format format = Format::Csv;
  unsigned threads = 1;
  // Subcommand extras.
  int kmax = 10;
  std::string target;             // comma-separated coordinates
  int level = 10;                 // N for the covering and Monte Carlo labs
  int jmax = 40;
  int k = 2;
  std::string hausdorff_s = "3/2";
  bool exceptional = false;
  std::uint64_t samples = 100000;
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitMalformedForm = 2;
inline constexpr int kExitPrecondition = 3;

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv (subcommand first) and dispatches; QUADRIC_DIO_THREADS overrides --threads.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qdio::cli
