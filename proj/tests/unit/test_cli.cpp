#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"

using namespace qdio::cli;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string form_file(const std::string& name, const std::string& body) {
  auto dir = std::filesystem::temp_directory_path() / "qdio_cli_test";
  std::filesystem::create_directories(dir);
  auto path = dir / name;
  std::ofstream(path) << body;
  return path.string();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

const std::string kGolden = "1,1/2+1/2*sqrt(5),3/2+1/2*sqrt(5)";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("rank report for the five-variable form") {
  auto f = form_file("q5.json", R"({"dim":5,"upper":[[0,4,1],[1,1,1],[2,2,1],[3,3,-3]]})");
  auto r = call({"rank", "--form", f, "--format", "json"});
  REQUIRE(r.code == kExitOk);
  auto l = lines(r.out);
  REQUIRE(l.size() == 2);
  CHECK(l[0].find("\"provenance\"") != std::string::npos);
  CHECK(l[0].find("\"form_hash\"") != std::string::npos);
  CHECK(l[1].find("\"p_Q\":1") != std::string::npos);
  CHECK(l[1].find("\"p_R\":2") != std::string::npos);
  CHECK(l[1].find("\"witness\":\"[1:0:0:0:0]\"") != std::string::npos);
}

TEST_CASE("rank of an anisotropic quaternary form") {
  auto f = form_file("aniso.json", R"({"dim":4,"upper":[[0,0,1],[1,1,1],[2,2,1],[3,3,-7]]})");
  auto r = call({"rank", "--form", f});
  REQUIRE(r.code == kExitOk);
  CHECK(lines(r.out)[2] == "0,1,-7,false,");
}

TEST_CASE("count routes to the counting table") {
  auto f = form_file("q0.json", R"({"dim":4,"upper":[[0,3,1],[1,2,-1]]})");
  auto r = call({"count", "--form", f, "--tmax", "32"});
  REQUIRE(r.code == kExitOk);
  auto l = lines(r.out);
  REQUIRE(l.size() == 2 + 5);
  CHECK(l[0].rfind("# provenance command=count form_hash=", 0) == 0);
  CHECK(l[0].find("seed=0") != std::string::npos);
  CHECK(l[1] == "T,N,ratio_k,ratio_log");
  CHECK(l.back().rfind("32,", 0) == 0);
}

TEST_CASE("exponent table serializes rationals as strings") {
  auto r = call({"exponents", "--kmax", "10"});
  REQUIRE(r.code == kExitOk);
  auto l = lines(r.out);
  CHECK(l.size() == 2 + 55);
  CHECK(std::find(l.begin(), l.end(), "2,4,1,2,6,5/6") != l.end());
  auto j = call({"exponents", "--kmax", "4", "--format", "json"});
  CHECK(j.out.find("\"c\":\"5/6\"") != std::string::npos);
}

TEST_CASE("empty row set gives the header only") {
  auto f = form_file("definite.json", R"({"dim":3,"upper":[[0,0,1],[1,1,1],[2,2,1]]})");
  auto r = call({"points", "--form", f, "--tmax", "50"});
  REQUIRE(r.code == kExitOk);
  CHECK(lines(r.out).size() == 2);
  CHECK(lines(r.out)[1] == "height,point");
  auto j = call({"points", "--form", f, "--tmax", "50", "--format", "json"});
  CHECK(lines(j.out).size() == 1);
}

TEST_CASE("csv quoting") {
  auto f = form_file("conic.json", R"({"dim":3,"upper":[[0,2,1],[1,1,-1]]})");
  auto r = call({"normalize", "--form", f});
  REQUIRE(r.code == kExitOk);
  CHECK(lines(r.out)[2] == R"(1,"[[1,0,0],[0,1,0],[0,0,1]]","[[0,0,1],[0,-2,0],[1,0,0]]",[[-2]])");
}

TEST_CASE("exit codes") {
  auto bad = form_file("bad.json", R"({"dim":3,"upper":[[0,5,1]]})");
  auto notjson = form_file("notjson.json", "dim = 3");
  auto r = call({"rank", "--form", bad});
  CHECK(r.code == kExitMalformedForm);
  CHECK(r.err.find("\"error\":\"MalformedForm\"") != std::string::npos);
  CHECK(call({"rank", "--form", notjson}).code == kExitMalformedForm);
  CHECK(call({"rank", "--form", "/nonexistent/form.json"}).code == kExitMalformedForm);

  auto conic = form_file("conic.json", R"({"dim":3,"upper":[[0,2,1],[1,1,-1]]})");
  auto off = call({"approx", "--form", conic, "--target", "1,2,3"});
  CHECK(off.code == kExitPrecondition);
  CHECK(off.err.find("\"error\":\"NotOnQuadric\"") != std::string::npos);
  CHECK(call({"points", "--form", conic, "--tmax", "0"}).code == kExitPrecondition);
  CHECK(call({"orbit", "--form", conic, "--sgrid", "4:2:1"}).code == kExitPrecondition);
  auto definite = form_file("definite.json", R"({"dim":3,"upper":[[0,0,1],[1,1,1],[2,2,1]]})");
  CHECK(call({"orbit", "--form", definite}).code == kExitPrecondition);
  CHECK(call({"khintchine", "--psi-a", "x"}).code == kExitPrecondition);

  CHECK(call({}).code == kExitUsage);
  CHECK(call({"frobnicate"}).code == kExitUsage);
  CHECK(call({"count", "--tmax", "8"}).code == kExitUsage);
  CHECK(call({"exponents", "--format", "xml"}).code == kExitUsage);
}

TEST_CASE("outputs are ASCII") {
  auto conic = form_file("conic.json", R"({"dim":3,"upper":[[0,2,1],[1,1,-1]]})");
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"approx", "--form", conic, "--target", kGolden, "--tmax", "64"},
           {"orbit", "--form", conic, "--sgrid", "0:8:2", "--hmax", "128", "--target", kGolden},
           {"khintchine", "--level", "6", "--samples", "2000", "--format", "json"},
           {"khintchine", "--level", "6", "--samples", "2000"}}) {
    auto r = call(args);
    REQUIRE(r.code == kExitOk);
    for (unsigned char c : r.out) CHECK(c < 0x80);
  }
}

TEST_CASE("thread count does not change the bytes") {
  auto q5 = form_file("q5.json", R"({"dim":5,"upper":[[0,4,1],[1,1,1],[2,2,1],[3,3,-3]]})");
  auto base = call({"points", "--form", q5, "--tmax", "12", "--threads", "1"});
  for (const char* t : {"4", "8"}) CHECK(call({"points", "--form", q5, "--tmax", "12", "--threads", t}).out == base.out);
  setenv("QUADRIC_DIO_THREADS", "8", 1);
  CHECK(call({"points", "--form", q5, "--tmax", "12", "--threads", "1"}).out == base.out);
  setenv("QUADRIC_DIO_THREADS", "many", 1);
  CHECK(call({"points", "--form", q5, "--tmax", "12"}).code == kExitUsage);
  unsetenv("QUADRIC_DIO_THREADS");
}

TEST_CASE("seed is recorded and reproducible") {
  auto a = call({"khintchine", "--level", "8", "--samples", "5000", "--seed", "11"});
  auto b = call({"khintchine", "--level", "8", "--samples", "5000", "--seed", "11"});
  auto c = call({"khintchine", "--level", "8", "--samples", "5000", "--seed", "12"});
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  CHECK(lines(a.out)[0].find("seed=11") != std::string::npos);
}

}  // TEST_SUITE
