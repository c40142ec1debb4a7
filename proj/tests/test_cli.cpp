#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bitrade/cli.hpp"
#include "bitrade/instances.hpp"

using namespace bitrade;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

std::filesystem::path tmp(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST_CASE("run writes one CSV row per round and a JSON summary") {
  const auto path = tmp("bitrade_cli_run.csv");
  const Result r = cli({"run", "--variant", "gft-2bit", "--instance", "random", "--d", "2", "--T", "2000", "--seed",
                        "7", "--samples", "256", "--out", path.string()});
  REQUIRE(r.code == kExitOk);
  const std::string csv = slurp(path);
  CHECK(count_lines(csv) == 2001);
  CHECK(csv.rfind("t,case,p,q,", 0) == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["rounds"] == 2000);
  CHECK(j["gft_regret"].get<double>() >= 0.0);
  CHECK(j.contains("profit_regret"));
  CHECK(j["budget_violation"] == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("context-free dyadic run") {
  const Result r = cli({"run", "--variant", "cf-dyadic-gft", "--s", "0.3", "--b", "0.7", "--T", "1000"});
  REQUIRE(r.code == kExitOk);
  CHECK(nlohmann::json::parse(r.out)["gft_regret"].get<double>() <= 4.0);
}

TEST_CASE("exit codes") {
  CHECK(cli({"run", "--variant", "profit-1bit-bb", "--d", "2"}).code == kExitBadFlags);
  CHECK(cli({"run", "--variant", "cf-quad-profit", "--s", "0.1", "--b", "0.5"}).code == kExitBadFlags);
  CHECK(cli({"run", "--variant", "nope", "--T", "5"}).code == kExitBadFlags);
  CHECK(cli({"run", "--T", "5"}).code == kExitBadFlags);
  CHECK(cli({"run", "--variant", "gft-2bit", "--T", "abc"}).code == kExitBadFlags);
  CHECK(cli({"run", "--variant", "gft-2bit", "--T", "5", "--samples", "10"}).code == kExitBadFlags);
  CHECK(cli({"run", "--variant", "gft-2bit", "--T", "5", "--instance", "bogus"}).code == kExitBadFlags);
  CHECK(cli({"run", "--variant", "cf-dyadic-gft", "--s", "0.3", "--T", "5"}).code == kExitBadFlags);
  CHECK(cli({"run", "--variant", "gft-2bit", "--T", "5", "--instance", "file:/nonexistent.json"}).code ==
        kExitBadFlags);
  CHECK(cli({}).code == kExitBadFlags);
  const Result mm = cli({"run", "--variant", "gft-2bit", "--T", "5", "--feedback", "one-bit", "--samples", "256"});
  CHECK(mm.code == kExitModeMismatch);
  CHECK(mm.err.find("error") != std::string::npos);
  CHECK(cli({"sweep", "--variants", "profit-2bit", "--d", "2", "--T", "5", "--seeds", "2", "--feedback", "one-bit",
             "--samples", "256"})
            .code == kExitModeMismatch);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("file instances run with their own horizon") {
  const auto path = tmp("bitrade_cli_instance.json");
  save_instance(random_instance(2, 30, 5), path.string());
  const Result r = cli({"run", "--variant", "profit-1bit-bb", "--instance", "file:" + path.string(), "--T", "30",
                        "--samples", "256"});
  REQUIRE(r.code == kExitOk);
  CHECK(nlohmann::json::parse(r.out)["rounds"] == 30);
  std::filesystem::remove(path);
}

TEST_CASE("generate writes loadable JSON") {
  const Result r = cli({"generate", "--instance", "chunked-basis", "--d", "3", "--T", "7", "--seed", "2"});
  REQUIRE(r.code == kExitOk);
  const Instance inst = instance_from_json(nlohmann::json::parse(r.out));
  CHECK(inst.contexts == chunked_basis_contexts(3, 7));
}

TEST_CASE("sweep rows and determinism") {
  const std::vector<std::string> args{"sweep", "--variants", "gft-2bit", "--d", "2,3", "--T", "20,40",
                                      "--seeds", "3", "--samples", "256"};
  const Result a = cli(args);
  REQUIRE(a.code == kExitOk);
  CHECK(count_lines(a.out) == 5);  // header + 4 cells
  CHECK(a.out.rfind("variant,instance,d,T,seeds,", 0) == 0);
  CHECK(cli(args).out == a.out);

  const Result q = cli({"sweep", "--variants", "cf-quad-profit", "--T", "1000,1000000", "--seeds", "2", "--s", "0.3",
                        "--b", "0.7"});
  REQUIRE(q.code == kExitOk);
  CHECK(count_lines(q.out) == 3);
  CHECK(q.out.find("regret_ratio") != std::string::npos);

  const auto p1 = tmp("bitrade_cli_sweep1.csv"), p2 = tmp("bitrade_cli_sweep2.csv");
  std::vector<std::string> with_out = args;
  with_out.insert(with_out.end(), {"--out", p1.string()});
  const Result b1 = cli(with_out);
  with_out.back() = p2.string();
  const Result b2 = cli(with_out);
  CHECK(b1.out == b2.out);
  CHECK(slurp(p1) == slurp(p2));
  CHECK(nlohmann::json::parse(b1.out).size() == 4);
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST_CASE("run output is byte-identical across repeats") {
  const auto p1 = tmp("bitrade_cli_det1.csv"), p2 = tmp("bitrade_cli_det2.csv");
  auto go = [](const std::filesystem::path& p) {
    return cli({"run", "--variant", "gft-1bit-bb", "--d", "2", "--T", "40", "--seed", "4", "--samples", "256",
                "--trace-potential", "--out", p.string()});
  };
  const Result a = go(p1), b = go(p2);
  CHECK(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(slurp(p1) == slurp(p2));
  CHECK(slurp(p1).find(",potential") != std::string::npos);
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST_CASE("verify suites") {
  const Result r = cli({"verify", "--suite", "partition", "--trials", "60"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(cli({"verify", "--suite", "balanced", "--trials", "40"}).code == kExitOk);
  CHECK(cli({"verify", "--suite", "nope"}).code == kExitBadFlags);
}
