#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "bitrade/contextual.hpp"
#include "bitrade/instances.hpp"
#include "bitrade/metrics.hpp"

using namespace bitrade;

namespace {

RoundRecord record(double gft, double profit, double benchmark, bool traded) {
  RoundRecord r;
  r.gft = gft;
  r.profit = profit;
  r.benchmark = benchmark;
  r.traded = traded;
  return r;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST_CASE("empty episode summarizes to zeros") {
  const Summary s = accumulate({});
  CHECK(s.rounds == 0);
  CHECK(s.gft_regret == 0.0);
  CHECK(s.profit_regret == 0.0);
  CHECK(s.budget_violation == 0.0);
  CHECK(s.trades == 0);
  CHECK(s.fallbacks == 0);
}

TEST_CASE("accumulator cumulative fields") {
  Accumulator acc;
  std::vector<RoundRecord> recs{record(0.5, 0.5, 0.5, true), record(0.0, 0.0, 0.4, false),
                                record(0.3, -0.1, 0.3, true), record(0.2, 0.05, 0.2, true)};
  for (auto& r : recs) acc.add(r);
  CHECK(recs[0].cum_gft_regret == 0.0);
  CHECK(recs[0].cum_profit_regret == 0.0);
  CHECK(recs[1].cum_gft_regret == doctest::Approx(0.4));
  CHECK(recs[2].cum_profit_regret == doctest::Approx(0.8));
  CHECK(recs[2].cum_budget_violation == doctest::Approx(0.1));
  CHECK(recs[3].cum_budget_violation == doctest::Approx(0.1));
  const Summary s = accumulate(recs);
  CHECK(s.trades == 3);
  CHECK(s.gft_regret == acc.summary().gft_regret);
  CHECK(s.profit_regret == acc.summary().profit_regret);
  CHECK(s.total_gft == doctest::Approx(1.0));
}

TEST_CASE("cumulatives are reproducible from the payoff columns") {
  for (const char* id : {"gft-1bit-safe", "profit-2bit"}) {
    const Instance inst = random_instance(2, 120, 9);
    LearnerConfig cfg;
    cfg.d = 2;
    cfg.horizon = inst.T;
    cfg.sampling = SampleConfig{256, 64, 0};
    auto L = make_learner(id, cfg);
    const auto recs = run_episode(inst, *L, default_mode(id), 2);
    double g = 0, p = 0, v = 0;
    for (const auto& r : recs) {
      g += r.benchmark - r.gft;
      p += r.benchmark - r.profit;
      v += std::max(0.0, -r.profit);
      CHECK(r.cum_gft_regret == g);
      CHECK(r.cum_profit_regret == p);
      CHECK(r.cum_budget_violation == v);
      CHECK(r.benchmark - r.gft >= -1e-12);
      if (!r.traded) CHECK(r.gft == 0.0);
    }
    const Summary s = accumulate(recs);
    CHECK(s.gft_regret == recs.back().cum_gft_regret);
    std::int64_t trades = 0;
    for (const auto& r : recs) trades += r.traded;
    CHECK(s.trades == trades);
  }
}

TEST_CASE("CSV layout") {
  RoundRecord r = record(1.0 / 3, 0.0, 2.0 / 3, true);
  r.t = 1;
  r.case_label = CaseLabel::WeakOverlap;
  r.p = r.q = 0.1234567890123456;
  std::ostringstream os;
  write_csv(os, {r});
  std::istringstream in(os.str());
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  CHECK_FALSE(std::getline(in, extra));
  const auto cols = split(header);
  const std::vector<std::string> expected{"t", "case", "p", "q", "traded", "gft", "profit", "benchmark",
                                          "cum_gft_regret", "cum_profit_regret", "cum_budget_violation"};
  REQUIRE(cols.size() >= expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) CHECK(cols[k] == expected[k]);
  const auto cells = split(row);
  REQUIRE(cells.size() == cols.size());
  CHECK(cells[1] == "weak-overlap");
  CHECK(cells[2] == "0.123456789012");
  CHECK(cells[5] == "0.333333333333");
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(-1.5) == "-1.5");
  CHECK(std::stod(format_double(M_PI)) == doctest::Approx(M_PI).epsilon(1e-11));

  std::ostringstream with;
  r.potential_trace = 2.5;
  write_csv(with, {r});
  CHECK(with.str().find(",potential\n") != std::string::npos);
  CHECK(with.str().find(",2.5\n") != std::string::npos);
}

TEST_CASE("case labels have stable names") {
  CHECK(to_string(CaseLabel::WellSeparated) == "well-separated");
  CHECK(to_string(CaseLabel::SellerSweep) == "seller-sweep");
  CHECK(to_string(CaseLabel::Locked) == "locked");
}
