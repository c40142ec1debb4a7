#include <doctest.h>

#include <random>
#include <vector>

#include "bitrade/contextual.hpp"
#include "bitrade/environment.hpp"
#include "bitrade/instances.hpp"

using namespace bitrade;

namespace {

MarketParams params_1d(double s, double b) {
  MarketParams m;
  m.s = Eigen::VectorXd::Constant(1, s);
  m.b = Eigen::VectorXd::Constant(1, b);
  return m;
}

const Context kOne = Context::unit(1, 0);

// Posts a fixed price pair and remembers what came back.
class Scripted final : public Learner {
 public:
  explicit Scripted(PricePair pp, bool two_bit_only = false) : pp_(pp), two_bit_only_(two_bit_only) {}
  std::string variant() const override { return "scripted"; }
  bool supports(FeedbackMode m) const override { return !two_bit_only_ || m == FeedbackMode::TwoBit; }
  void seed(std::uint64_t s) override { seeded = s; }
  PricePair observe_context(const Context&) override { return pp_; }
  void receive(const Feedback& fb) override { seen.push_back(fb); }
  CaseLabel last_case() const override { return CaseLabel::Probe; }

  std::uint64_t seeded = 0;
  std::vector<Feedback> seen;

 private:
  PricePair pp_;
  bool two_bit_only_;
};

}  // namespace

TEST_CASE("valuations are inner products") {
  MarketParams m;
  m.s = Eigen::Vector2d(0.0, 0.0);
  m.b = Eigen::Vector2d(0.5, 0.0);
  auto [s, b] = valuations(m, Context::unit(2, 0));
  CHECK(s == 0.0);
  CHECK(b == 0.5);
  std::tie(s, b) = valuations(m, Context::unit(2, 1));
  CHECK(b == 0.0);
  m.b = m.s = Eigen::Vector2d(0.3, -0.4);
  std::tie(s, b) = valuations(m, Context::normalized(Eigen::Vector2d(1, 2)));
  CHECK(s == b);
}

TEST_CASE("round outcomes") {
  const MarketParams m = params_1d(0.2, 0.7);
  auto o = round_outcome(m, kOne, {0.5, 0.5});
  CHECK(o.traded);
  CHECK(o.gft == doctest::Approx(0.5));
  CHECK(o.profit == 0.0);
  CHECK(o.benchmark == doctest::Approx(0.5));

  o = round_outcome(m, kOne, {0.1, 0.5});
  CHECK_FALSE(o.traded);
  CHECK(o.gft == 0.0);
  CHECK(o.profit == 0.0);
  CHECK(o.benchmark == doctest::Approx(0.5));

  o = round_outcome(m, kOne, {0.3, 0.6});
  CHECK(o.profit == doctest::Approx(0.3));

  // Weak inequalities at the valuations themselves; the optimal pair earns
  // the whole benchmark.
  o = round_outcome(m, kOne, {0.2, 0.7});
  CHECK(o.traded);
  CHECK(o.gft == o.benchmark);
  CHECK(o.profit == o.benchmark);

  o = round_outcome(params_1d(0.7, 0.2), kOne, {0.5, 0.5});
  CHECK(o.benchmark == 0.0);
  CHECK_FALSE(o.traded);
}

TEST_CASE("respond and the one-bit channel") {
  const MarketParams m = params_1d(0.2, 0.7);
  CHECK(respond(m, kOne, {0.3, 0.6}) == TwoBitFeedback{true, true});
  CHECK_FALSE(respond(m, kOne, {0.1, 0.6}).seller_accepts);
  CHECK_FALSE(respond(m, kOne, {0.3, 0.8}).buyer_accepts);
  CHECK(one_bit({true, true}));
  CHECK_FALSE(one_bit({true, false}));
  CHECK_FALSE(one_bit({false, true}));
  CHECK_FALSE(one_bit({false, false}));
}

TEST_CASE("one bit is the conjunction on random draws") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 2000; ++i) {
    const Instance inst = random_instance(3, 1, rng());
    const Context x = inst.context(0);
    const PricePair pp{u(rng), u(rng)};
    const auto fb = respond(inst.params, x, pp);
    const auto [s, b] = valuations(inst.params, x);
    CHECK(fb.seller_accepts == (s <= pp.p));
    CHECK(fb.buyer_accepts == (pp.q <= b));
    CHECK(one_bit(fb) == round_outcome(inst.params, x, pp).traded);
  }
}

TEST_CASE("parameter and instance validation") {
  CHECK_NOTHROW(params_1d(1.0, -1.0).validate());
  CHECK_THROWS_AS(params_1d(1.01, 0.0).validate(), InvalidInstance);
  MarketParams mixed;
  mixed.s = Eigen::Vector2d(0, 0);
  mixed.b = Eigen::Vector3d(0, 0, 0);
  CHECK_THROWS_AS(mixed.validate(), InvalidInstance);

  Instance inst = constant_instance(0.2, 0.4, 3);
  CHECK_NOTHROW(inst.validate());
  inst.contexts(0, 1) = 0.5;
  CHECK_THROWS_AS(inst.validate(), InvalidInstance);
}

TEST_CASE("episode loop") {
  const Instance inst = constant_instance(0.2, 0.7, 5);

  SUBCASE("empty horizon") {
    Scripted L({0.5, 0.5});
    CHECK(run_episode(constant_instance(0.2, 0.7, 0), L, FeedbackMode::TwoBit, 1).empty());
  }
  SUBCASE("two-bit feedback carries both bits") {
    Scripted L({0.5, 0.8});
    const auto recs = run_episode(inst, L, FeedbackMode::TwoBit, 42);
    CHECK(L.seeded == 42);
    REQUIRE(L.seen.size() == 5);
    REQUIRE(L.seen[0].bits.has_value());
    CHECK(L.seen[0].bits->seller_accepts);
    CHECK_FALSE(L.seen[0].bits->buyer_accepts);
    CHECK_FALSE(L.seen[0].traded);
    CHECK(recs.back().t == 5);
    CHECK(recs.back().cum_gft_regret == doctest::Approx(2.5));
  }
  SUBCASE("one-bit feedback hides the bits") {
    Scripted L({0.5, 0.5});
    const auto recs = run_episode(inst, L, FeedbackMode::OneBit, 1);
    for (const auto& fb : L.seen) {
      CHECK_FALSE(fb.bits.has_value());
      CHECK(fb.traded);
    }
    CHECK(recs.back().cum_gft_regret == doctest::Approx(0.0));
  }
  SUBCASE("mode mismatch") {
    Scripted L({0.5, 0.5}, true);
    CHECK_THROWS_AS(run_episode(inst, L, FeedbackMode::OneBit, 1), ModeMismatch);
    auto two = make_learner("gft-2bit", LearnerConfig{});
    CHECK_THROWS_AS(run_episode(inst, *two, FeedbackMode::OneBit, 1), ModeMismatch);
  }
  SUBCASE("observer sees every round") {
    Scripted L({0.5, 0.5});
    std::vector<std::int64_t> ts;
    run_episode(inst, L, FeedbackMode::TwoBit, 1, [&](std::int64_t t, const Learner&) { ts.push_back(t); });
    CHECK(ts == std::vector<std::int64_t>{1, 2, 3, 4, 5});
  }
}

TEST_CASE("episodes are deterministic in the seed") {
  const Instance inst = random_instance(2, 60, 4);
  LearnerConfig cfg;
  cfg.d = 2;
  cfg.sampling = SampleConfig{256, 64, 0};
  auto run = [&](std::uint64_t seed) {
    auto L = make_learner("gft-1bit-bb", cfg);
    return run_episode(inst, *L, FeedbackMode::OneBit, seed);
  };
  const auto a = run(9);
  const auto b = run(9);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].p == b[i].p);
    CHECK(a[i].q == b[i].q);
    CHECK(a[i].cum_gft_regret == b[i].cum_gft_regret);
  }
}
