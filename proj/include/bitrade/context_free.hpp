#pragma once

// Context-free learners for scalar valuations s, b in [0, 1]: the dyadic
// search, its randomized twin, and the two-phase quadratic profit search.

#include <cstdint>
#include <optional>
#include <random>

#include "bitrade/environment.hpp"

namespace bitrade {

/// k-th price (1-based) of the breadth-first dyadic schedule 1/2, 1/4, 3/4, ...
double dyadic_price(std::int64_t k);

/// Level i of probe k, i.e. 2^i <= k < 2^(i+1).
int dyadic_level(std::int64_t k);

struct DyadicState {
  std::int64_t t_internal = 0;  // rejected probes so far
  std::optional<double> locked_price;
};

/// Price of the next probe. Precondition: not locked.
double dyadic_next(const DyadicState& state);

class DyadicGftLearner final : public Learner {
 public:
  std::string variant() const override { return "cf-dyadic-gft"; }
  bool supports(FeedbackMode) const override { return true; }
  void seed(std::uint64_t) override { state_ = {}; }
  PricePair observe_context(const Context& x) override;
  void receive(const Feedback& fb) override;
  CaseLabel last_case() const override { return label_; }

  const DyadicState& state() const { return state_; }

 private:
  DyadicState state_;
  double posted_ = 0.0;
  CaseLabel label_ = CaseLabel::Probe;
};

class RandomGftLearner final : public Learner {
 public:
  std::string variant() const override { return "cf-random-gft"; }
  bool supports(FeedbackMode) const override { return true; }
  void seed(std::uint64_t seed) override;
  PricePair observe_context(const Context& x) override;
  void receive(const Feedback& fb) override;
  CaseLabel last_case() const override { return label_; }

 private:
  std::mt19937_64 rng_;
  std::optional<double> locked_;
  double posted_ = 0.0;
  CaseLabel label_ = CaseLabel::Probe;
};

/// Square [corner.s - side, corner.s] x [corner.b, corner.b + side] in the
/// (s, b) plane; it contains the truth under truthful feedback.
struct QuadSquare {
  double s = 0.0;
  double b = 0.0;
  double side = 0.0;
  int phase = 0;
};

class QuadProfitLearner final : public Learner {
 public:
  explicit QuadProfitLearner(std::int64_t horizon);

  std::string variant() const override { return "cf-quad-profit"; }
  bool supports(FeedbackMode) const override { return true; }
  void seed(std::uint64_t) override;
  PricePair observe_context(const Context& x) override;
  void receive(const Feedback& fb) override;
  CaseLabel last_case() const override { return label_; }

  /// Present once the dyadic phase has traded.
  const std::optional<QuadSquare>& square() const { return square_; }
  /// Probes spent in each completed or running zoom phase.
  const std::vector<std::int64_t>& phase_probes() const { return phase_probes_; }

 private:
  enum class Stage { Dyadic, SellerSweep, BuyerSweep, Done };

  void start_phase();

  std::int64_t horizon_;
  Stage stage_ = Stage::Dyadic;
  DyadicState dyadic_;
  std::optional<QuadSquare> square_;
  double step_ = 0.0;       // grid spacing of the running phase
  std::int64_t cells_ = 0;  // grid cells per side
  std::int64_t j_ = 0;      // sweep position
  PricePair posted_;
  CaseLabel label_ = CaseLabel::Probe;
  std::vector<std::int64_t> phase_probes_;
};

}  // namespace bitrade
