#pragma once

// The six contextual learners. Each keeps confidence regions S (seller
// weights) and B (buyer weights) and prices from their projections on the
// current context.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bitrade/environment.hpp"
#include "bitrade/sampling.hpp"

namespace bitrade {

enum class ContextualVariant {
  GftTwoBit,       // "gft-2bit"
  GftOneBitSafe,   // "gft-1bit-safe"
  GftOneBitBB,     // "gft-1bit-bb"
  ProfitTwoBit,    // "profit-2bit"
  ProfitOneBitSafe,  // "profit-1bit-safe"
  ProfitOneBitBB,  // "profit-1bit-bb"
};

std::string to_string(ContextualVariant v);
std::optional<ContextualVariant> contextual_variant_from(const std::string& id);
bool is_profit(ContextualVariant v);
bool is_two_bit(ContextualVariant v);
/// Variants whose prices always satisfy p <= q.
bool is_budget_balanced(ContextualVariant v);

/// Largest i in [-1, 60] with w <= 2^-i. Throws DegenerateWidth for w <= 1e-9.
int gft_index(double w);

/// Largest i >= 0 with w <= 2^(-2^i); -1 when w > 1/2. Throws DegenerateWidth
/// for w <= 1e-9.
int profit_index(double w);

/// 2^-i / (8d).
double gft_scale(int i, int d);
/// 2^(-3 * 2^i) / (16d).
double profit_scale(int i, int d);
/// 2^(-2^(i-1)), the upper-tail volume target of the profit learners.
double profit_tail(int i);

/// Projection of a region on the context. `lo`/`hi` are what pricing uses
/// (collapsed to the midpoint when degenerate); `cert_lo`/`cert_hi` are the
/// certified outer bounds used to decide which feedback bits are known.
struct Projected {
  double lo = 0.0;
  double hi = 0.0;
  double cert_lo = 0.0;
  double cert_hi = 0.0;
  bool degenerate = false;
  detail::SupportPair<double> support;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

Projected project_region(const ConvexRegion<double>& K, const Context& x);

struct LearnerConfig {
  int d = 1;
  std::int64_t horizon = 0;  // required by the profit variants
  SampleConfig sampling;     // seed is overwritten per price solve
  bool trace_potential = false;
  SampleConfig potential_sampling{512, 64, 0};
};

struct LearnerState {
  ContextualVariant variant = ContextualVariant::GftTwoBit;
  int d = 1;
  std::int64_t horizon = 0;
  ConvexRegion<double> S;
  ConvexRegion<double> B;
  SampleConfig cfg;
  std::mt19937_64 rng;
  std::uint64_t base_seed = 0;
  std::int64_t round = 0;
  std::int64_t clamped_index_rounds = 0;
};

/// Prices of one round plus the bookkeeping the update needs.
struct Decision {
  PricePair prices;
  CaseLabel label = CaseLabel::WellSeparated;
  bool fallback = false;
  Projected seller;
  Projected buyer;
};

Decision twobit_gft_price(LearnerState& state, const Context& x);
Decision onebit_gft_safe_price(LearnerState& state, const Context& x);
Decision onebit_gft_bb_price(LearnerState& state, const Context& x);
Decision twobit_profit_price(LearnerState& state, const Context& x);
Decision onebit_profit_safe_price(LearnerState& state, const Context& x);
Decision onebit_profit_bb_price(LearnerState& state, const Context& x);

/// The acceptance bits the learner can deduce. Two-bit feedback reveals both;
/// otherwise a bit is known when the posted price is safe or hopeless for
/// that agent, on a trade, or by elimination on a no-trade.
struct KnownBits {
  std::optional<bool> seller;
  std::optional<bool> buyer;
};

KnownBits deduce_bits(const Decision& decision, const Feedback& fb, bool use_two_bits);

/// Cuts S and B by every known bit.
void apply_update(LearnerState& state, const Context& x, const Decision& decision,
                  const KnownBits& bits);

class ContextualLearner final : public Learner {
 public:
  ContextualLearner(ContextualVariant variant, const LearnerConfig& config);

  std::string variant() const override { return to_string(state_.variant); }
  bool supports(FeedbackMode mode) const override;
  void seed(std::uint64_t seed) override;
  PricePair observe_context(const Context& x) override;
  void receive(const Feedback& fb) override;
  CaseLabel last_case() const override { return decision_.label; }
  bool last_fallback() const override { return decision_.fallback; }
  std::optional<double> last_potential() const override { return potential_; }

  const ConvexRegion<double>& seller_region() const { return state_.S; }
  const ConvexRegion<double>& buyer_region() const { return state_.B; }
  const LearnerState& state() const { return state_; }
  const Decision& last_decision() const { return decision_; }

 private:
  std::optional<double> trace() const;

  LearnerConfig config_;
  LearnerState state_;
  Context x_;
  Decision decision_;
  std::optional<double> potential_;
};

/// All variant ids, context-free first.
const std::vector<std::string>& variant_ids();

/// Builds a learner from its string id. Throws InvalidArgument for unknown
/// ids or a missing horizon on the profit variants.
std::unique_ptr<Learner> make_learner(const std::string& id, const LearnerConfig& config);

/// Feedback mode a variant runs in by default.
FeedbackMode default_mode(const std::string& id);

}  // namespace bitrade
