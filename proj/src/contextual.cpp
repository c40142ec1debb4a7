#include "bitrade/contextual.hpp"

#include <algorithm>
#include <cmath>

#include "bitrade/context_free.hpp"

namespace bitrade {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Sampler config for one price solve: seeded by (episode seed, round, tag).
SampleConfig solve_config(const LearnerState& st, std::uint64_t tag) {
  SampleConfig cfg = st.cfg;
  cfg.seed = splitmix64(splitmix64(st.base_seed ^ (tag << 56)) + static_cast<std::uint64_t>(st.round));
  return cfg;
}

struct SolvedPrice {
  double price;
  bool fallback;
};

// Price whose `sense` side of K + zB holds `target` of its volume, or the
// interval midpoint if bisection cannot bracket the target.
SolvedPrice volume_price(const LearnerState& st, const ConvexRegion<double>& K, double z,
                         const Context& x, double target, Sense sense, const Projected& proj,
                         std::uint64_t tag) {
  try {
    return {bisect_balanced_price(K, z, x, target, sense, solve_config(st, tag)), false};
  } catch (const BisectionFailure&) {
    return {proj.mid(), true};
  }
}

void project_both(LearnerState& st, const Context& x, Decision& d) {
  d.seller = project_region(st.S, x);
  d.buyer = project_region(st.B, x);
}

bool both_degenerate(const Decision& d) { return d.seller.degenerate && d.buyer.degenerate; }

bool disjoint(const Projected& s, const Projected& b) { return s.hi < b.lo || b.hi < s.lo; }

// Shared skeleton of the two-bit GFT learner and its safe-price twin.
Decision gft_dominance(LearnerState& st, const Context& x, bool safe_other) {
  Decision d;
  project_both(st, x, d);
  const Projected& s = d.seller;
  const Projected& b = d.buyer;
  if (both_degenerate(d)) {
    d.label = CaseLabel::SmallWidths;
    d.prices = {s.hi, s.hi};
    return d;
  }
  if (disjoint(s, b)) {
    d.label = CaseLabel::WellSeparated;
    d.prices = {s.hi, s.hi};
    return d;
  }
  const int i = gft_index(std::max(s.width(), b.width()));
  const double z = gft_scale(i, st.d);
  if (s.width() >= b.width()) {
    d.label = CaseLabel::SellerDominating;
    const SolvedPrice p = volume_price(st, st.S, z, x, 0.5, Sense::AtMost, s, 1);
    d.fallback = p.fallback;
    d.prices = {p.price, safe_other ? b.lo : p.price};
  } else {
    d.label = CaseLabel::BuyerDominating;
    const SolvedPrice q = volume_price(st, st.B, z, x, 0.5, Sense::AtLeast, b, 2);
    d.fallback = q.fallback;
    d.prices = {safe_other ? s.hi : q.price, q.price};
  }
  return d;
}

// Shared skeleton of the two-bit profit learner and its safe-price twin.
Decision profit_dominance(LearnerState& st, const Context& x, bool uncapped) {
  Decision d;
  project_both(st, x, d);
  const Projected& s = d.seller;
  const Projected& b = d.buyer;
  const double wmax = std::max(s.width(), b.width());
  if (wmax <= 1.0 / static_cast<double>(st.horizon)) {
    d.label = CaseLabel::SmallWidths;
    d.prices = {s.hi, std::max(s.hi, b.lo)};
    return d;
  }
  int i = profit_index(wmax);
  if (i < 0) {
    i = 0;
    ++st.clamped_index_rounds;
  }
  const double z = profit_scale(i, st.d);
  const double tail = profit_tail(i);
  // Disjoint intervals keep the two-bit caps.
  uncapped = uncapped && !disjoint(s, b);
  if (s.width() >= b.width()) {
    d.label = CaseLabel::SellerDominating;
    const SolvedPrice m = volume_price(st, st.S, z, x, tail, Sense::AtLeast, s, 3);
    d.fallback = m.fallback;
    const double p = m.price + z;
    d.prices = {p, uncapped ? b.lo : std::max(p, b.lo)};
  } else {
    d.label = CaseLabel::BuyerDominating;
    const SolvedPrice m = volume_price(st, st.B, z, x, tail, Sense::AtMost, b, 4);
    d.fallback = m.fallback;
    const double q = m.price - z;
    d.prices = {uncapped ? s.hi : std::min(q, s.hi), q};
  }
  return d;
}

// Weak-overlap tests shared by the budget-balanced one-bit learners.
std::optional<double> weak_overlap_price(const Projected& s, const Projected& b) {
  if (s.width() >= b.width() && s.mid() <= b.lo) return s.mid();
  if (b.width() >= s.width() && b.mid() >= s.hi) return b.mid();
  return std::nullopt;
}

// Length-weighted uniform draw from [s.lo, s.hi] ∪ [b.lo, b.hi].
double uniform_on_union(std::mt19937_64& rng, const Projected& s, const Projected& b) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  if (!disjoint(s, b)) {
    const double lo = std::min(s.lo, b.lo);
    const double hi = std::max(s.hi, b.hi);
    return lo + u * (hi - lo);
  }
  const double total = s.width() + b.width();
  if (!(total > 0.0)) return s.lo;
  const double r = u * total;
  return r < s.width() ? s.lo + r : b.lo + (r - s.width());
}

}  // namespace

std::string to_string(ContextualVariant v) {
  switch (v) {
    case ContextualVariant::GftTwoBit: return "gft-2bit";
    case ContextualVariant::GftOneBitSafe: return "gft-1bit-safe";
    case ContextualVariant::GftOneBitBB: return "gft-1bit-bb";
    case ContextualVariant::ProfitTwoBit: return "profit-2bit";
    case ContextualVariant::ProfitOneBitSafe: return "profit-1bit-safe";
    case ContextualVariant::ProfitOneBitBB: return "profit-1bit-bb";
  }
  return "unknown";
}

std::optional<ContextualVariant> contextual_variant_from(const std::string& id) {
  for (ContextualVariant v :
       {ContextualVariant::GftTwoBit, ContextualVariant::GftOneBitSafe, ContextualVariant::GftOneBitBB,
        ContextualVariant::ProfitTwoBit, ContextualVariant::ProfitOneBitSafe,
        ContextualVariant::ProfitOneBitBB})
    if (to_string(v) == id) return v;
  return std::nullopt;
}

bool is_profit(ContextualVariant v) {
  return v == ContextualVariant::ProfitTwoBit || v == ContextualVariant::ProfitOneBitSafe ||
         v == ContextualVariant::ProfitOneBitBB;
}

bool is_two_bit(ContextualVariant v) {
  return v == ContextualVariant::GftTwoBit || v == ContextualVariant::ProfitTwoBit;
}

bool is_budget_balanced(ContextualVariant v) {
  return v != ContextualVariant::GftOneBitSafe && v != ContextualVariant::ProfitOneBitSafe;
}

int gft_index(double w) {
  if (!(w > tol::kDegenerateWidth)) throw DegenerateWidth("gft_index: width below 1e-9");
  int i = 60;
  while (i > -1 && w > std::ldexp(1.0, -i)) --i;
  return i;
}

int profit_index(double w) {
  if (!(w > tol::kDegenerateWidth)) throw DegenerateWidth("profit_index: width below 1e-9");
  if (w > 0.5) return -1;
  int i = 0;
  while (i < 8 && w <= std::ldexp(1.0, -(1 << (i + 1)))) ++i;
  return i;
}

double gft_scale(int i, int d) { return std::ldexp(1.0, -i) / (8.0 * d); }

double profit_scale(int i, int d) { return std::ldexp(1.0, -3 * (1 << i)) / (16.0 * d); }

double profit_tail(int i) { return std::exp2(-std::exp2(static_cast<double>(i - 1))); }

Projected project_region(const ConvexRegion<double>& K, const Context& x) {
  const detail::SupportPair<double> sp = detail::support_pair(K, x);
  const WidthInterval<double> w = detail::interval_from(sp);
  Projected p;
  p.lo = w.lo;
  p.hi = w.hi;
  p.cert_lo = sp.min.lower;
  p.cert_hi = sp.max.upper;
  p.degenerate = w.degenerate;
  p.support = sp;
  return p;
}

Decision twobit_gft_price(LearnerState& st, const Context& x) { return gft_dominance(st, x, false); }

Decision onebit_gft_safe_price(LearnerState& st, const Context& x) {
  return gft_dominance(st, x, true);
}

Decision onebit_gft_bb_price(LearnerState& st, const Context& x) {
  Decision d;
  project_both(st, x, d);
  const Projected& s = d.seller;
  const Projected& b = d.buyer;
  double p;
  if (both_degenerate(d)) {
    d.label = CaseLabel::SmallWidths;
    p = s.hi;
  } else if (s.hi <= b.lo) {
    d.label = CaseLabel::WellSeparated;
    p = s.hi;
  } else if (const auto weak = weak_overlap_price(s, b)) {
    d.label = CaseLabel::WeakOverlap;
    p = *weak;
  } else {
    d.label = CaseLabel::StrongOverlap;
    p = uniform_on_union(st.rng, s, b);
  }
  d.prices = {p, p};
  return d;
}

Decision twobit_profit_price(LearnerState& st, const Context& x) {
  return profit_dominance(st, x, false);
}

Decision onebit_profit_safe_price(LearnerState& st, const Context& x) {
  return profit_dominance(st, x, true);
}

Decision onebit_profit_bb_price(LearnerState& st, const Context& x) {
  Decision d;
  project_both(st, x, d);
  const Projected& s = d.seller;
  const Projected& b = d.buyer;
  if (std::max(s.width(), b.width()) <= 1.0 / static_cast<double>(st.horizon)) {
    d.label = CaseLabel::SmallWidths;
    d.prices = {s.hi, std::max(s.hi, b.lo)};
  } else if (const auto weak = weak_overlap_price(s, b)) {
    d.label = CaseLabel::WeakOverlap;
    d.prices = {*weak, *weak};
  } else {
    d.label = CaseLabel::StrongOverlap;
    const double u = std::uniform_real_distribution<double>(-1.0, 1.0)(st.rng);
    d.prices = {u, u};
  }
  return d;
}

KnownBits deduce_bits(const Decision& d, const Feedback& fb, bool use_two_bits) {
  KnownBits k;
  if (use_two_bits) {
    if (!fb.bits) throw ModeMismatch("two-bit learner received one-bit feedback");
    k.seller = fb.bits->seller_accepts;
    k.buyer = fb.bits->buyer_accepts;
    return k;
  }
  if (fb.traded) {
    k.seller = true;
    k.buyer = true;
    return k;
  }
  // s_t lies in [cert_lo, cert_hi] and b_t likewise.
  if (d.prices.p >= d.seller.cert_hi) k.seller = true;
  if (d.prices.p < d.seller.cert_lo) k.seller = false;
  if (d.prices.q <= d.buyer.cert_lo) k.buyer = true;
  if (d.prices.q > d.buyer.cert_hi) k.buyer = false;
  if (k.seller == true && !k.buyer) k.buyer = false;
  if (k.buyer == true && !k.seller) k.seller = false;
  if (k.seller == true && k.buyer == true)
    throw InconsistentFeedback("both agents surely accept yet no trade was reported");
  return k;
}

void apply_update(LearnerState& st, const Context& x, const Decision& d, const KnownBits& bits) {
  if (bits.seller)
    st.S = cut_with_support(st.S, x, d.prices.p, *bits.seller ? Sense::AtMost : Sense::AtLeast,
                            d.seller.support);
  if (bits.buyer)
    st.B = cut_with_support(st.B, x, d.prices.q, *bits.buyer ? Sense::AtLeast : Sense::AtMost,
                            d.buyer.support);
}

ContextualLearner::ContextualLearner(ContextualVariant variant, const LearnerConfig& config)
    : config_(config) {
  if (config.d < 1) throw InvalidArgument("learner dimension must be positive");
  if (is_profit(variant) && config.horizon < 1)
    throw InvalidArgument(to_string(variant) + " needs the horizon T");
  config.sampling.validate();
  state_.variant = variant;
  state_.d = config.d;
  state_.horizon = config.horizon;
  state_.cfg = config.sampling;
  seed(config.sampling.seed);
}

bool ContextualLearner::supports(FeedbackMode mode) const {
  return !(is_two_bit(state_.variant) && mode == FeedbackMode::OneBit);
}

void ContextualLearner::seed(std::uint64_t seed) {
  state_.S = ConvexRegion<double>::ball(config_.d);
  state_.B = ConvexRegion<double>::ball(config_.d);
  state_.base_seed = seed;
  state_.rng.seed(splitmix64(seed));
  state_.round = 0;
  state_.clamped_index_rounds = 0;
  decision_ = {};
  potential_.reset();
}

PricePair ContextualLearner::observe_context(const Context& x) {
  if (x.dim() != config_.d) throw InvalidArgument("context dimension does not match the learner");
  ++state_.round;
  x_ = x;
  switch (state_.variant) {
    case ContextualVariant::GftTwoBit: decision_ = twobit_gft_price(state_, x); break;
    case ContextualVariant::GftOneBitSafe: decision_ = onebit_gft_safe_price(state_, x); break;
    case ContextualVariant::GftOneBitBB: decision_ = onebit_gft_bb_price(state_, x); break;
    case ContextualVariant::ProfitTwoBit: decision_ = twobit_profit_price(state_, x); break;
    case ContextualVariant::ProfitOneBitSafe: decision_ = onebit_profit_safe_price(state_, x); break;
    case ContextualVariant::ProfitOneBitBB: decision_ = onebit_profit_bb_price(state_, x); break;
  }
  return decision_.prices;
}

void ContextualLearner::receive(const Feedback& fb) {
  const KnownBits bits = deduce_bits(decision_, fb, is_two_bit(state_.variant));
  apply_update(state_, x_, decision_, bits);
  if (config_.trace_potential) potential_ = trace();
}

std::optional<double> ContextualLearner::trace() const {
  SampleConfig cfg = config_.potential_sampling;
  cfg.seed = splitmix64(state_.base_seed + 0x5eedULL * static_cast<std::uint64_t>(state_.round));
  const double weight = std::pow(6.0, state_.d);
  if (state_.variant == ContextualVariant::GftOneBitBB) {
    // Scales 2^-i for i = 0..30, all read off one doubling ladder from 2^-30.
    const double z_min = std::ldexp(1.0, -30);
    const std::vector<double> ls = steiner_log_potential_ladder(state_.S, z_min, cfg);
    const std::vector<double> lb = steiner_log_potential_ladder(state_.B, z_min, cfg);
    double acc = 0.0;
    for (int i = 0; i <= 30; ++i) {
      const std::size_t k = static_cast<std::size_t>(30 - i);
      acc += std::ldexp(1.0, -i) * (ls[k] + lb[k]);
    }
    return 64.0 * weight * acc;
  }
  if (state_.variant == ContextualVariant::ProfitOneBitBB) {
    const double T = static_cast<double>(state_.horizon);
    const double z = 1.0 / (16.0 * T);
    const double pot = steiner_log_potential(state_.S, z, cfg) + steiner_log_potential(state_.B, z, cfg);
    return 2.0 * weight * pot + 2.0 * (T - static_cast<double>(state_.round)) / T;
  }
  return std::nullopt;
}

const std::vector<std::string>& variant_ids() {
  static const std::vector<std::string> ids = {
      "cf-dyadic-gft", "cf-random-gft",  "cf-quad-profit",   "gft-2bit",      "gft-1bit-safe",
      "gft-1bit-bb",   "profit-2bit",    "profit-1bit-safe", "profit-1bit-bb"};
  return ids;
}

std::unique_ptr<Learner> make_learner(const std::string& id, const LearnerConfig& config) {
  if (id == "cf-dyadic-gft") return std::make_unique<DyadicGftLearner>();
  if (id == "cf-random-gft") return std::make_unique<RandomGftLearner>();
  if (id == "cf-quad-profit") {
    if (config.horizon < 1) throw InvalidArgument("cf-quad-profit needs the horizon T");
    return std::make_unique<QuadProfitLearner>(config.horizon);
  }
  if (const auto v = contextual_variant_from(id)) return std::make_unique<ContextualLearner>(*v, config);
  throw InvalidArgument("unknown variant: " + id);
}

FeedbackMode default_mode(const std::string& id) {
  const auto v = contextual_variant_from(id);
  return v && is_two_bit(*v) ? FeedbackMode::TwoBit : FeedbackMode::OneBit;
}

}  // namespace bitrade
