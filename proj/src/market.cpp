#include "bitrade/market.hpp"

#include <algorithm>
#include <string>

namespace bitrade {

namespace {
constexpr double kNormSlack = 1e-9;
}

void MarketParams::validate() const {
  if (s.size() != b.size() || s.size() == 0)
    throw InvalidInstance("seller and buyer weights must have the same positive dimension");
  if (!s.allFinite() || !b.allFinite()) throw InvalidInstance("weights must be finite");
  if (s.norm() > 1.0 + kNormSlack) throw InvalidInstance("seller weights lie outside the unit ball");
  if (b.norm() > 1.0 + kNormSlack) throw InvalidInstance("buyer weights lie outside the unit ball");
}

void Instance::validate() const {
  if (d < 1) throw InvalidInstance("dimension must be positive");
  if (T < 0) throw InvalidInstance("horizon must be non-negative");
  params.validate();
  if (params.dim() != d) throw InvalidInstance("weight dimension does not match d");
  if (contexts.rows() != d || contexts.cols() != T)
    throw InvalidInstance("context matrix must be d x T");
  for (Eigen::Index t = 0; t < contexts.cols(); ++t)
    if (std::abs(contexts.col(t).norm() - 1.0) > tol::kUnitNorm)
      throw InvalidInstance("context " + std::to_string(t) + " is not unit norm");
}

std::pair<double, double> valuations(const MarketParams& params, const Context& x) {
  return {params.s.dot(x.coords()), params.b.dot(x.coords())};
}

RoundOutcome round_outcome(const MarketParams& params, const Context& x, const PricePair& prices) {
  const auto [st, bt] = valuations(params, x);
  RoundOutcome out;
  out.traded = st <= prices.p && prices.q <= bt;
  out.gft = out.traded ? bt - st : 0.0;
  out.profit = out.traded ? prices.q - prices.p : 0.0;
  out.benchmark = std::max(0.0, bt - st);
  return out;
}

}  // namespace bitrade
