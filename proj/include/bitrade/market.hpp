#pragma once

// Domain vocabulary of one bilateral-trade round: hidden weights, contexts,
// posted prices, acceptance bits and payoffs.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "bitrade/geometry.hpp"

namespace bitrade {

using Context = Direction<double>;

/// Hidden seller and buyer weight vectors, both in the unit ball.
struct MarketParams {
  Eigen::VectorXd s;
  Eigen::VectorXd b;

  Eigen::Index dim() const { return s.size(); }
  /// Throws InvalidInstance on dimension mismatch or norm above 1 + 1e-9.
  void validate() const;
};

struct GeneratorSpec {
  std::string kind;
  std::uint64_t seed = 0;
};

struct Instance {
  int d = 0;
  std::int64_t T = 0;
  MarketParams params;
  Eigen::MatrixXd contexts;  // d x T, unit columns
  std::optional<GeneratorSpec> generator;

  Context context(std::int64_t t) const { return Context::normalized(contexts.col(t)); }
  void validate() const;
};

struct PricePair {
  double p = 0.0;  // to the seller
  double q = 0.0;  // to the buyer
};

struct TwoBitFeedback {
  bool seller_accepts = false;
  bool buyer_accepts = false;

  bool traded() const { return seller_accepts && buyer_accepts; }
  bool operator==(const TwoBitFeedback&) const = default;
};

struct RoundOutcome {
  bool traded = false;
  double gft = 0.0;
  double profit = 0.0;
  double benchmark = 0.0;
};

/// (<s,x>, <b,x>).
std::pair<double, double> valuations(const MarketParams& params, const Context& x);

/// Trade iff s_t <= p and q <= b_t (weak inequalities, no epsilon).
RoundOutcome round_outcome(const MarketParams& params, const Context& x, const PricePair& prices);

}  // namespace bitrade
