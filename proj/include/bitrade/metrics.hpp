#pragma once

// Per-round records, regret and budget accounting, CSV and JSON output.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bitrade/market.hpp"

namespace bitrade {

/// Case of the round's pricing rule. The first six are the contextual
/// learners' case analysis; the rest label context-free phases.
enum class CaseLabel {
  WellSeparated,
  SellerDominating,
  BuyerDominating,
  WeakOverlap,
  StrongOverlap,
  SmallWidths,
  Probe,
  Locked,
  SellerSweep,
  BuyerSweep,
};

std::string to_string(CaseLabel c);

struct RoundRecord {
  std::int64_t t = 0;  // 1-based
  CaseLabel case_label = CaseLabel::Probe;
  double p = 0.0;
  double q = 0.0;
  bool traded = false;
  double gft = 0.0;
  double profit = 0.0;
  double benchmark = 0.0;
  double cum_gft_regret = 0.0;
  double cum_profit_regret = 0.0;
  double cum_budget_violation = 0.0;
  bool fallback = false;  // price fell back to an interval midpoint
  std::optional<double> potential_trace;
};

struct Summary {
  std::int64_t rounds = 0;
  double gft_regret = 0.0;
  double profit_regret = 0.0;
  double budget_violation = 0.0;
  double total_gft = 0.0;
  double total_profit = 0.0;
  double total_benchmark = 0.0;
  std::int64_t trades = 0;
  std::int64_t fallbacks = 0;
};

/// Running sums; fills the cumulative fields of each record it sees.
class Accumulator {
 public:
  void add(RoundRecord& rec);
  const Summary& summary() const { return summary_; }

 private:
  Summary summary_;
};

Summary accumulate(const std::vector<RoundRecord>& records);

/// Column header, then one line per record. Floats use 12 significant digits.
void write_csv_header(std::ostream& os, bool with_potential = false);
void write_csv_row(std::ostream& os, const RoundRecord& rec, bool with_potential = false);
void write_csv(std::ostream& os, const std::vector<RoundRecord>& records);

std::string format_double(double v);

}  // namespace bitrade
