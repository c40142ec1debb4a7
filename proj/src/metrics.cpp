#include "bitrade/metrics.hpp"

#include <algorithm>
#include <cstdio>

namespace bitrade {

std::string to_string(CaseLabel c) {
  switch (c) {
    case CaseLabel::WellSeparated: return "well-separated";
    case CaseLabel::SellerDominating: return "seller-dominating";
    case CaseLabel::BuyerDominating: return "buyer-dominating";
    case CaseLabel::WeakOverlap: return "weak-overlap";
    case CaseLabel::StrongOverlap: return "strong-overlap";
    case CaseLabel::SmallWidths: return "small-widths";
    case CaseLabel::Probe: return "probe";
    case CaseLabel::Locked: return "locked";
    case CaseLabel::SellerSweep: return "seller-sweep";
    case CaseLabel::BuyerSweep: return "buyer-sweep";
  }
  return "unknown";
}

void Accumulator::add(RoundRecord& rec) {
  Summary& s = summary_;
  s.rounds += 1;
  s.gft_regret += rec.benchmark - rec.gft;
  s.profit_regret += rec.benchmark - rec.profit;
  s.budget_violation += std::max(0.0, -rec.profit);
  s.total_gft += rec.gft;
  s.total_profit += rec.profit;
  s.total_benchmark += rec.benchmark;
  s.trades += rec.traded ? 1 : 0;
  s.fallbacks += rec.fallback ? 1 : 0;
  rec.cum_gft_regret = s.gft_regret;
  rec.cum_profit_regret = s.profit_regret;
  rec.cum_budget_violation = s.budget_violation;
}

Summary accumulate(const std::vector<RoundRecord>& records) {
  Summary s;
  if (records.empty()) return s;
  const RoundRecord& last = records.back();
  s.rounds = static_cast<std::int64_t>(records.size());
  s.gft_regret = last.cum_gft_regret;
  s.profit_regret = last.cum_profit_regret;
  s.budget_violation = last.cum_budget_violation;
  for (const RoundRecord& r : records) {
    s.total_gft += r.gft;
    s.total_profit += r.profit;
    s.total_benchmark += r.benchmark;
    s.trades += r.traded ? 1 : 0;
    s.fallbacks += r.fallback ? 1 : 0;
  }
  return s;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv_header(std::ostream& os, bool with_potential) {
  os << "t,case,p,q,traded,gft,profit,benchmark,cum_gft_regret,cum_profit_regret,"
        "cum_budget_violation,fallback";
  if (with_potential) os << ",potential";
  os << '\n';
}

void write_csv_row(std::ostream& os, const RoundRecord& r, bool with_potential) {
  os << r.t << ',' << to_string(r.case_label) << ',' << format_double(r.p) << ','
     << format_double(r.q) << ',' << (r.traded ? 1 : 0) << ',' << format_double(r.gft) << ','
     << format_double(r.profit) << ',' << format_double(r.benchmark) << ','
     << format_double(r.cum_gft_regret) << ',' << format_double(r.cum_profit_regret) << ','
     << format_double(r.cum_budget_violation) << ',' << (r.fallback ? 1 : 0);
  if (with_potential) os << ',' << (r.potential_trace ? format_double(*r.potential_trace) : "");
  os << '\n';
}

void write_csv(std::ostream& os, const std::vector<RoundRecord>& records) {
  const bool pot = std::any_of(records.begin(), records.end(),
                               [](const RoundRecord& r) { return r.potential_trace.has_value(); });
  write_csv_header(os, pot);
  for (const RoundRecord& r : records) write_csv_row(os, r, pot);
}

}  // namespace bitrade
