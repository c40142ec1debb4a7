#include "bitrade/lemma_suites.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "bitrade/contextual.hpp"
#include "bitrade/sampling.hpp"

namespace bitrade {

namespace {

using oracle2d::Point;

Eigen::VectorXd random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Eigen::VectorXd v(2);
  do {
    v << n01(rng), n01(rng);
  } while (v.norm() < 1e-9);
  return v / v.norm();
}

Point as_point(const Context& x) { return {x[0], x[1]}; }

double inflated_ratio(const oracle2d::Polygon& poly, const Context& x, double price, Sense sense,
                      double z) {
  const HalfSpace<double> h{x, price, sense};
  const oracle2d::Polygon piece = oracle2d::clip(poly, h);
  return oracle2d::steiner_area(piece, z) / oracle2d::steiner_area(poly, z);
}

SampleConfig sampling(const SuiteOptions& opt, std::uint64_t trial) {
  SampleConfig cfg;
  cfg.n_samples = opt.samples;
  cfg.seed = opt.seed * 1000003ULL + trial;
  return cfg;
}

void finish(SuiteResult& r) {
  r.pass = r.trials > 0 && r.passes >= static_cast<int>(std::ceil(r.required_rate * r.trials - 1e-9));
}

}  // namespace

RandomRegion random_region_2d(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RandomRegion out;
  out.truth = random_unit(rng) * std::sqrt(unif(rng)) * 0.95;
  out.region = ConvexRegion<double>::ball(2);
  const int n_cuts = static_cast<int>(unif(rng) * 9.0);
  for (int k = 0; k < n_cuts; ++k) {
    const Context x = Context::normalized(random_unit(rng));
    const double spread = std::pow(10.0, -3.5 * unif(rng));
    const double price = x.coords().dot(out.truth) + spread * unif(rng);
    out.region = cut(out.region, x, price, Sense::AtMost);
  }
  out.polygon = oracle2d::polygonize(out.region);
  return out;
}

SuiteResult balanced_suite(const SuiteOptions& opt) {
  SuiteResult r{"balanced", opt.trials, 0, 0.0, 1.0, false, ""};
  const double exact_bound = 0.75 * (1.0 + 1e-6);
  const double mc_bound = 0.78;
  int exact_ok = 0;
  int mc_ok = 0;
  for (int k = 0; k < opt.trials; ++k) {
    const std::uint64_t trial = static_cast<std::uint64_t>(k);
    const RandomRegion rr = random_region_2d(opt.seed * 7919ULL + trial);
    std::mt19937_64 rng(opt.seed ^ (trial * 0x9e3779b97f4a7c15ULL));
    const Context x = Context::normalized(random_unit(rng));
    const auto [lo, hi] = oracle2d::support(rr.polygon, as_point(x));
    const int i = gft_index(hi - lo);
    const double z = gft_scale(i, 2);

    const double p_exact = oracle2d::balanced_price(rr.polygon, z, as_point(x), 0.5, Sense::AtMost);
    const double f_exact = std::max(inflated_ratio(rr.polygon, x, p_exact, Sense::AtMost, z),
                                    inflated_ratio(rr.polygon, x, p_exact, Sense::AtLeast, z));
    if (f_exact <= exact_bound) ++exact_ok;

    const double p_mc = bisect_balanced_price(rr.region, z, x, 0.5, Sense::AtMost, sampling(opt, trial));
    const double f_mc = std::max(inflated_ratio(rr.polygon, x, p_mc, Sense::AtMost, z),
                                 inflated_ratio(rr.polygon, x, p_mc, Sense::AtLeast, z));
    if (f_mc <= mc_bound) ++mc_ok;
    r.worst = std::max(r.worst, f_exact / exact_bound);
  }
  const bool exact_pass = exact_ok == opt.trials;
  const bool mc_pass = mc_ok >= static_cast<int>(std::ceil(0.99 * opt.trials - 1e-9));
  r.passes = std::min(exact_ok, mc_ok);
  std::ostringstream os;
  os << "exact<=0.75: " << exact_ok << "/" << opt.trials << ", mc<=0.78: " << mc_ok << "/" << opt.trials;
  r.detail = os.str();
  r.pass = opt.trials > 0 && exact_pass && mc_pass;
  return r;
}

SuiteResult partition_suite(const SuiteOptions& opt) {
  SuiteResult r{"partition", opt.trials, 0, 0.0, 1.0, false, ""};
  for (int k = 0; k < opt.trials; ++k) {
    const std::uint64_t trial = static_cast<std::uint64_t>(k);
    const RandomRegion rr = random_region_2d(opt.seed * 104729ULL + trial);
    std::mt19937_64 rng(opt.seed ^ (trial * 0xbf58476d1ce4e5b9ULL));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Context x = Context::normalized(random_unit(rng));
    const double alpha = (k % 2 == 0) ? 0.25 : 0.5;
    const auto [lo, hi] = oracle2d::support(rr.polygon, as_point(x));
    const double w = hi - lo;
    const double z = alpha * w * std::max(1e-6, unif(rng));
    const double bound = 1.0 - std::pow(alpha / (1.0 + 2.0 * alpha), 2);
    // H holds the alpha fraction at either end; K \ H is the rest.
    const double left = inflated_ratio(rr.polygon, x, lo + alpha * w, Sense::AtLeast, z);
    const double right = inflated_ratio(rr.polygon, x, hi - alpha * w, Sense::AtMost, z);
    const double worst = std::max(left, right) / bound;
    r.worst = std::max(r.worst, worst);
    if (worst <= 1.0) ++r.passes;
  }
  r.detail = std::to_string(r.passes) + "/" + std::to_string(r.trials) + " within bound";
  finish(r);
  return r;
}

SuiteResult refuse_accept_suite(const SuiteOptions& opt) {
  SuiteResult r{"refuse-accept", opt.trials, 0, 0.0, 0.95, false, ""};
  SampleConfig probe;
  probe.n_samples = opt.samples;
  const double delta = balanced_tolerance(probe);
  int refuse_ok = 0;
  int accept_ok = 0;
  for (int k = 0; k < opt.trials; ++k) {
    const std::uint64_t trial = static_cast<std::uint64_t>(k);
    const RandomRegion rr = random_region_2d(opt.seed * 15485863ULL + trial);
    std::mt19937_64 rng(opt.seed ^ (trial * 0x94d049bb133111ebULL));
    const Context x = Context::normalized(random_unit(rng));
    const auto [lo, hi] = oracle2d::support(rr.polygon, as_point(x));
    const int i = std::max(0, profit_index(hi - lo));
    const double z = profit_scale(i, 2);
    const double tail = profit_tail(i);
    // Seller-side unbalanced price: upper tail `tail` beyond m, posted at m + z.
    const double m = bisect_balanced_price(rr.region, z, x, tail, Sense::AtLeast, sampling(opt, trial));
    const double p = m + z;
    const double refused = inflated_ratio(rr.polygon, x, p, Sense::AtLeast, z);
    const double accepted = inflated_ratio(rr.polygon, x, p, Sense::AtMost, z);
    const double refuse_bound = tail * (1.0 + 10.0 * delta);
    const double accept_bound = 1.0 - tail / 10.0 + 10.0 * delta;
    const bool ok_r = refused <= refuse_bound;
    const bool ok_a = accepted <= accept_bound;
    refuse_ok += ok_r;
    accept_ok += ok_a;
    if (ok_r && ok_a) ++r.passes;
    r.worst = std::max({r.worst, refused / refuse_bound, accepted / accept_bound});
  }
  std::ostringstream os;
  os << "refuse " << refuse_ok << "/" << opt.trials << ", accept " << accept_ok << "/" << opt.trials;
  r.detail = os.str();
  finish(r);
  return r;
}

SuiteResult mc_volume_suite(const SuiteOptions& opt) {
  SuiteResult r{"mc-volume", opt.trials, 0, 0.0, 0.95, false, ""};
  for (int k = 0; k < opt.trials; ++k) {
    const std::uint64_t trial = static_cast<std::uint64_t>(k);
    const RandomRegion rr = random_region_2d(opt.seed * 32452843ULL + trial);
    std::mt19937_64 rng(opt.seed ^ (trial * 0x2545f4914f6cdd1dULL));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Context x = Context::normalized(random_unit(rng));
    const auto [lo, hi] = oracle2d::support(rr.polygon, as_point(x));
    const double z = (k % 4 == 0) ? 0.0 : 0.3 * unif(rng) * std::max(hi - lo, 1e-3);
    const double price = lo - z + unif(rng) * (hi - lo + 2.0 * z);
    const Sense sense = (k % 2 == 0) ? Sense::AtMost : Sense::AtLeast;
    const SampleConfig cfg = sampling(opt, trial);
    const double mc = volume_fraction(rr.region, z, x, price, sense, cfg);
    const double exact = oracle2d::split_fraction(rr.polygon, z, as_point(x), price, sense);
    const double tol = 3.0 * mc_standard_error(cfg);
    const double err = std::abs(mc - exact) / tol;
    r.worst = std::max(r.worst, err);
    if (err <= 1.0) ++r.passes;
  }
  r.detail = std::to_string(r.passes) + "/" + std::to_string(r.trials) + " within 3 standard errors";
  finish(r);
  return r;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"balanced", "partition", "refuse-accept", "mc-volume"};
  return names;
}

SuiteResult run_suite(const std::string& name, const SuiteOptions& opt) {
  if (opt.trials < 1) throw InvalidArgument("--trials must be positive");
  if (name == "balanced") return balanced_suite(opt);
  if (name == "partition") return partition_suite(opt);
  if (name == "refuse-accept") return refuse_accept_suite(opt);
  if (name == "mc-volume") return mc_volume_suite(opt);
  throw InvalidArgument("unknown suite: " + name);
}

}  // namespace bitrade
