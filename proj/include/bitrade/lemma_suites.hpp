#pragma once

// Randomized checks of the contraction lemmas on planar regions, scored with
// the exact oracle2d areas. Shared by `bitrade verify` and the acceptance run.

#include <cstdint>
#include <string>
#include <vector>

#include "bitrade/geometry.hpp"
#include "bitrade/oracle2d.hpp"

namespace bitrade {

struct SuiteResult {
  std::string name;
  int trials = 0;
  int passes = 0;
  double worst = 0.0;   // largest observed ratio of value to its bound
  double required_rate = 1.0;
  bool pass = false;
  std::string detail;
};

struct SuiteOptions {
  int trials = 100;
  std::uint64_t seed = 1;
  std::int64_t samples = 4096;
};

/// A random planar region from truthful cuts around a random point, with
/// widths spread over several orders of magnitude.
struct RandomRegion {
  ConvexRegion<double> region;
  oracle2d::Polygon polygon;
  Eigen::VectorXd truth;
};

RandomRegion random_region_2d(std::uint64_t seed);

/// Balanced cuts contract the inflated area to at most 3/4: exact prices on
/// every trial, Monte-Carlo prices up to 0.78 on 99% of trials.
SuiteResult balanced_suite(const SuiteOptions& opt);

/// Cutting away the far side of an alpha-fraction half-space leaves at most
/// 1 - (alpha / (1 + 2 alpha))^2 of the inflated area, alpha in {1/4, 1/2}.
SuiteResult partition_suite(const SuiteOptions& opt);

/// Refusals of unbalanced prices contract by the tail target, acceptances by
/// 1 - tail / 10, each with 10 delta_b of Monte-Carlo slack; 95% must pass.
SuiteResult refuse_accept_suite(const SuiteOptions& opt);

/// Monte-Carlo volume fractions within 3 standard errors of the exact ones
/// in at least 95% of trials.
SuiteResult mc_volume_suite(const SuiteOptions& opt);

const std::vector<std::string>& suite_names();

/// Throws InvalidArgument for an unknown name.
SuiteResult run_suite(const std::string& name, const SuiteOptions& opt);

}  // namespace bitrade
