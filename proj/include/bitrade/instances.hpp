#pragma once

// Instance generators and the instance JSON format.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "bitrade/market.hpp"

namespace bitrade {

/// Contexts uniform on the sphere, s and b uniform in the ball. s and b are
/// drawn first and contexts sequentially, so equal seeds share a prefix
/// across horizons.
Instance random_instance(int d, std::int64_t T, std::uint64_t seed);

/// Canonical-basis contexts with per-coordinate (s_j, b_j) drawn from
/// {(0, 1/3), (2/3, 1)}, both vectors scaled by 1/sqrt(d) to fit the unit
/// ball. T defaults to d; longer horizons cycle through the basis again.
Instance gft_lower_bound_instance(int d, std::uint64_t seed, std::int64_t T = -1);

/// floor(T/d) copies of e_1, then of e_2, ...; the remainder goes to e_d.
Eigen::MatrixXd chunked_basis_contexts(int d, std::int64_t T);

/// chunked_basis_contexts with seeded random s, b in the ball.
Instance chunked_basis_instance(int d, std::int64_t T, std::uint64_t seed);

/// Dispatch on a generator kind: "random", "gft-lower-bound", "chunked-basis".
Instance generate_instance(const std::string& kind, int d, std::int64_t T, std::uint64_t seed);

/// d = 1, x_t = 1 for all t, fixed scalar valuations.
Instance constant_instance(double s, double b, std::int64_t T);

nlohmann::json instance_to_json(const Instance& inst, bool embed_contexts = true);
Instance instance_from_json(const nlohmann::json& j);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path, bool embed_contexts = true);

}  // namespace bitrade
