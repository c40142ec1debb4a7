#include "bitrade/instances.hpp"

#include <cmath>
#include <fstream>
#include <random>

namespace bitrade {

namespace {

Eigen::VectorXd gaussian(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = n01(rng);
  return v;
}

Eigen::VectorXd unit_sphere(std::mt19937_64& rng, int d) {
  for (;;) {
    const Eigen::VectorXd g = gaussian(rng, d);
    const double n = g.norm();
    if (n > 1e-12) return g / n;
  }
}

Eigen::VectorXd unit_ball(std::mt19937_64& rng, int d) {
  const Eigen::VectorXd dir = unit_sphere(rng, d);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return std::pow(u, 1.0 / d) * dir;
}

void check_shape(int d, std::int64_t T) {
  if (d < 1) throw InvalidInstance("dimension must be positive");
  if (T < 0) throw InvalidInstance("horizon must be non-negative");
}

Eigen::VectorXd vector_from(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw InvalidInstance(std::string(what) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

nlohmann::json vector_to(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

Instance random_instance(int d, std::int64_t T, std::uint64_t seed) {
  check_shape(d, T);
  std::mt19937_64 rng(seed);
  Instance inst;
  inst.d = d;
  inst.T = T;
  inst.params.s = unit_ball(rng, d);
  inst.params.b = unit_ball(rng, d);
  inst.contexts.resize(d, T);
  for (std::int64_t t = 0; t < T; ++t) inst.contexts.col(t) = unit_sphere(rng, d);
  inst.generator = GeneratorSpec{"random", seed};
  return inst;
}

Instance gft_lower_bound_instance(int d, std::uint64_t seed, std::int64_t T) {
  if (T < 0) T = d;
  check_shape(d, T);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  Instance inst;
  inst.d = d;
  inst.T = T;
  inst.params.s.resize(d);
  inst.params.b.resize(d);
  for (int j = 0; j < d; ++j) {
    const bool high = coin(rng);
    inst.params.s(j) = (high ? 2.0 / 3.0 : 0.0) * scale;
    inst.params.b(j) = (high ? 1.0 : 1.0 / 3.0) * scale;
  }
  inst.contexts = Eigen::MatrixXd::Zero(d, T);
  for (std::int64_t t = 0; t < T; ++t) inst.contexts(t % d, t) = 1.0;
  inst.generator = GeneratorSpec{"gft-lower-bound", seed};
  return inst;
}

Eigen::MatrixXd chunked_basis_contexts(int d, std::int64_t T) {
  if (d < 1 || T < d) throw InvalidInstance("chunked-basis contexts need d >= 1 and T >= d");
  const std::int64_t chunk = T / d;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, T);
  for (std::int64_t t = 0; t < T; ++t) out(std::min<std::int64_t>(t / chunk, d - 1), t) = 1.0;
  return out;
}

Instance chunked_basis_instance(int d, std::int64_t T, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Instance inst;
  inst.d = d;
  inst.T = T;
  inst.params.s = unit_ball(rng, d);
  inst.params.b = unit_ball(rng, d);
  inst.contexts = chunked_basis_contexts(d, T);
  inst.generator = GeneratorSpec{"chunked-basis", seed};
  return inst;
}

Instance generate_instance(const std::string& kind, int d, std::int64_t T, std::uint64_t seed) {
  if (kind == "random") return random_instance(d, T, seed);
  if (kind == "gft-lower-bound") return gft_lower_bound_instance(d, seed, T);
  if (kind == "chunked-basis") return chunked_basis_instance(d, T, seed);
  throw InvalidArgument("unknown generator kind: " + kind);
}

Instance constant_instance(double s, double b, std::int64_t T) {
  check_shape(1, T);
  Instance inst;
  inst.d = 1;
  inst.T = T;
  inst.params.s = Eigen::VectorXd::Constant(1, s);
  inst.params.b = Eigen::VectorXd::Constant(1, b);
  inst.contexts = Eigen::MatrixXd::Ones(1, T);
  inst.params.validate();
  return inst;
}

nlohmann::json instance_to_json(const Instance& inst, bool embed_contexts) {
  nlohmann::json j;
  j["d"] = inst.d;
  j["T"] = inst.T;
  j["s"] = vector_to(inst.params.s);
  j["b"] = vector_to(inst.params.b);
  if (embed_contexts || !inst.generator) {
    nlohmann::json ctx = nlohmann::json::array();
    for (Eigen::Index t = 0; t < inst.contexts.cols(); ++t) ctx.push_back(vector_to(inst.contexts.col(t)));
    j["contexts"] = std::move(ctx);
  } else {
    j["generator"] = {{"kind", inst.generator->kind}, {"seed", inst.generator->seed}};
  }
  return j;
}

Instance instance_from_json(const nlohmann::json& j) {
  try {
    const int d = j.at("d").get<int>();
    const std::int64_t T = j.at("T").get<std::int64_t>();
    Instance inst;
    if (j.contains("generator")) {
      const auto& g = j.at("generator");
      inst = generate_instance(g.at("kind").get<std::string>(), d, T, g.at("seed").get<std::uint64_t>());
    } else {
      inst.d = d;
      inst.T = T;
      const auto& ctx = j.at("contexts");
      if (!ctx.is_array() || static_cast<std::int64_t>(ctx.size()) != T)
        throw InvalidInstance("contexts must list exactly T vectors");
      inst.contexts.resize(d, T);
      for (std::int64_t t = 0; t < T; ++t) {
        Eigen::VectorXd v = vector_from(ctx[static_cast<std::size_t>(t)], "context");
        if (v.size() != d) throw InvalidInstance("context has the wrong dimension");
        const double n = v.norm();
        if (!(n > 0.0) || !std::isfinite(n)) throw InvalidInstance("context must be a non-zero vector");
        // Vectors already unit to rounding are kept bit-exact.
        if (std::abs(n - 1.0) > 1e-12) v /= n;
        inst.contexts.col(t) = v;
      }
    }
    if (j.contains("s")) inst.params.s = vector_from(j.at("s"), "s");
    if (j.contains("b")) inst.params.b = vector_from(j.at("b"), "b");
    inst.validate();
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInstance(std::string("malformed instance JSON: ") + e.what());
  }
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInstance("cannot open instance file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInstance(std::string("malformed instance JSON: ") + e.what());
  }
  return instance_from_json(j);
}

void save_instance(const Instance& inst, const std::string& path, bool embed_contexts) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << instance_to_json(inst, embed_contexts).dump() << '\n';
}

}  // namespace bitrade
