#include "bitrade/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "bitrade/context_free.hpp"
#include "bitrade/contextual.hpp"
#include "bitrade/environment.hpp"
#include "bitrade/instances.hpp"
#include "bitrade/lemma_suites.hpp"
#include "bitrade/metrics.hpp"

namespace bitrade {

namespace {

using nlohmann::ordered_json;

bool is_context_free(const std::string& variant) { return variant.rfind("cf-", 0) == 0; }

bool needs_horizon(const std::string& variant) {
  if (variant == "cf-quad-profit") return true;
  const auto v = contextual_variant_from(variant);
  return v && is_profit(*v);
}

void check_variant(const std::string& variant) {
  const auto& ids = variant_ids();
  if (std::find(ids.begin(), ids.end(), variant) == ids.end())
    throw InvalidArgument("unknown variant: " + variant);
}

FeedbackMode parse_mode(const std::string& s) {
  if (s == "two-bit") return FeedbackMode::TwoBit;
  if (s == "one-bit") return FeedbackMode::OneBit;
  throw InvalidArgument("--feedback must be two-bit or one-bit");
}

// Everything one episode needs, resolved from flags.
struct EpisodeSpec {
  std::string variant;
  std::string instance = "random";
  int d = 2;
  std::int64_t T = 0;
  std::optional<double> s;
  std::optional<double> b;
  std::uint64_t seed = 0;
  std::int64_t samples = 4096;
  std::optional<FeedbackMode> mode;
  bool trace_potential = false;
};

Instance build_instance(const EpisodeSpec& e) {
  if (e.instance.rfind("file:", 0) == 0) return load_instance(e.instance.substr(5));
  if (e.s || e.b) {
    if (!e.s || !e.b) throw InvalidArgument("--s and --b go together");
    return constant_instance(*e.s, *e.b, e.T);
  }
  if (is_context_free(e.variant)) {
    // Scalar valuations in [0, 1], drawn from the seed.
    std::mt19937_64 rng(e.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double s = unif(rng);
    double b = unif(rng);
    if (s > b) std::swap(s, b);
    return constant_instance(s, b, e.T);
  }
  return generate_instance(e.instance, e.d, e.T, e.seed);
}

std::unique_ptr<Learner> build_learner(const EpisodeSpec& e, const Instance& inst) {
  LearnerConfig cfg;
  cfg.d = inst.d;
  cfg.horizon = inst.T;
  cfg.sampling.n_samples = e.samples;
  cfg.trace_potential = e.trace_potential;
  return make_learner(e.variant, cfg);
}

void validate_spec(const EpisodeSpec& e, bool horizon_given) {
  check_variant(e.variant);
  if (needs_horizon(e.variant) && !horizon_given)
    throw InvalidArgument(e.variant + " needs the horizon: pass --T");
  if (e.T < 0) throw InvalidArgument("--T must be non-negative");
  if (e.d < 1) throw InvalidArgument("--d must be positive");
  if (e.samples < 64) throw InvalidArgument("--samples must be >= 64");
  const bool file = e.instance.rfind("file:", 0) == 0;
  if (!file && e.instance != "random" && e.instance != "gft-lower-bound" && e.instance != "chunked-basis")
    throw InvalidArgument("unknown --instance " + e.instance);
}

ordered_json summary_json(const EpisodeSpec& e, const Instance& inst, FeedbackMode mode,
                          const Summary& s) {
  ordered_json j;
  j["variant"] = e.variant;
  j["instance"] = e.instance;
  j["d"] = inst.d;
  j["T"] = inst.T;
  j["seed"] = e.seed;
  j["samples"] = e.samples;
  j["feedback"] = to_string(mode);
  j["rounds"] = s.rounds;
  j["gft_regret"] = s.gft_regret;
  j["profit_regret"] = s.profit_regret;
  j["budget_violation"] = s.budget_violation;
  j["total_gft"] = s.total_gft;
  j["total_profit"] = s.total_profit;
  j["total_benchmark"] = s.total_benchmark;
  j["trades"] = s.trades;
  j["fallbacks"] = s.fallbacks;
  return j;
}

int cmd_run(const EpisodeSpec& e, const std::string& out_path, std::ostream& out) {
  const Instance inst = build_instance(e);
  std::unique_ptr<Learner> learner = build_learner(e, inst);
  const FeedbackMode mode = e.mode.value_or(default_mode(e.variant));
  Summary summary;
  if (!out_path.empty()) {
    std::ofstream csv(out_path);
    if (!csv) throw InvalidArgument("cannot write " + out_path);
    write_csv_header(csv, e.trace_potential);
    summary = run_episode_streaming(inst, *learner, mode, e.seed,
                                    [&](const RoundRecord& r) { write_csv_row(csv, r, e.trace_potential); });
  } else {
    summary = run_episode_streaming(inst, *learner, mode, e.seed, {});
  }
  out << summary_json(e, inst, mode, summary).dump(2) << '\n';
  return kExitOk;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

template <typename T>
std::vector<T> parse_numbers(const std::string& s, const char* flag) {
  std::vector<T> out;
  for (const std::string& item : split_list(s)) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || v != std::floor(v)) throw std::invalid_argument(item);
      out.push_back(static_cast<T>(v));
    } catch (const std::logic_error&) {
      throw InvalidArgument(std::string(flag) + ": not an integer list: " + s);
    }
  }
  if (out.empty()) throw InvalidArgument(std::string(flag) + " is empty");
  return out;
}

struct Cell {
  std::string variant;
  int d;
  std::int64_t T;
};

int worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BITRADE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

double mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

int cmd_sweep(const EpisodeSpec& base, const std::string& variants, const std::string& d_list,
              const std::string& T_list, int seeds, const std::string& out_path, std::ostream& out) {
  if (seeds < 1) throw InvalidArgument("--seeds must be positive");
  const std::vector<std::string> vs = split_list(variants);
  if (vs.empty()) throw InvalidArgument("--variants is empty");
  const std::vector<int> ds = parse_numbers<int>(d_list, "--d");
  const std::vector<std::int64_t> Ts = parse_numbers<std::int64_t>(T_list, "--T");

  std::vector<Cell> cells;
  for (const std::string& v : vs) {
    EpisodeSpec probe = base;
    probe.variant = v;
    validate_spec(probe, true);
    const std::vector<int> dims = is_context_free(v) ? std::vector<int>{1} : ds;
    for (int d : dims)
      for (std::int64_t T : Ts) cells.push_back({v, d, T});
  }
  for (const Cell& c : cells) {
    EpisodeSpec probe = base;
    probe.variant = c.variant;
    probe.d = c.d;
    probe.T = c.T;
    validate_spec(probe, true);
  }

  // One job per (cell, seed); results land in fixed slots.
  const std::size_t jobs = cells.size() * static_cast<std::size_t>(seeds);
  std::vector<Summary> results(jobs);
  std::vector<std::string> errors(jobs);
  std::vector<int> codes(jobs, kExitOk);
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs) return;
      const Cell& c = cells[job / static_cast<std::size_t>(seeds)];
      EpisodeSpec e = base;
      e.variant = c.variant;
      e.d = c.d;
      e.T = c.T;
      e.seed = base.seed + job % static_cast<std::size_t>(seeds);
      try {
        const Instance inst = build_instance(e);
        std::unique_ptr<Learner> learner = build_learner(e, inst);
        results[job] = run_episode_streaming(inst, *learner, e.mode.value_or(default_mode(e.variant)),
                                             e.seed, {});
      } catch (const ModeMismatch& ex) {
        codes[job] = kExitModeMismatch;
        errors[job] = ex.what();
      } catch (const GeometryError& ex) {
        codes[job] = kExitGeometry;
        errors[job] = ex.what();
      } catch (const std::exception& ex) {
        codes[job] = kExitFailure;
        errors[job] = ex.what();
      }
    }
  };
  const int n_workers = worker_count(jobs);
  std::vector<std::thread> pool;
  for (int w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  for (std::size_t job = 0; job < jobs; ++job)
    if (codes[job] != kExitOk) {
      if (codes[job] == kExitModeMismatch) throw ModeMismatch(errors[job]);
      if (codes[job] == kExitGeometry) throw GeometryError(errors[job]);
      throw Error(errors[job]);
    }

  struct Row {
    Cell cell;
    double gft, gft_se, profit, profit_se, violation, violation_se, trades, fallbacks;
    double objective;
  };
  std::vector<Row> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> g, p, v, tr, fb;
    for (int s = 0; s < seeds; ++s) {
      const Summary& sm = results[c * static_cast<std::size_t>(seeds) + static_cast<std::size_t>(s)];
      g.push_back(sm.gft_regret);
      p.push_back(sm.profit_regret);
      v.push_back(sm.budget_violation);
      tr.push_back(static_cast<double>(sm.trades));
      fb.push_back(static_cast<double>(sm.fallbacks));
    }
    const bool profit = cells[c].variant.find("profit") != std::string::npos;
    rows.push_back({cells[c], mean(g), stderr_of(g), mean(p), stderr_of(p), mean(v), stderr_of(v), mean(tr),
                    mean(fb), profit ? mean(p) : mean(g)});
  }
  // Regret ratio against the smallest horizon of the same (variant, d).
  std::vector<double> ratio(rows.size(), 1.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Row* ref = nullptr;
    for (const Row& o : rows)
      if (o.cell.variant == rows[r].cell.variant && o.cell.d == rows[r].cell.d && (!ref || o.cell.T < ref->cell.T))
        ref = &o;
    ratio[r] = ref->objective != 0.0 ? rows[r].objective / ref->objective
                                     : (rows[r].objective == 0.0 ? 1.0 : INFINITY);
  }

  std::ostringstream csv;
  csv << "variant,instance,d,T,seeds,mean_gft_regret,se_gft_regret,mean_profit_regret,se_profit_regret,"
         "mean_budget_violation,se_budget_violation,mean_trades,mean_fallbacks,regret_ratio\n";
  ordered_json arr = ordered_json::array();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Row& w = rows[r];
    csv << w.cell.variant << ',' << base.instance << ',' << w.cell.d << ',' << w.cell.T << ',' << seeds << ','
        << format_double(w.gft) << ',' << format_double(w.gft_se) << ',' << format_double(w.profit) << ','
        << format_double(w.profit_se) << ',' << format_double(w.violation) << ','
        << format_double(w.violation_se) << ',' << format_double(w.trades) << ','
        << format_double(w.fallbacks) << ',' << format_double(ratio[r]) << '\n';
    ordered_json j;
    j["variant"] = w.cell.variant;
    j["instance"] = base.instance;
    j["d"] = w.cell.d;
    j["T"] = w.cell.T;
    j["seeds"] = seeds;
    j["mean_gft_regret"] = w.gft;
    j["se_gft_regret"] = w.gft_se;
    j["mean_profit_regret"] = w.profit;
    j["se_profit_regret"] = w.profit_se;
    j["mean_budget_violation"] = w.violation;
    j["se_budget_violation"] = w.violation_se;
    j["mean_trades"] = w.trades;
    j["mean_fallbacks"] = w.fallbacks;
    j["regret_ratio"] = std::isfinite(ratio[r]) ? ordered_json(ratio[r]) : ordered_json(nullptr);
    arr.push_back(std::move(j));
  }
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw InvalidArgument("cannot write " + out_path);
    f << csv.str();
    out << arr.dump(2) << '\n';
  } else {
    out << csv.str();
  }
  return kExitOk;
}

int default_trials(const std::string& suite) {
  if (suite == "refuse-accept") return 300;
  if (suite == "mc-volume") return 100;
  return 500;
}

int cmd_verify(const std::string& suite, int trials, std::uint64_t seed, std::int64_t samples,
               std::ostream& out) {
  std::vector<std::string> names;
  if (suite == "all")
    names = suite_names();
  else
    names = {suite};
  for (const std::string& n : names) {
    const auto& known = suite_names();
    if (std::find(known.begin(), known.end(), n) == known.end())
      throw InvalidArgument("unknown suite: " + n);
  }
  bool all = true;
  char line[256];
  std::snprintf(line, sizeof line, "%-14s %8s %8s %10s  %s\n", "suite", "trials", "passes", "worst", "result");
  out << line;
  for (const std::string& n : names) {
    SuiteOptions opt;
    opt.trials = trials > 0 ? trials : default_trials(n);
    opt.seed = seed;
    opt.samples = samples;
    const SuiteResult r = run_suite(n, opt);
    all = all && r.pass;
    std::snprintf(line, sizeof line, "%-14s %8d %8d %10.4f  %s", r.name.c_str(), r.trials, r.passes, r.worst,
                  r.pass ? "PASS" : "FAIL");
    out << line << "  (" << r.detail << ")\n";
  }
  return all ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contextual bilateral-trade learning lab"};
  app.require_subcommand(1);

  EpisodeSpec spec;
  std::string out_path;
  std::string feedback;
  CLI::App* run = app.add_subcommand("run", "Run one (variant, instance, seed) episode");
  run->add_option("--variant", spec.variant, "Learner id")->required();
  run->add_option("--instance", spec.instance, "random | gft-lower-bound | chunked-basis | file:PATH");
  run->add_option("--d", spec.d, "Dimension");
  CLI::Option* run_T = run->add_option("--T", spec.T, "Horizon");
  run->add_option("--s", spec.s, "Seller valuation (context-free)");
  run->add_option("--b", spec.b, "Buyer valuation (context-free)");
  run->add_option("--seed", spec.seed, "Seed for the instance and the learner");
  run->add_option("--samples", spec.samples, "Monte-Carlo samples per price solve");
  run->add_option("--feedback", feedback, "two-bit | one-bit (default: the variant's own)");
  run->add_flag("--trace-potential", spec.trace_potential, "Append a potential column");
  run->add_option("--out", out_path, "Per-round CSV path");

  std::string variants, d_list = "2", T_list = "1000";
  int seeds = 1;
  EpisodeSpec sweep_spec;
  CLI::App* sweep = app.add_subcommand("sweep", "Run a grid of variants x d x T x seeds");
  sweep->add_option("--variants,--variant", variants, "Comma-separated learner ids")->required();
  sweep->add_option("--instance", sweep_spec.instance, "Instance generator");
  sweep->add_option("--d", d_list, "Comma-separated dimensions");
  sweep->add_option("--T", T_list, "Comma-separated horizons");
  sweep->add_option("--seeds", seeds, "Seeds per cell");
  sweep->add_option("--seed", sweep_spec.seed, "First seed");
  sweep->add_option("--s", sweep_spec.s, "Seller valuation (context-free)");
  sweep->add_option("--b", sweep_spec.b, "Buyer valuation (context-free)");
  sweep->add_option("--samples", sweep_spec.samples, "Monte-Carlo samples per price solve");
  sweep->add_option("--feedback", feedback, "two-bit | one-bit");
  sweep->add_option("--out", out_path, "Summary CSV path");

  std::string suite = "all";
  int trials = 0;
  std::uint64_t verify_seed = 1;
  std::int64_t verify_samples = 4096;
  CLI::App* verify = app.add_subcommand("verify", "Run the lemma suites");
  verify->add_option("--suite", suite, "balanced | partition | refuse-accept | mc-volume | all");
  verify->add_option("--trials", trials, "Trials per suite");
  verify->add_option("--seed", verify_seed, "Suite seed");
  verify->add_option("--samples", verify_samples, "Monte-Carlo samples");

  std::string gen_kind = "random";
  int gen_d = 2;
  std::int64_t gen_T = 1000;
  std::uint64_t gen_seed = 0;
  bool gen_compact = false;
  CLI::App* generate = app.add_subcommand("generate", "Write an instance as JSON");
  generate->add_option("--instance", gen_kind, "random | gft-lower-bound | chunked-basis");
  generate->add_option("--d", gen_d, "Dimension");
  generate->add_option("--T", gen_T, "Horizon");
  generate->add_option("--seed", gen_seed, "Seed");
  generate->add_flag("--compact", gen_compact, "Store the generator spec instead of the contexts");
  generate->add_option("--out", out_path, "Output path (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadFlags;
  }

  try {
    if (!feedback.empty()) {
      spec.mode = parse_mode(feedback);
      sweep_spec.mode = spec.mode;
    }
    if (*run) {
      if (!*run_T) spec.T = 1000;
      validate_spec(spec, static_cast<bool>(*run_T));
      return cmd_run(spec, out_path, out);
    }
    if (*sweep) return cmd_sweep(sweep_spec, variants, d_list, T_list, seeds, out_path, out);
    if (*verify) {
      if (verify_samples < 64) throw InvalidArgument("--samples must be >= 64");
      return cmd_verify(suite, trials, verify_seed, verify_samples, out);
    }
    if (*generate) {
      const Instance inst = generate_instance(gen_kind, gen_d, gen_T, gen_seed);
      if (out_path.empty())
        out << instance_to_json(inst, !gen_compact).dump() << '\n';
      else
        save_instance(inst, out_path, !gen_compact);
      return kExitOk;
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadFlags;
  } catch (const InvalidInstance& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadFlags;
  } catch (const ModeMismatch& e) {
    err << "error: " << e.what() << '\n';
    return kExitModeMismatch;
  } catch (const GeometryError& e) {
    err << "geometry failure: " << e.what() << '\n';
    return kExitGeometry;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitBadFlags;
}

}  // namespace bitrade
