#pragma once

// The seller/buyer simulator and the protocol loop. Only this module reads
// MarketParams during a run; learners see contexts and feedback.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bitrade/market.hpp"
#include "bitrade/metrics.hpp"

namespace bitrade {

enum class FeedbackMode { TwoBit, OneBit };

std::string to_string(FeedbackMode m);

/// What the learner gets back after posting prices. `bits` is present only
/// in two-bit mode.
struct Feedback {
  bool traded = false;
  std::optional<TwoBitFeedback> bits;
};

class Learner {
 public:
  virtual ~Learner() = default;

  virtual std::string variant() const = 0;
  virtual bool supports(FeedbackMode mode) const = 0;

  /// Called once before round 1; learners derive their PRNG from it.
  virtual void seed(std::uint64_t seed) = 0;

  virtual PricePair observe_context(const Context& x) = 0;
  virtual void receive(const Feedback& fb) = 0;

  /// Case label and fallback flag of the last posted round.
  virtual CaseLabel last_case() const = 0;
  virtual bool last_fallback() const { return false; }
  /// Diagnostic potential after the last update, when traced.
  virtual std::optional<double> last_potential() const { return std::nullopt; }
};

TwoBitFeedback respond(const MarketParams& params, const Context& x, const PricePair& prices);

bool one_bit(const TwoBitFeedback& fb);

using RecordSink = std::function<void(const RoundRecord&)>;

/// Optional per-round hook, called after the learner received feedback.
/// Tests use it to inspect learner state against the ground truth.
using RoundObserver = std::function<void(std::int64_t t, const Learner&)>;

/// Runs the T-round protocol, handing each finished record to `sink`.
/// Returns the summary. Throws ModeMismatch if the learner cannot run in
/// `mode`.
Summary run_episode_streaming(const Instance& instance, Learner& learner, FeedbackMode mode,
                              std::uint64_t seed, const RecordSink& sink,
                              const RoundObserver& observer = {});

std::vector<RoundRecord> run_episode(const Instance& instance, Learner& learner, FeedbackMode mode,
                                     std::uint64_t seed, const RoundObserver& observer = {});

}  // namespace bitrade
