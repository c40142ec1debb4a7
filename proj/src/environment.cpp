#include "bitrade/environment.hpp"

namespace bitrade {

std::string to_string(FeedbackMode m) { return m == FeedbackMode::TwoBit ? "two-bit" : "one-bit"; }

TwoBitFeedback respond(const MarketParams& params, const Context& x, const PricePair& prices) {
  const auto [st, bt] = valuations(params, x);
  return {st <= prices.p, prices.q <= bt};
}

bool one_bit(const TwoBitFeedback& fb) { return fb.seller_accepts && fb.buyer_accepts; }

Summary run_episode_streaming(const Instance& instance, Learner& learner, FeedbackMode mode,
                              std::uint64_t seed, const RecordSink& sink,
                              const RoundObserver& observer) {
  if (!learner.supports(mode))
    throw ModeMismatch("learner " + learner.variant() + " cannot run with " + to_string(mode) +
                       " feedback");
  instance.validate();
  learner.seed(seed);
  Accumulator acc;
  for (std::int64_t t = 0; t < instance.T; ++t) {
    const Context x = instance.context(t);
    const PricePair prices = learner.observe_context(x);
    const TwoBitFeedback bits = respond(instance.params, x, prices);
    Feedback fb;
    fb.traded = one_bit(bits);
    if (mode == FeedbackMode::TwoBit) fb.bits = bits;
    const CaseLabel label = learner.last_case();
    const bool fallback = learner.last_fallback();
    learner.receive(fb);

    const RoundOutcome out = round_outcome(instance.params, x, prices);
    RoundRecord rec;
    rec.t = t + 1;
    rec.case_label = label;
    rec.p = prices.p;
    rec.q = prices.q;
    rec.traded = out.traded;
    rec.gft = out.gft;
    rec.profit = out.profit;
    rec.benchmark = out.benchmark;
    rec.fallback = fallback;
    rec.potential_trace = learner.last_potential();
    acc.add(rec);
    if (observer) observer(t + 1, learner);
    if (sink) sink(rec);
  }
  return acc.summary();
}

std::vector<RoundRecord> run_episode(const Instance& instance, Learner& learner, FeedbackMode mode,
                                     std::uint64_t seed, const RoundObserver& observer) {
  std::vector<RoundRecord> records;
  records.reserve(static_cast<std::size_t>(std::max<std::int64_t>(instance.T, 0)));
  run_episode_streaming(
      instance, learner, mode, seed, [&](const RoundRecord& r) { records.push_back(r); }, observer);
  return records;
}

}  // namespace bitrade
