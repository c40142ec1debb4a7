#include "bitrade/context_free.hpp"

#include <cmath>

namespace bitrade {

int dyadic_level(std::int64_t k) {
  if (k < 1) throw InvalidArgument("dyadic probes are 1-based");
  int i = 0;
  while ((std::int64_t{1} << (i + 1)) <= k) ++i;
  return i;
}

double dyadic_price(std::int64_t k) {
  const int i = dyadic_level(k);
  const double offset = static_cast<double>(k - (std::int64_t{1} << i));
  return (1.0 + 2.0 * offset) / std::ldexp(1.0, i + 1);
}

double dyadic_next(const DyadicState& state) {
  if (state.locked_price) throw InvalidArgument("dyadic search is already locked");
  return dyadic_price(state.t_internal + 1);
}

PricePair DyadicGftLearner::observe_context(const Context&) {
  if (state_.locked_price) {
    label_ = CaseLabel::Locked;
    posted_ = *state_.locked_price;
  } else {
    label_ = CaseLabel::Probe;
    posted_ = dyadic_next(state_);
  }
  return {posted_, posted_};
}

void DyadicGftLearner::receive(const Feedback& fb) {
  if (state_.locked_price) return;
  if (fb.traded)
    state_.locked_price = posted_;
  else
    ++state_.t_internal;
}

void RandomGftLearner::seed(std::uint64_t seed) {
  rng_.seed(seed);
  locked_.reset();
}

PricePair RandomGftLearner::observe_context(const Context&) {
  if (locked_) {
    label_ = CaseLabel::Locked;
    posted_ = *locked_;
  } else {
    label_ = CaseLabel::Probe;
    posted_ = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  }
  return {posted_, posted_};
}

void RandomGftLearner::receive(const Feedback& fb) {
  if (!locked_ && fb.traded) locked_ = posted_;
}

QuadProfitLearner::QuadProfitLearner(std::int64_t horizon) : horizon_(horizon) {
  if (horizon < 1) throw InvalidArgument("cf-quad-profit needs a positive horizon");
}

void QuadProfitLearner::seed(std::uint64_t) {
  stage_ = Stage::Dyadic;
  dyadic_ = {};
  square_.reset();
  phase_probes_.clear();
}

void QuadProfitLearner::start_phase() {
  QuadSquare& sq = *square_;
  if (sq.side < 1.0 / static_cast<double>(horizon_)) {
    stage_ = Stage::Done;
    return;
  }
  step_ = sq.side * sq.side;
  cells_ = std::max<std::int64_t>(1, std::llround(sq.side / step_));
  j_ = 0;
  stage_ = Stage::SellerSweep;
  phase_probes_.push_back(0);
}

PricePair QuadProfitLearner::observe_context(const Context&) {
  switch (stage_) {
    case Stage::Dyadic: {
      label_ = CaseLabel::Probe;
      const double p = dyadic_next(dyadic_);
      posted_ = {p, p};
      break;
    }
    case Stage::SellerSweep:
      label_ = CaseLabel::SellerSweep;
      posted_ = {square_->s - static_cast<double>(j_) * step_, square_->b};
      break;
    case Stage::BuyerSweep:
      label_ = CaseLabel::BuyerSweep;
      posted_ = {square_->s, square_->b + static_cast<double>(j_) * step_};
      break;
    case Stage::Done:
      label_ = CaseLabel::Locked;
      posted_ = {square_->s, square_->b};
      break;
  }
  return posted_;
}

void QuadProfitLearner::receive(const Feedback& fb) {
  switch (stage_) {
    case Stage::Dyadic: {
      if (!fb.traded) {
        ++dyadic_.t_internal;
        return;
      }
      const double p = posted_.p;
      const int level = dyadic_level(dyadic_.t_internal + 1);
      dyadic_.locked_price = p;
      square_ = QuadSquare{p, p, std::ldexp(1.0, -level - 1), 0};
      start_phase();
      return;
    }
    case Stage::SellerSweep: {
      // The buyer price is the square's lower edge, so the trade bit is the
      // seller's bit.
      ++phase_probes_.back();
      if (!fb.traded) {
        if (j_ == 0) throw InconsistentFeedback("seller refused the square's corner price");
        square_->s -= static_cast<double>(j_ - 1) * step_;
      } else if (j_ + 1 < cells_) {
        ++j_;
        return;
      } else {
        square_->s -= static_cast<double>(cells_ - 1) * step_;
      }
      j_ = 0;
      stage_ = Stage::BuyerSweep;
      return;
    }
    case Stage::BuyerSweep: {
      ++phase_probes_.back();
      if (!fb.traded) {
        if (j_ == 0) throw InconsistentFeedback("buyer refused the square's corner price");
        square_->b += static_cast<double>(j_ - 1) * step_;
      } else if (j_ + 1 < cells_) {
        ++j_;
        return;
      } else {
        square_->b += static_cast<double>(cells_ - 1) * step_;
      }
      square_->side = step_;
      square_->phase += 1;
      start_phase();
      return;
    }
    case Stage::Done:
      return;
  }
}

}  // namespace bitrade
