/*
 Copyright 2026 The qcons Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef QCONS_CODEC_HPP
#define QCONS_CODEC_HPP

#include <cmath>
#include <deque>
#include <memory>
#include <string>

#include "qcons/error.hpp"
#include "qcons/model.hpp"
#include "qcons/quantizer.hpp"

namespace qcons {

/**
 * State shared by an agent's encoder and by every decoder of its symbol
 * stream. Both sides run the same recursion on the same symbols, so their
 * estimates agree bit for bit.
 *
 * Time starts at t = 0 (nothing received). Step t consumes the symbol s(t):
 *
 *   t <= 2m:  xhat_1(t) = p(t-1) s(t)
 *   t >  2m:  xhat_1(t) = cos xhat_1(t-1) + sin xhat_2(t-1) + xhat_3(t-1) + p(t-1) s(t)
 *   t >= 2m:  xhat_{2..2m}(t) = S_m [xhat_1(t-2m+1), ..., xhat_1(t)]
 *
 * with p(t) = p0 gamma^t; xhat_3 is absent for m = 1. Components 2..2m stay
 * zero before t = 2m.
 */
class CodecState {
 public:
  CodecState(std::shared_ptr<const SystemModel<double>> model, double p0, double gamma)
      : model_(std::move(model)), p0_(p0), gamma_(gamma) {
    if (!model_) throw std::invalid_argument("CodecState: null model");
    if (!(p0 > 0.0)) throw std::invalid_argument("CodecState: p0 must be positive");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("CodecState: gamma must lie in (0, 1)");
    cos_ = std::cos(model_->theta);
    sin_ = std::sin(model_->theta);
    xhat_ = Eigen::VectorXd::Zero(model_->order());
  }

  const SystemModel<double>& model() const { return *model_; }
  double p0() const { return p0_; }
  double gamma() const { return gamma_; }
  /// Last completed step (0 before the first symbol).
  long time() const { return t_; }
  double scale(long t) const { return p0_ * std::pow(gamma_, static_cast<double>(t)); }
  const Eigen::VectorXd& estimate() const { return xhat_; }
  /// xhat_1 over the last min(t, 2m) steps, oldest first.
  const std::deque<double>& window() const { return window_; }
  int last_symbol() const { return last_symbol_; }

  /// Prediction of y(t+1) subtracted before quantizing at the next step.
  double prediction() const {
    const long next = t_ + 1;
    if (next <= 2L * model_->m) return 0.0;
    double pred = cos_ * xhat_(0) + sin_ * xhat_(1);
    if (model_->m >= 2) pred += xhat_(2);
    return pred;
  }

  /// d(t+1) = (y - prediction) / p(t): the value the next encoder step quantizes.
  double prediction_input(double y) const { return (y - prediction()) / scale(t_); }

  /// Advances from t-1 to t with symbol s(t).
  void apply(long t, int symbol) {
    if (t != t_ + 1) {
      throw OutOfOrderError("codec expected step " + std::to_string(t_ + 1) + ", got " + std::to_string(t));
    }
    const int n = model_->order();
    const double x1 = prediction() + scale(t_) * static_cast<double>(symbol);
    t_ = t;
    last_symbol_ = symbol;
    window_.push_back(x1);
    if (static_cast<int>(window_.size()) > n) window_.pop_front();
    xhat_(0) = x1;
    if (t_ >= n) {
      for (int r = 0; r < n - 1; ++r) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += model_->S_m(r, k) * window_[k];
        xhat_(r + 1) = acc;
      }
    }
  }

 private:
  std::shared_ptr<const SystemModel<double>> model_;
  double p0_;
  double gamma_;
  double cos_ = 0.0;
  double sin_ = 0.0;
  long t_ = 0;
  int last_symbol_ = 0;
  std::deque<double> window_;
  Eigen::VectorXd xhat_;
};

struct EncodeResult {
  int symbol = 0;
  double d = 0.0;          ///< quantizer input d(t)
  bool saturated = false;  ///< |d| > M + 1/2, so |s - d| > 1/2
};

/// One encoder step at time t: quantizes d(t) with M levels and advances the state.
inline EncodeResult encoder_step(CodecState& state, long t, double y, int M) {
  if (t != state.time() + 1) {
    throw OutOfOrderError("encoder expected step " + std::to_string(state.time() + 1) + ", got " +
                          std::to_string(t));
  }
  EncodeResult r;
  r.d = state.prediction_input(y);
  r.symbol = quantize(r.d, M);
  r.saturated = saturates(r.d, M);
  state.apply(t, r.symbol);
  return r;
}

/// One decoder step at time t. Never sees y.
inline void decoder_step(CodecState& state, long t, int symbol) { state.apply(t, symbol); }

/// d(t) for the step after `state` without advancing it.
inline double prediction_input(const CodecState& state, double y) { return state.prediction_input(y); }

/// Bits on the wire for one symbol: nonzero symbols cost ceil(log2(2M)), zero is not sent.
inline int symbol_cost_bits(int symbol, int M) { return symbol == 0 ? 0 : bits_for_levels(M); }

}  // namespace qcons

#endif  // QCONS_CODEC_HPP
