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
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "qcons/codec.hpp"
#include "qcons/quantizer.hpp"

namespace {

using qcons::kPi;
using qcons::quantize;

TEST(Quantizer, SpecifiedPoints) {
  EXPECT_EQ(quantize(0.3, 1), 0);
  EXPECT_EQ(quantize(0.5, 2), 1);
  EXPECT_EQ(quantize(100.0, 3), 3);
  EXPECT_EQ(quantize(-0.5, 2), -1);
  EXPECT_EQ(quantize(1.49, 3), 1);
  EXPECT_EQ(quantize(1.5, 3), 2);
  EXPECT_EQ(quantize(2.5, 3), 3);
  EXPECT_EQ(quantize(-2.4, 3), -2);
  EXPECT_EQ(quantize(std::numeric_limits<double>::quiet_NaN(), 3), 0);
  EXPECT_EQ(quantize(-std::numeric_limits<double>::infinity(), 3), -3);
  EXPECT_THROW(quantize(1.0, 0), std::invalid_argument);
}

TEST(Quantizer, OddSymmetryAndAccuracy) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  std::uniform_int_distribution<int> levels(1, 8);
  for (int trial = 0; trial < 100000; ++trial) {
    const double y = unif(rng);
    const int M = levels(rng);
    const int q = quantize(y, M);
    ASSERT_EQ(quantize(-y, M), -q);
    ASSERT_LE(std::abs(q), M);
    if (std::abs(y) <= M + 0.5) {
      ASSERT_LE(std::abs(q - y), 0.5) << y << " " << M;
      ASSERT_FALSE(qcons::saturates(y, M));
    } else {
      ASSERT_TRUE(qcons::saturates(y, M));
      ASSERT_GT(std::abs(q - y), 0.5);
    }
  }
}

TEST(Quantizer, Monotone) {
  for (int M = 1; M <= 5; ++M) {
    int prev = quantize(-10.0, M);
    for (double y = -10.0; y <= 10.0; y += 0.001) {
      const int q = quantize(y, M);
      ASSERT_GE(q, prev);
      prev = q;
    }
  }
}

TEST(Bits, LevelCounts) {
  EXPECT_EQ(qcons::bits_for_levels(1), 1);
  EXPECT_EQ(qcons::bits_for_levels(2), 2);
  EXPECT_EQ(qcons::bits_for_levels(4), 3);
  EXPECT_EQ(qcons::bits_for_levels(5), 4);
  EXPECT_EQ(qcons::bits_for_levels(8), 4);
}

TEST(Schedule, MinimalSchedules) {
  const auto s1 = qcons::minimal_schedule(2, kPi / 3.0);
  EXPECT_EQ(s1.M_steady, 4);
  EXPECT_EQ(s1.bits, 3);
  const auto s2 = qcons::minimal_schedule(1, kPi / 2.0);
  EXPECT_EQ(s2.M_steady, 1);
  EXPECT_EQ(s2.bits, 1);
  const auto s3 = qcons::minimal_schedule(2, 0.01);
  EXPECT_EQ(s3.M_steady, 8);
  EXPECT_EQ(s3.bits, 4);
  const auto s4 = qcons::minimal_schedule(1, kPi / 4.0);
  EXPECT_EQ(s4.M_steady, 2);
  EXPECT_EQ(s4.bits, 2);
  EXPECT_EQ(s1.levels_at(4), 1);
  EXPECT_EQ(s1.levels_at(5), 4);
}

TEST(Schedule, BitsBracket) {
  for (int m = 1; m <= 6; ++m) {
    for (int k = 1; k < 200; ++k) {
      const double theta = kPi * k / 200.0;
      const auto s = qcons::minimal_schedule(m, theta);
      EXPECT_GE(s.bits, m);
      EXPECT_LE(s.bits, 2 * m);
      EXPECT_TRUE(s.meets_bounds());
      if (s.M_steady > 1) {
        EXPECT_FALSE(qcons::fixed_schedule(m, theta, 1, s.M_steady - 1).meets_bounds());
      }
    }
  }
}

std::shared_ptr<const qcons::SystemModel<double>> model_ptr(int m, double theta) {
  return std::make_shared<const qcons::SystemModel<double>>(qcons::build_system(m, theta));
}

TEST(Codec, FirstStepExamples) {
  auto model = model_ptr(1, 1.0);
  qcons::CodecState enc(model, 2.0, 0.9);
  EXPECT_DOUBLE_EQ(enc.prediction_input(3.0), 1.5);  // y / p(0)
  const auto r = qcons::encoder_step(enc, 1, 0.4 * 2.0, 3);
  EXPECT_EQ(r.symbol, 0);
  EXPECT_EQ(enc.estimate()(0), 0.0);

  qcons::CodecState zero(model_ptr(2, 1.0), 5.0, 0.9);
  EXPECT_EQ(qcons::encoder_step(zero, 1, 0.0, 2).symbol, 0);
  EXPECT_EQ(zero.estimate()(0), 0.0);
}

TEST(Codec, PredictionInputVanishesOnPrediction) {
  auto model = model_ptr(2, 0.7);
  qcons::CodecState enc(model, 1.0, 0.95);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> sym(-2, 2);
  for (long t = 1; t <= 10; ++t) qcons::decoder_step(enc, t, sym(rng));
  EXPECT_NEAR(enc.prediction_input(enc.prediction()), 0.0, 1e-15);
}

TEST(Codec, OutOfOrderRejected) {
  qcons::CodecState st(model_ptr(1, 1.0), 1.0, 0.9);
  EXPECT_THROW(qcons::decoder_step(st, 2, 0), qcons::OutOfOrderError);
  qcons::decoder_step(st, 1, 1);
  EXPECT_THROW(qcons::encoder_step(st, 1, 0.0, 1), qcons::OutOfOrderError);
}

TEST(Codec, InvalidScaling) {
  auto model = model_ptr(1, 1.0);
  EXPECT_THROW(qcons::CodecState(model, 0.0, 0.9), std::invalid_argument);
  EXPECT_THROW(qcons::CodecState(model, 1.0, 1.0), std::invalid_argument);
}

TEST(Codec, ScaleDecaysGeometrically) {
  qcons::CodecState st(model_ptr(1, 1.0), 3.0, 0.5);
  EXPECT_DOUBLE_EQ(st.scale(0), 3.0);
  EXPECT_DOUBLE_EQ(st.scale(3), 0.375);
}

TEST(Codec, HighOrderComponentsHeldUntilWindowFull) {
  auto model = model_ptr(2, 1.2);
  qcons::CodecState st(model, 1.0, 0.9);
  for (long t = 1; t <= 3; ++t) {
    qcons::decoder_step(st, t, 1);
    EXPECT_EQ(st.estimate().tail(3).cwiseAbs().sum(), 0.0) << t;
  }
  qcons::decoder_step(st, 4, 1);
  Eigen::VectorXd window(4);
  for (int k = 0; k < 4; ++k) window(k) = st.window()[k];
  EXPECT_LT((st.estimate().tail(3) - model->S_m * window).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Codec, HarmonicSecondComponentFromTwoEstimates) {
  const double theta = 0.9;
  auto model = model_ptr(1, theta);
  qcons::CodecState st(model, 1.0, 0.8);
  qcons::decoder_step(st, 1, 1);
  const double x1_prev = st.estimate()(0);
  qcons::decoder_step(st, 2, -1);
  const double expected = std::cos(theta) / std::sin(theta) * st.estimate()(0) - x1_prev / std::sin(theta);
  EXPECT_NEAR(st.estimate()(1), expected, 1e-14);
}

TEST(Codec, AllZeroSymbolsFollowHomogeneousRecursion) {
  auto model = model_ptr(2, 0.5);
  qcons::CodecState st(model, 1.0, 0.9);
  for (long t = 1; t <= 4; ++t) qcons::decoder_step(st, t, 1);
  for (long t = 5; t <= 20; ++t) {
    const double pred = st.prediction();
    qcons::decoder_step(st, t, 0);
    EXPECT_EQ(st.estimate()(0), pred);
  }
}

// Encoder and decoder fed the same symbols stay bit-identical.
TEST(Codec, EncoderDecoderSynchronyOnRandomStreams) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> order(1, 3);
  std::uniform_int_distribution<long> length(1, 1000);
  std::normal_distribution<double> gauss(0.0, 3.0);
  for (int stream = 0; stream < 1000; ++stream) {
    const int m = order(rng);
    auto model = model_ptr(m, 0.3 + 0.25 * (stream % 11));
    qcons::CodecState enc(model, 2.0, 0.99);
    qcons::CodecState dec(model, 2.0, 0.99);
    const long T = length(rng);
    for (long t = 1; t <= T; ++t) {
      const auto r = qcons::encoder_step(enc, t, gauss(rng), 4);
      qcons::decoder_step(dec, t, r.symbol);
      ASSERT_TRUE(enc.estimate() == dec.estimate()) << "stream " << stream << " t " << t;
    }
  }
}

TEST(Codec, SymbolCost) {
  EXPECT_EQ(qcons::symbol_cost_bits(0, 4), 0);
  EXPECT_EQ(qcons::symbol_cost_bits(-3, 4), 3);
}

}  // namespace
