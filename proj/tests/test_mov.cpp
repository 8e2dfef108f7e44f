// Copyright 2026 The Peaqlab Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "peaqlab/error.hpp"
#include "peaqlab/fft.hpp"
#include "peaqlab/mov.hpp"

using namespace peaqlab;

namespace {

Signal make_noise(double amplitude, double seconds, std::uint64_t seed, int rate = 48000) {
  Signal s;
  s.sample_rate = rate;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  s.samples.resize(static_cast<std::size_t>(seconds * rate));
  for (double& v : s.samples) v = dist(rng);
  return s;
}

Signal add_noise(const Signal& base, double dbfs, std::uint64_t seed) {
  Signal out = base;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const double gain = std::pow(10.0, dbfs / 20.0);
  for (double& v : out.samples) v += gain * dist(rng);
  return out;
}

Signal brickwall_lowpass(const Signal& in, double cutoff_hz) {
  const std::size_t n = next_pow2(in.samples.size());
  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < in.samples.size(); ++i) buf[i] = in.samples[i];
  fft(buf);
  const std::size_t cut = static_cast<std::size_t>(cutoff_hz * n / in.sample_rate);
  for (std::size_t i = cut; i <= n - cut; ++i) buf[i] = 0.0;
  fft(buf, true);
  Signal out;
  out.sample_rate = in.sample_rate;
  out.samples.resize(in.samples.size());
  for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] = buf[i].real();
  return out;
}

// Direct, loop-free-of-library-code evaluation of the configured
// disturbance-loudness term for one band.
double band_loudness_oracle(double ea, double eb, double mod_a, double mod_b, double thres,
                            const NoiseLoudnessParams& p, double exponent) {
  const double s_a = p.mod_weight * mod_a + p.offset;
  const double s_b = p.mod_weight * mod_b + p.offset;
  const double beta = std::exp(-p.alpha * (eb - ea) / ea);
  const double num = std::max(s_b * eb - s_a * ea, 0.0);
  return std::pow(thres / s_b, exponent) *
         (std::pow(1.0 + num / (thres + s_a * ea * beta), exponent) - 1.0);
}

EarModelConfig one_band_config() {
  EarModelConfig cfg = EarModelConfig::advanced_default();
  cfg.band_count = 1;
  cfg.internal_noise.assign(1, 0.05);
  return cfg;
}

}  // namespace

TEST_CASE("no disturbance when patterns and modulations agree") {
  const EarModelConfig cfg = EarModelConfig::advanced_default();
  const int frames = 10, bands = 40;
  std::vector<double> e(static_cast<std::size_t>(frames * bands), 0.7);
  std::vector<double> mod(e.size(), 0.2);
  const auto out = partial_noise_loudness(e, e, mod, mod, bands, cfg.nl_noise, cfg);
  for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("positive-part clamp: pattern b below pattern a yields zero") {
  const EarModelConfig cfg = EarModelConfig::advanced_default();
  const int frames = 5, bands = 40;
  std::vector<double> e_a(static_cast<std::size_t>(frames * bands), 1.0);
  std::vector<double> e_b(e_a.size(), 0.4);
  std::vector<double> mod(e_a.size(), 0.0);
  const auto out = partial_noise_loudness(e_a, e_b, mod, mod, bands, cfg.nl_missing, cfg);
  for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("single-band doubled excitation matches the closed-form term") {
  const EarModelConfig cfg = one_band_config();
  const std::vector<double> e_a{0.8}, e_b{1.6}, mod_a{0.3}, mod_b{0.5};
  for (const NoiseLoudnessParams& p : {cfg.nl_noise, cfg.nl_missing}) {
    const auto out = partial_noise_loudness(e_a, e_b, mod_a, mod_b, 1, p, cfg);
    REQUIRE(out.size() == 1);
    double expected = cfg.loudness_scale / cfg.band_count *
                      band_loudness_oracle(0.8, 1.6, 0.3, 0.5, 0.05, p, cfg.loudness_exponent);
    if (expected < p.clamp_min) expected = 0.0;
    CHECK(out[0] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("shape mismatch is rejected") {
  const EarModelConfig cfg = EarModelConfig::advanced_default();
  std::vector<double> a(80, 1.0), b(40, 1.0);
  try {
    partial_noise_loudness(a, b, a, a, 40, cfg.nl_noise, cfg);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kShapeMismatch);
  }
}

TEST_CASE("pooling arithmetic") {
  SUBCASE("RMS of [3, 4]") {
    std::vector<FrameLoudness> frames{{3, 0, 0}, {4, 0, 0}};
    CHECK(pool(frames, 0).rms_noise_loudness == doctest::Approx(3.5355339).epsilon(1e-7));
  }
  SUBCASE("all-zero frames give an all-zero vector") {
    std::vector<FrameLoudness> frames(20);
    const MovVector mov = pool(frames, 0);
    CHECK(mov.rms_noise_loudness == 0.0);
    CHECK(mov.rms_missing_components == 0.0);
    CHECK(mov.avg_lin_dist == 0.0);
    CHECK(mov.rms_noise_loud_asym == 0.0);
  }
  SUBCASE("asymmetric combination") {
    std::vector<FrameLoudness> frames(8, FrameLoudness{2.0, 1.0, 0.5});
    const MovVector mov = pool(frames, 0);
    CHECK(mov.rms_noise_loudness == doctest::Approx(2.0));
    CHECK(mov.rms_missing_components == doctest::Approx(1.0));
    CHECK(mov.rms_noise_loud_asym == doctest::Approx(2.5));
  }
  SUBCASE("warmup frames are excluded") {
    std::vector<FrameLoudness> frames{{100, 0, 0}, {3, 0, 0}, {3, 0, 0}};
    CHECK(pool(frames, 1).rms_noise_loudness == doctest::Approx(3.0));
  }
  SUBCASE("empty after warmup") {
    std::vector<FrameLoudness> frames(5);
    try {
      pool(frames, 5);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kEmptyAfterWarmup);
    }
  }
  SUBCASE("RMS >= mean for nonnegative frames") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> dist(0.0, 5.0);
    std::vector<FrameLoudness> frames(50);
    double sum = 0.0;
    for (FrameLoudness& f : frames) {
      f.noise_loudness = dist(rng);
      sum += f.noise_loudness;
    }
    CHECK(pool(frames, 0).rms_noise_loudness >= sum / 50.0);
  }
}

TEST_CASE("combined MOV identity holds bit-exactly for random frames") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(0.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<FrameLoudness> frames(30);
    for (FrameLoudness& f : frames) {
      f.noise_loudness = dist(rng);
      f.missing_loudness = dist(rng);
      f.lin_dist_loudness = dist(rng);
    }
    const MovVector mov = pool(frames, 0);
    CHECK(mov.rms_noise_loud_asym ==
          mov.rms_noise_loudness + 0.5 * mov.rms_missing_components);
  }
}

TEST_CASE("identical signals produce near-zero MOVs") {
  const EarModelConfig cfg = EarModelConfig::advanced_default();
  const Signal ref = make_noise(0.3, 2.0, 55);
  const MovVector mov = extract_movs(ref, ref, cfg);
  CHECK(mov.rms_noise_loudness <= 1e-6);
  CHECK(mov.rms_missing_components <= 1e-6);
  CHECK(mov.avg_lin_dist <= 1e-6);
  CHECK(mov.rms_noise_loud_asym <= 1e-6);
}

TEST_CASE("additive noise drives the noise channel, not the missing channel") {
  const EarModelConfig cfg = EarModelConfig::advanced_default();
  const Signal ref = make_noise(0.25, 2.0, 56);
  const Signal noisy = add_noise(ref, -35.0, 57);
  const MovVector mov = extract_movs(ref, noisy, cfg);
  CHECK(mov.rms_noise_loudness > 0.0);
  CHECK(mov.rms_noise_loudness > 10.0 * mov.rms_missing_components);
}

TEST_CASE("spectral removal drives the missing channel, not the noise channel") {
  const EarModelConfig cfg = EarModelConfig::advanced_default();
  const Signal ref = make_noise(0.25, 2.0, 58);
  const Signal dull = brickwall_lowpass(ref, 3500.0);
  const MovVector mov = extract_movs(ref, dull, cfg);
  CHECK(mov.rms_missing_components > 0.0);
  CHECK(mov.rms_missing_components > 10.0 * mov.rms_noise_loudness);
  CHECK(mov.avg_lin_dist > 0.0);
}
