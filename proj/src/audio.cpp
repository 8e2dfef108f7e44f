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

#include "peaqlab/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>

#include "peaqlab/error.hpp"
#include "peaqlab/fft.hpp"

namespace peaqlab {

namespace {

uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(M_PI * x) / (M_PI * x);
}

}  // namespace

Signal load_wav(const std::string& path, bool* downmix_warning) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kFileNotFound, path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorKind::kCorruptHeader, path + ": not a RIFF/WAVE file");
  }

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  bool have_fmt = false;
  std::size_t data_offset = 0, data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    uint32_t chunk_size = read_u32(chunk + 4);
    std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (body + 16 > bytes.size()) throw Error(ErrorKind::kCorruptHeader, path + ": truncated fmt chunk");
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      sample_rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      if (format == 0xFFFE) {
        // WAVE_FORMAT_EXTENSIBLE: the first two bytes of the SubFormat GUID
        // carry the actual format tag.
        if (body + 26 > bytes.size()) throw Error(ErrorKind::kCorruptHeader, path + ": truncated extensible fmt");
        format = read_u16(bytes.data() + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data_offset = body;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);
  }
  if (!have_fmt || data_offset == 0) {
    throw Error(ErrorKind::kCorruptHeader, path + ": missing fmt/data chunk");
  }
  if (data_offset + data_size > bytes.size()) {
    throw Error(ErrorKind::kCorruptHeader, path + ": data chunk exceeds file size");
  }
  if (channels == 0 || sample_rate == 0) {
    throw Error(ErrorKind::kCorruptHeader, path + ": zero channels or sample rate");
  }

  const bool is_pcm16 = format == 1 && bits == 16;
  const bool is_pcm24 = format == 1 && bits == 24;
  const bool is_float32 = format == 3 && bits == 32;
  if (!is_pcm16 && !is_pcm24 && !is_float32) {
    throw Error(ErrorKind::kUnsupportedFormat,
                path + ": format tag " + std::to_string(format) + " with " +
                    std::to_string(bits) + " bits (need 16/24-bit PCM or float32)");
  }

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * channels;
  const std::size_t frames = data_size / frame_bytes;

  Signal sig;
  sig.sample_rate = static_cast<int>(sample_rate);
  sig.channel_count = 1;
  sig.samples.resize(frames);
  const unsigned char* d = bytes.data() + data_offset;
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      const unsigned char* s = d + f * frame_bytes + c * bytes_per_sample;
      double v = 0.0;
      if (is_pcm16) {
        int16_t raw = static_cast<int16_t>(s[0] | (s[1] << 8));
        v = raw / 32768.0;
      } else if (is_pcm24) {
        int32_t raw = s[0] | (s[1] << 8) | (s[2] << 16);
        if (raw & 0x800000) raw |= ~0xFFFFFF;
        v = raw / 8388608.0;
      } else {
        float raw;
        std::memcpy(&raw, s, 4);
        v = raw;
      }
      acc += v;
    }
    sig.samples[f] = acc / channels;
  }
  if (downmix_warning) *downmix_warning = channels > 1;
  return sig;
}

void write_wav(const std::string& path, const Signal& signal) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kInternal, "cannot open " + path + " for writing");
  auto put_u32 = [&](uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                 static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
    out.write(b, 4);
  };
  auto put_u16 = [&](uint16_t v) {
    char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
    out.write(b, 2);
  };
  const uint32_t data_bytes = static_cast<uint32_t>(signal.samples.size() * 2);
  out.write("RIFF", 4);
  put_u32(36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(static_cast<uint32_t>(signal.sample_rate));
  put_u32(static_cast<uint32_t>(signal.sample_rate) * 2);
  put_u16(2);
  put_u16(16);
  out.write("data", 4);
  put_u32(data_bytes);
  for (double x : signal.samples) {
    double clipped = std::clamp(x, -1.0, 1.0);
    auto raw = static_cast<int16_t>(std::lrint(clipped * 32767.0));
    put_u16(static_cast<uint16_t>(raw));
  }
}

Signal resample(const Signal& signal, int target_rate) {
  if (signal.sample_rate == target_rate) return signal;
  const double ratio = static_cast<double>(target_rate) / signal.sample_rate;
  // Cutoff in cycles per input sample; shrink slightly below the Nyquist of
  // the narrower side to keep the transition band inside it.
  const double cutoff = 0.5 * std::min(1.0, ratio) * 0.95;
  const double half_width = 32.0 / std::min(1.0, ratio);
  const int K = static_cast<int>(std::ceil(half_width));

  Signal out;
  out.sample_rate = target_rate;
  out.channel_count = 1;
  const std::size_t out_len =
      static_cast<std::size_t>(std::ceil(signal.samples.size() * ratio));
  out.samples.resize(out_len);
  const auto& x = signal.samples;
  const auto n_in = static_cast<long>(x.size());
  for (std::size_t n = 0; n < out_len; ++n) {
    const double t = static_cast<double>(n) / ratio;
    const long m0 = static_cast<long>(std::ceil(t)) - K;
    const long m1 = static_cast<long>(std::floor(t)) + K;
    double acc = 0.0;
    for (long m = std::max<long>(0, m0); m <= std::min(n_in - 1, m1); ++m) {
      const double u = static_cast<double>(m) - t;
      const double w = 0.5 + 0.5 * std::cos(M_PI * u / half_width);  // Hann
      acc += x[static_cast<std::size_t>(m)] * 2.0 * cutoff * sinc(2.0 * cutoff * u) * w;
    }
    out.samples[n] = acc;
  }
  return out;
}

Signal condition(const Signal& signal) {
  Signal out = resample(signal, kTargetSampleRate);
  out.channel_count = 1;
  if (!out.samples.empty()) {
    const double mean =
        std::accumulate(out.samples.begin(), out.samples.end(), 0.0) /
        static_cast<double>(out.samples.size());
    for (double& s : out.samples) s -= mean;
  }
  for (double s : out.samples) {
    if (!std::isfinite(s)) throw Error(ErrorKind::kParseError, "non-finite sample after conditioning");
  }
  return out;
}

AlignedPair align_pair(const Signal& reference, const Signal& test, const AlignConfig& config) {
  auto energy = [](const std::vector<double>& v) {
    return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
  };
  const double ref_energy = energy(reference.samples);
  const double test_energy = energy(test.samples);
  if (ref_energy <= 0.0) throw Error(ErrorKind::kSilentInput, "reference signal is all zeros");
  if (test_energy <= 0.0) throw Error(ErrorKind::kSilentInput, "test signal is all zeros");

  const int max_lag = static_cast<int>(std::lround(config.max_lag_ms / 1000.0 * reference.sample_rate));
  int best_lag = 0;
  if (max_lag > 0) {
    auto corr = cross_correlate(reference.samples, test.samples, max_lag);
    // Per-lag overlap energies for normalization, from prefix sums.
    std::vector<double> ref_sq(reference.samples.size() + 1, 0.0);
    std::vector<double> test_sq(test.samples.size() + 1, 0.0);
    for (std::size_t i = 0; i < reference.samples.size(); ++i) {
      ref_sq[i + 1] = ref_sq[i] + reference.samples[i] * reference.samples[i];
    }
    for (std::size_t i = 0; i < test.samples.size(); ++i) {
      test_sq[i + 1] = test_sq[i] + test.samples[i] * test.samples[i];
    }
    double best_score = -2.0;
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
      const long ref_begin = std::max<long>(0, -lag);
      const long test_begin = ref_begin + lag;
      const long overlap = std::min<long>(static_cast<long>(reference.samples.size()) - ref_begin,
                                          static_cast<long>(test.samples.size()) - test_begin);
      if (overlap <= 1) continue;
      const double er = ref_sq[ref_begin + overlap] - ref_sq[ref_begin];
      const double et = test_sq[test_begin + overlap] - test_sq[test_begin];
      if (er <= 0.0 || et <= 0.0) continue;
      const double score = corr[static_cast<std::size_t>(lag + max_lag)] / std::sqrt(er * et);
      if (score > best_score) {
        best_score = score;
        best_lag = lag;
      }
    }
    if (std::abs(best_lag) == max_lag) {
      throw Error(ErrorKind::kLagOutOfRange,
                  "estimated lag " + std::to_string(best_lag) +
                      " samples hit the configured search bound");
    }
  }

  // Trim to the overlapping region: aligned test sample n is test[n + lag].
  const long ref_begin = std::max<long>(0, -best_lag);
  const long test_begin = ref_begin + best_lag;
  const long overlap = std::min<long>(static_cast<long>(reference.samples.size()) - ref_begin,
                                      static_cast<long>(test.samples.size()) - test_begin);
  if (overlap <= 0) throw Error(ErrorKind::kLagOutOfRange, "no overlap after alignment");

  AlignedPair pair;
  pair.lag_samples = best_lag;
  pair.playback_level_db_spl = config.playback_level_db_spl;
  pair.reference.sample_rate = reference.sample_rate;
  pair.test.sample_rate = test.sample_rate;
  pair.reference.samples.assign(reference.samples.begin() + ref_begin,
                                reference.samples.begin() + ref_begin + overlap);
  pair.test.samples.assign(test.samples.begin() + test_begin,
                           test.samples.begin() + test_begin + overlap);

  const double ref_rms = std::sqrt(energy(pair.reference.samples) / overlap);
  const double test_rms = std::sqrt(energy(pair.test.samples) / overlap);
  if (test_rms <= 0.0) throw Error(ErrorKind::kSilentInput, "test signal silent in overlap");
  pair.gain_applied = ref_rms / test_rms;
  for (double& s : pair.test.samples) s *= pair.gain_applied;
  return pair;
}

}  // namespace peaqlab
