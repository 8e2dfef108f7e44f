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

#include "peaqlab/fft.hpp"

#include <cmath>

#include "peaqlab/error.hpp"

namespace peaqlab {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft(std::vector<std::complex<double>>& data, bool inverse) {
  const std::size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw Error(ErrorKind::kInternal, "fft size must be a power of two");
  }
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        auto u = data[i + k];
        auto v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    for (auto& x : data) x /= static_cast<double>(n);
  }
}

std::vector<double> cross_correlate(const std::vector<double>& a,
                                    const std::vector<double>& b,
                                    int max_lag) {
  const std::size_t n = std::max(a.size(), b.size());
  const std::size_t size = next_pow2(n + static_cast<std::size_t>(max_lag) + 1);
  std::vector<std::complex<double>> fa(size), fb(size);
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
  fft(fa);
  fft(fb);
  for (std::size_t i = 0; i < size; ++i) fa[i] = std::conj(fa[i]) * fb[i];
  fft(fa, true);
  // c[l] = sum a[n] b[n+l]; for negative l wrap around the end.
  std::vector<double> out(2 * static_cast<std::size_t>(max_lag) + 1);
  for (int l = -max_lag; l <= max_lag; ++l) {
    std::size_t idx = l >= 0 ? static_cast<std::size_t>(l) : size + static_cast<std::size_t>(l);
    out[static_cast<std::size_t>(l + max_lag)] = fa[idx].real();
  }
  return out;
}

}  // namespace peaqlab
