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

#ifndef PEAQLAB_FFT_HPP_
#define PEAQLAB_FFT_HPP_

#include <complex>
#include <cstddef>
#include <vector>

namespace peaqlab {

/// In-place iterative radix-2 FFT; data.size() must be a power of two.
void fft(std::vector<std::complex<double>>& data, bool inverse = false);

std::size_t next_pow2(std::size_t n);

/// Cross-correlation c[l] = sum_n a[n] * b[n + l] for l in [-max_lag, max_lag],
/// computed via FFT. Returns 2*max_lag + 1 values, index max_lag == lag 0.
std::vector<double> cross_correlate(const std::vector<double>& a,
                                    const std::vector<double>& b,
                                    int max_lag);

}  // namespace peaqlab

#endif  // PEAQLAB_FFT_HPP_
