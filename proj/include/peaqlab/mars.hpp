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

#ifndef PEAQLAB_MARS_HPP_
#define PEAQLAB_MARS_HPP_

#include <span>
#include <string>
#include <vector>

namespace peaqlab {

enum class MarsMode { kPiecewiseLinear, kPiecewiseCubic };

/// One hinge factor h(x) = max(0, dir * (x[var] - knot)). In cubic mode the
/// hinge is replaced by a C1 cubic blend between the side knots [lo, hi];
/// lo == hi marks a hinge left linear (no room for side knots).
struct Hinge {
  int var = 0;
  double knot = 0.0;
  int dir = +1;
  double lo = 0.0;
  double hi = 0.0;
};

/// Product of hinge factors; an empty product is the intercept.
struct BasisTerm {
  std::vector<Hinge> hinges;
  int degree() const { return static_cast<int>(hinges.size()); }
  bool uses_var(int var) const;
};

struct MarsConfig {
  int max_terms = 21;        // basis functions including the intercept
  int max_interaction = 2;   // maximum hinge-product degree
  double penalty = 3.0;      // GCV penalty per knot (d)
  MarsMode mode = MarsMode::kPiecewiseLinear;
};

struct MarsModel {
  std::vector<std::string> feature_names;
  std::vector<BasisTerm> terms;       // terms[0] is the intercept
  std::vector<double> coefficients;   // parallel to terms
  MarsConfig config;
  double gcv_score = 0.0;

  std::string to_json() const;
  static MarsModel from_json(const std::string& text, const std::string& origin);
};

/// GCV criterion: RSS / (n * (1 - C(M)/n)^2) with C(M) = M + d*(M-1)/2.
double gcv(double rss, int n_rows, int m_terms, double penalty);

/// Forward greedy hinge-pair selection followed by GCV-guided backward
/// pruning; coefficients by least squares. X is row-major, n x p.
MarsModel mars_fit(const std::vector<double>& x, int n_rows, int n_vars,
                   const std::vector<double>& y,
                   const std::vector<std::string>& feature_names,
                   const MarsConfig& config = {});

double mars_predict(const MarsModel& model, std::span<const double> x);
std::vector<double> mars_predict_rows(const MarsModel& model, const std::vector<double>& x,
                                      int n_rows, int n_vars);

}  // namespace peaqlab

#endif  // PEAQLAB_MARS_HPP_
