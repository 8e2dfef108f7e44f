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

#include "peaqlab/mars.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <json.hpp>

#include "peaqlab/error.hpp"

namespace peaqlab {

bool BasisTerm::uses_var(int var) const {
  return std::any_of(hinges.begin(), hinges.end(),
                     [var](const Hinge& h) { return h.var == var; });
}

double gcv(double rss, int n_rows, int m_terms, double penalty) {
  const double c = m_terms + penalty * (m_terms - 1) / 2.0;
  if (c >= n_rows) {
    throw Error(ErrorKind::kPenaltyExceedsRows,
                "effective parameter count C(M)=" + std::to_string(c) +
                    " reaches the row count n=" + std::to_string(n_rows));
  }
  const double denom = 1.0 - c / n_rows;
  return rss / (n_rows * denom * denom);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double hinge_linear(const Hinge& h, double x) {
  return std::max(0.0, h.dir * (x - h.knot));
}

// C1 cubic blend between the side knots; identical to the hinge outside
// [lo, hi].
double hinge_cubic(const Hinge& h, double x) {
  if (h.lo >= h.hi) return hinge_linear(h, x);
  double xl = h.lo, xh = h.hi, t = h.knot, v = x;
  if (h.dir < 0) {  // mirror
    v = -x;
    t = -h.knot;
    xl = -h.hi;
    xh = -h.lo;
  }
  if (v <= xl) return 0.0;
  if (v >= xh) return v - t;
  const double delta = xh - xl;
  const double s = xh - t;
  const double p = (3.0 * s - delta) / (delta * delta);
  const double q = (delta - 2.0 * s) / (delta * delta * delta);
  const double u = v - xl;
  return p * u * u + q * u * u * u;
}

double eval_term(const BasisTerm& term, std::span<const double> x, MarsMode mode) {
  double v = 1.0;
  for (const auto& h : term.hinges) {
    v *= mode == MarsMode::kPiecewiseCubic ? hinge_cubic(h, x[static_cast<std::size_t>(h.var)])
                                           : hinge_linear(h, x[static_cast<std::size_t>(h.var)]);
    if (v == 0.0) break;
  }
  return v;
}

struct BestCandidate {
  double gain = 0.0;
  int parent = -1;
  int var = -1;
  double knot = 0.0;
};

// Least-squares on a subset of the Gram system; returns RSS.
double subset_rss(const Eigen::MatrixXd& gram, const Eigen::VectorXd& bty, double yty,
                  const std::vector<int>& subset, Eigen::VectorXd* coef_out = nullptr) {
  const int m = static_cast<int>(subset.size());
  Eigen::MatrixXd g(m, m);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    b(i) = bty(subset[i]);
    for (int j = 0; j < m; ++j) g(i, j) = gram(subset[i], subset[j]);
  }
  Eigen::VectorXd coef = g.ldlt().solve(b);
  if (coef_out) *coef_out = coef;
  return std::max(0.0, yty - coef.dot(b));
}

}  // namespace

MarsModel mars_fit(const std::vector<double>& x, int n_rows, int n_vars,
                   const std::vector<double>& y,
                   const std::vector<std::string>& feature_names,
                   const MarsConfig& config) {
  if (n_rows < 8) {
    throw Error(ErrorKind::kTooFewRows,
                "MARS needs at least 8 rows, got " + std::to_string(n_rows));
  }
  if (x.size() != static_cast<std::size_t>(n_rows) * n_vars ||
      y.size() != static_cast<std::size_t>(n_rows)) {
    throw Error(ErrorKind::kShapeMismatch, "mars_fit: X/y dimensions disagree");
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kDegenerateDesign, "NaN/inf in design matrix");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kDegenerateDesign, "NaN/inf in targets");
  }

  const int n = n_rows;
  const int p = n_vars;

  // Canonical row order (lexicographic over features, then y) makes every
  // floating-point reduction independent of the caller's row order.
  std::vector<int> canon(static_cast<std::size_t>(n));
  std::iota(canon.begin(), canon.end(), 0);
  std::sort(canon.begin(), canon.end(), [&](int a, int b) {
    for (int v = 0; v < p; ++v) {
      const double xa = x[static_cast<std::size_t>(a) * p + v];
      const double xb = x[static_cast<std::size_t>(b) * p + v];
      if (xa != xb) return xa < xb;
    }
    return y[static_cast<std::size_t>(a)] < y[static_cast<std::size_t>(b)];
  });
  std::vector<double> xc(static_cast<std::size_t>(n) * p);
  Eigen::VectorXd yc(n);
  for (int i = 0; i < n; ++i) {
    for (int v = 0; v < p; ++v) {
      xc[static_cast<std::size_t>(i) * p + v] = x[static_cast<std::size_t>(canon[i]) * p + v];
    }
    yc(i) = y[static_cast<std::size_t>(canon[i])];
  }
  auto xval = [&](int row, int var) { return xc[static_cast<std::size_t>(row) * p + var]; };

  // Rows sorted ascending by each variable, for the knot sweeps.
  std::vector<std::vector<int>> order_by_var(static_cast<std::size_t>(p));
  for (int v = 0; v < p; ++v) {
    auto& ord = order_by_var[static_cast<std::size_t>(v)];
    ord.resize(static_cast<std::size_t>(n));
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(),
                     [&](int a, int b) { return xval(a, v) < xval(b, v); });
  }

  const double yty = yc.squaredNorm();

  // Basis bookkeeping: raw term columns plus an orthonormalized copy used by
  // the knot sweeps; the residual r stays orthogonal to the current basis.
  std::vector<BasisTerm> terms{BasisTerm{}};
  std::vector<Eigen::VectorXd> columns{Eigen::VectorXd::Ones(n)};
  std::vector<Eigen::VectorXd> ortho{Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)))};
  Eigen::VectorXd residual = yc - ortho[0] * ortho[0].dot(yc);

  auto orthonormalize = [&](Eigen::VectorXd col) -> std::pair<bool, Eigen::VectorXd> {
    const double norm0 = col.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : ortho) col -= q * q.dot(col);
    }
    const double norm1 = col.norm();
    if (!(norm1 > 1e-9 * std::max(norm0, 1e-300))) return {false, col};
    return {true, col / norm1};
  };

  const double gain_floor = 1e-12 * std::max(yty, 1.0);
  while (static_cast<int>(terms.size()) + 2 <= std::min(config.max_terms, n - 1)) {
    BestCandidate best;
    const int m = static_cast<int>(terms.size());
    for (int pi = 0; pi < m; ++pi) {
      if (terms[static_cast<std::size_t>(pi)].degree() + 1 > config.max_interaction) continue;
      const Eigen::VectorXd& parent = columns[static_cast<std::size_t>(pi)];
      for (int v = 0; v < p; ++v) {
        if (terms[static_cast<std::size_t>(pi)].uses_var(v)) continue;
        const auto& ord = order_by_var[static_cast<std::size_t>(v)];
        // Sweep knots from the largest value downward, updating the inner
        // products of the candidate hinge column incrementally.
        Eigen::VectorXd c_proj = Eigen::VectorXd::Zero(m);  // <ortho_j, h>
        Eigen::VectorXd u_agg = Eigen::VectorXd::Zero(m);   // <ortho_j, parent> on active rows
        double d_res = 0.0;   // <h, residual>
        double v_agg = 0.0;   // <parent, residual> on active rows
        double q_norm = 0.0;  // <h, h>
        double w_agg = 0.0;   // <h, parent>
        double z_agg = 0.0;   // <parent, parent> on active rows
        int idx = n - 1;
        double t_prev = xval(ord[static_cast<std::size_t>(idx)], v);
        // Activate all rows tied at the maximum (hinge is zero there).
        while (idx >= 0 && xval(ord[static_cast<std::size_t>(idx)], v) == t_prev) {
          const int row = ord[static_cast<std::size_t>(idx)];
          const double pv = parent(row);
          if (pv != 0.0) {
            for (int j = 0; j < m; ++j) u_agg(j) += ortho[static_cast<std::size_t>(j)](row) * pv;
            v_agg += pv * residual(row);
            z_agg += pv * pv;
          }
          --idx;
        }
        while (idx >= 0) {
          const double t = xval(ord[static_cast<std::size_t>(idx)], v);
          const double delta = t_prev - t;
          // h grows by delta * parent on every active row.
          for (int j = 0; j < m; ++j) c_proj(j) += delta * u_agg(j);
          d_res += delta * v_agg;
          q_norm += 2.0 * delta * w_agg + delta * delta * z_agg;
          w_agg += delta * z_agg;
          t_prev = t;
          while (idx >= 0 && xval(ord[static_cast<std::size_t>(idx)], v) == t) {
            const int row = ord[static_cast<std::size_t>(idx)];
            const double pv = parent(row);
            if (pv != 0.0) {
              for (int j = 0; j < m; ++j) u_agg(j) += ortho[static_cast<std::size_t>(j)](row) * pv;
              v_agg += pv * residual(row);
              z_agg += pv * pv;
            }
            --idx;
          }
          const double denom = q_norm - c_proj.squaredNorm();
          if (denom > 1e-10 * std::max(q_norm, 1e-300)) {
            const double gain = d_res * d_res / denom;
            const bool better =
                gain > best.gain ||
                (gain == best.gain && best.parent >= 0 &&
                 (v < best.var || (v == best.var && t < best.knot)));
            if (better && gain > gain_floor) {
              best = {gain, pi, v, t};
            }
          }
        }
      }
    }
    if (best.parent < 0) break;

    // Add the hinge pair; a direction that is (numerically) linearly
    // dependent on the current basis is dropped.
    for (int dir : {+1, -1}) {
      BasisTerm term = terms[static_cast<std::size_t>(best.parent)];
      term.hinges.push_back(Hinge{best.var, best.knot, dir, best.knot, best.knot});
      Eigen::VectorXd col(n);
      for (int i = 0; i < n; ++i) {
        col(i) = columns[static_cast<std::size_t>(best.parent)](i) *
                 std::max(0.0, dir * (xval(i, best.var) - best.knot));
      }
      auto [ok, q] = orthonormalize(col);
      if (!ok) continue;
      terms.push_back(std::move(term));
      columns.push_back(std::move(col));
      residual -= q * q.dot(residual);
      ortho.push_back(std::move(q));
      if (static_cast<int>(terms.size()) >= config.max_terms) break;
    }
  }

  // Backward pruning over the Gram system.
  const int m_all = static_cast<int>(terms.size());
  Eigen::MatrixXd gram(m_all, m_all);
  Eigen::VectorXd bty(m_all);
  for (int i = 0; i < m_all; ++i) {
    bty(i) = columns[static_cast<std::size_t>(i)].dot(yc);
    for (int j = 0; j <= i; ++j) {
      gram(i, j) = gram(j, i) = columns[static_cast<std::size_t>(i)].dot(columns[static_cast<std::size_t>(j)]);
    }
  }

  auto gcv_of = [&](const std::vector<int>& subset) -> std::pair<double, double> {
    const double rss = subset_rss(gram, bty, yty, subset);
    const double c = subset.size() + config.penalty * (subset.size() - 1) / 2.0;
    if (c >= n) return {kInf, rss};
    return {gcv(rss, n, static_cast<int>(subset.size()), config.penalty), rss};
  };

  std::vector<int> current(static_cast<std::size_t>(m_all));
  std::iota(current.begin(), current.end(), 0);
  auto [best_gcv, best_rss] = gcv_of(current);
  std::vector<int> best_subset = current;
  while (current.size() > 1) {
    double step_gcv = kInf, step_rss = kInf;
    int remove_at = -1;
    for (std::size_t j = 1; j < current.size(); ++j) {  // never drop the intercept
      std::vector<int> candidate;
      candidate.reserve(current.size() - 1);
      for (std::size_t i = 0; i < current.size(); ++i) {
        if (i != j) candidate.push_back(current[i]);
      }
      auto [g, rss] = gcv_of(candidate);
      if (g < step_gcv || (g == step_gcv && rss < step_rss)) {
        step_gcv = g;
        step_rss = rss;
        remove_at = static_cast<int>(j);
      }
    }
    if (remove_at < 0) break;
    current.erase(current.begin() + remove_at);
    if (step_gcv < best_gcv) {
      best_gcv = step_gcv;
      best_subset = current;
    }
  }

  MarsModel model;
  model.feature_names = feature_names;
  model.config = config;
  for (int idx : best_subset) model.terms.push_back(terms[static_cast<std::size_t>(idx)]);

  if (config.mode == MarsMode::kPiecewiseCubic) {
    // Friedman-style side knots: midpoints between adjacent selected knots on
    // each variable, extended to the data range at the extremes.
    for (int v = 0; v < p; ++v) {
      std::vector<double> knots;
      for (const auto& term : model.terms) {
        for (const auto& h : term.hinges) {
          if (h.var == v) knots.push_back(h.knot);
        }
      }
      if (knots.empty()) continue;
      std::sort(knots.begin(), knots.end());
      knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
      const double x_min = xval(order_by_var[static_cast<std::size_t>(v)].front(), v);
      const double x_max = xval(order_by_var[static_cast<std::size_t>(v)].back(), v);
      for (auto& term : model.terms) {
        for (auto& h : term.hinges) {
          if (h.var != v) continue;
          auto it = std::lower_bound(knots.begin(), knots.end(), h.knot);
          const double below = it == knots.begin() ? x_min : *(it - 1);
          const double above = (it + 1) == knots.end() ? x_max : *(it + 1);
          h.lo = 0.5 * (below + h.knot);
          h.hi = 0.5 * (h.knot + above);
          if (!(h.lo < h.knot && h.knot < h.hi)) {
            h.lo = h.hi = h.knot;  // no room: stay linear
          }
        }
      }
    }
    // Refit on the smoothed basis.
    const int ms = static_cast<int>(model.terms.size());
    Eigen::MatrixXd basis(n, ms);
    for (int i = 0; i < n; ++i) {
      std::span<const double> row(&xc[static_cast<std::size_t>(i) * p], static_cast<std::size_t>(p));
      for (int j = 0; j < ms; ++j) {
        basis(i, j) = eval_term(model.terms[static_cast<std::size_t>(j)], row, config.mode);
      }
    }
    Eigen::VectorXd coef = (basis.transpose() * basis).ldlt().solve(basis.transpose() * yc);
    model.coefficients.assign(coef.data(), coef.data() + ms);
    const double rss = (yc - basis * coef).squaredNorm();
    const double c = ms + config.penalty * (ms - 1) / 2.0;
    model.gcv_score = c < n ? gcv(rss, n, ms, config.penalty) : best_gcv;
  } else {
    Eigen::VectorXd coef;
    subset_rss(gram, bty, yty, best_subset, &coef);
    model.coefficients.assign(coef.data(), coef.data() + coef.size());
    model.gcv_score = best_gcv;
  }
  return model;
}

double mars_predict(const MarsModel& model, std::span<const double> x) {
  if (x.size() != model.feature_names.size()) {
    throw Error(ErrorKind::kFeatureMismatch,
                "prediction input has " + std::to_string(x.size()) + " features, model expects " +
                    std::to_string(model.feature_names.size()));
  }
  double out = 0.0;
  for (std::size_t j = 0; j < model.terms.size(); ++j) {
    out += model.coefficients[j] * eval_term(model.terms[j], x, model.config.mode);
  }
  return out;
}

std::vector<double> mars_predict_rows(const MarsModel& model, const std::vector<double>& x,
                                      int n_rows, int n_vars) {
  std::vector<double> out(static_cast<std::size_t>(n_rows));
  for (int i = 0; i < n_rows; ++i) {
    out[static_cast<std::size_t>(i)] = mars_predict(
        model, std::span<const double>(&x[static_cast<std::size_t>(i) * n_vars],
                                       static_cast<std::size_t>(n_vars)));
  }
  return out;
}

std::string MarsModel::to_json() const {
  nlohmann::json j;
  j["schema"] = "peaqlab-mars/1";
  j["feature_names"] = feature_names;
  j["mode"] = config.mode == MarsMode::kPiecewiseCubic ? "piecewise_cubic" : "piecewise_linear";
  j["max_terms"] = config.max_terms;
  j["max_interaction"] = config.max_interaction;
  j["penalty"] = config.penalty;
  j["gcv"] = gcv_score;
  nlohmann::json jterms = nlohmann::json::array();
  for (std::size_t t = 0; t < terms.size(); ++t) {
    nlohmann::json jt;
    jt["coefficient"] = coefficients[t];
    nlohmann::json hinges = nlohmann::json::array();
    for (const auto& h : terms[t].hinges) {
      hinges.push_back({{"var", h.var},
                        {"feature", feature_names[static_cast<std::size_t>(h.var)]},
                        {"knot", h.knot},
                        {"dir", h.dir},
                        {"lo", h.lo},
                        {"hi", h.hi}});
    }
    jt["hinges"] = hinges;
    jterms.push_back(jt);
  }
  j["terms"] = jterms;
  return j.dump(2) + "\n";
}

MarsModel MarsModel::from_json(const std::string& text, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, origin + ": " + e.what());
  }
  MarsModel model;
  try {
    if (j.at("schema").get<std::string>() != "peaqlab-mars/1") {
      throw Error(ErrorKind::kSchemaVersionMismatch,
                  origin + ": unsupported model schema " + j.at("schema").get<std::string>());
    }
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.config.mode = j.at("mode").get<std::string>() == "piecewise_cubic"
                            ? MarsMode::kPiecewiseCubic
                            : MarsMode::kPiecewiseLinear;
    model.config.max_terms = j.at("max_terms").get<int>();
    model.config.max_interaction = j.at("max_interaction").get<int>();
    model.config.penalty = j.at("penalty").get<double>();
    model.gcv_score = j.at("gcv").get<double>();
    for (const auto& jt : j.at("terms")) {
      BasisTerm term;
      for (const auto& jh : jt.at("hinges")) {
        term.hinges.push_back(Hinge{jh.at("var").get<int>(), jh.at("knot").get<double>(),
                                    jh.at("dir").get<int>(), jh.at("lo").get<double>(),
                                    jh.at("hi").get<double>()});
      }
      model.terms.push_back(std::move(term));
      model.coefficients.push_back(jt.at("coefficient").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, origin + ": " + e.what());
  }
  return model;
}

}  // namespace peaqlab
