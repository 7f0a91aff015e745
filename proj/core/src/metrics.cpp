// Copyright 2026 The SFS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sfs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "sfs/error.hpp"
#include "sfs/parallel.hpp"
#include "sfs/rng.hpp"

namespace sfs {
namespace {

void require_same_shape(const Samples& xs, const Samples& ys) {
  if (xs.dim == 0 || ys.dim == 0) throw DomainError("samples have dimension 0");
  if (xs.dim != ys.dim) throw DomainError("sample dimensions differ");
  if (xs.n != ys.n) {
    std::ostringstream msg;
    msg << "batch sizes differ (" << xs.n << " vs " << ys.n
        << "); resample to equal sizes first";
    throw DomainError(msg.str());
  }
  if (xs.n == 0) throw DomainError("empty sample batch");
}

// Mean and standard error with Welford updates, so identical inputs give
// back exactly that value.
Estimate mean_and_se(std::span<const double> values) {
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double v : values) {
    ++k;
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  if (k < 2) return {mean, 0.0};
  const double var = m2 / static_cast<double>(k - 1);
  return {mean, std::sqrt(var / static_cast<double>(k))};
}

}  // namespace

double wasserstein2_1d(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    std::ostringstream msg;
    msg << "wasserstein2_1d needs equal lengths, got " << xs.size() << " and "
        << ys.size();
    throw DomainError(msg.str());
  }
  if (xs.empty()) throw DomainError("wasserstein2_1d needs n >= 1");
  std::vector<double> a(xs.begin(), xs.end()), b(ys.begin(), ys.end());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      throw DomainError("wasserstein2_1d needs finite samples");
    }
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

SlicedW2 sliced_w2(const Samples& xs, const Samples& ys, std::size_t n_proj,
                   std::uint64_t seed, unsigned threads) {
  require_same_shape(xs, ys);
  if (n_proj < 1) throw DomainError("sliced_w2 needs n_proj >= 1");
  const std::size_t p = xs.dim, n = xs.n;
  std::vector<double> per_direction(n_proj);

  parallel_for(n_proj, threads, [&](std::size_t j) {
    std::vector<double> u(p);
    if (p == 1) {
      u[0] = 1.0;
    } else {
      Stream stream(seed, StreamRole::kProjection, 0,
                    static_cast<std::uint32_t>(j));
      double norm = 0.0;
      while (!(norm > 0.0)) {
        fill_standard_normal(stream, u);
        norm = std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
      }
      const auto lead = std::find_if(u.begin(), u.end(),
                                     [](double v) { return v != 0.0; });
      if (*lead < 0.0) norm = -norm;
      for (double& v : u) v /= norm;
    }
    std::vector<double> px(n), py(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto rx = xs.row(i), ry = ys.row(i);
      double sx = 0.0, sy = 0.0;
      for (std::size_t c = 0; c < p; ++c) {
        sx += rx[c] * u[c];
        sy += ry[c] * u[c];
      }
      px[i] = sx;
      py[i] = sy;
    }
    per_direction[j] = wasserstein2_1d(px, py);
  });

  const Estimate e = mean_and_se(per_direction);
  return {e.value, e.se, n_proj};
}

std::vector<std::size_t> solve_assignment(std::span<const double> cost,
                                          std::size_t n) {
  if (cost.size() != n * n) throw DomainError("cost matrix must be n x n");
  // Shortest augmenting paths with potentials (Kuhn-Munkres, 1-indexed
  // rows/columns with a sentinel column 0).
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const std::size_t row0 = match[col0];
      double delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(row0 - 1) * n + (j - 1)] - u[row0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = col0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          col1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) assignment[match[j] - 1] = j - 1;
  return assignment;
}

double exact_w2_assignment(const Samples& xs, const Samples& ys) {
  require_same_shape(xs, ys);
  const std::size_t n = xs.n, p = xs.dim;
  if (n > kMaxAssignmentSize) {
    std::ostringstream msg;
    msg << "exact assignment is limited to n <= " << kMaxAssignmentSize
        << " (got " << n << "); use sliced_w2 instead";
    throw UnsupportedError(msg.str());
  }
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < p; ++c) {
        const double d = xs.row(i)[c] - ys.row(j)[c];
        s += d * d;
      }
      cost[i * n + j] = s;
    }
  }
  const std::vector<std::size_t> assignment = solve_assignment(cost, n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += cost[i * n + assignment[i]];
  return std::sqrt(total / static_cast<double>(n));
}

Estimate w2_distance(const Samples& xs, const Samples& ys, std::size_t n_proj,
                     std::uint64_t seed) {
  require_same_shape(xs, ys);
  if (xs.dim == 1) return {wasserstein2_1d(xs.values, ys.values), 0.0};
  const SlicedW2 s = sliced_w2(xs, ys, n_proj, seed);
  return {s.value, s.se};
}

MomentReport moment_report(const Samples& samples, const TargetSpec& target,
                           const Samples* reference) {
  if (samples.n == 0) throw DomainError("moment report needs samples");
  if (samples.dim != target.dim()) throw DomainError("sample dimension mismatch");
  Vector ref_mean, ref_var;
  MomentReport report;
  report.n = samples.n;
  if (target.moments()) {
    ref_mean = target.moments()->mean;
    ref_var = target.moments()->variance;
    report.reference = "analytic";
  } else if (reference) {
    if (reference->dim != samples.dim || reference->n < 2) {
      throw DomainError("reference batch must match dimension and have n >= 2");
    }
    for (std::size_t c = 0; c < samples.dim; ++c) {
      const Vector col = reference->column(c);
      const double m = std::accumulate(col.begin(), col.end(), 0.0) /
                       static_cast<double>(col.size());
      double ss = 0.0;
      for (double v : col) ss += (v - m) * (v - m);
      ref_mean.push_back(m);
      ref_var.push_back(ss / static_cast<double>(col.size() - 1));
    }
    report.reference = "ground_truth";
  } else {
    throw UnsupportedError("target '" + target.name() +
                           "' has no analytic moments; pass a reference batch");
  }

  const std::size_t n = samples.n;
  const double nd = static_cast<double>(n);
  report.se_defined = n >= 2;
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t c = 0; c < samples.dim; ++c) {
    const Vector col = samples.column(c);
    const double m = std::accumulate(col.begin(), col.end(), 0.0) / nd;
    double m2 = 0.0, m4 = 0.0;
    for (double v : col) {
      const double d2 = (v - m) * (v - m);
      m2 += d2;
      m4 += d2 * d2;
    }
    CoordinateMoments cm;
    cm.mean_error = m - ref_mean[c];
    if (n >= 2) {
      const double var = m2 / (nd - 1.0);
      cm.variance_error = var - ref_var[c];
      cm.mean_se = std::sqrt(var / nd);
      const double central4 = m4 / nd;
      const double biased = m2 / nd;
      cm.variance_se = std::sqrt(std::max(0.0, central4 - biased * biased) / nd);
    } else {
      cm.variance_error = kNaN;
      cm.mean_se = kNaN;
      cm.variance_se = kNaN;
    }
    report.coordinates.push_back(cm);
  }
  return report;
}

RateFit fit_rate(std::span<const std::pair<double, double>> points,
                 std::string parameter) {
  if (points.size() < 3) throw DomainError("fit_rate needs >= 3 points");
  std::vector<double> lx, ly;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
      throw DomainError("fit_rate needs positive finite values");
    }
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  const double k = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / k;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_rate needs distinct parameters");
  RateFit fit;
  fit.parameter = std::move(parameter);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  // A flat series has no variance to explain; a perfect fit still scores 1.
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : (ss_res == 0.0 ? 1.0 : 0.0);
  if (syy > 0.0 && ss_res <= 1e-24 * syy) fit.r_squared = 1.0;
  return fit;
}

Estimate noise_floor(const TargetSpec& target, std::size_t n,
                     std::uint64_t seed, std::size_t n_proj) {
  const Samples a = sample_ground_truth(
      target, n, derive_seed(seed, StreamRole::kReplication, 0, 1));
  const Samples b = sample_ground_truth(
      target, n, derive_seed(seed, StreamRole::kReplication, 0, 2));
  return w2_distance(a, b, n_proj, seed);
}

std::vector<Estimate> trajectory_second_moments(
    std::span<const double> trajectories, std::size_t n, std::size_t steps,
    std::size_t dim) {
  if (trajectories.size() != n * (steps + 1) * dim) {
    throw DomainError("trajectory array has the wrong size");
  }
  std::vector<Estimate> out;
  std::vector<double> norms(n);
  for (std::size_t k = 0; k <= steps; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* y = trajectories.data() + (i * (steps + 1) + k) * dim;
      double s = 0.0;
      for (std::size_t c = 0; c < dim; ++c) s += y[c] * y[c];
      norms[i] = s;
    }
    out.push_back(mean_and_se(norms));
  }
  return out;
}

}  // namespace sfs
