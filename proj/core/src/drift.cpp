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

#include "sfs/drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sfs/error.hpp"
#include "sfs/parallel.hpp"

namespace sfs {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_time(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("drift time must lie in [0, 1]");
}

void check_point(const TargetSpec& target, std::span<const double> x) {
  if (x.size() != target.dim()) throw DomainError("point dimension mismatch");
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError("non-finite drift argument");
  }
}

// Per-thread scratch for one drift batch.
struct Batch {
  std::vector<double> z;      // m x p normals
  std::vector<double> logf;   // m
  std::vector<double> grads;  // m x p (gradient mode only)
  std::vector<double> y;      // p
};

Batch& scratch() {
  thread_local Batch batch;
  return batch;
}

// Evaluates log f (and optionally grad log f) at x + sqrt(1-t) Z_j for the
// batch drawn from `stream`, then returns the largest log value.
double fill_batch(const DensityRatioModel& model, std::span<const double> x,
                  double scale, std::size_t m, Stream& stream,
                  bool with_grad, Batch& b) {
  const std::size_t p = x.size();
  b.z.resize(m * p);
  b.logf.resize(m);
  b.y.resize(p);
  if (with_grad) b.grads.resize(m * p);
  fill_standard_normal(stream, b.z);

  double top = kNegInf;
  for (std::size_t j = 0; j < m; ++j) {
    const double* zj = b.z.data() + j * p;
    for (std::size_t c = 0; c < p; ++c) b.y[c] = x[c] + scale * zj[c];
    const double l =
        with_grad
            ? model.log_ratio_grad(b.y, std::span<double>(b.grads.data() + j * p, p))
            : model.log_ratio(b.y);
    if (std::isnan(l) || l == std::numeric_limits<double>::infinity()) {
      throw DriftSingularityError("log f is not finite at a drift sample", 0.0);
    }
    b.logf[j] = l;
    top = std::max(top, l);
  }
  return top;
}

// Ratio of weighted sums with weights exp(log f_j - max). The common
// factor exp(max) cancels, so no term can overflow.
void weighted_ratio(const Batch& b, std::size_t m, std::size_t p, double top,
                    bool use_grad, double divisor, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  double den = 0.0;
  const std::vector<double>& terms = use_grad ? b.grads : b.z;
  for (std::size_t j = 0; j < m; ++j) {
    const double w = std::exp(b.logf[j] - top);
    den += w;
    const double* v = terms.data() + j * p;
    for (std::size_t c = 0; c < p; ++c) out[c] += w * v[c];
  }
  const double inv = 1.0 / (den * divisor);
  for (double& o : out) o *= inv;
}

void mc_drift(const DriftEvaluator& ev, std::span<const double> x, double t,
              std::uint32_t step, std::uint32_t particle, bool use_grad,
              std::span<double> out) {
  const TargetSpec& target = ev.target();
  const std::size_t m = ev.mc_size();
  const std::size_t p = target.dim();
  const double scale = std::sqrt(1.0 - t);
  if (use_grad && !target.has_gradient()) {
    throw UnsupportedError("gradient estimator needs grad f; target '" +
                           target.name() + "' has none");
  }
  if (!use_grad && !(t < 1.0)) {
    throw DomainError("Stein estimator is undefined at t = 1");
  }

  Stream stream(ev.seed(), StreamRole::kDriftBatch, step, particle);
  Batch& b = scratch();
  double top;
  try {
    top = fill_batch(target.model(), x, scale, m, stream, use_grad, b);
  } catch (const DriftSingularityError& e) {
    throw DriftSingularityError(e.what(), t, step, particle);
  }
  if (top == kNegInf) {
    std::ostringstream msg;
    msg << "drift denominator is zero: f vanished on all " << m
        << " inner samples at t=" << t;
    throw DriftSingularityError(msg.str(), t, step, particle);
  }
  weighted_ratio(b, m, p, top, use_grad, use_grad ? 1.0 : scale, out);
}

}  // namespace

const char* to_string(DriftMode mode) {
  switch (mode) {
    case DriftMode::kExact: return "exact";
    case DriftMode::kMcGrad: return "mc_grad";
    case DriftMode::kMcStein: return "mc_stein";
  }
  return "unknown";
}

DriftMode parse_drift_mode(const std::string& text) {
  if (text == "exact") return DriftMode::kExact;
  if (text == "mc_grad") return DriftMode::kMcGrad;
  if (text == "mc_stein") return DriftMode::kMcStein;
  throw ConfigError("unknown drift mode '" + text +
                    "' (expected exact, mc_grad or mc_stein)");
}

DriftEvaluator::DriftEvaluator(TargetSpec target, DriftMode mode,
                               std::size_t mc_size, std::uint64_t seed)
    : target_(std::move(target)), mode_(mode), mc_size_(mc_size), seed_(seed) {
  if (mode_ == DriftMode::kExact && !target_.mixture()) {
    throw UnsupportedError("exact drift needs a Gaussian-mixture target; '" +
                           target_.name() + "' is not one");
  }
  if (mode_ != DriftMode::kExact && mc_size_ < 1) {
    throw DomainError("Monte-Carlo drift needs m >= 1");
  }
  if (mode_ == DriftMode::kMcGrad && !target_.has_gradient()) {
    throw UnsupportedError("mc_grad drift needs grad f; target '" +
                           target_.name() + "' has none");
  }
}

DriftEvaluator DriftEvaluator::monte_carlo(TargetSpec target,
                                           std::size_t mc_size,
                                           std::uint64_t seed) {
  const DriftMode mode =
      target.has_gradient() ? DriftMode::kMcGrad : DriftMode::kMcStein;
  return DriftEvaluator(std::move(target), mode, mc_size, seed);
}

const char* DriftEvaluator::stream_policy() {
  return "philox4x32-10 key=seed counter=(block, role=drift_batch, step, "
         "particle)";
}

void DriftEvaluator::evaluate(std::span<const double> x, double t,
                              std::uint32_t step, std::uint32_t particle,
                              std::span<double> out) const {
  switch (mode_) {
    case DriftMode::kExact: {
      const Vector b = drift_exact(target_, x, t);
      std::copy(b.begin(), b.end(), out.begin());
      return;
    }
    case DriftMode::kMcGrad:
      mc_drift(*this, x, t, step, particle, true, out);
      return;
    case DriftMode::kMcStein:
      mc_drift(*this, x, t, step, particle, false, out);
      return;
  }
}

Vector DriftEvaluator::operator()(std::span<const double> x, double t,
                                  std::uint32_t step,
                                  std::uint32_t particle) const {
  check_point(target_, x);
  check_time(t);
  Vector out(target_.dim());
  evaluate(x, t, step, particle, out);
  return out;
}

double heat_semigroup_mc(const TargetSpec& target, std::span<const double> x,
                         double t, std::size_t m, std::uint64_t seed) {
  check_point(target, x);
  check_time(t);
  if (m < 1) throw DomainError("heat semigroup estimate needs m >= 1");
  Stream stream(seed, StreamRole::kSemigroup, 0, 0);
  Batch& b = scratch();
  const double top =
      fill_batch(target.model(), x, std::sqrt(t), m, stream, false, b);
  if (top == kNegInf) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < m; ++j) sum += std::exp(b.logf[j] - top);
  return std::exp(top + std::log(sum / static_cast<double>(m)) +
                  target.log_scale());
}

Vector drift_exact(const TargetSpec& target, std::span<const double> x,
                   double t) {
  if (!target.mixture()) {
    throw UnsupportedError("exact drift needs a Gaussian-mixture target; '" +
                           target.name() + "' is not one");
  }
  check_point(target, x);
  check_time(t);
  const GaussianMixture& mix = *target.mixture();
  const std::size_t p = target.dim();

  auto exponent = [&](std::size_t i) {
    double dot = 0.0, sq = 0.0;
    for (std::size_t c = 0; c < p; ++c) {
      dot += mix.means[i][c] * x[c];
      sq += mix.means[i][c] * mix.means[i][c];
    }
    return std::log(mix.weights[i]) + dot - 0.5 * t * sq;
  };

  double top = kNegInf;
  for (std::size_t i = 0; i < mix.size(); ++i) top = std::max(top, exponent(i));
  Vector b(p, 0.0);
  double den = 0.0;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    const double w = std::exp(exponent(i) - top);
    den += w;
    for (std::size_t c = 0; c < p; ++c) b[c] += w * mix.means[i][c];
  }
  for (double& v : b) v /= den;
  return b;
}

Vector drift_mc_grad(const DriftEvaluator& ev, std::span<const double> x,
                     double t, std::uint32_t step, std::uint32_t particle) {
  if (ev.mode() != DriftMode::kMcGrad) {
    throw DomainError("evaluator is not in mc_grad mode");
  }
  return ev(x, t, step, particle);
}

Vector drift_mc_stein(const DriftEvaluator& ev, std::span<const double> x,
                      double t, std::uint32_t step, std::uint32_t particle) {
  if (ev.mode() != DriftMode::kMcStein) {
    throw DomainError("evaluator is not in mc_stein mode");
  }
  return ev(x, t, step, particle);
}

void ProbeGrid::validate() const {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("probe grid needs finite lo < hi");
  }
  if (points_per_axis < 2) throw DomainError("probe grid needs >= 2 points per axis");
  if (times.empty()) throw DomainError("probe grid needs at least one time");
  for (double t : times) check_time(t);
  if (directions < 1) throw DomainError("probe grid needs >= 1 direction");
  if (mc_size < 1) throw DomainError("probe grid needs mc_size >= 1");
}

Samples ProbeGrid::points(std::size_t dim, std::uint64_t seed) const {
  validate();
  std::vector<double> axis(points_per_axis);
  for (std::size_t i = 0; i < points_per_axis; ++i) {
    axis[i] = lo + (hi - lo) * static_cast<double>(i) /
                       static_cast<double>(points_per_axis - 1);
  }
  if (dim <= 2) {
    const std::size_t count = dim == 1 ? points_per_axis
                                       : points_per_axis * points_per_axis;
    Samples out(count, dim);
    for (std::size_t i = 0; i < count; ++i) {
      out.row(i)[0] = axis[i % points_per_axis];
      if (dim == 2) out.row(i)[1] = axis[i / points_per_axis];
    }
    return out;
  }
  Samples out(directions * points_per_axis, dim);
  std::vector<double> u(dim);
  for (std::size_t d = 0; d < directions; ++d) {
    Stream stream(seed, StreamRole::kProbe, 0, static_cast<std::uint32_t>(d));
    fill_standard_normal(stream, u);
    double norm = 0.0;
    for (double v : u) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < points_per_axis; ++i) {
      auto row = out.row(d * points_per_axis + i);
      for (std::size_t c = 0; c < dim; ++c) row[c] = axis[i] * u[c] / norm;
    }
  }
  return out;
}

DriftRegularityEstimate estimate_regularity(const TargetSpec& target,
                                            const ProbeGrid& grid,
                                            std::uint64_t seed,
                                            unsigned threads) {
  const std::size_t p = target.dim();
  const Samples points = grid.points(p, seed);
  const DriftEvaluator ev =
      target.mixture()
          ? DriftEvaluator(target, DriftMode::kExact)
          : DriftEvaluator::monte_carlo(target, grid.mc_size, seed);
  if (ev.mode() == DriftMode::kMcStein) {
    for (double t : grid.times) {
      if (!(t < 1.0)) throw DomainError("Stein drift probes need times < 1");
    }
  }

  const std::size_t nt = grid.times.size();
  const std::size_t count = points.n * nt;
  Samples drifts(count, p);
  parallel_for(count, threads, [&](std::size_t k) {
    const std::size_t i = k / nt;
    const double t = grid.times[k % nt];
    ev.evaluate(points.row(i), t, static_cast<std::uint32_t>(k % nt),
                static_cast<std::uint32_t>(i), drifts.row(k));
  });

  auto norm2 = [](std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return s;
  };

  DriftRegularityEstimate est;
  est.grid = grid;
  est.dim = p;
  est.evaluations = count;
  est.mode = ev.mode();
  est.seed = seed;
  for (std::size_t k = 0; k < count; ++k) {
    const double b2 = norm2(drifts.row(k));
    const double x2 = norm2(points.row(k / nt));
    est.c0_hat = std::max(est.c0_hat, b2 / (1.0 + x2));
    est.b_sup_hat = std::max(est.b_sup_hat, std::sqrt(b2));
  }
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = a + 1; b < count; ++b) {
      const auto xa = points.row(a / nt), xb = points.row(b / nt);
      const auto ba = drifts.row(a), bb = drifts.row(b);
      double dx = 0.0, db = 0.0;
      for (std::size_t c = 0; c < p; ++c) {
        dx += (xa[c] - xb[c]) * (xa[c] - xb[c]);
        db += (ba[c] - bb[c]) * (ba[c] - bb[c]);
      }
      const double dt = std::abs(grid.times[a % nt] - grid.times[b % nt]);
      const double denom = std::sqrt(dx) + std::sqrt(dt);
      if (denom > 0.0) est.c1_hat = std::max(est.c1_hat, std::sqrt(db) / denom);
    }
  }
  return est;
}

}  // namespace sfs
