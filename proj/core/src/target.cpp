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

#include "sfs/target.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>

#include "sfs/error.hpp"
#include "sfs/format.hpp"
#include "sfs/parallel.hpp"

namespace sfs {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

class MixtureModel final : public DensityRatioModel {
 public:
  explicit MixtureModel(const GaussianMixture& mix) : means_(mix.means) {
    offsets_.reserve(mix.size());
    for (std::size_t i = 0; i < mix.size(); ++i) {
      offsets_.push_back(std::log(mix.weights[i]) -
                         0.5 * squared_norm(mix.means[i]));
    }
  }

  std::size_t dim() const override { return means_.front().size(); }

  double log_ratio(std::span<const double> x) const override {
    const double top = max_exponent(x);
    if (top == kNegInf) return kNegInf;
    double sum = 0.0;
    for (std::size_t i = 0; i < means_.size(); ++i) {
      sum += std::exp(exponent(i, x) - top);
    }
    return top + std::log(sum);
  }

  double log_ratio_grad(std::span<const double> x,
                        std::span<double> grad) const override {
    std::fill(grad.begin(), grad.end(), 0.0);
    const double top = max_exponent(x);
    if (top == kNegInf) return kNegInf;
    double sum = 0.0;
    for (std::size_t i = 0; i < means_.size(); ++i) {
      const double w = std::exp(exponent(i, x) - top);
      sum += w;
      for (std::size_t c = 0; c < grad.size(); ++c) grad[c] += w * means_[i][c];
    }
    for (double& g : grad) g /= sum;
    return top + std::log(sum);
  }

 private:
  double exponent(std::size_t i, std::span<const double> x) const {
    return offsets_[i] + dot(means_[i], x);
  }

  double max_exponent(std::span<const double> x) const {
    double top = kNegInf;
    for (std::size_t i = 0; i < means_.size(); ++i) {
      top = std::max(top, exponent(i, x));
    }
    return top;
  }

  std::vector<Vector> means_;
  std::vector<double> offsets_;
};

class BumpModel final : public DensityRatioModel {
 public:
  BumpModel(std::size_t dim, double radius)
      : dim_(dim), inv_r2_(1.0 / (radius * radius)) {
    const double half_p = 0.5 * static_cast<double>(dim);
    // Normalizer of (1 - |x|^2/r^2)^2 over the ball: 2 pi^{p/2} r^p / Gamma(p/2 + 3).
    const double log_norm = std::log(2.0) + half_p * std::log(std::numbers::pi) +
                            static_cast<double>(dim) * std::log(radius) -
                            std::lgamma(half_p + 3.0);
    constant_ = half_p * std::log(2.0 * std::numbers::pi) - log_norm;
  }

  std::size_t dim() const override { return dim_; }

  double log_ratio(std::span<const double> x) const override {
    const double sq = squared_norm(x);
    const double u = sq * inv_r2_;
    if (u >= 1.0) return kNegInf;
    return 2.0 * std::log1p(-u) + 0.5 * sq + constant_;
  }

  double log_ratio_grad(std::span<const double> x,
                        std::span<double> grad) const override {
    const double sq = squared_norm(x);
    const double u = sq * inv_r2_;
    if (u >= 1.0) {
      std::fill(grad.begin(), grad.end(), 0.0);
      return kNegInf;
    }
    const double scale = -4.0 * inv_r2_ / (1.0 - u) + 1.0;
    for (std::size_t c = 0; c < dim_; ++c) grad[c] = scale * x[c];
    return 2.0 * std::log1p(-u) + 0.5 * sq + constant_;
  }

 private:
  std::size_t dim_;
  double inv_r2_;
  double constant_;
};

// log f = -V(x) + |x|^2 / 2, missing the constant log((2 pi)^{p/2} / C).
class PotentialModel final : public DensityRatioModel {
 public:
  PotentialModel(std::size_t dim, ScalarField potential, VectorField grad)
      : dim_(dim), potential_(std::move(potential)), grad_(std::move(grad)) {}

  std::size_t dim() const override { return dim_; }

  double log_ratio(std::span<const double> x) const override {
    return -potential_(x) + 0.5 * squared_norm(x);
  }

  double log_ratio_grad(std::span<const double> x,
                        std::span<double> grad) const override {
    if (!grad_) throw UnsupportedError("potential has no gradient");
    grad_(x, grad);
    for (std::size_t c = 0; c < dim_; ++c) grad[c] = x[c] - grad[c];
    return log_ratio(x);
  }

  bool has_gradient() const override { return static_cast<bool>(grad_); }

 private:
  std::size_t dim_;
  ScalarField potential_;
  VectorField grad_;
};

class RegularizedModel final : public DensityRatioModel {
 public:
  RegularizedModel(std::shared_ptr<const DensityRatioModel> base, double eps)
      : base_(std::move(base)),
        log_keep_(std::log1p(-eps)),
        log_eps_(std::log(eps)) {}

  std::size_t dim() const override { return base_->dim(); }

  double log_ratio(std::span<const double> x) const override {
    return log_add_exp(log_keep_ + base_->log_ratio(x), log_eps_);
  }

  double log_ratio_grad(std::span<const double> x,
                        std::span<double> grad) const override {
    const double base = base_->log_ratio_grad(x, grad);
    const double value = log_add_exp(log_keep_ + base, log_eps_);
    if (base == kNegInf) {
      std::fill(grad.begin(), grad.end(), 0.0);
    } else {
      const double share = std::exp(log_keep_ + base - value);
      for (double& g : grad) g *= share;
    }
    return value;
  }

  bool has_gradient() const override { return base_->has_gradient(); }

 private:
  std::shared_ptr<const DensityRatioModel> base_;
  double log_keep_;
  double log_eps_;
};

class MixtureSampler final : public GroundTruthSampler {
 public:
  explicit MixtureSampler(GaussianMixture mix) : mix_(std::move(mix)) {
    cumulative_.resize(mix_.size());
    std::partial_sum(mix_.weights.begin(), mix_.weights.end(),
                     cumulative_.begin());
  }

  void draw(Stream& stream, std::span<double> out) const override {
    const double u = stream.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const std::size_t k = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative_.begin()), mix_.size() - 1);
    fill_standard_normal(stream, out);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += mix_.means[k][c];
  }

 private:
  GaussianMixture mix_;
  std::vector<double> cumulative_;
};

class ScaledGaussianSampler final : public GroundTruthSampler {
 public:
  ScaledGaussianSampler(Vector mean, double sigma)
      : mean_(std::move(mean)), sigma_(sigma) {}

  void draw(Stream& stream, std::span<double> out) const override {
    fill_standard_normal(stream, out);
    for (std::size_t c = 0; c < out.size(); ++c) {
      out[c] = mean_[c] + sigma_ * out[c];
    }
  }

 private:
  Vector mean_;
  double sigma_;
};

// Radial construction: uniform direction, |x|^2 / r^2 ~ Beta(p/2, 3).
class BumpSampler final : public GroundTruthSampler {
 public:
  BumpSampler(std::size_t dim, double radius) : dim_(dim), radius_(radius) {}

  void draw(Stream& stream, std::span<double> out) const override {
    std::gamma_distribution<double> shape_a(0.5 * static_cast<double>(dim_));
    std::gamma_distribution<double> shape_b(3.0);
    const double a = shape_a(stream);
    const double b = shape_b(stream);
    const double r = radius_ * std::sqrt(a / (a + b));
    fill_standard_normal(stream, out);
    const double norm = std::sqrt(squared_norm(out));
    for (double& v : out) v *= r / norm;
  }

 private:
  std::size_t dim_;
  double radius_;
};

class RegularizedSampler final : public GroundTruthSampler {
 public:
  RegularizedSampler(std::shared_ptr<const GroundTruthSampler> base, double eps)
      : base_(std::move(base)), eps_(eps) {}

  void draw(Stream& stream, std::span<double> out) const override {
    if (stream.uniform() < eps_) {
      fill_standard_normal(stream, out);
    } else {
      base_->draw(stream, out);
    }
  }

 private:
  std::shared_ptr<const GroundTruthSampler> base_;
  double eps_;
};

Moments mixture_moments(const GaussianMixture& mix) {
  const std::size_t p = mix.dim();
  Moments m{Vector(p, 0.0), Vector(p, 1.0)};
  for (std::size_t i = 0; i < mix.size(); ++i) {
    for (std::size_t c = 0; c < p; ++c) {
      m.mean[c] += mix.weights[i] * mix.means[i][c];
      m.variance[c] += mix.weights[i] * mix.means[i][c] * mix.means[i][c];
    }
  }
  for (std::size_t c = 0; c < p; ++c) m.variance[c] -= m.mean[c] * m.mean[c];
  return m;
}

void require_finite_point(const TargetSpec& target, std::span<const double> x) {
  if (x.size() != target.dim()) {
    std::ostringstream msg;
    msg << "point has dimension " << x.size() << ", target has "
        << target.dim();
    throw DomainError(msg.str());
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError("non-finite evaluation point");
  }
}

}  // namespace

Vector Samples::column(std::size_t c) const {
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = values[i * dim + c];
  return out;
}

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (a == kNegInf) return kNegInf;
  return a + std::log1p(std::exp(b - a));
}

void GaussianMixture::validate() const {
  if (weights.empty()) throw DomainError("mixture has no components");
  if (weights.size() != means.size()) {
    throw DomainError("mixture weights and means differ in length");
  }
  const std::size_t p = dim();
  if (p == 0) throw DomainError("mixture dimension must be >= 1");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw DomainError("mixture weights must be nonnegative");
    }
    if (means[i].size() != p) {
      throw DomainError("mixture means must share one dimension");
    }
    for (double v : means[i]) {
      if (!std::isfinite(v)) throw DomainError("non-finite mixture mean");
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("mixture weights must sum to 1");
  }
}

void TargetRegularity::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw DomainError("regularity gamma must be positive");
  }
  if (!(xi > 0.0) || !std::isfinite(xi)) {
    throw DomainError("regularity xi must be positive");
  }
  if (zeta && !(*zeta >= xi)) throw DomainError("regularity zeta must be >= xi");
}

double TargetRegularity::second_moment_bound(std::size_t dim) const {
  const double ratio = gamma / xi;
  return 6.0 * ratio * ratio + 3.0 * static_cast<double>(dim);
}

TargetSpec TargetSpec::standard_gaussian(std::size_t dim) {
  if (dim == 0) throw DomainError("dimension must be >= 1");
  TargetSpec t = mixture(GaussianMixture{{1.0}, {Vector(dim, 0.0)}});
  t.name_ = "standard";
  return t;
}

TargetSpec TargetSpec::gaussian(Vector mean) {
  TargetSpec t = mixture(GaussianMixture{{1.0}, {std::move(mean)}});
  t.name_ = "gaussian";
  return t;
}

TargetSpec TargetSpec::mixture(GaussianMixture mix) {
  mix.validate();
  TargetSpec t;
  t.dim_ = mix.dim();
  t.form_ = TargetForm::kDensityRatio;
  t.name_ = "mixture";
  t.model_ = std::make_shared<MixtureModel>(mix);
  t.ground_truth_ = std::make_shared<MixtureSampler>(mix);
  t.moments_ = mixture_moments(mix);
  t.mixture_ = std::move(mix);
  return t;
}

TargetSpec TargetSpec::bump(std::size_t dim, double radius) {
  if (dim == 0) throw DomainError("dimension must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw DomainError("bump radius must be positive");
  }
  TargetSpec t;
  t.dim_ = dim;
  t.form_ = TargetForm::kDensityRatio;
  t.name_ = "bump";
  t.model_ = std::make_shared<BumpModel>(dim, radius);
  t.ground_truth_ = std::make_shared<BumpSampler>(dim, radius);
  const double var = radius * radius / (static_cast<double>(dim) + 6.0);
  t.moments_ = Moments{Vector(dim, 0.0), Vector(dim, var)};
  return t;
}

TargetSpec TargetSpec::potential(std::size_t dim, ScalarField potential,
                                 VectorField potential_grad) {
  if (dim == 0) throw DomainError("dimension must be >= 1");
  if (!potential) throw DomainError("potential function is required");
  TargetSpec t;
  t.dim_ = dim;
  t.form_ = TargetForm::kPotential;
  t.name_ = "potential";
  t.model_ = std::make_shared<PotentialModel>(dim, std::move(potential),
                                              std::move(potential_grad));
  return t;
}

TargetSpec TargetSpec::gaussian_potential(Vector mean, double sigma) {
  if (mean.empty()) throw DomainError("dimension must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("sigma must be positive");
  }
  const double inv_var = 1.0 / (sigma * sigma);
  auto v = [mean, inv_var](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
      s += (x[c] - mean[c]) * (x[c] - mean[c]);
    }
    return 0.5 * inv_var * s;
  };
  auto dv = [mean, inv_var](std::span<const double> x, std::span<double> g) {
    for (std::size_t c = 0; c < x.size(); ++c) g[c] = inv_var * (x[c] - mean[c]);
  };
  const std::size_t p = mean.size();
  TargetSpec t = potential(p, v, dv);
  t.name_ = "gaussian_potential";
  t.ground_truth_ = std::make_shared<ScaledGaussianSampler>(mean, sigma);
  t.moments_ = Moments{mean, Vector(p, sigma * sigma)};
  return t;
}

TargetSpec TargetSpec::mixture_potential(GaussianMixture mix) {
  mix.validate();
  const std::size_t p = mix.dim();
  // V(x) = -log sum_i w_i exp(-|x - m_i|^2 / 2).
  auto exponents = [mix](std::span<const double> x, std::vector<double>& out) {
    out.resize(mix.size());
    double top = kNegInf;
    for (std::size_t i = 0; i < mix.size(); ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c < x.size(); ++c) {
        const double d = x[c] - mix.means[i][c];
        s += d * d;
      }
      out[i] = std::log(mix.weights[i]) - 0.5 * s;
      top = std::max(top, out[i]);
    }
    return top;
  };
  auto v = [exponents](std::span<const double> x) {
    thread_local std::vector<double> e;
    const double top = exponents(x, e);
    double sum = 0.0;
    for (double a : e) sum += std::exp(a - top);
    return -(top + std::log(sum));
  };
  auto dv = [exponents, mix](std::span<const double> x, std::span<double> g) {
    thread_local std::vector<double> e;
    const double top = exponents(x, e);
    double sum = 0.0;
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double w = std::exp(e[i] - top);
      sum += w;
      for (std::size_t c = 0; c < x.size(); ++c) {
        g[c] += w * (x[c] - mix.means[i][c]);
      }
    }
    for (double& gc : g) gc /= sum;
  };
  TargetSpec t = potential(p, v, dv);
  t.name_ = "mixture_potential";
  t.ground_truth_ = std::make_shared<MixtureSampler>(mix);
  t.moments_ = mixture_moments(mix);
  return t;
}

TargetSpec TargetSpec::with_log_scale(double shift) const {
  if (!std::isfinite(shift)) throw DomainError("log scale must be finite");
  TargetSpec t = *this;
  t.log_scale_ = log_scale_ + shift;
  // C f is no longer a probability density ratio.
  t.form_ = TargetForm::kPotential;
  return t;
}

TargetSpec TargetSpec::with_regularity(TargetRegularity regularity) const {
  regularity.validate();
  TargetSpec t = *this;
  t.regularity_ = regularity;
  return t;
}

TargetSpec TargetSpec::with_name(std::string name) const {
  TargetSpec t = *this;
  t.name_ = std::move(name);
  return t;
}

std::string TargetSpec::describe() const {
  std::ostringstream out;
  out << "name=" << name_ << ";dim=" << dim_ << ";form="
      << (form_ == TargetForm::kDensityRatio ? "density_ratio" : "potential")
      << ";eps=" << format_double(epsilon_)
      << ";log_scale=" << format_double(log_scale_);
  if (mixture_) {
    out << ";mixture=";
    for (std::size_t i = 0; i < mixture_->size(); ++i) {
      out << (i ? "|" : "") << format_double(mixture_->weights[i]) << "@";
      for (std::size_t c = 0; c < dim_; ++c) {
        out << (c ? "," : "") << format_double(mixture_->means[i][c]);
      }
    }
  }
  if (moments_) {
    out << ";mean=";
    for (std::size_t c = 0; c < dim_; ++c) {
      out << (c ? "," : "") << format_double(moments_->mean[c]);
    }
    out << ";var=";
    for (std::size_t c = 0; c < dim_; ++c) {
      out << (c ? "," : "") << format_double(moments_->variance[c]);
    }
  }
  if (regularity_) {
    out << ";gamma=" << format_double(regularity_->gamma)
        << ";xi=" << format_double(regularity_->xi);
    if (regularity_->zeta) out << ";zeta=" << format_double(*regularity_->zeta);
  }
  return out.str();
}

LogRatioValue eval_log_f(const TargetSpec& target, std::span<const double> x) {
  require_finite_point(target, x);
  return {target.model().log_ratio(x) + target.log_scale(),
          target.form() == TargetForm::kPotential};
}

Vector eval_grad_log_f(const TargetSpec& target, std::span<const double> x) {
  require_finite_point(target, x);
  if (!target.has_gradient()) {
    throw UnsupportedError("target '" + target.name() + "' has no gradient");
  }
  Vector grad(target.dim());
  target.model().log_ratio_grad(x, grad);
  return grad;
}

TargetSpec regularize(const TargetSpec& target, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw DomainError("regularization eps must lie in (0, 1)");
  }
  if (target.form() != TargetForm::kDensityRatio) {
    throw UnsupportedError(
        "regularization needs an absolute density ratio; target '" +
        target.name() + "' is only known up to a constant");
  }

  TargetSpec out;
  if (target.mixture()) {
    GaussianMixture mix = *target.mixture();
    for (double& w : mix.weights) w *= 1.0 - eps;
    mix.weights.push_back(eps);
    mix.means.push_back(Vector(target.dim(), 0.0));
    // Renormalize away rounding so validate() accepts the result.
    const double total =
        std::accumulate(mix.weights.begin(), mix.weights.end(), 0.0);
    for (double& w : mix.weights) w /= total;
    out = TargetSpec::mixture(std::move(mix));
  } else {
    out = target;
    out.model_ = std::make_shared<RegularizedModel>(target.model_, eps);
    out.mixture_.reset();
    if (target.ground_truth_) {
      out.ground_truth_ =
          std::make_shared<RegularizedSampler>(target.ground_truth_, eps);
    }
    if (target.moments_) {
      Moments m = *target.moments_;
      for (std::size_t c = 0; c < m.mean.size(); ++c) {
        const double second = m.variance[c] + m.mean[c] * m.mean[c];
        m.mean[c] *= 1.0 - eps;
        m.variance[c] = (1.0 - eps) * second + eps - m.mean[c] * m.mean[c];
      }
      out.moments_ = m;
    }
  }
  out.name_ = target.name_;
  out.epsilon_ = 1.0 - (1.0 - target.epsilon_) * (1.0 - eps);
  if (target.regularity_) {
    TargetRegularity r = *target.regularity_;
    r.gamma *= 1.0 - eps;
    r.xi = (1.0 - eps) * r.xi + eps;
    if (r.zeta) *r.zeta = (1.0 - eps) * *r.zeta + eps;
    out.regularity_ = r;
  } else {
    out.regularity_.reset();
  }
  return out;
}

Samples sample_ground_truth(const TargetSpec& target, std::size_t n,
                            std::uint64_t seed, unsigned threads) {
  const GroundTruthSampler* sampler = target.ground_truth();
  if (!sampler) {
    throw UnsupportedError("target '" + target.name() +
                           "' declares no ground-truth sampler");
  }
  Samples out(n, target.dim());
  parallel_for(n, threads, [&](std::size_t i) {
    Stream stream(seed, StreamRole::kGroundTruth, 0,
                  static_cast<std::uint32_t>(i));
    sampler->draw(stream, out.row(i));
  });
  return out;
}

}  // namespace sfs
