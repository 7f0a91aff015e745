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

#ifndef SFS_TARGET_HPP_
#define SFS_TARGET_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfs/rng.hpp"

namespace sfs {

using Vector = std::vector<double>;

// Row-major n x p block of points.
struct Samples {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  Samples() = default;
  Samples(std::size_t rows, std::size_t cols)
      : n(rows), dim(cols), values(rows * cols, 0.0) {}

  std::span<double> row(std::size_t i) {
    return {values.data() + i * dim, dim};
  }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * dim, dim};
  }
  // Coordinate `c` of every row.
  Vector column(std::size_t c) const;
};

enum class TargetForm {
  kDensityRatio,  // log f known exactly
  kPotential,     // log f known up to an additive constant
};

// Equal-covariance (identity) Gaussian location mixture. Its density ratio
// against N(0, I) is f(x) = sum_i w_i exp(m_i.x - |m_i|^2 / 2).
struct GaussianMixture {
  std::vector<double> weights;
  std::vector<Vector> means;

  std::size_t dim() const { return means.empty() ? 0 : means.front().size(); }
  std::size_t size() const { return weights.size(); }

  // Throws DomainError unless weights are nonnegative, sum to 1 within
  // 1e-12 and every mean has the same positive dimension.
  void validate() const;
};

// Declared regularity: f and grad f are gamma-Lipschitz, xi <= f <= zeta.
struct TargetRegularity {
  double gamma = 0.0;
  double xi = 0.0;
  std::optional<double> zeta;

  void validate() const;
  // sup |b| <= gamma / xi.
  double drift_bound() const { return gamma / xi; }
  // sup_k E|Y_k|^2 <= 6 gamma^2 / xi^2 + 3p.
  double second_moment_bound(std::size_t dim) const;
};

// log f (possibly up to a constant) and its gradient.
class DensityRatioModel {
 public:
  virtual ~DensityRatioModel() = default;

  virtual std::size_t dim() const = 0;
  virtual double log_ratio(std::span<const double> x) const = 0;
  // Writes grad log f into `grad` and returns log f. Where log f = -inf
  // the gradient is reported as zero.
  virtual double log_ratio_grad(std::span<const double> x,
                                std::span<double> grad) const = 0;
  virtual bool has_gradient() const { return true; }
};

class GroundTruthSampler {
 public:
  virtual ~GroundTruthSampler() = default;
  virtual void draw(Stream& stream, std::span<double> out) const = 0;
};

struct Moments {
  Vector mean;
  Vector variance;  // per coordinate
};

using ScalarField = std::function<double(std::span<const double>)>;
using VectorField = std::function<void(std::span<const double>, std::span<double>)>;

// log f at a point. `relative` is set for potential-form targets, whose
// value is only defined up to the unknown normalizing constant.
struct LogRatioValue {
  double value;
  bool relative;
};

// A target distribution mu described through f = dmu/dG, G = N(0, I_p).
// Immutable once built and safe to share between threads.
class TargetSpec {
 public:
  static TargetSpec standard_gaussian(std::size_t dim);
  static TargetSpec gaussian(Vector mean);
  static TargetSpec mixture(GaussianMixture mix);
  // mu with density proportional to (1 - |x|^2/r^2)^2 on the ball of
  // radius r. Compactly supported, so f vanishes outside the ball.
  static TargetSpec bump(std::size_t dim, double radius = 1.0);

  // Potential form: mu(dx) proportional to exp(-V(x)) dx.
  static TargetSpec potential(std::size_t dim, ScalarField potential,
                              VectorField potential_grad);
  // N(mean, sigma^2 I) given only through its potential.
  static TargetSpec gaussian_potential(Vector mean, double sigma);
  // Gaussian mixture given only through its (unnormalized) potential.
  static TargetSpec mixture_potential(GaussianMixture mix);

  std::size_t dim() const { return dim_; }
  TargetForm form() const { return form_; }
  const std::string& name() const { return name_; }
  const std::optional<GaussianMixture>& mixture() const { return mixture_; }
  const std::optional<TargetRegularity>& regularity() const {
    return regularity_;
  }
  const std::optional<Moments>& moments() const { return moments_; }
  bool has_ground_truth() const { return static_cast<bool>(ground_truth_); }
  bool has_gradient() const { return model_->has_gradient(); }
  // Regularization weight applied so far, 0 if none.
  double epsilon() const { return epsilon_; }

  // Additive shift of log f, i.e. f is replaced by C f with C = exp(shift).
  // The drift does not depend on it.
  double log_scale() const { return log_scale_; }
  TargetSpec with_log_scale(double shift) const;
  TargetSpec with_regularity(TargetRegularity regularity) const;
  TargetSpec with_name(std::string name) const;

  // Canonical one-line description, used for digests and reports.
  std::string describe() const;

  const DensityRatioModel& model() const { return *model_; }
  const GroundTruthSampler* ground_truth() const { return ground_truth_.get(); }

 private:
  friend TargetSpec regularize(const TargetSpec& target, double eps);

  TargetSpec() = default;

  std::size_t dim_ = 0;
  TargetForm form_ = TargetForm::kDensityRatio;
  std::string name_;
  std::shared_ptr<const DensityRatioModel> model_;
  std::shared_ptr<const GroundTruthSampler> ground_truth_;
  std::optional<GaussianMixture> mixture_;
  std::optional<TargetRegularity> regularity_;
  std::optional<Moments> moments_;
  double log_scale_ = 0.0;
  double epsilon_ = 0.0;
};

LogRatioValue eval_log_f(const TargetSpec& target, std::span<const double> x);

Vector eval_grad_log_f(const TargetSpec& target, std::span<const double> x);

// f_eps = (1 - eps) f + eps, the density ratio of (1 - eps) mu + eps G.
// A mixture stays a mixture (G is the zero-mean component).
TargetSpec regularize(const TargetSpec& target, double eps);

// n i.i.d. draws from mu. Row i uses its own stream, so the batch does
// not depend on how it is generated.
Samples sample_ground_truth(const TargetSpec& target, std::size_t n,
                            std::uint64_t seed, unsigned threads = 1);

// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

}  // namespace sfs

#endif  // SFS_TARGET_HPP_
