#pragma once

// Aitchison geometry on the simplex: closure, centered log-ratio transform,
// distances and the perturbation operation. Pure numerical functions, no
// knowledge of what the parts mean. All arithmetic is double precision.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "agecoda/errors.hpp"

namespace agecoda {

/// Relative tolerance on the constant-sum constraint of a Composition.
inline constexpr double kClosureTolerance = 1e-9;

/// Hard validity bound for clr coordinates: |sum| must not exceed this
/// times the dimension, otherwise the vector is not a centered log-ratio
/// image of anything and NotCentered is thrown.
inline constexpr double kCenteringTolerance = 1e-6;

/// A point of the simplex: D strictly positive parts summing to the closure
/// constant k (1 for ratios, 100 for percentages). Parts carry only relative
/// information; all operations below are invariant to the choice of k.
class Composition {
 public:
  Composition(std::vector<double> parts, double k) : parts_(std::move(parts)), k_(k) {
    if (parts_.size() < 2) {
      throw EmptyVector("composition needs at least 2 parts, got " + std::to_string(parts_.size()));
    }
    if (!(k_ > 0.0)) {
      throw ConfigError("closure constant must be positive");
    }
    double sum = 0.0;
    for (std::size_t d = 0; d < parts_.size(); ++d) {
      if (!(parts_[d] > 0.0)) {
        throw NonPositivePart("part " + std::to_string(d) + " is not strictly positive");
      }
      sum += parts_[d];
    }
    if (std::abs(sum - k_) > kClosureTolerance * k_) {
      throw Error("parts sum to " + std::to_string(sum) + ", expected closure constant " +
                  std::to_string(k_));
    }
  }

  const std::vector<double>& parts() const noexcept { return parts_; }
  double k() const noexcept { return k_; }
  std::size_t dimension() const noexcept { return parts_.size(); }
  double operator[](std::size_t d) const { return parts_[d]; }

  /// Same point of the simplex expressed with a different closure constant.
  Composition reclosed(double new_k) const {
    if (!(new_k > 0.0)) throw ConfigError("closure constant must be positive");
    std::vector<double> scaled(parts_);
    const double factor = new_k / k_;
    for (double& p : scaled) p *= factor;
    return Composition(std::move(scaled), new_k);
  }

 private:
  std::vector<double> parts_;
  double k_;
};

/// Image of a composition under clr: D real coordinates summing to zero.
/// Coordinates produced by clr() sum to zero within 1e-9 * D; construction
/// rejects anything further off than kCenteringTolerance * D.
class ClrVector {
 public:
  explicit ClrVector(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) {
      throw EmptyVector("clr vector needs at least 2 coordinates");
    }
    const double sum = std::accumulate(coords_.begin(), coords_.end(), 0.0);
    if (std::abs(sum) > kCenteringTolerance * static_cast<double>(coords_.size())) {
      throw NotCentered("clr coordinates sum to " + std::to_string(sum) + ", expected 0");
    }
  }

  const std::vector<double>& coords() const noexcept { return coords_; }
  std::size_t dimension() const noexcept { return coords_.size(); }
  double operator[](std::size_t d) const { return coords_[d]; }

 private:
  std::vector<double> coords_;
};

/// Closure: rescale a positive vector so its parts sum to k.
inline Composition closure(std::span<const double> values, double k) {
  if (values.size() < 2) {
    throw EmptyVector("closure needs at least 2 parts, got " + std::to_string(values.size()));
  }
  if (!(k > 0.0)) throw ConfigError("closure constant must be positive");
  double sum = 0.0;
  for (std::size_t d = 0; d < values.size(); ++d) {
    if (!(values[d] > 0.0)) {
      throw NonPositivePart("part " + std::to_string(d) + " is not strictly positive");
    }
    sum += values[d];
  }
  std::vector<double> parts(values.begin(), values.end());
  const double factor = k / sum;
  for (double& p : parts) p *= factor;
  return Composition(std::move(parts), k);
}

/// Multiplicative zero replacement. Zeros become delta and the positive
/// parts shrink by the common factor (1 - z*delta/sum), so the vector sum is
/// preserved. Input must be nonnegative with at least one positive entry.
inline std::vector<double> zero_replace(std::span<const double> values, double delta) {
  if (!(delta > 0.0)) throw ConfigError("zero replacement delta must be positive");
  double sum = 0.0;
  std::size_t zeros = 0;
  for (std::size_t d = 0; d < values.size(); ++d) {
    if (values[d] < 0.0) {
      throw NonPositivePart("part " + std::to_string(d) + " is negative");
    }
    if (values[d] == 0.0) {
      ++zeros;
    }
    sum += values[d];
  }
  if (sum == 0.0 || zeros == values.size()) {
    throw AllZero("every part is zero");
  }
  std::vector<double> out(values.begin(), values.end());
  if (zeros == 0) return out;
  const double factor = 1.0 - static_cast<double>(zeros) * delta / sum;
  if (!(factor > 0.0)) {
    throw NonPositivePart("delta " + std::to_string(delta) +
                          " too large for vector sum " + std::to_string(sum));
  }
  for (double& v : out) {
    v = (v == 0.0) ? delta : v * factor;
  }
  return out;
}

/// Geometric mean of the parts, computed in log space.
inline double geometric_mean(const Composition& x) {
  double log_sum = 0.0;
  for (double p : x.parts()) log_sum += std::log(p);
  return std::exp(log_sum / static_cast<double>(x.dimension()));
}

/// Centered log-ratio transform: coordinate d is ln(x_d / g(x)), with g the
/// geometric mean. Computed as log minus mean-log, which is exactly invariant
/// to rescaling of the parts.
inline ClrVector clr(const Composition& x) {
  std::vector<double> coords(x.dimension());
  double mean_log = 0.0;
  for (std::size_t d = 0; d < x.dimension(); ++d) {
    coords[d] = std::log(x[d]);
    mean_log += coords[d];
  }
  mean_log /= static_cast<double>(x.dimension());
  for (double& c : coords) c -= mean_log;
  return ClrVector(std::move(coords));
}

/// Inverse clr: exponentiate and close to k. clr(clr_inverse(z)) == z within
/// 1e-9 per coordinate.
inline Composition clr_inverse(const ClrVector& z, double k) {
  std::vector<double> parts(z.dimension());
  for (std::size_t d = 0; d < z.dimension(); ++d) parts[d] = std::exp(z[d]);
  return closure(parts, k);
}

inline void require_same_dimension(const Composition& x, const Composition& y) {
  if (x.dimension() != y.dimension()) {
    throw DimensionMismatch("dimension mismatch: " + std::to_string(x.dimension()) + " vs " +
                            std::to_string(y.dimension()));
  }
}

/// Aitchison distance: Euclidean distance between the clr images. The natural
/// metric of the simplex, invariant to the closure constant and to common
/// perturbation. Identical inputs give exactly 0.
inline double aitchison_distance(const Composition& x, const Composition& y) {
  require_same_dimension(x, y);
  const ClrVector cx = clr(x);
  const ClrVector cy = clr(y);
  double sq = 0.0;
  for (std::size_t d = 0; d < cx.dimension(); ++d) {
    const double diff = cx[d] - cy[d];
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

/// Aitchison distance through the single-log-ratio form,
/// sqrt(sum_d ln(x_d * g(y) / (y_d * g(x)))^2). Algebraically equal to
/// aitchison_distance; kept as an independent route for cross-checking.
inline double aitchison_distance_logratio(const Composition& x, const Composition& y) {
  require_same_dimension(x, y);
  const double gx = geometric_mean(x);
  const double gy = geometric_mean(y);
  double sq = 0.0;
  for (std::size_t d = 0; d < x.dimension(); ++d) {
    const double r = std::log((x[d] * gy) / (y[d] * gx));
    sq += r * r;
  }
  return std::sqrt(sq);
}

/// Plain Euclidean distance between the parts, both sides re-closed to
/// percent shares first so the comparison is share against share. Unlike the
/// Aitchison distance this is not perturbation invariant.
inline double euclidean_distance(const Composition& x, const Composition& y) {
  require_same_dimension(x, y);
  const Composition xs = x.reclosed(100.0);
  const Composition ys = y.reclosed(100.0);
  double sq = 0.0;
  for (std::size_t d = 0; d < xs.dimension(); ++d) {
    const double diff = xs[d] - ys[d];
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

/// Perturbation, the group operation of the simplex: componentwise product
/// followed by closure to the constant of x. The uniform composition is the
/// neutral element.
inline Composition perturbation(const Composition& p, const Composition& x) {
  require_same_dimension(p, x);
  std::vector<double> prod(x.dimension());
  for (std::size_t d = 0; d < x.dimension(); ++d) prod[d] = p[d] * x[d];
  return closure(prod, x.k());
}

}  // namespace agecoda
