#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "htf/field.hpp"

namespace htf {

/// Ambient chart: flat R^N or the unit sphere S^{N-1} inside R^N.
struct AmbientChart {
  enum class Kind { euclidean, unit_sphere };
  Kind kind = Kind::euclidean;
  std::size_t N = 0;

  AmbientChart() = default;
  AmbientChart(Kind k, std::size_t dim) : kind(k), N(dim) {
    if (k == Kind::unit_sphere && dim < 2) throw std::invalid_argument("unit sphere chart requires N >= 2");
  }
};

/// Tangential projection W - x <x, W> onto T S^{N-1}. Uses |x|^2 = 1, so it is
/// exact at on-sphere points only.
template <class S>
VectorField<S> sphere_tangent_projection(const VectorField<S>& position, const VectorField<S>& w) {
  const S radial = dot(position, w);
  return w - radial * position;
}

/// Levi-Civita derivative nabla_X Y of the flat metric or of the round metric
/// (ambient derivative followed by tangential projection).
template <class S>
VectorField<S> levi_civita(const AmbientChart& chart, const VectorField<S>& position, const VectorField<S>& x,
                           const VectorField<S>& y) {
  if (x.size() != chart.N || y.size() != chart.N) throw DimensionError("levi_civita dimension mismatch");
  VectorField<S> d = directional_derivative(x, y);
  switch (chart.kind) {
    case AmbientChart::Kind::euclidean:
      return d;
    case AmbientChart::Kind::unit_sphere:
      return sphere_tangent_projection(position, d);
  }
  throw std::invalid_argument("unsupported chart kind");
}

inline PolyField levi_civita(const AmbientChart& chart, const PolyField& x, const PolyField& y) {
  return levi_civita(chart, position_field(chart.N), x, y);
}

class DegenerateFrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Classical Gram-Schmidt against the symmetric positive form `metric`.
/// Input vectors are columns; throws when a residual norm drops below `tol`.
inline Eigen::MatrixXd gram_schmidt_at(const Eigen::MatrixXd& vectors, const Eigen::MatrixXd& metric, double tol = 1e-10) {
  Eigen::MatrixXd out(vectors.rows(), vectors.cols());
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    Eigen::VectorXd v = vectors.col(k);
    for (Eigen::Index j = 0; j < k; ++j) v -= (out.col(j).dot(metric * v)) * out.col(j);
    const double norm = std::sqrt(std::max(0.0, v.dot(metric * v)));
    if (norm < tol) throw DegenerateFrameError("gram_schmidt_at: vectors are linearly dependent within tolerance");
    out.col(k) = v / norm;
  }
  return out;
}

inline Eigen::MatrixXd gram_schmidt_at(const Eigen::MatrixXd& vectors, double tol = 1e-10) {
  return gram_schmidt_at(vectors, Eigen::MatrixXd::Identity(vectors.rows(), vectors.rows()), tol);
}

/// Normalized moment (1/|S^{N-1}|) int x^alpha dsigma over the unit sphere.
///
/// For even alpha this is prod_i (alpha_i - 1)!! / prod_{j < |alpha|/2} (N + 2j),
/// the Gamma-function product formula written without Gamma calls.
inline double sphere_moment(std::size_t N, const Exponents& alpha) {
  if (alpha.size() != N) throw DimensionError("sphere_moment dimension mismatch");
  int half = 0;
  double num = 1.0;
  for (auto a : alpha) {
    if (a % 2) return 0.0;
    for (int k = a - 1; k > 0; k -= 2) num *= k;
    half += a / 2;
  }
  double den = 1.0;
  for (int j = 0; j < half; ++j) den *= static_cast<double>(N + 2 * j);
  return num / den;
}

/// Exact normalized integral of a polynomial over the unit sphere.
class SphereIntegrator {
 public:
  explicit SphereIntegrator(std::size_t N) : N_(N) {}

  double moment(const Exponents& alpha) const {
    auto it = cache_.find(alpha);
    if (it != cache_.end()) return it->second;
    const double v = sphere_moment(N_, alpha);
    cache_.emplace(alpha, v);
    return v;
  }

  double integrate(const Polynomial& p) const {
    double s = 0.0;
    for (const auto& [e, c] : p.terms()) s += c * moment(e);
    return s;
  }

  /// int f g without materializing the product.
  double integrate_product(const Polynomial& f, const Polynomial& g) const {
    double s = 0.0;
    Exponents e(N_);
    for (const auto& [ea, ca] : f.terms())
      for (const auto& [eb, cb] : g.terms()) {
        for (std::size_t i = 0; i < N_; ++i) e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
        s += ca * cb * moment(e);
      }
    return s;
  }

 private:
  std::size_t N_;
  mutable std::map<Exponents, double> cache_;
};

/// Deterministic point sampler. Uses the fully specified mt19937_64 engine and
/// explicit conversions so output is bit-identical across platforms.
class PointSampler {
 public:
  explicit PointSampler(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double symmetric() { return 2.0 * uniform() - 1.0; }
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

using Point = std::vector<double>;

inline std::vector<Point> sample_points(const AmbientChart& chart, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("sample_points: count must be >= 1");
  PointSampler rng(seed);
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Point p(chart.N);
    if (chart.kind == AmbientChart::Kind::euclidean) {
      for (auto& v : p) v = rng.symmetric();
    } else {
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (auto& v : p) {
          v = rng.normal();
          norm2 += v * v;
        }
      } while (norm2 < 1e-8);
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& v : p) v *= inv;
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace htf
