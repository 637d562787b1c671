#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "htf/checks.hpp"

namespace htf {

class UnsupportedBackendError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bound formulas outside their domain, or a curvature bound the model does not satisfy.
class InvalidBoundsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------- sub-Laplacian

/// Delta_H f = sum_j F_j F_j f - (sum_j nabla_{F_j} F_j) f over the model's
/// horizontal Parseval frame. Exact at points of the chart.
inline Polynomial sub_laplacian(const FoliationModel& model, const Polynomial& f) {
  if (f.dim() != model.N) throw DimensionError("sub_laplacian: polynomial dimension mismatch");
  const auto r = realize(model);
  Polynomial out(model.N);
  PolyField drift = zero_field_like(r.horizontal.front());
  for (const auto& F : r.horizontal) {
    out += directional_derivative(F, directional_derivative(F, f));
    drift += bott(r, F, F);
  }
  return out - directional_derivative(drift, f);
}

/// Sphere form: Delta_round f - sum_a Z_a Z_a f with round-unit Killing fields Z_a,
/// where Delta_round f = Delta f - sum x_i x_j d_ij f - (N-1) x.grad f on the sphere.
inline Polynomial sphere_sub_laplacian(const FoliationModel& model, const Polynomial& f) {
  if (model.backend != Backend::sphere) throw UnsupportedBackendError("sphere_sub_laplacian needs a sphere model");
  if (f.dim() != model.N) throw DimensionError("sphere_sub_laplacian: polynomial dimension mismatch");
  const std::size_t N = model.N;
  const PolyField x = position_field(N);
  Polynomial out(N);
  Polynomial radial(N);
  for (std::size_t i = 0; i < N; ++i) {
    const Polynomial di = f.derivative(i);
    out += di.derivative(i);
    radial += x[i] * di;
  }
  // sum x_i x_j d_ij f = E(E f) - E f with E the Euler field
  const Polynomial second = directional_derivative(x, radial) - radial;
  out -= second;
  out -= double(N - 1) * radial;
  for (const auto& z : model.vertical_fields) out -= directional_derivative(z, directional_derivative(z, f));
  return out;
}

inline double sub_laplacian_apply(const FoliationModel& model, const Polynomial& f, const Point& p) {
  if (p.size() != model.N) throw DimensionError("sub_laplacian_apply: point dimension mismatch");
  if (model.backend == Backend::sphere) {
    double norm2 = 0.0;
    for (double v : p) norm2 += v * v;
    if (std::abs(norm2 - 1.0) > 1e-12) throw std::invalid_argument("sub_laplacian_apply: point is off the sphere");
  }
  return sub_laplacian(model, f)(p);
}

/// Gamma(f) = |grad_H f|^2 as a polynomial (exact on the chart).
inline Polynomial carre_du_champ(const FoliationModel& model, const Polynomial& f) {
  Polynomial out(model.N);
  for (const auto& F : model.horizontal_spanning_fields) {
    const Polynomial d = directional_derivative(F, f);
    out += d * d;
  }
  return out;
}

// ---------------------------------------------------------------- spectrum

struct SpectrumResult {
  std::string model;
  int degree = 0;
  std::vector<double> eigenvalues;
  double gram_condition = 1.0;
  double asymmetry = 0.0;
  std::size_t basis_size = 0;
  std::size_t rank = 0;
  /// Eigenfunctions as polynomials, aligned with eigenvalues.
  std::vector<Polynomial> eigenfunctions;
};

/// Smallest eigenvalue above tol (0 when there is none).
inline double first_nonzero(const std::vector<double>& eigenvalues, double tol = 1e-8) {
  for (double v : eigenvalues)
    if (v > tol) return v;
  return 0.0;
}

inline SpectrumResult rayleigh_ritz(const FoliationModel& model, int degree, double rank_tol = 1e-10) {
  if (model.backend != Backend::sphere) throw UnsupportedBackendError("rayleigh_ritz needs a compact (sphere) model");
  if (degree < 0) throw std::invalid_argument("rayleigh_ritz: degree must be >= 0");
  const std::size_t N = model.N;
  const auto monos = monomials_up_to(N, degree);
  const auto k = static_cast<Eigen::Index>(monos.size());
  std::vector<Polynomial> basis, lap;
  for (const auto& e : monos) {
    basis.push_back(Polynomial::monomial(e));
    lap.push_back(sphere_sub_laplacian(model, basis.back()));
  }
  SphereIntegrator integ(N);
  Eigen::MatrixXd A(k, k), B(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      A(i, j) = -integ.integrate_product(basis[i], lap[j]);
      if (j >= i) B(i, j) = B(j, i) = integ.integrate_product(basis[i], basis[j]);
    }
  SpectrumResult out;
  out.model = model.name;
  out.degree = degree;
  out.basis_size = monos.size();
  out.asymmetry = (A - A.transpose()).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd As = 0.5 * (A + A.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(B);
  const double bmax = eb.eigenvalues().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < k; ++i)
    if (eb.eigenvalues()(i) > rank_tol * bmax) keep.push_back(i);
  if (keep.empty()) throw std::runtime_error("rayleigh_ritz: Gram matrix is numerically zero");
  Eigen::MatrixXd C(k, static_cast<Eigen::Index>(keep.size()));
  double bmin = bmax;
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const double lam = eb.eigenvalues()(keep[c]);
    bmin = std::min(bmin, lam);
    C.col(static_cast<Eigen::Index>(c)) = eb.eigenvectors().col(keep[c]) / std::sqrt(lam);
  }
  out.rank = keep.size();
  out.gram_condition = bmax / bmin;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(C.transpose() * As * C);
  for (Eigen::Index i = 0; i < ea.eigenvalues().size(); ++i) {
    out.eigenvalues.push_back(ea.eigenvalues()(i));
    const Eigen::VectorXd coeff = C * ea.eigenvectors().col(i);
    Polynomial f(N);
    for (Eigen::Index j = 0; j < k; ++j)
      if (coeff(j) != 0.0) f += coeff(j) * basis[j];
    out.eigenfunctions.push_back(std::move(f));
  }
  return out;
}

inline nlohmann::json to_json(const SpectrumResult& s) {
  return {{"model", s.model},
          {"degree", s.degree},
          {"eigenvalues", s.eigenvalues},
          {"lambda1", first_nonzero(s.eigenvalues)},
          {"gram_condition", s.gram_condition},
          {"asymmetry", s.asymmetry},
          {"basis_size", s.basis_size},
          {"rank", s.rank}};
}

/// CSV with columns degree,eigenvalue.
inline std::string to_csv(const SpectrumResult& s) {
  std::string out = "degree,eigenvalue\n";
  char buf[64];
  for (double v : s.eigenvalues) {
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", s.degree, v);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------- bounds

struct BoundsResult {
  std::size_t n = 0, m = 0;
  std::optional<double> K, kappa;
  bool quaternionic = false;
  double diameter_bound = 0.0;
  double lambda1_bound = 0.0;
  std::string formula_used;
};

inline BoundsResult bounds_general(std::size_t n, std::size_t m, double K) {
  if (!(K > 0.0)) throw InvalidBoundsError("bounds_general requires K > 0");
  if (n == 0) throw InvalidBoundsError("bounds_general requires n >= 1");
  const double nn = double(n), mm = double(m);
  BoundsResult b;
  b.n = n;
  b.m = m;
  b.K = K;
  b.diameter_bound = 2.0 * std::sqrt(3.0) * std::numbers::pi * std::sqrt((nn + 4 * mm) * (nn + 6 * mm) / (nn * K));
  b.lambda1_bound = nn * K / (nn + 3 * mm - 1);
  b.formula_used = "general";
  return b;
}

inline BoundsResult bounds_clifford(std::size_t n, std::size_t m, double kappa, bool quaternionic) {
  if (!(kappa > 0.0)) throw InvalidBoundsError("bounds_clifford requires kappa > 0");
  if (m < 2) throw InvalidBoundsError("bounds_clifford requires m >= 2");
  if (n == 0) throw InvalidBoundsError("bounds_clifford requires n >= 1");
  if (quaternionic && m != 3) throw InvalidBoundsError("quaternionic bounds require m = 3");
  const double nn = double(n), mm = double(m), pi = std::numbers::pi;
  BoundsResult b;
  b.n = n;
  b.m = m;
  b.kappa = kappa;
  b.quaternionic = quaternionic;
  if (quaternionic) {
    b.lambda1_bound = nn * kappa / 2.0;
    b.diameter_bound = 2.0 * std::sqrt(6.0) * (pi / std::sqrt(kappa)) * std::sqrt((nn + 12) * (nn + 18) / (nn * (nn + 8)));
    b.formula_used = "clifford-quaternionic";
  } else {
    b.lambda1_bound = (kappa / 4.0) * nn * (nn + 8 * (mm - 1)) / (nn + 3 * mm - 1);
    b.diameter_bound = 4.0 * std::sqrt(3.0) * (pi / std::sqrt(kappa)) *
                       std::sqrt((nn + 4 * mm) * (nn + 6 * mm) / (nn * (nn + 8 * (mm - 1))));
    b.formula_used = "clifford";
  }
  return b;
}

inline nlohmann::json to_json(const BoundsResult& b) {
  nlohmann::json j = {{"n", b.n},
                      {"m", b.m},
                      {"quaternionic", b.quaternionic},
                      {"diameter_bound", b.diameter_bound},
                      {"lambda1_bound", b.lambda1_bound},
                      {"formula_used", b.formula_used}};
  j["K"] = b.K ? nlohmann::json(*b.K) : nlohmann::json(nullptr);
  j["kappa"] = b.kappa ? nlohmann::json(*b.kappa) : nlohmann::json(nullptr);
  return j;
}

// ---------------------------------------------------------------- Gamma calculus

struct GammaValues {
  double gamma = 0.0, gamma_v = 0.0, gamma2 = 0.0, gamma2_v = 0.0, delta_f = 0.0;
};

/// Bakry-Emery quantities at one point, on jets of order 3 around it. Uses the
/// horizontal Parseval frame and the vertical fields scaled to g-unit length; the
/// vertical fields are assumed g0-orthonormal near the point (true for all models
/// built here).
class GammaCalculus {
 public:
  GammaCalculus(const FoliationModel& model, const Point& p) : model_(&model), p_(p), r_(realize(model, p, 3)) {
    drift_ = zero_field_like(r_.horizontal.front());
    for (const auto& F : r_.horizontal) drift_ += bott(r_, F, F);
    const double s = std::sqrt(model.epsilon);
    for (const auto& z : r_.vertical) vertical_.push_back(s * z);
  }

  Jet jet(const Polynomial& f) const { return taylor_jet(f, p_, r_.zero.space_ptr()); }

  Jet laplacian(const Jet& h) const {
    Jet out = directional_derivative(drift_, h) * -1.0;
    for (const auto& F : r_.horizontal) out += directional_derivative(F, directional_derivative(F, h));
    return out;
  }

  Jet gamma(const Jet& f, const Jet& g, bool vertical) const {
    const auto& frame = vertical ? vertical_ : r_.horizontal;
    Jet out = directional_derivative(frame[0], f) * directional_derivative(frame[0], g);
    for (std::size_t j = 1; j < frame.size(); ++j) out += directional_derivative(frame[j], f) * directional_derivative(frame[j], g);
    return out;
  }

  GammaValues values(const Polynomial& f) const {
    const Jet fj = jet(f);
    const Jet lf = laplacian(fj);
    const Jet gh = gamma(fj, fj, false), gv = gamma(fj, fj, true);
    GammaValues v;
    v.gamma = gh.value();
    v.gamma_v = gv.value();
    v.delta_f = lf.value();
    v.gamma2 = 0.5 * laplacian(gh).value() - gamma(fj, lf, false).value();
    v.gamma2_v = 0.5 * laplacian(gv).value() - gamma(fj, lf, true).value();
    return v;
  }

 private:
  const FoliationModel* model_;
  Point p_;
  Realization<Jet> r_;
  JetField drift_;
  std::vector<JetField> vertical_;
};

inline GammaValues gamma_calculus(const FoliationModel& model, const Polynomial& f, const Point& p) {
  return GammaCalculus(model, p).values(f);
}

/// Polynomials of degree <= max_degree with every coefficient uniform in [-1, 1].
inline std::vector<Polynomial> random_polynomials(std::size_t dim, std::size_t count, int max_degree, std::uint64_t seed) {
  PointSampler rng(seed);
  const auto monos = monomials_up_to(dim, max_degree);
  std::vector<Polynomial> out;
  for (std::size_t c = 0; c < count; ++c) {
    Polynomial f(dim);
    for (const auto& e : monos) f.add_term(e, rng.symmetric());
    out.push_back(std::move(f));
  }
  return out;
}

/// Gamma_2 + nu Gamma_2^V - [(1/n)(Delta_H f)^2 + (K - m/nu) Gamma + (n/4) Gamma^V] >= 0.
inline CheckReport check_cd_inequality(const FoliationModel& model, double K, const std::vector<Polynomial>& fs,
                                       const std::vector<double>& nus, const std::vector<Point>& points,
                                       double tol = 1e-9) {
  for (double nu : nus)
    if (!(nu > 0.0)) throw std::invalid_argument("cd: epsilon values must be positive");
  Sample s(model, points);
  const double ric_min = min_ricci(s);
  if (K > ric_min + 1e-8) throw InvalidBoundsError("cd: K exceeds the measured horizontal Ricci lower bound");
  const double n = double(model.n), m = double(model.m);
  double worst = INFINITY;
  for (const auto& p : points) {
    GammaCalculus gc(model, p);
    for (const auto& f : fs) {
      const GammaValues v = gc.values(f);
      for (double nu : nus) {
        const double lhs = v.gamma2 + nu * v.gamma2_v;
        const double rhs = v.delta_f * v.delta_f / n + (K - m / nu) * v.gamma + (n / 4.0) * v.gamma_v;
        worst = std::min(worst, lhs - rhs);
      }
    }
  }
  CheckReport r = make_report("cd", std::max(0.0, -worst), tol, points.size(),
                              {{"K", K}, {"ricci_min", ric_min}, {"min_margin", worst}, {"functions", fs.size()}, {"epsilons", nus}});
  return r;
}

}  // namespace htf
