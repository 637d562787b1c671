#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "htf/engine.hpp"

namespace htf {

struct CheckReport {
  std::string check;
  bool pass = false;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::size_t points = 0;
  nlohmann::json details = nlohmann::json::object();
};

inline CheckReport make_report(std::string name, double residual, double tol, std::size_t points,
                               nlohmann::json details = nlohmann::json::object()) {
  CheckReport r;
  r.check = std::move(name);
  r.max_residual = residual;
  r.tolerance = tol;
  r.pass = std::isfinite(residual) && residual <= tol;
  r.points = points;
  r.details = std::move(details);
  return r;
}

inline nlohmann::json to_json(const CheckReport& r) {
  return {{"check", r.check},           {"status", r.pass ? "pass" : "fail"}, {"max_residual", r.max_residual},
          {"tolerance", r.tolerance}, {"points", r.points},                {"details", r.details}};
}

struct Tolerances {
  double curvature = 1e-9;
  double algebraic = 1e-12;
  double kappa = 1e-8;
};

class NotNormalizableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model plus sample points, with the per-point tensor caches built on demand.
class Sample {
 public:
  Sample(const FoliationModel& model, std::vector<Point> points) : model_(&model), points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("sample needs at least one point");
    geo_.resize(points_.size());
  }
  Sample(const FoliationModel& model, std::size_t count, std::uint64_t seed)
      : Sample(model, sample_points(model.chart(), count, seed)) {}

  const FoliationModel& model() const { return *model_; }
  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  PointGeometry& at(std::size_t k) {
    if (!geo_[k]) geo_[k] = std::make_unique<PointGeometry>(*model_, points_[k]);
    return *geo_[k];
  }

 private:
  const FoliationModel* model_;
  std::vector<Point> points_;
  std::vector<std::unique_ptr<PointGeometry>> geo_;
};

// ---------------------------------------------------------------- axioms

/// Bundle-like (L_Z g = 0 on H x H) and totally geodesic (L_X g = 0 on V x V).
inline CheckReport check_foliation_axioms(Sample& s, double tol = 1e-9) {
  double bundle = 0.0, geodesic = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    PointGeometry* gp = nullptr;
    try {
      gp = &s.at(k);
    } catch (const DegenerateFrameError& e) {
      return make_report("axioms", INFINITY, tol, s.size(), {{"error", e.what()}});
    }
    auto& g = *gp;
    auto& calc = g.calculus();
    const std::size_t n = g.n(), d = g.d();
    // (L_V g)(A, B) = V g(A,B) - g([V,A],B) - g(A,[V,B]), frame g-orthonormal at the point
    auto lie = [&](std::size_t v, std::size_t a, std::size_t b) {
      return calc.gram_derivative(v, a, b).value() - calc.bracket_jets(v, a)[b].value() - calc.bracket_jets(v, b)[a].value();
    };
    for (std::size_t z = n; z < d; ++z)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) bundle = std::max(bundle, std::abs(lie(z, i, j)));
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t a = n; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) geodesic = std::max(geodesic, std::abs(lie(x, a, b)));
  }
  return make_report("axioms", std::max(bundle, geodesic), tol, s.size(),
                     {{"bundle_like_residual", bundle}, {"totally_geodesic_residual", geodesic}});
}

// ---------------------------------------------------------------- H-type

struct LambdaFit {
  double mean = 0.0, min = INFINITY, max = -INFINITY;
  double isotropy_residual = 0.0;
};

/// Fits <J_Z X, J_Z Y> = lambda |Z|^2 <X, Y> at every point.
inline LambdaFit fit_lambda(Sample& s) {
  LambdaFit fit;
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto& g = s.at(k);
    const std::size_t n = g.n(), m = g.m();
    std::vector<Eigen::MatrixXd> J;
    double lam = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      J.push_back(g.J(a));
      lam += (J.back().transpose() * J.back()).trace() / double(n);
    }
    lam /= double(m);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a; b < m; ++b) {
        Eigen::MatrixXd sym = 0.5 * (J[a].transpose() * J[b] + J[b].transpose() * J[a]);
        if (a == b) sym -= lam * I;
        fit.isotropy_residual = std::max(fit.isotropy_residual, sym.cwiseAbs().maxCoeff());
      }
    fit.min = std::min(fit.min, lam);
    fit.max = std::max(fit.max, lam);
    total += lam;
    ++count;
  }
  fit.mean = total / double(count);
  return fit;
}

inline CheckReport check_h_type(Sample& s, double tol = 1e-9) {
  const LambdaFit fit = fit_lambda(s);
  const double dev = std::max(std::abs(fit.max - 1.0), std::abs(fit.min - 1.0));
  return make_report("h-type", std::max(dev, fit.isotropy_residual), tol, s.size(),
                     {{"lambda", fit.mean},
                      {"lambda_min", fit.min},
                      {"lambda_max", fit.max},
                      {"isotropy_residual", fit.isotropy_residual}});
}

/// Rescales the vertical metric so that the lambda-H-type condition becomes H-type.
inline std::pair<FoliationModel, double> normalize_to_htype(const FoliationModel& model, std::size_t points = 8,
                                                            std::uint64_t seed = 42, double tol = 1e-9) {
  Sample s(model, points, seed);
  const LambdaFit fit = fit_lambda(s);
  if (!(fit.mean > 0.0) || fit.isotropy_residual > tol * std::max(1.0, fit.mean) ||
      fit.max - fit.min > tol * std::max(1.0, fit.mean))
    throw NotNormalizableError("model is not lambda-H-type for a constant lambda");
  return {canonical_variation(model, model.epsilon * fit.mean), fit.mean};
}

// ---------------------------------------------------------------- torsion

inline CheckReport check_yang_mills(Sample& s, double tol = 1e-9) {
  double res = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto& g = s.at(k);
    for (std::size_t a = 0; a < g.m(); ++a)
      for (std::size_t j = 0; j < g.n(); ++j) {
        double div = 0.0;
        for (std::size_t i = 0; i < g.n(); ++i) div += g.nabla_t(i, a, i, j);
        res = std::max(res, std::abs(div));
      }
  }
  return make_report("yang-mills", res, tol, s.size());
}

enum class TorsionClass { not_yang_mills, yang_mills_only, horizontally_parallel, completely_parallel };

inline std::string to_string(TorsionClass c) {
  switch (c) {
    case TorsionClass::completely_parallel:
      return "completely-parallel";
    case TorsionClass::horizontally_parallel:
      return "horizontally-parallel";
    case TorsionClass::yang_mills_only:
      return "yang-mills-only";
    case TorsionClass::not_yang_mills:
      return "not-yang-mills";
  }
  return "?";
}

inline std::string short_label(TorsionClass c) {
  switch (c) {
    case TorsionClass::completely_parallel:
      return "CP";
    case TorsionClass::horizontally_parallel:
      return "HP";
    case TorsionClass::yang_mills_only:
      return "YM";
    case TorsionClass::not_yang_mills:
      return "none";
  }
  return "?";
}

struct TorsionResiduals {
  double full = 0.0, horizontal = 0.0, yang_mills = 0.0;
};

inline TorsionResiduals torsion_residuals(Sample& s) {
  TorsionResiduals t;
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto& g = s.at(k);
    const std::size_t n = g.n(), m = g.m(), d = g.d();
    for (std::size_t e = 0; e < d; ++e)
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::abs(g.nabla_t(e, a, i, j));
            t.full = std::max(t.full, v);
            if (e < n) t.horizontal = std::max(t.horizontal, v);
          }
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t j = 0; j < n; ++j) {
        double div = 0.0;
        for (std::size_t i = 0; i < n; ++i) div += g.nabla_t(i, a, i, j);
        t.yang_mills = std::max(t.yang_mills, std::abs(div));
      }
  }
  return t;
}

inline TorsionClass classify(const TorsionResiduals& t, double tol) {
  if (t.full <= tol) return TorsionClass::completely_parallel;
  if (t.horizontal <= tol) return TorsionClass::horizontally_parallel;
  if (t.yang_mills <= tol) return TorsionClass::yang_mills_only;
  return TorsionClass::not_yang_mills;
}

/// Strongest class that holds. Passes when the class is at least `expected`
/// (Yang-Mills when no expectation is given).
inline CheckReport check_torsion_class(Sample& s, double tol = 1e-9, std::optional<TorsionClass> expected = {}) {
  const auto t = torsion_residuals(s);
  const TorsionClass c = classify(t, tol);
  const TorsionClass want = expected.value_or(TorsionClass::yang_mills_only);
  double res = t.yang_mills;
  if (want == TorsionClass::completely_parallel) res = t.full;
  if (want == TorsionClass::horizontally_parallel) res = t.horizontal;
  nlohmann::json details = {{"class", to_string(c)},
                            {"nabla_t_residual", t.full},
                            {"horizontal_nabla_t_residual", t.horizontal},
                            {"yang_mills_residual", t.yang_mills}};
  if (expected) details["expected"] = to_string(*expected);
  return make_report("torsion-class", res, tol, s.size(), details);
}

// ---------------------------------------------------------------- Clifford structure

struct PsiFit {
  double kappa = 0.0;
  double residual = 0.0;
  bool rank_deficient = false;
};

/// Fits (nabla_{Z_a} J)_{Z_b} = J_psi over psi in span{1, Z_c Z_d (c<d)} and
/// compares with psi = -kappa (Z_a Z_b + <Z_a, Z_b>) for one constant kappa.
inline PsiFit fit_psi(Sample& s) {
  PsiFit fit;
  const std::size_t m = s.model().m, n = s.model().n;
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t d = c + 1; d < m; ++d) pairs.emplace_back(int(c), int(d));
  const Eigen::Index cols = 1 + static_cast<Eigen::Index>(pairs.size());
  struct Coeffs {
    std::size_t a, b;
    Eigen::VectorXd c;
  };
  std::vector<Coeffs> all;
  double kappa_sum = 0.0;
  std::size_t kappa_count = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto& g = s.at(k);
    std::vector<Eigen::MatrixXd> J;
    for (std::size_t a = 0; a < m; ++a) J.push_back(g.J(a));
    Eigen::MatrixXd A(static_cast<Eigen::Index>(n * n), cols);
    A.col(0) = Eigen::Map<const Eigen::VectorXd>(Eigen::MatrixXd::Identity(n, n).eval().data(), n * n);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const Eigen::MatrixXd prod = J[pairs[p].first] * J[pairs[p].second];
      A.col(static_cast<Eigen::Index>(p) + 1) = Eigen::Map<const Eigen::VectorXd>(prod.data(), n * n);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) < 1e-8 * std::max(1.0, sv(0))) fit.rank_deficient = true;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        const Eigen::MatrixXd M = g.nabla_J(n + a, b);
        const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(M.data(), n * n);
        Eigen::VectorXd c = svd.solve(rhs);
        fit.residual = std::max(fit.residual, (A * c - rhs).cwiseAbs().maxCoeff());
        if (a != b) {
          const double sign = a < b ? 1.0 : -1.0;
          const auto it = std::find(pairs.begin(), pairs.end(), std::make_pair(int(std::min(a, b)), int(std::max(a, b))));
          kappa_sum += -sign * c(1 + (it - pairs.begin()));
          ++kappa_count;
        }
        all.push_back({a, b, std::move(c)});
      }
  }
  fit.kappa = kappa_count ? kappa_sum / double(kappa_count) : 0.0;
  for (const auto& e : all)
    for (Eigen::Index col = 0; col < cols; ++col) {
      double expected = 0.0;
      if (col > 0 && e.a != e.b) {
        const auto& pr = pairs[col - 1];
        if (std::size_t(pr.first) == std::min(e.a, e.b) && std::size_t(pr.second) == std::max(e.a, e.b))
          expected = (e.a < e.b ? -1.0 : 1.0) * fit.kappa;
      }
      fit.residual = std::max(fit.residual, std::abs(e.c(col) - expected));
    }
  return fit;
}

inline CheckReport check_parallel_clifford(Sample& s, double tol = 1e-9) {
  const LambdaFit lam = fit_lambda(s);
  if (std::max(std::abs(lam.max - 1.0), std::abs(lam.min - 1.0)) > tol || lam.isotropy_residual > tol)
    throw InvalidModelError("parallel Clifford check requires an H-type model");
  if (torsion_residuals(s).horizontal > tol)
    throw InvalidModelError("parallel Clifford check requires horizontally parallel torsion");
  const PsiFit fit = fit_psi(s);
  CheckReport r = make_report("parallel-clifford", fit.residual, tol, s.size(),
                              {{"kappa", fit.kappa}, {"rank_deficient", fit.rank_deficient}});
  if (fit.rank_deficient) r.pass = false;
  return r;
}

// ---------------------------------------------------------------- quaternionic type

struct QuaternionicReport {
  enum class Status { quaternionic, non_quaternionic, not_applicable } status = Status::not_applicable;
  int sigma_sign = 0;
  int plus_dim = 0, minus_dim = 0;
};

inline std::string to_string(QuaternionicReport::Status s) {
  switch (s) {
    case QuaternionicReport::Status::quaternionic:
      return "quaternionic";
    case QuaternionicReport::Status::non_quaternionic:
      return "non-quaternionic";
    case QuaternionicReport::Status::not_applicable:
      return "not-applicable";
  }
  return "?";
}

inline QuaternionicReport detect_quaternionic(PointGeometry& g, double tol = 1e-9) {
  QuaternionicReport q;
  if (g.m() != 3) return q;
  const Eigen::MatrixXd sigma = g.J(0) * g.J(1) * g.J(2);
  const Eigen::MatrixXd sym = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) (es.eigenvalues()(i) > 0 ? q.plus_dim : q.minus_dim)++;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(g.n(), g.n());
  if ((sigma - I).cwiseAbs().maxCoeff() <= tol) {
    q.status = QuaternionicReport::Status::quaternionic;
    q.sigma_sign = 1;
  } else if ((sigma + I).cwiseAbs().maxCoeff() <= tol) {
    q.status = QuaternionicReport::Status::quaternionic;
    q.sigma_sign = -1;
  } else {
    q.status = QuaternionicReport::Status::non_quaternionic;
  }
  return q;
}

inline QuaternionicReport detect_quaternionic(const FoliationModel& model, const Point& p, double tol = 1e-9) {
  PointGeometry g(model, p);
  return detect_quaternionic(g, tol);
}

// ---------------------------------------------------------------- horizontal Einstein

inline Eigen::MatrixXd predicted_ricci(PointGeometry& g, double kappa, std::string* formula = nullptr) {
  const std::size_t n = g.n(), m = g.m();
  if (m < 2) throw std::invalid_argument("horizontal Einstein prediction needs m >= 2");
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const double base = kappa * (double(n) / 4.0 + 2.0 * double(m - 1));
  if (m != 3) {
    if (formula) *formula = "kappa*(n/4+2(m-1))";
    return base * I;
  }
  const Eigen::MatrixXd sigma = g.J(0) * g.J(1) * g.J(2);
  if (formula) *formula = detect_quaternionic(g).status == QuaternionicReport::Status::quaternionic
                              ? "kappa*(n/2+4)"
                              : "kappa*(n/4+4)+(kappa/4)(dimH+ - dimH-)sigma";
  return base * I + (kappa / 4.0) * sigma.trace() * sigma;
}

inline CheckReport check_einstein(Sample& s, double kappa, double tol = 1e-8) {
  if (s.model().m < 2) throw std::invalid_argument("horizontal Einstein check is not applicable for m = 1");
  double res = 0.0, ric_min = INFINITY, ric_max = -INFINITY;
  std::string formula;
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto& g = s.at(k);
    const Eigen::MatrixXd ric = g.ricci_h();
    const Eigen::MatrixXd pred = predicted_ricci(g, kappa, &formula);
    res = std::max(res, (ric - pred).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (ric + ric.transpose()));
    ric_min = std::min(ric_min, es.eigenvalues().minCoeff());
    ric_max = std::max(ric_max, es.eigenvalues().maxCoeff());
  }
  return make_report("einstein", res, tol, s.size(),
                     {{"kappa", kappa}, {"formula", formula}, {"ricci_min", ric_min}, {"ricci_max", ric_max}});
}

/// Smallest eigenvalue of Ric_H over the sample.
inline double min_ricci(Sample& s) {
  double lo = INFINITY;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Eigen::MatrixXd ric = s.at(k).ricci_h();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (ric + ric.transpose()));
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return lo;
}

// ---------------------------------------------------------------- canonical variation curvature

/// R^{g_eps'}(E_u, E_v) E_w in g-frame components, from the Levi-Civita connection of g_eps'.
class VariationCurvature {
 public:
  VariationCurvature(PointGeometry& g, double eps_prime) : curv_(g.variation_curvature(eps_prime)) {}

  Eigen::VectorXd operator()(std::size_t u, std::size_t v, std::size_t w) { return curv_.apply(u, v, w); }

 private:
  ConnectionCurvature curv_;
};

/// R^ghat(V, X) Y = (kappa/2)(<X,Y>_ghat V - <V,Y>_ghat X) with ghat = g_H + 2 kappa g_V.
inline CheckReport check_curvature_constancy(Sample& s, double kappa, double tol = 1e-9) {
  if (kappa == 0.0) throw std::invalid_argument("curvature constancy requires kappa != 0");
  const double eps_prime = 1.0 / (2.0 * kappa);
  double res = 0.0, round_res = 0.0;
  const bool sphere = s.model().backend == Backend::sphere;
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto& g = s.at(k);
    const std::size_t n = g.n(), d = g.d();
    auto ghat = [&](std::size_t u, std::size_t w) { return u != w ? 0.0 : (u < n ? 1.0 : 1.0 / eps_prime); };
    VariationCurvature R(g, eps_prime);
    for (std::size_t v = n; v < d; ++v)
      for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = 0; y < d; ++y) {
          Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
          rhs(v) += 0.5 * kappa * ghat(x, y);
          rhs(x) -= 0.5 * kappa * ghat(v, y);
          res = std::max(res, (R(v, x, y) - rhs).cwiseAbs().maxCoeff());
        }
    if (sphere) {
      Eigen::MatrixXd F(g.frame().X.rows(), d);
      F << g.frame().X, g.frame().Z;
      Eigen::MatrixXd G = F.transpose() * F;
      for (std::size_t u = 0; u < d; ++u) G(u, u) -= ghat(u, u);
      round_res = std::max(round_res, G.cwiseAbs().maxCoeff());
    }
  }
  nlohmann::json details = {{"kappa", kappa}, {"rho", kappa / 2.0}, {"epsilon_prime", eps_prime}, {"identity_residual", res}};
  if (sphere) details["round_metric_residual"] = round_res;
  return make_report("curvature-constancy", std::max(res, round_res), tol, s.size(), details);
}

/// Direct curvature of g_eps' against the closed form, for V vertical and X, Y both
/// horizontal or both vertical.
inline CheckReport check_oneill(Sample& s, const std::vector<double>& eps_values = {0.5, 1.0, 2.0}, double tol = 1e-9) {
  double res = 0.0;
  for (double ep : eps_values) {
    if (!(ep > 0.0)) throw std::invalid_argument("O'Neill check needs positive epsilon values");
    for (std::size_t k = 0; k < s.size(); ++k) {
      auto& g = s.at(k);
      const std::size_t n = g.n(), m = g.m(), d = g.d();
      VariationCurvature R(g, ep);
      for (std::size_t v = n; v < d; ++v) {
        const std::size_t a = v - n;
        for (std::size_t x = 0; x < n; ++x)
          for (std::size_t y = 0; y < n; ++y) {
            Eigen::VectorXd want = Eigen::VectorXd::Zero(d);
            for (std::size_t l = 0; l < n; ++l) want(l) = -(0.5 / ep) * g.nabla_t(x, a, y, l);
            for (std::size_t b = 0; b < m; ++b) {
              double t = -0.5 * g.nabla_t(v, b, x, y);
              for (std::size_t l = 0; l < n; ++l) t += (0.25 / ep) * g.tor(a, y, l) * g.tor(b, x, l);
              want(n + b) = t;
            }
            res = std::max(res, (R(v, x, y) - want).cwiseAbs().maxCoeff());
          }
        for (std::size_t x = n; x < d; ++x)
          for (std::size_t y = n; y < d; ++y) {
            const Eigen::VectorXd want = g.curvature_block(v, x).col(y);
            res = std::max(res, (R(v, x, y) - want).cwiseAbs().maxCoeff());
          }
      }
    }
  }
  return make_report("oneill", res, tol, s.size(), {{"epsilons", eps_values}});
}

// ---------------------------------------------------------------- lemma identities

inline bool horizontally_parallel(Sample& s, double tol) { return torsion_residuals(s).horizontal <= tol; }

inline CheckReport check_skew_nabla_j(Sample& s, double tol = 1e-9) {
  double res = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto& g = s.at(k);
    const std::size_t n = g.n(), m = g.m();
    for (std::size_t z = 0; z < m; ++z)
      for (std::size_t w = 0; w < m; ++w)
        res = std::max(res, (g.nabla_J(n + z, w) + g.nabla_J(n + w, z)).cwiseAbs().maxCoeff());
  }
  return make_report("lemma-skew-nabla-j", res, tol, s.size());
}

/// R(U,V)W = R_H(U,V)W + R_V(U,V)W + (nabla_W T)(U,V) over all frame triples.
inline CheckReport check_curvature_decomposition(Sample& s, double tol = 1e-9) {
  double res = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto& g = s.at(k);
    const std::size_t n = g.n(), d = g.d();
    for (std::size_t u = 0; u < d; ++u)
      for (std::size_t v = 0; v < d; ++v) {
        const Eigen::MatrixXd& M = g.curvature_block(u, v);
        for (std::size_t w = 0; w < d; ++w)
          for (std::size_t y = 0; y < d; ++y) {
            double want = 0.0;
            const bool hh = u < n && v < n, vv = u >= n && v >= n;
            if (hh && w < n) want += M(y, w);
            if (vv && w >= n) want += M(y, w);
            if (hh && y >= n) want += g.nabla_t(w, y - n, u, v);
            res = std::max(res, std::abs(M(y, w) - want));
          }
      }
  }
  return make_report("lemma-curvature-decomposition", res, tol, s.size());
}

/// [R_H(X,Y), J_Z] = (nabla_{T(X,Y)} J)_Z + J_{(nabla_Z T)(X,Y)}.
inline CheckReport check_commutator_identity(Sample& s, double tol = 1e-9) {
  double res = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto& g = s.at(k);
    const std::size_t n = g.n(), m = g.m();
    std::vector<Eigen::MatrixXd> J;
    for (std::size_t a = 0; a < m; ++a) J.push_back(g.J(a));
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = x + 1; y < n; ++y) {
        const Eigen::MatrixXd RH = g.curvature_block(x, y).topLeftCorner(n, n);
        for (std::size_t a = 0; a < m; ++a) {
          Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, n);
          for (std::size_t c = 0; c < m; ++c) rhs += g.tor(c, x, y) * g.nabla_J(n + c, a) + g.nabla_t(n + a, c, x, y) * J[c];
          res = std::max(res, (RH * J[a] - J[a] * RH - rhs).cwiseAbs().maxCoeff());
        }
      }
  }
  return make_report("lemma-commutator", res, tol, s.size());
}

/// The commutator identity with the parallel Clifford structure substituted:
/// [R_H(X,Y), J_i] = kappa sum_{j != i} (<J_j X, Y> J_i J_j - <J_i J_j X, Y> J_j).
inline CheckReport check_commutator_kappa(Sample& s, double kappa, double tol = 1e-9) {
  double res = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto& g = s.at(k);
    const std::size_t n = g.n(), m = g.m();
    std::vector<Eigen::MatrixXd> J;
    for (std::size_t a = 0; a < m; ++a) J.push_back(g.J(a));
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = x + 1; y < n; ++y) {
        const Eigen::MatrixXd RH = g.curvature_block(x, y).topLeftCorner(n, n);
        for (std::size_t i = 0; i < m; ++i) {
          Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, n);
          for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            const Eigen::MatrixXd Jij = J[i] * J[j];
            rhs += kappa * (J[j](y, x) * Jij - Jij(y, x) * J[j]);
          }
          res = std::max(res, (RH * J[i] - J[i] * RH - rhs).cwiseAbs().maxCoeff());
        }
      }
  }
  return make_report("lemma-commutator-kappa", res, tol, s.size(), {{"kappa", kappa}});
}

/// (nabla_{J_W X} J)_W X = (nabla_X J)_W J_W X = -J_W (nabla_X J)_W X on seeded
/// horizontal X and vertical W, plus all frame pairs.
inline CheckReport check_yang_mills_helper(Sample& s, double tol = 1e-9, std::uint64_t seed = 7) {
  double res = 0.0;
  PointSampler rng(seed);
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto& g = s.at(k);
    const std::size_t n = g.n(), m = g.m();
    std::vector<std::vector<Eigen::MatrixXd>> NJ(n);  // NJ[l][b] = (nabla_{X_l} J)_{Z_b}
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t b = 0; b < m; ++b) NJ[l].push_back(g.nabla_J(l, b));
    std::vector<Eigen::MatrixXd> J;
    for (std::size_t b = 0; b < m; ++b) J.push_back(g.J(b));
    auto nabla = [&](const Eigen::VectorXd& dir, const Eigen::VectorXd& w) {
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
      for (std::size_t l = 0; l < n; ++l)
        for (std::size_t b = 0; b < m; ++b) M += dir(l) * w(b) * NJ[l][b];
      return M;
    };
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> cases;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t b = 0; b < m; ++b) cases.emplace_back(Eigen::VectorXd::Unit(n, x), Eigen::VectorXd::Unit(m, b));
    for (int t = 0; t < 4; ++t) {
      Eigen::VectorXd x(n), w(m);
      for (std::size_t i = 0; i < n; ++i) x(i) = rng.symmetric();
      for (std::size_t b = 0; b < m; ++b) w(b) = rng.symmetric();
      cases.emplace_back(x, w);
    }
    for (const auto& [x, w] : cases) {
      Eigen::MatrixXd JW = Eigen::MatrixXd::Zero(n, n);
      for (std::size_t b = 0; b < m; ++b) JW += w(b) * J[b];
      const Eigen::VectorXd jx = JW * x;
      const Eigen::VectorXd lhs = nabla(jx, w) * x;
      const Eigen::VectorXd mid = nabla(x, w) * jx;
      const Eigen::VectorXd rhs = -JW * (nabla(x, w) * x);
      res = std::max({res, (lhs - mid).cwiseAbs().maxCoeff(), (mid - rhs).cwiseAbs().maxCoeff()});
    }
  }
  return make_report("lemma-yang-mills-helper", res, tol, s.size());
}

/// |(nabla_Z J)_W X|^2 = <R(Z,W)W,Z> |X|^2 for orthonormal vertical Z, W and unit X;
/// with kappa given, both sides are also compared with kappa^2.
inline CheckReport check_vertical_sectional(Sample& s, std::optional<double> kappa = {}, double tol = 1e-8) {
  double res = 0.0, lo = INFINITY, hi = -INFINITY;
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto& g = s.at(k);
    const std::size_t n = g.n(), m = g.m();
    for (std::size_t z = 0; z < m; ++z)
      for (std::size_t w = 0; w < m; ++w) {
        if (z == w) continue;
        const double sec = g.curv(n + z, n + w, n + w, n + z);
        lo = std::min(lo, sec);
        hi = std::max(hi, sec);
        if (kappa) res = std::max(res, std::abs(sec - *kappa * *kappa));
        for (std::size_t x = 0; x < n; ++x) {
          double norm2 = 0.0;
          for (std::size_t l = 0; l < n; ++l) norm2 += std::pow(g.nabla_t(n + z, w, x, l), 2);
          res = std::max(res, std::abs(norm2 - sec));
        }
      }
  }
  nlohmann::json details = nlohmann::json::object();
  if (s.model().m >= 2) details = {{"sectional_min", lo}, {"sectional_max", hi}};
  if (kappa) details["kappa_squared"] = *kappa * *kappa;
  return make_report("lemma-vertical-sectional", res, tol, s.size(), details);
}

/// The identity suite; identities whose hypotheses fail on the model are left out.
inline std::vector<CheckReport> check_lemma_identities(Sample& s, std::optional<double> kappa = {}, double tol = 1e-9) {
  std::vector<CheckReport> out;
  const bool hp = horizontally_parallel(s, tol);
  const LambdaFit lam = fit_lambda(s);
  const bool htype = std::max(std::abs(lam.max - 1.0), std::abs(lam.min - 1.0)) <= tol && lam.isotropy_residual <= tol;
  if (hp) {
    out.push_back(check_skew_nabla_j(s, tol));
    out.push_back(check_curvature_decomposition(s, tol));
    out.push_back(check_commutator_identity(s, tol));
    if (kappa) out.push_back(check_commutator_kappa(s, *kappa, tol));
  }
  if (htype) out.push_back(check_yang_mills_helper(s, tol));
  if (htype && hp && s.model().m >= 2) out.push_back(check_vertical_sectional(s, kappa, std::max(tol, 1e-8)));
  return out;
}

}  // namespace htf
