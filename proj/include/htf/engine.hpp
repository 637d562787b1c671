#pragma once

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "htf/model.hpp"

namespace htf {

/// Orthonormal adapted frame at a point: ambient vectors plus the constant
/// coefficients expressing them through the model's named fields.
struct AdaptedFrameAt {
  Point point;
  Eigen::MatrixXd X;   // N x n
  Eigen::MatrixXd Z;   // N x m
  Eigen::MatrixXd CH;  // n x (#horizontal spanning fields)
  Eigen::MatrixXd CV;  // m x m
};

namespace detail {

inline Eigen::MatrixXd gram_at(const Realization<Jet>& r, const std::vector<JetField>& fields) {
  const auto k = static_cast<Eigen::Index>(fields.size());
  Eigen::MatrixXd G(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = a; b < k; ++b) G(a, b) = G(b, a) = inner_g(r, fields[a], fields[b]).value();
  return G;
}

/// Pivoted Gram-Schmidt in coefficient space against the Gram matrix G: picks the
/// candidate with the largest residual at each step (lowest index on ties).
inline Eigen::MatrixXd pivoted_orthonormal_coefficients(const Eigen::MatrixXd& G, std::size_t count, double tol) {
  const Eigen::Index k = G.rows();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), k);
  std::vector<Eigen::VectorXd> chosen;
  std::vector<bool> used(k, false);
  for (std::size_t step = 0; step < count; ++step) {
    double best = -1.0;
    Eigen::VectorXd best_vec;
    Eigen::Index best_idx = -1;
    for (Eigen::Index c = 0; c < k; ++c) {
      if (used[c]) continue;
      Eigen::VectorXd v = Eigen::VectorXd::Unit(k, c);
      for (const auto& q : chosen) v -= (q.dot(G * v)) * q;
      const double norm = std::sqrt(std::max(0.0, v.dot(G * v)));
      if (norm > best + 1e-14) {
        best = norm;
        best_vec = v;
        best_idx = c;
      }
    }
    if (best_idx < 0 || best < tol) throw DegenerateFrameError("adapted_frame: horizontal span is rank deficient at this point");
    used[best_idx] = true;
    chosen.push_back(best_vec / best);
    out.row(static_cast<Eigen::Index>(step)) = chosen.back().transpose();
  }
  return out;
}

inline Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace detail

inline AdaptedFrameAt adapted_frame(const FoliationModel& model, const Point& p, double tol = 1e-8) {
  const auto r = realize(model, p, 0);
  AdaptedFrameAt frame;
  frame.point = p;
  const Eigen::MatrixXd GV = detail::gram_at(r, r.vertical);
  const Eigen::MatrixXd ortho = gram_schmidt_at(Eigen::MatrixXd::Identity(model.m, model.m), GV, tol);
  frame.CV = ortho.transpose();
  frame.CH = detail::pivoted_orthonormal_coefficients(detail::gram_at(r, r.horizontal), model.n, tol);
  frame.X = Eigen::MatrixXd::Zero(model.N, model.n);
  frame.Z = Eigen::MatrixXd::Zero(model.N, model.m);
  for (std::size_t i = 0; i < model.n; ++i)
    for (std::size_t j = 0; j < r.horizontal.size(); ++j)
      frame.X.col(i) += frame.CH(i, j) * detail::to_vector(values(r.horizontal[j]));
  for (std::size_t a = 0; a < model.m; ++a)
    for (std::size_t b = 0; b < model.m; ++b) frame.Z.col(a) += frame.CV(a, b) * detail::to_vector(values(r.vertical[b]));
  return frame;
}

/// First-order calculus in a frame E around its base point: component jets of
/// tangent fields, Gram and bracket jets, and Levi-Civita coefficients by the
/// Koszul formula. E must be g-orthonormal at the point, and each frame field
/// must be horizontal or vertical everywhere.
class FrameCalculus {
 public:
  FrameCalculus(const Realization<Jet>& r, const std::vector<JetField>& E, std::size_t n) : r_(&r), E_(&E), n_(n) {
    d_ = E.size();
    const std::size_t N = r.N();
    Evals_.resize(d_);
    for (std::size_t u = 0; u < d_; ++u) Evals_[u] = detail::to_vector(values(E[u]));
    std::vector<std::vector<Jet>> cov(d_);
    for (std::size_t j = 0; j < d_; ++j) cov[j] = metric_covector(r, E[j]);
    G_.resize(d_ * d_);
    Eigen::MatrixXd G0(d_, d_);
    for (std::size_t u = 0; u < d_; ++u)
      for (std::size_t w = u; w < d_; ++w) {
        Jet g = E[u][0] * cov[w][0];
        for (std::size_t l = 1; l < N; ++l) add_product(g, E[u][l], cov[w][l]);
        G_[u * d_ + w] = G_[w * d_ + u] = std::move(g);
        G0(u, w) = G0(w, u) = G_[u * d_ + w].value();
      }
    // Gram inverse to first order: G^{-1} = 2A - A G A with A = G(p)^{-1}.
    const Eigen::MatrixXd A = G0.inverse();
    const auto space = r.zero.space_ptr();
    ginv_.resize(d_ * d_);
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t j = 0; j < d_; ++j) {
        Jet acc = Jet::constant(space, 2.0 * A(i, j)).truncated(1);
        for (std::size_t k = 0; k < d_; ++k)
          for (std::size_t l = 0; l < d_; ++l) {
            const double c = A(i, k) * A(l, j);
            if (c != 0.0) acc -= c * G_[k * d_ + l].truncated(1);
          }
        ginv_[i * d_ + j] = std::move(acc);
      }
    // g(W, E_j) = sum_l W^l eta_jl; dual_kl = sum_j ginv_kj eta_jl
    std::vector<Jet> eta(d_ * N);
    for (std::size_t j = 0; j < d_; ++j)
      for (std::size_t l = 0; l < N; ++l) eta[j * N + l] = cov[j][l].truncated(1);
    dual_.resize(d_ * N);
    for (std::size_t k = 0; k < d_; ++k)
      for (std::size_t l = 0; l < N; ++l) {
        Jet acc = ginv_[k * d_] * eta[l];
        for (std::size_t j = 1; j < d_; ++j) acc += ginv_[k * d_ + j] * eta[j * N + l];
        dual_[k * N + l] = std::move(acc);
      }
    brackets_.resize(d_ * d_);
    dG_.resize(d_ * d_ * d_);
  }

  std::size_t size() const { return d_; }
  std::size_t n() const { return n_; }
  const Eigen::VectorXd& frame_value(std::size_t u) const { return Evals_[u]; }
  const Realization<Jet>& realization() const { return *r_; }
  const std::vector<JetField>& frame() const { return *E_; }

  /// Coefficients f^k (order-1 jets) with W = sum_k f^k E_k near the point.
  std::vector<Jet> component_jets(const JetField& w) const {
    const std::size_t N = w.size();
    std::vector<Jet> wt(N);
    for (std::size_t l = 0; l < N; ++l) wt[l] = w[l].truncated(1);
    std::vector<Jet> f(d_);
    for (std::size_t k = 0; k < d_; ++k) {
      f[k] = wt[0] * dual_[k * N];
      for (std::size_t l = 1; l < N; ++l) add_product(f[k], dual_[k * N + l], wt[l]);
    }
    return f;
  }

  /// E_u(f) at the point.
  double derivative_along(std::size_t u, const Jet& f) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < Evals_[u].size(); ++i)
      if (Evals_[u](i) != 0.0) s += Evals_[u](i) * f.derivative(static_cast<std::size_t>(i)).value();
    return s;
  }

  /// g(E_a, E_b) to second order.
  const Jet& gram(std::size_t a, std::size_t b) const { return G_[a * d_ + b]; }

  /// E_u g(E_a, E_b) to first order.
  const Jet& gram_derivative(std::size_t u, std::size_t a, std::size_t b) {
    if (a > b) std::swap(a, b);
    auto& slot = dG_[(u * d_ + a) * d_ + b];
    if (slot.space_ptr() == nullptr) slot = directional_derivative((*E_)[u], G_[a * d_ + b]);
    return slot;
  }

  /// Component jets of [E_u, E_v].
  const std::vector<Jet>& bracket_jets(std::size_t u, std::size_t v) {
    auto& slot = brackets_[u * d_ + v];
    if (slot.empty()) {
      if (u == v) {
        slot.assign(d_, zero());
      } else if (u > v) {
        for (const auto& c : bracket_jets(v, u)) slot.push_back(-c);
      } else {
        slot = component_jets(bracket((*E_)[u], (*E_)[v]));
      }
    }
    return slot;
  }

  /// Frame components of [E_u, E_v] at the point.
  Eigen::VectorXd bracket_components(std::size_t u, std::size_t v) {
    const auto& c = bracket_jets(u, v);
    Eigen::VectorXd out(d_);
    for (std::size_t k = 0; k < d_; ++k) out(k) = c[k].value();
    return out;
  }

  /// Component jets of the Levi-Civita derivative D_{E_u} E_w for the metric
  /// g_H + s g_V.
  std::vector<Jet> levi_civita_jets(std::size_t u, std::size_t w, double s = 1.0) {
    auto scale = [&](std::size_t a, std::size_t b) { return (a >= n_ && b >= n_) ? s : 1.0; };
    // lowered bracket g'([E_a, E_b], E_k)
    auto lowered = [&](std::size_t a, std::size_t b, std::size_t k) {
      const auto& c = bracket_jets(a, b);
      Jet acc = zero();
      for (std::size_t l = 0; l < d_; ++l) add_product(acc, c[l], scale(l, k) * G_[l * d_ + k].truncated(1));
      return acc;
    };
    std::vector<Jet> h(d_);
    for (std::size_t k = 0; k < d_; ++k) {
      Jet acc = scale(w, k) * gram_derivative(u, w, k) + scale(u, k) * gram_derivative(w, u, k) -
                scale(u, w) * gram_derivative(k, u, w);
      acc += lowered(u, w, k) - lowered(w, k, u) + lowered(k, u, w);
      h[k] = 0.5 * acc;
    }
    std::vector<Jet> f(d_);
    for (std::size_t k = 0; k < d_; ++k) {
      f[k] = zero();
      for (std::size_t j = 0; j < d_; ++j) {
        const double sc = scale(k, j);
        add_product(f[k], ginv_[k * d_ + j], sc == 1.0 ? h[j] : (1.0 / sc) * h[j]);
      }
    }
    return f;
  }

  Jet zero() const { return Jet::constant(r_->zero.space_ptr(), 0.0).truncated(1); }

 private:
  const Realization<Jet>* r_;
  const std::vector<JetField>* E_;
  std::size_t n_ = 0, d_ = 0;
  std::vector<Eigen::VectorXd> Evals_;
  std::vector<Jet> G_, ginv_, dual_;
  std::vector<std::vector<Jet>> brackets_;
  std::vector<Jet> dG_;
};

/// Curvature R(E_u, E_v) E_w = D_u D_v E_w - D_v D_u E_w - D_[E_u,E_v] E_w of a
/// connection D, from its coefficients D_{E_u} E_w = omega^k_uw E_k.
class ConnectionCurvature {
 public:
  using Connection = std::function<JetField(const JetField&, const JetField&)>;
  /// Component jets of D_{E_u} E_w.
  using OmegaSource = std::function<std::vector<Jet>(std::size_t, std::size_t)>;

  ConnectionCurvature(OmegaSource source, FrameCalculus* calc) : source_(std::move(source)), calc_(calc) {
    const std::size_t d = calc->size();
    omega_.resize(d * d);
  }
  ConnectionCurvature(Connection conn, FrameCalculus* calc)
      : ConnectionCurvature(OmegaSource([conn = std::move(conn), calc](std::size_t u, std::size_t w) {
                              return calc->component_jets(conn(calc->frame()[u], calc->frame()[w]));
                            }),
                            calc) {}

  const std::vector<Jet>& omega(std::size_t u, std::size_t w) {
    auto& slot = omega_[u * calc_->size() + w];
    if (slot.empty()) slot = source_(u, w);
    return slot;
  }
  double omega_value(std::size_t u, std::size_t w, std::size_t k) { return omega(u, w)[k].value(); }

  /// Frame components of R(E_u, E_v) E_w at the point.
  Eigen::VectorXd apply(std::size_t u, std::size_t v, std::size_t w) {
    const std::size_t d = calc_->size();
    const Eigen::VectorXd& c = calc_->bracket_components(u, v);
    Eigen::VectorXd out(d);
    for (std::size_t y = 0; y < d; ++y) {
      double s = calc_->derivative_along(u, omega(v, w)[y]) - calc_->derivative_along(v, omega(u, w)[y]);
      for (std::size_t k = 0; k < d; ++k)
        s += omega_value(v, w, k) * omega_value(u, k, y) - omega_value(u, w, k) * omega_value(v, k, y) -
             c(k) * omega_value(k, w, y);
      out(y) = s;
    }
    return out;
  }

  FrameCalculus& calculus() { return *calc_; }

 private:
  OmegaSource source_;
  FrameCalculus* calc_;
  std::vector<std::vector<Jet>> omega_;
};

/// All tensors of the Bott connection at one point, in the adapted frame.
///
/// Index layout: frame index e in [0, n) is horizontal X_e, [n, n+m) is vertical Z_{e-n}.
///   tor(a,i,j)        = <T(X_i,X_j), Z_a>
///   nabla_t(e,a,i,j)  = <(nabla_{E_e} T)(X_i,X_j), Z_a>
///   curv(u,v,w,y)     = <R(E_u,E_v)E_w, E_y>
/// Operator matrices use (M)_{ji} = <M X_i, X_j>, so J(a)(j,i) = tor(a,i,j).
class PointGeometry {
 public:
  PointGeometry(const FoliationModel& model, const Point& p, int order = 2)
      : model_(&model), frame_(adapted_frame(model, p)), r_(realize(model, p, order)) {
    n_ = model.n;
    m_ = model.m;
    d_ = n_ + m_;
    for (std::size_t i = 0; i < n_; ++i) {
      JetField x = zero_field_like(r_.horizontal[0]);
      for (std::size_t j = 0; j < r_.horizontal.size(); ++j)
        if (frame_.CH(i, j) != 0.0) x += frame_.CH(i, j) * r_.horizontal[j];
      E_.push_back(std::move(x));
    }
    for (std::size_t a = 0; a < m_; ++a) {
      JetField z = zero_field_like(r_.vertical[0]);
      for (std::size_t b = 0; b < m_; ++b)
        if (frame_.CV(a, b) != 0.0) z += frame_.CV(a, b) * r_.vertical[b];
      E_.push_back(std::move(z));
    }
    // T(X_i, X_j) = -pi_V [X_i, X_j]
    tor_.assign(m_ * n_ * n_, 0.0);
    auto& calc = calculus();
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) {
        const auto& c = calc.bracket_jets(i, j);
        for (std::size_t a = 0; a < m_; ++a) {
          tor_[(a * n_ + i) * n_ + j] = -c[n_ + a].value();
          tor_[(a * n_ + j) * n_ + i] = c[n_ + a].value();
        }
      }
  }

  PointGeometry(const PointGeometry&) = delete;
  PointGeometry& operator=(const PointGeometry&) = delete;

  const FoliationModel& model() const { return *model_; }
  const AdaptedFrameAt& frame() const { return frame_; }
  const Realization<Jet>& realization() const { return r_; }
  const std::vector<JetField>& frame_fields() const { return E_; }
  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  std::size_t d() const { return d_; }

  /// g-components <W, E_u> of a field at the point.
  Eigen::VectorXd components(const JetField& w) const {
    Eigen::VectorXd c(static_cast<Eigen::Index>(d_));
    for (std::size_t u = 0; u < d_; ++u) c(u) = inner_g(r_, w, E_[u]).value();
    return c;
  }

  double tor(std::size_t a, std::size_t i, std::size_t j) const { return tor_[(a * n_ + i) * n_ + j]; }

  Eigen::MatrixXd J(std::size_t a) const {
    Eigen::MatrixXd M(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) M(j, i) = tor(a, i, j);
    return M;
  }

  double nabla_t(std::size_t e, std::size_t a, std::size_t i, std::size_t j) {
    ensure_nabla_t();
    return nabla_t_[((e * m_ + a) * n_ + i) * n_ + j];
  }

  /// (nabla_{E_e} J)_{Z_b} as an operator matrix.
  Eigen::MatrixXd nabla_J(std::size_t e, std::size_t b) {
    Eigen::MatrixXd M(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) M(j, i) = nabla_t(e, b, i, j);
    return M;
  }

  double curv(std::size_t u, std::size_t v, std::size_t w, std::size_t y) {
    return curvature_block(u, v)(y, w);
  }

  /// Matrix of R(E_u, E_v) on the full frame: (M)(y, w) = <R(E_u,E_v)E_w, E_y>.
  const Eigen::MatrixXd& curvature_block(std::size_t u, std::size_t v) {
    auto key = std::make_pair(u, v);
    auto it = curv_.find(key);
    if (it != curv_.end()) return it->second;
    auto& bott_curv = bott_curvature();
    Eigen::MatrixXd M(d_, d_);
    for (std::size_t w = 0; w < d_; ++w) M.col(w) = bott_curv.apply(u, v, w);
    return curv_.emplace(key, std::move(M)).first->second;
  }

  /// Horizontal Ricci: Ric(X_x, X_y) = sum_l <R(X_l, X_x) X_y, X_l>.
  Eigen::MatrixXd ricci_h() {
    Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n_, n_);
    for (std::size_t l = 0; l < n_; ++l)
      for (std::size_t x = 0; x < n_; ++x) {
        const auto& M = curvature_block(l, x);
        for (std::size_t y = 0; y < n_; ++y) ric(x, y) += M(l, y);
      }
    return ric;
  }

  /// g-components of an ambient tangent vector at the point.
  Eigen::VectorXd frame_components(const std::vector<double>& w) const {
    const auto space = jet_space(model_->N, 0);
    std::vector<Jet> comps;
    for (double v : w) comps.push_back(Jet::constant(space, v));
    const JetField wf(std::move(comps));
    const auto r0 = order_zero();
    Eigen::VectorXd c(static_cast<Eigen::Index>(d_));
    for (std::size_t u = 0; u < d_; ++u) c(u) = inner_g(*r0, wf, E0_[u]).value();
    return c;
  }

  FrameCalculus& calculus() {
    if (!calc_) calc_ = std::make_unique<FrameCalculus>(r_, E_, n_);
    return *calc_;
  }

  /// Curvature of the Levi-Civita connection of g_H + (1/eps') g_V.
  ConnectionCurvature variation_curvature(double eps_prime) {
    if (!(eps_prime > 0.0)) throw std::invalid_argument("variation curvature requires eps' > 0");
    auto* calc = &calculus();
    return ConnectionCurvature(ConnectionCurvature::OmegaSource([calc, eps_prime](std::size_t u, std::size_t w) {
                                 return calc->levi_civita_jets(u, w, 1.0 / eps_prime);
                               }),
                               calc);
  }

  /// Bott connection in the frame: pi_H LC on H x H, pi_V LC on V x V, and
  /// projected brackets on the mixed pairs.
  ConnectionCurvature& bott_curvature() {
    if (!bott_curv_) {
      auto* calc = &calculus();
      const std::size_t n = n_;
      bott_curv_ = std::make_unique<ConnectionCurvature>(
          ConnectionCurvature::OmegaSource([calc, n](std::size_t u, std::size_t w) {
            const bool uh = u < n, wh = w < n;
            std::vector<Jet> out = (uh == wh) ? calc->levi_civita_jets(u, w) : calc->bracket_jets(u, w);
            for (std::size_t k = 0; k < out.size(); ++k)
              if ((k < n) != wh) out[k] = calc->zero();
            return out;
          }),
          calc);
    }
    return *bott_curv_;
  }

 private:
  std::shared_ptr<const Realization<Jet>> order_zero() const {
    if (!r0_) {
      r0_ = std::make_shared<Realization<Jet>>(realize(*model_, frame_.point, 0));
      const auto space = jet_space(model_->N, 0);
      for (std::size_t u = 0; u < d_; ++u) {
        const Eigen::VectorXd v = u < n_ ? Eigen::VectorXd(frame_.X.col(u)) : Eigen::VectorXd(frame_.Z.col(u - n_));
        std::vector<Jet> comps;
        for (Eigen::Index k = 0; k < v.size(); ++k) comps.push_back(Jet::constant(space, v(k)));
        E0_.emplace_back(std::move(comps));
      }
    }
    return r0_;
  }

  void ensure_torsion_jets() {
    if (!torsion_jets_.empty()) return;
    auto& calc = calculus();
    torsion_jets_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) {
        auto& pos = torsion_jets_[i * n_ + j];
        auto& neg = torsion_jets_[j * n_ + i];
        const auto& c = calc.bracket_jets(i, j);
        for (std::size_t k = 0; k < d_; ++k) {
          pos.push_back(k < n_ ? calc.zero() : -c[k]);
          neg.push_back(k < n_ ? calc.zero() : c[k]);
        }
      }
  }

  // (nabla_e T)(X_i,X_j)^y = E_e(T^y_ij) + T^k_ij w^y_ek - w^k_ei T^y_kj - w^k_ej T^y_ik
  void ensure_nabla_t() {
    if (!nabla_t_.empty()) return;
    nabla_t_.assign(d_ * m_ * n_ * n_, 0.0);
    auto& bc = bott_curvature();
    auto& calc = calculus();
    ensure_torsion_jets();
    const auto& T = torsion_jets_;
    auto tval = [&](std::size_t k, std::size_t l, std::size_t y) {
      if (k >= n_ || l >= n_ || k == l || y < n_) return 0.0;
      return T[k * n_ + l][y].value();
    };
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        for (std::size_t e = 0; e < d_; ++e)
          for (std::size_t a = 0; a < m_; ++a) {
            const std::size_t y = n_ + a;
            double v = calc.derivative_along(e, T[i * n_ + j][y]);
            for (std::size_t k = 0; k < d_; ++k) {
              v += tval(i, j, k) * bc.omega_value(e, k, y);
              v -= bc.omega_value(e, i, k) * tval(k, j, y) + bc.omega_value(e, j, k) * tval(i, k, y);
            }
            nabla_t_[((e * m_ + a) * n_ + i) * n_ + j] = v;
            nabla_t_[((e * m_ + a) * n_ + j) * n_ + i] = -v;
          }
  }

  const FoliationModel* model_;
  AdaptedFrameAt frame_;
  Realization<Jet> r_;
  std::size_t n_ = 0, m_ = 0, d_ = 0;
  std::vector<JetField> E_;
  std::vector<double> tor_;
  std::vector<double> nabla_t_;
  std::vector<std::vector<Jet>> torsion_jets_;
  std::map<std::pair<std::size_t, std::size_t>, Eigen::MatrixXd> curv_;
  std::unique_ptr<FrameCalculus> calc_;
  std::unique_ptr<ConnectionCurvature> bott_curv_;
  mutable std::shared_ptr<Realization<Jet>> r0_;
  mutable std::vector<JetField> E0_;
};

}  // namespace htf
