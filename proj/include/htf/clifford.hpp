#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "htf/polynomial.hpp"

namespace htf {

/// Element of the real Clifford algebra Cl(R^m) with e_i e_i = -1.
///
/// Blades are keyed by bitmask: bit (i-1) set means generator e_i is present,
/// which is the same as a strictly increasing index set.
class CliffordElement {
 public:
  using Blade = std::uint32_t;

  explicit CliffordElement(int m = 0) : m_(m) {
    if (m < 0 || m > 31) throw std::invalid_argument("Clifford generator count out of range");
  }

  static CliffordElement scalar(int m, double c) {
    CliffordElement x(m);
    x.add(0, c);
    return x;
  }
  /// Generator e_i, 1-based.
  static CliffordElement generator(int m, int i) {
    if (i < 1 || i > m) throw std::invalid_argument("generator index out of range");
    CliffordElement x(m);
    x.add(Blade{1} << (i - 1), 1.0);
    return x;
  }
  static CliffordElement vector(const std::vector<double>& z) {
    CliffordElement x(static_cast<int>(z.size()));
    for (std::size_t i = 0; i < z.size(); ++i) x.add(Blade{1} << i, z[i]);
    return x;
  }

  int m() const { return m_; }
  const std::map<Blade, double>& coeffs() const { return coeffs_; }
  double coefficient(Blade b) const {
    auto it = coeffs_.find(b);
    return it == coeffs_.end() ? 0.0 : it->second;
  }

  void add(Blade b, double c) {
    if (b >> m_) throw std::invalid_argument("blade outside generator range");
    if (c == 0.0) return;
    auto [it, inserted] = coeffs_.emplace(b, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) coeffs_.erase(it);
    }
  }

  /// Grade-k part.
  CliffordElement grade(int k) const {
    CliffordElement out(m_);
    for (const auto& [b, c] : coeffs_)
      if (std::popcount(b) == k) out.add(b, c);
    return out;
  }

  bool is_homogeneous(int k, double tol = 0.0) const {
    for (const auto& [b, c] : coeffs_)
      if (std::popcount(b) != k && std::abs(c) > tol) return false;
    return true;
  }

  double max_abs() const {
    double v = 0.0;
    for (const auto& [b, c] : coeffs_) v = std::max(v, std::abs(c));
    return v;
  }

  CliffordElement& operator+=(const CliffordElement& o) {
    check(o);
    for (const auto& [b, c] : o.coeffs_) add(b, c);
    return *this;
  }
  CliffordElement& operator-=(const CliffordElement& o) {
    check(o);
    for (const auto& [b, c] : o.coeffs_) add(b, -c);
    return *this;
  }
  CliffordElement& operator*=(double s) {
    if (s == 0.0) coeffs_.clear();
    for (auto& [b, c] : coeffs_) c *= s;
    return *this;
  }
  friend CliffordElement operator+(CliffordElement a, const CliffordElement& b) { return a += b; }
  friend CliffordElement operator-(CliffordElement a, const CliffordElement& b) { return a -= b; }
  friend CliffordElement operator*(CliffordElement a, double s) { return a *= s; }
  friend CliffordElement operator*(double s, CliffordElement a) { return a *= s; }

  /// Sign of e_A e_B after reordering into e_{A xor B}, including e_i^2 = -1.
  static double blade_sign(Blade a, Blade b) {
    int swaps = 0;
    for (Blade rest = a >> 1; rest; rest >>= 1) swaps += std::popcount(rest & b);
    swaps += std::popcount(a & b);
    return (swaps & 1) ? -1.0 : 1.0;
  }

  void check(const CliffordElement& o) const {
    if (o.m_ != m_) throw DimensionError("Clifford elements have different generator counts");
  }

 private:
  int m_;
  std::map<Blade, double> coeffs_;
};

inline CliffordElement geometric_product(const CliffordElement& a, const CliffordElement& b) {
  a.check(b);
  CliffordElement out(a.m());
  for (const auto& [ba, ca] : a.coeffs())
    for (const auto& [bb, cb] : b.coeffs()) out.add(ba ^ bb, CliffordElement::blade_sign(ba, bb) * ca * cb);
  return out;
}

inline CliffordElement operator*(const CliffordElement& a, const CliffordElement& b) { return geometric_product(a, b); }

/// Image of z1 ^ z2 in Cl_2: z1 . z2 + <z1, z2>.
inline CliffordElement wedge_to_cl2(const std::vector<double>& z1, const std::vector<double>& z2) {
  if (z1.size() != z2.size()) throw DimensionError("wedge_to_cl2 dimension mismatch");
  double inner = 0.0;
  for (std::size_t i = 0; i < z1.size(); ++i) inner += z1[i] * z2[i];
  CliffordElement out = CliffordElement::vector(z1) * CliffordElement::vector(z2);
  out.add(0, inner);
  return out;
}

/// m anticommuting skew-symmetric n x n matrices with J_i J_j + J_j J_i = -2 delta_ij I.
struct CliffordRepresentation {
  int m = 0;
  int n = 0;
  std::vector<Eigen::MatrixXd> generators;

  /// Largest deviation from skewness and from the anticommutation relations.
  double relation_residual() const {
    double r = 0.0;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < m; ++i) {
      r = std::max(r, (generators[i].transpose() + generators[i]).cwiseAbs().maxCoeff());
      for (int j = i; j < m; ++j) {
        Eigen::MatrixXd ac = generators[i] * generators[j] + generators[j] * generators[i];
        if (i == j) ac += 2.0 * I;
        r = std::max(r, ac.cwiseAbs().maxCoeff());
      }
    }
    return r;
  }

  double skew_residual() const {
    double r = 0.0;
    for (const auto& g : generators) r = std::max(r, (g.transpose() + g).cwiseAbs().maxCoeff());
    return r;
  }
};

/// J applied to a Clifford element; an algebra homomorphism Cl(R^m) -> End(R^n).
inline Eigen::MatrixXd represent(const CliffordRepresentation& rep, const CliffordElement& a) {
  if (a.m() != rep.m) throw DimensionError("represent: generator count mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rep.n, rep.n);
  for (const auto& [blade, c] : a.coeffs()) {
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(rep.n, rep.n);
    for (int i = 0; i < rep.m; ++i)
      if (blade & (CliffordElement::Blade{1} << i)) term = term * rep.generators[i];
    out += c * term;
  }
  return out;
}

/// Dimension of an irreducible module: d(1)=2, d(2)=d(3)=4, d(4..7)=8, d(8)=16,
/// d(m+8)=16 d(m).
inline int minimal_dimension(int m) {
  if (m < 1) throw std::invalid_argument("minimal_dimension requires m >= 1");
  static constexpr int base[9] = {0, 2, 4, 4, 8, 8, 8, 8, 16};
  int factor = 1;
  while (m > 8) {
    m -= 8;
    factor *= 16;
  }
  return factor * base[m];
}

namespace detail {

// Cayley-Dickson doubling (a,b)(c,d) = (ac - conj(d) b, d a + b conj(c)),
// starting from the reals; level 3 gives the octonions with e1 e2 = e3 (quaternion i j = k).
inline std::vector<double> cd_conj(const std::vector<double>& x) {
  std::vector<double> y = x;
  for (std::size_t i = 1; i < y.size(); ++i) y[i] = -y[i];
  return y;
}

inline std::vector<double> cd_mul(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n == 1) return {x[0] * y[0]};
  const std::size_t h = n / 2;
  std::vector<double> a(x.begin(), x.begin() + h), b(x.begin() + h, x.end());
  std::vector<double> c(y.begin(), y.begin() + h), d(y.begin() + h, y.end());
  auto ac = cd_mul(a, c), db = cd_mul(cd_conj(d), b), da = cd_mul(d, a), bc = cd_mul(b, cd_conj(c));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < h; ++i) {
    out[i] = ac[i] - db[i];
    out[h + i] = da[i] + bc[i];
  }
  return out;
}

/// Matrix of x -> u x in the Cayley-Dickson algebra of dimension `dim`.
inline Eigen::MatrixXd cd_left_multiplication(int dim, const std::vector<double>& u) {
  Eigen::MatrixXd L(dim, dim);
  for (int k = 0; k < dim; ++k) {
    std::vector<double> e(dim, 0.0);
    e[k] = 1.0;
    auto col = cd_mul(u, e);
    for (int r = 0; r < dim; ++r) L(r, k) = col[r];
  }
  return L;
}

/// Irreducible module for m <= 8: left multiplication by the conjugate units
/// -e_1..-e_m of C, H or O, doubled once for m = 8.
inline std::vector<Eigen::MatrixXd> base_generators(int m) {
  const int d = minimal_dimension(std::min(m, 7));
  std::vector<Eigen::MatrixXd> gens;
  for (int a = 1; a <= std::min(m, 7); ++a) {
    std::vector<double> u(d, 0.0);
    u[a] = -1.0;
    gens.push_back(cd_left_multiplication(d, u));
  }
  if (m == 8) {
    std::vector<Eigen::MatrixXd> doubled;
    for (const auto& g : gens) {
      Eigen::MatrixXd b = Eigen::MatrixXd::Zero(16, 16);
      b.topLeftCorner(8, 8) = g;
      b.bottomRightCorner(8, 8) = -g;
      doubled.push_back(b);
    }
    Eigen::MatrixXd last = Eigen::MatrixXd::Zero(16, 16);
    last.topRightCorner(8, 8) = -Eigen::MatrixXd::Identity(8, 8);
    last.bottomLeftCorner(8, 8) = Eigen::MatrixXd::Identity(8, 8);
    doubled.push_back(last);
    return doubled;
  }
  return gens;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline std::vector<Eigen::MatrixXd> irreducible_generators(int m) {
  if (m <= 8) return base_generators(m);
  // Cl_{m} module from Cl_8 (on R^16, volume element w) and Cl_{m-8}:
  // K_a (x) I and w (x) J_b.
  const auto k8 = base_generators(8);
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(16, 16);
  for (const auto& k : k8) w = w * k;
  const auto inner = irreducible_generators(m - 8);
  const int d = static_cast<int>(inner.front().rows());
  std::vector<Eigen::MatrixXd> gens;
  for (const auto& k : k8) gens.push_back(kron(k, Eigen::MatrixXd::Identity(d, d)));
  for (const auto& j : inner) gens.push_back(kron(w, j));
  return gens;
}

}  // namespace detail

/// Direct sum of `multiplicity` irreducible blocks. For m = 3 mod 4 a '-' block
/// negates all generators, which flips the sign of the central element
/// J_1 ... J_m; the '+' block for m = 3 has J_1 J_2 J_3 = +I.
inline CliffordRepresentation build_representation(int m, int multiplicity, const std::vector<int>& chirality_pattern = {}) {
  if (m < 1) throw std::invalid_argument("build_representation requires m >= 1");
  if (multiplicity < 1) throw std::invalid_argument("build_representation requires multiplicity >= 1");
  if (!chirality_pattern.empty() && static_cast<int>(chirality_pattern.size()) != multiplicity)
    throw std::invalid_argument("chirality pattern length must equal multiplicity");
  const auto block = detail::irreducible_generators(m);
  const int d = minimal_dimension(m);
  CliffordRepresentation rep;
  rep.m = m;
  rep.n = d * multiplicity;
  for (int a = 0; a < m; ++a) rep.generators.push_back(Eigen::MatrixXd::Zero(rep.n, rep.n));
  for (int k = 0; k < multiplicity; ++k) {
    const int sign = (m % 4 == 3 && !chirality_pattern.empty() && chirality_pattern[k] < 0) ? -1 : 1;
    for (int a = 0; a < m; ++a) rep.generators[a].block(k * d, k * d, d, d) = sign * block[a];
  }
  return rep;
}

struct AlgebraReport {
  int lie_dimension = 0;
  bool closed_under_bracket = false;
  std::optional<int> sigma_scalar;
};

/// Dimension of the span of a set of matrices (flattened), by SVD rank.
inline int matrix_span_rank(const std::vector<Eigen::MatrixXd>& mats, double tol = 1e-9) {
  if (mats.empty()) return 0;
  const Eigen::Index sz = mats.front().size();
  Eigen::MatrixXd A(sz, static_cast<Eigen::Index>(mats.size()));
  for (std::size_t k = 0; k < mats.size(); ++k) A.col(k) = Eigen::Map<const Eigen::VectorXd>(mats[k].data(), sz);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  int r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++r;
  return r;
}

/// Lie algebra generated by the matrices under commutators, by iterated closure.
inline std::vector<Eigen::MatrixXd> lie_closure(const std::vector<Eigen::MatrixXd>& generators, double tol = 1e-9) {
  std::vector<Eigen::MatrixXd> basis;
  auto try_add = [&](const Eigen::MatrixXd& x) {
    auto trial = basis;
    trial.push_back(x);
    if (matrix_span_rank(trial, tol) > static_cast<int>(basis.size())) {
      basis.push_back(x);
      return true;
    }
    return false;
  };
  for (const auto& g : generators) try_add(g);
  bool grew = true;
  while (grew) {
    grew = false;
    const std::size_t count = basis.size();
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = i + 1; j < count; ++j)
        if (try_add(basis[i] * basis[j] - basis[j] * basis[i])) grew = true;
  }
  return basis;
}

/// Classifies the Lie algebra generated by {J_1..J_m} from a set of skew matrices.
inline AlgebraReport analyze_j_algebra(const std::vector<Eigen::MatrixXd>& js, double tol = 1e-9) {
  AlgebraReport report;
  report.lie_dimension = static_cast<int>(lie_closure(js, tol).size());
  report.closed_under_bracket = report.lie_dimension == matrix_span_rank(js, tol);
  if (js.size() == 3) {
    const Eigen::MatrixXd sigma = js[0] * js[1] * js[2];
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols());
    if ((sigma - I).cwiseAbs().maxCoeff() < tol)
      report.sigma_scalar = 1;
    else if ((sigma + I).cwiseAbs().maxCoeff() < tol)
      report.sigma_scalar = -1;
  }
  return report;
}

inline AlgebraReport analyze_j_algebra(const CliffordRepresentation& rep, double tol = 1e-9) {
  return analyze_j_algebra(rep.generators, tol);
}

// JSON: {"m": int, "n": int, "generators": [[[row], ...], ...]}; a flat row-major
// list of n*n numbers is also accepted per generator on input.
inline nlohmann::json to_json(const CliffordRepresentation& rep) {
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : rep.generators) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < rep.n; ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < rep.n; ++c) row.push_back(g(r, c));
      rows.push_back(row);
    }
    gens.push_back(rows);
  }
  return {{"m", rep.m}, {"n", rep.n}, {"generators", gens}};
}

inline CliffordRepresentation representation_from_json(const nlohmann::json& j) {
  CliffordRepresentation rep;
  if (!j.is_object() || !j.contains("m") || !j.contains("n") || !j.contains("generators"))
    throw std::invalid_argument("representation JSON requires m, n, generators");
  rep.m = j.at("m").get<int>();
  rep.n = j.at("n").get<int>();
  const auto& gens = j.at("generators");
  if (rep.m < 1 || rep.n < 1 || !gens.is_array() || static_cast<int>(gens.size()) != rep.m)
    throw std::invalid_argument("representation JSON: generator count must equal m");
  for (const auto& g : gens) {
    Eigen::MatrixXd M(rep.n, rep.n);
    if (g.is_array() && static_cast<int>(g.size()) == rep.n * rep.n && !g.front().is_array()) {
      for (int k = 0; k < rep.n * rep.n; ++k) M(k / rep.n, k % rep.n) = g[k].get<double>();
    } else if (g.is_array() && static_cast<int>(g.size()) == rep.n) {
      for (int r = 0; r < rep.n; ++r) {
        if (!g[r].is_array() || static_cast<int>(g[r].size()) != rep.n)
          throw std::invalid_argument("representation JSON: generator rows must have length n");
        for (int c = 0; c < rep.n; ++c) M(r, c) = g[r][c].get<double>();
      }
    } else {
      throw std::invalid_argument("representation JSON: generator must be n x n");
    }
    rep.generators.push_back(M);
  }
  return rep;
}

}  // namespace htf
