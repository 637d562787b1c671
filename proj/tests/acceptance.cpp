// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "htf/htf.hpp"

using namespace htf;

namespace {

struct Outcome {
  bool pass = true;
  std::string note;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!note.empty()) note += "; ";
      note += what;
    }
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const std::vector<std::string> kGroups = {"heisenberg", "heisenberg-quat", "heisenberg-oct", "htype-cl2", "cl3-mixed"};
const std::vector<std::string> kHopf = {"complex-hopf-s3", "complex-hopf-s5", "quaternionic-hopf-s7", "quaternionic-hopf-s11"};

bool contains(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

// Radon-Hurwitz by the doubling recursion: d(m + 8) = 16 d(m).
int rh_oracle(int m) {
  static const int base[] = {1, 2, 4, 4, 8, 8, 8, 8, 16};
  int scale = 1;
  while (m > 8) {
    m -= 8;
    scale *= 16;
  }
  return base[m] * scale;
}

Outcome clifford_relations() {
  Outcome o;
  for (int m = 1; m <= 8; ++m)
    for (int mult = 1; mult <= 2; ++mult) {
      const auto rep = build_representation(m, mult);
      const double r = rep.relation_residual();
      o.require(r < 1e-12, "m=" + std::to_string(m) + " residual " + num(r));
      o.require(rep.n == mult * minimal_dimension(m), "m=" + std::to_string(m) + " dimension");
    }
  for (int m = 1; m <= 24; ++m) o.require(minimal_dimension(m) == rh_oracle(m), "minimal_dimension(" + std::to_string(m) + ")");
  return o;
}

Outcome axioms_and_htype() {
  Outcome o;
  for (const auto& spec : catalog()) {
    const auto model = spec.build();
    Sample s(model, 64, 42);
    const auto ax = check_foliation_axioms(s);
    o.require(ax.pass, spec.name + " axioms " + num(ax.max_residual));
    if (spec.normalized) {
      const auto h = check_h_type(s);
      o.require(h.pass, spec.name + " h-type " + num(h.max_residual));
    } else {
      const auto fit = fit_lambda(s);
      o.require(std::abs(fit.min - 4.0) < 1e-9 && std::abs(fit.max - 4.0) < 1e-9, spec.name + " lambda " + num(fit.mean));
      auto [normalized, lambda] = normalize_to_htype(model, 64, 42);
      Sample ns(normalized, 64, 42);
      const auto h = check_h_type(ns);
      o.require(h.pass, spec.name + " normalized h-type " + num(h.max_residual));
    }
  }
  o.require(catalog().size() >= 6, "catalog too small");
  return o;
}

Outcome yang_mills() {
  Outcome o;
  for (const auto& spec : catalog()) {
    const auto model = spec.build();
    Sample s(model, 64, 42);
    const auto r = check_yang_mills(s);
    o.require(r.pass && r.max_residual < 1e-9, spec.name + " " + num(r.max_residual));
  }
  return o;
}

Outcome torsion_classes() {
  Outcome o;
  for (const auto& spec : catalog()) {
    const auto model = spec.build();
    Sample s(model, 64, 42);
    const auto t = torsion_residuals(s);
    o.require(classify(t, 1e-9) == spec.expected_class, spec.name + " class " + to_string(classify(t, 1e-9)));
    if (contains(kGroups, spec.name)) o.require(t.full < 1e-9, spec.name + " full " + num(t.full));
    if (contains(kHopf, spec.name)) o.require(t.horizontal < 1e-9, spec.name + " horizontal " + num(t.horizontal));
  }
  return o;
}

Outcome kappa_extraction() {
  Outcome o;
  for (const std::string name : {"quaternionic-hopf-s7", "quaternionic-hopf-s11"}) {
    const auto model = catalog_model(name);
    Sample s(model, 8, 42);
    const auto r = check_parallel_clifford(s);
    const double kappa = r.details["kappa"].get<double>();
    o.require(r.pass && r.max_residual < 1e-9, name + " psi-fit " + num(r.max_residual));
    o.require(std::abs(kappa - 2.0) < 1e-8, name + " kappa " + num(kappa));
    const auto v = check_vertical_sectional(s, 2.0, 1e-8);
    o.require(v.pass, name + " vertical sectional " + num(v.max_residual));
  }
  for (const auto& name : kGroups) {
    const auto model = catalog_model(name);
    Sample s(model, 4, 42);
    const auto r = check_parallel_clifford(s);
    o.require(r.pass && std::abs(r.details["kappa"].get<double>()) < 1e-8, name + " kappa");
  }
  return o;
}

Outcome horizontal_einstein() {
  Outcome o;
  const std::vector<std::pair<std::string, double>> spheres = {{"quaternionic-hopf-s7", 12.0}, {"quaternionic-hopf-s11", 16.0}};
  for (const auto& [name, value] : spheres) {
    const auto model = catalog_model(name);
    Sample s(model, 16, 42);
    double res = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k)
      res = std::max(res, (s.at(k).ricci_h() - value * Eigen::MatrixXd::Identity(model.n, model.n)).cwiseAbs().maxCoeff());
    o.require(res < 1e-8, name + " Ric_H residual " + num(res));
    o.require(check_einstein(s, 2.0).pass, name + " formula");
  }
  for (const auto& name : kGroups) {
    const auto model = catalog_model(name);
    if (model.m < 2) continue;
    Sample s(model, 8, 42);
    double res = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) res = std::max(res, s.at(k).ricci_h().cwiseAbs().maxCoeff());
    o.require(res < 1e-9, name + " Ric_H " + num(res));
  }
  return o;
}

Outcome curvature_constancy() {
  Outcome o;
  const auto model = catalog_model("quaternionic-hopf-s7");
  Sample s(model, 32, 42);
  const auto r = check_curvature_constancy(s, 2.0);
  o.require(r.pass && r.max_residual < 1e-9, "constancy " + num(r.max_residual));
  const double round = r.details["round_metric_residual"].get<double>();
  o.require(round < 1e-9, "round metric " + num(round));
  const auto on = check_oneill(s);
  o.require(on.pass && on.max_residual < 1e-9, "oneill " + num(on.max_residual));
  return o;
}

Outcome lemma_suite() {
  Outcome o;
  std::vector<std::string> names = kGroups;
  names.push_back("quaternionic-hopf-s7");
  for (const auto& name : names) {
    const auto model = catalog_model(name);
    Sample s(model, 8, 42);
    const double kappa = model.backend == Backend::sphere ? 2.0 : 0.0;
    const auto reports = check_lemma_identities(s, kappa);
    std::vector<std::string> seen;
    for (const auto& r : reports) {
      seen.push_back(r.check);
      o.require(r.pass, name + " " + r.check + " " + num(r.max_residual));
    }
    for (const char* c : {"lemma-skew-nabla-j", "lemma-curvature-decomposition", "lemma-commutator", "lemma-yang-mills-helper"})
      o.require(contains(seen, c), name + " missing " + c);
  }
  return o;
}

Outcome spectrum_sharpness() {
  Outcome o;
  const auto s7 = rayleigh_ritz(catalog_model("quaternionic-hopf-s7"), 2);
  const double l1 = first_nonzero(s7.eigenvalues);
  const double clifford = bounds_clifford(4, 3, 2.0, true).lambda1_bound;
  const double general = bounds_general(4, 3, 12.0).lambda1_bound;
  o.require(std::abs(l1 - 4.0) < 1e-8, "S7 lambda1 " + num(l1));
  o.require(std::abs(clifford - 4.0) < 1e-12 && std::abs(general - 4.0) < 1e-12, "bounds " + num(clifford) + "/" + num(general));
  o.require(std::abs(l1 - general) < 1e-8, "gap " + num(l1 - general));
  const auto s3 = rayleigh_ritz(catalog_model("complex-hopf-s3"), 2);
  o.require(std::abs(first_nonzero(s3.eigenvalues) - 2.0) < 1e-8, "S3 lambda1 " + num(first_nonzero(s3.eigenvalues)));
  return o;
}

Outcome cd_inequality() {
  Outcome o;
  const std::vector<std::pair<std::string, double>> cases = {{"heisenberg-quat", 0.0}, {"quaternionic-hopf-s7", 12.0}};
  for (const auto& [name, K] : cases) {
    const auto model = catalog_model(name);
    const auto fs = random_polynomials(model.N, 20, 3, 42);
    const auto pts = sample_points(model.chart(), 32, 42);
    const auto r = check_cd_inequality(model, K, fs, {0.1, 1.0, 10.0}, pts, 1e-9);
    o.require(r.pass, name + " min margin " + num(r.details["min_margin"].get<double>()));
  }
  return o;
}

Outcome bound_arithmetic() {
  Outcome o;
  const double g = bounds_general(4, 3, 12.0).diameter_bound;
  const double c = bounds_clifford(4, 3, 2.0, true).diameter_bound;
  o.require(std::abs(g - 29.471) < 1e-3, "general " + num(g));
  o.require(std::abs(c - 29.471) < 1e-3, "clifford " + num(c));
  return o;
}

Outcome self_adjointness() {
  Outcome o;
  for (const std::string name : {"complex-hopf-s3", "quaternionic-hopf-s7"}) {
    const auto model = catalog_model(name);
    for (int d = 0; d <= 3; ++d) {
      const auto r = rayleigh_ritz(model, d);
      o.require(r.asymmetry < 1e-10, name + " degree " + std::to_string(d) + " asymmetry " + num(r.asymmetry));
    }
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double budget;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "clifford relations", 1, clifford_relations},
      {2, "foliation axioms and h-type", 10, axioms_and_htype},
      {3, "yang-mills", 10, yang_mills},
      {4, "torsion classes", 10, torsion_classes},
      {5, "parallel clifford and kappa", 20, kappa_extraction},
      {6, "horizontal einstein", 30, horizontal_einstein},
      {7, "curvature constancy", 20, curvature_constancy},
      {8, "lemma identities", 30, lemma_suite},
      {9, "spectrum sharpness", 30, spectrum_sharpness},
      {10, "cd inequality", 60, cd_inequality},
      {11, "bound arithmetic", 1, bound_arithmetic},
      {12, "self-adjointness", 10, self_adjointness},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < c.budget, "over budget");
    if (!o.pass) ++failures;
    std::printf("criterion %2d %-30s %s  %6.2fs / %gs%s%s\n", c.id, c.title, o.pass ? "PASS" : "FAIL", secs, c.budget,
                o.note.empty() ? "" : "  ", o.note.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
