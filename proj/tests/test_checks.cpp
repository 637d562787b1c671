#include <gtest/gtest.h>

#include <cmath>

#include "htf/catalog.hpp"

using namespace htf;

namespace {

const std::vector<std::string> kGroups = {"heisenberg", "heisenberg-quat", "heisenberg-oct", "htype-cl2", "cl3-mixed"};
const std::vector<std::string> kQuaternionic = {"quaternionic-hopf-s7", "quaternionic-hopf-s11"};

std::size_t points_for(const FoliationModel& m) { return m.N > 12 ? 2 : 4; }

}  // namespace

TEST(HType, NormalizedCatalogModelsHaveUnitLambda) {
  for (const auto& spec : catalog()) {
    if (!spec.normalized) continue;
    const auto model = spec.build();
    Sample s(model, points_for(model), 42);
    const auto r = check_h_type(s);
    EXPECT_TRUE(r.pass) << spec.name << " " << r.max_residual;
  }
}

TEST(HType, RoundSpheresHaveLambdaFour) {
  for (const std::string name : {"round-s3-unnormalized", "round-s7-unnormalized"}) {
    const auto model = catalog_model(name);
    Sample s(model, 4, 42);
    const auto fit = fit_lambda(s);
    EXPECT_NEAR(fit.min, 4.0, 1e-12) << name;
    EXPECT_NEAR(fit.max, 4.0, 1e-12) << name;
    EXPECT_LT(fit.isotropy_residual, 1e-12);
    EXPECT_FALSE(check_h_type(s).pass);
  }
}

TEST(Torsion, YangMillsEverywhere) {
  for (const auto& spec : catalog()) {
    const auto model = spec.build();
    Sample s(model, points_for(model), 42);
    EXPECT_TRUE(check_yang_mills(s).pass) << spec.name;
  }
}

TEST(Torsion, ClassesMatchTheCatalog) {
  for (const auto& spec : catalog()) {
    const auto model = spec.build();
    Sample s(model, points_for(model), 42);
    const auto t = torsion_residuals(s);
    EXPECT_EQ(classify(t, 1e-9), spec.expected_class) << spec.name;
    EXPECT_TRUE(check_torsion_class(s, 1e-9, spec.expected_class).pass) << spec.name;
  }
  // quaternionic Hopf torsion is not parallel in vertical directions
  const auto s7 = catalog_model("quaternionic-hopf-s7");
  Sample s(s7, 4, 42);
  EXPECT_GT(torsion_residuals(s).full, 0.1);
  EXPECT_FALSE(check_torsion_class(s, 1e-9, TorsionClass::completely_parallel).pass);
}

TEST(Clifford, KappaOnQuaternionicHopf) {
  for (const auto& name : kQuaternionic) {
    const auto model = catalog_model(name);
    Sample s(model, 3, 42);
    const auto r = check_parallel_clifford(s);
    EXPECT_TRUE(r.pass) << name;
    EXPECT_NEAR(r.details["kappa"].get<double>(), 2.0, 1e-8) << name;
  }
}

TEST(Clifford, KappaVanishesOnGroups) {
  for (const auto& name : kGroups) {
    const auto model = catalog_model(name);
    Sample s(model, 2, 42);
    const auto r = check_parallel_clifford(s);
    EXPECT_TRUE(r.pass) << name;
    EXPECT_NEAR(r.details["kappa"].get<double>(), 0.0, 1e-12) << name;
  }
}

TEST(Clifford, PreconditionsAreEnforced) {
  const auto round = catalog_model("round-s7-unnormalized");
  Sample s(round, 2, 42);
  EXPECT_THROW(check_parallel_clifford(s), InvalidModelError);
}

TEST(Clifford, VerticalSectionalIsKappaSquared) {
  // the fibres are round 3-spheres of radius 1/2 when epsilon = 4
  const auto model = catalog_model("quaternionic-hopf-s7");
  Sample s(model, 4, 42);
  const auto r = check_vertical_sectional(s, 2.0);
  EXPECT_TRUE(r.pass) << r.max_residual;
  EXPECT_NEAR(r.details["sectional_min"].get<double>(), 4.0, 1e-10);
  EXPECT_FALSE(check_vertical_sectional(s, 1.5).pass);
}

TEST(Clifford, QuaternionicDetection) {
  const auto s7 = catalog_model("quaternionic-hopf-s7");
  const auto q = detect_quaternionic(s7, sample_points(s7.chart(), 1, 1)[0]);
  EXPECT_EQ(q.status, QuaternionicReport::Status::quaternionic);
  const auto mixed = catalog_model("cl3-mixed");
  const auto r = detect_quaternionic(mixed, Point(mixed.N, 0.1));
  EXPECT_EQ(r.status, QuaternionicReport::Status::non_quaternionic);
  EXPECT_EQ(r.plus_dim, 4);
  EXPECT_EQ(r.minus_dim, 4);
  const auto h = catalog_model("heisenberg");
  EXPECT_EQ(detect_quaternionic(h, Point(3, 0.0)).status, QuaternionicReport::Status::not_applicable);
}

TEST(Einstein, QuaternionicHopfRicci) {
  const std::vector<std::pair<std::string, double>> cases = {{"quaternionic-hopf-s7", 12.0}, {"quaternionic-hopf-s11", 16.0}};
  for (const auto& [name, value] : cases) {
    const auto model = catalog_model(name);
    Sample s(model, 3, 42);
    for (std::size_t k = 0; k < s.size(); ++k) {
      const Eigen::MatrixXd ric = s.at(k).ricci_h();
      EXPECT_LT((ric - value * Eigen::MatrixXd::Identity(model.n, model.n)).cwiseAbs().maxCoeff(), 1e-8) << name;
    }
    const auto r = check_einstein(s, 2.0);
    EXPECT_TRUE(r.pass) << name;
    EXPECT_EQ(r.details["formula"], "kappa*(n/2+4)");
    EXPECT_FALSE(check_einstein(s, 1.0).pass);
    EXPECT_NEAR(min_ricci(s), value, 1e-8);
  }
}

TEST(Einstein, GroupsAreHorizontallyRicciFlat) {
  for (const auto& name : kGroups) {
    const auto model = catalog_model(name);
    Sample s(model, 2, 42);
    for (std::size_t k = 0; k < s.size(); ++k) EXPECT_LT(s.at(k).ricci_h().cwiseAbs().maxCoeff(), 1e-9) << name;
    if (model.m >= 2) EXPECT_TRUE(check_einstein(s, 0.0).pass) << name;
  }
  Sample s(catalog_model("heisenberg"), 1, 42);
  EXPECT_THROW(check_einstein(s, 0.0), std::invalid_argument);
}

TEST(Einstein, ComplexHopfRicciFromCurvature) {
  // S^{2k+1} with epsilon = 4: Ric_H = (n + 2) g_H, checked against S^3 and S^5
  for (const std::string name : {"complex-hopf-s3", "complex-hopf-s5"}) {
    const auto model = catalog_model(name);
    Sample s(model, 3, 42);
    for (std::size_t k = 0; k < s.size(); ++k) {
      const Eigen::MatrixXd ric = s.at(k).ricci_h();
      EXPECT_LT((ric - (model.n + 2.0) * Eigen::MatrixXd::Identity(model.n, model.n)).cwiseAbs().maxCoeff(), 1e-9) << name;
    }
  }
}

TEST(Constancy, NormalizedSpheres) {
  for (const std::string name : {"quaternionic-hopf-s7", "complex-hopf-s3", "quaternionic-hopf-s11"}) {
    const auto model = catalog_model(name);
    Sample s(model, 3, 42);
    const auto r = check_curvature_constancy(s, 2.0);
    EXPECT_TRUE(r.pass) << name << " " << r.max_residual;
    EXPECT_LT(r.details["round_metric_residual"].get<double>(), 1e-12);
    EXPECT_FALSE(check_curvature_constancy(s, 1.0).pass) << name;
  }
  Sample s(catalog_model("complex-hopf-s3"), 1, 42);
  EXPECT_THROW(check_curvature_constancy(s, 0.0), std::invalid_argument);
}

TEST(Constancy, OneillFormulas) {
  for (const std::string name : {"quaternionic-hopf-s7", "cl3-mixed", "complex-hopf-s5"}) {
    const auto model = catalog_model(name);
    Sample s(model, 2, 42);
    EXPECT_TRUE(check_oneill(s).pass) << name;
  }
}

TEST(Lemmas, IdentitiesHoldOnCatalog) {
  for (const std::string name : {"heisenberg-quat", "htype-cl2", "cl3-mixed", "quaternionic-hopf-s7"}) {
    const auto model = catalog_model(name);
    Sample s(model, 3, 42);
    const double kappa = model.backend == Backend::sphere ? 2.0 : 0.0;
    const auto reports = check_lemma_identities(s, kappa);
    EXPECT_EQ(reports.size(), 6u) << name;
    for (const auto& r : reports) EXPECT_TRUE(r.pass) << name << " " << r.check << " " << r.max_residual;
  }
}

TEST(Lemmas, WrongKappaIsDetected) {
  const auto model = catalog_model("quaternionic-hopf-s7");
  Sample s(model, 2, 42);
  EXPECT_TRUE(check_commutator_kappa(s, 2.0).pass);
  EXPECT_FALSE(check_commutator_kappa(s, 3.0).pass);
}

TEST(Lemmas, HypothesesGateTheSuite) {
  // lambda = 4 is not H-type, so only the horizontally parallel identities run
  const auto model = catalog_model("round-s7-unnormalized");
  Sample s(model, 2, 42);
  const auto reports = check_lemma_identities(s);
  EXPECT_EQ(reports.size(), 3u);
}

TEST(Reports, JsonShapeAndDeterminism) {
  const auto model = catalog_model("htype-cl2");
  Sample a(model, 4, 7), b(model, 4, 7);
  const auto ja = to_json(check_h_type(a)), jb = to_json(check_h_type(b));
  EXPECT_EQ(ja.dump(), jb.dump());
  for (const char* key : {"check", "status", "max_residual", "tolerance", "points", "details"}) EXPECT_TRUE(ja.contains(key)) << key;
  EXPECT_EQ(ja["status"], "pass");
  EXPECT_EQ(ja["points"], 4);
}

TEST(Reports, NonFiniteResidualFails) {
  EXPECT_FALSE(make_report("x", NAN, 1.0, 1).pass);
  EXPECT_FALSE(make_report("x", INFINITY, 1.0, 1).pass);
  EXPECT_TRUE(make_report("x", 0.5, 1.0, 1).pass);
}
