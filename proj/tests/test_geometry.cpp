#include <gtest/gtest.h>

#include <cmath>

#include "htf/catalog.hpp"

using namespace htf;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// frame (dx, dy, dz + x dy) with coframe (dx, dy - x dz, dz): the vertical line
// field is not bundle-like for the metric making this frame orthonormal
FoliationModel malformed_model() {
  const std::size_t N = 3;
  const Polynomial x = Polynomial::variable(N, 0);
  PolyField v = coordinate_field(N, 2);
  v[1] = x;
  std::vector<std::vector<Polynomial>> coframe(N, std::vector<Polynomial>(N, Polynomial(N)));
  coframe[0][0] = Polynomial::constant(N, 1.0);
  coframe[1][1] = Polynomial::constant(N, 1.0);
  coframe[1][2] = -1.0 * x;
  coframe[2][2] = Polynomial::constant(N, 1.0);
  return make_frame_model("malformed", "custom", {coordinate_field(N, 0), coordinate_field(N, 1), v}, coframe, 2);
}

// J + 2J on R^4: a two-step group whose torsion is not isotropic
FoliationModel anisotropic_model() {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(4, 4);
  J(0, 1) = -1;
  J(1, 0) = 1;
  J(2, 3) = -2;
  J(3, 2) = 2;
  return two_step_group({J}, "anisotropic", "custom");
}

}  // namespace

TEST(Models, HeisenbergBracketIsTheGenerator) {
  const auto model = catalog_model("heisenberg");
  const auto& X = model.horizontal_spanning_fields;
  const PolyField br = bracket(X[0], X[1]);
  const double J01 = model.rep->generators[0](0, 1);
  EXPECT_NE(J01, 0.0);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_TRUE(br[k].is_zero());
  EXPECT_EQ(br[2], Polynomial::constant(3, J01));
}

TEST(Models, GroupBracketsFollowTheRepresentation) {
  for (const std::string name : {"heisenberg-quat", "htype-cl2", "cl3-mixed"}) {
    const auto model = catalog_model(name);
    const auto& X = model.horizontal_spanning_fields;
    const std::size_t n = model.n;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const PolyField br = bracket(X[i], X[j]);
        for (std::size_t a = 0; a < model.m; ++a)
          EXPECT_EQ(br[n + a], Polynomial::constant(model.N, model.rep->generators[a](i, j)).pruned(0.0)) << name;
      }
  }
}

TEST(Models, SphereFieldsAreTangentAndVerticalOrthonormal) {
  for (const std::string name : {"complex-hopf-s5", "quaternionic-hopf-s7"}) {
    const auto model = catalog_model(name);
    const auto pts = sample_points(model.chart(), 4, 9);
    for (const auto& p : pts) {
      Eigen::MatrixXd Z(model.N, model.m);
      for (std::size_t a = 0; a < model.m; ++a) Z.col(a) = detail::to_vector(evaluate(model.vertical_fields[a], p));
      const Eigen::VectorXd x = detail::to_vector(p);
      EXPECT_LT(max_abs(Z.transpose() * Z - Eigen::MatrixXd::Identity(model.m, model.m)), 1e-14);
      EXPECT_LT(max_abs(Z.transpose() * x), 1e-14);
      for (const auto& h : model.horizontal_spanning_fields) {
        const Eigen::VectorXd hv = detail::to_vector(evaluate(h, p));
        EXPECT_LT(std::abs(hv.dot(x)), 1e-14);
        EXPECT_LT(max_abs(Z.transpose() * hv), 1e-14);
      }
    }
  }
}

TEST(Realization, JetsAgreeWithPolynomials) {
  const auto model = catalog_model("quaternionic-hopf-s7");
  const Point p = sample_points(model.chart(), 1, 3)[0];
  const auto rp = realize(model);
  const auto rj = realize(model, p, 2);
  for (std::size_t k = 0; k < rp.horizontal.size(); ++k)
    for (std::size_t l = 0; l < model.N; ++l) {
      EXPECT_NEAR(rj.horizontal[k][l].value(), rp.horizontal[k][l](p), 1e-14);
      for (std::size_t i = 0; i < model.N; ++i)
        EXPECT_NEAR(rj.horizontal[k][l].derivative(i).value(), rp.horizontal[k][l].derivative(i)(p), 1e-13);
    }
  // torsion through both scalar types
  const PolyField tp = torsion(rp, rp.horizontal[0], rp.horizontal[1]);
  const JetField tj = torsion(rj, rj.horizontal[0], rj.horizontal[1]);
  for (std::size_t l = 0; l < model.N; ++l) EXPECT_NEAR(tj[l].value(), tp[l](p), 1e-13);
}

TEST(Frame, AdaptedFrameIsOrthonormalAndSplit) {
  for (const std::string name : {"heisenberg-quat", "complex-hopf-s3", "quaternionic-hopf-s11"}) {
    const auto model = catalog_model(name);
    for (const auto& p : sample_points(model.chart(), 3, 5)) {
      PointGeometry g(model, p);
      const auto& E = g.frame_fields();
      const auto& r = g.realization();
      for (std::size_t u = 0; u < g.d(); ++u) {
        for (std::size_t w = 0; w < g.d(); ++w)
          EXPECT_NEAR(inner_g(r, E[u], E[w]).value(), u == w ? 1.0 : 0.0, 1e-13) << name;
        const JetField h = pi_H(r, E[u]), v = pi_V(r, E[u]);
        const auto hv = values(h), vv = values(v), ev = values(E[u]);
        for (std::size_t l = 0; l < model.N; ++l) {
          EXPECT_NEAR(u < g.n() ? hv[l] : vv[l], ev[l], 1e-13);
          EXPECT_NEAR(u < g.n() ? vv[l] : hv[l], 0.0, 1e-13);
        }
      }
    }
  }
}

TEST(Frame, TorsionAtTheOriginIsTheRepresentation) {
  const auto model = catalog_model("heisenberg-quat");
  PointGeometry g(model, Point(model.N, 0.0));
  for (std::size_t a = 0; a < model.m; ++a) EXPECT_LT(max_abs(g.J(a) - model.rep->generators[a]), 1e-14);
}

TEST(Connection, KoszulConnectionIsMetricAndTorsionFree) {
  for (const std::string name : {"heisenberg-quat", "complex-hopf-s5", "quaternionic-hopf-s7"}) {
    const auto model = catalog_model(name);
    const Point p = sample_points(model.chart(), 1, 17)[0];
    PointGeometry g(model, p);
    auto& calc = g.calculus();
    const std::size_t d = g.d(), n = g.n();
    for (double s : {1.0, 0.25, 3.0}) {
      auto sc = [&](std::size_t a) { return a >= n ? s : 1.0; };
      for (std::size_t u = 0; u < d; ++u)
        for (std::size_t w = 0; w < d; ++w) {
          const auto D_uw = calc.levi_civita_jets(u, w, s);
          const auto D_wu = calc.levi_civita_jets(w, u, s);
          const Eigen::VectorXd c = calc.bracket_components(u, w);
          for (std::size_t k = 0; k < d; ++k) EXPECT_NEAR(D_uw[k].value() - D_wu[k].value(), c(k), 1e-12) << name;
          for (std::size_t b = 0; b < d; ++b) {
            const auto D_ub = calc.levi_civita_jets(u, b, s);
            const double lhs = (w >= n && b >= n ? s : 1.0) * calc.gram_derivative(u, w, b).value();
            EXPECT_NEAR(lhs, D_uw[b].value() * sc(b) + D_ub[w].value() * sc(w), 1e-12) << name;
          }
        }
    }
  }
}

TEST(Connection, BottConnectionIsMetricWithTorsionT) {
  for (const std::string name : {"cl3-mixed", "quaternionic-hopf-s7"}) {
    const auto model = catalog_model(name);
    const Point p = sample_points(model.chart(), 1, 23)[0];
    PointGeometry g(model, p);
    auto& bc = g.bott_curvature();
    auto& calc = g.calculus();
    const std::size_t d = g.d(), n = g.n();
    for (std::size_t u = 0; u < d; ++u)
      for (std::size_t w = 0; w < d; ++w) {
        const Eigen::VectorXd c = calc.bracket_components(u, w);
        for (std::size_t k = 0; k < d; ++k) {
          double T = 0.0;
          if (u < n && w < n && k >= n) T = g.tor(k - n, u, w);
          EXPECT_NEAR(bc.omega_value(u, w, k) - bc.omega_value(w, u, k) - c(k), T, 1e-12) << name;
          EXPECT_NEAR(calc.gram_derivative(u, w, k).value(), bc.omega_value(u, w, k) + bc.omega_value(u, k, w), 1e-12);
        }
      }
  }
}

TEST(Connection, CurvatureRoutesAgree) {
  // curvature from the field-level connections against the Koszul frame route
  for (const std::string name : {"heisenberg-quat", "quaternionic-hopf-s7"}) {
    const auto model = catalog_model(name);
    const Point p = sample_points(model.chart(), 1, 31)[0];
    PointGeometry g(model, p);
    const auto& r = g.realization();
    ConnectionCurvature field_bott([&r](const JetField& a, const JetField& b) { return bott(r, a, b); }, &g.calculus());
    const double eps_prime = 0.7;
    ConnectionCurvature field_var(
        [&r, eps_prime](const JetField& a, const JetField& b) { return variation_levi_civita(r, eps_prime, a, b); },
        &g.calculus());
    auto koszul_var = g.variation_curvature(eps_prime);
    for (std::size_t u = 0; u < g.d(); ++u)
      for (std::size_t v = u + 1; v < g.d(); ++v)
        for (std::size_t w = 0; w < g.d(); ++w) {
          EXPECT_LT((field_bott.apply(u, v, w) - g.bott_curvature().apply(u, v, w)).cwiseAbs().maxCoeff(), 1e-11) << name;
          EXPECT_LT((field_var.apply(u, v, w) - koszul_var.apply(u, v, w)).cwiseAbs().maxCoeff(), 1e-11) << name;
        }
  }
}

TEST(Connection, RoundSphereHasConstantCurvatureOne) {
  // at epsilon = 1 the variation with eps' = 1 is the round metric
  const auto model = catalog_model("round-s7-unnormalized");
  const Point p = sample_points(model.chart(), 1, 2)[0];
  PointGeometry g(model, p);
  auto R = g.variation_curvature(1.0);
  const std::size_t d = g.d();
  for (std::size_t u = 0; u < d; ++u)
    for (std::size_t v = 0; v < d; ++v)
      for (std::size_t w = 0; w < d; ++w) {
        // R(E_u,E_v)E_w = <E_v,E_w> E_u - <E_u,E_w> E_v
        Eigen::VectorXd expected = Eigen::VectorXd::Zero(d);
        if (v == w) expected(u) += 1.0;
        if (u == w) expected(v) -= 1.0;
        EXPECT_LT((R.apply(u, v, w) - expected).cwiseAbs().maxCoeff(), 1e-12);
      }
}

TEST(Connection, FlatGroupDirectionHasNoCurvatureForHeisenbergBott) {
  const auto model = catalog_model("heisenberg");
  PointGeometry g(model, {0.3, -0.2, 0.9});
  for (std::size_t u = 0; u < 3; ++u)
    for (std::size_t v = 0; v < 3; ++v) EXPECT_LT(max_abs(g.curvature_block(u, v)), 1e-14);
}

TEST(Axioms, CatalogModelsPass) {
  for (const auto& spec : catalog()) {
    const auto model = spec.build();
    Sample s(model, 4, 42);
    const auto r = check_foliation_axioms(s);
    EXPECT_TRUE(r.pass) << spec.name << " residual " << r.max_residual;
  }
}

TEST(Axioms, MalformedModelIsRejected) {
  const auto model = malformed_model();
  Sample s(model, 4, 42);
  const auto r = check_foliation_axioms(s);
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(std::isfinite(r.max_residual));
  EXPECT_GT(r.max_residual, 1e-3);
}

TEST(HType, AnisotropicModelIsNotNormalizable) {
  const auto model = anisotropic_model();
  Sample s(model, 4, 42);
  EXPECT_TRUE(check_foliation_axioms(s).pass);
  const auto r = check_h_type(s);
  EXPECT_FALSE(r.pass);
  // |J X|^2 is |X|^2 on one block and 4|X|^2 on the other
  EXPECT_NEAR(r.details["lambda"].get<double>(), 2.5, 1e-12);
  EXPECT_NEAR(r.details["isotropy_residual"].get<double>(), 1.5, 1e-12);
  EXPECT_THROW(normalize_to_htype(model), NotNormalizableError);
}

TEST(HType, LambdaScalesInverselyWithEpsilon) {
  const auto base = catalog_model("round-s3-unnormalized");
  for (double eps : {1.0, 2.0, 4.0, 8.0}) {
    const auto model = canonical_variation(base, eps);
    Sample s(model, 4, 42);
    EXPECT_NEAR(fit_lambda(s).mean, 4.0 / eps, 1e-12);
  }
  const auto [normalized, lambda] = normalize_to_htype(base);
  EXPECT_NEAR(lambda, 4.0, 1e-12);
  EXPECT_NEAR(normalized.epsilon, 4.0, 1e-12);
}

TEST(Models, LoaderValidatesInput) {
  EXPECT_THROW(load_model(nlohmann::json{{"kind", "nope"}}), ModelSchemaError);
  EXPECT_THROW(load_model(nlohmann::json{{"kind", "htype-group"}}), ModelSchemaError);
  EXPECT_THROW(load_model(nlohmann::json{{"kind", "complex-hopf"}, {"k", 1}, {"epsilon", -1.0}}), ModelSchemaError);
  EXPECT_THROW(load_model(nlohmann::json::array()), ModelSchemaError);
  // symmetric generator
  nlohmann::json sym = {{"kind", "htype-group"}, {"rep", {{"m", 1}, {"n", 2}, {"generators", {{{0.0, 1.0}, {1.0, 0.0}}}}}}};
  EXPECT_THROW(load_model(sym), InvalidModelError);
  EXPECT_THROW(catalog_model("no-such-model"), UnknownModelError);

  const auto hq = load_model(nlohmann::json{{"kind", "htype-group"}, {"name", "hq"}, {"rep", {{"m", 3}, {"multiplicity", 1}}}});
  EXPECT_EQ(hq.n, 4u);
  EXPECT_EQ(hq.m, 3u);
  const auto s7 = load_model(nlohmann::json{{"kind", "quaternionic-hopf"}, {"k", 1}});
  EXPECT_EQ(s7.epsilon, 4.0);
  EXPECT_EQ(s7.N, 8u);
}

TEST(Models, ModelJsonRoundTrip) {
  for (const auto& spec : catalog()) {
    const auto model = spec.build();
    const auto j = model_to_json(model);
    EXPECT_EQ(j["name"], spec.name);
    const auto back = load_model(j, 2);
    EXPECT_EQ(back.N, model.N);
    EXPECT_EQ(back.epsilon, model.epsilon);
    EXPECT_EQ(back.horizontal_spanning_fields.size(), model.horizontal_spanning_fields.size());
    for (std::size_t k = 0; k < model.horizontal_spanning_fields.size(); ++k)
      for (std::size_t l = 0; l < model.N; ++l) EXPECT_EQ(back.horizontal_spanning_fields[k][l], model.horizontal_spanning_fields[k][l]);
  }
}
