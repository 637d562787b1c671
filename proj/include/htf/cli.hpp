#pragma once

#include <cstdio>
#include <algorithm>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "htf/analysis.hpp"
#include "htf/catalog.hpp"

namespace htf {

namespace exit_code {
constexpr int ok = 0;
constexpr int check_failed = 1;
constexpr int usage = 2;
constexpr int unknown_model = 3;
constexpr int unsupported_backend = 4;
constexpr int invalid_bounds = 5;
}  // namespace exit_code

inline const std::vector<std::string>& default_checks() {
  static const std::vector<std::string> v = {"axioms",           "h-type",            "torsion-class",
                                             "yang-mills",       "lemma-identities",  "parallel-clifford",
                                             "einstein",         "curvature-constancy", "cd"};
  return v;
}

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> v = [] {
    auto all = default_checks();
    all.push_back("oneill");
    return all;
  }();
  return v;
}

struct RunConfig {
  std::size_t points = 64;
  std::uint64_t seed = 42;
  std::optional<double> tol;
  std::string format = "text";
  std::string out;
  std::string model_file;
  std::vector<std::string> checks;
  bool normalize = false;
  std::size_t cd_trials = 20;
};

struct Skipped {
  std::string check, reason;
};

struct VerifyResult {
  std::string model;
  std::optional<double> lambda;  // set when the model was normalized first
  std::vector<CheckReport> reports;
  std::vector<Skipped> skipped;
  bool pass() const {
    for (const auto& r : reports)
      if (!r.pass) return false;
    return true;
  }
};

inline nlohmann::json to_json(const VerifyResult& v, const RunConfig& cfg) {
  nlohmann::json reports = nlohmann::json::array(), skipped = nlohmann::json::array();
  for (const auto& r : v.reports) reports.push_back(to_json(r));
  for (const auto& s : v.skipped) skipped.push_back({{"check", s.check}, {"reason", s.reason}});
  nlohmann::json j = {{"model", v.model},  {"points", cfg.points}, {"seed", cfg.seed},
                      {"status", v.pass() ? "pass" : "fail"}, {"reports", reports}, {"skipped", skipped}};
  if (v.lambda) j["normalized_lambda"] = *v.lambda;
  return j;
}

inline VerifyResult verify_model(const FoliationModel& input, const ModelSpec* spec, const RunConfig& cfg) {
  VerifyResult out;
  FoliationModel model = input;
  if (cfg.normalize) {
    auto [normalized, lambda] = normalize_to_htype(input, std::min<std::size_t>(cfg.points, 8), cfg.seed);
    model = std::move(normalized);
    out.lambda = lambda;
  }
  out.model = model.name;
  const double tol = cfg.tol.value_or(1e-9);
  const double tol_kappa = cfg.tol.value_or(1e-8);
  std::vector<std::string> checks = cfg.checks.empty() ? default_checks() : cfg.checks;
  auto wants = [&](const std::string& c) { return std::find(checks.begin(), checks.end(), c) != checks.end(); };

  Sample s(model, cfg.points, cfg.seed);
  bool degenerate = false;
  {
    const CheckReport axioms = check_foliation_axioms(s, tol);
    degenerate = !std::isfinite(axioms.max_residual);
    if (wants("axioms")) out.reports.push_back(axioms);
  }
  if (degenerate) {
    for (const auto& c : checks)
      if (c != "axioms") out.skipped.push_back({c, "adapted frame is degenerate"});
    return out;
  }
  const CheckReport htype = check_h_type(s, tol);
  if (wants("h-type")) out.reports.push_back(htype);
  const TorsionResiduals tres = torsion_residuals(s);
  if (wants("torsion-class")) {
    std::optional<TorsionClass> expected;
    if (spec) expected = spec->expected_class;
    out.reports.push_back(check_torsion_class(s, tol, expected));
  }
  if (wants("yang-mills")) out.reports.push_back(check_yang_mills(s, tol));

  const bool hp = tres.horizontal <= tol;
  std::optional<double> kappa;
  if (htype.pass && hp) {
    CheckReport pc = check_parallel_clifford(s, tol);
    if (pc.pass) kappa = pc.details["kappa"].get<double>();
    if (spec && spec->expected_kappa && model.m >= 2) {
      pc.details["expected_kappa"] = *spec->expected_kappa;
      if (std::abs(pc.details["kappa"].get<double>() - *spec->expected_kappa) > tol_kappa) pc.pass = false;
    }
    if (wants("parallel-clifford")) out.reports.push_back(pc);
  } else if (wants("parallel-clifford")) {
    out.skipped.push_back({"parallel-clifford", htype.pass ? "torsion is not horizontally parallel" : "model is not H-type"});
  }

  if (wants("lemma-identities")) {
    auto lemmas = check_lemma_identities(s, kappa, tol);
    if (lemmas.empty()) out.skipped.push_back({"lemma-identities", "no identity has its hypotheses satisfied"});
    for (auto& r : lemmas) out.reports.push_back(std::move(r));
  }

  if (wants("einstein")) {
    if (model.m < 2)
      out.skipped.push_back({"einstein", "not applicable for m = 1"});
    else if (!kappa)
      out.skipped.push_back({"einstein", "no parallel Clifford structure"});
    else
      out.reports.push_back(check_einstein(s, *kappa, tol_kappa));
  }

  if (wants("curvature-constancy") || wants("oneill")) {
    std::optional<double> ck;
    if (spec && spec->expected_kappa && *spec->expected_kappa != 0.0) ck = spec->expected_kappa;
    else if (kappa && *kappa != 0.0) ck = kappa;
    if (wants("curvature-constancy")) {
      if (!htype.pass || !hp)
        out.skipped.push_back({"curvature-constancy", "requires an H-type model with horizontally parallel torsion"});
      else if (!ck)
        out.skipped.push_back({"curvature-constancy", "kappa = 0"});
      else
        out.reports.push_back(check_curvature_constancy(s, *ck, tol));
    }
    if (wants("oneill")) out.reports.push_back(check_oneill(s, {0.5, 1.0, 2.0}, tol));
  }

  if (wants("cd")) {
    if (!htype.pass) {
      out.skipped.push_back({"cd", "model is not H-type"});
    } else {
      const double K = min_ricci(s);
      const auto fs = random_polynomials(model.N, cfg.cd_trials, 3, cfg.seed);
      out.reports.push_back(check_cd_inequality(model, K, fs, {0.1, 1.0, 10.0}, s.points(), tol));
    }
  }
  return out;
}

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline std::string notes(const CheckReport& r) {
  const auto& d = r.details;
  std::string s;
  auto add = [&](const std::string& t) { s += (s.empty() ? "" : ", ") + t; };
  if (d.contains("lambda")) add("λ=" + fmt(d["lambda"].get<double>()));
  if (d.contains("class")) add(d["class"].get<std::string>());
  if (r.check == "parallel-clifford" && d.contains("kappa")) add("κ=" + fmt(d["kappa"].get<double>()));
  if (d.contains("formula")) add(d["formula"].get<std::string>());
  if (d.contains("min_margin")) add("min margin " + fmt(d["min_margin"].get<double>()));
  if (d.contains("error")) add(d["error"].get<std::string>());
  return s;
}

inline std::string text_table(const VerifyResult& v, const RunConfig& cfg) {
  std::ostringstream o;
  o << "model: " << v.model << " (points=" << cfg.points << ", seed=" << cfg.seed << ")\n";
  if (v.lambda) o << "normalized with lambda=" << fmt(*v.lambda) << "\n";
  o << std::left << std::setw(32) << "check" << std::setw(8) << "status" << std::setw(14) << "max_residual" << std::setw(11)
    << "tolerance"
    << "notes\n";
  for (const auto& r : v.reports)
    o << std::left << std::setw(32) << r.check << std::setw(8) << (r.pass ? "pass" : "FAIL") << std::setw(14) << fmt(r.max_residual)
      << std::setw(11) << fmt(r.tolerance) << notes(r) << "\n";
  for (const auto& s : v.skipped) o << std::left << std::setw(32) << s.check << "skipped: " << s.reason << "\n";
  o << "result: " << (v.pass() ? "pass" : "FAIL") << "\n";
  return o.str();
}

inline std::string bounds_text(const BoundsResult& b) {
  std::ostringstream o;
  o << b.formula_used << " (n=" << b.n << ", m=" << b.m;
  if (b.K) o << ", K=" << fmt(*b.K);
  if (b.kappa) o << ", κ=" << fmt(*b.kappa);
  char buf[96];
  std::snprintf(buf, sizeof buf, "): λ₁ ≥ %.6g, diam ≤ %.3f\n", b.lambda1_bound, b.diameter_bound);
  o << buf;
  return o.str();
}

/// Reference lower bound for lambda_1 of a catalog-like model.
inline std::optional<BoundsResult> reference_bound(const FoliationModel& model, const ModelSpec* spec, double ric_min) {
  if (spec && spec->expected_kappa && *spec->expected_kappa > 0.0 && model.m >= 2)
    return bounds_clifford(model.n, model.m, *spec->expected_kappa, model.kind == "quaternionic-hopf");
  if (ric_min > 1e-9) return bounds_general(model.n, model.m, ric_min);
  return std::nullopt;
}

}  // namespace detail

/// Runs the command line; returns the process exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"H-type foliation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  double tol = 0.0;
  app.add_option("--points", cfg.points, "sample points")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "sampler seed");
  auto* tol_opt = app.add_option("--tol", tol, "override all check tolerances")->check(CLI::PositiveNumber);
  app.add_option("--format", cfg.format, "text | json | csv")->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--out", cfg.out, "write output to this file");
  app.add_option("--model-file", cfg.model_file, "model JSON file");

  auto* catalog_cmd = app.add_subcommand("catalog", "list built-in models");

  std::string model_name;
  bool all = false;
  std::string checks_list;
  auto* verify_cmd = app.add_subcommand("verify", "run the verification suite");
  verify_cmd->add_option("model", model_name, "catalog model name");
  verify_cmd->add_flag("--all", all, "verify every catalog model (unnormalized ones after normalization)");
  verify_cmd->add_option("--checks", checks_list, "comma-separated check list");
  verify_cmd->add_flag("--normalize", cfg.normalize, "rescale to the H-type normalization first");

  int degree = 2;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Rayleigh-Ritz spectrum of the sub-Laplacian");
  spectrum_cmd->add_option("model", model_name, "catalog model name");
  spectrum_cmd->add_option("--degree", degree, "polynomial degree bound")->check(CLI::NonNegativeNumber);

  std::size_t bn = 0, bm = 0;
  double bK = 0.0, bkappa = 0.0;
  bool quaternionic = false;
  auto* bounds_cmd = app.add_subcommand("bounds", "diameter and eigenvalue bounds");
  bounds_cmd->add_option("--n", bn, "rank of H")->required();
  bounds_cmd->add_option("--m", bm, "rank of V")->required();
  auto* K_opt = bounds_cmd->add_option("--K", bK, "horizontal Ricci lower bound");
  auto* kappa_opt = bounds_cmd->add_option("--kappa", bkappa, "parallel Clifford constant");
  bounds_cmd->add_flag("--quaternionic", quaternionic, "quaternionic branch (m = 3)");

  double cdK = 0.0;
  std::vector<double> eps_list = {0.1, 1.0, 10.0};
  auto* cd_cmd = app.add_subcommand("cd", "curvature-dimension inequality on random polynomials");
  cd_cmd->add_option("model", model_name, "catalog model name");
  auto* cdK_opt = cd_cmd->add_option("--K", cdK, "Ricci lower bound (default: measured)");
  cd_cmd->add_option("--trials", cfg.cd_trials, "number of random polynomials");
  cd_cmd->add_option("--epsilons", eps_list, "vertical weights")->delimiter(',');

  auto* report_cmd = app.add_subcommand("report", "verification, spectrum and bounds in one report");
  report_cmd->add_option("model", model_name, "catalog model name");
  report_cmd->add_option("--degree", degree, "polynomial degree bound")->check(CLI::NonNegativeNumber);

  std::vector<std::string> argv_store{"htf"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::ok : exit_code::usage;
  }
  if (*tol_opt) cfg.tol = tol;
  if (!checks_list.empty()) {
    std::stringstream ss(checks_list);
    std::string c;
    while (std::getline(ss, c, ',')) {
      if (std::find(known_checks().begin(), known_checks().end(), c) == known_checks().end()) {
        err << "unknown check: " << c << "\n";
        return exit_code::usage;
      }
      cfg.checks.push_back(c);
    }
  }

  std::ostringstream buffer;
  auto emit = [&](int code) {
    if (cfg.out.empty()) {
      out << buffer.str();
    } else {
      std::ofstream f(cfg.out);
      if (!f) {
        err << "cannot write " << cfg.out << "\n";
        return exit_code::usage;
      }
      f << buffer.str();
    }
    return code;
  };
  auto dump = [](const nlohmann::json& j) { return j.dump(2) + "\n"; };

  // model resolution: --model-file wins over a catalog name
  auto resolve = [&](FoliationModel& model, const ModelSpec*& spec) {
    spec = nullptr;
    if (!cfg.model_file.empty()) {
      std::ifstream f(cfg.model_file);
      if (!f) throw UnknownModelError("cannot read model file " + cfg.model_file);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(f);
      } catch (const nlohmann::json::exception& e) {
        throw ModelSchemaError(std::string("model file is not JSON: ") + e.what());
      }
      model = load_model(j, 8, cfg.seed);
      return;
    }
    if (model_name.empty()) throw CLI::ValidationError("model", "a model name or --model-file is required");
    spec = find_spec(model_name);
    if (!spec) throw UnknownModelError("unknown model: " + model_name);
    model = spec->build();
  };

  try {
    if (*catalog_cmd) {
      if (cfg.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& s : catalog()) arr.push_back(to_json(s));
        buffer << dump(arr);
      } else {
        for (const auto& s : catalog()) buffer << listing_line(s) << "\n";
      }
      return emit(exit_code::ok);
    }

    if (*bounds_cmd) {
      if (!*K_opt && !*kappa_opt) {
        err << "bounds: one of --K or --kappa is required\n";
        return exit_code::usage;
      }
      std::vector<BoundsResult> results;
      if (*kappa_opt) results.push_back(bounds_clifford(bn, bm, bkappa, quaternionic));
      if (*K_opt) results.push_back(bounds_general(bn, bm, bK));
      if (cfg.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& b : results) arr.push_back(to_json(b));
        buffer << dump(results.size() == 1 ? arr[0] : arr);
      } else {
        for (const auto& b : results) buffer << detail::bounds_text(b);
      }
      return emit(exit_code::ok);
    }

    if (*verify_cmd) {
      std::vector<VerifyResult> results;
      if (all) {
        for (const auto& s : catalog()) {
          RunConfig c = cfg;
          c.normalize = !s.normalized;
          results.push_back(verify_model(s.build(), &s, c));
        }
      } else {
        FoliationModel model;
        const ModelSpec* spec = nullptr;
        resolve(model, spec);
        results.push_back(verify_model(model, spec, cfg));
      }
      bool pass = true;
      for (const auto& r : results) pass = pass && r.pass();
      if (cfg.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : results) arr.push_back(to_json(r, cfg));
        buffer << dump(all ? arr : arr[0]);
      } else {
        for (const auto& r : results) buffer << detail::text_table(r, cfg);
      }
      return emit(pass ? exit_code::ok : exit_code::check_failed);
    }

    if (*spectrum_cmd || *report_cmd) {
      FoliationModel model;
      const ModelSpec* spec = nullptr;
      resolve(model, spec);
      if (model.backend != Backend::sphere)
        throw UnsupportedBackendError("spectrum needs a compact (sphere) model; " + model.name + " is a group");
      const SpectrumResult sp = rayleigh_ritz(model, degree);
      const double lambda1 = first_nonzero(sp.eigenvalues);
      Sample s(model, std::min<std::size_t>(cfg.points, 8), cfg.seed);
      const auto bound = detail::reference_bound(model, spec, min_ricci(s));
      char line[160];
      if (bound)
        std::snprintf(line, sizeof line, "measured λ₁ = %.10g vs bound %.10g (%s), gap %.3g\n", lambda1, bound->lambda1_bound,
                      bound->formula_used.c_str(), lambda1 - bound->lambda1_bound);
      else
        std::snprintf(line, sizeof line, "measured λ₁ = %.10g, no applicable bound\n", lambda1);

      if (*report_cmd) {
        const VerifyResult v = verify_model(model, spec, cfg);
        nlohmann::json sj = to_json(sp);
        if (bound) sj["bound"] = to_json(*bound);
        if (cfg.format == "json") {
          buffer << dump({{"verify", to_json(v, cfg)}, {"spectrum", sj}});
        } else {
          buffer << detail::text_table(v, cfg) << "spectrum (degree " << degree << "): " << line;
          if (bound) buffer << detail::bounds_text(*bound);
        }
        return emit(v.pass() ? exit_code::ok : exit_code::check_failed);
      }
      if (cfg.format == "csv") {
        buffer << to_csv(sp);
      } else if (cfg.format == "json") {
        nlohmann::json j = to_json(sp);
        if (bound) {
          j["bound"] = to_json(*bound);
          j["gap"] = lambda1 - bound->lambda1_bound;
        }
        buffer << dump(j);
      } else {
        buffer << "model: " << sp.model << ", degree " << sp.degree << ", basis " << sp.basis_size << ", rank " << sp.rank
               << ", gram condition " << detail::fmt(sp.gram_condition) << ", asymmetry " << detail::fmt(sp.asymmetry) << "\n";
        buffer << "eigenvalues:";
        for (double v : sp.eigenvalues) buffer << " " << detail::fmt(std::abs(v) < 1e-12 ? 0.0 : v);
        buffer << "\n" << line;
      }
      return emit(exit_code::ok);
    }

    if (*cd_cmd) {
      FoliationModel model;
      const ModelSpec* spec = nullptr;
      resolve(model, spec);
      const auto points = sample_points(model.chart(), cfg.points, cfg.seed);
      double K = cdK;
      if (!*cdK_opt) {
        Sample s(model, points);
        K = min_ricci(s);
      }
      const auto fs = random_polynomials(model.N, cfg.cd_trials, 3, cfg.seed);
      const CheckReport r = check_cd_inequality(model, K, fs, eps_list, points, cfg.tol.value_or(1e-9));
      if (cfg.format == "json") {
        buffer << dump(to_json(r));
      } else {
        VerifyResult v;
        v.model = model.name;
        v.reports.push_back(r);
        buffer << detail::text_table(v, cfg);
      }
      return emit(r.pass ? exit_code::ok : exit_code::check_failed);
    }
  } catch (const CLI::ValidationError& e) {
    err << e.what() << "\n";
    return exit_code::usage;
  } catch (const UnknownModelError& e) {
    err << e.what() << "\n";
    return exit_code::unknown_model;
  } catch (const InvalidModelError& e) {
    err << e.what() << "\n";
    return exit_code::unknown_model;
  } catch (const NotNormalizableError& e) {
    err << e.what() << "\n";
    return exit_code::unknown_model;
  } catch (const UnsupportedBackendError& e) {
    err << e.what() << "\n";
    return exit_code::unsupported_backend;
  } catch (const InvalidBoundsError& e) {
    err << e.what() << "\n";
    return exit_code::invalid_bounds;
  }
  return exit_code::usage;
}

}  // namespace htf
