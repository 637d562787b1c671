#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "htf/checks.hpp"
#include "htf/models.hpp"

namespace htf {

class UnknownModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ModelSchemaError : public InvalidModelError {
 public:
  using InvalidModelError::InvalidModelError;
};

struct ModelSpec {
  std::string name;
  std::string kind;
  std::size_t n = 0, m = 0;
  TorsionClass expected_class = TorsionClass::yang_mills_only;
  /// Constant of the parallel Clifford structure, when the model is H-type.
  std::optional<double> expected_kappa;
  bool normalized = true;
  std::string description;
  std::function<FoliationModel()> build;
};

inline std::string listing_line(const ModelSpec& s) {
  std::string kappa = "n/a";
  if (s.expected_kappa) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", *s.expected_kappa);
    kappa = buf;
  }
  return s.name + " (n=" + std::to_string(s.n) + ", m=" + std::to_string(s.m) + ", " + short_label(s.expected_class) +
         ", κ=" + kappa + ")";
}

inline const std::vector<ModelSpec>& catalog() {
  static const std::vector<ModelSpec> specs = [] {
    using TC = TorsionClass;
    std::vector<ModelSpec> v;
    auto group = [&](std::string name, int m, int mult, std::vector<int> chir, std::string desc) {
      const auto rep = build_representation(m, mult, chir);
      v.push_back({name, "htype-group", std::size_t(rep.n), std::size_t(m), TC::completely_parallel, 0.0, true, std::move(desc),
                   [rep, name] { return htype_group(rep, name); }});
    };
    group("heisenberg", 1, 1, {}, "Heisenberg group, Cl(1) on R^2");
    group("heisenberg-quat", 3, 1, {}, "quaternionic Heisenberg group, Cl(3) on R^4");
    group("heisenberg-oct", 7, 1, {}, "octonionic Heisenberg group, Cl(7) on R^8");
    group("htype-cl2", 2, 1, {}, "H-type group with m=2, Cl(2) on R^4");
    group("cl3-mixed", 3, 2, {1, -1}, "H-type group with m=3, both chiralities on R^8");
    auto complex = [&](int k, double eps, bool normalized) {
      const std::string name = normalized ? "complex-hopf-s" + std::to_string(2 * k + 1) : "round-s" + std::to_string(2 * k + 1) + "-unnormalized";
      v.push_back({name, "complex-hopf", std::size_t(2 * k), 1, TC::completely_parallel,
                   normalized ? std::optional<double>(2.0) : std::nullopt, normalized,
                   "complex Hopf fibration S^1 -> S^" + std::to_string(2 * k + 1) + (normalized ? "" : ", round metric"),
                   [k, eps, name] { return complex_hopf(k, eps, name); }});
    };
    auto quat = [&](int k, double eps, bool normalized) {
      const std::string name =
          normalized ? "quaternionic-hopf-s" + std::to_string(4 * k + 3) : "round-s" + std::to_string(4 * k + 3) + "-unnormalized";
      v.push_back({name, "quaternionic-hopf", std::size_t(4 * k), 3, TC::horizontally_parallel,
                   normalized ? std::optional<double>(2.0) : std::nullopt, normalized,
                   "quaternionic Hopf fibration SU(2) -> S^" + std::to_string(4 * k + 3) + (normalized ? "" : ", round metric"),
                   [k, eps, name] { return quaternionic_hopf(k, eps, name); }});
    };
    complex(1, 4.0, true);
    complex(2, 4.0, true);
    quat(1, 4.0, true);
    quat(2, 4.0, true);
    complex(1, 1.0, false);
    quat(1, 1.0, false);
    return v;
  }();
  return specs;
}

inline const ModelSpec* find_spec(const std::string& name) {
  for (const auto& s : catalog())
    if (s.name == name) return &s;
  return nullptr;
}

inline FoliationModel catalog_model(const std::string& name) {
  const ModelSpec* s = find_spec(name);
  if (!s) throw UnknownModelError("unknown model: " + name);
  return s->build();
}

inline nlohmann::json to_json(const ModelSpec& s) {
  return {{"name", s.name},
          {"kind", s.kind},
          {"n", s.n},
          {"m", s.m},
          {"torsion_class", to_string(s.expected_class)},
          {"torsion_label", short_label(s.expected_class)},
          {"kappa", s.expected_kappa ? nlohmann::json(*s.expected_kappa) : nlohmann::json(nullptr)},
          {"normalized", s.normalized},
          {"description", s.description}};
}

inline nlohmann::json model_to_json(const FoliationModel& model) {
  nlohmann::json j = {{"kind", model.kind}, {"name", model.name}, {"epsilon", model.epsilon}};
  if (model.rep) j["rep"] = to_json(*model.rep);
  if (model.backend == Backend::sphere) j["k"] = model.sphere_k;
  return j;
}

namespace detail {

inline CliffordRepresentation rep_from_model_json(const nlohmann::json& r) {
  if (r.is_object() && !r.contains("generators") && r.contains("m") && r.contains("multiplicity")) {
    std::vector<int> chir;
    if (r.contains("chirality")) chir = r.at("chirality").get<std::vector<int>>();
    return build_representation(r.at("m").get<int>(), r.at("multiplicity").get<int>(), chir);
  }
  return representation_from_json(r);
}

}  // namespace detail

/// Builds a model from {"kind", "name", "epsilon", "rep" | "k"} and rejects it
/// unless the foliation axioms hold on a default sample.
inline FoliationModel load_model(const nlohmann::json& j, std::size_t check_points = 8, std::uint64_t seed = 42) {
  FoliationModel model;
  try {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
      throw ModelSchemaError("model JSON requires a string \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();
    const std::string name = j.value("name", kind);
    const double eps = j.contains("epsilon") ? j.at("epsilon").get<double>() : (kind == "htype-group" || kind == "custom" ? 1.0 : 4.0);
    if (!(eps > 0.0)) throw ModelSchemaError("epsilon must be positive");
    if (kind == "htype-group" || kind == "custom") {
      if (!j.contains("rep")) throw ModelSchemaError(kind + " model requires \"rep\"");
      const auto rep = detail::rep_from_model_json(j.at("rep"));
      if (kind == "htype-group") {
        for (const auto& g : rep.generators)
          if ((g + g.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw InvalidModelError("generators must be skew-symmetric");
        model = htype_group(rep, name);
        if (eps != 1.0) model = canonical_variation(model, eps);
      } else {
        model = two_step_group(rep.generators, name, "custom", eps);
      }
    } else if (kind == "complex-hopf" || kind == "quaternionic-hopf") {
      if (!j.contains("k") || !j.at("k").is_number_integer()) throw ModelSchemaError(kind + " model requires integer \"k\"");
      const int k = j.at("k").get<int>();
      model = kind == "complex-hopf" ? complex_hopf(k, eps, name) : quaternionic_hopf(k, eps, name);
    } else {
      throw ModelSchemaError("unknown model kind: " + kind);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ModelSchemaError(std::string("model JSON: ") + e.what());
  } catch (const InvalidModelError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw InvalidModelError(e.what());
  }
  Sample s(model, check_points, seed);
  const CheckReport axioms = check_foliation_axioms(s);
  if (!axioms.pass)
    throw InvalidModelError("model rejected: foliation axioms fail (max residual " + std::to_string(axioms.max_residual) + ")");
  return model;
}

}  // namespace htf
