#include "delaycert/systems.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace delaycert {

namespace {

constexpr double kPi = 3.14159265358979323846;
using json = nlohmann::ordered_json;

double require_number(const json& j, const std::string& path) {
  if (!j.is_number())
    throw SpecError("spec: " + path + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SpecError("spec: " + path + " must be finite");
  return v;
}

Complex require_complex(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2)
    throw SpecError("spec: " + path + " must be a [re, im] pair");
  return Complex(require_number(j[0], path + "[0]"),
                 require_number(j[1], path + "[1]"));
}

bool close_rel(Complex a, Complex b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-30});
  return std::abs(a - b) <= 1e-12 * scale;
}

void check_rule_consistency(const SystemSpec& spec) {
  if (!spec.has_rule()) return;
  for (std::size_t i = 0; i < spec.modes.size(); ++i) {
    const ModeSpec expect = spec.rule_mode(spec.modes[i].index);
    const std::string path = "modes[" + std::to_string(i) + "]";
    if (!close_rel(spec.modes[i].lambda, expect.lambda))
      throw SpecError("spec: " + path +
                      ".lambda disagrees with tail_rule beyond 1e-12");
    if (!close_rel(spec.modes[i].b, expect.b))
      throw SpecError("spec: " + path +
                      ".b disagrees with tail_rule beyond 1e-12");
  }
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

}  // namespace

ModeSpec SystemSpec::rule_mode(int k) const {
  if (k < 1) throw SpecError("tail_rule: index must be >= 1");
  const double kk = static_cast<double>(k);
  if (const auto* pl = std::get_if<PowerLawRule>(&tail_rule)) {
    return ModeSpec{k, Complex(pl->c * std::pow(kk, -pl->p), 0.0),
                    Complex(pl->d * std::pow(kk, -pl->q), 0.0)};
  }
  if (const auto* ar = std::get_if<ArtificialRule>(&tail_rule)) {
    const double lam = (-kPi / (2.0 * tau) + ar->eps) / kk;
    return ModeSpec{k, Complex(lam, 0.0), Complex(std::pow(kk, -2.0), 0.0)};
  }
  throw SpecError("tail_rule: no analytic rule is attached to this spec");
}

SystemSpec load_spec(std::istream& in, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError("spec: parse failure in " + origin + ": " + e.what());
  }
  if (!doc.is_object()) throw SpecError("spec: top level must be an object");
  if (!doc.contains("tau")) throw SpecError("spec: tau is required");
  SystemSpec spec;
  spec.tau = require_number(doc["tau"], "tau");
  if (!(spec.tau > 0.0)) throw SpecError("spec: tau must be positive");
  if (!doc.contains("modes") || !doc["modes"].is_array() ||
      doc["modes"].empty())
    throw SpecError("spec: modes must be a non-empty array");
  const auto& modes = doc["modes"];
  spec.modes.reserve(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::string path = "modes[" + std::to_string(i) + "]";
    const auto& m = modes[i];
    if (!m.is_object()) throw SpecError("spec: " + path + " must be an object");
    if (!m.contains("index") || !m["index"].is_number_integer())
      throw SpecError("spec: " + path + ".index must be an integer");
    ModeSpec ms;
    ms.index = m["index"].get<int>();
    if (ms.index != static_cast<int>(i) + 1)
      throw SpecError("spec: " + path +
                      ".index breaks the contiguous 1-based ordering");
    if (!m.contains("lambda"))
      throw SpecError("spec: " + path + ".lambda is required");
    ms.lambda = require_complex(m["lambda"], path + ".lambda");
    if (!(ms.lambda.real() < 0.0))
      throw SpecError("spec: " + path + ".lambda must have negative real part");
    if (!m.contains("b")) throw SpecError("spec: " + path + ".b is required");
    ms.b = require_complex(m["b"], path + ".b");
    spec.modes.push_back(ms);
  }
  if (doc.contains("tail_rule")) {
    const auto& tr = doc["tail_rule"];
    if (!tr.is_object() || !tr.contains("kind") || !tr["kind"].is_string())
      throw SpecError("spec: tail_rule.kind must be a string");
    const std::string kind = tr["kind"].get<std::string>();
    if (kind == "none") {
      spec.tail_rule = std::monostate{};
    } else if (kind == "power-law") {
      PowerLawRule pl;
      pl.c = require_number(tr.value("c", json()), "tail_rule.c");
      pl.p = require_number(tr.value("p", json()), "tail_rule.p");
      pl.d = require_number(tr.value("d", json()), "tail_rule.d");
      pl.q = require_number(tr.value("q", json()), "tail_rule.q");
      if (!(pl.c < 0.0))
        throw SpecError("spec: tail_rule.c must be negative");
      spec.tail_rule = pl;
    } else if (kind == "artificial") {
      ArtificialRule ar;
      ar.eps = require_number(tr.value("eps", json()), "tail_rule.eps");
      if (!(ar.eps > 0.0 && ar.eps < kPi / (2.0 * spec.tau)))
        throw SpecError("spec: tail_rule.eps must lie in (0, pi/(2 tau))");
      spec.tail_rule = ar;
    } else {
      throw SpecError("spec: tail_rule.kind '" + kind + "' is not recognized");
    }
  }
  check_rule_consistency(spec);
  return spec;
}

SystemSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw SpecError("spec: cannot open " + path.string());
  return load_spec(in, path.string());
}

std::string spec_to_json(const SystemSpec& spec) {
  json doc;
  doc["tau"] = spec.tau;
  doc["modes"] = json::array();
  for (const ModeSpec& m : spec.modes) {
    json jm;
    jm["index"] = m.index;
    jm["lambda"] = complex_to_json(m.lambda);
    jm["b"] = complex_to_json(m.b);
    doc["modes"].push_back(jm);
  }
  if (const auto* pl = std::get_if<PowerLawRule>(&spec.tail_rule)) {
    doc["tail_rule"] = {{"kind", "power-law"},
                        {"c", pl->c},
                        {"p", pl->p},
                        {"d", pl->d},
                        {"q", pl->q}};
  } else if (const auto* ar = std::get_if<ArtificialRule>(&spec.tail_rule)) {
    doc["tail_rule"] = {{"kind", "artificial"}, {"eps", ar->eps}};
  }
  return doc.dump(2) + "\n";
}

void save_spec(const SystemSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw SpecError("spec: cannot write " + path.string());
  out << spec_to_json(spec);
}

SystemSpec heat_reciprocal_spec(int n_modes, double q) {
  if (n_modes < 1)
    throw std::invalid_argument("heat_reciprocal_spec: n_modes must be >= 1");
  if (!std::isfinite(q))
    throw std::invalid_argument("heat_reciprocal_spec: q must be finite");
  SystemSpec spec;
  spec.tau = 1.0;
  spec.tail_rule = PowerLawRule{-1.0, 2.0, 1.0, q};
  spec.modes.reserve(static_cast<std::size_t>(n_modes));
  for (int k = 1; k <= n_modes; ++k) spec.modes.push_back(spec.rule_mode(k));
  if (q <= 1.5)
    spec.warnings.push_back(
        "input decay q <= 3/2: certificate constants cannot be summable");
  return spec;
}

SystemSpec artificial_spec(int n_modes, double tau, double eps) {
  if (n_modes < 1)
    throw std::invalid_argument("artificial_spec: n_modes must be >= 1");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("artificial_spec: tau must be positive");
  if (!(eps > 0.0 && eps < kPi / (2.0 * tau)))
    throw std::invalid_argument(
        "artificial_spec: eps must lie in (0, pi/(2 tau))");
  SystemSpec spec;
  spec.tau = tau;
  spec.tail_rule = ArtificialRule{eps};
  spec.modes.reserve(static_cast<std::size_t>(n_modes));
  for (int k = 1; k <= n_modes; ++k) spec.modes.push_back(spec.rule_mode(k));
  return spec;
}

SystemSpec symbol_sampled_spec(std::span<const Complex> symbol_samples,
                               double tau, std::span<const Complex> b) {
  if (symbol_samples.empty())
    throw std::invalid_argument("symbol_sampled_spec: no samples given");
  if (symbol_samples.size() != b.size())
    throw std::invalid_argument(
        "symbol_sampled_spec: symbol and b lengths differ");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("symbol_sampled_spec: tau must be positive");
  SystemSpec spec;
  spec.tau = tau;
  spec.modes.reserve(symbol_samples.size());
  for (std::size_t i = 0; i < symbol_samples.size(); ++i) {
    if (!(symbol_samples[i].real() < 0.0))
      throw std::invalid_argument(
          "symbol_sampled_spec: sample " + std::to_string(i) +
          " has nonnegative real part");
    spec.modes.push_back(
        ModeSpec{static_cast<int>(i) + 1, symbol_samples[i], b[i]});
  }
  return spec;
}

double aggregate_norm(std::span<const double> per_mode_values) {
  double acc = 0.0;
  for (std::size_t i = 0; i < per_mode_values.size(); ++i) {
    const double v = per_mode_values[i];
    if (!(v >= 0.0))
      throw std::invalid_argument("aggregate_norm: entry " + std::to_string(i) +
                                  " is negative or not a number");
    acc += v;
  }
  return acc;
}

}  // namespace delaycert
