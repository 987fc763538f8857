#include "noether/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>
#include <toml.hpp>

namespace noether {

namespace {

using nlohmann::json;

struct Position {
  std::size_t line = 0;
  std::size_t column = 0;
};

/// Configuration tree with the source position of every entry, keyed by its
/// dotted path ("initial.q", "lambda_values[1]").
struct Document {
  json root;
  std::map<std::string, Position> positions;

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    const auto it = positions.find(path);
    const Position pos = it == positions.end() ? Position{} : it->second;
    throw ConfigError(path.empty() ? message : path + ": " + message, pos.line, pos.column);
  }
};

Position position_of(const toml::node& node) {
  const auto& src = node.source().begin;
  return {static_cast<std::size_t>(src.line), static_cast<std::size_t>(src.column)};
}

json toml_to_json(const toml::node& node, const std::string& path, Document& doc) {
  doc.positions[path] = position_of(node);
  if (const auto* table = node.as_table()) {
    json out = json::object();
    for (const auto& [key, value] : *table) {
      const std::string child = path.empty() ? std::string(key.str()) : path + "." + std::string(key.str());
      out[std::string(key.str())] = toml_to_json(value, child, doc);
    }
    return out;
  }
  if (const auto* array = node.as_array()) {
    json out = json::array();
    for (std::size_t i = 0; i < array->size(); ++i) {
      out.push_back(toml_to_json(*array->get(i), path + "[" + std::to_string(i) + "]", doc));
    }
    return out;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  doc.fail(path, "unsupported value type");
}

Position offset_to_position(const std::string& text, std::size_t offset) {
  Position pos{1, 1};
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
    if (text[i] == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
  }
  return pos;
}

Document parse_document(const std::string& text, bool is_json, const std::string& origin) {
  Document doc;
  if (is_json) {
    try {
      doc.root = json::parse(text);
    } catch (const json::parse_error& e) {
      // byte is one past the offending character
      const auto pos = offset_to_position(text, e.byte > 0 ? e.byte - 1 : 0);
      throw ConfigError(origin + ": invalid JSON", pos.line, pos.column);
    }
    if (!doc.root.is_object()) throw ConfigError(origin + ": top level must be an object", 1, 1);
    return doc;
  }
  try {
    const auto table = toml::parse(text, origin);
    doc.root = toml_to_json(table, "", doc);
  } catch (const toml::parse_error& e) {
    const auto& src = e.source().begin;
    throw ConfigError(origin + ": " + std::string(e.description()), src.line, src.column);
  }
  return doc;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

class Reader {
 public:
  Reader(const Document& doc, const json& node, std::string path) : doc_(doc), node_(node), path_(std::move(path)) {
    if (!node_.is_object()) doc_.fail(path_, "expected a table");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  /// Rejects keys outside `allowed`.
  void restrict_to(std::initializer_list<const char*> allowed) const {
    for (const auto& [key, value] : node_.items()) {
      const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; });
      if (!known) doc_.fail(join(path_, key), "unknown key");
    }
  }

  double number(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number()) doc_.fail(join(path_, key), "expected a number");
    return v.get<double>();
  }
  std::optional<double> optional_number(const std::string& key) const {
    return has(key) ? std::optional<double>(number(key)) : std::nullopt;
  }
  std::string string(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_string()) doc_.fail(join(path_, key), "expected a string");
    return v.get<std::string>();
  }
  std::int64_t integer(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number_integer()) doc_.fail(join(path_, key), "expected an integer");
    return v.get<std::int64_t>();
  }
  std::vector<double> numbers(const std::string& key) const {
    const auto& v = at(key);
    const std::string p = join(path_, key);
    if (!v.is_array()) doc_.fail(p, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) doc_.fail(p + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  std::vector<std::string> strings(const std::string& key) const {
    const auto& v = at(key);
    const std::string p = join(path_, key);
    if (!v.is_array()) doc_.fail(p, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) doc_.fail(p + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }
  Reader table(const std::string& key) const { return Reader(doc_, at(key), join(path_, key)); }
  const json& raw(const std::string& key) const { return at(key); }
  std::string path(const std::string& key) const { return join(path_, key); }
  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    doc_.fail(key.empty() ? path_ : join(path_, key), message);
  }

 private:
  const json& at(const std::string& key) const {
    if (!has(key)) doc_.fail(path_, "missing required key '" + key + "'");
    return node_.at(key);
  }

  const Document& doc_;
  const json& node_;
  std::string path_;
};

Vector to_vector(const std::vector<double>& values) {
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Potential read_potential(const Reader& r) {
  const std::string kind = r.string("kind");
  PotentialKind parsed;
  try {
    parsed = potential_kind_from_string(kind);
  } catch (const UsageError&) {
    r.fail("kind", "unknown potential kind '" + kind + "'");
  }
  try {
    switch (parsed) {
      case PotentialKind::kZero:
        r.restrict_to({"kind"});
        return Potential::zero();
      case PotentialKind::kKepler:
        r.restrict_to({"kind", "coupling"});
        return Potential::kepler(r.number("coupling"));
      case PotentialKind::kInverseSquare:
        r.restrict_to({"kind", "coupling"});
        return Potential::inverse_square(r.number("coupling"));
      case PotentialKind::kLinearForce:
        r.restrict_to({"kind", "coupling"});
        return Potential::linear_force(r.number("coupling"));
      case PotentialKind::kHarmonic:
        r.restrict_to({"kind", "omega"});
        return Potential::harmonic(r.number("omega"));
      case PotentialKind::kSaddle:
        r.restrict_to({"kind", "omega"});
        return Potential::saddle(r.number("omega"));
      case PotentialKind::kCustomHomogeneous:
        break;
    }
  } catch (const UsageError& e) {
    r.fail("", e.what());
  }
  r.fail("kind", "potential kind '" + kind + "' cannot be configured");
}

ScalingLaw read_law(const Reader& r) {
  r.restrict_to({"a", "b", "c", "k"});
  try {
    if (r.has("k")) {
      if (r.has("b") || r.has("c")) r.fail("k", "give either k (with optional a) or a, b, c");
      const double a = r.optional_number("a").value_or(1.0);
      return solve_exponents(r.number("k"), a);
    }
    return ScalingLaw::from_exponents(r.number("a"), r.number("b"), r.number("c"));
  } catch (const UsageError& e) {
    r.fail("", e.what());
  }
}

Thresholds read_thresholds(const Reader& r) {
  Thresholds t;
  const std::pair<const char*, double*> fields[] = {
      {"charge_drift", &t.charge_drift}, {"route_agreement", &t.route_agreement},
      {"virial", &t.virial},             {"symmetry", &t.symmetry},
      {"eom", &t.eom},                   {"action_transport", &t.action_transport},
      {"period_ratio", &t.period_ratio}, {"generator", &t.generator},
      {"generator_flow", &t.generator_flow}, {"null_lift", &t.null_lift},
      {"geodesic", &t.geodesic},         {"conformal", &t.conformal},
      {"homothety", &t.homothety},       {"geodesic_eq", &t.geodesic_eq},
  };
  r.restrict_to({"charge_drift", "route_agreement", "virial", "symmetry", "eom", "action_transport", "period_ratio",
                 "generator", "generator_flow", "null_lift", "geodesic", "conformal", "homothety", "geodesic_eq"});
  for (const auto& [key, target] : fields) {
    if (!r.has(key)) continue;
    *target = r.number(key);
    if (!(*target > 0.0)) r.fail(key, "threshold must be positive");
  }
  return t;
}

Scenario build(const Document& doc) {
  const Reader top(doc, doc.root, "");
  top.restrict_to({"name", "t_end", "tol", "grid_intervals", "checks", "lambda_values", "seed", "output_dir",
                   "mass_matrix", "potential", "ppwave", "initial", "scaling", "bargmann", "thresholds"});
  Scenario sc;
  sc.name = top.string("name");
  if (sc.name.empty()) top.fail("name", "must not be empty");
  sc.t_end = top.number("t_end");
  if (!(sc.t_end > 0.0)) top.fail("t_end", "must be positive");
  if (top.has("tol")) sc.tol = top.number("tol");
  if (!(sc.tol >= 1e-14 && sc.tol <= 1e-3)) top.fail("tol", "must lie in [1e-14, 1e-3]");
  if (top.has("grid_intervals")) {
    const auto n = top.integer("grid_intervals");
    if (n < 4) top.fail("grid_intervals", "must be at least 4");
    sc.grid_intervals = static_cast<std::size_t>(n);
  }
  if (top.has("seed")) {
    const auto seed = top.integer("seed");
    if (seed < 0) top.fail("seed", "must be non-negative");
    sc.seed = static_cast<std::uint64_t>(seed);
  }
  if (top.has("output_dir")) sc.output_dir = top.string("output_dir");

  const auto checks = top.strings("checks");
  for (std::size_t i = 0; i < checks.size(); ++i) {
    try {
      const Check c = check_from_string(checks[i]);
      if (!sc.has_check(c)) sc.checks.push_back(c);
    } catch (const UsageError&) {
      doc.fail(top.path("checks") + "[" + std::to_string(i) + "]", "unknown check '" + checks[i] + "'");
    }
  }
  if (top.has("lambda_values")) {
    sc.lambda_values = top.numbers("lambda_values");
    for (std::size_t i = 0; i < sc.lambda_values.size(); ++i) {
      if (!(sc.lambda_values[i] > 0.0)) {
        doc.fail(top.path("lambda_values") + "[" + std::to_string(i) + "]", "lambda must be positive");
      }
    }
  }

  const bool has_potential = top.has("potential");
  const bool has_wave = top.has("ppwave");
  if (has_potential == has_wave) top.fail("", "exactly one of [potential] and [ppwave] is required");
  if (has_potential) {
    sc.potential = read_potential(top.table("potential"));
  } else {
    const auto w = top.table("ppwave");
    w.restrict_to({"kind", "omega"});
    const auto kind = w.string("kind");
    PPWaveSpec spec;
    if (kind == "brdicka") {
      spec.kind = PPWaveKind::kBrdicka;
    } else if (kind == "isotropic") {
      spec.kind = PPWaveKind::kIsotropic;
    } else {
      w.fail("kind", "unknown pp-wave kind '" + kind + "' (expected brdicka or isotropic)");
    }
    spec.omega = w.number("omega");
    if (!(spec.omega > 0.0)) w.fail("omega", "must be positive");
    sc.ppwave = spec;
  }

  const auto init = top.table("initial");
  init.restrict_to({"q", "qdot"});
  sc.q0 = to_vector(init.numbers("q"));
  sc.qdot0 = to_vector(init.numbers("qdot"));
  if (sc.q0.size() == 0) init.fail("q", "must not be empty");
  if (sc.qdot0.size() != sc.q0.size()) init.fail("qdot", "must have the same length as q");

  const auto n = sc.q0.size();
  if (top.has("mass_matrix")) {
    const auto& rows = top.raw("mass_matrix");
    const auto path = top.path("mass_matrix");
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) {
      doc.fail(path, "expected " + std::to_string(n) + " rows");
    }
    sc.mass_matrix.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      const auto row_path = path + "[" + std::to_string(i) + "]";
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
        doc.fail(row_path, "expected " + std::to_string(n) + " numbers");
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto& v = row[static_cast<std::size_t>(j)];
        if (!v.is_number()) doc.fail(row_path + "[" + std::to_string(j) + "]", "expected a number");
        sc.mass_matrix(i, j) = v.get<double>();
      }
    }
  } else {
    sc.mass_matrix = Matrix::Identity(n, n);
  }

  sc.law = read_law(top.table("scaling"));

  if (top.has("bargmann")) {
    const auto b = top.table("bargmann");
    b.restrict_to({"s0"});
    sc.s0 = b.number("s0");
  }
  if (top.has("thresholds")) sc.thresholds = read_thresholds(top.table("thresholds"));

  try {
    validate(sc);
  } catch (const ConfigError& e) {
    // attach the position of the most relevant section when validation has none
    if (e.line() != 0) throw;
    const std::string msg = e.what();
    std::string anchor;
    if (msg.rfind("virial", 0) == 0 || msg.rfind("homothety", 0) == 0 || msg.rfind("mapping", 0) == 0 ||
        msg.rfind("symmetry_residual", 0) == 0) {
      anchor = "checks";
    } else if (msg.rfind("mass", 0) == 0) {
      anchor = "mass_matrix";
    } else if (msg.rfind("pp-wave", 0) == 0) {
      anchor = "ppwave";
    }
    const auto it = doc.positions.find(anchor);
    if (it == doc.positions.end()) throw;
    throw ConfigError(msg, it->second.line, it->second.column);
  }
  return sc;
}

}  // namespace

std::string to_string(Check check) {
  switch (check) {
    case Check::kCharge: return "charge";
    case Check::kVirial: return "virial";
    case Check::kSymmetryResidual: return "symmetry_residual";
    case Check::kMapping: return "mapping";
    case Check::kGenerator: return "generator";
    case Check::kBargmann: return "bargmann";
    case Check::kHomothety: return "homothety";
  }
  return "unknown";
}

Check check_from_string(const std::string& name) {
  for (Check c : {Check::kCharge, Check::kVirial, Check::kSymmetryResidual, Check::kMapping, Check::kGenerator,
                  Check::kBargmann, Check::kHomothety}) {
    if (to_string(c) == name) return c;
  }
  throw UsageError("unknown check '" + name + "'");
}

DynamicalSystem Scenario::system() const {
  if (ppwave) {
    const auto potential =
        ppwave->kind == PPWaveKind::kBrdicka ? Potential::saddle(ppwave->omega) : Potential::harmonic(ppwave->omega);
    return DynamicalSystem(mass_matrix, potential);
  }
  if (!potential) throw UsageError("scenario has no potential");
  return DynamicalSystem(mass_matrix, *potential);
}

bool Scenario::has_check(Check check) const {
  return std::find(checks.begin(), checks.end(), check) != checks.end();
}

bool is_periodic_system(const DynamicalSystem& sys, const PhaseState& ic) {
  const auto& m = sys.mass_matrix();
  switch (sys.potential().kind()) {
    case PotentialKind::kHarmonic:
      return m.isApprox(m(0, 0) * Matrix::Identity(m.rows(), m.cols()), 1e-14);
    case PotentialKind::kKepler:
      return sys.potential().parameter() > 0.0 && evaluate_hamiltonian(sys, ic) < 0.0;
    default:
      return false;
  }
}

void validate(const Scenario& sc) {
  if (sc.checks.empty()) throw ConfigError("checks: at least one check is required");
  if (sc.q0.size() != sc.qdot0.size() || sc.q0.size() == 0) throw ConfigError("initial: q and qdot mismatch");
  if (sc.mass_matrix.rows() != sc.q0.size() || sc.mass_matrix.cols() != sc.q0.size()) {
    throw ConfigError("mass_matrix: dimension does not match initial.q");
  }
  if (sc.ppwave && sc.q0.size() != 2) throw ConfigError("pp-wave scenarios are two-dimensional");
  if (sc.ppwave && !sc.mass_matrix.isIdentity(0.0)) throw ConfigError("pp-wave scenarios use the unit mass matrix");
  for (double lambda : sc.lambda_values) {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  }
  if (!(sc.t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (!(sc.tol >= 1e-14 && sc.tol <= 1e-3)) throw ConfigError("tol must lie in [1e-14, 1e-3]");
  if (sc.grid_intervals < 4) throw ConfigError("grid_intervals must be at least 4");

  std::optional<DynamicalSystem> sys;
  try {
    sys = sc.system();
    sys->check_state(PhaseState{sc.q0, sc.qdot0, 0.0});
  } catch (const Error& e) {
    throw ConfigError(std::string("mass matrix or initial state rejected: ") + e.what());
  }

  if ((sc.has_check(Check::kMapping) || sc.has_check(Check::kSymmetryResidual)) && sc.lambda_values.empty()) {
    throw ConfigError(std::string(sc.has_check(Check::kMapping) ? "mapping" : "symmetry_residual") +
                      " check requires lambda_values");
  }
  if (sc.has_check(Check::kVirial)) {
    if (!is_periodic_system(*sys, PhaseState{sc.q0, sc.qdot0, 0.0})) {
      throw ConfigError("virial check requires a periodic system (harmonic with scalar mass, or bound Kepler)");
    }
  }
  if (sc.has_check(Check::kHomothety) && !(sc.law.a == 1.0 && sc.law.b == 0.0)) {
    throw ConfigError("homothety check requires the scaling law (1, 0, 2)");
  }
}

Scenario parse_scenario(const std::string& text, bool json, const std::string& origin) {
  return build(parse_document(text, json, origin));
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.extension() == ".json", path.string());
}

std::string Report::to_json() const {
  json j;
  j["scenario"] = scenario;
  j["pass"] = pass;
  json checks_json = json::object();
  for (const auto& c : checks) {
    json entry{{"pass", c.pass}};
    for (const auto& [key, value] : c.metrics) entry[key] = value;
    if (!c.detail.empty()) entry["detail"] = c.detail;
    checks_json[noether::to_string(c.check)] = entry;
  }
  j["checks"] = checks_json;
  json facts_json = json::object();
  for (const auto& [key, value] : facts) facts_json[key] = value;
  j["facts"] = facts_json;
  json artifacts_json = json::array();
  for (const auto& p : artifacts) artifacts_json.push_back(p.filename().string());
  j["artifacts"] = artifacts_json;
  return j.dump(2) + "\n";
}

}  // namespace noether
