#include "privdac/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string_view>

#include <openssl/evp.h>

#include "privdac/errors.hpp"

namespace privdac {

using nlohmann::json;

namespace {

void only_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ValidationError(std::string(where) + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError("unknown key '" + key + "' in " + std::string(where));
  }
}

double number(const json& v, std::string_view what) {
  if (!v.is_number()) throw ValidationError(std::string(what) + " must be a number");
  return v.get<double>();
}

std::size_t index1(const json& v, std::string_view what) {
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ValidationError(std::string(what) + " must be a 1-based agent index");
  }
  return static_cast<std::size_t>(v.get<long long>() - 1);
}

std::size_t count(const json& v, std::string_view what) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ValidationError(std::string(what) + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(v.get<long long>());
}

Eigen::VectorXd vector(const json& v, std::string_view what) {
  if (!v.is_array()) throw ValidationError(std::string(what) + " must be an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = number(v[i], what);
  return out;
}

json to_array(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::pair<double, double> range(const json& v, std::string_view what) {
  const Eigen::VectorXd r = vector(v, what);
  if (r.size() != 2) throw ValidationError(std::string(what) + " must be [low, high]");
  return {r(0), r(1)};
}

SignalTerm term_from_json(const json& t, std::size_t dimension) {
  if (!t.is_object() || !t.contains("type") || !t["type"].is_string()) {
    throw ValidationError("signal term needs a string 'type'");
  }
  const std::string type = t["type"];
  auto component = [&] { return t.contains("component") ? count(t["component"], "component") : std::size_t{0}; };
  if (type == "constant") {
    only_keys(t, "constant term", {"type", "component", "value"});
    return ConstantTerm{component(), number(t.at("value"), "value")};
  }
  if (type == "ramp") {
    only_keys(t, "ramp term", {"type", "component", "slope"});
    return RampTerm{component(), number(t.at("slope"), "slope")};
  }
  if (type == "sinusoid") {
    only_keys(t, "sinusoid term", {"type", "component", "amplitude", "omega", "phase", "wave"});
    SinusoidTerm s{component(), number(t.at("amplitude"), "amplitude"), number(t.at("omega"), "omega"),
                   t.contains("phase") ? number(t["phase"], "phase") : 0.0, Wave::Cos};
    if (t.contains("wave")) {
      if (t["wave"] == "sin") {
        s.wave = Wave::Sin;
      } else if (t["wave"] != "cos") {
        throw ValidationError("sinusoid wave must be 'cos' or 'sin'");
      }
    }
    return s;
  }
  if (type == "rotating") {
    only_keys(t, "rotating term",
              {"type", "component", "base", "swing", "swing_omega", "heading", "wobble", "wobble_omega"});
    auto get = [&](const char* k) { return t.contains(k) ? number(t[k], k) : 0.0; };
    return RotatingTerm{component(), get("base"), get("swing"), get("swing_omega"),
                        get("heading"), get("wobble"), get("wobble_omega")};
  }
  if (type == "accumulated") {
    only_keys(t, "accumulated term", {"type", "scale", "terms"});
    return AccumulatedTerm{std::make_shared<const SignalDescriptor>(signal_from_json(t.at("terms"), dimension)),
                           t.contains("scale") ? number(t["scale"], "scale") : 1.0};
  }
  throw ValidationError("unknown signal term type '" + type + "'");
}

json term_to_json(const SignalTerm& term) {
  return std::visit(
      [](const auto& t) -> json {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, ConstantTerm>) {
          return {{"type", "constant"}, {"component", t.component}, {"value", t.value}};
        } else if constexpr (std::is_same_v<T, RampTerm>) {
          return {{"type", "ramp"}, {"component", t.component}, {"slope", t.slope}};
        } else if constexpr (std::is_same_v<T, SinusoidTerm>) {
          return {{"type", "sinusoid"}, {"component", t.component}, {"amplitude", t.amplitude},
                  {"omega", t.omega},   {"phase", t.phase},         {"wave", t.wave == Wave::Sin ? "sin" : "cos"}};
        } else if constexpr (std::is_same_v<T, RotatingTerm>) {
          return {{"type", "rotating"}, {"component", t.component}, {"base", t.base},
                  {"swing", t.swing},   {"swing_omega", t.swing_omega}, {"heading", t.heading},
                  {"wobble", t.wobble}, {"wobble_omega", t.wobble_omega}};
        } else {
          return {{"type", "accumulated"}, {"scale", t.scale}, {"terms", signal_to_json(*t.inner)}};
        }
      },
      term);
}

NetworkGraph graph_from_json(const json& g, std::string& spec) {
  if (g.is_string()) {
    spec = g.get<std::string>();
    return graph_from_preset(spec);
  }
  only_keys(g, "graph", {"agents", "edges"});
  const std::size_t n = count(g.at("agents"), "graph.agents");
  if (n == 0) throw ValidationError("graph needs at least one agent");
  std::vector<Edge> edges;
  if (!g.at("edges").is_array()) throw ValidationError("graph.edges must be an array of [i, j] pairs");
  for (const auto& e : g["edges"]) {
    if (!e.is_array() || e.size() != 2) throw ValidationError("graph edge must be [i, j]");
    const std::size_t a = index1(e[0], "edge endpoint");
    const std::size_t b = index1(e[1], "edge endpoint");
    if (a >= n || b >= n) throw ValidationError("edge endpoint exceeds graph.agents");
    edges.emplace_back(a, b);
  }
  spec.clear();
  return NetworkGraph::from_edges(n, edges);
}

ControllerGains gains_from_json(const json& g) {
  only_keys(g, "formation.gains",
            {"gamma1", "gamma2", "gamma3", "gamma4", "iota0", "iota1", "iota2", "sgn_epsilon"});
  ControllerGains out;
  auto set = [&](const char* key, double& field) {
    if (g.contains(key)) field = number(g[key], key);
  };
  set("gamma1", out.gamma1);
  set("gamma2", out.gamma2);
  set("gamma3", out.gamma3);
  set("gamma4", out.gamma4);
  set("iota0", out.iota0);
  set("iota1", out.iota1);
  set("iota2", out.iota2);
  set("sgn_epsilon", out.sgn_epsilon);
  return out;
}

}  // namespace

SignalDescriptor signal_from_json(const json& terms, std::size_t dimension) {
  if (!terms.is_array()) throw ValidationError("signal must be an array of terms");
  SignalDescriptor out(dimension);
  for (const auto& t : terms) out.add(term_from_json(t, dimension));
  return out;
}

json signal_to_json(const SignalDescriptor& signal) {
  json out = json::array();
  for (const auto& t : signal.terms()) out.push_back(term_to_json(t));
  return out;
}

ScenarioConfig config_from_json(const json& doc) {
  only_keys(doc, "config",
            {"base", "id", "graph", "kappa", "mode", "references", "split", "attack", "formation", "audit", "dt",
             "horizon", "sample_stride", "seed", "checks"});
  ScenarioConfig cfg;
  if (doc.contains("base")) {
    if (!doc["base"].is_string()) throw ValidationError("base must be a built-in scenario name");
    cfg = builtin_scenario(doc["base"].get<std::string>());
  }
  if (doc.contains("id")) {
    if (!doc["id"].is_string()) throw ValidationError("id must be a string");
    cfg.id = doc["id"];
  }
  if (doc.contains("graph")) cfg.graph = graph_from_json(doc["graph"], cfg.graph_spec);
  if (doc.contains("kappa")) cfg.kappa = number(doc["kappa"], "kappa");
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) throw ValidationError("mode must be a string");
    cfg.mode = parse_mode(doc["mode"]);
  }
  if (doc.contains("references")) {
    if (!doc["references"].is_array()) throw ValidationError("references must be an array");
    cfg.references.clear();
    for (const auto& r : doc["references"]) {
      only_keys(r, "reference", {"initial", "rate"});
      Reference ref;
      ref.initial = vector(r.at("initial"), "reference.initial");
      const auto dim = static_cast<std::size_t>(ref.initial.size());
      ref.rate = r.contains("rate") ? signal_from_json(r["rate"], dim) : SignalDescriptor(dim);
      cfg.references.push_back(std::move(ref));
    }
  }
  if (doc.contains("split")) {
    const json& s = doc["split"];
    only_keys(s, "split", {"initial_range", "amplitude_range", "frequency_range"});
    if (s.contains("initial_range")) cfg.split.initial_range = range(s["initial_range"], "split.initial_range");
    if (s.contains("amplitude_range")) cfg.split.amplitude_range = range(s["amplitude_range"], "split.amplitude_range");
    if (s.contains("frequency_range")) cfg.split.frequency_range = range(s["frequency_range"], "split.frequency_range");
  }
  if (doc.contains("attack")) {
    if (doc["attack"].is_null()) {
      cfg.attack.reset();
    } else {
      const json& a = doc["attack"];
      only_keys(a, "attack", {"victim", "k1", "k2", "k3", "k4"});
      AttackSetup setup;
      if (a.contains("victim")) setup.victim = index1(a["victim"], "attack.victim");
      if (a.contains("k1")) setup.k1 = number(a["k1"], "k1");
      if (a.contains("k2")) setup.k2 = number(a["k2"], "k2");
      if (a.contains("k3")) setup.k3 = number(a["k3"], "k3");
      if (a.contains("k4")) setup.k4 = number(a["k4"], "k4");
      cfg.attack = setup;
    }
  }
  if (doc.contains("formation")) {
    if (doc["formation"].is_null()) {
      cfg.formation.reset();
    } else {
      const json& f = doc["formation"];
      only_keys(f, "formation", {"robots", "gains"});
      FormationSetup setup;
      if (!f.at("robots").is_array()) throw ValidationError("formation.robots must be an array");
      for (const auto& r : f["robots"]) {
        only_keys(r, "robot", {"initial", "bias"});
        const Eigen::VectorXd p = vector(r.at("initial"), "robot.initial");
        if (p.size() != 2 && p.size() != 3) throw ValidationError("robot.initial must be [x, y] or [x, y, theta]");
        RobotSetup robot{RobotPose{p(0), p(1), p.size() == 3 ? p(2) : 0.0}, Eigen::Vector2d::Zero()};
        if (r.contains("bias")) {
          const Eigen::VectorXd b = vector(r["bias"], "robot.bias");
          if (b.size() != 2) throw ValidationError("robot.bias must be [bx, by]");
          robot.bias = b;
        }
        setup.robots.push_back(robot);
      }
      if (f.contains("gains")) setup.gains = gains_from_json(f["gains"]);
      cfg.formation = std::move(setup);
    }
  }
  if (doc.contains("audit")) {
    if (doc["audit"].is_null()) {
      cfg.audit.reset();
    } else {
      const json& a = doc["audit"];
      only_keys(a, "audit", {"target", "accomplice", "shift", "rate_change"});
      AuditSetup setup;
      if (a.contains("target")) setup.target = index1(a["target"], "audit.target");
      if (a.contains("accomplice")) setup.accomplice = index1(a["accomplice"], "audit.accomplice");
      setup.shift = vector(a.at("shift"), "audit.shift");
      const auto dim = static_cast<std::size_t>(setup.shift.size());
      setup.rate_change = a.contains("rate_change") ? signal_from_json(a["rate_change"], dim) : SignalDescriptor(dim);
      cfg.audit = std::move(setup);
    }
  }
  if (doc.contains("dt")) cfg.dt = number(doc["dt"], "dt");
  if (doc.contains("horizon")) cfg.horizon = number(doc["horizon"], "horizon");
  if (doc.contains("sample_stride")) cfg.sample_stride = count(doc["sample_stride"], "sample_stride");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ValidationError("seed must be a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("checks")) {
    const json& c = doc["checks"];
    only_keys(c, "checks",
              {"tracking_error_max", "conservation_max", "attack_error_max", "audit_tolerance", "formation_error_max",
               "formation_w_max", "lyapunov_margin"});
    auto set = [&](const char* key, double& field) {
      if (c.contains(key)) field = number(c[key], key);
    };
    set("tracking_error_max", cfg.checks.tracking_error_max);
    set("conservation_max", cfg.checks.conservation_max);
    set("attack_error_max", cfg.checks.attack_error_max);
    set("audit_tolerance", cfg.checks.audit_tolerance);
    set("formation_error_max", cfg.checks.formation_error_max);
    set("formation_w_max", cfg.checks.formation_w_max);
    set("lyapunov_margin", cfg.checks.lyapunov_margin);
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const ScenarioConfig& cfg) {
  json doc;
  doc["id"] = cfg.id;
  if (!cfg.graph_spec.empty()) {
    doc["graph"] = cfg.graph_spec;
  } else {
    json edges = json::array();
    for (const auto& [a, b] : cfg.graph.edges()) edges.push_back({a + 1, b + 1});
    doc["graph"] = {{"agents", cfg.graph.size()}, {"edges", edges}};
  }
  doc["kappa"] = cfg.kappa;
  doc["mode"] = to_string(cfg.mode);
  json refs = json::array();
  for (const auto& r : cfg.references) refs.push_back({{"initial", to_array(r.initial)}, {"rate", signal_to_json(r.rate)}});
  doc["references"] = refs;
  doc["split"] = {{"initial_range", {cfg.split.initial_range.first, cfg.split.initial_range.second}},
                  {"amplitude_range", {cfg.split.amplitude_range.first, cfg.split.amplitude_range.second}},
                  {"frequency_range", {cfg.split.frequency_range.first, cfg.split.frequency_range.second}}};
  if (cfg.attack) {
    doc["attack"] = {{"victim", cfg.attack->victim + 1}, {"k1", cfg.attack->k1}, {"k2", cfg.attack->k2},
                     {"k3", cfg.attack->k3}, {"k4", cfg.attack->k4}};
  }
  if (cfg.formation) {
    json robots = json::array();
    for (const auto& r : cfg.formation->robots) {
      robots.push_back({{"initial", {r.initial.x, r.initial.y, r.initial.theta}}, {"bias", to_array(r.bias)}});
    }
    const ControllerGains& g = cfg.formation->gains;
    doc["formation"] = {{"robots", robots},
                        {"gains",
                         {{"gamma1", g.gamma1}, {"gamma2", g.gamma2}, {"gamma3", g.gamma3}, {"gamma4", g.gamma4},
                          {"iota0", g.iota0}, {"iota1", g.iota1}, {"iota2", g.iota2}, {"sgn_epsilon", g.sgn_epsilon}}}};
  }
  if (cfg.audit) {
    json a = {{"target", cfg.audit->target + 1}, {"shift", to_array(cfg.audit->shift)},
              {"rate_change", signal_to_json(cfg.audit->rate_change)}};
    if (cfg.audit->accomplice) a["accomplice"] = *cfg.audit->accomplice + 1;
    doc["audit"] = a;
  }
  doc["dt"] = cfg.dt;
  doc["horizon"] = cfg.horizon;
  doc["sample_stride"] = cfg.sample_stride;
  doc["seed"] = cfg.seed;
  doc["checks"] = {{"tracking_error_max", cfg.checks.tracking_error_max},
                   {"conservation_max", cfg.checks.conservation_max},
                   {"attack_error_max", cfg.checks.attack_error_max},
                   {"audit_tolerance", cfg.checks.audit_tolerance},
                   {"formation_error_max", cfg.checks.formation_error_max},
                   {"formation_w_max", cfg.checks.formation_w_max},
                   {"lyapunov_margin", cfg.checks.lyapunov_margin}};
  return doc;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

std::string canonical_config(const ScenarioConfig& config) { return config_to_json(config).dump(); }

std::string config_hash(const ScenarioConfig& config) {
  const std::string text = canonical_config(config);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::ostringstream hex;
  hex << std::hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.width(2);
    hex.fill('0');
    hex << static_cast<int>(digest[i]);
  }
  return hex.str();
}

}  // namespace privdac
