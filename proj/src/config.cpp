#include "spinbound/config.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "spinbound/error.hpp"
#include "spinbound/fhat.hpp"

namespace spinbound {

using nlohmann::json;

namespace {

class Checker {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    fail(path, "expected an object");
    return false;
  }

  void keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : j.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) fail(path, "unknown key '" + k + "'");
    }
  }

  std::optional<double> number(const json& j, const std::string& path, const char* key, bool required) {
    if (!j.contains(key)) {
      if (required) fail(path, std::string("missing ") + key);
      return std::nullopt;
    }
    const json& v = j.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      fail(path + "." + key, "expected a finite number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  void number_into(const json& j, const std::string& path, const char* key, double& out) {
    if (auto v = number(j, path, key, false)) out = *v;
  }

  std::optional<std::uint64_t> count(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    const json& v = j.at(key);
    if (!v.is_number_unsigned()) {
      fail(path + "." + key, "expected a non-negative integer");
      return std::nullopt;
    }
    return v.get<std::uint64_t>();
  }

  std::optional<std::string> string(const json& j, const std::string& path, const char* key, bool required) {
    if (!j.contains(key)) {
      if (required) fail(path, std::string("missing ") + key);
      return std::nullopt;
    }
    if (!j.at(key).is_string()) {
      fail(path + "." + key, "expected a string");
      return std::nullopt;
    }
    return j.at(key).get<std::string>();
  }

  std::optional<bool> boolean(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    if (!j.at(key).is_boolean()) {
      fail(path + "." + key, "expected true or false");
      return std::nullopt;
    }
    return j.at(key).get<bool>();
  }

  std::optional<Pair> pair(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number() ||
        !std::isfinite(v[0].get<double>()) || !std::isfinite(v[1].get<double>())) {
      fail(path, "expected [x, y] with finite numbers");
      return std::nullopt;
    }
    return Pair{v[0].get<double>(), v[1].get<double>()};
  }

  std::optional<Pair> pair(const json& j, const std::string& path, const char* key, bool required) {
    if (!j.contains(key)) {
      if (required) fail(path, std::string("missing ") + key);
      return std::nullopt;
    }
    return pair(j.at(key), path + "." + key);
  }

  std::optional<std::vector<double>> numbers(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    const json& v = j.at(key);
    if (!v.is_array()) {
      fail(path + "." + key, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) {
        fail(path + "." + key, "expected an array of finite numbers");
        return std::nullopt;
      }
      out.push_back(x.get<double>());
    }
    return out;
  }
};

ModelConfig parse_model(Checker& c, const json& j) {
  const std::string path = "model";
  ModelConfig m;
  if (!c.object(j, path)) return m;
  c.keys(j, path, {"type", "alpha", "terms", "a_growth", "r_growth"});
  m.type = c.string(j, path, "type", true).value_or("");
  if (m.type == "rashba" || m.type == "dresselhaus") {
    if (auto a = c.number(j, path, "alpha", true)) m.alpha = *a;
    if (j.contains("terms")) c.fail(path, "terms apply to custom couplings only");
  } else if (m.type == "custom") {
    c.number_into(j, path, "a_growth", m.a_growth);
    c.number_into(j, path, "r_growth", m.r_growth);
    if (!(m.a_growth > 0.0 && m.a_growth < 1.0)) c.fail(path + ".a_growth", "must lie in (0, 1)");
    if (!(m.r_growth > 0.0)) c.fail(path + ".r_growth", "must be positive");
    if (!j.contains("terms") || !j.at("terms").is_array() || j.at("terms").empty()) {
      c.fail(path, "custom coupling needs a non-empty terms array");
    } else {
      for (std::size_t i = 0; i < j.at("terms").size(); ++i) {
        const json& t = j.at("terms")[i];
        const std::string tp = path + ".terms[" + std::to_string(i) + "]";
        if (!c.object(t, tp)) continue;
        c.keys(t, tp, {"coef", "power", "winding"});
        CouplingTerm term;
        if (t.contains("coef")) {
          if (t.at("coef").is_number())
            term.coef = {t.at("coef").get<double>(), 0.0};
          else if (auto p = c.pair(t.at("coef"), tp + ".coef"))
            term.coef = *p;
        } else {
          c.fail(tp, "missing coef");
        }
        c.number_into(t, tp, "power", term.power);
        if (!(term.power >= 0.0 && term.power <= 2.0)) c.fail(tp + ".power", "must lie in [0, 2]");
        if (t.contains("winding")) {
          if (t.at("winding").is_number_integer())
            term.winding = t.at("winding").get<int>();
          else
            c.fail(tp + ".winding", "expected an integer");
        }
        m.terms.push_back(term);
      }
    }
    if (j.contains("alpha")) c.fail(path, "alpha applies to rashba and dresselhaus only");
  } else if (!m.type.empty()) {
    c.fail(path + ".type", "expected rashba, dresselhaus or custom");
  }
  return m;
}

CurveConfig parse_curve(Checker& c, const json& j, const std::string& path) {
  CurveConfig cv;
  if (!c.object(j, path)) return cv;
  cv.type = c.string(j, path, "type", true).value_or("");
  if (cv.type == "circle") {
    c.keys(j, path, {"type", "center", "radius"});
    if (auto p = c.pair(j, path, "center", false)) cv.center = *p;
    if (auto r = c.number(j, path, "radius", true)) cv.radius = *r;
    if (!(cv.radius > 0.0)) c.fail(path + ".radius", "must be positive");
  } else if (cv.type == "segment") {
    c.keys(j, path, {"type", "from", "to"});
    if (auto p = c.pair(j, path, "from", true)) cv.from = *p;
    if (auto p = c.pair(j, path, "to", true)) cv.to = *p;
    if (cv.from == cv.to && j.contains("from") && j.contains("to")) c.fail(path, "segment has zero length");
  } else if (cv.type == "sampled") {
    c.keys(j, path, {"type", "nodes", "closed"});
    cv.closed = c.boolean(j, path, "closed").value_or(false);
    if (!j.contains("nodes") || !j.at("nodes").is_array()) {
      c.fail(path, "missing nodes array");
    } else {
      for (std::size_t i = 0; i < j.at("nodes").size(); ++i)
        if (auto p = c.pair(j.at("nodes")[i], path + ".nodes[" + std::to_string(i) + "]")) cv.nodes.push_back(*p);
      if (cv.nodes.size() < (cv.closed ? 3u : 2u)) c.fail(path + ".nodes", "too few nodes");
    }
  } else if (!cv.type.empty()) {
    c.fail(path + ".type", "expected circle, segment or sampled");
  }
  return cv;
}

void parse_box(Checker& c, const json& j, const std::string& path, MeasureConfig& m) {
  if (!j.contains("box")) {
    c.fail(path, "missing box");
    return;
  }
  const json& b = j.at("box");
  if (!c.object(b, path + ".box")) return;
  c.keys(b, path + ".box", {"lo", "hi"});
  if (auto p = c.pair(b, path + ".box", "lo", true)) m.box_lo = *p;
  if (auto p = c.pair(b, path + ".box", "hi", true)) m.box_hi = *p;
  if (!(m.box_lo[0] < m.box_hi[0] && m.box_lo[1] < m.box_hi[1])) c.fail(path + ".box", "lo must be below hi");
}

MeasureConfig parse_measure(Checker& c, const json& j, const std::string& path, int depth) {
  MeasureConfig m;
  if (!c.object(j, path)) return m;
  if (depth > 16) {
    c.fail(path, "measure nesting too deep");
    return m;
  }
  m.type = c.string(j, path, "type", true).value_or("");
  if (m.type == "zero") {
    c.keys(j, path, {"type"});
  } else if (m.type == "curve") {
    c.keys(j, path, {"type", "curve", "weight"});
    if (j.contains("curve"))
      m.curve = parse_curve(c, j.at("curve"), path + ".curve");
    else
      c.fail(path, "missing curve");
    if (auto w = c.number(j, path, "weight", true)) m.weight = *w;
  } else if (m.type == "density") {
    m.density = c.string(j, path, "density", true).value_or("");
    if (m.density == "gaussian_well") {
      c.keys(j, path, {"type", "density", "depth", "width", "center", "box"});
      if (auto v = c.number(j, path, "depth", true)) m.depth = *v;
      c.number_into(j, path, "width", m.width);
      if (!(m.width > 0.0)) c.fail(path + ".width", "must be positive");
      if (auto p = c.pair(j, path, "center", false)) m.center = *p;
      parse_box(c, j, path, m);
    } else if (m.density == "grid") {
      c.keys(j, path, {"type", "density", "nx", "ny", "values", "box"});
      m.nx = c.count(j, path, "nx").value_or(0);
      m.ny = c.count(j, path, "ny").value_or(0);
      if (m.nx < 2 || m.ny < 2) c.fail(path, "nx and ny must be at least 2");
      m.values = c.numbers(j, path, "values").value_or(std::vector<double>{});
      if (m.values.size() != m.nx * m.ny) c.fail(path + ".values", "expected nx * ny values");
      parse_box(c, j, path, m);
    } else if (!m.density.empty()) {
      c.fail(path + ".density", "expected gaussian_well or grid");
    }
  } else if (m.type == "sum") {
    c.keys(j, path, {"type", "terms"});
    if (!j.contains("terms") || !j.at("terms").is_array()) {
      c.fail(path, "missing terms array");
    } else {
      for (std::size_t i = 0; i < j.at("terms").size(); ++i)
        m.terms.push_back(parse_measure(c, j.at("terms")[i], path + ".terms[" + std::to_string(i) + "]", depth + 1));
    }
  } else if (!m.type.empty()) {
    c.fail(path + ".type", "expected zero, curve, density or sum");
  }
  return m;
}

void parse_certify(Checker& c, const json& j, CertifyConfig& cc) {
  const std::string path = "certify";
  if (!c.object(j, path)) return;
  c.keys(j, path, {"N", "a_schedule", "point_strategy", "potential_form", "search_budget", "tol_def",
                   "sharpness", "min_distance"});
  if (auto n = c.count(j, path, "N")) cc.n = *n;
  if (cc.n < 1) c.fail(path + ".N", "must be at least 1");
  if (auto s = c.numbers(j, path, "a_schedule")) cc.a_schedule = *s;
  if (cc.a_schedule.empty()) c.fail(path + ".a_schedule", "must not be empty");
  for (std::size_t i = 0; i < cc.a_schedule.size(); ++i) {
    const double a = cc.a_schedule[i];
    if (!(a > 0.0 && a <= 2.0))
      c.fail(path + ".a_schedule", "a outside (0, 2]");
    else if (a < FhatProfile::kMinWidth)
      c.fail(path + ".a_schedule", "a below the supported minimum 0.02");
    if (i > 0 && !(a < cc.a_schedule[i - 1])) c.fail(path + ".a_schedule", "must be strictly decreasing");
  }
  if (auto s = c.string(j, path, "point_strategy", false)) cc.point_strategy = *s;
  if (cc.point_strategy != "equispaced" && cc.point_strategy != "farthest_point")
    c.fail(path + ".point_strategy", "expected equispaced or farthest_point");
  if (auto s = c.string(j, path, "potential_form", false)) cc.potential_form = *s;
  if (cc.potential_form != "exact" && cc.potential_form != "dropped")
    c.fail(path + ".potential_form", "expected exact or dropped");
  if (auto n = c.count(j, path, "search_budget")) cc.search_budget = *n;
  if (cc.search_budget < 1) c.fail(path + ".search_budget", "must be at least 1");
  c.number_into(j, path, "tol_def", cc.tol_def);
  if (!(cc.tol_def > 0.0)) c.fail(path + ".tol_def", "must be positive");
  c.number_into(j, path, "sharpness", cc.sharpness);
  if (!(cc.sharpness > 0.0)) c.fail(path + ".sharpness", "must be positive");
  c.number_into(j, path, "min_distance", cc.min_distance);
  if (!(cc.min_distance > 0.0)) c.fail(path + ".min_distance", "must be positive");
}

void parse_oracle(Checker& c, const json& j, OracleConfig& oc) {
  const std::string path = "oracle";
  if (!c.object(j, path)) return;
  c.keys(j, path, {"L", "cutoffs", "edge_tol", "max_modes"});
  c.number_into(j, path, "L", oc.half_side);
  if (!(oc.half_side > 0.0)) c.fail(path + ".L", "must be positive");
  if (auto s = c.numbers(j, path, "cutoffs")) oc.cutoffs = *s;
  if (oc.cutoffs.empty()) c.fail(path + ".cutoffs", "must not be empty");
  for (std::size_t i = 0; i < oc.cutoffs.size(); ++i) {
    if (!(oc.cutoffs[i] > 0.0)) c.fail(path + ".cutoffs", "must be positive");
    if (i > 0 && !(oc.cutoffs[i] > oc.cutoffs[i - 1])) c.fail(path + ".cutoffs", "must be increasing");
  }
  if (auto e = c.number(j, path, "edge_tol", false)) {
    oc.edge_tol = *e;
    if (*e < 0.0) c.fail(path + ".edge_tol", "must be non-negative");
  }
  if (auto n = c.count(j, path, "max_modes")) oc.max_modes = *n;
  if (oc.max_modes < 1) c.fail(path + ".max_modes", "must be at least 1");
}

void parse_scan(Checker& c, const json& j, ScanConfig& sc) {
  const std::string path = "scan";
  if (!c.object(j, path)) return;
  c.keys(j, path, {"angles", "r_max", "samples"});
  if (auto s = c.numbers(j, path, "angles")) sc.angles = *s;
  if (sc.angles.empty()) c.fail(path + ".angles", "must not be empty");
  c.number_into(j, path, "r_max", sc.r_max);
  if (!(sc.r_max > 0.0)) c.fail(path + ".r_max", "must be positive");
  if (auto n = c.count(j, path, "samples")) sc.samples = *n;
  if (sc.samples < 64) c.fail(path + ".samples", "must be at least 64");
}

void parse_fourier(Checker& c, const json& j, FourierConfig& fc) {
  const std::string path = "fourier";
  if (!c.object(j, path)) return;
  c.keys(j, path, {"grid", "angle"});
  if (auto s = c.string(j, path, "grid", false)) fc.grid = *s;
  try {
    parse_grid(fc.grid);
  } catch (const ConfigError& e) {
    c.fail(path + ".grid", e.what());
  }
  c.number_into(j, path, "angle", fc.angle);
}

void parse_output(Checker& c, const json& j, OutputConfig& oc) {
  const std::string path = "output";
  if (!c.object(j, path)) return;
  c.keys(j, path, {"report", "eigenvalues", "profile", "fourier", "timing"});
  oc.report = c.string(j, path, "report", false).value_or("");
  oc.eigenvalues = c.string(j, path, "eigenvalues", false).value_or("");
  oc.profile = c.string(j, path, "profile", false).value_or("");
  oc.fourier = c.string(j, path, "fourier", false).value_or("");
  oc.timing = c.boolean(j, path, "timing").value_or(false);
}

json pair_json(const Pair& p) { return json::array({p[0], p[1]}); }

json measure_json(const MeasureConfig& m) {
  json j;
  j["type"] = m.type;
  if (m.type == "curve") {
    json cv;
    cv["type"] = m.curve.type;
    if (m.curve.type == "circle") {
      cv["center"] = pair_json(m.curve.center);
      cv["radius"] = m.curve.radius;
    } else if (m.curve.type == "segment") {
      cv["from"] = pair_json(m.curve.from);
      cv["to"] = pair_json(m.curve.to);
    } else {
      cv["nodes"] = json::array();
      for (const auto& p : m.curve.nodes) cv["nodes"].push_back(pair_json(p));
      cv["closed"] = m.curve.closed;
    }
    j["curve"] = cv;
    j["weight"] = m.weight;
  } else if (m.type == "density") {
    j["density"] = m.density;
    if (m.density == "gaussian_well") {
      j["depth"] = m.depth;
      j["width"] = m.width;
      j["center"] = pair_json(m.center);
    } else {
      j["nx"] = m.nx;
      j["ny"] = m.ny;
      j["values"] = m.values;
    }
    j["box"] = {{"lo", pair_json(m.box_lo)}, {"hi", pair_json(m.box_hi)}};
  } else if (m.type == "sum") {
    j["terms"] = json::array();
    for (const auto& t : m.terms) j["terms"].push_back(measure_json(t));
  }
  return j;
}

void write_value(std::ostringstream& out, const json& v, int indent, int level) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * level), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out << "{}";
        return;
      }
      out << "{" << nl;
      bool first = true;
      for (const auto& [k, x] : v.items()) {  // nlohmann objects iterate in key order
        if (!first) out << "," << nl;
        first = false;
        out << pad << json(k).dump() << (indent > 0 ? ": " : ":");
        write_value(out, x, indent, level + 1);
      }
      out << nl << close << "}";
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out << "[]";
        return;
      }
      out << "[" << nl;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << "," << nl;
        out << pad;
        write_value(out, v[i], indent, level + 1);
      }
      out << nl << close << "]";
      return;
    }
    case json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        out << "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      std::string s = buf;
      if (s.find_first_of(".eE") == std::string::npos) s += ".0";
      out << s;
      return;
    }
    default:
      out << v.dump();
  }
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  double lo = 0.0, hi = 0.0, step = 0.0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &step, &tail) != 3)
    throw ConfigError("grid must look like lo:hi:step");
  if (!(std::isfinite(lo) && std::isfinite(hi) && step > 0.0 && hi >= lo))
    throw ConfigError("grid needs finite lo <= hi and a positive step");
  const double n = std::floor((hi - lo) / step + 1e-9);
  if (n > 1e6) throw ConfigError("grid has more than a million points");
  std::vector<double> out;
  for (int i = 0; i <= static_cast<int>(n); ++i) out.push_back(lo + step * i);
  return out;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  Checker c;
  RunConfig cfg;
  if (!c.object(j, "config")) throw ConfigError(c.errors.front());
  c.keys(j, "config", {"model", "measure", "certify", "oracle", "scan", "fourier", "output", "seed"});
  if (j.contains("model")) cfg.model = parse_model(c, j.at("model"));
  if (j.contains("measure")) cfg.measure = parse_measure(c, j.at("measure"), "measure", 0);
  if (j.contains("certify")) parse_certify(c, j.at("certify"), cfg.certify);
  if (j.contains("oracle")) parse_oracle(c, j.at("oracle"), cfg.oracle);
  if (j.contains("scan")) parse_scan(c, j.at("scan"), cfg.scan);
  if (j.contains("fourier")) parse_fourier(c, j.at("fourier"), cfg.fourier);
  if (j.contains("output")) parse_output(c, j.at("output"), cfg.output);
  if (auto s = c.count(j, "config", "seed")) cfg.seed = *s;
  if (!c.errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : c.errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json j;
  if (cfg.model) {
    const auto& m = *cfg.model;
    json mj{{"type", m.type}};
    if (m.type == "custom") {
      mj["a_growth"] = m.a_growth;
      mj["r_growth"] = m.r_growth;
      mj["terms"] = json::array();
      for (const auto& t : m.terms)
        mj["terms"].push_back({{"coef", pair_json(t.coef)}, {"power", t.power}, {"winding", t.winding}});
    } else {
      mj["alpha"] = m.alpha;
    }
    j["model"] = mj;
  }
  if (cfg.measure) j["measure"] = measure_json(*cfg.measure);
  const auto& c = cfg.certify;
  j["certify"] = {{"N", c.n},
                  {"a_schedule", c.a_schedule},
                  {"point_strategy", c.point_strategy},
                  {"potential_form", c.potential_form},
                  {"search_budget", c.search_budget},
                  {"tol_def", c.tol_def},
                  {"sharpness", c.sharpness},
                  {"min_distance", c.min_distance}};
  j["oracle"] = {{"L", cfg.oracle.half_side}, {"cutoffs", cfg.oracle.cutoffs}, {"max_modes", cfg.oracle.max_modes}};
  if (cfg.oracle.edge_tol) j["oracle"]["edge_tol"] = *cfg.oracle.edge_tol;
  j["scan"] = {{"angles", cfg.scan.angles}, {"r_max", cfg.scan.r_max}, {"samples", cfg.scan.samples}};
  j["fourier"] = {{"grid", cfg.fourier.grid}, {"angle", cfg.fourier.angle}};
  j["output"] = {{"report", cfg.output.report},
                 {"eigenvalues", cfg.output.eigenvalues},
                 {"profile", cfg.output.profile},
                 {"fourier", cfg.output.fourier},
                 {"timing", cfg.output.timing}};
  j["seed"] = cfg.seed;
  return j;
}

std::string serialize_config(const RunConfig& config) { return write_json(config_to_json(config)); }

std::string write_json(const json& value, int indent) {
  std::ostringstream out;
  write_value(out, value, indent, 0);
  return out.str();
}

CouplingSpec build_model(const ModelConfig& m) {
  if (m.type == "rashba") return Rashba{m.alpha};
  if (m.type == "dresselhaus") return Dresselhaus{m.alpha};
  if (m.type != "custom") throw ConfigError("unknown model type '" + m.type + "'");
  CustomCoupling c;
  const auto terms = m.terms;
  c.evaluator = [terms](const Vec2& p) {
    const double r = p.norm();
    const double th = std::atan2(p.y(), p.x());
    cplx s = 0.0;
    for (const auto& t : terms) {
      const double mag = t.power == 0.0 ? 1.0 : std::pow(r, t.power);
      s += cplx(t.coef[0], t.coef[1]) * mag * std::polar(1.0, t.winding * th);
    }
    return s;
  };
  c.a_growth = m.a_growth;
  c.r_growth = m.r_growth;
  return c;
}

RadonMeasureSpec build_measure(const MeasureConfig& m) {
  auto vec = [](const Pair& p) { return Vec2(p[0], p[1]); };
  if (m.type == "zero") return RadonMeasureSpec::zero();
  if (m.type == "curve") {
    Curve curve = m.curve.type == "circle"    ? Curve::circle(vec(m.curve.center), m.curve.radius)
                  : m.curve.type == "segment" ? Curve::segment(vec(m.curve.from), vec(m.curve.to))
                                              : [&] {
                                                  PointList nodes;
                                                  for (const auto& p : m.curve.nodes) nodes.push_back(vec(p));
                                                  return Curve::sampled(nodes, m.curve.closed);
                                                }();
    return RadonMeasureSpec::curve_delta(std::move(curve), m.weight);
  }
  if (m.type == "density") {
    const Box box{vec(m.box_lo), vec(m.box_hi)};
    if (m.density == "gaussian_well") return RadonMeasureSpec::gaussian_well(m.depth, m.width, vec(m.center), box);
    const auto values = m.values;
    const std::size_t nx = m.nx, ny = m.ny;
    const double hx = (box.hi.x() - box.lo.x()) / static_cast<double>(nx - 1);
    const double hy = (box.hi.y() - box.lo.y()) / static_cast<double>(ny - 1);
    bool nonpositive = true;
    for (double v : values) nonpositive = nonpositive && v <= 0.0;
    // bilinear interpolation of the node values
    auto field = [=](const Vec2& x) {
      const double u = std::clamp((x.x() - box.lo.x()) / hx, 0.0, static_cast<double>(nx - 1));
      const double v = std::clamp((x.y() - box.lo.y()) / hy, 0.0, static_cast<double>(ny - 1));
      const auto i = std::min(static_cast<std::size_t>(u), nx - 2);
      const auto k = std::min(static_cast<std::size_t>(v), ny - 2);
      const double fu = u - static_cast<double>(i), fv = v - static_cast<double>(k);
      auto at = [&](std::size_t a, std::size_t b) { return values[b * nx + a]; };
      return (1 - fu) * (1 - fv) * at(i, k) + fu * (1 - fv) * at(i + 1, k) + (1 - fu) * fv * at(i, k + 1) +
             fu * fv * at(i + 1, k + 1);
    };
    return RadonMeasureSpec::density(field, box, nonpositive);
  }
  if (m.type == "sum") {
    std::vector<RadonMeasureSpec> terms;
    for (const auto& t : m.terms) terms.push_back(build_measure(t));
    return RadonMeasureSpec::sum(std::move(terms));
  }
  throw ConfigError("unknown measure type '" + m.type + "'");
}

}  // namespace spinbound
