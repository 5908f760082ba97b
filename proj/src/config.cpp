#include "symcomp/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "symcomp/expression.hpp"

namespace symcomp {

using nlohmann::json;

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> checks = {
      "positivity",  "l1",           "pointwise",         "profile",          "min",
      "ordering",    "isoperimetric", "level",             "level_identity",   "theorem1_integrated",
      "concentration", "equimeasurability", "hardy_littlewood", "monotonicity", "oracle"};
  return checks;
}

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json& require(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(join(path, key), "missing");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
  return x;
}

double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0)) throw ConfigError(path, "must be > 0");
  return x;
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

Vec2 vec2(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(path, "expected [x, y]");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

Vec3 vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(path, "expected [x, y, z]");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]"), number(v[2], path + "[2]")};
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(join(path, it.key()), "unknown key");
  }
}

Manifold parse_manifold(const json& j) {
  const std::string p = "manifold";
  if (!j.is_object()) throw ConfigError(p, "expected an object");
  reject_unknown(j, p, {"kind", "kappa", "fraction"});
  const std::string kind = text(require(j, p, "kind"), p + ".kind");
  try {
    if (kind == "plane") return Manifold::plane();
    if (kind == "sphere") return Manifold::sphere(positive(require(j, p, "kappa"), p + ".kappa"));
    if (kind == "cone") return Manifold::cone(positive(require(j, p, "fraction"), p + ".fraction"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(p, e.what());
  }
  throw ConfigError(p + ".kind", "unknown manifold '" + kind + "' (plane, sphere, cone)");
}

DomainSpec parse_domain(const json& j, std::string& shape_name) {
  const std::string p = "domain";
  if (!j.is_object()) throw ConfigError(p, "expected an object");
  shape_name = text(require(j, p, "shape"), p + ".shape");
  const std::string& s = shape_name;
  if (s == "disk") {
    reject_unknown(j, p, {"shape", "radius", "center"});
    shape::Disk d;
    d.radius = positive(require(j, p, "radius"), p + ".radius");
    if (j.contains("center")) d.center = vec2(j["center"], p + ".center");
    return d;
  }
  if (s == "ellipse") {
    reject_unknown(j, p, {"shape", "a", "b", "center"});
    shape::Ellipse e;
    e.a = positive(require(j, p, "a"), p + ".a");
    e.b = positive(require(j, p, "b"), p + ".b");
    if (j.contains("center")) e.center = vec2(j["center"], p + ".center");
    return e;
  }
  if (s == "polygon") {
    reject_unknown(j, p, {"shape", "vertices"});
    const json& v = require(j, p, "vertices");
    if (!v.is_array() || v.size() < 3) throw ConfigError(p + ".vertices", "expected at least 3 points");
    shape::Polygon poly;
    for (std::size_t i = 0; i < v.size(); ++i) poly.vertices.push_back(vec2(v[i], p + ".vertices[" + std::to_string(i) + "]"));
    return poly;
  }
  if (s == "cap") {
    reject_unknown(j, p, {"shape", "radius"});
    return shape::SphericalCap{positive(require(j, p, "radius"), p + ".radius")};
  }
  if (s == "geodesic_polygon") {
    reject_unknown(j, p, {"shape", "vertices"});
    const json& v = require(j, p, "vertices");
    if (!v.is_array() || v.size() < 3) throw ConfigError(p + ".vertices", "expected at least 3 directions");
    shape::GeodesicPolygon poly;
    for (std::size_t i = 0; i < v.size(); ++i) poly.vertices.push_back(vec3(v[i], p + ".vertices[" + std::to_string(i) + "]"));
    return poly;
  }
  if (s == "annular_sector") {
    reject_unknown(j, p, {"shape", "r_inner", "r_outer", "angle_begin", "angle_end"});
    shape::AnnularSector a;
    a.r_inner = positive(require(j, p, "r_inner"), p + ".r_inner");
    a.r_outer = positive(require(j, p, "r_outer"), p + ".r_outer");
    a.angle_begin = number(require(j, p, "angle_begin"), p + ".angle_begin");
    a.angle_end = number(require(j, p, "angle_end"), p + ".angle_end");
    return a;
  }
  if (s == "cone_disk") {
    reject_unknown(j, p, {"shape", "radius", "center_distance", "center_angle"});
    shape::ConeDisk c;
    c.radius = positive(require(j, p, "radius"), p + ".radius");
    c.center_distance = positive(require(j, p, "center_distance"), p + ".center_distance");
    c.center_angle = number(require(j, p, "center_angle"), p + ".center_angle");
    return c;
  }
  throw ConfigError(p + ".shape",
                    "unknown shape '" + s + "' (disk, ellipse, polygon, cap, geodesic_polygon, annular_sector, cone_disk)");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& f) {
  std::filesystem::path p(f);
  return p.is_absolute() || base.empty() ? p : base / p;
}

SourceSpec parse_source(const json& j, const std::filesystem::path& base) {
  const std::string p = "source";
  if (!j.is_object() || j.size() != 1) throw ConfigError(p, "expected exactly one of constant, expression, file");
  SourceSpec s;
  if (j.contains("constant")) {
    s.kind = SourceSpec::Kind::constant;
    s.value = positive(j["constant"], p + ".constant");
  } else if (j.contains("expression")) {
    s.kind = SourceSpec::Kind::expression;
    s.expression = text(j["expression"], p + ".expression");
    try {
      (void)Expression::parse(s.expression);
    } catch (const ExpressionError& e) {
      throw ConfigError(p + ".expression", e.what());
    }
  } else if (j.contains("file")) {
    s.kind = SourceSpec::Kind::file;
    s.file = resolve(base, text(j["file"], p + ".file"));
  } else {
    throw ConfigError(join(p, j.begin().key()), "unknown key");
  }
  return s;
}

BetaSpec parse_beta(const json& j, const std::filesystem::path& base) {
  const std::string p = "beta";
  if (!j.is_object()) throw ConfigError(p, "expected an object");
  BetaSpec b;
  if (j.contains("constant")) {
    reject_unknown(j, p, {"constant"});
    b.kind = BetaSpec::Kind::constant;
    b.value = positive(j["constant"], p + ".constant");
  } else if (j.contains("arcs")) {
    reject_unknown(j, p, {"arcs", "default"});
    b.kind = BetaSpec::Kind::arcs;
    b.default_value = positive(require(j, p, "default"), p + ".default");
    const json& arcs = j["arcs"];
    if (!arcs.is_array() || arcs.empty()) throw ConfigError(p + ".arcs", "expected a nonempty array");
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      const std::string q = p + ".arcs[" + std::to_string(i) + "]";
      if (!arcs[i].is_object()) throw ConfigError(q, "expected an object");
      reject_unknown(arcs[i], q, {"from", "to", "value"});
      BetaArc a;
      a.from = number(require(arcs[i], q, "from"), q + ".from");
      a.to = number(require(arcs[i], q, "to"), q + ".to");
      a.value = positive(require(arcs[i], q, "value"), q + ".value");
      if (a.from < 0.0 || a.from >= 1.0 || a.to < 0.0 || a.to > 1.0 || a.from == a.to)
        throw ConfigError(q, "from/to must be distinct boundary parameters in [0, 1]");
      b.arcs.push_back(a);
    }
  } else if (j.contains("file")) {
    reject_unknown(j, p, {"file"});
    b.kind = BetaSpec::Kind::file;
    b.file = resolve(base, text(j["file"], p + ".file"));
  } else {
    throw ConfigError(p, "expected one of constant, arcs, file");
  }
  return b;
}

}  // namespace

RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("", "top level must be an object");
  reject_unknown(j, "", {"name", "manifold", "domain", "source", "beta", "mesh", "checks", "tolerance", "seed", "output"});

  RunConfig c;
  if (j.contains("name")) c.name = text(j["name"], "name");
  c.manifold = parse_manifold(require(j, "", "manifold"));
  c.domain = parse_domain(require(j, "", "domain"), c.domain_shape);
  c.source = parse_source(require(j, "", "source"), base_dir);
  c.beta = parse_beta(require(j, "", "beta"), base_dir);

  const json& mesh = require(j, "", "mesh");
  if (!mesh.is_object()) throw ConfigError("mesh", "expected an object");
  reject_unknown(mesh, "mesh", {"h", "refinements"});
  c.h = positive(require(mesh, "mesh", "h"), "mesh.h");
  if (mesh.contains("refinements")) {
    const json& r = mesh["refinements"];
    if (!r.is_number_integer()) throw ConfigError("mesh.refinements", "expected an integer");
    c.refinements = r.get<int>();
    if (c.refinements < 0 || c.refinements > 5) throw ConfigError("mesh.refinements", "must lie in [0, 5]");
  }

  if (j.contains("checks")) {
    const json& ch = j["checks"];
    if (ch.is_string() && ch.get<std::string>() == "all") {
      c.checks = known_checks();
    } else {
      if (!ch.is_array()) throw ConfigError("checks", "expected \"all\" or an array of names");
      std::set<std::string> wanted;
      for (std::size_t i = 0; i < ch.size(); ++i) {
        const std::string name = text(ch[i], "checks[" + std::to_string(i) + "]");
        bool ok = false;
        for (const auto& k : known_checks()) ok = ok || k == name;
        if (!ok) throw ConfigError("checks[" + std::to_string(i) + "]", "unknown check '" + name + "'");
        wanted.insert(name);
      }
      for (const auto& k : known_checks())
        if (wanted.count(k)) c.checks.push_back(k);
    }
  } else {
    c.checks = known_checks();
  }

  if (j.contains("tolerance")) {
    const json& t = j["tolerance"];
    if (!t.is_object()) throw ConfigError("tolerance", "expected an object");
    reject_unknown(t, "tolerance", {"scale"});
    if (t.contains("scale")) c.tol_scale = positive(t["scale"], "tolerance.scale");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output")) c.output = resolve(base_dir, text(j["output"], "output"));

  try {
    (void)make_domain(c.domain, c.manifold);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("domain", e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::vector<double> read_number_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<double> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(v))
        throw std::runtime_error(path.string() + " line " + std::to_string(lineno) + ": not a number '" + tok + "'");
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace symcomp
