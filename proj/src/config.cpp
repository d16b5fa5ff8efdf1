#include "covfluid/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "covfluid/format.hpp"

namespace covfluid {

namespace {

using Kind = ConfigError::Kind;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, int line) {
  double x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError(Kind::Parse, line, "expected a number, got '" + v + "'");
  return x;
}

long long to_integer(const std::string& v, int line) {
  long long x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError(Kind::Parse, line, "expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(Kind::Parse, line, "expected a boolean, got '" + v + "'");
}

struct Field {
  const char* key;
  std::function<void(SceneConfig&, const std::string&, int)> set;
  std::function<std::string(const SceneConfig&)> get;
};

void require(bool ok, const char* key, const std::string& value, const char* range, int line) {
  if (!ok) throw ConfigError(Kind::Range, line, std::string(key) + " = " + value + " outside " + range);
}

// Real-valued field with an admissible-range predicate.
template <typename Pred>
Field real(const char* key, double SceneConfig::*m, Pred ok, const char* range) {
  return {key,
          [=](SceneConfig& c, const std::string& v, int line) {
            const double x = to_double(v, line);
            require(ok(x), key, v, range, line);
            c.*m = x;
          },
          [=](const SceneConfig& c) { return format_number(c.*m); }};
}

Field integer(const char* key, int SceneConfig::*m, long long lo, const char* range) {
  return {key,
          [=](SceneConfig& c, const std::string& v, int line) {
            const long long x = to_integer(v, line);
            require(x >= lo && x <= 1'000'000'000, key, v, range, line);
            c.*m = static_cast<int>(x);
          },
          [=](const SceneConfig& c) { return std::to_string(c.*m); }};
}

Field boolean(const char* key, bool SceneConfig::*m) {
  return {key, [=](SceneConfig& c, const std::string& v, int line) { c.*m = to_bool(v, line); },
          [=](const SceneConfig& c) { return std::string(c.*m ? "true" : "false"); }};
}

template <typename E>
Field enumeration(const char* key, E SceneConfig::*m, std::vector<std::pair<const char*, E>> names) {
  return {key,
          [=](SceneConfig& c, const std::string& v, int line) {
            for (const auto& [n, e] : names)
              if (v == n) {
                c.*m = e;
                return;
              }
            throw ConfigError(Kind::Range, line, std::string(key) + " = " + v + " is not a valid choice");
          },
          [=](const SceneConfig& c) {
            for (const auto& [n, e] : names)
              if (c.*m == e) return std::string(n);
            return std::string("?");
          }};
}

const auto positive = [](double x) { return x > 0; };
const auto non_negative = [](double x) { return x >= 0; };
const auto any = [](double) { return true; };

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"scene",
                 [](SceneConfig& c, const std::string& v, int line) {
                   try {
                     c.scene = scene_from_string(v);
                   } catch (const std::invalid_argument& e) {
                     throw ConfigError(Kind::Range, line, e.what());
                   }
                 },
                 [](const SceneConfig& c) { return std::string(to_string(c.scene)); }});
    f.push_back(enumeration("mode", &SceneConfig::mode,
                            {{"base", SchemeMode::Base},
                             {"boundary", SchemeMode::Boundary},
                             {"baseline", SchemeMode::Baseline}}));
    f.push_back(enumeration("free_surface_treatment", &SceneConfig::surface,
                            {{"fusion", SurfaceTreatment::Fusion}, {"naive", SurfaceTreatment::Naive}}));
    f.push_back(enumeration("jacobian", &SceneConfig::jacobian,
                            {{"least_squares", JacobianMethod::LeastSquares}, {"ode", JacobianMethod::Ode}}));
    f.push_back(real("domain_width", &SceneConfig::domain_width, positive, "(0, inf)"));
    f.push_back(real("domain_height", &SceneConfig::domain_height, positive, "(0, inf)"));
    f.push_back(real("spacing", &SceneConfig::spacing, positive, "(0, inf)"));
    f.push_back(real("dt", &SceneConfig::dt, positive, "(0, inf)"));
    f.push_back(boolean("adaptive_dt", &SceneConfig::adaptive_dt));
    f.push_back(real("cfl", &SceneConfig::cfl, [](double x) { return x > 0 && x <= 1; }, "(0, 1]"));
    f.push_back(real("dt_max", &SceneConfig::dt_max, positive, "(0, inf)"));
    f.push_back(integer("steps", &SceneConfig::steps, 0, "[0, 1e9]"));
    f.push_back(integer("reinit_period", &SceneConfig::reinit_period, 1, "[1, 1e9]"));
    f.push_back(integer("surface_layers", &SceneConfig::surface_layers, 0, "[0, 1e9]"));
    f.push_back(boolean("sticky_flags", &SceneConfig::sticky_flags));
    f.push_back({"gravity_x",
                 [](SceneConfig& c, const std::string& v, int line) { c.gravity.x() = to_double(v, line); },
                 [](const SceneConfig& c) { return format_number(c.gravity.x()); }});
    f.push_back({"gravity_y",
                 [](SceneConfig& c, const std::string& v, int line) { c.gravity.y() = to_double(v, line); },
                 [](const SceneConfig& c) { return format_number(c.gravity.y()); }});
    f.push_back(enumeration("gravity_treatment", &SceneConfig::gravity_treatment,
                            {{"potential", GravityTreatment::Potential}, {"body_force", GravityTreatment::BodyForce}}));
    f.push_back(boolean("lloyd", &SceneConfig::lloyd));
    f.push_back(real("air_band", &SceneConfig::air_band, [](double x) { return x >= 1; }, "[1, inf)"));
    f.push_back(real("cg_tol", &SceneConfig::cg_tol, [](double x) { return x > 0 && x < 1; }, "(0, 1)"));
    f.push_back(integer("cg_max_iter", &SceneConfig::cg_max_iter, 0, "[0, 1e9]"));
    f.push_back({"output_dir", [](SceneConfig& c, const std::string& v, int) { c.output_dir = v; },
                 [](const SceneConfig& c) { return c.output_dir; }});
    f.push_back(integer("frame_every", &SceneConfig::frame_every, 0, "[0, 1e9]"));
    f.push_back(boolean("dump_voronoi", &SceneConfig::dump_voronoi));
    f.push_back(boolean("wall_clock", &SceneConfig::wall_clock));
    f.push_back(integer("threads", &SceneConfig::threads, 0, "[0, 1e9]"));
    f.push_back({"seed",
                 [](SceneConfig& c, const std::string& v, int line) {
                   const long long x = to_integer(v, line);
                   require(x >= 0, "seed", v, "[0, inf)", line);
                   c.seed = static_cast<std::uint64_t>(x);
                 },
                 [](const SceneConfig& c) { return std::to_string(c.seed); }});
    f.push_back(real("jitter", &SceneConfig::jitter, [](double x) { return x >= 0 && x <= 0.45; }, "[0, 0.45]"));
    f.push_back(real("tg_amplitude", &SceneConfig::tg_amplitude, any, "(-inf, inf)"));
    f.push_back(real("vortex_U", &SceneConfig::vortex_U, any, "(-inf, inf)"));
    f.push_back(real("vortex_a", &SceneConfig::vortex_a, positive, "(0, inf)"));
    f.push_back(real("vortex_separation", &SceneConfig::vortex_separation, non_negative, "[0, inf)"));
    f.push_back(real("lf_gamma", &SceneConfig::lf_gamma, any, "(-inf, inf)"));
    f.push_back(real("lf_core", &SceneConfig::lf_core, positive, "(0, inf)"));
    f.push_back(real("lf_x1", &SceneConfig::lf_x1, non_negative, "[0, inf)"));
    f.push_back(real("lf_x2", &SceneConfig::lf_x2, non_negative, "[0, inf)"));
    f.push_back(real("lf_half_gap", &SceneConfig::lf_half_gap, positive, "(0, inf)"));
    f.push_back(real("pool_height", &SceneConfig::pool_height, non_negative, "[0, inf)"));
    f.push_back(real("droplet_radius", &SceneConfig::droplet_radius, non_negative, "[0, inf)"));
    f.push_back(real("droplet_cx", &SceneConfig::droplet_cx, any, "(-inf, inf)"));
    f.push_back(real("droplet_cy", &SceneConfig::droplet_cy, any, "(-inf, inf)"));
    f.push_back(real("dam_width_fraction", &SceneConfig::dam_width_fraction,
                     [](double x) { return x >= 0 && x <= 1; }, "[0, 1]"));
    f.push_back(real("dam_height", &SceneConfig::dam_height, [](double x) { return x >= 0 && x <= 1; }, "[0, 1]"));
    return f;
  }();
  return table;
}

const Field* find_field(const std::string& key) {
  for (const Field& f : fields())
    if (key == f.key) return &f;
  return nullptr;
}

struct Entry {
  std::string key;
  std::string value;
  int line;
};

void check_lattice(const SceneConfig& c) {
  for (double extent : {c.domain_width, c.domain_height}) {
    const double n = extent / c.spacing;
    if (std::abs(n - std::round(n)) > 1e-9 * n || std::round(n) < 2)
      throw ConfigError(Kind::Range, 0, "domain extents must be multiples (>= 2) of spacing");
  }
  if (c.scene == SceneId::TaylorVortex && std::min(c.domain_width, c.domain_height) < 8 * c.vortex_a)
    throw ConfigError(Kind::Range, 0, "taylor_vortex needs a box of at least 8 vortex_a per side");
  if (c.scene == SceneId::Leapfrog && c.domain_width < 2 * c.domain_height)
    throw ConfigError(Kind::Range, 0, "leapfrog needs an aspect ratio of at least 2:1");
  if (c.pool_height > c.domain_height) throw ConfigError(Kind::Range, 0, "pool_height exceeds domain_height");
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& f : fields()) keys.emplace_back(f.key);
  return keys;
}

SceneConfig parse_config_text(const std::string& text, const ConfigOverrides& overrides) {
  std::vector<Entry> entries;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(Kind::Parse, line, "expected 'key = value'");
    Entry e{trim(body.substr(0, eq)), trim(body.substr(eq + 1)), line};
    if (e.key.empty()) throw ConfigError(Kind::Parse, line, "missing key");
    if (e.value.empty()) throw ConfigError(Kind::Parse, line, "missing value for '" + e.key + "'");
    if (!find_field(e.key)) throw ConfigError(Kind::UnknownKey, line, "unknown key '" + e.key + "'");
    if (auto [it, fresh] = seen.emplace(e.key, line); !fresh)
      throw ConfigError(Kind::Parse, line,
                        "duplicate key '" + e.key + "' (first set on line " + std::to_string(it->second) + ")");
    entries.push_back(std::move(e));
  }
  for (const auto& [k, v] : overrides) {
    if (!find_field(k)) throw ConfigError(Kind::UnknownKey, 0, "unknown key '" + k + "'");
    entries.push_back({k, v, 0});
  }

  SceneConfig cfg;
  for (const Entry& e : entries)
    if (e.key == "scene") find_field("scene")->set(cfg, e.value, e.line);
  cfg = scene_defaults(cfg.scene);
  for (const Entry& e : entries) find_field(e.key)->set(cfg, e.value, e.line);
  check_lattice(cfg);
  return cfg;
}

SceneConfig parse_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(Kind::Io, 0, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), overrides);
}

void write_resolved_config(std::ostream& os, const SceneConfig& cfg) {
  for (const Field& f : fields()) os << f.key << " = " << f.get(cfg) << '\n';
}

}  // namespace covfluid
