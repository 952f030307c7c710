#include "sparse_jacobi/io/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sparse_jacobi/errors.hpp"
#include "sparse_jacobi/io/artifacts.hpp"

namespace sparse_jacobi::io {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config key '" + path + "': " + what);
}

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

// Plain scalars become bool / integer / float when they parse as such; quoted ones stay strings.
Json scalar_to_json(const YAML::Node& n) {
  const std::string s = n.Scalar();
  if (n.Tag() == "!") return s;
  if (s == "true" || s == "True") return true;
  if (s == "false" || s == "False") return false;
  if (s == "null" || s == "~" || s.empty()) return nullptr;
  {
    std::istringstream is(s);
    long long v;
    if (is >> v && is.eof()) return v;
  }
  {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() && *end == '\0') return v;
  }
  return s;
}

Json to_json(const YAML::Node& n, const std::string& path) {
  switch (n.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Scalar:
      return scalar_to_json(n);
    case YAML::NodeType::Sequence: {
      Json a = Json::array();
      for (std::size_t i = 0; i < n.size(); ++i) a.push_back(to_json(n[i], path + "[" + std::to_string(i) + "]"));
      return a;
    }
    case YAML::NodeType::Map: {
      Json o = Json::object();
      for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        if (o.contains(key)) fail(join(path, key), "duplicate key");
        o[key] = to_json(kv.second, join(path, key));
      }
      return o;
    }
  }
  return nullptr;
}

double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

long long as_integer(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<long long>();
}

bool as_bool(const Json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

// Decimal integer given as a number or a string.
BigInt as_bigint(const Json& v, const std::string& path) {
  std::string s;
  if (v.is_number_integer()) s = std::to_string(v.get<long long>());
  else if (v.is_string()) s = v.get<std::string>();
  else fail(path, "expected an integer or a decimal string");
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    fail(path, "'" + s + "' is not a non-negative decimal integer");
  return BigInt(s, 10);
}

std::pair<double, double> as_interval(const Json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected [lo, hi]");
  const double lo = as_number(v[0], path + "[0]");
  const double hi = as_number(v[1], path + "[1]");
  if (!(lo < hi)) fail(path, "needs lo < hi");
  return {lo, hi};
}

void reject_unknown(const Json& section, const std::string& path, const std::set<std::string>& allowed) {
  if (section.is_null()) return;
  if (!section.is_object()) fail(path, "expected a mapping");
  for (const auto& [k, v] : section.items())
    if (!allowed.count(k)) fail(join(path, k), "unknown key");
}

const Json& require(const Json& section, const std::string& path, const std::string& key) {
  if (!section.is_object() || !section.contains(key)) fail(join(path, key), "missing");
  return section.at(key);
}

Json defaults_table() {
  Json t;
  t["model"] = {{"lambda", 0.0}};
  t["density"] = {{"N", "auto"}, {"points", 512}, {"lambda_range", {-1.99, 1.99}},
                  {"mass_tol", 1e-10}, {"free_tol", 1e-9}};
  t["decay-scan"] = {{"N", "auto"},        {"center", 1.0},      {"half_width", 0.8},
                     {"flatness", 0.5},    {"mirrored", false},  {"t_range", {2.0, 1e4}},
                     {"t_points", 40},     {"c", 1.0},           {"resonance_marks", true},
                     {"phi_window", {0.6, 2.5}}, {"scan_points", 1024}};
  t["resonance"] = {{"t", {100.0, 1000.0}}, {"phi_window", {0.6, 2.5}}, {"scan_points", 2048}, {"c", 1.0}};
  t["corput"] = {{"window", {0.5, 1.5}}, {"t_range", {10.0, 1e4}}, {"t_points", 20},
                 {"tau_span", 5.0},     {"tau_points", 41},      {"kappa_ratio", 1.0}};
  t["lemma-main"] = {{"measure", "smooth"},    {"center", 1.0},       {"sigma", 0.06},
                     {"epsilon", 0.2},         {"window", {0.5, 1.5}}, {"kappa_ratio", 0.5},
                     {"t_range", {2.0, 1e4}},  {"t_points", 40},      {"max_slope", 0.02},
                     {"plancherel_points", 20}, {"plancherel_t_range", {2.0, 100.0}},
                     {"plancherel_tol", 1e-4}};
  t["gevrey-verify"] = {{"m_max", 3},           {"n_max", 12},       {"phi_points", 33},
                        {"delta", 0.125},       {"K", 3.0 / (2.0 * 9.869604401089358)},
                        {"c0_is_K", false},     {"conv_n_max", 10000}, {"conv_k_max", 6},
                        {"certificate", true}};
  t["kronecker"] = {{"N", "auto"},          {"L", 1024},           {"bins", 160},
                    {"t_max", 100.0},       {"panel_width", 1.0},  {"tail_tol", 1e-6},
                    {"center", 1.0},        {"half_width", 0.8},   {"flatness", 0.5},
                    {"grid_points", 801},   {"ks_tol", 0.05},      {"min_density", -1e-8},
                    {"direct_tol", 1e-4}};
  t["report"] = Json::object();
  return t;
}

// Fills defaults and checks each supplied value against the default's type.
Json resolve_task(std::string_view command, const Json& given) {
  const Json& defs = task_defaults(command);
  Json out = defs;
  if (given.is_null()) return out;
  if (!given.is_object()) fail("task", "expected a mapping");
  for (const auto& [k, v] : given.items()) {
    const std::string path = "task." + k;
    if (k == "command") continue;
    if (!defs.contains(k)) fail(path, "unknown key for command " + std::string(command));
    const Json& d = defs.at(k);
    if (k == "N") {
      if (!(v.is_string() && v.get<std::string>() == "auto")) out[k] = to_string(as_bigint(v, path));
    } else if (d.is_boolean()) {
      out[k] = as_bool(v, path);
    } else if (d.is_number_integer()) {
      out[k] = as_integer(v, path);
    } else if (d.is_number()) {
      out[k] = as_number(v, path);
    } else if (d.is_string()) {
      out[k] = as_string(v, path);
    } else if (d.is_array()) {
      if (!v.is_array() || v.empty()) fail(path, "expected a non-empty list of numbers");
      Json a = Json::array();
      for (std::size_t i = 0; i < v.size(); ++i) a.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
      if (d.size() == 2 && k != "t") as_interval(a, path);
      out[k] = a;
    }
  }
  return out;
}

ModelSection parse_model(const Json& m, Json& resolved) {
  const std::string path = "model";
  if (m.is_null()) fail(path, "missing");
  ModelSection s;
  s.family = as_string(require(m, path, "family"), "model.family");
  std::set<std::string> allowed{"family", "j_max", "random_offsets", "seed", "p", "phi_window"};
  Json r;
  r["family"] = s.family;
  if (s.family == "free") {
    s.p = 1.0;
  } else if (s.family == "exponential") {
    allowed.insert("beta");
    const double beta = as_number(require(m, path, "beta"), "model.beta");
    s.spec.family = model::Exponential{beta};
    r["beta"] = beta;
  } else if (s.family == "log_squared") {
    allowed.insert({"c", "delta"});
    const double c = as_number(require(m, path, "c"), "model.c");
    const double d = as_number(require(m, path, "delta"), "model.delta");
    s.spec.family = model::LogSquared{c, d};
    r["c"] = c;
    r["delta"] = d;
  } else if (s.family == "factorial") {
    allowed.insert({"epsilon", "delta"});
    const double e = as_number(require(m, path, "epsilon"), "model.epsilon");
    const double d = as_number(require(m, path, "delta"), "model.delta");
    s.spec.family = model::Factorial{e, d};
    r["epsilon"] = e;
    r["delta"] = d;
  } else if (s.family == "explicit") {
    allowed.insert("increments");
    const Json& inc = require(m, path, "increments");
    if (!inc.is_array() || inc.empty()) fail("model.increments", "expected a non-empty list");
    model::Explicit e;
    Json ri = Json::array();
    for (std::size_t i = 0; i < inc.size(); ++i) {
      const std::string ip = "model.increments[" + std::to_string(i) + "]";
      auto b = as_bigint(inc[i], ip);
      if (b <= 0) fail(ip, "increments must be positive");
      ri.push_back(to_string(b));
      e.increments.push_back(std::move(b));
    }
    s.spec.family = std::move(e);
    r["increments"] = ri;
  } else {
    fail("model.family", "'" + s.family + "' is not one of free, exponential, log_squared, factorial, explicit");
  }
  reject_unknown(m, path, allowed);

  if (s.family != "free") {
    s.p = as_number(require(m, path, "p"), "model.p");
    if (!(s.p > 0.0 && s.p <= 1.0)) fail("model.p", "must lie in (0, 1]");
    if (m.contains("j_max")) {
      const auto j = as_integer(m.at("j_max"), "model.j_max");
      if (j < 1 || j > 100000) fail("model.j_max", "must be in [1, 100000]");
      s.spec.j_max = static_cast<int>(j);
    } else if (const auto* e = std::get_if<model::Explicit>(&s.spec.family)) {
      s.spec.j_max = static_cast<int>(e->increments.size());
    } else {
      fail("model.j_max", "missing");
    }
    if (m.contains("random_offsets")) s.spec.random_offsets = as_bool(m.at("random_offsets"), "model.random_offsets");
    if (m.contains("seed")) s.spec.seed = static_cast<std::uint64_t>(as_bigint(m.at("seed"), "model.seed").get_ui());
    r["j_max"] = s.spec.j_max;
    r["random_offsets"] = s.spec.random_offsets;
    r["seed"] = std::to_string(s.spec.seed);
  }
  r["p"] = s.p;
  if (m.contains("phi_window")) {
    const auto [lo, hi] = as_interval(m.at("phi_window"), "model.phi_window");
    if (lo <= 0.0 || hi >= 3.141592653589793) fail("model.phi_window", "must lie inside (0, pi)");
    s.phi_window = {lo, hi};
  }
  r["phi_window"] = {s.phi_window.lo, s.phi_window.hi};
  resolved = r;
  return s;
}

NumericsSection parse_numerics(const Json& n, Json& resolved) {
  reject_unknown(n, "numerics", {"quadrature", "order", "abs_tol", "rel_tol", "filon_threshold", "precision", "threads"});
  NumericsSection s;
  auto get = [&](const char* key) -> const Json* {
    return n.is_object() && n.contains(key) ? &n.at(key) : nullptr;
  };
  std::string quad = "gauss_legendre";
  if (auto* v = get("quadrature")) quad = as_string(*v, "numerics.quadrature");
  if (quad == "gauss_legendre") s.integration.kind = quad::Kind::GaussLegendre;
  else if (quad == "clenshaw_curtis") s.integration.kind = quad::Kind::ClenshawCurtis;
  else fail("numerics.quadrature", "expected gauss_legendre or clenshaw_curtis");
  if (auto* v = get("order")) {
    const auto o = as_integer(*v, "numerics.order");
    if (o < 2 || o > 128) fail("numerics.order", "must be in [2, 128]");
    s.integration.order = static_cast<int>(o);
  }
  if (auto* v = get("abs_tol")) s.integration.abs_tol = as_number(*v, "numerics.abs_tol");
  if (auto* v = get("rel_tol")) s.integration.rel_tol = as_number(*v, "numerics.rel_tol");
  if (auto* v = get("filon_threshold")) s.integration.filon_threshold = as_number(*v, "numerics.filon_threshold");
  if (!(s.integration.abs_tol > 0.0) || !(s.integration.rel_tol > 0.0)) fail("numerics", "tolerances must be positive");
  if (auto* v = get("precision")) s.precision = as_string(*v, "numerics.precision");
  if (const char* env = std::getenv("SPARSE_JACOBI_PRECISION"); env && *env) s.precision = env;
  if (s.precision != "double" && s.precision != "extended")
    fail("numerics.precision", "'" + s.precision + "' is not double or extended");
  if (auto* v = get("threads")) {
    const auto t = as_integer(*v, "numerics.threads");
    if (t < 0 || t > 1024) fail("numerics.threads", "must be in [0, 1024]");
    s.threads = static_cast<unsigned>(t);
  }
  if (const char* env = std::getenv("SPARSE_JACOBI_THREADS"); env && *env) {
    char* end = nullptr;
    const long t = std::strtol(env, &end, 10);
    if (*end != '\0' || t < 0 || t > 1024) throw ConfigError("SPARSE_JACOBI_THREADS: expected an integer in [0, 1024]");
    s.threads = static_cast<unsigned>(t);
  }
  resolved = {{"quadrature", quad},
              {"order", s.integration.order},
              {"abs_tol", s.integration.abs_tol},
              {"rel_tol", s.integration.rel_tol},
              {"filon_threshold", s.integration.filon_threshold},
              {"precision", s.precision},
              {"threads", s.threads}};
  return s;
}

OutputSection parse_output(const Json& o, Json& resolved) {
  reject_unknown(o, "output", {"dir", "formats"});
  OutputSection s;
  if (o.is_object() && o.contains("dir")) s.dir = as_string(o.at("dir"), "output.dir");
  if (s.dir.empty()) fail("output.dir", "must not be empty");
  if (o.is_object() && o.contains("formats")) {
    const Json& f = o.at("formats");
    if (!f.is_array()) fail("output.formats", "expected a list");
    s.csv = s.json = false;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto name = as_string(f[i], "output.formats[" + std::to_string(i) + "]");
      if (name == "csv") s.csv = true;
      else if (name == "json") s.json = true;
      else fail("output.formats[" + std::to_string(i) + "]", "expected csv or json");
    }
  }
  Json formats = Json::array();
  if (s.csv) formats.push_back("csv");
  if (s.json) formats.push_back("json");
  resolved = {{"dir", s.dir}, {"formats", formats}};
  return s;
}

void apply_override(YAML::Node& root, const Override& o) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : o.path) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  for (const auto& p : parts)
    if (p.empty()) throw ConfigError("override '" + o.path + "': empty key component");
  YAML::Node node;
  try {
    node = YAML::Load(o.value);
  } catch (const YAML::Exception& e) {
    throw ConfigError("override '" + o.path + "': " + e.what());
  }
  YAML::Node at = root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node next = at[parts[i]];
    if (!next.IsDefined() || next.IsNull()) {
      at[parts[i]] = YAML::Node(YAML::NodeType::Map);
      next = at[parts[i]];
    }
    if (!next.IsMap()) throw ConfigError("override '" + o.path + "': '" + parts[i] + "' is not a mapping");
    at.reset(next);
  }
  at[parts.back()] = node;
}

}  // namespace

bool is_command(std::string_view name) {
  return std::find(std::begin(kCommands), std::end(kCommands), name) != std::end(kCommands);
}

const Json& task_defaults(std::string_view command) {
  static const Json table = defaults_table();
  const std::string key(command);
  if (!table.contains(key)) throw ConfigError("unknown command '" + key + "'");
  return table.at(key);
}

model::SparseModel ModelSection::build() const {
  if (family == "free") return model::SparseModel::free_model();
  return model::SparseModel(spec, p);
}

std::string RunConfig::hash() const {
  Json h = resolved;
  h["numerics"].erase("threads");
  return sha256_hex(h.dump());
}

Override parse_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) throw ConfigError("override '" + std::string(text) + "': expected key.path=value");
  return {std::string(text.substr(0, eq)), std::string(text.substr(eq + 1))};
}

RunConfig load_config(std::string_view command, const std::string& yaml_text,
                      const std::vector<Override>& overrides) {
  if (!is_command(command) || command == "report") throw ConfigError("unknown command '" + std::string(command) + "'");
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");
  for (const auto& o : overrides) apply_override(root, o);
  const Json doc = to_json(root, "");
  reject_unknown(doc, "", {"model", "task", "numerics", "output"});

  RunConfig cfg;
  cfg.command = std::string(command);
  const Json none;
  auto section = [&](const char* k) -> const Json& { return doc.contains(k) ? doc.at(k) : none; };
  const Json& task = section("task");
  if (task.is_object() && task.contains("command") && as_string(task.at("command"), "task.command") != command)
    fail("task.command", "config is for '" + task.at("command").get<std::string>() + "', not '" + cfg.command + "'");

  Json rm, rn, ro;
  cfg.model = parse_model(section("model"), rm);
  cfg.task = resolve_task(command, task);
  cfg.numerics = parse_numerics(section("numerics"), rn);
  cfg.output = parse_output(section("output"), ro);
  // building the model validates family parameters before any computation
  (void)cfg.model.build();

  cfg.resolved = {{"model", rm}, {"task", Json{{"command", cfg.command}}}, {"numerics", rn}, {"output", ro}};
  for (const auto& [k, v] : cfg.task.items()) cfg.resolved["task"][k] = v;
  return cfg;
}

RunConfig load_config_file(std::string_view command, const std::string& path,
                           const std::vector<Override>& overrides) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config file '" + path + "' cannot be read");
  std::stringstream ss;
  ss << is.rdbuf();
  return load_config(command, ss.str(), overrides);
}

BigInt resolve_N(const Json& value, const model::SparseModel& model, const char* key) {
  if (value.is_string() && value.get<std::string>() == "auto")
    return model.barrier_count() == 0 ? BigInt(0) : model.truncation(model.barrier_count());
  return as_bigint(value, std::string("task.") + key);
}

}  // namespace sparse_jacobi::io
