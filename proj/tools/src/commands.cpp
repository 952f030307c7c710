#include "sparse_jacobi/io/commands.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <numbers>
#include <ostream>

#include "sparse_jacobi/corput.hpp"
#include "sparse_jacobi/errors.hpp"
#include "sparse_jacobi/fourier_decay.hpp"
#include "sparse_jacobi/gevrey_calculus.hpp"
#include "sparse_jacobi/kronecker_sum.hpp"
#include "sparse_jacobi/parallel.hpp"
#include "sparse_jacobi/spectral_measure.hpp"

namespace sparse_jacobi::io {
namespace {

constexpr const char* kAsymptotic = "asymptotic - not desk-reproducible";

std::string num(double v) { return format_double(v); }
std::string num(long long v) { return std::to_string(v); }

std::vector<double> geometric(double lo, double hi, int n) {
  if (n < 2) throw ConfigError("task: a t grid needs at least 2 points");
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, i / (n - 1.0)));
  return g;
}

std::vector<double> uniform(double lo, double hi, int n) {
  if (n < 2) throw ConfigError("task: a grid needs at least 2 points");
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / (n - 1.0));
  return g;
}

std::pair<double, double> interval(const Json& v) { return {v[0].get<double>(), v[1].get<double>()}; }

int integer(const Json& task, const char* key, int lo, int hi) {
  const auto v = task.at(key).get<long long>();
  if (v < lo || v > hi)
    throw ConfigError("config key 'task." + std::string(key) + "': must be in [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  return static_cast<int>(v);
}

Check at_most(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value <= threshold, value, threshold, std::move(detail)};
}

Outcome cmd_model(const RunConfig& cfg) {
  const auto m = cfg.model.build();
  Outcome o;
  CsvTable t({"j", "increment", "position", "offset"});
  std::vector<long> offsets(static_cast<std::size_t>(m.barrier_count()), 0);
  if (cfg.model.family != "free") offsets = model::build_offsets(cfg.model.spec);
  bool gaps_ok = true;
  for (int j = 0; j < m.barrier_count(); ++j) {
    const auto uj = static_cast<std::size_t>(j);
    t.add_row({num(static_cast<long long>(j + 1)), to_string(m.gaps()[uj]), to_string(m.positions()[uj]),
               num(static_cast<long long>(offsets[uj]))});
    if (m.gaps()[uj] < 2) gaps_ok = false;
  }
  o.tables.emplace("model", std::move(t));
  const double lambda = cfg.task.at("lambda").get<double>();
  o.summary["barriers"] = m.barrier_count();
  o.summary["p"] = m.p();
  o.summary["theta_p"] = model::theta_p(m.p());
  o.summary["lambda"] = lambda;
  o.summary["r"] = model::r_factor(m.p(), lambda);
  if (const auto* e = std::get_if<model::Exponential>(&cfg.model.spec.family); e && cfg.model.family == "exponential")
    o.summary["hausdorff_dim"] = model::hausdorff_dim(m.p(), e->beta, lambda);
  if (m.barrier_count() > 0) o.summary["last_position"] = to_string(m.positions().back());
  o.checks.push_back({"gaps_at_least_2", gaps_ok, gaps_ok ? 1.0 : 0.0, 1.0, {}});
  return o;
}

Outcome cmd_density(const RunConfig& cfg) {
  const auto m = cfg.model.build();
  const auto N = resolve_N(cfg.task.at("N"), m, "N");
  const auto [lo, hi] = interval(cfg.task.at("lambda_range"));
  if (lo <= -2.0 || hi >= 2.0) throw DomainError("task.lambda_range must lie inside (-2, 2)");
  const auto grid = uniform(lo, hi, integer(cfg.task, "points", 2, 1 << 20));
  const auto d = spectral::density_table(N, m, grid, cfg.numerics.integration);
  Outcome o;
  const bool free = m.is_free();
  CsvTable t(free ? std::vector<std::string>{"lambda", "density", "semicircle"}
                  : std::vector<std::string>{"lambda", "density"});
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (free) {
      const double sc = std::sqrt(4.0 - grid[i] * grid[i]) / (2.0 * std::numbers::pi);
      worst = std::max(worst, std::fabs(d.values[i] - sc));
      t.add_row({num(grid[i]), num(d.values[i]), num(sc)});
    } else {
      t.add_row({num(grid[i]), num(d.values[i])});
    }
  }
  o.tables.emplace("density", std::move(t));
  o.summary["N"] = to_string(N);
  o.summary["mass"] = d.mass;
  o.summary["mass_error"] = d.mass_error;
  o.checks.push_back(at_most("mass", std::fabs(d.mass - 1.0), cfg.task.at("mass_tol").get<double>(), "|mass - 1|"));
  if (free) {
    o.summary["semicircle_max_error"] = worst;
    o.checks.push_back(at_most("semicircle", worst, cfg.task.at("free_tol").get<double>(), "max |density - semicircle|"));
  }
  return o;
}

decay::ResonanceOptions resonance_options(const Json& task) {
  decay::ResonanceOptions r;
  const auto [lo, hi] = interval(task.at("phi_window"));
  r.window = {lo, hi};
  r.scan_points = integer(task, "scan_points", 2, 1 << 20);
  r.c = task.at("c").get<double>();
  return r;
}

Json fit_json(const decay::DecayFit& f) {
  return {{"exponent", f.exponent}, {"half_width", f.half_width}, {"intercept", f.intercept},
          {"residual", f.residual}, {"used", f.used}};
}

Outcome cmd_decay_scan(const RunConfig& cfg) {
  const auto m = cfg.model.build();
  const auto N = resolve_N(cfg.task.at("N"), m, "N");
  const auto& task = cfg.task;
  const spectral::TestFunction f(task.at("center").get<double>(), task.at("half_width").get<double>(),
                                 task.at("flatness").get<double>(), task.at("mirrored").get<bool>());
  const auto [lo, hi] = interval(task.at("t_range"));
  const auto grid = geometric(lo, hi, integer(task, "t_points", 2, 100000));
  decay::DecayScanOptions opt;
  opt.resonance = resonance_options(task);
  opt.resonance_marks = task.at("resonance_marks").get<bool>();
  opt.integration = cfg.numerics.integration;
  const auto s = decay::decay_scan(f, N, m, grid, opt);

  Outcome o;
  CsvTable t({"t", "abs_gamma", "re_gamma", "im_gamma", "j_star", "n_star", "L", "L_bound", "critical_points"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& r = s.resonance_marks[i];
    t.add_row({num(grid[i]), num(s.gamma_abs[i]), num(s.gamma[i].real()), num(s.gamma[i].imag()),
               r ? num(static_cast<long long>(r->j_star)) : "", r ? num(static_cast<long long>(r->n_star)) : "",
               r ? num(r->L) : "", r ? num(r->L_bound) : "",
               r ? num(static_cast<long long>(r->critical_phis.size())) : ""});
  }
  o.tables.emplace("decay_scan", std::move(t));
  o.summary["N"] = to_string(N);
  o.summary["gamma0"] = s.gamma0;
  o.summary["E"] = s.E;
  if (s.fit) o.summary["fit"] = fit_json(*s.fit);
  if (s.fit_omega) o.summary["fit_omega"] = fit_json(*s.fit_omega);
  o.summary["theorem_regime"] = kAsymptotic;
  return o;
}

Outcome cmd_resonance(const RunConfig& cfg) {
  const auto m = cfg.model.build();
  const auto opt = resonance_options(cfg.task);
  Outcome o;
  CsvTable brackets({"t", "j_star", "n_star", "last_barrier", "distinct_l", "roots", "L", "omega_unit",
                     "theta_prime_min", "theta_prime_max"});
  CsvTable roots({"t", "l", "phi"});
  for (const auto& tv : cfg.task.at("t")) {
    const double t = tv.get<double>();
    const auto r = decay::resonance_info(t, m, opt);
    if (!r) {
      brackets.add_row({num(t), "0", "", "", "0", "0", "", "", "", ""});
      continue;
    }
    brackets.add_row({num(t), num(static_cast<long long>(r->j_star)), num(static_cast<long long>(r->n_star)),
                      r->last_barrier ? "true" : "false", num(static_cast<long long>(r->distinct_l)),
                      num(static_cast<long long>(r->critical_phis.size())), num(r->L), num(r->omega_unit),
                      num(r->theta_prime_min), num(r->theta_prime_max)});
    for (const auto& c : r->critical_phis) roots.add_row({num(t), num(static_cast<long long>(c.l)), num(c.phi)});
    o.checks.push_back(at_most("distinct_l<=n_star@t=" + num(t), r->distinct_l, r->n_star));
  }
  o.tables.emplace("resonance", std::move(brackets));
  o.tables.emplace("critical_points", std::move(roots));
  return o;
}

Outcome cmd_corput(const RunConfig& cfg) {
  const auto& task = cfg.task;
  decay::CorputScanOptions opt;
  const auto [a, b] = interval(task.at("window"));
  opt.window = {a, b};
  std::tie(opt.t_min, opt.t_max) = interval(task.at("t_range"));
  opt.t_points = integer(task, "t_points", 2, 10000);
  opt.tau_span = task.at("tau_span").get<double>();
  opt.tau_points = integer(task, "tau_points", 2, 100000);
  opt.kappa_ratio = task.at("kappa_ratio").get<double>();
  const auto s = decay::corput_scan(opt);
  Outcome o;
  CsvTable t({"t", "tau", "kappa", "re_Lambda", "im_Lambda", "abs_Lambda", "regime", "bound"});
  for (const auto& c : s.samples)
    t.add_row({num(c.t), num(c.tau), num(c.kappa), num(c.Lambda.real()), num(c.Lambda.imag()), num(std::abs(c.Lambda)),
               c.large_tau ? "large" : "small", num(c.large_tau ? s.K_prime / std::fabs(c.tau) : c.bound_small_tau)});
  o.tables.emplace("corput", std::move(t));
  o.summary = {{"K_prime", s.K_prime},         {"K_prime_observed", s.K_prime_observed},
               {"K_observed", s.K_observed},   {"worst_small_ratio", s.worst_small_ratio},
               {"worst_small_ratio_inf", s.worst_small_ratio_inf}, {"worst_large_ratio", s.worst_large_ratio},
               {"small_cells", s.small_cells}, {"large_cells", s.large_cells}};
  o.checks.push_back(at_most("small_tau_violations", s.small_violations, 0.0, std::to_string(s.small_cells) + " cells"));
  o.checks.push_back(at_most("large_tau_violations", s.large_violations, 0.0, std::to_string(s.large_cells) + " cells"));
  return o;
}

decay::SyntheticMeasure synthetic(const Json& task) {
  const auto kind = task.at("measure").get<std::string>();
  const auto [a, b] = interval(task.at("window"));
  const decay::Window w{a, b};
  if (kind == "smooth") return decay::SyntheticMeasure::smooth(task.at("center").get<double>(), task.at("sigma").get<double>(), w);
  if (kind == "semicircle") return decay::SyntheticMeasure::semicircle(w);
  if (kind == "power_singular")
    return decay::SyntheticMeasure::power_singular(task.at("center").get<double>(), task.at("epsilon").get<double>(), w);
  throw ConfigError("config key 'task.measure': '" + kind + "' is not smooth, semicircle or power_singular");
}

Outcome cmd_lemma_main(const RunConfig& cfg) {
  const auto& task = cfg.task;
  const auto G = synthetic(task);
  const auto [lo, hi] = interval(task.at("t_range"));
  decay::LemmaOptions lo_opt;
  lo_opt.kappa_ratio = task.at("kappa_ratio").get<double>();
  const auto tab = decay::lemma_main_bound(G, geometric(lo, hi, integer(task, "t_points", 2, 100000)), lo_opt);
  Outcome o;
  CsvTable t({"t", "kappa", "abs_gamma", "ratio", "ratio_eps", "piece_small", "piece_large", "within_split"});
  for (const auto& r : tab.rows)
    t.add_row({num(r.t), num(r.kappa), num(std::abs(r.gamma)), num(r.ratio), num(r.ratio_eps), num(r.piece_small),
               num(r.piece_large), r.within_split ? "true" : "false"});
  o.tables.emplace("lemma_main", std::move(t));
  const bool eps = G.epsilon() > 0.0;
  o.summary = {{"epsilon", tab.epsilon}, {"C", tab.C},   {"K", tab.K}, {"K_prime", tab.K_prime},
               {"sup_ratio", tab.sup_ratio}, {"sup_ratio_eps", tab.sup_ratio_eps},
               {"trend_slope", tab.trend_slope}, {"trend_slope_eps", tab.trend_slope_eps}};
  o.checks.push_back(at_most(eps ? "trend_slope_eps" : "trend_slope", eps ? tab.trend_slope_eps : tab.trend_slope,
                             task.at("max_slope").get<double>()));
  const double sup = eps ? tab.sup_ratio_eps : tab.sup_ratio;
  o.checks.push_back({"sup_ratio_finite", std::isfinite(sup), sup, 0.0, {}});
  o.checks.push_back({"within_split", tab.all_within_split, tab.all_within_split ? 1.0 : 0.0, 1.0, {}});

  const int spots = integer(task, "plancherel_points", 0, 1000);
  if (spots > 0) {
    const auto [plo, phi] = interval(task.at("plancherel_t_range"));
    decay::PlancherelOptions po;
    po.kappa_ratio = lo_opt.kappa_ratio;
    const auto pc = decay::plancherel_check(G, spots == 1 ? std::vector<double>{plo} : geometric(plo, phi, spots), po);
    CsvTable p({"t", "re_direct", "im_direct", "re_plancherel", "im_plancherel", "T_max", "tail_bound", "rel_error"});
    double worst = 0.0;
    for (const auto& c : pc) {
      worst = std::max(worst, c.rel_error);
      p.add_row({num(c.t), num(c.direct.real()), num(c.direct.imag()), num(c.plancherel.real()),
                 num(c.plancherel.imag()), num(c.T_max), num(c.tail_bound), num(c.rel_error)});
    }
    o.tables.emplace("plancherel", std::move(p));
    o.checks.push_back(at_most("plancherel_rel_error", worst, task.at("plancherel_tol").get<double>(),
                               std::to_string(spots) + " spots"));
  }
  return o;
}

Outcome cmd_gevrey(const RunConfig& cfg) {
  const auto& task = cfg.task;
  const double K = task.at("K").get<double>();
  Outcome o;
  const auto conv = gevrey::check_convolution_lemma(K, task.at("c0_is_K").get<bool>(),
                                                    task.at("conv_n_max").get<long>(), integer(task, "conv_k_max", 2, 64));
  std::string detail = "worst margin at k=" + std::to_string(conv.worst_k) + ", n=" + std::to_string(conv.worst_n);
  if (conv.witness)
    detail = "fails at k=" + std::to_string(conv.witness->first) + ", n=" + std::to_string(conv.witness->second);
  o.checks.push_back({"convolution_lemma", conv.pass, conv.worst_margin, 0.0, detail});
  o.summary["convolution"] = {{"K", K}, {"pass", conv.pass}, {"worst_margin", conv.worst_margin},
                              {"sup_double_ratio", conv.sup_double_ratio},
                              {"stated_double_bound", conv.stated_double_bound}};

  if (task.at("certificate").get<bool>()) {
    const auto m = cfg.model.build();
    const auto grid = uniform(cfg.model.phi_window.lo, cfg.model.phi_window.hi, integer(task, "phi_points", 2, 100000));
    gevrey::CertifyOptions co;
    co.delta = task.at("delta").get<double>();
    co.K = K;
    co.extended = cfg.numerics.precision == "extended";
    const auto c = gevrey::certify_gevrey(grid, m, integer(task, "m_max", 1, 64), integer(task, "n_max", 1, 64), co);
    CsvTable t({"kind", "m", "n", "value", "bound", "margin", "pass", "inequality"});
    Json cells = Json::array();
    std::string first_fail;
    auto add = [&](const char* kind, const std::vector<gevrey::CertificateCell>& v, bool counted) {
      for (const auto& x : v) {
        t.add_row({kind, num(static_cast<long long>(x.m)), num(static_cast<long long>(x.n)), num(x.value), num(x.bound),
                   num(x.margin), x.pass ? "true" : "false", x.inequality});
        if (!counted) continue;
        cells.push_back({{"kind", kind}, {"m", x.m}, {"n", x.n}, {"margin", x.margin}, {"pass", x.pass}});
        if (!x.pass && first_fail.empty())
          first_fail = std::string(kind) + " m=" + std::to_string(x.m) + " n=" + std::to_string(x.n) + " (" + x.inequality + ")";
      }
    };
    add("smallness", c.smallness, false);
    add("theta", c.cells, true);
    // exp cells are reported in the table only; the pass criterion is the theta cells
    add("exp", c.exp_cells, false);
    int exp_failed = 0;
    for (const auto& x : c.exp_cells) exp_failed += x.pass ? 0 : 1;
    o.tables.emplace("certificate", std::move(t));
    o.summary["certificate"] = {{"complete", c.complete}, {"stop_reason", c.stop_reason}, {"Delta", c.Delta},
                                {"eta", c.eta}, {"xi", c.xi}, {"c1", c.c1}, {"zeta", c.zeta}, {"D", c.D},
                                {"small_delta_n2", c.small_delta_n2}, {"exp_cells", c.exp_cells.size()},
                                {"exp_cells_failed", exp_failed}, {"cells", cells}};
    int failed = 0;
    for (const auto& x : cells) failed += x.at("pass").get<bool>() ? 0 : 1;
    o.checks.push_back({"certificate_cells", failed == 0 && c.complete, static_cast<double>(failed), 0.0,
                        c.complete ? (first_fail.empty() ? std::to_string(cells.size()) + " cells" : "first failing cell " + first_fail)
                                   : "incomplete: " + c.stop_reason});
  }
  return o;
}

Outcome cmd_kronecker(const RunConfig& cfg) {
  const auto m = cfg.model.build();
  const auto& task = cfg.task;
  const auto N = resolve_N(task.at("N"), m, "N");
  const spectral::TestFunction f(task.at("center").get<double>(), task.at("half_width").get<double>(),
                                 task.at("flatness").get<double>(), true);
  kron::TransformOptions opt;
  opt.t_max = task.at("t_max").get<double>();
  opt.panel_width = task.at("panel_width").get<double>();
  opt.tail_tol = task.at("tail_tol").get<double>();
  opt.integration = cfg.numerics.integration;
  const int L = integer(task, "L", 1, kron::kMaxTruncation);
  const auto grid = uniform(-3.99, 3.99, integer(task, "grid_points", 2, 1 << 20));
  const auto d = kron::convolution_density(f, N, m, grid, opt);

  Outcome o;
  const bool free = m.is_free();
  std::vector<double> direct;
  if (free) direct = kron::direct_self_convolution(f, N, m, grid).values;
  CsvTable t(free ? std::vector<std::string>{"lambda", "density", "direct"} : std::vector<std::string>{"lambda", "density"});
  double lowest = 0.0, linf = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    lowest = std::min(lowest, d.values[i]);
    if (free) {
      linf = std::max(linf, std::fabs(d.values[i] - direct[i]));
      t.add_row({num(grid[i]), num(d.values[i]), num(direct[i])});
    } else {
      t.add_row({num(grid[i]), num(d.values[i])});
    }
  }
  o.tables.emplace("convolution_density", std::move(t));

  const auto spec = kron::truncated_spectrum(L, m);
  CsvTable s({"eigenvalue", "weight"});
  for (std::size_t i = 0; i < spec.values.size(); ++i) s.add_row({num(spec.values[i]), num(spec.weights[i])});
  o.tables.emplace("spectrum", std::move(s));

  const auto h = kron::histogram_vs_convolution(L, m, f, N, integer(task, "bins", 2, 1 << 20), opt);
  CsvTable hb({"lo", "hi", "mass"});
  for (std::size_t i = 0; i < h.histogram.size(); ++i)
    hb.add_row({num(h.bin_edges[i]), num(h.bin_edges[i + 1]), num(h.histogram[i])});
  o.tables.emplace("histogram", std::move(hb));

  o.summary = {{"N", to_string(N)},          {"L", L},
               {"gamma0", d.gamma0},         {"mass", d.mass},
               {"l2_indicator", d.l2_indicator}, {"tail_fraction", d.tail_fraction},
               {"ks", h.ks},                 {"pairs", h.pairs},
               {"discrete_mass", h.discrete_mass}, {"continuous_mass", h.continuous_mass},
               {"theorem_regime", kAsymptotic}};
  o.checks.push_back(at_most("ks_distance", h.ks, task.at("ks_tol").get<double>(), "L=" + std::to_string(L)));
  o.checks.push_back({"positivity", lowest >= task.at("min_density").get<double>(), lowest,
                      task.at("min_density").get<double>(), "min density"});
  if (free) {
    o.summary["direct_linf"] = linf;
    o.checks.push_back(at_most("direct_convolution", linf, task.at("direct_tol").get<double>(), "L-infinity"));
  }
  return o;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string to_yaml(const Json& j) {
  YAML::Emitter e;
  std::function<void(const Json&)> emit = [&](const Json& v) {
    if (v.is_object()) {
      e << YAML::BeginMap;
      for (const auto& [k, x] : v.items()) {
        e << YAML::Key << k << YAML::Value;
        emit(x);
      }
      e << YAML::EndMap;
    } else if (v.is_array()) {
      e << YAML::Flow << YAML::BeginSeq;
      for (const auto& x : v) emit(x);
      e << YAML::EndSeq;
    } else if (v.is_string()) {
      e << YAML::DoubleQuoted << v.get<std::string>();
    } else if (v.is_boolean()) {
      e << v.get<bool>();
    } else if (v.is_number_integer()) {
      e << v.get<long long>();
    } else if (v.is_number()) {
      e << format_double(v.get<double>());
    } else {
      e << YAML::Null;
    }
  };
  emit(j);
  return std::string(e.c_str()) + "\n";
}

// rebuilt from the CSV text so both formats carry identical strings
Json table_json(const std::string& csv) {
  Json rows = Json::array();
  std::vector<std::string> header;
  std::size_t pos = 0;
  bool first = true;
  while (pos < csv.size()) {
    auto end = csv.find("\r\n", pos);
    std::string line = csv.substr(pos, end - pos);
    pos = end + 2;
    if (line.rfind("# ", 0) == 0) continue;
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur.push_back(c);
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    fields.push_back(cur);
    if (first) {
      header = fields;
      first = false;
      continue;
    }
    Json row = Json::object();
    for (std::size_t i = 0; i < header.size() && i < fields.size(); ++i) row[header[i]] = fields[i];
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

bool Outcome::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Outcome execute(const RunConfig& cfg) {
  set_thread_count(cfg.numerics.threads);
  const auto& c = cfg.command;
  if (c == "model") return cmd_model(cfg);
  if (c == "density") return cmd_density(cfg);
  if (c == "decay-scan") return cmd_decay_scan(cfg);
  if (c == "resonance") return cmd_resonance(cfg);
  if (c == "corput") return cmd_corput(cfg);
  if (c == "lemma-main") return cmd_lemma_main(cfg);
  if (c == "gevrey-verify") return cmd_gevrey(cfg);
  if (c == "kronecker") return cmd_kronecker(cfg);
  throw ConfigError("command '" + c + "' has no computation");
}

std::vector<std::string> expected_tables(std::string_view command) {
  if (command == "model") return {"model"};
  if (command == "density") return {"density"};
  if (command == "decay-scan") return {"decay_scan"};
  if (command == "resonance") return {"resonance", "critical_points"};
  if (command == "corput") return {"corput"};
  if (command == "lemma-main") return {"lemma_main"};
  if (command == "gevrey-verify") return {"certificate"};
  if (command == "kronecker") return {"convolution_density", "spectrum", "histogram"};
  return {};
}

std::filesystem::path run_directory(const RunConfig& cfg) {
  return std::filesystem::path(cfg.output.dir) / cfg.hash().substr(0, 16);
}

std::filesystem::path persist(const RunConfig& cfg, const Outcome& out) {
  const auto dir = run_directory(cfg);
  std::filesystem::create_directories(dir);
  const std::string hash = cfg.hash();
  const std::vector<std::string> comments{"sparse_jacobi " + cfg.command + " config_sha256=" + hash,
                                          "config " + cfg.resolved.dump()};
  Json artifacts = Json::array();
  for (const auto& [stem, table] : out.tables) {
    const std::string csv = table.str(comments);
    if (cfg.output.csv) {
      write_atomic(dir / (stem + ".csv"), csv);
      artifacts.push_back(stem + ".csv");
    }
    if (cfg.output.json) {
      write_atomic(dir / (stem + ".json"), table_json(csv).dump(1) + "\n");
      artifacts.push_back(stem + ".json");
    }
  }
  write_atomic(dir / "config.yaml", to_yaml(cfg.resolved));
  Json checks = Json::array();
  for (const auto& c : out.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"threshold", c.threshold}, {"detail", c.detail}});
  Json manifest = {{"tool", "sparse_jacobi"},
                   {"command", cfg.command},
                   {"config_sha256", hash},
                   {"created", utc_now()},
                   {"config", cfg.resolved},
                   {"passed", out.passed()},
                   {"checks", checks},
                   {"summary", out.summary},
                   {"artifacts", artifacts}};
  write_atomic(dir / "manifest.json", manifest.dump(1) + "\n");
  return dir;
}

int run(std::string_view command, const std::string& config_path, const std::vector<Override>& overrides,
        std::ostream& out, std::ostream& err) {
  try {
    const auto cfg = load_config_file(command, config_path, overrides);
    const auto result = execute(cfg);
    const auto dir = persist(cfg, result);
    out << "run " << dir.string() << "\n";
    for (const auto& c : result.checks)
      out << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << format_double(c.value)
          << " threshold=" << format_double(c.threshold) << (c.detail.empty() ? "" : " " + c.detail) << "\n";
    return result.passed() ? kOk : kTolerance;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ToleranceError& e) {
    err << "tolerance error: " << e.what() << " (achieved " << format_double(e.achieved()) << ")\n";
    return kTolerance;
  } catch (const PrecisionError& e) {
    err << "precision error: " << e.what() << "\n";
    return kTolerance;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfig;
  }
}

}  // namespace sparse_jacobi::io
