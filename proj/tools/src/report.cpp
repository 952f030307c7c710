#include <fstream>
#include <ostream>
#include <sstream>

#include "sparse_jacobi/errors.hpp"
#include "sparse_jacobi/io/commands.hpp"

namespace sparse_jacobi::io {
namespace {

Json read_json(const std::filesystem::path& p) {
  std::ifstream is(p);
  if (!is) throw ConfigError("cannot read " + p.string());
  try {
    return Json::parse(is);
  } catch (const Json::exception& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

std::string expected_list(std::string_view command) {
  std::string s = "manifest.json, config.yaml";
  for (const auto& t : expected_tables(command)) s += ", " + t + ".csv or " + t + ".json";
  return s;
}

std::string fmt(const Json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

ReportSummary report(const std::filesystem::path& run_dir) {
  if (!std::filesystem::is_directory(run_dir)) throw ConfigError("report: " + run_dir.string() + " is not a directory");
  const auto manifest_path = run_dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) {
    std::string per;
    for (auto c : kCommands) {
      if (c == "report") continue;
      per += "; " + std::string(c) + ":";
      for (const auto& t : expected_tables(c)) per += " " + t + ".csv";
    }
    throw ConfigError("report: no run artifacts in " + run_dir.string() +
                      "; expected manifest.json and config.yaml plus the command tables" + per);
  }
  const Json m = read_json(manifest_path);
  ReportSummary r;
  r.command = m.value("command", "");
  if (!is_command(r.command)) throw ConfigError("report: manifest names unknown command '" + r.command + "'");

  std::vector<std::string> missing;
  if (!std::filesystem::exists(run_dir / "config.yaml")) missing.push_back("config.yaml");
  for (const auto& a : m.at("artifacts"))
    if (!std::filesystem::exists(run_dir / a.get<std::string>())) missing.push_back(a.get<std::string>());
  for (const auto& t : expected_tables(r.command))
    if (!std::filesystem::exists(run_dir / (t + ".csv")) && !std::filesystem::exists(run_dir / (t + ".json")))
      missing.push_back(t + ".csv");
  if (!missing.empty()) {
    std::string s;
    for (const auto& x : missing) s += (s.empty() ? "" : ", ") + x;
    throw ConfigError("report: " + run_dir.string() + " is missing " + s + " (expected " + expected_list(r.command) + ")");
  }

  std::ostringstream os;
  os << "command  " << r.command << "\n";
  os << "config   " << m.value("config_sha256", "") << "\n";
  os << "created  " << m.value("created", "") << "\n";
  const Json& sum = m.at("summary");
  if (r.command == "decay-scan") {
    for (const char* k : {"fit", "fit_omega"}) {
      if (!sum.contains(k)) {
        os << k << "  not available (too few points or decades)\n";
        continue;
      }
      const auto& f = sum.at(k);
      os << (std::string(k) == "fit" ? "exponent          " : "exponent (Omega)  ") << fmt(f.at("exponent")) << " +- "
         << fmt(f.at("half_width")) << "  (" << f.at("used").get<std::size_t>() << " points)\n";
    }
  }
  if (sum.contains("certificate")) {
    for (const auto& c : sum.at("certificate").at("cells")) (c.at("pass").get<bool>() ? r.cells_passed : r.cells_failed)++;
    os << "cells    " << r.cells_passed << " pass, " << r.cells_failed << " fail\n";
  }
  for (const auto& [k, v] : sum.items()) {
    if (v.is_object() || v.is_array() || k == "theorem_regime") continue;
    os << "  " << k << " = " << fmt(v) << "\n";
  }
  for (const auto& c : m.at("checks")) {
    const bool pass = c.at("pass").get<bool>();
    (pass ? r.checks_passed : r.checks_failed)++;
    os << (pass ? "PASS " : "FAIL ") << c.at("name").get<std::string>() << "  value " << fmt(c.at("value"))
       << "  threshold " << fmt(c.at("threshold"));
    const auto d = c.value("detail", "");
    if (!d.empty()) os << "  " << d;
    os << "\n";
  }
  os << "checks   " << r.checks_passed << " pass, " << r.checks_failed << " fail\n";
  if (sum.contains("theorem_regime"))
    os << "theorem regime: " << sum.at("theorem_regime").get<std::string>()
       << "; the table above is a desk-scale substitute\n";
  r.text = os.str();
  return r;
}

int run_report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err) {
  try {
    out << report(run_dir).text;
    return kOk;
  } catch (const ConfigError& e) {
    err << "report error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfig;
  }
}

}  // namespace sparse_jacobi::io
