#include <CLI11.hpp>

#include <iostream>

#include "sparse_jacobi/io/commands.hpp"

namespace io = sparse_jacobi::io;

int main(int argc, char** argv) {
  CLI::App app{"Numerical toolkit for sparse Jacobi matrices"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  for (auto name : io::kCommands) {
    if (name == "report") continue;
    auto* sub = app.add_subcommand(std::string(name));
    sub->add_option("-c,--config", config_path, "YAML run configuration")->required();
    sub->add_option("-s,--set", sets, "override a config key, e.g. --set model.p=0.7");
  }
  std::string run_dir;
  app.add_subcommand("report", "summarise a finished run directory")
      ->add_option("run_dir", run_dir, "run directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : io::kConfig;
  }

  auto* chosen = app.get_subcommands().front();
  if (chosen->get_name() == "report") return io::run_report(run_dir, std::cout, std::cerr);
  std::vector<io::Override> overrides;
  try {
    for (const auto& s : sets) overrides.push_back(io::parse_override(s));
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return io::kConfig;
  }
  return io::run(chosen->get_name(), config_path, overrides, std::cout, std::cerr);
}
