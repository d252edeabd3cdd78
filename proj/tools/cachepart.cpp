// cachepart: run scenarios and reproduce figures, writing CSV files.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

#include "cachepart/cachepart.hpp"

namespace {

using namespace cachepart;

enum Exit { kOk = 0, kValidation = 2, kNoConvergence = 3, kIo = 4 };

int exit_code(const Error& e) {
  switch (e.code()) {
    case Errc::no_convergence:
    case Errc::stalled:
      return kNoConvergence;
    case Errc::io_error:
      return kIo;
    default:
      return kValidation;  // bad input surfaced by the library
  }
}

int finish(const experiments::Outputs& out, const std::filesystem::path& dir) {
  experiments::write(out, dir);
  for (const auto& [name, table] : out.files)
    std::cout << (dir / name).string() << " (" << table.rows().size() << " rows)\n";
  if (!out.converged) {
    std::cerr << "NO_CONVERGENCE: " << out.message << "\n";
    return kNoConvergence;
  }
  return kOk;
}

scenario::Scenario load_named_or_file(const std::string& what) {
  const auto builtins = scenario::builtin_scenarios();
  if (auto it = builtins.find(what); it != builtins.end()) return it->second;
  return scenario::load(what);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cache partitioning among content providers"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out_dir = "out";
  double tol = 1e-6;
  int max_iters = 0;
  app.add_option("--seed", seed, "override the scenario seed");
  app.add_option("--out-dir", out_dir, "directory for CSV output")->capture_default_str();
  app.add_option("--tol", tol, "optimizer KKT tolerance")->capture_default_str();
  app.add_option("--max-iters", max_iters, "optimizer iteration cap and controller budget");

  std::string target;
  auto* run = app.add_subcommand("run", "run a scenario file or built-in scenario name");
  run->add_option("scenario", target, "scenario JSON file or built-in name")->required();
  auto* reproduce = app.add_subcommand("reproduce", "reproduce a figure's data");
  std::string figure;
  reproduce->add_option("figure", figure, "figure id")->required();
  auto* list = app.add_subcommand("list-scenarios", "list built-in scenarios and figures");
  auto* validate = app.add_subcommand("validate", "parse and validate a scenario file");
  validate->add_option("scenario", target, "scenario JSON file")->required();
  auto* show = app.add_subcommand("show-scenario", "print a built-in scenario as JSON");
  show->add_option("name", target, "built-in name")->required();

  CLI11_PARSE(app, argc, argv);

  experiments::RunOptions options;
  if (app.count("--seed")) options.seed = seed;
  options.tolerance = tol;
  if (max_iters > 0) options.max_iterations = max_iters;

  try {
    if (*list) {
      std::cout << "scenarios:\n";
      for (const auto& [name, s] : scenario::builtin_scenarios())
        std::cout << "  " << name << "  " << scenario::to_string(s.mode) << "\n";
      std::cout << "figures:\n";
      for (const auto& id : experiments::figure_ids()) std::cout << "  " << id << "\n";
      return kOk;
    }
    if (*show) {
      std::cout << scenario::serialize(scenario::builtin_scenarios().at(target));
      return kOk;
    }
    if (*validate) {
      const auto s = scenario::load(target);
      std::cout << "ok: " << (s.name.empty() ? target : s.name) << " ("
                << scenario::to_string(s.mode) << ")\n";
      return kOk;
    }
    if (*run) {
      const auto s = load_named_or_file(target);
      std::filesystem::path dir = out_dir;
      if (!s.output.empty() && !app.count("--out-dir")) dir = s.output;
      return finish(experiments::run(s, options), dir);
    }
    if (*reproduce) return finish(experiments::reproduce(figure, options), out_dir);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code(e);
  } catch (const std::out_of_range&) {
    std::cerr << "VALIDATION_ERROR: unknown scenario '" << target << "'\n";
    return kValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "IO_ERROR: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}
