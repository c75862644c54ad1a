// edgespec run <suite> [flags]

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "edgespec/errors.hpp"
#include "edgespec/harness.hpp"

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw edgespec::ConfigError("bad spectrum entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace edgespec::harness;
  CLI::App app{"edgespec verification harness"};
  app.require_subcommand(1);
  auto* run = app.add_subcommand("run", "run a verification suite");

  RunConfig cfg;
  std::string suite_name, output = "json", out_path, spectrum;
  double nu = 0.0, beta = 0.0;
  run->add_option("suite", suite_name, "bessel|schur|model|parametrix|gb|scales|witt|all")->required();
  run->add_option("--grid-n", cfg.grid_n, "x grid size");
  run->add_option("--x-min", cfg.x_min, "left end of the x window");
  run->add_option("--x-max", cfg.x_max, "right end of the x window");
  run->add_option("--y-modes", cfg.y_modes, "y grid size (power of two)");
  run->add_option("--fiber-modes", cfg.fiber_modes, "fiber truncation");
  auto* nu_opt = run->add_option("--nu", nu, "Bessel order");
  auto* beta_opt = run->add_option("--beta", beta, "frequency norm");
  auto* spec_opt = run->add_option("--spectrum", spectrum, "comma separated fiber eigenvalues");
  run->add_option("--gap", cfg.gap, "Witt gap");
  run->add_option("--delta-min", cfg.delta_min, "Witt floor margin");
  run->add_option("--tol-factor", cfg.tol_factor, "tolerance multiplier");
  run->add_option("--seed", cfg.seed, "random seed (EDGESPEC_SEED overrides)");
  run->add_option("--output", output, "json|csv");
  run->add_option("--out", out_path, "write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::vector<CheckRecord> records;
  std::string text;
  try {
    Suite suite = parse_suite(suite_name);
    cfg.output_format = parse_format(output);
    if (*nu_opt) cfg.nu = nu;
    if (*beta_opt) cfg.beta = beta;
    if (*spec_opt) cfg.spectrum = parse_list(spectrum);
    apply_env_overrides(cfg);
    cfg.validate();
    records = run_suite(suite, cfg);
    text = emit(records, cfg.output_format);
  } catch (const edgespec::ConfigError& e) {
    std::cerr << "edgespec: " << e.what() << "\n";
    return 2;
  } catch (const edgespec::Error& e) {
    std::cerr << "edgespec: " << e.what() << "\n";
    return 2;
  }

  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      std::cerr << "edgespec: cannot write " << out_path << "\n";
      return 2;
    }
    f << text;
  }
  int status = exit_status(records);
  for (const auto& r : records)
    if (!r.pass) std::cerr << "FAIL " << r.check << " [" << r.param_string() << "] measured " << r.measured << "\n";
  return status;
}
