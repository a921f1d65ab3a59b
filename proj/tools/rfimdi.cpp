// Command-line front end: sweep, heatmap, optimize and verify subcommands.

#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rfimdi/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitScenario = 2;
constexpr int kExitVerify = 3;

struct CommonOpts {
  std::string config;
  std::string out;
  std::string mode;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
  auto* c = cmd->add_option("--config", opts.config, "scenario config file");
  if (config_required) c->required();
  cmd->add_option("--out", opts.out, "output CSV path (default stdout)");
  cmd->add_option("--mode", opts.mode, "override analysis mode")
      ->check(CLI::IsMember({"sps", "wcs"}));
  cmd->add_option("--jobs", opts.jobs, "worker threads")
      ->check(CLI::PositiveNumber);
}

rfimdi::scenario::Scenario load(const CommonOpts& opts) {
  auto sc = rfimdi::scenario::load_config(opts.config);
  if (!opts.mode.empty()) sc.mode = opts.mode;
  sc.jobs = opts.jobs;
  return sc;
}

int emit_csv(const CommonOpts& opts,
             const std::vector<rfimdi::scenario::RunRecord>& records) {
  if (opts.out.empty()) {
    rfimdi::scenario::write_csv(std::cout, records);
    return kExitOk;
  }
  std::ofstream out(opts.out);
  if (!out) {
    std::cerr << "error: cannot open output file: " << opts.out << "\n";
    return kExitScenario;
  }
  rfimdi::scenario::write_csv(out, records);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"security analysis for measurement-device-independent QKD "
               "with imperfect state preparation"};
  app.require_subcommand(1);

  CommonOpts sweep_opts, heat_opts, optimize_opts, verify_opts;
  auto* sweep = app.add_subcommand("sweep", "one-variable parameter sweep");
  add_common(sweep, sweep_opts, true);
  auto* heat = app.add_subcommand("heatmap", "two-variable grid");
  add_common(heat, heat_opts, true);
  auto* optimize =
      app.add_subcommand("optimize", "optimize signal and decoy intensities");
  add_common(optimize, optimize_opts, true);
  auto* verify = app.add_subcommand("verify", "run internal consistency checks");
  add_common(verify, verify_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sweep->parsed()) {
      return emit_csv(sweep_opts, rfimdi::scenario::run_scenario(load(sweep_opts)));
    }
    if (heat->parsed()) {
      return emit_csv(heat_opts, rfimdi::scenario::heatmap(load(heat_opts)));
    }
    if (optimize->parsed()) {
      auto sc = load(optimize_opts);
      sc.mode = "wcs";
      const auto best = rfimdi::scenario::optimize_intensities(sc);
      sc.decoy.mu = best.mu;
      sc.decoy.nu = best.nu;
      rfimdi::scenario::RunRecord rec;
      rec.value = sc.distance_km;
      rec.result = rfimdi::scenario::evaluate_wcs(sc);
      rec.ok = true;
      rec.mu_opt = best.mu;
      rec.nu_opt = best.nu;
      rec.has_opt = true;
      return emit_csv(optimize_opts, {rec});
    }
    if (verify->parsed()) {
      std::ostream* os = &std::cout;
      std::ofstream file;
      if (!verify_opts.out.empty()) {
        file.open(verify_opts.out);
        if (!file) {
          std::cerr << "error: cannot open output file: " << verify_opts.out << "\n";
          return kExitScenario;
        }
        os = &file;
      }
      return rfimdi::scenario::verify(*os) ? kExitOk : kExitVerify;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitScenario;
  }
  return kExitUsage;
}
