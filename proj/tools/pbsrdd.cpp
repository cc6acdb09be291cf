#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "pbsrdd/cli/config.hpp"
#include "pbsrdd/cli/csv.hpp"
#include "pbsrdd/cli/study.hpp"
#include "pbsrdd/cli/validate.hpp"
#include "pbsrdd/core/error.hpp"

using namespace pbsrdd;
using namespace pbsrdd::cli;

namespace {

enum Exit { ok = 0, failure = 1, config_error = 2, numerical_failure = 3, oracle_failure = 4 };

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<std::uint64_t> replicates;
  std::vector<double> gammas;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON experiment config (defaults when omitted)");
  app->add_option("--seed", o.seed, "base seed");
  app->add_option("--workers", o.workers, "worker threads for ensembles");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--replicates", o.replicates, "replicates per gamma");
  app->add_option("--gamma", o.gammas, "gamma values, comma separated")->delimiter(',');
}

ExperimentConfig load(const Overrides& o) {
  ExperimentConfig c = o.config.empty() ? parse_config_text("{}") : parse_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.workers) c.workers = *o.workers;
  if (o.out) c.output_dir = *o.out;
  if (o.replicates) c.replicates = *o.replicates;
  if (!o.gammas.empty()) c.gammas = o.gammas;
  c.finalize();
  return c;
}

void report(const std::string& msg) { std::cerr << msg << std::endl; }

void print_written(const std::vector<std::string>& files) {
  for (const auto& f : files) std::cout << "wrote " << f << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle and mean-field simulations of reaction-drift-diffusion with pair potentials"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Overrides o;
  std::string model = "mfm";
  auto* run = app.add_subcommand("run", "run one model: the mean-field solver or the CRDME ensemble");
  add_common(run, o);
  run->add_option("--model", model, "mfm or crdme")->check(CLI::IsMember({"mfm", "crdme"}));

  auto* study = app.add_subcommand("study", "gamma sweep comparing CRDME molar masses with the mean-field model");
  add_common(study, o);

  auto* validate = app.add_subcommand("validate", "invariant and oracle checks at the configured parameters");
  add_common(validate, o);

  std::string plot_dir;
  auto* plot = app.add_subcommand("plot", "re-create the SVG panels from the CSVs in a directory");
  add_common(plot, o);
  plot->add_option("dir", plot_dir, "result directory (defaults to --out or the config's output_dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    ExperimentConfig config = load(o);
    if (*run) {
      prepare_output(config);
      if (model == "mfm") {
        auto sol = run_mfm(config, config.kappa, report);
        write_mfm_outputs(config, sol, "mfm", config.kappa);
        std::printf("mfm: %llu steps, %llu retries, final molar mass of %s %.10g\n",
                    static_cast<unsigned long long>(sol.steps), static_cast<unsigned long long>(sol.retries),
                    config.species[2].name.c_str(), sol.masses.back()[2]);
      } else {
        for (std::size_t g = 0; g < config.gammas.size(); ++g) {
          auto st = run_crdme(config, config.gammas[g], gamma_seed(config, g), report);
          write_crdme_outputs(config, st, gamma_seed(config, g));
          std::printf("crdme gamma=%s: %llu replicates, final molar mass of %s %.6g +- %.2g\n",
                      format_number(config.gammas[g]).c_str(), static_cast<unsigned long long>(st.replicates),
                      config.species[2].name.c_str(), st.mass(st.times.size() - 1, 2),
                      st.mass_stderr(st.times.size() - 1, 2));
        }
      }
      print_written(emit_plots(config.output_dir));
    } else if (*study) {
      auto result = run_study(config, report);
      std::printf("gamma,sup_error,sup_time,replicates,seed\n");
      for (const auto& g : result.gammas)
        std::printf("%s,%s,%s,%llu,%llu\n", format_number(g.gamma).c_str(),
                    format_number(g.comparison.sup_error).c_str(), format_number(g.comparison.sup_time).c_str(),
                    static_cast<unsigned long long>(g.stats.replicates), static_cast<unsigned long long>(g.seed));
    } else if (*validate) {
      auto checks = run_validation(config);
      bool all = true;
      for (const auto& c : checks) {
        std::printf("%s  %s: %s\n", c.passed ? "pass" : "FAIL", c.name.c_str(), c.detail.c_str());
        all = all && c.passed;
      }
      return all ? ok : oracle_failure;
    } else if (*plot) {
      print_written(emit_plots(plot_dir.empty() ? config.output_dir : plot_dir));
    }
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return config_error;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return numerical_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return failure;
  }
  return ok;
}
