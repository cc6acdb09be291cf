#include "pbsrdd/cli/study.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <regex>

#include "pbsrdd/cli/csv.hpp"
#include "pbsrdd/cli/expression.hpp"
#include "pbsrdd/cli/svg.hpp"
#include "pbsrdd/core/error.hpp"

namespace pbsrdd::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kProduct = 2;

std::string provenance(const ExperimentConfig& config) { return provenance_line(hash_hex(config_hash(config))); }

std::vector<std::size_t> field_indices(const ExperimentConfig& config, std::span<const double> times) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < times.size(); ++k)
    if (std::binary_search(config.field_times.begin(), config.field_times.end(), times[k])) out.push_back(k);
  return out;
}

void say(const Progress& progress, const std::string& msg) {
  if (progress) progress(msg);
}

}  // namespace

ReactionNetwork build_network(const ExperimentConfig& config) {
  BindingModelParams p;
  p.length = config.length;
  p.diffusivity_a = config.species[0].diffusivity;
  p.diffusivity_b = config.species[1].diffusivity;
  p.diffusivity_c = config.species[2].diffusivity;
  p.radius_a = config.species[0].radius;
  p.radius_b = config.species[1].radius;
  p.radius_c = config.species[2].radius;
  p.kernel_width = config.kernel_width;
  p.binding_rate = config.binding_rate;
  p.unbinding_rate = config.unbinding_rate;
  ReactionNetwork base = make_binding_network(p);
  std::vector<SpeciesSpec> species(config.species.begin(), config.species.end());
  return ReactionNetwork(species, base.reactions());
}

PotentialTable build_potentials(const ExperimentConfig& config, double kappa) {
  return PotentialTable({config.species[0].radius, config.species[1].radius, config.species[2].radius}, kappa,
                        config.cutoff_factor);
}

std::function<double(double)> profile_function(const ExperimentConfig& config, int species) {
  const ProfileSpec& p = config.initial[static_cast<std::size_t>(species)];
  if (p.values.empty()) {
    auto e = std::make_shared<Expression>(p.expression, config.length);
    return [e](double x) { return (*e)(x); };
  }
  // samples at x_k = k L / n, periodic linear interpolation
  return [v = p.values, L = config.length](double x) {
    const double n = static_cast<double>(v.size());
    double u = wrap_position(x, L) / L * n;
    auto k = static_cast<std::size_t>(std::floor(u));
    double f = u - static_cast<double>(k);
    k %= v.size();
    return (1.0 - f) * v[k] + f * v[(k + 1) % v.size()];
  };
}

mfm::SpectralFields mfm_initial(const ExperimentConfig& config, const Mesh& grid) {
  mfm::SpectralFields f(grid, 3);
  for (int s = 0; s < 3; ++s) {
    auto v = mfm::normalized_profile(grid, profile_function(config, s), config.initial[static_cast<std::size_t>(s)].mass);
    std::copy(v.begin(), v.end(), f.field(s).begin());
  }
  return f;
}

std::vector<crdme::InitialProfile> crdme_initial(const ExperimentConfig& config, const Mesh& mesh) {
  std::vector<crdme::InitialProfile> out(3);
  for (int s = 0; s < 3; ++s) {
    auto f = profile_function(config, s);
    auto& p = out[static_cast<std::size_t>(s)];
    p.mass = config.initial[static_cast<std::size_t>(s)].mass;
    for (int i = 0; i < mesh.voxels(); ++i) p.weights.push_back(f(mesh.node(i)));
  }
  return out;
}

mfm::MfmSolution run_mfm(const ExperimentConfig& config, double kappa, const Progress& progress) {
  Mesh grid = build_mesh(config.length, config.solver.collocation_points);
  mfm::PideSystem system(grid, build_network(config), build_potentials(config, kappa), config.solver.convolution);
  auto initial = mfm_initial(config, grid);
  std::function<void(double)> hook;
  if (progress) {
    hook = [&](double t) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "mfm kappa=%g t=%g/%g", kappa, t, config.t_end);
      progress(buf);
    };
  }
  return mfm::solve(system, initial, config.record_times, config.solver, hook);
}

std::uint64_t gamma_seed(const ExperimentConfig& config, std::size_t index) { return config.seed + index; }

crdme::EnsembleStats run_crdme(const ExperimentConfig& config, double gamma, std::uint64_t seed,
                               const Progress& progress) {
  crdme::CrdmeModel model{build_mesh(config.length, config.voxels), build_network(config),
                          build_potentials(config, config.kappa), gamma};
  crdme::EnsembleConfig ec;
  ec.tables = std::make_shared<const crdme::CrdmeTables>(std::move(model));
  ec.initial = crdme_initial(config, ec.tables->mesh());
  ec.record_times = config.record_times;
  ec.replicates = config.replicates;
  ec.base_seed = seed;
  ec.workers = config.workers;
  if (progress) {
    const std::uint64_t tenth = std::max<std::uint64_t>(1, config.replicates / 10);
    ec.progress = [&progress, tenth, gamma, total = config.replicates](std::uint64_t done) {
      if (done % tenth == 0 || done == total)
        progress("crdme gamma=" + format_number(gamma) + " " + std::to_string(done) + "/" + std::to_string(total));
    };
  }
  return crdme::run_ensemble(ec);
}

void prepare_output(const ExperimentConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw ModelError("cannot create output directory '" + config.output_dir + "': " + ec.message());
  std::ofstream out(output_path(config, "config.json"), std::ios::binary);
  if (!out) throw ModelError("cannot write into '" + config.output_dir + "'");
  out << echo_config(config);
}

std::string output_path(const ExperimentConfig& config, const std::string& file) {
  return (fs::path(config.output_dir) / file).string();
}

std::string gamma_tag(double gamma) { return "gamma" + format_number(gamma); }

void write_mfm_outputs(const ExperimentConfig& config, const mfm::MfmSolution& sol, const std::string& tag,
                       double kappa) {
  const auto names = config.species_names();
  const std::string prov = provenance(config);
  CsvTable mass{{"time"}, {}};
  for (const auto& n : names) mass.columns.push_back("mass_" + n);
  for (std::size_t k = 0; k < sol.times.size(); ++k)
    mass.rows.push_back({sol.times[k], sol.masses[k][0], sol.masses[k][1], sol.masses[k][2]});
  write_csv(output_path(config, tag + "_mass.csv"), mass, prov);

  CsvTable fields{{"time", "x", names[0], names[1], names[2]}, {}};
  for (std::size_t k : field_indices(config, sol.times)) {
    const auto& f = sol.fields[k];
    for (int i = 0; i < f.points(); ++i)
      fields.rows.push_back({sol.times[k], f.grid.node(i), f.at(0, i), f.at(1, i), f.at(2, i)});
  }
  write_csv(output_path(config, tag + "_fields.csv"), fields, prov);

  // the solver settings travel with every mean-field result
  const auto& s = config.solver;
  CsvTable solver{{"kappa", "collocation_points", "dt_max", "dt_min", "newton_tol", "newton_max_iters", "krylov_tol",
                   "krylov_restart", "krylov_max_iters", "positivity_tol", "fft_convolution", "steps", "retries",
                   "newton_iterations", "krylov_iterations", "smallest_dt"},
                  {}};
  solver.rows.push_back({kappa, std::uint64_t(s.collocation_points), s.dt_max, s.dt_min, s.newton_tol,
                         std::uint64_t(s.newton_max_iters), s.krylov_tol, std::uint64_t(s.krylov_restart),
                         std::uint64_t(s.krylov_max_iters), s.positivity_tol,
                         std::uint64_t(s.convolution == mfm::ConvolutionPath::fft), sol.steps, sol.retries,
                         sol.newton_iterations, sol.krylov_iterations, sol.smallest_dt});
  write_csv(output_path(config, tag + "_solver.csv"), solver, prov);
}

void write_crdme_outputs(const ExperimentConfig& config, const crdme::EnsembleStats& st, std::uint64_t seed) {
  const auto names = config.species_names();
  const std::string prov = provenance(config);
  const std::string tag = "crdme_" + gamma_tag(st.gamma);
  CsvTable mass{{"time"}, {}};
  for (const auto& n : names) mass.columns.push_back("mass_" + n);
  for (const auto& n : names) mass.columns.push_back("stderr_" + n);
  for (std::size_t k = 0; k < st.times.size(); ++k) {
    std::vector<CsvCell> row{st.times[k]};
    for (int s = 0; s < 3; ++s) row.emplace_back(st.mass(k, s));
    for (int s = 0; s < 3; ++s) row.emplace_back(st.mass_stderr(k, s));
    mass.rows.push_back(std::move(row));
  }
  write_csv(output_path(config, tag + "_mass.csv"), mass, prov);

  CsvTable fields{{"time", "x", names[0], names[1], names[2]}, {}};
  for (std::size_t k : field_indices(config, st.times))
    for (int i = 0; i < st.voxels; ++i)
      fields.rows.push_back({st.times[k], st.spacing * i, st.mean_concentration(k, 0, i),
                             st.mean_concentration(k, 1, i), st.mean_concentration(k, 2, i)});
  write_csv(output_path(config, tag + "_fields.csv"), fields, prov);

  CsvTable run{{"gamma", "replicates", "seed", "voxels", "events", "rejections"}, {}};
  run.rows.push_back({st.gamma, st.replicates, seed, std::uint64_t(st.voxels), st.events, st.rejections});
  write_csv(output_path(config, tag + "_run.csv"), run, prov);
}

StudyResult run_study(const ExperimentConfig& config, const Progress& progress, CachedMeanField cached) {
  prepare_output(config);
  const std::string prov = provenance(config);
  StudyResult result;
  result.meanfield = cached.meanfield ? *cached.meanfield : run_mfm(config, config.kappa, progress);
  write_mfm_outputs(config, result.meanfield, "mfm", config.kappa);
  if (config.free_reference) {
    result.free = cached.free ? *cached.free : run_mfm(config, 0.0, progress);
    write_mfm_outputs(config, *result.free, "mfm_free", 0.0);
  }
  std::vector<double> mf;
  for (const auto& m : result.meanfield.masses) mf.push_back(m[kProduct]);

  CsvTable summary{{"gamma", "sup_error", "sup_time", "replicates", "seed"}, {}};
  for (std::size_t g = 0; g < config.gammas.size(); ++g) {
    GammaResult r;
    r.gamma = config.gammas[g];
    r.seed = gamma_seed(config, g);
    say(progress, "crdme gamma=" + format_number(r.gamma) + " starting");
    r.stats = run_crdme(config, r.gamma, r.seed, progress);
    write_crdme_outputs(config, r.stats, r.seed);
    std::vector<double> particle;
    for (std::size_t k = 0; k < r.stats.times.size(); ++k) particle.push_back(r.stats.mass(k, kProduct));
    r.comparison = compare_series(r.stats.times, particle, result.meanfield.times, mf);

    CsvTable err{{"time", "particle", "meanfield", "abs_error", "stderr"}, {}};
    for (std::size_t k = 0; k < particle.size(); ++k)
      err.rows.push_back({r.stats.times[k], particle[k], mf[k], r.comparison.errors[k], r.stats.mass_stderr(k, kProduct)});
    write_csv(output_path(config, "error_" + gamma_tag(r.gamma) + ".csv"), err, prov);

    summary.rows.push_back({r.gamma, r.comparison.sup_error, r.comparison.sup_time, r.stats.replicates, r.seed});
    write_csv(output_path(config, "study_summary.csv"), summary, prov);
    result.gammas.push_back(std::move(r));
  }
  emit_plots(config.output_dir);
  return result;
}

std::vector<std::string> emit_plots(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ModelError("'" + dir + "' is not a directory");
  auto path = [&](const std::string& f) { return (fs::path(dir) / f).string(); };
  auto exists = [&](const std::string& f) { return fs::exists(path(f)); };
  std::map<double, std::string> gammas;  // gamma -> tag
  static const std::regex pattern("crdme_(gamma([0-9.eE+-]+))_mass\\.csv");
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, pattern)) gammas[std::stod(m[2].str())] = m[1].str();
  }
  auto column = [](const CsvTable& t, std::size_t k) {
    std::vector<double> v;
    for (const auto& r : t.rows) v.push_back(as_double(r[k]));
    return v;
  };
  std::vector<std::string> written;
  auto emit = [&](const std::string& file, const PlotPanel& panel) {
    if (panel.series.empty()) return;
    write_svg(path(file), panel);
    written.push_back(path(file));
  };

  // molar mass of the product species: column 3 of every mass table
  PlotPanel mass{"Molar mass of the product", "t", "molar mass", {}};
  for (auto [file, label, dashed] : {std::tuple{"mfm_mass.csv", "MFM", false},
                                     std::tuple{"mfm_free_mass.csv", "MFM, no potentials", true}})
    if (exists(file)) {
      auto t = read_csv(path(file));
      mass.series.push_back({label, column(t, 0), column(t, 3), dashed});
    }
  for (const auto& [g, tag] : gammas) {
    auto t = read_csv(path("crdme_" + tag + "_mass.csv"));
    mass.series.push_back({"CRDME gamma=" + format_number(g), column(t, 0), column(t, 3), false});
  }
  emit("molar_mass.svg", mass);

  PlotPanel errors{"Absolute molar mass error", "t", "|particle - mean field|", {}};
  for (const auto& [g, tag] : gammas)
    if (exists("error_" + tag + ".csv")) {
      auto t = read_csv(path("error_" + tag + ".csv"));
      errors.series.push_back({"gamma=" + format_number(g), t.values("time"), t.values("abs_error"), false});
    }
  emit("errors.svg", errors);

  if (exists("study_summary.csv")) {
    auto t = read_csv(path("study_summary.csv"));
    emit("sup_error.svg", {"Largest error over time", "gamma", "sup error", {{"sup error", t.values("gamma"), t.values("sup_error"), false}}});
  }

  // spatial snapshot of the product at the last field time
  PlotPanel snap{"Product concentration", "x", "concentration", {}};
  auto add_snapshot = [&](const std::string& file, const std::string& label, bool dashed) {
    if (!exists(file)) return;
    auto t = read_csv(path(file));
    if (t.rows.empty()) return;
    double last = as_double(t.rows.back()[0]);
    PlotSeries s{label, {}, {}, dashed};
    for (const auto& r : t.rows)
      if (as_double(r[0]) == last) {
        s.x.push_back(as_double(r[1]));
        s.y.push_back(as_double(r[4]));
      }
    snap.title = "Product concentration at t = " + format_number(last);
    snap.series.push_back(std::move(s));
  };
  add_snapshot("mfm_fields.csv", "MFM", false);
  add_snapshot("mfm_free_fields.csv", "MFM, no potentials", true);
  for (const auto& [g, tag] : gammas) add_snapshot("crdme_" + tag + "_fields.csv", "CRDME gamma=" + format_number(g), false);
  emit("snapshot.svg", snap);
  return written;
}

}  // namespace pbsrdd::cli
