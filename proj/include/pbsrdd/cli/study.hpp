#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pbsrdd/cli/compare.hpp"
#include "pbsrdd/cli/config.hpp"
#include "pbsrdd/core/potential.hpp"
#include "pbsrdd/crdme/ensemble.hpp"
#include "pbsrdd/mfm/solve.hpp"

namespace pbsrdd::cli {

using Progress = std::function<void(const std::string&)>;

ReactionNetwork build_network(const ExperimentConfig& config);
PotentialTable build_potentials(const ExperimentConfig& config, double kappa);
std::function<double(double)> profile_function(const ExperimentConfig& config, int species);

mfm::SpectralFields mfm_initial(const ExperimentConfig& config, const Mesh& grid);
std::vector<crdme::InitialProfile> crdme_initial(const ExperimentConfig& config, const Mesh& mesh);

/// Mean-field solution on config.record_times.
mfm::MfmSolution run_mfm(const ExperimentConfig& config, double kappa, const Progress& progress = {});

/// Ensemble seed of the k-th gamma in the sweep.
std::uint64_t gamma_seed(const ExperimentConfig& config, std::size_t index);
crdme::EnsembleStats run_crdme(const ExperimentConfig& config, double gamma, std::uint64_t seed,
                               const Progress& progress = {});

struct GammaResult {
  double gamma = 0.0;
  std::uint64_t seed = 0;
  crdme::EnsembleStats stats;
  SeriesComparison comparison;  // of the product species' molar mass
};

struct StudyResult {
  mfm::MfmSolution meanfield;
  std::optional<mfm::MfmSolution> free;  // kappa = 0 reference
  std::vector<GammaResult> gammas;
};

/// Mean-field solutions computed elsewhere for the same config, reused as is.
struct CachedMeanField {
  const mfm::MfmSolution* meanfield = nullptr;
  const mfm::MfmSolution* free = nullptr;
};

/// Creates the output directory and writes the echoed config.
void prepare_output(const ExperimentConfig& config);
std::string output_path(const ExperimentConfig& config, const std::string& file);
std::string gamma_tag(double gamma);

/// tag "mfm" for the configured kappa, "mfm_free" for the kappa = 0 reference.
void write_mfm_outputs(const ExperimentConfig& config, const mfm::MfmSolution& solution, const std::string& tag,
                       double kappa);
void write_crdme_outputs(const ExperimentConfig& config, const crdme::EnsembleStats& stats, std::uint64_t seed);

/// MFM once (plus the kappa = 0 reference when configured), then the CRDME
/// ensemble for every gamma. Each gamma's files and the summary are written as
/// soon as that gamma finishes. Ends with emit_plots.
StudyResult run_study(const ExperimentConfig& config, const Progress& progress = {}, CachedMeanField cached = {});

/// Re-creates every SVG panel from the CSVs found in `dir`.
std::vector<std::string> emit_plots(const std::string& dir);

}  // namespace pbsrdd::cli
