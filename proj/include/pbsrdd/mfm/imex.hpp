#pragma once

#include "pbsrdd/mfm/fields.hpp"
#include "pbsrdd/mfm/operators.hpp"

namespace pbsrdd::mfm {

struct StepResult {
  double dt = 0.0;          // step actually taken
  int newton_iterations = 0;
  int krylov_iterations = 0;
  int retries = 0;          // dt halvings before success
};

/// Solves S - dt T(S) = rhs by Newton-Krylov. Returns false when Newton does
/// not reach settings.newton_tol; `fields` is left unspecified in that case.
bool implicit_transport_solve(const PideSystem& system, const SpectralFields& rhs, double dt,
                              const SolverSettings& settings, SpectralFields& fields, StepResult& stats);

/// One IMEX Euler step: explicit reactions, implicit transport. On Newton
/// failure dt is halved and the step retried; below dt_min a NumericalError
/// ("solver stall") is thrown. Negative values below -positivity_tol throw too.
StepResult imex_step(const PideSystem& system, SpectralFields& fields, double dt, const SolverSettings& settings);

}  // namespace pbsrdd::mfm
