#pragma once

// Linear transverse response of a SERF magnetometer to a small field B along
// y, computed on top of a converged longitudinal solution.

#include <span>
#include <vector>

#include "cellsim/solver.hpp"

namespace cellsim {

struct SerfSettings {
    double field = 1e-12;  // tesla, along y

    /// gamma_e B / Gamma_rel; the linear response assumes this is small.
    double weakness(const MediumParams& medium) const {
        return medium.gamma_e * field / medium.gamma_rel;
    }
    bool is_weak(const MediumParams& medium) const { return weakness(medium) <= 0.1; }
};

/// Solves D lap(v) - (R_op + Gamma_rel) v / q(P) + gamma_e B P = 0 for
/// v = q(P) P_x with q frozen at the longitudinal solution, using the scene's
/// wall condition, and returns P_x. Throws SolverError if the relative
/// residual of the discrete equation exceeds `tolerance`.
Field solve_transverse(const Solution& sol, const Scene& scene, const SerfSettings& serf,
                       double tolerance = 1e-10);

double average_transverse(const Field& px, const Grid& grid, const CellGeometry& geometry);

struct DetuningSample {
    double detuning = 0.0;  // rad/s
    double transverse_average = 0.0;
    double polarization_average = 0.0;
};

struct DetuningOptimum {
    double detuning = 0.0;  // rad/s
    double transverse_average = 0.0;
    double polarization_average = 0.0;
    bool at_edge = false;  // maximum sits on the first or last grid point
    std::vector<DetuningSample> samples;
};

/// Grid search of average_transverse over `detunings` (rad/s, ascending) for
/// the scene's power, pressure and walls. An interior maximum is refined by
/// `refine_steps` golden-section steps inside the bracket of its two
/// neighbours; a negative count disables refinement.
DetuningOptimum optimize_detuning(const Scene& base, std::span<const double> detunings,
                                  const SerfSettings& serf, const SolverOptions& options = {},
                                  int refine_steps = 8);

/// Detuning grid over [lo, hi] (rad/s) with spacing `fine` within `window` of
/// any D1 line center and `coarse` elsewhere.
std::vector<double> resonance_grid(const MediumParams& medium, double lo, double hi, double fine,
                                   double coarse, double window);

/// Search grid for optimize_detuning: `resonance_grid` over [-3 delta_S,
/// 4 delta_S] with spacings given as fractions of Gamma_L, extended by
/// geometric tails (ratio 1.25) reaching up to `reach` line widths beyond
/// either end of that range.
std::vector<double> serf_detuning_grid(const MediumParams& medium, double fine_fraction = 0.1,
                                       double coarse_fraction = 0.5, double reach = 40.0);

}  // namespace cellsim
