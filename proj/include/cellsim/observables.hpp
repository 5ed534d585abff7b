#pragma once

#include <optional>

#include "cellsim/solver.hpp"

namespace cellsim {

/// Scalar diagnostics of one converged scene.
struct Observables {
    double transmission = 1.0;
    double average_polarization = 0.0;
    double wall_loss = 0.0;
    double balance_residual = 0.0;
    std::optional<double> transverse_average;
};

/// Beam power entering the cell, the disc quadrature of I at z = 0 (mW).
/// Matches I_in exactly when the beam fills the cell.
double incident_power(const Solution& sol, const Scene& scene);

/// Transmitted over incident power; 1 by convention when no light enters.
double transmission(const Solution& sol, const Scene& scene);

double average_polarization(const Solution& sol, const Scene& scene);

/// V Gamma_rel g_I / (I_in g_P), the polarization-to-absorption factor.
double absorption_per_polarization(const Scene& scene, double input_power);

/// eta_loss = 1 - T - (V Gamma_rel g_I / (I_in g_P)) P_ave.
double wall_loss(const Solution& sol, const Scene& scene);

/// (1 - T) - (g_I / (I_in g_P)) [V Gamma_rel P_ave - D wall_flux(q(P) P)].
double balance_residual(const Solution& sol, const Scene& scene);

Observables evaluate(const Solution& sol, const Scene& scene);

}  // namespace cellsim
