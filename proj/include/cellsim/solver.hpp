#pragma once

// Self-consistent steady state of the optically pumped vapor: polarization
// diffusion D lap(q(P) P) - (R_op + Gamma_rel) P + R_op = 0 coupled to the
// per-ray absorption dI/dz = -g_I L(delta) I (1 - P).

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cellsim/grid.hpp"
#include "cellsim/media.hpp"

namespace cellsim {

struct Scene {
    CellGeometry geometry;
    MediumParams medium;
    double detuning = 0.0;  // rad/s
    double power = 0.0;     // mW
    WallMode walls = WallMode::Depolarizing;
    Grid grid;

    /// Top-hat incident intensity I_in / (pi r_L^2), mW/mm^2.
    double incident_intensity() const;
    /// Beer-Lambert coefficient of unpolarized vapor g_I L(delta), 1/mm.
    double absorption_coefficient() const;
    /// R_op per unit intensity, g_P L(delta).
    double pump_coupling() const;
    WallConditions wall_conditions() const { return WallConditions::uniform(walls); }

    /// Checks geometry, grid and power. Diffusion may be zero (algebraic limit).
    void validate() const;
};

struct SolverOptions {
    double relaxation = 1.0;   // under-relaxation on outer P updates
    double inner_tol = 1e-10;  // max-norm of the normalized discrete equation
    double outer_tol = 1e-8;   // max-norm change of P (and I / I0) per outer step
    int max_inner = 10000;
    int max_outer = 500;
    int oscillation_window = 10;
};

struct Solution {
    Field polarization;
    Field intensity;
    int iterations = 0;        // outer
    int inner_iterations = 0;  // summed over outer steps
    double residual = 0.0;
    bool converged = false;
    std::vector<double> residual_trace;
};

/// Convergence failure carrying the last residual and the outer trace.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual, std::vector<double> trace = {})
        : std::runtime_error(what), residual_(residual), trace_(std::move(trace)) {}
    double residual() const { return residual_; }
    const std::vector<double>& trace() const { return trace_; }

private:
    double residual_;
    std::vector<double> trace_;
};

/// Incident top-hat profile at z = 0: I0 on rays with r <= r_L, zero beyond.
std::vector<double> incident_profile(const Scene& scene);

/// Integrates the absorption ODE along every ray with the exponential step
/// I_{i+1} = I_i exp(-g_I L (1 - mean(P_i, P_{i+1})) dz). No radial coupling.
Field march_light(const Field& polarization, const Scene& scene);

/// Optical pumping rate g_P L(delta) I at every node.
Field pump_rate(const Field& intensity, const Scene& scene);

struct RelaxOptions {
    /// Solve with q held at this constant instead of q(P).
    std::optional<double> frozen_slow_down;
    /// Override the scene's wall mode per wall family.
    std::optional<WallConditions> walls;
    /// Starting polarization; defaults to the local algebraic solution.
    const Field* initial = nullptr;
};

struct RelaxResult {
    Field polarization;
    int iterations = 0;
    double residual = 0.0;
};

/// Solves the polarization equation for a fixed intensity field in the
/// variable u = q(P) P. Newton iteration on the discrete system, clamped to
/// the physical range of u. Throws SolverError when the inner residual does
/// not reach `inner_tol` within `max_inner` iterations.
RelaxResult relax_polarization(const Field& intensity, const Scene& scene,
                               const SolverOptions& options = {},
                               const RelaxOptions& relax = {});

/// Max-norm of [D lap(u) - (R + Gamma) P + R] / (R + Gamma) over nodes that
/// carry an equation, with u = q(P) P (or q_frozen P).
double polarization_residual(const Field& polarization, const Field& intensity,
                             const Scene& scene, const RelaxOptions& relax = {});

/// Outer alternation between march_light and relax_polarization with
/// under-relaxation, until the change per step drops below `outer_tol`.
Solution solve_steady(const Scene& scene, const SolverOptions& options = {});

}  // namespace cellsim
