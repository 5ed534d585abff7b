#pragma once

// Closed-form estimates of the wall effect: depolarization and absorption
// lengths, the depolarizing/nondepolarizing polarization ratio, the lowest
// diffusion-mode wall rate, the SERF signal bound and the constant-intensity
// slab profile.

#include <span>

#include "cellsim/solver.hpp"

namespace cellsim {

/// First zero of J0.
inline constexpr double kBesselJ0FirstZero = 2.404825557695773;
/// Slow-down factor used in the ratio estimate (midpoint of [4, 6]).
inline constexpr double kEstimateSlowDown = 5.0;
/// Slow-down factor used for the wall rate (unpolarized limit).
inline constexpr double kWallRateSlowDown = 6.0;

/// sqrt(q D / (Gamma_rel + R_op0)), mm.
double depolarization_length(double q, double diffusion, double gamma_rel, double pump_rate);

/// 1 / (g_I L(delta)), mm.
double absorption_length(double detuning, const MediumParams& medium);

struct RatioEstimate {
    double value = 0.0;  // NaN when invalid
    bool valid = false;
};

/// sqrt(1 - lambda_D/lambda_L) (1 - 2 lambda_D/L) (1 - lambda_D/R)^2. Valid only
/// for lambda_D < lambda_L, lambda_D <= L/2 and lambda_D <= R.
RatioEstimate ratio_estimate(double lambda_d, double lambda_l, double length, double radius);

/// q D [(pi/L)^2 + (mu1/R)^2], 1/s.
double gamma_wall(double q, double diffusion, double length, double radius);

/// Per-detuning inputs of the SERF bound.
struct BoundSample {
    RatioEstimate ratio;
    double pump_rate = 0.0;  // R_op0
};

struct SerfBound {
    double r1 = 0.0;
    double r2 = 0.0;
    double value = 0.0;  // min(r1, r2)
    bool valid = false;  // at least one sample had a valid ratio
};

/// r1 = max ratio gamma_e B R0 / (R0 + Gamma)^2, r2 = max ratio gamma_e B /
/// (2 (R0 + Gamma)); maxima over the samples with a valid ratio.
SerfBound serf_bound(std::span<const BoundSample> samples, double gamma_b, double gamma_rel);

/// Constant-intensity slab profile between two depolarizing discs:
/// R/(R + Gamma) (1 - (e^{-z/l} + e^{-(L-z)/l}) / (1 + e^{-L/l})).
double fz_profile(double z, double lambda_d, double length, double pump_rate, double gamma_rel);

/// Estimates for one scene, evaluated at its incident intensity.
struct SceneEstimate {
    double pump_rate = 0.0;  // R_op0 = g_P L(delta) I0
    double lambda_d = 0.0;
    double lambda_l = 0.0;
    RatioEstimate ratio;
    double gamma_wall = 0.0;
};

SceneEstimate estimate_scene(const Scene& scene);

}  // namespace cellsim
