#include "cellsim/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cellsim {

double depolarization_length(double q, double diffusion, double gamma_rel, double pump_rate) {
    if (!(q > 0.0) || !(diffusion >= 0.0) || !(gamma_rel + pump_rate > 0.0)) {
        throw std::invalid_argument("depolarization length needs positive inputs");
    }
    return std::sqrt(q * diffusion / (gamma_rel + pump_rate));
}

double absorption_length(double detuning, const MediumParams& medium) {
    return 1.0 / (medium.g_absorb * lineshape(detuning, medium));
}

RatioEstimate ratio_estimate(double lambda_d, double lambda_l, double length, double radius) {
    RatioEstimate est;
    est.valid = lambda_d >= 0.0 && lambda_d < lambda_l && lambda_d <= 0.5 * length &&
                lambda_d <= radius;
    if (!est.valid) {
        est.value = std::numeric_limits<double>::quiet_NaN();
        return est;
    }
    const double side = 1.0 - lambda_d / radius;
    est.value = std::sqrt(1.0 - lambda_d / lambda_l) * (1.0 - 2.0 * lambda_d / length) * side * side;
    return est;
}

double gamma_wall(double q, double diffusion, double length, double radius) {
    const double axial = constants::pi / length;
    const double radial = kBesselJ0FirstZero / radius;
    return q * diffusion * (axial * axial + radial * radial);
}

SerfBound serf_bound(std::span<const BoundSample> samples, double gamma_b, double gamma_rel) {
    SerfBound bound;
    for (const auto& s : samples) {
        if (!s.ratio.valid) continue;
        const double loss = s.pump_rate + gamma_rel;
        const double r1 = s.ratio.value * gamma_b * s.pump_rate / (loss * loss);
        const double r2 = s.ratio.value * gamma_b / (2.0 * loss);
        if (!bound.valid) {
            bound.r1 = r1;
            bound.r2 = r2;
            bound.valid = true;
        } else {
            bound.r1 = std::max(bound.r1, r1);
            bound.r2 = std::max(bound.r2, r2);
        }
    }
    bound.value = std::min(bound.r1, bound.r2);
    return bound;
}

double fz_profile(double z, double lambda_d, double length, double pump_rate, double gamma_rel) {
    if (!(lambda_d > 0.0)) throw std::invalid_argument("fz_profile needs lambda_D > 0");
    const double edge = std::exp(-z / lambda_d) + std::exp(-(length - z) / lambda_d);
    return pump_rate / (pump_rate + gamma_rel) * (1.0 - edge / (1.0 + std::exp(-length / lambda_d)));
}

SceneEstimate estimate_scene(const Scene& scene) {
    const auto& m = scene.medium;
    SceneEstimate e;
    e.pump_rate = scene.pump_coupling() * scene.incident_intensity();
    e.lambda_d = depolarization_length(kEstimateSlowDown, m.diffusion, m.gamma_rel, e.pump_rate);
    e.lambda_l = absorption_length(scene.detuning, m);
    e.ratio = ratio_estimate(e.lambda_d, e.lambda_l, scene.geometry.length, scene.geometry.radius);
    e.gamma_wall =
        gamma_wall(kWallRateSlowDown, m.diffusion, scene.geometry.length, scene.geometry.radius);
    return e;
}

}  // namespace cellsim
