#include "cellsim/solver.hpp"

#include <algorithm>
#include <cmath>

#include "elliptic.hpp"

namespace cellsim {

double Scene::incident_intensity() const {
    return power / (constants::pi * geometry.beam_radius * geometry.beam_radius);
}

double Scene::absorption_coefficient() const {
    return medium.g_absorb * lineshape(detuning, medium);
}

double Scene::pump_coupling() const { return medium.g_pump * lineshape(detuning, medium); }

void Scene::validate() const {
    geometry.validate();
    check_grid(grid, geometry);
    if (!(power >= 0.0 && std::isfinite(power))) {
        throw std::invalid_argument("input power must be non-negative");
    }
    if (!std::isfinite(detuning)) throw std::invalid_argument("detuning must be finite");
    if (!(medium.diffusion >= 0.0) || !(medium.gamma_rel > 0.0) || !(medium.gamma_l > 0.0) ||
        !(medium.g_pump > 0.0) || !(medium.g_absorb > 0.0)) {
        throw std::invalid_argument("medium parameters out of range");
    }
}

std::vector<double> incident_profile(const Scene& scene) {
    const Grid& g = scene.grid;
    const double i0 = scene.incident_intensity();
    // Tolerance keeps a node that sits on the beam edge inside the beam.
    const double edge = scene.geometry.beam_radius * (1.0 + 1e-12);
    std::vector<double> profile(g.nr, 0.0);
    for (int j = 0; j < g.nr; ++j) profile[j] = g.r(j) <= edge ? i0 : 0.0;
    return profile;
}

Field march_light(const Field& p, const Scene& scene) {
    const Grid& g = scene.grid;
    if (p.nz() != g.nz || p.nr() != g.nr) throw std::invalid_argument("field/grid mismatch");
    const double kappa_dz = scene.absorption_coefficient() * g.dz;
    const auto profile = incident_profile(scene);
    Field intensity(g);
    for (int j = 0; j < g.nr; ++j) {
        double value = profile[j];
        intensity(0, j) = value;
        for (int i = 0; i + 1 < g.nz; ++i) {
            const double opacity = 1.0 - 0.5 * (p(i, j) + p(i + 1, j));
            value *= std::exp(-kappa_dz * std::max(opacity, 0.0));
            intensity(i + 1, j) = value;
        }
    }
    return intensity;
}

Field pump_rate(const Field& intensity, const Scene& scene) {
    const double coupling = scene.pump_coupling();
    Field rate = intensity;
    for (double& v : rate.values()) v *= coupling;
    return rate;
}

namespace {

struct SpinModel {
    std::optional<double> frozen;

    double max_spin() const { return frozen ? *frozen : 4.0; }
    double polarization(double u) const {
        return frozen ? u / *frozen : invert_longitudinal_spin(std::clamp(u, 0.0, 4.0));
    }
    double spin(double p) const { return frozen ? *frozen * p : longitudinal_spin(p); }
    // dP/du
    double slope(double p) const {
        return frozen ? 1.0 / *frozen : 1.0 / longitudinal_spin_slope(p);
    }
};

struct NodeEquation {
    const detail::EllipticSystem& system;
    const std::vector<double>& rate;  // R_op per unknown
    double gamma;
    double diffusion;
    SpinModel model;

    // Normalized max-norm residual; fills F and P.
    double evaluate(const std::vector<double>& u, std::vector<double>& f,
                    std::vector<double>& p, std::vector<double>& lap) const {
        system.apply_laplacian(u, lap);
        f.resize(u.size());
        p.resize(u.size());
        double norm = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            p[k] = model.polarization(u[k]);
            const double loss = rate[k] + gamma;
            f[k] = diffusion * lap[k] - loss * p[k] + rate[k];
            norm = std::max(norm, std::abs(f[k]) / loss);
        }
        return norm;
    }
};

}  // namespace

RelaxResult relax_polarization(const Field& intensity, const Scene& scene,
                               const SolverOptions& options, const RelaxOptions& relax) {
    const Grid& g = scene.grid;
    if (intensity.nz() != g.nz || intensity.nr() != g.nr) {
        throw std::invalid_argument("intensity/grid mismatch");
    }
    const WallConditions walls = relax.walls.value_or(scene.wall_conditions());
    const SpinModel model{relax.frozen_slow_down};
    const double gamma = scene.medium.gamma_rel;
    const double diffusion = scene.medium.diffusion;

    detail::EllipticSystem system(g, walls);
    const int n = system.unknowns();
    const Field rate_field = pump_rate(intensity, scene);
    std::vector<double> rate(n);
    std::vector<double> u(n);
    for (int k = 0; k < n; ++k) {
        rate[k] = rate_field.values()[system.node(k)];
        const double start = relax.initial
                                 ? std::clamp(relax.initial->values()[system.node(k)], 0.0, 1.0)
                                 : rate[k] / (rate[k] + gamma);
        u[k] = model.spin(start);
    }

    const NodeEquation equation{system, rate, gamma, diffusion, model};
    std::vector<double> f, p, lap, trial_f, trial_p;
    std::vector<double> c(n);
    double norm = equation.evaluate(u, f, p, lap);
    int iterations = 0;
    while (norm >= options.inner_tol) {
        if (iterations >= options.max_inner) {
            throw SolverError("polarization relaxation did not converge", norm);
        }
        ++iterations;
        for (int k = 0; k < n; ++k) c[k] = (rate[k] + gamma) * model.slope(p[k]);
        system.factorize(diffusion, c);
        for (double& v : f) v = -v;
        const std::vector<double> step = system.solve(f);

        // Clamped Newton step with backtracking on the residual norm.
        std::vector<double> trial(n);
        double scale = 1.0;
        double trial_norm = 0.0;
        for (int attempt = 0;; ++attempt) {
            for (int k = 0; k < n; ++k) {
                trial[k] = std::clamp(u[k] + scale * step[k], 0.0, model.max_spin());
            }
            trial_norm = equation.evaluate(trial, trial_f, trial_p, lap);
            if (trial_norm < norm || attempt == 8) break;
            scale *= 0.5;
        }
        u.swap(trial);
        f.swap(trial_f);
        p.swap(trial_p);
        if (trial_norm >= norm && norm < 1e3 * options.inner_tol) {
            // Rounding floor of the linear solve just above the tolerance.
            norm = trial_norm;
            break;
        }
        norm = trial_norm;
    }

    RelaxResult result;
    result.polarization = Field(g);
    for (int k = 0; k < n; ++k) result.polarization.values()[system.node(k)] = p[k];
    result.iterations = iterations;
    result.residual = norm;
    return result;
}

double polarization_residual(const Field& polarization, const Field& intensity, const Scene& scene,
                             const RelaxOptions& relax) {
    const Grid& g = scene.grid;
    const WallConditions walls = relax.walls.value_or(scene.wall_conditions());
    const SpinModel model{relax.frozen_slow_down};
    Field spin(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        spin.values()[k] = model.spin(std::clamp(polarization.values()[k], 0.0, 1.0));
    }
    const Field lap = cylindrical_laplacian(spin, g, scene.geometry, walls);
    const Field rate = pump_rate(intensity, scene);
    detail::EllipticSystem system(g, walls);
    double norm = 0.0;
    for (int k = 0; k < system.unknowns(); ++k) {
        const std::size_t node = system.node(k);
        const double r = rate.values()[node];
        const double loss = r + scene.medium.gamma_rel;
        const double f = scene.medium.diffusion * lap.values()[node] -
                         loss * polarization.values()[node] + r;
        norm = std::max(norm, std::abs(f) / loss);
    }
    return norm;
}

Solution solve_steady(const Scene& scene, const SolverOptions& options) {
    scene.validate();
    const Grid& g = scene.grid;
    Solution sol;
    sol.polarization = Field(g);
    sol.intensity = Field(g);
    if (scene.power == 0.0) {
        sol.converged = true;
        return sol;
    }
    if (!(options.relaxation > 0.0 && options.relaxation <= 1.0)) {
        throw std::invalid_argument("relaxation factor must lie in (0, 1]");
    }

    // Local algebraic solution under the unattenuated beam.
    const auto profile = incident_profile(scene);
    const double coupling = scene.pump_coupling();
    Field p(g);
    for (int i = 0; i < g.nz; ++i) {
        for (int j = 0; j < g.nr; ++j) {
            const double rate = coupling * profile[j];
            p(i, j) = rate / (rate + scene.medium.gamma_rel);
        }
    }
    p = apply_boundary(std::move(p), scene.walls);

    const double i0 = scene.incident_intensity();
    Field intensity = march_light(p, scene);
    Field relaxed = p;
    int rising = 0;
    double previous_change = 0.0;
    for (int outer = 1;; ++outer) {
        RelaxOptions relax;
        relax.initial = &relaxed;
        RelaxResult inner = relax_polarization(intensity, scene, options, relax);
        sol.inner_iterations += inner.iterations;
        relaxed = std::move(inner.polarization);

        double change = max_abs_difference(relaxed, p);
        for (std::size_t k = 0; k < g.size(); ++k) {
            p.values()[k] += options.relaxation * (relaxed.values()[k] - p.values()[k]);
        }
        Field next_intensity = march_light(p, scene);
        change = std::max(change, max_abs_difference(next_intensity, intensity) / i0);
        intensity = std::move(next_intensity);
        sol.residual_trace.push_back(change);
        sol.iterations = outer;

        if (change < options.outer_tol) {
            sol.polarization = relaxed;
            sol.intensity = march_light(relaxed, scene);
            sol.residual = std::max(inner.residual, change);
            sol.converged = true;
            return sol;
        }
        rising = (outer > 1 && change > previous_change) ? rising + 1 : 0;
        previous_change = change;
        if (rising >= options.oscillation_window) {
            throw SolverError("outer iteration oscillates; reduce the relaxation factor", change,
                              sol.residual_trace);
        }
        if (outer >= options.max_outer) {
            throw SolverError("outer iteration did not converge", change, sol.residual_trace);
        }
    }
}

}  // namespace cellsim
