#include "cellsim/serf.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cellsim/observables.hpp"
#include "elliptic.hpp"

namespace cellsim {

Field solve_transverse(const Solution& sol, const Scene& scene, const SerfSettings& serf,
                       double tolerance) {
    const Grid& g = scene.grid;
    Field px(g);
    const double drive = scene.medium.gamma_e * serf.field;
    if (drive == 0.0 || scene.power == 0.0) return px;

    detail::EllipticSystem system(g, scene.wall_conditions());
    const int n = system.unknowns();
    const Field rate = pump_rate(sol.intensity, scene);
    std::vector<double> q(n), c(n), rhs(n);
    double forcing = 0.0;
    for (int k = 0; k < n; ++k) {
        const std::size_t node = system.node(k);
        const double p = sol.polarization.values()[node];
        q[k] = slow_down(p);
        c[k] = (rate.values()[node] + scene.medium.gamma_rel) / q[k];
        rhs[k] = -drive * p;
        forcing = std::max(forcing, std::abs(rhs[k]));
    }
    system.factorize(scene.medium.diffusion, c);
    std::vector<double> v = system.solve(rhs);

    std::vector<double> lap, defect(n);
    double residual = 0.0;
    // Up to two refinement sweeps against rounding in the direct solve.
    for (int sweep = 0;; ++sweep) {
        system.apply_laplacian(v, lap);
        residual = 0.0;
        for (int k = 0; k < n; ++k) {
            defect[k] = rhs[k] - (scene.medium.diffusion * lap[k] - c[k] * v[k]);
            residual = std::max(residual, std::abs(defect[k]));
        }
        if (forcing > 0.0) residual /= forcing;
        if (residual <= tolerance || sweep == 2) break;
        const std::vector<double> correction = system.solve(defect);
        for (int k = 0; k < n; ++k) v[k] += correction[k];
    }
    if (residual > tolerance) {
        throw SolverError("transverse solve residual above tolerance", residual);
    }
    for (int k = 0; k < n; ++k) px.values()[system.node(k)] = v[k] / q[k];
    return px;
}

double average_transverse(const Field& px, const Grid& grid, const CellGeometry& geometry) {
    return volume_average(px, grid, geometry);
}

namespace {

DetuningSample sample_at(const Scene& base, double detuning, const SerfSettings& serf,
                         const SolverOptions& options) {
    Scene scene = base;
    scene.detuning = detuning;
    const Solution sol = solve_steady(scene, options);
    const Field px = solve_transverse(sol, scene, serf);
    return {detuning, average_transverse(px, scene.grid, scene.geometry),
            average_polarization(sol, scene)};
}

}  // namespace

DetuningOptimum optimize_detuning(const Scene& base, std::span<const double> detunings,
                                  const SerfSettings& serf, const SolverOptions& options,
                                  int refine_steps) {
    if (detunings.empty()) throw std::invalid_argument("empty detuning grid");
    DetuningOptimum best;
    best.samples.reserve(detunings.size());
    for (const double d : detunings) best.samples.push_back(sample_at(base, d, serf, options));

    const auto& s = best.samples;
    const auto top = static_cast<std::size_t>(
        std::max_element(s.begin(), s.end(),
                         [](const auto& a, const auto& b) {
                             return a.transverse_average < b.transverse_average;
                         }) -
        s.begin());
    best.detuning = s[top].detuning;
    best.transverse_average = s[top].transverse_average;
    best.polarization_average = s[top].polarization_average;
    best.at_edge = s.size() > 1 && (top == 0 || top + 1 == s.size());
    if (best.at_edge || s.size() < 3 || refine_steps < 0) return best;

    // Golden-section refinement inside the bracket of the grid maximum.
    constexpr double kGolden = 0.6180339887498949;
    double lo = s[top - 1].detuning;
    double hi = s[top + 1].detuning;
    DetuningSample left = sample_at(base, hi - kGolden * (hi - lo), serf, options);
    DetuningSample right = sample_at(base, lo + kGolden * (hi - lo), serf, options);
    for (int it = 0; it < refine_steps; ++it) {
        if (left.transverse_average >= right.transverse_average) {
            hi = right.detuning;
            right = left;
            left = sample_at(base, hi - kGolden * (hi - lo), serf, options);
        } else {
            lo = left.detuning;
            left = right;
            right = sample_at(base, lo + kGolden * (hi - lo), serf, options);
        }
    }
    for (const auto& candidate : {left, right}) {
        if (candidate.transverse_average > best.transverse_average) {
            best.detuning = candidate.detuning;
            best.transverse_average = candidate.transverse_average;
            best.polarization_average = candidate.polarization_average;
        }
    }
    return best;
}

std::vector<double> resonance_grid(const MediumParams& medium, double lo, double hi, double fine,
                                   double coarse, double window) {
    if (!(hi > lo) || !(fine > 0.0) || !(coarse >= fine)) {
        throw std::invalid_argument("bad resonance grid");
    }
    const std::array<double, 4> centers{0.0, medium.delta_p, medium.delta_s,
                                        medium.delta_s + medium.delta_p};
    const auto near_line = [&](double x) {
        return std::any_of(centers.begin(), centers.end(),
                           [&](double c) { return std::abs(x - c) <= window; });
    };
    std::vector<double> grid{lo};
    while (grid.back() < hi) {
        const double x = grid.back();
        const double step = near_line(x) || near_line(x + coarse) ? fine : coarse;
        grid.push_back(std::min(hi, x + step));
    }
    return grid;
}

std::vector<double> serf_detuning_grid(const MediumParams& medium, double fine_fraction,
                                       double coarse_fraction, double reach) {
    const double core_lo = -3.0 * medium.delta_s;
    const double core_hi = 4.0 * medium.delta_s;
    std::vector<double> core =
        resonance_grid(medium, core_lo, core_hi, fine_fraction * medium.gamma_l,
                       coarse_fraction * medium.gamma_l, 2.0 * medium.gamma_l);
    // Geometric tails out to `reach` line widths beyond the core.
    const double tail = reach * medium.gamma_l;
    const double ratio = 1.25;
    std::vector<double> below;
    for (double step = coarse_fraction * medium.gamma_l, x = core_lo - step; x > core_lo - tail;
         step *= ratio, x -= step) {
        below.push_back(x);
    }
    std::vector<double> grid(below.rbegin(), below.rend());
    grid.insert(grid.end(), core.begin(), core.end());
    for (double step = coarse_fraction * medium.gamma_l, x = core_hi + step; x < core_hi + tail;
         step *= ratio, x += step) {
        grid.push_back(x);
    }
    return grid;
}

}  // namespace cellsim
