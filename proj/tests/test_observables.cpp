#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cellsim/observables.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cellsim;
using testing_support::baseline;
using testing_support::scene_at;

namespace {

Solution fabricated(const Scene& s, double p, WallMode walls) {
    Solution sol;
    sol.polarization = apply_boundary(Field(s.grid, p), walls);
    sol.intensity = march_light(sol.polarization, s);
    sol.converged = true;
    return sol;
}

// Power through the first and last planes from a dumped intensity CSV, by
// trapezoid integration of 2 pi r I(r) over the listed radii.
double transmission_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::map<double, std::vector<std::pair<double, double>>> planes;
    while (std::getline(in, line)) {
        double z = 0, r = 0, v = 0;
        char c1 = 0, c2 = 0;
        std::istringstream row(line);
        row >> z >> c1 >> r >> c2 >> v;
        planes[z].emplace_back(r, v);
    }
    const auto power = [](const std::vector<std::pair<double, double>>& rows) {
        double sum = 0.0;
        for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
            const auto [r0, i0] = rows[k];
            const auto [r1, i1] = rows[k + 1];
            sum += 0.5 * (r1 - r0) * (2.0 * M_PI) * (r0 * i0 + r1 * i1);
        }
        return sum;
    };
    return power(planes.rbegin()->second) / power(planes.begin()->second);
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("transmission limits") {
    const Scene s = baseline(WallMode::Depolarizing, 41, 21);
    CHECK(transmission(fabricated(s, 1.0, WallMode::Nondepolarizing), s) ==
          doctest::Approx(1.0).epsilon(1e-14));
    const double beer = std::exp(-s.absorption_coefficient() * s.geometry.length);
    CHECK(transmission(fabricated(s, 0.0, WallMode::Depolarizing), s) ==
          doctest::Approx(beer).epsilon(1e-12));
    CHECK(incident_power(fabricated(s, 0.0, WallMode::Depolarizing), s) ==
          doctest::Approx(s.power).epsilon(1e-12));
}

TEST_CASE("average of a constant polarization") {
    const Scene s = baseline(WallMode::Nondepolarizing, 41, 21);
    CHECK(average_polarization(fabricated(s, 0.42, WallMode::Nondepolarizing), s) ==
          doctest::Approx(0.42).epsilon(1e-13));
}

TEST_CASE("nondepolarizing baseline transfers all absorbed light") {
    const Scene s = baseline(WallMode::Nondepolarizing);
    const Solution sol = solve_steady(s);
    const Observables o = evaluate(sol, s);
    CHECK(o.average_polarization >= 0.9);
    CHECK(std::abs(o.wall_loss) < 1e-3 * (1.0 - o.transmission));
    CHECK(std::abs(o.balance_residual) < 1e-3);
}

TEST_CASE("depolarizing baseline loses light to the walls") {
    const Scene de = baseline(WallMode::Depolarizing);
    const Scene nd = baseline(WallMode::Nondepolarizing);
    const Solution a = solve_steady(de);
    const Solution b = solve_steady(nd);
    const Observables o = evaluate(a, de);
    CHECK(o.wall_loss > 0.1);
    CHECK(o.average_polarization / average_polarization(b, nd) < 1.0);
    // Wall flux of the spin is inward.
    Field spin(de.grid);
    for (std::size_t k = 0; k < spin.values().size(); ++k)
        spin.values()[k] = longitudinal_spin(a.polarization.values()[k]);
    CHECK(wall_flux_integral(spin, de.grid, de.geometry) < 0.0);
}

TEST_CASE("wall loss vanishes far from resonance") {
    const Scene near = baseline(WallMode::Depolarizing);
    const Scene far = scene_at(200.0, 0.5, 150.0, WallMode::Depolarizing);
    const double eta_near = wall_loss(solve_steady(near), near);
    const double eta_far = wall_loss(solve_steady(far), far);
    CHECK(eta_far >= 0.0);
    CHECK(eta_far < 0.05 * eta_near);
}

TEST_CASE("balance residual flags a non-solution") {
    const Scene s = baseline(WallMode::Depolarizing);
    CHECK(std::abs(balance_residual(fabricated(s, 0.5, WallMode::Depolarizing), s)) > 0.05);
}

TEST_CASE("transmission agrees with an independent quadrature of the dump") {
    const Scene s = baseline(WallMode::Depolarizing);
    const Solution sol = solve_steady(s);
    std::ostringstream out;
    write_field_csv(out, sol.intensity, s.grid);
    CHECK(transmission_from_csv(out.str()) ==
          doctest::Approx(transmission(sol, s)).epsilon(1e-6));
}

}  // TEST_SUITE
