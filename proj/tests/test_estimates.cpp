#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "cellsim/estimates.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cellsim;

namespace {

// Smallest eigenvalue of -lap on the node grid with zero walls: the axial
// factor is the closed-form three-point value, the radial factor comes from
// a dense eigen-solve of the axis-regularized radial operator.
double discrete_dirichlet_eigenvalue(double length, double radius, int nz, int nr) {
    const double dz = length / (nz - 1);
    const double dr = radius / (nr - 1);
    const double axial = 4.0 / (dz * dz) * std::pow(std::sin(M_PI * dz / (2.0 * length)), 2);
    const int n = nr - 1;  // unknowns j = 0 .. nr-2
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    a(0, 0) = 4.0 / (dr * dr);
    if (n > 1) a(0, 1) = -4.0 / (dr * dr);
    for (int j = 1; j < n; ++j) {
        const double r = j * dr;
        a(j, j) = 2.0 / (dr * dr);
        a(j, j - 1) = -1.0 / (dr * dr) + 1.0 / (2.0 * r * dr);
        if (j + 1 < n) a(j, j + 1) = -1.0 / (dr * dr) - 1.0 / (2.0 * r * dr);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
    double radial = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) radial = std::min(radial, solver.eigenvalues()[k].real());
    return axial + radial;
}

}  // namespace

TEST_SUITE("estimates") {

TEST_CASE("depolarization length") {
    CHECK(depolarization_length(5.0, 1.0, 1.0, 4.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(depolarization_length(5.0, 1.0, 1.0, 1e12) < 1e-5);
    CHECK_THROWS_AS(depolarization_length(5.0, 1.0, 0.0, 0.0), std::invalid_argument);

    const MediumParams m = testing_support::medium_at(200.0);
    const double rate = 1234.0;
    CHECK(depolarization_length(kEstimateSlowDown, m.diffusion, m.gamma_rel, rate) ==
          doctest::Approx(std::sqrt(5.0 * m.diffusion / (m.gamma_rel + rate))).epsilon(1e-14));
}

TEST_CASE("absorption length") {
    const MediumParams m = testing_support::medium_at(200.0);
    CHECK(absorption_length(0.0, m) < absorption_length(0.5 * m.delta_s, m));
    CHECK(absorption_length(1e16, m) > 1e6);
    MediumParams denser = m;
    denser.g_absorb *= 3.0;
    CHECK(absorption_length(0.0, denser) == doctest::Approx(absorption_length(0.0, m) / 3.0));
    CHECK(absorption_length(0.0, m) == doctest::Approx(1.0 / (m.g_absorb * lineshape(0.0, m))));
}

TEST_CASE("ratio estimate examples and validity") {
    const RatioEstimate one = ratio_estimate(0.0, 1.0, 2.0, 1.0);
    CHECK(one.valid);
    CHECK(one.value == 1.0);
    const RatioEstimate zero = ratio_estimate(1.0, 1e9, 2.0, 1.0);
    CHECK(zero.valid);
    CHECK(zero.value == doctest::Approx(0.0).scale(1.0));
    const RatioEstimate mid = ratio_estimate(0.1, 1.0, 2.0, 1.0);
    CHECK(mid.valid);
    CHECK(mid.value == doctest::Approx(std::sqrt(0.9) * 0.9 * 0.81).epsilon(1e-14));
    CHECK(mid.value == doctest::Approx(0.6916).epsilon(1e-4));

    CHECK_FALSE(ratio_estimate(1.0, 0.5, 2.0, 1.0).valid);
    CHECK_FALSE(ratio_estimate(1.2, 10.0, 2.0, 1.0).valid);
    CHECK_FALSE(ratio_estimate(0.6, 10.0, 1.0, 1.0).valid);
    CHECK(std::isnan(ratio_estimate(1.0, 0.5, 2.0, 1.0).value));
}

TEST_CASE("wall rate") {
    CHECK(gamma_wall(6.0, 1.0, 2.0, 1.0) == doctest::Approx(49.50).epsilon(1e-3));
    CHECK(gamma_wall(6.0, 1.0, 8.0, 4.0) ==
          doctest::Approx(gamma_wall(6.0, 1.0, 2.0, 1.0) / 16.0).epsilon(1e-14));
}

TEST_CASE("wall rate matches the lowest discrete diffusion mode") {
    const MediumParams m = testing_support::medium_at(200.0);
    const double analytic = gamma_wall(kWallRateSlowDown, m.diffusion, 2.0, 1.0);
    const double numeric =
        kWallRateSlowDown * m.diffusion * discrete_dirichlet_eigenvalue(2.0, 1.0, 101, 51);
    CHECK(std::abs(numeric - analytic) / analytic < 0.02);
}

TEST_CASE("serf bound") {
    const double gamma = 100.0;
    const std::vector<BoundSample> flat{{{1.0, true}, gamma}, {{1.0, true}, gamma}};
    const SerfBound b = serf_bound(flat, 8.0, gamma);
    CHECK(b.valid);
    CHECK(b.r1 == doctest::Approx(8.0 / (4.0 * gamma)));
    CHECK(b.r2 == doctest::Approx(8.0 / (4.0 * gamma)));
    CHECK(b.value == doctest::Approx(8.0 / (4.0 * gamma)));

    CHECK(serf_bound(flat, 0.0, gamma).value == 0.0);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const std::vector<BoundSample> mixed{{{nan, false}, 1e6}, {{0.5, true}, 3.0 * gamma}};
    const SerfBound m = serf_bound(mixed, 8.0, gamma);
    CHECK(m.valid);
    CHECK(m.r1 == doctest::Approx(0.5 * 8.0 * 3.0 * gamma / (16.0 * gamma * gamma)));
    CHECK(m.r2 == doctest::Approx(0.5 * 8.0 / (8.0 * gamma)));
    CHECK(m.value == doctest::Approx(std::min(m.r1, m.r2)));

    const std::vector<BoundSample> none{{{nan, false}, gamma}};
    CHECK_FALSE(serf_bound(none, 8.0, gamma).valid);
}

TEST_CASE("slab profile") {
    const double L = 2.0, l = 0.2, R = 3.0, G = 1.0;
    CHECK(fz_profile(0.0, l, L, R, G) == doctest::Approx(0.0).scale(1.0));
    CHECK(fz_profile(L, l, L, R, G) == doctest::Approx(0.0).scale(1.0));
    for (double z : {0.05, 0.3, 0.77, 1.0}) {
        CHECK(fz_profile(z, l, L, R, G) == doctest::Approx(fz_profile(L - z, l, L, R, G)).epsilon(1e-14));
    }
    CHECK(fz_profile(1.0, 0.01, L, R, G) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK_THROWS_AS(fz_profile(1.0, 0.0, L, R, G), std::invalid_argument);
}

TEST_CASE("scene estimate uses the incident intensity") {
    const Scene s = testing_support::baseline(WallMode::Depolarizing, 21, 11);
    const SceneEstimate e = estimate_scene(s);
    const double rate = s.pump_coupling() * s.incident_intensity();
    CHECK(e.pump_rate == doctest::Approx(rate).epsilon(1e-14));
    CHECK(e.lambda_d == doctest::Approx(depolarization_length(5.0, s.medium.diffusion,
                                                              s.medium.gamma_rel, rate)));
    CHECK(e.lambda_l == doctest::Approx(absorption_length(s.detuning, s.medium)));
    CHECK(e.gamma_wall == doctest::Approx(gamma_wall(6.0, s.medium.diffusion, 2.0, 1.0)));
}

}  // TEST_SUITE
