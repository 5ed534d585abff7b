#include <cmath>
#include <sstream>
#include <string>

#include "cellsim/grid.hpp"
#include "doctest.h"

using namespace cellsim;

namespace {

constexpr double kMu1 = 2.404825557695773;

struct Setup {
    CellGeometry geometry;
    Grid grid;
};

Setup make_setup(int nz, int nr, double length = 2.0, double radius = 1.0) {
    Setup s;
    s.geometry.length = length;
    s.geometry.radius = radius;
    s.geometry.beam_radius = radius;
    s.grid = Grid::make(s.geometry, nz, nr);
    return s;
}

template <class F>
Field sample(const Grid& g, F f) {
    Field out(g);
    for (int i = 0; i < g.nz; ++i)
        for (int j = 0; j < g.nr; ++j) out(i, j) = f(g.z(i), g.r(j));
    return out;
}

double mode_error(int nz, int nr) {
    const Setup s = make_setup(nz, nr);
    const double L = s.geometry.length, R = s.geometry.radius;
    const auto f = [&](double z, double r) {
        return std::sin(M_PI * z / L) * std::cyl_bessel_j(0.0, kMu1 * r / R);
    };
    const double k2 = std::pow(M_PI / L, 2) + std::pow(kMu1 / R, 2);
    const Field lap = cylindrical_laplacian(sample(s.grid, f), s.grid, s.geometry);
    double err = 0.0;
    for (int i = 1; i + 1 < nz; ++i)
        for (int j = 0; j + 1 < nr; ++j)
            err = std::max(err, std::abs(lap(i, j) + k2 * f(s.grid.z(i), s.grid.r(j))));
    return err;
}

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("laplacian is exact on low-order polynomials") {
    const Setup s = make_setup(21, 11);
    const auto check = [&](auto f, double expected) {
        const Field lap = cylindrical_laplacian(sample(s.grid, f), s.grid, s.geometry);
        for (int i = 1; i + 1 < s.grid.nz; ++i)
            for (int j = 0; j + 1 < s.grid.nr; ++j)
                REQUIRE(lap(i, j) == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
    };
    check([](double, double) { return 3.5; }, 0.0);
    check([](double z, double) { return z * z; }, 2.0);
    check([](double, double r) { return r * r; }, 4.0);
    check([](double z, double r) { return 1.0 + z - 2.0 * z * z + 0.5 * r * r; }, -2.0);
}

TEST_CASE("laplacian converges at second order on a smooth mode") {
    const double e1 = mode_error(21, 11);
    const double e2 = mode_error(41, 21);
    const double e3 = mode_error(81, 41);
    CHECK(std::log2(e1 / e2) >= 1.9);
    CHECK(std::log2(e2 / e3) >= 1.9);
}

TEST_CASE("laplacian wall rows follow the boundary conditions") {
    const Setup s = make_setup(11, 6);
    const Field f = sample(s.grid, [](double z, double r) { return 1.0 + z * z + r * r; });
    const Field plain = cylindrical_laplacian(f, s.grid, s.geometry);
    CHECK(plain(0, 2) == 0.0);
    CHECK(plain(3, 5) == 0.0);
    const Field de = cylindrical_laplacian(f, s.grid, s.geometry,
                                           WallConditions::uniform(WallMode::Depolarizing));
    CHECK(de(0, 2) == 0.0);
    CHECK(de(10, 5) == 0.0);
    // A constant satisfies the zero-gradient condition everywhere.
    const Field c(s.grid, 2.0);
    const Field nd = cylindrical_laplacian(c, s.grid, s.geometry,
                                           WallConditions::uniform(WallMode::Nondepolarizing));
    for (double v : nd.values()) CHECK(v == 0.0);
}

TEST_CASE("volume averages") {
    const Setup s = make_setup(41, 21);
    const double L = s.geometry.length, R = s.geometry.radius;
    CHECK(volume_average(Field(s.grid, 0.37), s.grid, s.geometry) ==
          doctest::Approx(0.37).epsilon(1e-13));
    CHECK(volume_average(sample(s.grid, [&](double z, double) { return z / L; }), s.grid,
                         s.geometry) == doctest::Approx(0.5).epsilon(1e-13));

    const auto radial_error = [&](int nr) {
        const Setup t = make_setup(5, nr);
        return std::abs(volume_average(sample(t.grid, [&](double, double r) { return r / R; }),
                                       t.grid, t.geometry) -
                        2.0 / 3.0);
    };
    CHECK(radial_error(81) < 1e-3);
    CHECK(std::log2(radial_error(21) / radial_error(41)) >= 1.9);
    CHECK(std::log2(radial_error(41) / radial_error(81)) >= 1.9);
}

TEST_CASE("wall flux integral") {
    const Setup s = make_setup(41, 21);
    const double L = s.geometry.length;
    CHECK(std::abs(wall_flux_integral(Field(s.grid, 1.3), s.grid, s.geometry)) < 1e-12);
    const Field u = sample(s.grid, [&](double z, double) { return z * (L - z); });
    CHECK(wall_flux_integral(u, s.grid, s.geometry) == doctest::Approx(-4.0 * M_PI).epsilon(1e-12));
    // Side wall only: u = r^2 gives 2R per unit area over 2 pi R L.
    const Field w = sample(s.grid, [](double, double r) { return r * r; });
    CHECK(wall_flux_integral(w, s.grid, s.geometry) ==
          doctest::Approx(2.0 * 2.0 * M_PI * L).epsilon(1e-12));
    const Setup tiny = make_setup(4, 4);
    CHECK_THROWS_AS(wall_flux_integral(Field(tiny.grid), tiny.grid, tiny.geometry),
                    std::invalid_argument);
}

TEST_CASE("apply_boundary") {
    const Setup s = make_setup(7, 5);
    const Field c(s.grid, 0.8);
    CHECK(apply_boundary(c, WallMode::Nondepolarizing) == c);

    const Field de = apply_boundary(c, WallMode::Depolarizing);
    for (int i = 0; i < s.grid.nz; ++i) {
        for (int j = 0; j < s.grid.nr; ++j) {
            CHECK(de(i, j) == (s.grid.is_wall(i, j) ? 0.0 : 0.8));
        }
    }

    const Field f = sample(s.grid, [](double z, double r) { return std::cos(3.0 * z) + r * r * r; });
    const Field nd = apply_boundary(f, WallMode::Nondepolarizing);
    CHECK(nd(0, 2) == f(1, 2));
    CHECK(nd(6, 0) == f(5, 0));
    CHECK(nd(3, 4) == f(3, 3));
    CHECK(nd(0, 4) == f(1, 3));
    CHECK(nd(3, 0) == f(3, 0));  // axis untouched
    for (WallMode m : {WallMode::Depolarizing, WallMode::Nondepolarizing}) {
        const Field once = apply_boundary(f, m);
        CHECK(apply_boundary(once, m) == once);
    }
}

TEST_CASE("field csv layout") {
    const Setup s = make_setup(3, 3);
    Field f(s.grid);
    f(1, 2) = 0.125;
    f(2, 0) = 1.0 / 3.0;
    std::ostringstream out;
    write_field_csv(out, f, s.grid);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "z_mm,r_mm,value");
    int rows = 0;
    std::string last;
    while (std::getline(in, line)) {
        ++rows;
        if (rows == 6) CHECK(line == "1,1,0.125");
        last = line;
    }
    CHECK(rows == 9);
    CHECK(last == "2,1,0");
    CHECK(out.str().find("2,0,0.333333333\n") != std::string::npos);
}

TEST_CASE("geometry and grid validation") {
    CellGeometry g;
    g.length = -1.0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = {};
    g.radius = 0.0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = {};
    g.beam_radius = 1.5;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = {};
    CHECK_THROWS_AS(Grid::make(g, 2, 10), std::invalid_argument);
    Grid grid = Grid::make(g, 11, 6);
    CellGeometry other = g;
    other.length = 3.0;
    CHECK_THROWS_AS(check_grid(grid, other), std::invalid_argument);
    CHECK(parse_wall_mode("depolarizing") == WallMode::Depolarizing);
    CHECK(parse_wall_mode("nondepolarizing") == WallMode::Nondepolarizing);
    CHECK_THROWS_AS(parse_wall_mode("sticky"), std::invalid_argument);
}

}  // TEST_SUITE
