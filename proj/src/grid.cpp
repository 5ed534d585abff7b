#include "cellsim/grid.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cellsim/media.hpp"

namespace cellsim {

void CellGeometry::validate() const {
    if (!(length > 0.0 && std::isfinite(length))) {
        throw std::invalid_argument("cell length must be positive");
    }
    if (!(radius > 0.0 && std::isfinite(radius))) {
        throw std::invalid_argument("cell radius must be positive");
    }
    if (!(beam_radius > 0.0 && beam_radius <= radius)) {
        throw std::invalid_argument("beam radius must lie in (0, R]");
    }
}

double CellGeometry::volume() const { return constants::pi * radius * radius * length; }

Grid Grid::make(const CellGeometry& geometry, int nz, int nr) {
    geometry.validate();
    if (nz < 3 || nr < 3) throw std::invalid_argument("grid needs at least 3x3 nodes");
    Grid g;
    g.nz = nz;
    g.nr = nr;
    g.dz = geometry.length / (nz - 1);
    g.dr = geometry.radius / (nr - 1);
    return g;
}

void check_grid(const Grid& grid, const CellGeometry& geometry) {
    const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::abs(b); };
    if (grid.nz < 3 || grid.nr < 3 || !close(grid.dz * (grid.nz - 1), geometry.length) ||
        !close(grid.dr * (grid.nr - 1), geometry.radius)) {
        throw std::invalid_argument("grid does not match cell geometry");
    }
}

double max_abs_difference(const Field& a, const Field& b) {
    if (a.nz() != b.nz() || a.nr() != b.nr()) throw std::invalid_argument("field shape mismatch");
    double m = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k) {
        m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
    }
    return m;
}

std::string_view to_string(WallMode mode) {
    return mode == WallMode::Depolarizing ? "depolarizing" : "nondepolarizing";
}

WallMode parse_wall_mode(std::string_view text) {
    if (text == "depolarizing" || text == "De") return WallMode::Depolarizing;
    if (text == "nondepolarizing" || text == "NonDe") return WallMode::Nondepolarizing;
    throw std::invalid_argument("unknown wall mode: " + std::string(text));
}

namespace {

bool on_dirichlet_wall(const Grid& g, WallConditions walls, int i, int j) {
    const bool disc = i == 0 || i == g.nz - 1;
    const bool side = j == g.nr - 1;
    return (disc && walls.discs == WallMode::Depolarizing) ||
           (side && walls.side == WallMode::Depolarizing);
}

}  // namespace

Field cylindrical_laplacian(const Field& f, const Grid& g, const CellGeometry& geometry,
                            std::optional<WallConditions> walls) {
    check_grid(g, geometry);
    if (f.nz() != g.nz || f.nr() != g.nr) throw std::invalid_argument("field/grid mismatch");
    Field out(g);
    const double idz2 = 1.0 / (g.dz * g.dz);
    const double idr2 = 1.0 / (g.dr * g.dr);
    for (int i = 0; i < g.nz; ++i) {
        for (int j = 0; j < g.nr; ++j) {
            if (g.is_wall(i, j)) {
                if (!walls || on_dirichlet_wall(g, *walls, i, j)) continue;
            }
            // Mirrored ghosts on Neumann faces.
            const double up = i + 1 < g.nz ? f(i + 1, j) : f(i - 1, j);
            const double down = i > 0 ? f(i - 1, j) : f(i + 1, j);
            const double zz = (up - 2.0 * f(i, j) + down) * idz2;
            double rr = 0.0;
            if (j == 0) {
                rr = 4.0 * (f(i, 1) - f(i, 0)) * idr2;
            } else {
                const double outer = j + 1 < g.nr ? f(i, j + 1) : f(i, j - 1);
                const double inner = f(i, j - 1);
                rr = (outer - 2.0 * f(i, j) + inner) * idr2 +
                     (outer - inner) / (2.0 * g.r(j) * g.dr);
            }
            out(i, j) = zz + rr;
        }
    }
    return out;
}

double disc_weight(const Grid& g, int j) {
    const double w = constants::two_pi * g.r(j) * g.dr;
    return j == g.nr - 1 ? 0.5 * w : w;
}

namespace {
double axial_weight(const Grid& g, int i) {
    return (i == 0 || i == g.nz - 1) ? 0.5 * g.dz : g.dz;
}
}  // namespace

double volume_weight(const Grid& g, int i, int j) { return axial_weight(g, i) * disc_weight(g, j); }

double volume_average(const Field& f, const Grid& g, const CellGeometry& geometry) {
    check_grid(g, geometry);
    double sum = 0.0;
    for (int i = 0; i < g.nz; ++i) {
        for (int j = 1; j < g.nr; ++j) sum += volume_weight(g, i, j) * f(i, j);
    }
    return sum / geometry.volume();
}

double wall_flux_integral(const Field& u, const Grid& g, const CellGeometry& geometry) {
    check_grid(g, geometry);
    if (g.nz < 5 || g.nr < 5) throw std::invalid_argument("wall flux needs at least 5x5 nodes");
    const int zl = g.nz - 1;
    const int rl = g.nr - 1;
    // Fourth-order one-sided outward derivative from the wall node inwards.
    const auto outward = [](double f0, double f1, double f2, double f3, double f4, double h) {
        return (25.0 * f0 - 48.0 * f1 + 36.0 * f2 - 16.0 * f3 + 3.0 * f4) / (12.0 * h);
    };
    double flux = 0.0;
    for (int j = 1; j < g.nr; ++j) {
        const double inlet = outward(u(0, j), u(1, j), u(2, j), u(3, j), u(4, j), g.dz);
        const double outlet = outward(u(zl, j), u(zl - 1, j), u(zl - 2, j), u(zl - 3, j), u(zl - 4, j), g.dz);
        flux += disc_weight(g, j) * (inlet + outlet);
    }
    const double side_area_per_length = constants::two_pi * geometry.radius;
    for (int i = 0; i < g.nz; ++i) {
        const double normal = outward(u(i, rl), u(i, rl - 1), u(i, rl - 2), u(i, rl - 3), u(i, rl - 4), g.dr);
        flux += axial_weight(g, i) * side_area_per_length * normal;
    }
    return flux;
}

Field apply_boundary(Field f, WallConditions walls) {
    const int nz = f.nz();
    const int nr = f.nr();
    if (nz < 3 || nr < 3) throw std::invalid_argument("field needs at least 3x3 nodes");
    const int zl = nz - 1;
    const int rl = nr - 1;
    // Copies first so that Dirichlet zeros win at shared corners.
    if (walls.discs == WallMode::Nondepolarizing) {
        for (int j = 0; j < rl; ++j) {
            f(0, j) = f(1, j);
            f(zl, j) = f(zl - 1, j);
        }
    }
    if (walls.side == WallMode::Nondepolarizing) {
        for (int i = 1; i < zl; ++i) f(i, rl) = f(i, rl - 1);
    }
    if (walls.discs == WallMode::Nondepolarizing && walls.side == WallMode::Nondepolarizing) {
        f(0, rl) = f(1, rl - 1);
        f(zl, rl) = f(zl - 1, rl - 1);
    }
    if (walls.discs == WallMode::Depolarizing) {
        for (int j = 0; j < nr; ++j) {
            f(0, j) = 0.0;
            f(zl, j) = 0.0;
        }
    }
    if (walls.side == WallMode::Depolarizing) {
        for (int i = 0; i < nz; ++i) f(i, rl) = 0.0;
    }
    return f;
}

Field apply_boundary(Field f, WallMode mode) {
    return apply_boundary(std::move(f), WallConditions::uniform(mode));
}

void write_field_csv(std::ostream& out, const Field& f, const Grid& g) {
    out << "z_mm,r_mm,value\n";
    char buf[96];
    for (int i = 0; i < g.nz; ++i) {
        for (int j = 0; j < g.nr; ++j) {
            std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", g.z(i), g.r(j), f(i, j));
            out << buf;
        }
    }
}

}  // namespace cellsim
