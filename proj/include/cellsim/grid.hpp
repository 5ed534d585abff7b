#pragma once

// Axisymmetric (z, r) node grid over a cylindrical cell, scalar fields on
// it, and the discrete operators shared by the solvers and the observables.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace cellsim {

/// Cylinder of length L and radius R, pumped by a beam of radius r_L <= R.
struct CellGeometry {
    double length = 2.0;       // mm
    double radius = 1.0;       // mm
    double beam_radius = 1.0;  // mm

    void validate() const;
    double volume() const;
};

/// Uniform node grid: node (i, j) sits at z = i dz, r = j dr.
struct Grid {
    int nz = 101;
    int nr = 51;
    double dz = 0.0;
    double dr = 0.0;

    static Grid make(const CellGeometry& geometry, int nz, int nr);

    double z(int i) const { return i * dz; }
    double r(int j) const { return j * dr; }
    std::size_t size() const { return static_cast<std::size_t>(nz) * nr; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * nr + j; }
    bool is_wall(int i, int j) const { return i == 0 || i == nz - 1 || j == nr - 1; }
};

/// Node values on a Grid, row-major in z.
class Field {
public:
    Field() = default;
    Field(int nz, int nr, double value = 0.0)
        : nz_(nz), nr_(nr), values_(static_cast<std::size_t>(nz) * nr, value) {}
    explicit Field(const Grid& grid, double value = 0.0) : Field(grid.nz, grid.nr, value) {}

    int nz() const { return nz_; }
    int nr() const { return nr_; }
    double& operator()(int i, int j) { return values_[static_cast<std::size_t>(i) * nr_ + j]; }
    double operator()(int i, int j) const {
        return values_[static_cast<std::size_t>(i) * nr_ + j];
    }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool operator==(const Field&) const = default;

private:
    int nz_ = 0;
    int nr_ = 0;
    std::vector<double> values_;
};

double max_abs_difference(const Field& a, const Field& b);

enum class WallMode { Depolarizing, Nondepolarizing };

std::string_view to_string(WallMode mode);
WallMode parse_wall_mode(std::string_view text);

/// Boundary condition per wall family: the two end discs and the side wall.
/// A scene uses the same mode on both; the split exists for slab problems.
struct WallConditions {
    WallMode discs = WallMode::Depolarizing;
    WallMode side = WallMode::Depolarizing;

    static WallConditions uniform(WallMode mode) { return {mode, mode}; }
};

/// Axisymmetric Laplacian d2/dz2 + (1/r) d/dr (r d/dr).
///
/// Interior nodes use the centered second-order stencil; axis nodes use the
/// regularized form 4 (f(dr) - f(0)) / dr^2 + d2f/dz2. Without `walls` the
/// wall rows are left at zero. With walls, Nondepolarizing faces are
/// evaluated with a mirrored ghost node (zero normal derivative) and
/// Depolarizing faces stay zero, as those nodes carry no equation.
Field cylindrical_laplacian(const Field& f, const Grid& grid, const CellGeometry& geometry,
                            std::optional<WallConditions> walls = std::nullopt);

/// Trapezoidal quadrature weight of node (i, j) for the volume integral
/// (2 pi r dr dz measure), in mm^3.
double volume_weight(const Grid& grid, int i, int j);

/// Trapezoidal weight of radial node j for a disc integral (2 pi r dr), mm^2.
double disc_weight(const Grid& grid, int j);

/// Volume integral over the cell divided by pi R^2 L.
double volume_average(const Field& f, const Grid& grid, const CellGeometry& geometry);

/// Outward flux of grad(u) through the three wall surfaces, using fourth-order
/// one-sided differences for the normal derivative. Needs 5x5 nodes.
double wall_flux_integral(const Field& u, const Grid& grid, const CellGeometry& geometry);

/// Impose the wall condition on a field. Depolarizing sets wall nodes to zero;
/// Nondepolarizing copies the adjacent interior node (diagonally at corners).
/// The axis is not a wall and is left untouched.
Field apply_boundary(Field f, WallMode mode);
Field apply_boundary(Field f, WallConditions walls);

/// CSV dump: header `z_mm,r_mm,value`, one row per node, row-major in z.
void write_field_csv(std::ostream& out, const Field& f, const Grid& grid);

/// Throws std::invalid_argument when the grid does not span the geometry.
void check_grid(const Grid& grid, const CellGeometry& geometry);

}  // namespace cellsim
