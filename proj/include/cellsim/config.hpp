#pragma once

// Run configuration for the command-line harness.
//
// Plain-text `key = value` lines, `#` starts a comment. List-valued keys take
// a scalar, a bracketed list `[a, b, c]`, a range `start:step:stop`
// (inclusive, tolerant to rounding), or a bracketed mix of these.

#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "cellsim/media.hpp"
#include "cellsim/solver.hpp"

namespace cellsim {

struct RunConfig {
    std::string constants_path;  // empty: built-in defaults
    ConstantsConfig constants = ConstantsConfig::defaults();

    double length_mm = 2.0;
    double radius_mm = 1.0;
    double temperature_c = 150.0;

    std::vector<double> detunings_ghz{0.0};
    std::vector<double> powers_mw{0.5};
    std::vector<double> pressures_torr{200.0};
    std::vector<double> beam_radii_mm;  // empty: the cell radius
    std::vector<WallMode> walls{WallMode::Depolarizing, WallMode::Nondepolarizing};

    int nz = 101;
    int nr = 51;
    SolverOptions solver;

    double field_t = 1e-12;        // SERF test field
    bool optimize = false;         // serf: optimize the detuning per group
    bool auto_detunings = false;   // serf: use the built-in resonance grid
    double serf_fine = 0.1;        // Gamma_L fractions
    double serf_coarse = 0.5;
    double serf_reach = 60.0;      // Gamma_L
    int refine_steps = 8;

    std::string output_dir = "out";

    /// Effective beam radii (the cell radius when none were configured).
    std::vector<double> beam_radii() const;

    /// Throws std::invalid_argument naming the offending key.
    void validate() const;

    /// Normalized `key = value` lines of every setting, in a fixed order.
    std::vector<std::pair<std::string, std::string>> echo() const;

    /// Parses a config; relative constants paths resolve against `base_dir`.
    /// Throws std::invalid_argument with the line number on any error.
    static RunConfig parse(std::istream& in, const std::string& base_dir = "");
    static RunConfig load(const std::string& path);
};

/// Parses a list value (scalar, `[..]`, `a:step:b`). Throws on bad syntax.
std::vector<double> parse_number_list(const std::string& text);

/// Parses `NZxNR`.
std::pair<int, int> parse_grid_size(const std::string& text);

/// `both` expands to depolarizing then nondepolarizing.
std::vector<WallMode> parse_wall_selection(const std::string& text);

/// printf("%.9g"), with "nan"/"inf" spelled portably.
std::string format_number(double value);

}  // namespace cellsim
