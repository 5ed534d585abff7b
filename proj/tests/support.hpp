#pragma once

#include "cellsim/media.hpp"
#include "cellsim/solver.hpp"

namespace testing_support {

using namespace cellsim;

inline MediumParams medium_at(double pressure_torr, double temperature_c = 150.0) {
    return medium_from_conditions(units::celsius_to_kelvin(temperature_c), pressure_torr,
                                  ConstantsConfig::defaults());
}

// 150 C, L = 2R = 2 mm, resonant, full beam unless overridden.
inline Scene scene_at(double pressure_torr, double power_mw, double detuning_ghz, WallMode walls,
                      int nz = 101, int nr = 51, double beam_radius = 1.0) {
    Scene s;
    s.geometry.length = 2.0;
    s.geometry.radius = 1.0;
    s.geometry.beam_radius = beam_radius;
    s.medium = medium_at(pressure_torr);
    s.detuning = units::ghz_to_rad_per_s(detuning_ghz);
    s.power = power_mw;
    s.walls = walls;
    s.grid = Grid::make(s.geometry, nz, nr);
    return s;
}

inline Scene baseline(WallMode walls, int nz = 101, int nr = 51) {
    return scene_at(200.0, 0.5, 0.0, walls, nz, nr);
}

}  // namespace testing_support
