#pragma once

// Physical constants, unit conversions and the medium-dependent scalar
// functions (lineshape, slow-down factor, collision rates) that parameterize
// the spin-diffusion and light-propagation equations.
//
// Unit discipline used throughout the library:
//   length        mm
//   intensity     mW/mm^2, power mW
//   rates         1/s
//   detunings     rad/s internally, GHz (cyclic) at the user boundary

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cellsim {

namespace constants {
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double boltzmann = 1.380649e-23;        // J/K
inline constexpr double planck = 6.62607015e-34;         // J s
inline constexpr double speed_of_light = 2.99792458e8;   // m/s
inline constexpr double classical_electron_radius = 2.8179403262e-15;  // m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;          // kg
inline constexpr double torr_to_pascal = 133.322368421;
inline constexpr double amagat_pressure_torr = 760.0;
inline constexpr double amagat_temperature_k = 273.15;
inline constexpr double zero_celsius_k = 273.15;
}  // namespace constants

namespace units {
inline constexpr double ghz_to_rad_per_s(double ghz) { return constants::two_pi * 1e9 * ghz; }
inline constexpr double rad_per_s_to_ghz(double w) { return w / (constants::two_pi * 1e9); }
inline constexpr double celsius_to_kelvin(double c) { return c + constants::zero_celsius_k; }
}  // namespace units

/// Every coefficient that turns (temperature, N2 pressure) into medium rates.
///
/// The defaults are literature values for 87Rb in N2; see `defaults()` and the
/// table printed by `dump()`. The constants file is a plain `key = value`
/// document using the key names returned by `dump()`; units are part of the
/// key name.
struct ConstantsConfig {
    // Alkali-N2 diffusion: D = D_ref (p_ref/p) (T/T_ref)^exponent
    double diffusion_ref_mm2_per_s = 0.0;
    double diffusion_ref_pressure_torr = 0.0;
    double diffusion_ref_temperature_K = 0.0;
    double diffusion_temperature_exponent = 0.0;

    // Lorentzian half-width per amagat of N2
    double broadening_hwhm_GHz_per_amagat = 0.0;

    // Spin-destruction cross-sections (rate = n sigma v_rel)
    double sd_cross_section_alkali_alkali_cm2 = 0.0;
    double sd_cross_section_alkali_n2_cm2 = 0.0;
    double alkali_mass_amu = 0.0;
    double buffer_mass_amu = 0.0;

    // Saturated vapor pressure: log10(P/torr) = A - B/T + C T - D log10(T)
    double vapor_pressure_A = 0.0;
    double vapor_pressure_B_K = 0.0;
    double vapor_pressure_C_per_K = 0.0;
    double vapor_pressure_D = 0.0;

    double d1_wavelength_nm = 0.0;
    double oscillator_strength = 0.0;
    double ground_hyperfine_GHz = 0.0;
    double excited_hyperfine_GHz = 0.0;
    double electron_gyromagnetic_rad_per_s_per_T = 0.0;

    /// The documented defaults table.
    static ConstantsConfig defaults();

    /// Parse a constants document. Keys absent from the document keep their
    /// default value; unknown keys and malformed lines are errors.
    static ConstantsConfig parse(std::istream& in);
    static ConstantsConfig load(const std::string& path);

    /// Effective table in the same format `parse` accepts.
    std::string dump() const;

    /// FNV-1a hash of `dump()`, stable across platforms.
    std::uint64_t hash() const;
};

/// All medium-dependent rates and couplings at one (temperature, pressure).
struct MediumParams {
    double temperature_k = 0.0;
    double n2_pressure_torr = 0.0;
    double diffusion = 0.0;         // mm^2/s
    double gamma_rel = 0.0;         // 1/s
    double gamma_l = 0.0;           // rad/s, Lorentzian HWHM
    double delta_s = 0.0;           // rad/s
    double delta_p = 0.0;           // rad/s
    double alkali_density = 0.0;    // 1/mm^3
    double g_pump = 0.0;            // R_op = g_pump * lineshape * I
    double g_absorb = 0.0;          // 1/mm per unit lineshape
    double gamma_e = 0.0;           // rad/(s T)

    /// Throws std::invalid_argument unless every rate is finite and positive.
    void validate() const;
};

MediumParams medium_from_conditions(double temperature_k, double n2_pressure_torr,
                                    const ConstantsConfig& constants);

/// D1 lineshape: four pressure-broadened Lorentzians, unit area over detuning
/// in rad/s. Returns s/rad.
double lineshape(double detuning, const MediumParams& medium);

/// Analytic derivative of `lineshape` with respect to detuning.
double lineshape_derivative(double detuning, const MediumParams& medium);

/// Detunings in [lo, hi] where the lineshape derivative vanishes, located by a
/// sign-change scan with spacing `step` followed by bisection.
std::vector<double> lineshape_stationary_points(const MediumParams& medium, double lo,
                                                double hi, double step);

/// Slow-down factor q(P) = (6 + 2P^2)/(1 + P^2) for 87Rb. Requires P in [0,1].
double slow_down(double polarization);

/// u = q(P) P, twice the total longitudinal spin. Requires P in [0,1].
double longitudinal_spin(double polarization);

/// du/dP, strictly positive on [0,1].
double longitudinal_spin_slope(double polarization);

/// Inverse of `longitudinal_spin`. Requires u in [0,4].
double invert_longitudinal_spin(double spin);

}  // namespace cellsim
