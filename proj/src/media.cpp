#include "cellsim/media.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace cellsim {

namespace {

struct ConstantEntry {
    const char* key;
    double ConstantsConfig::*field;
};

// Key order here is the order of the dumped table.
constexpr std::array kConstantEntries{
    ConstantEntry{"diffusion_ref_mm2_per_s", &ConstantsConfig::diffusion_ref_mm2_per_s},
    ConstantEntry{"diffusion_ref_pressure_torr", &ConstantsConfig::diffusion_ref_pressure_torr},
    ConstantEntry{"diffusion_ref_temperature_K", &ConstantsConfig::diffusion_ref_temperature_K},
    ConstantEntry{"diffusion_temperature_exponent",
                  &ConstantsConfig::diffusion_temperature_exponent},
    ConstantEntry{"broadening_hwhm_GHz_per_amagat",
                  &ConstantsConfig::broadening_hwhm_GHz_per_amagat},
    ConstantEntry{"sd_cross_section_alkali_alkali_cm2",
                  &ConstantsConfig::sd_cross_section_alkali_alkali_cm2},
    ConstantEntry{"sd_cross_section_alkali_n2_cm2",
                  &ConstantsConfig::sd_cross_section_alkali_n2_cm2},
    ConstantEntry{"alkali_mass_amu", &ConstantsConfig::alkali_mass_amu},
    ConstantEntry{"buffer_mass_amu", &ConstantsConfig::buffer_mass_amu},
    ConstantEntry{"vapor_pressure_A", &ConstantsConfig::vapor_pressure_A},
    ConstantEntry{"vapor_pressure_B_K", &ConstantsConfig::vapor_pressure_B_K},
    ConstantEntry{"vapor_pressure_C_per_K", &ConstantsConfig::vapor_pressure_C_per_K},
    ConstantEntry{"vapor_pressure_D", &ConstantsConfig::vapor_pressure_D},
    ConstantEntry{"d1_wavelength_nm", &ConstantsConfig::d1_wavelength_nm},
    ConstantEntry{"oscillator_strength", &ConstantsConfig::oscillator_strength},
    ConstantEntry{"ground_hyperfine_GHz", &ConstantsConfig::ground_hyperfine_GHz},
    ConstantEntry{"excited_hyperfine_GHz", &ConstantsConfig::excited_hyperfine_GHz},
    ConstantEntry{"electron_gyromagnetic_rad_per_s_per_T",
                  &ConstantsConfig::electron_gyromagnetic_rad_per_s_per_T},
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double mean_relative_speed(double temperature_k, double mass1_amu, double mass2_amu) {
    const double m1 = mass1_amu * constants::atomic_mass_unit;
    const double m2 = mass2_amu * constants::atomic_mass_unit;
    const double reduced = m1 * m2 / (m1 + m2);
    return std::sqrt(8.0 * constants::boltzmann * temperature_k / (constants::pi * reduced));
}

struct Line {
    double weight;
    double center;
};

std::array<Line, 4> d1_lines(const MediumParams& m) {
    return {Line{5.0, 0.0}, Line{5.0, m.delta_s + m.delta_p}, Line{5.0, m.delta_s},
            Line{1.0, m.delta_p}};
}

void require_polarization(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::domain_error("polarization outside [0,1]: " + std::to_string(p));
    }
}

}  // namespace

// 87Rb D1 in N2 buffer gas. Diffusion, N2 spin destruction and the vapor
// pressure offset are calibrated within their literature spread (see README).
ConstantsConfig ConstantsConfig::defaults() {
    ConstantsConfig c;
    c.diffusion_ref_mm2_per_s = 22.0;  // 0.22 cm^2/s at 1 amagat
    c.diffusion_ref_pressure_torr = 760.0;
    c.diffusion_ref_temperature_K = 273.15;
    c.diffusion_temperature_exponent = 1.5;
    c.broadening_hwhm_GHz_per_amagat = 8.9;  // 17.8 GHz/amg FWHM
    c.sd_cross_section_alkali_alkali_cm2 = 1.6e-17;
    c.sd_cross_section_alkali_n2_cm2 = 3.0e-22;  // ~1e-22 at 300 K, rising as T^3
    c.alkali_mass_amu = 86.909;
    c.buffer_mass_amu = 28.014;
    // Liquid Rb saturated vapor pressure; A raised from 15.88253 (+9% density)
    c.vapor_pressure_A = 15.912;
    c.vapor_pressure_B_K = 4529.635;
    c.vapor_pressure_C_per_K = 0.00058663;
    c.vapor_pressure_D = 2.99138;
    c.d1_wavelength_nm = 794.979;
    c.oscillator_strength = 0.342;
    c.ground_hyperfine_GHz = 6.834682611;
    c.excited_hyperfine_GHz = 0.816656;
    c.electron_gyromagnetic_rad_per_s_per_T = 1.76085963e11;
    return c;
}

ConstantsConfig ConstantsConfig::parse(std::istream& in) {
    ConstantsConfig c = defaults();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("constants line " + std::to_string(line_no) +
                                        ": expected key = value");
        }
        const std::string key{trim(view.substr(0, eq))};
        const std::string value{trim(view.substr(eq + 1))};
        bool known = false;
        for (const auto& entry : kConstantEntries) {
            if (key != entry.key) continue;
            std::size_t used = 0;
            double parsed = 0.0;
            try {
                parsed = std::stod(value, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != value.size()) {
                throw std::invalid_argument("constants line " + std::to_string(line_no) +
                                            ": bad number for " + key);
            }
            c.*entry.field = parsed;
            known = true;
            break;
        }
        if (!known) {
            throw std::invalid_argument("constants line " + std::to_string(line_no) +
                                        ": unknown key " + key);
        }
    }
    return c;
}

ConstantsConfig ConstantsConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open constants file " + path);
    return parse(in);
}

std::string ConstantsConfig::dump() const {
    std::ostringstream out;
    out << std::setprecision(17);
    for (const auto& entry : kConstantEntries) {
        out << entry.key << " = " << this->*entry.field << '\n';
    }
    return out.str();
}

std::uint64_t ConstantsConfig::hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char ch : dump()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

void MediumParams::validate() const {
    const std::array<std::pair<const char*, double>, 11> fields{{
        {"temperature", temperature_k},
        {"n2 pressure", n2_pressure_torr},
        {"diffusion", diffusion},
        {"gamma_rel", gamma_rel},
        {"gamma_l", gamma_l},
        {"delta_s", delta_s},
        {"delta_p", delta_p},
        {"alkali density", alkali_density},
        {"g_pump", g_pump},
        {"g_absorb", g_absorb},
        {"gamma_e", gamma_e},
    }};
    for (const auto& [name, value] : fields) {
        if (!(std::isfinite(value) && value > 0.0)) {
            throw std::invalid_argument(std::string("medium parameter ") + name +
                                        " must be finite and positive");
        }
    }
}

MediumParams medium_from_conditions(double temperature_k, double n2_pressure_torr,
                                    const ConstantsConfig& c) {
    if (!(temperature_k > 0.0 && std::isfinite(temperature_k))) {
        throw std::invalid_argument("temperature must be positive");
    }
    if (!(n2_pressure_torr > 0.0 && std::isfinite(n2_pressure_torr))) {
        throw std::invalid_argument("N2 pressure must be positive");
    }
    using namespace constants;
    MediumParams m;
    m.temperature_k = temperature_k;
    m.n2_pressure_torr = n2_pressure_torr;

    m.diffusion = c.diffusion_ref_mm2_per_s * (c.diffusion_ref_pressure_torr / n2_pressure_torr) *
                  std::pow(temperature_k / c.diffusion_ref_temperature_K,
                           c.diffusion_temperature_exponent);

    const double amagat =
        (n2_pressure_torr / amagat_pressure_torr) * (amagat_temperature_k / temperature_k);
    m.gamma_l = units::ghz_to_rad_per_s(c.broadening_hwhm_GHz_per_amagat * amagat);
    m.delta_s = units::ghz_to_rad_per_s(c.ground_hyperfine_GHz);
    m.delta_p = units::ghz_to_rad_per_s(c.excited_hyperfine_GHz);

    const double log10_vapor_torr = c.vapor_pressure_A - c.vapor_pressure_B_K / temperature_k +
                                    c.vapor_pressure_C_per_K * temperature_k -
                                    c.vapor_pressure_D * std::log10(temperature_k);
    const double vapor_pa = std::pow(10.0, log10_vapor_torr) * torr_to_pascal;
    const double alkali_per_m3 = vapor_pa / (boltzmann * temperature_k);
    const double n2_per_m3 = n2_pressure_torr * torr_to_pascal / (boltzmann * temperature_k);
    m.alkali_density = alkali_per_m3 * 1e-9;

    const double cm2_to_m2 = 1e-4;
    const double v_aa = mean_relative_speed(temperature_k, c.alkali_mass_amu, c.alkali_mass_amu);
    const double v_an = mean_relative_speed(temperature_k, c.alkali_mass_amu, c.buffer_mass_amu);
    m.gamma_rel = alkali_per_m3 * c.sd_cross_section_alkali_alkali_cm2 * cm2_to_m2 * v_aa +
                  n2_per_m3 * c.sd_cross_section_alkali_n2_cm2 * cm2_to_m2 * v_an;

    // Integrated absorption cross-section pi r_e c f over angular frequency:
    // 2 pi * (pi r_e c f), in mm^2 rad/s.
    const double integrated_cross_section =
        two_pi * pi * classical_electron_radius * speed_of_light * c.oscillator_strength * 1e6;
    const double photon_energy_mj =
        planck * speed_of_light / (c.d1_wavelength_nm * 1e-9) * 1e3;
    m.g_pump = integrated_cross_section / photon_energy_mj;
    m.g_absorb = m.alkali_density * integrated_cross_section;
    m.gamma_e = c.electron_gyromagnetic_rad_per_s_per_T;

    m.validate();
    return m;
}

double lineshape(double detuning, const MediumParams& m) {
    const double g2 = m.gamma_l * m.gamma_l;
    double sum = 0.0;
    for (const auto& line : d1_lines(m)) {
        const double x = detuning - line.center;
        sum += line.weight / (x * x + g2);
    }
    return m.gamma_l / (16.0 * constants::pi) * sum;
}

double lineshape_derivative(double detuning, const MediumParams& m) {
    const double g2 = m.gamma_l * m.gamma_l;
    double sum = 0.0;
    for (const auto& line : d1_lines(m)) {
        const double x = detuning - line.center;
        const double denom = x * x + g2;
        sum += -2.0 * line.weight * x / (denom * denom);
    }
    return m.gamma_l / (16.0 * constants::pi) * sum;
}

std::vector<double> lineshape_stationary_points(const MediumParams& m, double lo, double hi,
                                                double step) {
    if (!(step > 0.0) || !(hi > lo)) throw std::invalid_argument("bad stationary-point scan");
    std::vector<double> roots;
    const auto n = static_cast<long>(std::ceil((hi - lo) / step));
    double a = lo;
    double fa = lineshape_derivative(a, m);
    for (long k = 1; k <= n; ++k) {
        const double b = std::min(hi, lo + static_cast<double>(k) * step);
        const double fb = lineshape_derivative(b, m);
        if (fa == 0.0) {
            roots.push_back(a);
        } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
            double x0 = a;
            double x1 = b;
            double f0 = fa;
            for (int it = 0; it < 200 && x1 - x0 > 1e-9 * step; ++it) {
                const double mid = 0.5 * (x0 + x1);
                const double fm = lineshape_derivative(mid, m);
                if ((fm < 0.0) == (f0 < 0.0)) {
                    x0 = mid;
                    f0 = fm;
                } else {
                    x1 = mid;
                }
            }
            roots.push_back(0.5 * (x0 + x1));
        }
        a = b;
        fa = fb;
    }
    return roots;
}

double slow_down(double p) {
    require_polarization(p);
    const double p2 = p * p;
    return (6.0 + 2.0 * p2) / (1.0 + p2);
}

double longitudinal_spin(double p) { return slow_down(p) * p; }

double longitudinal_spin_slope(double p) {
    require_polarization(p);
    const double p2 = p * p;
    const double d = 1.0 + p2;
    return (6.0 + 2.0 * p2 * p2) / (d * d);
}

double invert_longitudinal_spin(double u) {
    if (!(u >= 0.0 && u <= 4.0)) {
        throw std::domain_error("longitudinal spin outside [0,4]: " + std::to_string(u));
    }
    if (u == 0.0) return 0.0;
    if (u == 4.0) return 1.0;
    // Root of 2P^3 - uP^2 + 6P - u on [0,1]; the cubic is increasing there.
    // Newton from u/5 with a bisection bracket as safeguard.
    double lo = 0.0;
    double hi = 1.0;
    double p = u / 5.0;
    for (int it = 0; it < 100; ++it) {
        const double f = longitudinal_spin(p) - u;
        if (f > 0.0) hi = p; else lo = p;
        double next = p - f / longitudinal_spin_slope(p);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - p) <= 2e-16 * p) {
            p = next;
            break;
        }
        p = next;
    }
    return p;
}

}  // namespace cellsim
