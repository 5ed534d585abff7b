#include "cellsim/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cellsim {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text) {
    const std::string t = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + t + "'");
    }
    if (used != t.size() || !std::isfinite(v)) {
        throw std::invalid_argument("not a number: '" + t + "'");
    }
    return v;
}

int parse_int(const std::string& text) {
    const double v = parse_number(text);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw std::invalid_argument("not an integer: '" + trim(text) + "'");
    }
    return static_cast<int>(v);
}

bool parse_bool(const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw std::invalid_argument("not a boolean: '" + t + "'");
}

void append_range(const std::string& item, std::vector<double>& out) {
    std::vector<std::string> parts;
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw std::invalid_argument("range must be start:step:stop");
    const double start = parse_number(parts[0]);
    const double step = parse_number(parts[1]);
    const double stop = parse_number(parts[2]);
    if (step == 0.0 || (stop - start) / step < 0.0) {
        throw std::invalid_argument("range step does not reach the stop value");
    }
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    if (count > 1000000) throw std::invalid_argument("range too long");
    for (long i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
}

std::string join(const std::vector<double>& values) {
    std::string s = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) s += ", ";
        s += format_number(values[i]);
    }
    return s + "]";
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

std::vector<double> parse_number_list(const std::string& text) {
    std::string t = trim(text);
    if (!t.empty() && t.front() == '[') {
        if (t.back() != ']') throw std::invalid_argument("unterminated list");
        t = t.substr(1, t.size() - 2);
    }
    std::vector<double> out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw std::invalid_argument("empty list element");
        if (item.find(':') != std::string::npos) {
            append_range(item, out);
        } else {
            out.push_back(parse_number(item));
        }
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

std::pair<int, int> parse_grid_size(const std::string& text) {
    const std::string t = trim(text);
    const auto x = t.find('x');
    if (x == std::string::npos) throw std::invalid_argument("grid must be NZxNR");
    const int nz = parse_int(t.substr(0, x));
    const int nr = parse_int(t.substr(x + 1));
    if (nz < 3 || nr < 3) throw std::invalid_argument("grid needs at least 3x3 nodes");
    return {nz, nr};
}

std::vector<WallMode> parse_wall_selection(const std::string& text) {
    const std::string t = trim(text);
    if (t == "both") return {WallMode::Depolarizing, WallMode::Nondepolarizing};
    return {parse_wall_mode(t)};
}

std::vector<double> RunConfig::beam_radii() const {
    return beam_radii_mm.empty() ? std::vector<double>{radius_mm} : beam_radii_mm;
}

void RunConfig::validate() const {
    const auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
    if (!(length_mm > 0.0)) fail("length_mm must be positive");
    if (!(radius_mm > 0.0)) fail("radius_mm must be positive");
    if (!(temperature_c > -constants::zero_celsius_k)) fail("temperature_C below absolute zero");
    if (detunings_ghz.empty() && !auto_detunings) fail("detunings_GHz is empty");
    if (powers_mw.empty()) fail("powers_mW is empty");
    if (pressures_torr.empty()) fail("pressures_torr is empty");
    if (walls.empty()) fail("walls is empty");
    for (double p : powers_mw) {
        if (!(p >= 0.0)) fail("powers_mW must be non-negative");
    }
    for (double p : pressures_torr) {
        if (!(p > 0.0)) fail("pressures_torr must be positive");
    }
    for (double r : beam_radii()) {
        if (!(r > 0.0) || r > radius_mm) fail("beam_radii_mm must lie in (0, radius_mm]");
    }
    if (nz < 3 || nr < 3) fail("grid needs at least 3x3 nodes");
    if (!(solver.relaxation > 0.0 && solver.relaxation <= 1.0)) fail("relaxation must lie in (0, 1]");
    if (!(solver.inner_tol > 0.0) || !(solver.outer_tol > 0.0)) fail("tolerances must be positive");
    if (solver.max_inner < 1 || solver.max_outer < 1) fail("iteration limits must be positive");
    if (!(field_t >= 0.0)) fail("field_T must be non-negative");
    if (!(serf_fine > 0.0) || serf_coarse < serf_fine || !(serf_reach >= 0.0)) {
        fail("serf grid spacings must satisfy 0 < fine <= coarse, reach >= 0");
    }
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
    std::string walls_text;
    for (std::size_t i = 0; i < walls.size(); ++i) {
        if (i) walls_text += ", ";
        walls_text += std::string(to_string(walls[i]));
    }
    return {
        {"constants", constants_path.empty() ? "builtin" : constants_path},
        {"constants_hash", std::to_string(constants.hash())},
        {"length_mm", format_number(length_mm)},
        {"radius_mm", format_number(radius_mm)},
        {"temperature_C", format_number(temperature_c)},
        {"detunings_GHz", auto_detunings ? "auto" : join(detunings_ghz)},
        {"powers_mW", join(powers_mw)},
        {"pressures_torr", join(pressures_torr)},
        {"beam_radii_mm", join(beam_radii())},
        {"walls", "[" + walls_text + "]"},
        {"grid", std::to_string(nz) + "x" + std::to_string(nr)},
        {"relaxation", format_number(solver.relaxation)},
        {"inner_tol", format_number(solver.inner_tol)},
        {"outer_tol", format_number(solver.outer_tol)},
        {"max_inner", std::to_string(solver.max_inner)},
        {"max_outer", std::to_string(solver.max_outer)},
        {"field_T", format_number(field_t)},
        {"optimize", optimize ? "true" : "false"},
        {"serf_fine", format_number(serf_fine)},
        {"serf_coarse", format_number(serf_coarse)},
        {"serf_reach", format_number(serf_reach)},
        {"refine_steps", std::to_string(refine_steps)},
        {"output", output_dir},
    };
}

RunConfig RunConfig::parse(std::istream& in, const std::string& base_dir) {
    RunConfig c;
    using Setter = std::function<void(const std::string&)>;
    const std::map<std::string, Setter> setters{
        {"constants",
         [&](const std::string& v) {
             std::filesystem::path p(v);
             if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
             c.constants_path = p.string();
         }},
        {"length_mm", [&](const std::string& v) { c.length_mm = parse_number(v); }},
        {"radius_mm", [&](const std::string& v) { c.radius_mm = parse_number(v); }},
        {"temperature_C", [&](const std::string& v) { c.temperature_c = parse_number(v); }},
        {"detunings_GHz",
         [&](const std::string& v) {
             c.auto_detunings = trim(v) == "auto";
             c.detunings_ghz = c.auto_detunings ? std::vector<double>{} : parse_number_list(v);
         }},
        {"powers_mW", [&](const std::string& v) { c.powers_mw = parse_number_list(v); }},
        {"pressures_torr", [&](const std::string& v) { c.pressures_torr = parse_number_list(v); }},
        {"beam_radii_mm", [&](const std::string& v) { c.beam_radii_mm = parse_number_list(v); }},
        {"walls", [&](const std::string& v) { c.walls = parse_wall_selection(v); }},
        {"grid",
         [&](const std::string& v) { std::tie(c.nz, c.nr) = parse_grid_size(v); }},
        {"relaxation", [&](const std::string& v) { c.solver.relaxation = parse_number(v); }},
        {"inner_tol", [&](const std::string& v) { c.solver.inner_tol = parse_number(v); }},
        {"outer_tol", [&](const std::string& v) { c.solver.outer_tol = parse_number(v); }},
        {"max_inner", [&](const std::string& v) { c.solver.max_inner = parse_int(v); }},
        {"max_outer", [&](const std::string& v) { c.solver.max_outer = parse_int(v); }},
        {"field_T", [&](const std::string& v) { c.field_t = parse_number(v); }},
        {"optimize", [&](const std::string& v) { c.optimize = parse_bool(v); }},
        {"serf_fine", [&](const std::string& v) { c.serf_fine = parse_number(v); }},
        {"serf_coarse", [&](const std::string& v) { c.serf_coarse = parse_number(v); }},
        {"serf_reach", [&](const std::string& v) { c.serf_reach = parse_number(v); }},
        {"refine_steps", [&](const std::string& v) { c.refine_steps = parse_int(v); }},
        {"output", [&](const std::string& v) { c.output_dir = trim(v); }},
    };

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const auto where = "config line " + std::to_string(line_no) + ": ";
        if (eq == std::string::npos) throw std::invalid_argument(where + "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) throw std::invalid_argument(where + "unknown key '" + key + "'");
        if (value.empty()) throw std::invalid_argument(where + "missing value for '" + key + "'");
        try {
            it->second(value);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(where + key + ": " + e.what());
        }
    }
    if (!c.constants_path.empty()) c.constants = ConstantsConfig::load(c.constants_path);
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path);
    return parse(in, std::filesystem::path(path).parent_path().string());
}

}  // namespace cellsim
