#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cellsim/config.hpp"
#include "cellsim/sweep.hpp"
#include "doctest.h"

using namespace cellsim;
namespace fs = std::filesystem;

namespace {

RunConfig parse_text(const std::string& text) {
    std::istringstream in(text);
    return RunConfig::parse(in);
}

RunConfig small_sweep() {
    return parse_text(
        "detunings_GHz = [-1, 0:1:2]\n"
        "powers_mW = [0.5, 1]\n"
        "pressures_torr = 200\n"
        "walls = both\n"
        "grid = 21x11\n");
}

std::string csv_of(const RunConfig& c, int workers, bool transverse) {
    std::ostringstream out;
    write_sweep_csv(out, c, run_sweep(c, workers, transverse), transverse);
    return out.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("cellsim_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CELLSIM_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("number lists") {
    CHECK(parse_number_list("3") == std::vector<double>{3.0});
    CHECK(parse_number_list("[1, 2.5, -4]") == std::vector<double>{1.0, 2.5, -4.0});
    CHECK(parse_number_list("0:0.5:2") == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
    const auto tricky = parse_number_list("0:0.1:0.3");
    REQUIRE(tricky.size() == 4);
    CHECK(tricky.back() == doctest::Approx(0.3));
    CHECK(parse_number_list("[5, 0:1:2]") == std::vector<double>{5.0, 0.0, 1.0, 2.0});
    CHECK_THROWS_AS(parse_number_list("[1, 2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_number_list("1,,2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_number_list("abc"), std::invalid_argument);
}

TEST_CASE("grid sizes, wall selections and number formatting") {
    CHECK(parse_grid_size("101x51") == std::pair<int, int>{101, 51});
    CHECK_THROWS_AS(parse_grid_size("101"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid_size("2x51"), std::invalid_argument);
    CHECK(parse_wall_selection("both").size() == 2);
    CHECK(parse_wall_selection("nondepolarizing") == std::vector<WallMode>{WallMode::Nondepolarizing});
    CHECK_THROWS_AS(parse_wall_selection("maybe"), std::invalid_argument);
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333");
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("config errors name the problem") {
    CHECK_THROWS_AS(parse_text("radius_mm = -1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_text("colour = blue\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_text("powers_mW\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_text("beam_radii_mm = 1.5\n"), std::invalid_argument);
    try {
        parse_text("# header\n\ncolour = blue\n");
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    const RunConfig c = parse_text("detunings_GHz = auto\n");
    CHECK(c.auto_detunings);
}

TEST_CASE("scene enumeration order") {
    const RunConfig c = small_sweep();
    const auto keys = enumerate_scenes(c);
    REQUIRE(keys.size() == 2u * 4u * 2u);
    CHECK(keys[0].power_mw == 0.5);
    CHECK(keys[0].detuning_ghz == -1.0);
    CHECK(keys[0].walls == WallMode::Depolarizing);
    CHECK(keys[1].walls == WallMode::Nondepolarizing);
    CHECK(keys[2].detuning_ghz == 0.0);
    CHECK(keys[8].power_mw == 1.0);
    CHECK(keys[8].detuning_ghz == -1.0);
}

TEST_CASE("sweeps are byte-identical across worker counts") {
    const RunConfig c = small_sweep();
    const std::string serial = csv_of(c, 1, true);
    CHECK(serial == csv_of(c, 3, true));
    CHECK(serial.find("# constants_hash = " + std::to_string(c.constants.hash())) !=
          std::string::npos);
    CHECK(serial.find("detuning_GHz,power_mW,pressure_torr,r_L_mm,wall_mode,T,P_ave") !=
          std::string::npos);
}

TEST_CASE("zero field produces zero transverse columns") {
    RunConfig c = small_sweep();
    c.field_t = 0.0;
    for (const SceneRow& row : run_sweep(c, 1, true)) {
        CHECK(row.status != "failed");
        REQUIRE(row.observables.transverse_average.has_value());
        CHECK(*row.observables.transverse_average == 0.0);
    }
}

TEST_CASE("metadata sidecar") {
    const RunConfig c = small_sweep();
    const std::string json = metadata_json(c, "sweep", 16, sweep_columns(false));
    CHECK(json.find("\"constants_hash\"") != std::string::npos);
    CHECK(json.find(std::to_string(c.constants.hash())) != std::string::npos);
    CHECK(json.find("\"diffusion_ref_mm2_per_s\"") != std::string::npos);
}

TEST_CASE("command-line exit codes") {
    const fs::path dir = scratch_dir("cli");
    {
        std::ofstream bad(dir / "bad.cfg");
        bad << "radius_mm = -1\n";
        std::ofstream dark(dir / "dark.cfg");
        dark << "powers_mW = 0\ngrid = 21x11\n";
    }
    CHECK(run_cli("solve --config " + (dir / "bad.cfg").string() + " --out " + dir.string()) != 0);
    CHECK(run_cli("solve --config " + (dir / "dark.cfg").string() + " --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "solve_depolarizing_polarization.csv"));
    CHECK(fs::exists(dir / "solve_summary.json"));
    CHECK(run_cli("dump-constants") == 0);
    CHECK(run_cli("sweep --walls sometimes") != 0);
    fs::remove_all(dir);
}

}  // TEST_SUITE
