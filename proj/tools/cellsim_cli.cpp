// Command-line front end: solve, sweep, serf, estimate, dump-constants.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cellsim/config.hpp"
#include "cellsim/sweep.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace cellsim;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    int workers = 1;
    std::string walls;
    std::string grid;
    bool dump_fields = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "run configuration file");
    cmd->add_option("--out", f.out_dir, "output directory (overrides the config)");
    cmd->add_option("--workers", f.workers, "parallel scene workers")->check(CLI::PositiveNumber);
    cmd->add_option("--walls", f.walls, "wall mode")
        ->check(CLI::IsMember({"depolarizing", "nondepolarizing", "both"}));
    cmd->add_option("--grid", f.grid, "grid size NZxNR");
    cmd->add_flag("--dump-fields", f.dump_fields, "write per-scene field CSVs");
}

RunConfig resolve(const CommonFlags& f) {
    RunConfig c = f.config_path.empty() ? RunConfig{} : RunConfig::load(f.config_path);
    if (!f.out_dir.empty()) c.output_dir = f.out_dir;
    if (!f.walls.empty()) c.walls = parse_wall_selection(f.walls);
    if (!f.grid.empty()) std::tie(c.nz, c.nr) = parse_grid_size(f.grid);
    c.validate();
    return c;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

int cmd_solve(const CommonFlags& flags) {
    const RunConfig c = resolve(flags);
    fs::create_directories(c.output_dir);
    const double detuning =
        c.auto_detunings ? 0.0 : c.detunings_ghz.front();
    nlohmann::ordered_json summary;
    nlohmann::ordered_json echo;
    for (const auto& [k, v] : c.echo()) echo[k] = v;
    summary["config"] = echo;
    summary["constants_hash"] = std::to_string(c.constants.hash());
    int status = 0;
    for (WallMode mode : c.walls) {
        const SceneKey key{c.pressures_torr.front(), c.powers_mw.front(), c.beam_radii().front(),
                           detuning, mode};
        const Scene scene = make_scene(c, key);
        scene.validate();
        const std::string tag(to_string(mode));
        nlohmann::ordered_json entry;
        try {
            const Solution sol = solve_steady(scene, c.solver);
            const Observables o = evaluate(sol, scene);
            const SceneEstimate e = estimate_scene(scene);
            const Field px = solve_transverse(sol, scene, SerfSettings{c.field_t});
            const auto dump = [&](const Field& field, const char* what) {
                std::ofstream out(fs::path(c.output_dir) / ("solve_" + tag + "_" + what + ".csv"));
                write_field_csv(out, field, scene.grid);
            };
            dump(sol.polarization, "polarization");
            dump(sol.intensity, "intensity");
            dump(px, "transverse");
            entry["converged"] = sol.converged;
            entry["outer_iterations"] = sol.iterations;
            entry["inner_iterations"] = sol.inner_iterations;
            entry["residual"] = sol.residual;
            entry["T"] = o.transmission;
            entry["P_ave"] = o.average_polarization;
            entry["eta_loss"] = o.wall_loss;
            entry["balance_residual"] = o.balance_residual;
            entry["P_x_ave"] = average_transverse(px, scene.grid, scene.geometry);
            entry["lambda_D_mm"] = e.lambda_d;
            entry["lambda_L_mm"] = e.lambda_l;
            entry["ratio_estimate"] = e.ratio.valid ? nlohmann::json(e.ratio.value) : nullptr;
            entry["gamma_wall_per_s"] = e.gamma_wall;
            std::printf("%s: T=%s P_ave=%s eta_loss=%s iterations=%d\n", tag.c_str(),
                        format_number(o.transmission).c_str(),
                        format_number(o.average_polarization).c_str(),
                        format_number(o.wall_loss).c_str(), sol.iterations);
        } catch (const SolverError& e) {
            std::fprintf(stderr, "%s: %s (residual %s)\n", tag.c_str(), e.what(),
                         format_number(e.residual()).c_str());
            entry["converged"] = false;
            entry["error"] = e.what();
            status = 1;
        }
        summary["scenes"][tag] = entry;
    }
    write_text(fs::path(c.output_dir) / "solve_summary.json", summary.dump(2) + "\n");
    return status;
}

int report_failures(std::size_t failed, std::size_t total) {
    if (failed == 0) return 0;
    std::fprintf(stderr, "%zu of %zu rows failed\n", failed, total);
    return 1;
}

int cmd_sweep(const CommonFlags& flags, bool transverse) {
    const RunConfig c = resolve(flags);
    fs::create_directories(c.output_dir);
    std::string fields_dir;
    if (flags.dump_fields) {
        fields_dir = (fs::path(c.output_dir) / "fields").string();
        fs::create_directories(fields_dir);
    }
    const std::string name = transverse ? "serf" : "sweep";
    const std::size_t total = enumerate_scenes(c).size();
    std::fprintf(stderr, "%s: %zu scenes on %d worker(s)\n", name.c_str(), total, flags.workers);
    const auto rows = run_sweep(c, flags.workers, transverse, fields_dir);

    std::ofstream csv(fs::path(c.output_dir) / (name + ".csv"));
    write_sweep_csv(csv, c, rows, transverse);
    write_text(fs::path(c.output_dir) / (name + ".json"),
               metadata_json(c, name, rows.size(), sweep_columns(transverse)));
    std::size_t failed = 0;
    for (const auto& r : rows) {
        if (r.status == "failed") {
            ++failed;
            std::fprintf(stderr, "row failed (%s torr, %s mW, %s GHz, %s): %s\n",
                         format_number(r.key.pressure_torr).c_str(),
                         format_number(r.key.power_mw).c_str(),
                         format_number(r.key.detuning_ghz).c_str(),
                         std::string(to_string(r.key.walls)).c_str(), r.message.c_str());
        }
    }
    return report_failures(failed, rows.size());
}

int cmd_serf(const CommonFlags& flags) {
    const RunConfig c = resolve(flags);
    if (!c.optimize) return cmd_sweep(flags, true);
    fs::create_directories(c.output_dir);
    const std::size_t total = enumerate_groups(c).size();
    std::fprintf(stderr, "serf: %zu optimization groups on %d worker(s)\n", total, flags.workers);
    const auto rows = run_serf_optimization(c, flags.workers);
    std::ofstream csv(fs::path(c.output_dir) / "serf_optimize.csv");
    write_serf_csv(csv, c, rows);
    write_text(fs::path(c.output_dir) / "serf_optimize.json",
               metadata_json(c, "serf-optimize", rows.size(), serf_columns()));
    std::size_t failed = 0;
    for (const auto& r : rows) {
        if (r.status == "edge") {
            std::fprintf(stderr, "warning: optimum at the detuning grid edge (%s torr, %s mW)\n",
                         format_number(r.key.pressure_torr).c_str(),
                         format_number(r.key.power_mw).c_str());
        } else if (r.status == "failed") {
            ++failed;
            std::fprintf(stderr, "group failed: %s\n", r.message.c_str());
        }
    }
    return report_failures(failed, rows.size());
}

int cmd_estimate(const CommonFlags& flags) {
    const RunConfig c = resolve(flags);
    fs::create_directories(c.output_dir);
    std::ofstream csv(fs::path(c.output_dir) / "estimate.csv");
    std::string header = "# cellsim estimate\n";
    for (const auto& [k, v] : c.echo()) header += "# " + k + " = " + v + "\n";
    const std::vector<std::string> columns{
        "pressure_torr", "power_mW", "r_L_mm", "detuning_GHz",   "lambda_D_mm",
        "lambda_L_mm",   "ratio_estimate", "gamma_wall_per_s", "serf_bound"};
    std::string table = header;
    for (std::size_t i = 0; i < columns.size(); ++i) table += (i ? "," : "") + columns[i];
    table += "\n";
    std::size_t rows = 0;
    for (double p : c.pressures_torr) {
        for (double w : c.powers_mw) {
            for (double rl : c.beam_radii()) {
                const Scene base = make_scene(c, {p, w, rl, 0.0, WallMode::Depolarizing});
                const std::vector<double> grid = detuning_grid(c, base.medium);
                const SerfBound bound = group_bound(c, base, grid);
                for (double d : grid) {
                    Scene s = base;
                    s.detuning = d;
                    const SceneEstimate e = estimate_scene(s);
                    table += format_number(p) + "," + format_number(w) + "," + format_number(rl) +
                             "," + format_number(units::rad_per_s_to_ghz(d)) + "," +
                             format_number(e.lambda_d) + "," + format_number(e.lambda_l) + "," +
                             format_number(e.ratio.value) + "," + format_number(e.gamma_wall) +
                             "," + (bound.valid ? format_number(bound.value) : "nan") + "\n";
                    ++rows;
                }
            }
        }
    }
    csv << table;
    std::cout << table;
    write_text(fs::path(c.output_dir) / "estimate.json", metadata_json(c, "estimate", rows, columns));
    return 0;
}

int cmd_dump_constants(const CommonFlags& flags) {
    const RunConfig c = resolve(flags);
    std::cout << "# constants_hash = " << c.constants.hash() << "\n" << c.constants.dump();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady-state wall-depolarization simulator for optically pumped vapor cells"};
    app.require_subcommand(1);
    CommonFlags flags;
    auto* solve = app.add_subcommand("solve", "solve the first scene of the config, write fields");
    auto* sweep = app.add_subcommand("sweep", "observables over the configured cross product");
    auto* serf = app.add_subcommand("serf", "SERF transverse response, optionally optimized");
    auto* estimate = app.add_subcommand("estimate", "closed-form estimates table");
    auto* dump = app.add_subcommand("dump-constants", "print the effective constants table");
    for (auto* cmd : {solve, sweep, serf, estimate, dump}) add_common(cmd, flags);
    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(flags);
        if (sweep->parsed()) return cmd_sweep(flags, false);
        if (serf->parsed()) return cmd_serf(flags);
        if (estimate->parsed()) return cmd_estimate(flags);
        return cmd_dump_constants(flags);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
