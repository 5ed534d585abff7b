#include "cellsim/sweep.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace cellsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string field_name(std::size_t index, const SceneKey& key, const char* what) {
    return "scene" + std::to_string(index) + "_" + std::string(to_string(key.walls)) + "_" + what +
           ".csv";
}

void write_fields(const std::string& dir, std::size_t index, const SceneKey& key,
                  const Solution& sol, const Scene& scene, const Field* px) {
    const auto dump = [&](const Field& f, const char* what) {
        std::ofstream out(dir + "/" + field_name(index, key, what));
        if (!out) throw std::runtime_error("cannot write field file in " + dir);
        write_field_csv(out, f, scene.grid);
    };
    dump(sol.polarization, "polarization");
    dump(sol.intensity, "intensity");
    if (px) dump(*px, "transverse");
}

SceneRow failed_row(const SceneKey& key, const std::string& message) {
    SceneRow row;
    row.key = key;
    row.observables = {kNaN, kNaN, kNaN, kNaN, std::nullopt};
    row.status = "failed";
    row.message = message;
    return row;
}

void emit_metadata(std::ostream& out, const RunConfig& config, const char* kind) {
    out << "# cellsim " << kind << "\n";
    for (const auto& [key, value] : config.echo()) out << "# " << key << " = " << value << "\n";
}

void emit_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << cells[i];
    }
    out << '\n';
}

}  // namespace

std::vector<SceneKey> enumerate_scenes(const RunConfig& config) {
    std::vector<SceneKey> keys;
    for (double p : config.pressures_torr) {
        std::vector<double> detunings = config.detunings_ghz;
        if (config.auto_detunings) {
            const MediumParams m = medium_from_conditions(
                units::celsius_to_kelvin(config.temperature_c), p, config.constants);
            detunings.clear();
            for (double d : detuning_grid(config, m)) detunings.push_back(units::rad_per_s_to_ghz(d));
        }
        for (double w : config.powers_mw) {
            for (double rl : config.beam_radii()) {
                for (double d : detunings) {
                    for (WallMode mode : config.walls) keys.push_back({p, w, rl, d, mode});
                }
            }
        }
    }
    return keys;
}

std::vector<GroupKey> enumerate_groups(const RunConfig& config) {
    std::vector<GroupKey> keys;
    for (double p : config.pressures_torr) {
        for (double w : config.powers_mw) {
            for (double rl : config.beam_radii()) {
                for (WallMode mode : config.walls) keys.push_back({p, w, rl, mode});
            }
        }
    }
    return keys;
}

Scene make_scene(const RunConfig& config, const SceneKey& key) {
    Scene s;
    s.geometry = {config.length_mm, config.radius_mm, key.beam_radius_mm};
    s.medium = medium_from_conditions(units::celsius_to_kelvin(config.temperature_c),
                                      key.pressure_torr, config.constants);
    s.detuning = units::ghz_to_rad_per_s(key.detuning_ghz);
    s.power = key.power_mw;
    s.walls = key.walls;
    s.grid = Grid::make(s.geometry, config.nz, config.nr);
    return s;
}

std::vector<double> detuning_grid(const RunConfig& config, const MediumParams& medium) {
    if (config.auto_detunings) {
        return serf_detuning_grid(medium, config.serf_fine, config.serf_coarse, config.serf_reach);
    }
    std::vector<double> grid;
    grid.reserve(config.detunings_ghz.size());
    for (double d : config.detunings_ghz) grid.push_back(units::ghz_to_rad_per_s(d));
    return grid;
}

SceneRow run_scene(const RunConfig& config, const SceneKey& key, std::size_t index,
                   bool transverse, const std::string& fields_dir) {
    Scene scene;
    try {
        scene = make_scene(config, key);
        scene.validate();
    } catch (const std::exception& e) {
        return failed_row(key, e.what());
    }

    SceneRow row;
    row.key = key;
    row.status = "ok";
    Solution sol;
    try {
        sol = solve_steady(scene, config.solver);
    } catch (const SolverError&) {
        SolverOptions damped = config.solver;
        damped.relaxation *= 0.5;
        try {
            sol = solve_steady(scene, damped);
            row.status = "damped";
        } catch (const SolverError& second) {
            return failed_row(key, second.what());
        }
    }
    row.iterations = sol.iterations;
    row.observables = evaluate(sol, scene);
    row.estimate = estimate_scene(scene);

    std::optional<Field> px;
    if (transverse) {
        try {
            px = solve_transverse(sol, scene, SerfSettings{config.field_t});
            row.observables.transverse_average = average_transverse(*px, scene.grid, scene.geometry);
        } catch (const SolverError& e) {
            return failed_row(key, e.what());
        }
    }
    if (!fields_dir.empty()) write_fields(fields_dir, index, key, sol, scene, px ? &*px : nullptr);
    return row;
}

SerfBound group_bound(const RunConfig& config, const Scene& scene,
                      const std::vector<double>& detunings) {
    std::vector<BoundSample> samples;
    samples.reserve(detunings.size());
    for (double d : detunings) {
        Scene s = scene;
        s.detuning = d;
        const SceneEstimate e = estimate_scene(s);
        samples.push_back({e.ratio, e.pump_rate});
    }
    return serf_bound(samples, scene.medium.gamma_e * config.field_t, scene.medium.gamma_rel);
}

SerfRow run_serf_group(const RunConfig& config, const GroupKey& key) {
    SerfRow row;
    row.key = key;
    row.optimum.detuning = kNaN;
    row.optimum.transverse_average = kNaN;
    row.optimum.polarization_average = kNaN;
    try {
        const Scene scene =
            make_scene(config, {key.pressure_torr, key.power_mw, key.beam_radius_mm, 0.0, key.walls});
        scene.validate();
        const std::vector<double> grid = detuning_grid(config, scene.medium);
        row.bound = group_bound(config, scene, grid);
        row.optimum = optimize_detuning(scene, grid, SerfSettings{config.field_t}, config.solver,
                                        config.refine_steps);
        row.status = row.optimum.at_edge ? "edge" : "ok";
    } catch (const std::exception& e) {
        row.status = "failed";
        row.message = e.what();
    }
    return row;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    if (threads == 1 || count <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
}

std::vector<SceneRow> run_sweep(const RunConfig& config, int workers, bool transverse,
                                const std::string& fields_dir) {
    const std::vector<SceneKey> keys = enumerate_scenes(config);
    std::vector<SceneRow> rows(keys.size());
    parallel_for(keys.size(), workers, [&](std::size_t i) {
        rows[i] = run_scene(config, keys[i], i, transverse, fields_dir);
    });
    return rows;
}

std::vector<SerfRow> run_serf_optimization(const RunConfig& config, int workers) {
    const std::vector<GroupKey> keys = enumerate_groups(config);
    std::vector<SerfRow> rows(keys.size());
    parallel_for(keys.size(), workers,
                 [&](std::size_t i) { rows[i] = run_serf_group(config, keys[i]); });
    return rows;
}

std::vector<std::string> sweep_columns(bool transverse) {
    std::vector<std::string> cols{"detuning_GHz",   "power_mW",        "pressure_torr",
                                  "r_L_mm", "wall_mode",       "T",
                                  "P_ave",          "eta_loss",        "balance_residual",
                                  "P_x_ave",        "lambda_D_mm",     "lambda_L_mm",
                                  "ratio_estimate", "gamma_wall_per_s"};
    if (transverse) {
        cols.push_back("optimal_detuning_GHz");
        cols.push_back("serf_bound");
    }
    cols.push_back("iterations");
    cols.push_back("status");
    return cols;
}

std::vector<std::string> serf_columns() {
    return {"pressure_torr", "power_mW", "r_L_mm", "wall_mode", "optimal_detuning_GHz",
            "P_x_ave",       "P_ave",    "serf_bound",     "r1",        "r2",
            "samples",       "status"};
}

void write_sweep_csv(std::ostream& out, const RunConfig& config,
                     const std::vector<SceneRow>& rows, bool transverse) {
    emit_metadata(out, config, transverse ? "serf" : "sweep");
    emit_row(out, sweep_columns(transverse));

    // Per-group optimum and bound over the configured detunings.
    struct GroupSummary {
        double best_detuning = kNaN;
        double best_px = -1.0;
        double bound = kNaN;
    };
    std::vector<GroupSummary> summary(rows.size());
    if (transverse) {
        std::size_t start = 0;
        while (start < rows.size()) {
            const SceneKey& k = rows[start].key;
            std::size_t end = start;
            GroupSummary g;
            std::vector<double> detunings;
            while (end < rows.size() && rows[end].key.pressure_torr == k.pressure_torr &&
                   rows[end].key.power_mw == k.power_mw &&
                   rows[end].key.beam_radius_mm == k.beam_radius_mm) {
                const SceneRow& r = rows[end];
                if (r.key.walls == WallMode::Depolarizing) {
                    detunings.push_back(units::ghz_to_rad_per_s(r.key.detuning_ghz));
                    const double px = r.observables.transverse_average.value_or(kNaN);
                    if (px > g.best_px) {
                        g.best_px = px;
                        g.best_detuning = r.key.detuning_ghz;
                    }
                }
                ++end;
            }
            if (!detunings.empty()) {
                try {
                    const Scene scene = make_scene(config, k);
                    const SerfBound b = group_bound(config, scene, detunings);
                    if (b.valid) g.bound = b.value;
                } catch (const std::exception&) {
                }
            }
            for (std::size_t i = start; i < end; ++i) summary[i] = g;
            start = end;
        }
    }

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SceneRow& r = rows[i];
        const Observables& o = r.observables;
        const bool solved = r.status != "failed";
        const auto num = [&](double v) { return solved ? format_number(v) : std::string("nan"); };
        std::vector<std::string> cells{
            format_number(r.key.detuning_ghz),
            format_number(r.key.power_mw),
            format_number(r.key.pressure_torr),
            format_number(r.key.beam_radius_mm),
            std::string(to_string(r.key.walls)),
            num(o.transmission),
            num(o.average_polarization),
            num(o.wall_loss),
            num(o.balance_residual),
            o.transverse_average ? format_number(*o.transverse_average) : std::string(),
            num(r.estimate.lambda_d),
            num(r.estimate.lambda_l),
            solved ? format_number(r.estimate.ratio.value) : std::string("nan"),
            num(r.estimate.gamma_wall),
        };
        if (transverse) {
            cells.push_back(format_number(summary[i].best_detuning));
            cells.push_back(format_number(summary[i].bound));
        }
        cells.push_back(std::to_string(r.iterations));
        cells.push_back(r.status);
        emit_row(out, cells);
    }
}

void write_serf_csv(std::ostream& out, const RunConfig& config, const std::vector<SerfRow>& rows) {
    emit_metadata(out, config, "serf-optimize");
    emit_row(out, serf_columns());
    for (const SerfRow& r : rows) {
        const DetuningOptimum& o = r.optimum;
        emit_row(out, {format_number(r.key.pressure_torr), format_number(r.key.power_mw),
                       format_number(r.key.beam_radius_mm), std::string(to_string(r.key.walls)),
                       format_number(units::rad_per_s_to_ghz(o.detuning)),
                       format_number(o.transverse_average), format_number(o.polarization_average),
                       r.bound.valid ? format_number(r.bound.value) : std::string("nan"),
                       r.bound.valid ? format_number(r.bound.r1) : std::string("nan"),
                       r.bound.valid ? format_number(r.bound.r2) : std::string("nan"),
                       std::to_string(o.samples.size()), r.status});
    }
}

std::string metadata_json(const RunConfig& config, const std::string& command, std::size_t rows,
                          const std::vector<std::string>& columns) {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["rows"] = rows;
    j["columns"] = columns;
    nlohmann::ordered_json echo;
    for (const auto& [key, value] : config.echo()) echo[key] = value;
    j["config"] = echo;
    nlohmann::ordered_json table;
    std::istringstream dump(config.constants.dump());
    std::string line;
    while (std::getline(dump, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos || line.front() == '#') continue;
        const auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(' '));
            s.erase(s.find_last_not_of(' ') + 1);
            return s;
        };
        table[trim(line.substr(0, eq))] = std::stod(trim(line.substr(eq + 1)));
    }
    j["constants"] = table;
    j["constants_hash"] = std::to_string(config.constants.hash());
    return j.dump(2) + "\n";
}

}  // namespace cellsim
