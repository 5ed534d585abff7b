#pragma once

// Scene enumeration, parallel execution and CSV/JSON emission for sweeps.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cellsim/config.hpp"
#include "cellsim/estimates.hpp"
#include "cellsim/observables.hpp"
#include "cellsim/serf.hpp"

namespace cellsim {

/// One point of the configured cross product.
struct SceneKey {
    double pressure_torr = 0.0;
    double power_mw = 0.0;
    double beam_radius_mm = 0.0;
    double detuning_ghz = 0.0;
    WallMode walls = WallMode::Depolarizing;
};

/// Rows ordered by pressure, power, beam radius, detuning, wall mode.
std::vector<SceneKey> enumerate_scenes(const RunConfig& config);

/// One (pressure, power, beam radius, wall mode) group of the SERF optimizer.
struct GroupKey {
    double pressure_torr = 0.0;
    double power_mw = 0.0;
    double beam_radius_mm = 0.0;
    WallMode walls = WallMode::Depolarizing;
};

std::vector<GroupKey> enumerate_groups(const RunConfig& config);

Scene make_scene(const RunConfig& config, const SceneKey& key);

/// Detuning grid in rad/s for a pressure: the configured list, or the
/// built-in resonance grid when `detunings_GHz = auto`.
std::vector<double> detuning_grid(const RunConfig& config, const MediumParams& medium);

/// Result of one scene. Numeric fields are NaN when the solve failed.
struct SceneRow {
    SceneKey key;
    Observables observables;
    SceneEstimate estimate;
    int iterations = 0;
    std::string status;  // ok | damped | failed
    std::string message;
};

/// Solves a scene; on SolverError retries once with half the relaxation
/// factor before recording a failure. With `transverse` set, also solves the
/// SERF response. When `fields_dir` is given, writes the scene's fields there.
SceneRow run_scene(const RunConfig& config, const SceneKey& key, std::size_t index,
                   bool transverse, const std::string& fields_dir = "");

/// SERF bound of a (pressure, power, beam radius) group over a detuning grid.
SerfBound group_bound(const RunConfig& config, const Scene& scene,
                      const std::vector<double>& detunings);

struct SerfRow {
    GroupKey key;
    DetuningOptimum optimum;
    SerfBound bound;
    std::string status;  // ok | edge | failed
    std::string message;
};

SerfRow run_serf_group(const RunConfig& config, const GroupKey& key);

/// Runs task(i) for i in [0, count) on `workers` threads. Results are stored
/// by index by the task itself; the first exception escaping a task is
/// rethrown after all workers finish.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task);

std::vector<SceneRow> run_sweep(const RunConfig& config, int workers, bool transverse,
                                const std::string& fields_dir = "");
std::vector<SerfRow> run_serf_optimization(const RunConfig& config, int workers);

/// CSV writers. Each begins with `#` metadata lines (constants hash and the
/// config echo) followed by a header row.
void write_sweep_csv(std::ostream& out, const RunConfig& config,
                     const std::vector<SceneRow>& rows, bool transverse);
void write_serf_csv(std::ostream& out, const RunConfig& config, const std::vector<SerfRow>& rows);

/// JSON sidecar: command, config echo, constants table and hash, row count.
std::string metadata_json(const RunConfig& config, const std::string& command,
                          std::size_t rows, const std::vector<std::string>& columns);

std::vector<std::string> sweep_columns(bool transverse);
std::vector<std::string> serf_columns();

}  // namespace cellsim
