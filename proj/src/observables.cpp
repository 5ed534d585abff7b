#include "cellsim/observables.hpp"

namespace cellsim {

namespace {

double disc_power(const Field& intensity, const Grid& g, int i) {
    double sum = 0.0;
    for (int j = 1; j < g.nr; ++j) sum += disc_weight(g, j) * intensity(i, j);
    return sum;
}

}  // namespace

double incident_power(const Solution& sol, const Scene& scene) {
    return disc_power(sol.intensity, scene.grid, 0);
}

double transmission(const Solution& sol, const Scene& scene) {
    const double in = incident_power(sol, scene);
    if (in <= 0.0) return 1.0;
    return disc_power(sol.intensity, scene.grid, scene.grid.nz - 1) / in;
}

double average_polarization(const Solution& sol, const Scene& scene) {
    return volume_average(sol.polarization, scene.grid, scene.geometry);
}

double absorption_per_polarization(const Scene& scene, double input_power) {
    const auto& m = scene.medium;
    return scene.geometry.volume() * m.gamma_rel * m.g_absorb / (input_power * m.g_pump);
}

double wall_loss(const Solution& sol, const Scene& scene) {
    const double in = incident_power(sol, scene);
    if (in <= 0.0) return 0.0;
    return 1.0 - transmission(sol, scene) -
           absorption_per_polarization(scene, in) * average_polarization(sol, scene);
}

double balance_residual(const Solution& sol, const Scene& scene) {
    const double in = incident_power(sol, scene);
    if (in <= 0.0) return 0.0;
    const Grid& g = scene.grid;
    Field spin(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        spin.values()[k] = longitudinal_spin(sol.polarization.values()[k]);
    }
    const auto& m = scene.medium;
    const double flux = wall_flux_integral(spin, g, scene.geometry);
    const double bracket =
        scene.geometry.volume() * m.gamma_rel * average_polarization(sol, scene) - m.diffusion * flux;
    return (1.0 - transmission(sol, scene)) - m.g_absorb / (in * m.g_pump) * bracket;
}

Observables evaluate(const Solution& sol, const Scene& scene) {
    Observables o;
    o.transmission = transmission(sol, scene);
    o.average_polarization = average_polarization(sol, scene);
    o.wall_loss = wall_loss(sol, scene);
    o.balance_residual = balance_residual(sol, scene);
    return o;
}

}  // namespace cellsim
