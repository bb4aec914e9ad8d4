// Closed-form placement study: where along the AP-user axis should the
// surface sit?  Prints the SNR curve coarsely and the analytic optima.
#include <cstdio>

#include "risidd/deployment.hpp"

int main() {
    risidd::SisoScenario sc;
    sc.sigma_v2 = risidd::dbm_to_linear(-95.0);
    sc.sigma_n2 = risidd::dbm_to_linear(-95.0);

    std::vector<double> grid;
    for (double d = 1.0; d <= 399.0; d += 1.0) grid.push_back(d);

    const auto passive = risidd::deployment_curve(risidd::RisMode::passive, sc, grid);
    const auto active = risidd::deployment_curve(risidd::RisMode::active, sc, grid);

    std::printf("%8s %14s %14s\n", "d (m)", "passive (dB)", "active (dB)");
    for (std::size_t i = 0; i < grid.size(); i += 40)
        std::printf("%8.0f %14.2f %14.2f\n", passive.points[i].d,
                    risidd::linear_to_db(passive.points[i].snr),
                    risidd::linear_to_db(active.points[i].snr));

    const auto ends = risidd::passive_optimal_d(sc);
    std::printf("\npassive optimum: d = %.0f m or d = %.0f m (worst at midspan)\n", ends[0], ends[1]);
    std::printf("active curve: SNR(1 m) - SNR(399 m) = %.2f dB (favors the AP side)\n",
                risidd::linear_to_db(active.points.front().snr) -
                    risidd::linear_to_db(active.points.back().snr));
    return 0;
}
