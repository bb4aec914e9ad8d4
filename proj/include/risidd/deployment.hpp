// Closed-form single-antenna deployment study: SNR as a function of the
// surface position along the AP-user axis, for passive and active
// surfaces, plus the analytic optimal-placement sets.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "risidd/channel.hpp"
#include "risidd/common.hpp"
#include "risidd/config.hpp"

namespace risidd {

// Which path-loss model attenuates the direct AP-user link in the
// closed-form analysis.  The reflected legs always use the strong model.
enum class DirectModel { strong, weak };

struct SisoScenario {
    double L = 400.0;                 // AP-user span (m)
    int N = 64;                       // element count
    double sigma_x2 = dbm_to_linear(6.0);
    double sigma_n2 = dbm_to_linear(-100.0);
    double sigma_v2 = 0.0;            // surface noise (active only)
    double p_ris_fraction = 0.1;      // surface power budget / transmit power
    DirectModel direct_model = DirectModel::strong;

    void validate() const {
        if (!(L > 2.0 * kMinDistance)) throw std::invalid_argument("SisoScenario: span too short");
        if (!(sigma_x2 > 0.0) || !(sigma_n2 > 0.0))
            throw std::invalid_argument("SisoScenario: powers must be positive");
        if (sigma_v2 < 0.0) throw std::invalid_argument("SisoScenario: negative noise");
        if (!(p_ris_fraction > 0.0) || !(p_ris_fraction < 1.0))
            throw std::invalid_argument("SisoScenario: power fraction outside (0,1)");
        if (N < 0) throw std::invalid_argument("SisoScenario: negative N");
    }

    double direct_gain() const {
        return direct_model == DirectModel::strong ? path_gain_strong(L) : path_gain_weak(L);
    }
};

namespace detail {
inline void check_deploy_domain(double d, const SisoScenario& sc) {
    if (!(d >= kMinDistance) || !(d <= sc.L - kMinDistance))
        throw std::domain_error("deployment: d outside [d_min, L - d_min]");
}
}  // namespace detail

// Passive surface, co-phased unit-modulus elements (|sum phi|^2 = N^2):
//   SNR(d) = (A_h + A_g A_f N^2) sx2 / sn2,
// A_g at the AP-side leg d, A_f at the user-side leg L-d.
inline double passive_snr(double d, const SisoScenario& sc) {
    detail::check_deploy_domain(d, sc);
    const double ag = path_gain_strong(d);
    const double af = path_gain_strong(sc.L - d);
    const double n2 = static_cast<double>(sc.N) * static_cast<double>(sc.N);
    return (sc.direct_gain() + ag * af * n2) * sc.sigma_x2 / sc.sigma_n2;
}

// The reflected product A_g*A_f is maximized where d*(L-d) is smallest,
// i.e. at either end of the feasible interval.
inline std::array<double, 2> passive_optimal_d(const SisoScenario& sc) {
    return {kMinDistance, sc.L - kMinDistance};
}

// Active surface with its amplification budget spent with equality,
// |sum phi|^2 = sx2 / (q (A_f sx2 + sv2)) with q = 1/p_ris_fraction:
//   SNR = (q A_h sx2 sv2 + q A_h A_f sx2^2 + A_g A_f sx2^2)
//       / (A_f sv2 sx2 + q A_f sx2 sn2 + q sn2 sv2).
inline double active_snr_terms(double ah, double ag, double af, const SisoScenario& sc) {
    const double q = 1.0 / sc.p_ris_fraction;
    const double sx2 = sc.sigma_x2, sv2 = sc.sigma_v2, sn2 = sc.sigma_n2;
    const double num = q * ah * sx2 * sv2 + q * ah * af * sx2 * sx2 + ag * af * sx2 * sx2;
    const double den = af * sv2 * sx2 + q * af * sx2 * sn2 + q * sn2 * sv2;
    return num / den;
}

inline double active_snr(double d, const SisoScenario& sc) {
    detail::check_deploy_domain(d, sc);
    return active_snr_terms(sc.direct_gain(), path_gain_strong(d), path_gain_strong(sc.L - d), sc);
}

// Limit of active_snr_terms as the user-side leg gain grows without bound
// while A_g = A_h: (q+1) A_h sx2 / (sv2 + q sn2).
inline double active_near_user_limit(double ah, const SisoScenario& sc) {
    const double q = 1.0 / sc.p_ris_fraction;
    return (q + 1.0) * ah * sc.sigma_x2 / (sc.sigma_v2 + q * sc.sigma_n2);
}

struct CurvePoint {
    double d = 0.0;
    double snr = 0.0;
};

// Maximal runs of strictly monotone SNR along the grid; direction is +1
// (increasing), -1 (decreasing), or 0 (flat).
struct MonotoneSegment {
    std::size_t first = 0;
    std::size_t last = 0;
    int direction = 0;
};

struct DeploymentCurve {
    std::vector<CurvePoint> points;
    std::vector<MonotoneSegment> segments;
};

inline DeploymentCurve deployment_curve(RisMode mode, const SisoScenario& sc,
                                        const std::vector<double>& grid) {
    sc.validate();
    DeploymentCurve curve;
    curve.points.reserve(grid.size());
    for (double d : grid)
        curve.points.push_back({d, mode == RisMode::passive ? passive_snr(d, sc) : active_snr(d, sc)});
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        const double a = curve.points[i].snr, b = curve.points[i + 1].snr;
        const int dir = (b > a) - (b < a);
        if (!curve.segments.empty() && curve.segments.back().direction == dir)
            curve.segments.back().last = i + 1;
        else
            curve.segments.push_back({i, i + 1, dir});
    }
    return curve;
}

}  // namespace risidd
