// Scenario parameters, unit conversion, node placement and power split.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "risidd/common.hpp"
#include "risidd/rng.hpp"

namespace risidd {

enum class RisMode { passive, active };

inline const char* to_string(RisMode m) {
    return m == RisMode::passive ? "passive" : "active";
}

inline RisMode ris_mode_from_string(const std::string& s) {
    if (s == "passive") return RisMode::passive;
    if (s == "active") return RisMode::active;
    throw std::invalid_argument("unknown RIS mode: " + s);
}

inline double dbm_to_linear(double p_dbm) {
    if (!std::isfinite(p_dbm)) throw std::invalid_argument("power in dBm must be finite");
    return std::pow(10.0, p_dbm / 10.0);
}

inline double linear_to_db(double p) { return 10.0 * std::log10(p); }

using Point2 = std::array<double, 2>;

inline double distance(const Point2& a, const Point2& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

// All scenario knobs.  Immutable after validate(); shared read-only
// across parallel trials.
struct SystemConfig {
    int K = 4;                      // users
    int M = 8;                      // AP antennas
    int N = 16;                     // RIS elements
    RisMode ris_mode = RisMode::passive;
    double sigma_s2_dbm = -100.0;   // static noise power at the AP
    double sigma_v2_dbm = 0.0;      // RIS dynamic noise, active mode only
    double pt_per_user_dbm = 6.0;   // total transmit power / K
    int tau = 1;                    // IDD feedback exchanges (0 = linear receiver)
    int ldpc_n = 512;
    double ldpc_rate = 0.5;
    int ldpc_max_inner = 10;        // BP iterations per decoder activation
    int frames = 200;               // Monte Carlo trials per sweep point
    std::uint64_t seed = 1;
    int n_alt = 3;                  // alternating reflection-design rounds

    // Placement parameters.  Per-trial user positions are drawn from a
    // disc of user_radius around (user_center_x, user_center_y); the RIS
    // sits at (ris_distance, ris_height); the AP at the origin.
    double span_L = 400.0;
    double ris_distance = 0.0;
    double ris_height = 10.0;
    double user_radius = 5.0;

    double sigma_s2() const { return dbm_to_linear(sigma_s2_dbm); }

    // Dynamic RIS noise power.  A passive surface injects none, whatever
    // the configured sigma_v2_dbm says.
    double sigma_v2() const {
        return ris_mode == RisMode::active ? dbm_to_linear(sigma_v2_dbm) : 0.0;
    }

    int info_bits() const { return static_cast<int>(std::lround(ldpc_n * ldpc_rate)); }
    int symbols_per_frame() const { return ldpc_n / 2; }

    void validate() const {
        if (K <= 0 || M <= 0 || N < 0) throw std::invalid_argument("K, M positive and N >= 0 required");
        if (K > M) throw std::invalid_argument("detector requires K <= M");
        if (!std::isfinite(sigma_s2_dbm) || !std::isfinite(pt_per_user_dbm))
            throw std::invalid_argument("powers must be finite");
        if (ris_mode == RisMode::active && !std::isfinite(sigma_v2_dbm))
            throw std::invalid_argument("active mode requires finite sigma_v2");
        if (ldpc_n <= 0 || ldpc_n % 2 != 0) throw std::invalid_argument("ldpc_n must be positive and even");
        if (!(ldpc_rate > 0.0 && ldpc_rate < 1.0)) throw std::invalid_argument("ldpc_rate must lie in (0,1)");
        const double m_rows = ldpc_n * (1.0 - ldpc_rate);
        if (std::abs(m_rows - std::lround(m_rows)) > 1e-9)
            throw std::invalid_argument("ldpc_n*(1-rate) must be integral");
        if (tau < 0) throw std::invalid_argument("tau must be non-negative");
        if (frames <= 0) throw std::invalid_argument("frames must be positive");
        if (n_alt < 0) throw std::invalid_argument("n_alt must be non-negative");
        if (ldpc_max_inner <= 0) throw std::invalid_argument("ldpc_max_inner must be positive");
        if (user_radius < 0) throw std::invalid_argument("user_radius must be non-negative");
        if (span_L <= 2.0 * kMinDistance) throw std::invalid_argument("span_L too small");
    }
};

// Desk-scale profile: CI-friendly runtimes, same trends.
inline SystemConfig desk_profile() {
    SystemConfig c;
    c.K = 4; c.M = 8; c.N = 16; c.frames = 200;
    return c;
}

// Dimensions used throughout the reference experiments.
inline SystemConfig paper_profile() {
    SystemConfig c;
    c.K = 12; c.M = 32; c.N = 64; c.frames = 1000;
    return c;
}

// One trial's node layout.
struct Geometry {
    Point2 ap_pos{0.0, 0.0};
    Point2 ris_pos{0.0, 10.0};
    std::vector<Point2> user_pos;
    double L = 400.0;
};

// Uniform draw over the closed disc.
inline std::vector<Point2> place_users(const Point2& center, double radius, int K, Rng& rng) {
    if (radius < 0) throw std::invalid_argument("radius must be non-negative");
    std::vector<Point2> pts(static_cast<std::size_t>(K));
    for (auto& p : pts) {
        const double r = radius * std::sqrt(rng.uniform());
        const double a = 6.283185307179586476925286766559 * rng.uniform();
        p = {center[0] + r * std::cos(a), center[1] + r * std::sin(a)};
    }
    return pts;
}

inline Geometry make_geometry(const SystemConfig& cfg, Rng& rng) {
    Geometry g;
    g.ap_pos = {0.0, 0.0};
    g.ris_pos = {cfg.ris_distance, cfg.ris_height};
    g.L = cfg.span_L;
    g.user_pos = place_users({cfg.span_L, 0.0}, cfg.user_radius, cfg.K, rng);
    return g;
}

// Per-user transmit power and RIS amplification budget, in linear mW.
// p_user holds the physical per-user power; sigma_x2 is the symbol
// energy after code-rate normalization (p_user / R), so that energy per
// information bit is held fixed across code rates.
struct PowerBudget {
    double p_user = 0.0;
    double p_ris = 0.0;
    double sigma_x2 = 0.0;
};

inline PowerBudget split_power(const SystemConfig& cfg) {
    const double per_user_total = dbm_to_linear(cfg.pt_per_user_dbm);
    const double p_total = cfg.K * per_user_total;
    if (!(p_total > 0.0)) throw std::invalid_argument("total power must be positive");
    PowerBudget b;
    if (cfg.ris_mode == RisMode::active) {
        b.p_user = 0.9 * p_total / cfg.K;
        // Anchor on p_user so K*p_user + p_ris == P_T without rounding slack.
        b.p_ris = p_total - cfg.K * b.p_user;
    } else {
        b.p_user = per_user_total;
        b.p_ris = 0.0;
    }
    b.sigma_x2 = b.p_user / cfg.ldpc_rate;
    return b;
}

// FNV-1a over a canonical field serialization; stored in every output
// row for provenance.
inline std::string config_hash(const SystemConfig& cfg) {
    char buf[640];
    std::snprintf(buf, sizeof buf,
                  "K=%d;M=%d;N=%d;mode=%s;ss=%.17g;sv=%.17g;pt=%.17g;tau=%d;"
                  "n=%d;R=%.17g;inner=%d;frames=%d;seed=%llu;alt=%d;"
                  "L=%.17g;rd=%.17g;rh=%.17g;ur=%.17g",
                  cfg.K, cfg.M, cfg.N, to_string(cfg.ris_mode),
                  cfg.sigma_s2_dbm, cfg.sigma_v2_dbm, cfg.pt_per_user_dbm, cfg.tau,
                  cfg.ldpc_n, cfg.ldpc_rate, cfg.ldpc_max_inner, cfg.frames,
                  static_cast<unsigned long long>(cfg.seed), cfg.n_alt,
                  cfg.span_L, cfg.ris_distance, cfg.ris_height, cfg.user_radius);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char* p = buf; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 0x100000001b3ULL;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

}  // namespace risidd
