// Large-scale (3GPP log-distance) and small-scale (Rayleigh) fading for
// all links, plus the effective-channel and cascade assembly.
//
// Convention: the linear path gain of a link is folded into the channel
// entries themselves (unit-variance Rayleigh scaled by sqrt(gain)), so
// downstream formulas use the matrices directly.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "risidd/common.hpp"
#include "risidd/config.hpp"
#include "risidd/rng.hpp"

namespace risidd {

// Strong-link model, used for the AP-RIS and RIS-user legs.
// Returns the gain in dB (negative).
inline double path_loss_strong(double d) {
    if (d < kMinDistance) throw std::domain_error("path_loss_strong: d below reference distance");
    return -(37.3 + 22.0 * std::log10(d));
}

// Weak-link model for the obstructed AP-user connection.
inline double path_loss_weak(double d) {
    if (d < kMinDistance) throw std::domain_error("path_loss_weak: d below reference distance");
    return -(41.2 + 28.7 * std::log10(d));
}

inline double path_gain_strong(double d) { return std::pow(10.0, path_loss_strong(d) / 10.0); }
inline double path_gain_weak(double d) { return std::pow(10.0, path_loss_weak(d) / 10.0); }

// Distances are clamped to the model reference distance before use.
inline double clamp_distance(double d) { return d < kMinDistance ? kMinDistance : d; }

struct ChannelSet {
    CMat H_direct;  // M x K, columns h_k
    CMat G;         // M x N, AP-RIS link
    CMat F;         // N x K, columns f_k
};

struct CascadeSet {
    std::vector<CMat> A;  // K matrices, A_k = G diag(f_k), each M x N
    CMat effective;       // M x K, columns h_k + A_k phi for the phi it was built with
};

// One frame's small-scale fading.  Entry (i,j) ~ CN(0, gain of its link);
// fill order is fixed (H column-major, then G, then F) so a seed pins the
// full draw.
inline ChannelSet draw_channels(const SystemConfig& cfg, const Geometry& geo, Rng& rng) {
    if (static_cast<int>(geo.user_pos.size()) != cfg.K)
        throw std::invalid_argument("draw_channels: geometry/user count mismatch");
    ChannelSet ch;
    ch.H_direct.resize(cfg.M, cfg.K);
    ch.G.resize(cfg.M, cfg.N);
    ch.F.resize(cfg.N, cfg.K);

    for (int k = 0; k < cfg.K; ++k) {
        const double gain = path_gain_weak(clamp_distance(distance(geo.ap_pos, geo.user_pos[k])));
        for (int i = 0; i < cfg.M; ++i) ch.H_direct(i, k) = rng.cnormal(gain);
    }
    const double gain_g = cfg.N > 0 ? path_gain_strong(clamp_distance(distance(geo.ap_pos, geo.ris_pos))) : 0.0;
    for (int j = 0; j < cfg.N; ++j)
        for (int i = 0; i < cfg.M; ++i) ch.G(i, j) = rng.cnormal(gain_g);
    for (int k = 0; k < cfg.K; ++k) {
        const double gain = cfg.N > 0 ? path_gain_strong(clamp_distance(distance(geo.ris_pos, geo.user_pos[k]))) : 0.0;
        for (int j = 0; j < cfg.N; ++j) ch.F(j, k) = rng.cnormal(gain);
    }
    return ch;
}

// Effective channel: column k is h_k + G diag(phi) f_k.
inline CMat effective_channel(const ChannelSet& ch, const CVec& phi) {
    if (phi.size() != ch.G.cols() || ch.F.rows() != ch.G.cols() || ch.F.cols() != ch.H_direct.cols())
        throw std::invalid_argument("effective_channel: dimension mismatch");
    return ch.H_direct + ch.G * phi.asDiagonal() * ch.F;
}

// A_k = G diag(f_k); `effective` is filled against the supplied phi.
inline CascadeSet cascade_matrices(const ChannelSet& ch, const CVec& phi) {
    CascadeSet cs;
    const int K = static_cast<int>(ch.F.cols());
    cs.A.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) cs.A.emplace_back(ch.G * ch.F.col(k).asDiagonal());
    cs.effective = effective_channel(ch, phi);
    return cs;
}

}  // namespace risidd
