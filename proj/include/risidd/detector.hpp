// Soft MMSE-SIC detection: symbol priors from decoder LLRs, interference
// cancellation, per-user MMSE filtering, the Gaussian output model
// (x_hat = mu*x + z), LLR generation, and the SINR/sum-rate formulas.
#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "risidd/common.hpp"

namespace risidd {

// Gray-mapped QPSK, (b1,b2) -> sqrt(sigma_x2/2)*((1-2*b1) + j*(1-2*b2)).
inline cplx qpsk_map(std::uint8_t b1, std::uint8_t b2, double sigma_x2) {
    const double a = std::sqrt(sigma_x2 * 0.5);
    return {a * (1.0 - 2.0 * b1), a * (1.0 - 2.0 * b2)};
}

inline CVec modulate(const std::vector<std::uint8_t>& code, double sigma_x2) {
    if (code.size() % 2 != 0) throw std::invalid_argument("modulate: odd bit count");
    CVec x(static_cast<Eigen::Index>(code.size() / 2));
    for (Eigen::Index t = 0; t < x.size(); ++t)
        x[t] = qpsk_map(code[2 * t], code[2 * t + 1], sigma_x2);
    return x;
}

// Soft symbol and residual variance from the two bit LLRs of one QPSK
// symbol.  E[x] = sqrt(sigma_x2/2)*(tanh(L1/2) + j*tanh(L2/2)).
inline std::pair<cplx, double> soft_symbol(double l1, double l2, double sigma_x2) {
    const double a = std::sqrt(sigma_x2 * 0.5);
    const cplx xt(a * std::tanh(0.5 * l1), a * std::tanh(0.5 * l2));
    return {xt, sigma_x2 - std::norm(xt)};
}

// Per-user priors over one frame.  x_tilde and v are K x T; Lc/Ld hold
// one length-n LLR block per user in transmission order (bits 2t, 2t+1
// belong to symbol t).
struct SoftState {
    CMat x_tilde;
    RMat v;
    std::vector<RVec> Lc;
    std::vector<RVec> Ld;
};

inline SoftState soft_state_from_priors(const std::vector<RVec>& Lc, double sigma_x2) {
    SoftState s;
    const int K = static_cast<int>(Lc.size());
    if (K == 0) return s;
    const Eigen::Index T = Lc[0].size() / 2;
    s.x_tilde.resize(K, T);
    s.v.resize(K, T);
    s.Lc = Lc;
    for (int k = 0; k < K; ++k) {
        for (Eigen::Index t = 0; t < T; ++t) {
            auto [xt, vt] = soft_symbol(Lc[k][2 * t], Lc[k][2 * t + 1], sigma_x2);
            s.x_tilde(k, t) = xt;
            s.v(k, t) = vt;
        }
    }
    return s;
}

// y_k = y - Heff * x_tilde_(k), the k-th soft estimate zeroed.
inline CVec sic_cancel(const CVec& y, const CMat& Heff, const CVec& x_tilde, int k) {
    if (y.size() != Heff.rows() || x_tilde.size() != Heff.cols())
        throw std::invalid_argument("sic_cancel: dimension mismatch");
    CVec y_k = y - Heff * x_tilde;
    y_k += Heff.col(k) * x_tilde[k];
    return y_k;
}

// AP-side noise covariance: static noise plus, for an active surface,
// the forwarded RIS noise sigma_v2*(G Phi)(G Phi)^H.
inline CMat noise_covariance(const CMat& G, const CVec& phi, double sigma_v2, double sigma_s2) {
    CMat cov = sigma_s2 * CMat::Identity(G.rows(), G.rows());
    if (sigma_v2 > 0.0 && G.cols() > 0) {
        const CMat gp = G * phi.asDiagonal();
        cov.noalias() += sigma_v2 * gp * gp.adjoint();
    }
    return cov;
}

// Soft-SIC MMSE filter for user k:
//   w_k = sigma_x2 * (Heff V_k Heff^H + noise_cov)^-1 h_k,
// where V_k carries the residual variances with the k-th entry replaced
// by sigma_x2.
inline CVec mmse_filter(const CMat& Heff, int k, const RVec& v, const CMat& noise_cov,
                        double sigma_x2) {
    if (v.size() != Heff.cols()) throw std::invalid_argument("mmse_filter: variance length mismatch");
    RVec vk = v;
    vk[k] = sigma_x2;
    CMat sigma = noise_cov;
    sigma.noalias() += Heff * vk.asDiagonal() * Heff.adjoint();
    Eigen::LLT<CMat> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw ConditioningError("mmse_filter: covariance not positive definite", 0.0);
    return sigma_x2 * llt.solve(Heff.col(k));
}

// All K filters under full-power priors (v_j = sigma_x2 for every j), in
// which case the K inverses share one covariance.  Row k of the result is
// w_k^H.  This is the linear (no-priors) MMSE receiver.
inline CMat mmse_filter_bank(const CMat& Heff, const CMat& noise_cov, double sigma_x2) {
    CMat sigma = noise_cov;
    sigma.noalias() += sigma_x2 * Heff * Heff.adjoint();
    Eigen::LLT<CMat> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw ConditioningError("mmse_filter_bank: covariance not positive definite", 0.0);
    return sigma_x2 * (llt.solve(Heff)).adjoint();
}

// Gaussian model parameters, covariance path:
//   mu  = Re(w^H h_k)
//   eta2 = w^H C_k w - mu^2 sigma_x2,  C_k = Heff V_k Heff^H + noise_cov.
inline std::pair<double, double> gaussian_params(const CVec& w, const CMat& Heff, int k,
                                                 const RVec& v, const CMat& noise_cov,
                                                 double sigma_x2) {
    RVec vk = v;
    vk[k] = sigma_x2;
    CMat ck = noise_cov;
    ck.noalias() += Heff * vk.asDiagonal() * Heff.adjoint();
    const double mu = (w.dot(Heff.col(k))).real();
    const double eta2 = (w.dot(ck * w)).real() - mu * mu * sigma_x2;
    if (!(eta2 > 0.0)) throw std::runtime_error("gaussian_params: non-positive eta2");
    return {mu, eta2};
}

// Shortcut valid for the exact MMSE filter: eta2 = sigma_x2 * mu * (1 - mu).
inline double eta2_mmse_shortcut(double mu, double sigma_x2) {
    const double eta2 = sigma_x2 * mu * (1.0 - mu);
    if (!(eta2 > 0.0)) throw std::runtime_error("eta2_mmse_shortcut: non-positive eta2");
    return eta2;
}

// Detector LLRs for one symbol under x_hat = mu*x + z, z ~ CN(0, eta2).
// The model posterior is the channel term plus the prior; subtracting the
// prior back out keeps L_D extrinsic.
inline std::pair<double, double> extrinsic_llr(cplx x_hat, double mu, double eta2,
                                               double lc_re, double lc_im, double sigma_x2) {
    if (!(eta2 > 0.0)) throw std::invalid_argument("extrinsic_llr: eta2 must be positive");
    const double scale = 2.0 * std::sqrt(2.0 * sigma_x2) * mu / eta2;
    const double l_re = (scale * x_hat.real() + lc_re) - lc_re;
    const double l_im = (scale * x_hat.imag() + lc_im) - lc_im;
    return {clip_llr(l_re), clip_llr(l_im)};
}

// Linear-receiver SINR (no SIC):
//   gamma_k = |w^H h_k|^2 sx2 / (sum_{j!=k} |w^H h_j|^2 sx2
//             + ||w^H G Phi||^2 sv2 + ||w||^2 ss2).
inline double sinr_linear(const CVec& w, const CMat& Heff, int k, const CMat& G, const CVec& phi,
                          double sigma_x2, double sigma_v2, double sigma_s2) {
    const CVec wh = Heff.adjoint() * w;  // entries conj(w^H h_j)
    const double sig = std::norm(wh[k]) * sigma_x2;
    double denom = (wh.squaredNorm() - std::norm(wh[k])) * sigma_x2;
    if (sigma_v2 > 0.0 && G.cols() > 0)
        denom += (phi.asDiagonal() * (G.adjoint() * w)).squaredNorm() * sigma_v2;
    denom += w.squaredNorm() * sigma_s2;
    return sig / denom;
}

inline double sum_rate(const RVec& sinr) {
    double r = 0.0;
    for (Eigen::Index k = 0; k < sinr.size(); ++k) {
        if (sinr[k] < 0.0) throw std::invalid_argument("sum_rate: negative SINR");
        r += std::log2(1.0 + sinr[k]);
    }
    return r;
}

// One detector activation over a whole frame.  Filters are recomputed
// once per user per round from block-averaged residual variances; the
// per-symbol cancellation still uses each symbol's own soft estimates.
struct DetectionOutput {
    CMat x_hat;           // K x T
    RVec mu;              // K
    RVec eta2;            // K
    RVec sinr;            // K, Gaussian-model SINR mu^2 sx2 / eta2
    CMat W;               // K x M, row k = w_k^H
    RVec v_bar;           // K
    std::vector<RVec> Ld; // per-user detector LLR blocks
};

inline DetectionOutput detect_round(const CMat& Y, const CMat& Heff, const SoftState& soft,
                                    const CMat& noise_cov, double sigma_x2) {
    const int K = static_cast<int>(Heff.cols());
    const Eigen::Index T = Y.cols();
    DetectionOutput out;
    out.mu.resize(K);
    out.eta2.resize(K);
    out.sinr.resize(K);
    out.v_bar.resize(K);
    out.W.resize(K, Heff.rows());
    for (int k = 0; k < K; ++k) out.v_bar[k] = soft.v.row(k).mean();

    for (int k = 0; k < K; ++k) {
        const CVec w = mmse_filter(Heff, k, out.v_bar, noise_cov, sigma_x2);
        out.W.row(k) = w.adjoint();
        const double mu = (w.dot(Heff.col(k))).real();
        out.mu[k] = mu;
        out.eta2[k] = eta2_mmse_shortcut(mu, sigma_x2);
        out.sinr[k] = mu * mu * sigma_x2 / out.eta2[k];
    }

    // x_hat(k,t) = w_k^H (y_t - Heff x_t + h_k x_kt); the common residual
    // is hoisted out of the per-user loop.
    const CMat resid = Y - Heff * soft.x_tilde;
    out.x_hat = out.W * resid;
    const CVec whh = (out.W * Heff).diagonal();
    for (int k = 0; k < K; ++k)
        out.x_hat.row(k) += whh[k] * soft.x_tilde.row(k);

    out.Ld.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        RVec ld(2 * T);
        const bool have_prior = !soft.Lc.empty();
        for (Eigen::Index t = 0; t < T; ++t) {
            const double lc1 = have_prior ? soft.Lc[k][2 * t] : 0.0;
            const double lc2 = have_prior ? soft.Lc[k][2 * t + 1] : 0.0;
            auto [l1, l2] = extrinsic_llr(out.x_hat(k, t), out.mu[k], out.eta2[k], lc1, lc2, sigma_x2);
            ld[2 * t] = l1;
            ld[2 * t + 1] = l2;
        }
        out.Ld[k] = std::move(ld);
    }
    return out;
}

}  // namespace risidd
