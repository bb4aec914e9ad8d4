// Reflection-coefficient design: the regularized least-squares solve for
// the unconstrained vector, passive/active truncation onto the feasible
// set, and the alternating design loop that re-derives the receive
// filters between solves.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "risidd/channel.hpp"
#include "risidd/common.hpp"
#include "risidd/config.hpp"
#include "risidd/detector.hpp"

namespace risidd {

struct ReflectionState {
    CVec phi;
    RisMode mode = RisMode::passive;
};

struct ReflectionSolveInfo {
    double condition = 0.0;  // ratio of largest to smallest retained eigenvalue
    int rank = 0;            // retained eigenvalue count
};

// Minimizer of J(phi) = sum_i ||e_i - W(h_i + A_i phi)||^2 + rho ||W G phi||^2
// with rho = sigma_v2/sigma_x2: solves
//   [sum_i (W A_i)^H (W A_i) + rho (W G)^H (W G)] phi = sum_i (W A_i)^H (e_i - W hbar_i).
// The normal matrix is Hermitian PSD but rank-deficient whenever N exceeds
// the number of independent terms (rank(sum_i (WA_i)^H(WA_i)) <= K^2), so the
// system is solved by eigendecomposition, truncating the null space; the
// right-hand side lies in the range, making this the minimum-norm solution.
inline CVec solve_reflection(const CMat& W, const std::vector<CMat>& A, const CMat& effective,
                             const CMat& G, double sigma_v2, double sigma_x2,
                             ReflectionSolveInfo* info = nullptr) {
    const Eigen::Index N = G.cols();
    const Eigen::Index K = static_cast<Eigen::Index>(A.size());
    if (effective.cols() != K) throw std::invalid_argument("solve_reflection: K mismatch");
    if (N == 0) return CVec(0);

    CMat S = CMat::Zero(N, N);
    CVec psi = CVec::Zero(N);
    for (Eigen::Index i = 0; i < K; ++i) {
        const CMat wa = W * A[i];
        S.noalias() += wa.adjoint() * wa;
        CVec e = CVec::Zero(K);
        e[i] = 1.0;
        psi.noalias() += wa.adjoint() * (e - W * effective.col(i));
    }
    if (sigma_v2 > 0.0) {
        const CMat wg = W * G;
        S.noalias() += (sigma_v2 / sigma_x2) * wg.adjoint() * wg;
    }

    Eigen::SelfAdjointEigenSolver<CMat> eig(S);
    if (eig.info() != Eigen::Success)
        throw ConditioningError("solve_reflection: eigendecomposition failed", 0.0);
    const RVec& lam = eig.eigenvalues();
    const double lam_max = lam[N - 1];
    if (!(lam_max > 0.0)) {
        if (psi.norm() == 0.0) return CVec::Zero(N);
        throw ConditioningError("solve_reflection: zero normal matrix with nonzero target", 0.0);
    }
    const double tol = lam_max * static_cast<double>(N) * std::numeric_limits<double>::epsilon();
    RVec inv_lam = RVec::Zero(N);
    int rank = 0;
    double lam_min_kept = lam_max;
    for (Eigen::Index i = 0; i < N; ++i) {
        if (lam[i] > tol) {
            inv_lam[i] = 1.0 / lam[i];
            lam_min_kept = std::min(lam_min_kept, lam[i]);
            ++rank;
        }
    }
    const CVec phi = eig.eigenvectors() * (inv_lam.asDiagonal() * (eig.eigenvectors().adjoint() * psi));
    if (!phi.allFinite())
        throw ConditioningError("solve_reflection: non-finite solution", lam_max / lam_min_kept);
    // Stationarity check; a large residual means the target escaped the
    // retained range and the solve cannot be trusted.
    const double resid = (S * phi - psi).norm();
    if (resid > 1e-9 * std::max(psi.norm(), 1e-300))
        throw ConditioningError("solve_reflection: inconsistent normal equations",
                                lam_max / lam_min_kept);
    if (info) {
        info->condition = lam_max / lam_min_kept;
        info->rank = rank;
    }
    return phi;
}

inline CVec solve_reflection(const CMat& W, const CascadeSet& cascades, const CMat& G,
                             double sigma_v2, double sigma_x2,
                             ReflectionSolveInfo* info = nullptr) {
    return solve_reflection(W, cascades.A, cascades.effective, G, sigma_v2, sigma_x2, info);
}

// Passive feasibility: project every coefficient to unit modulus.  An
// exactly zero entry carries no phase information and maps to 1.
inline ReflectionState truncate_passive(const CVec& phi_o) {
    ReflectionState st;
    st.mode = RisMode::passive;
    st.phi.resize(phi_o.size());
    for (Eigen::Index n = 0; n < phi_o.size(); ++n) {
        const double mag = std::abs(phi_o[n]);
        st.phi[n] = (mag == 0.0) ? cplx(1.0, 0.0) : phi_o[n] / mag;
    }
    return st;
}

// Power drawn by an active surface applying phi: amplified incident signal
// energy plus amplified surface noise,
//   sum_i ||diag(phi) f_i||^2 sx2 + ||phi||^2 sv2.
inline double ris_power(const CVec& phi, const CMat& F, double sigma_x2, double sigma_v2) {
    if (F.rows() != phi.size()) throw std::invalid_argument("ris_power: dimension mismatch");
    double p = 0.0;
    for (Eigen::Index n = 0; n < phi.size(); ++n)
        p += std::norm(phi[n]) * (F.row(n).squaredNorm() * sigma_x2 + sigma_v2);
    return p;
}

// Active feasibility: scale so the reflected power meets the budget with
// equality.  A zero design cannot be scaled onto the constraint.
inline ReflectionState truncate_active(const CVec& phi_o, const CMat& F, double sigma_x2,
                                       double sigma_v2, double p_ris) {
    const double p = ris_power(phi_o, F, sigma_x2, sigma_v2);
    if (!(p > 0.0)) throw std::invalid_argument("truncate_active: zero-power design");
    ReflectionState st;
    st.mode = RisMode::active;
    st.phi = std::sqrt(p_ris / p) * phi_o;
    return st;
}

// The design criterion J(phi) evaluated directly from its definition.
inline double design_objective(const CMat& W, const CMat& H_direct, const std::vector<CMat>& A,
                               const CMat& G, const CVec& phi, double rho) {
    const Eigen::Index K = static_cast<Eigen::Index>(A.size());
    double j = 0.0;
    for (Eigen::Index i = 0; i < K; ++i) {
        CVec e = CVec::Zero(K);
        e[i] = 1.0;
        j += (e - W * (H_direct.col(i) + A[i] * phi)).squaredNorm();
    }
    if (rho > 0.0) j += rho * (W * (G * phi)).squaredNorm();
    return j;
}

struct DesignResult {
    ReflectionState state;
    CMat W;                        // filters matched to the final reflection
    std::vector<double> objective; // J after each truncation
    ReflectionSolveInfo solve_info;
    int subunit_entries = 0;       // active designs: count of |phi_n| < 1
};

// Alternate between the receive-filter bank for the current reflection and
// the reflection solve for the current filters, truncating onto the
// feasible set each round.  Starts from the all-ones reflection.
inline DesignResult alternating_design(const ChannelSet& ch, const SystemConfig& cfg,
                                       const PowerBudget& budget) {
    const Eigen::Index N = ch.G.cols();
    const double sx2 = budget.sigma_x2;
    const double sv2 = cfg.sigma_v2();
    const double ss2 = cfg.sigma_s2();

    DesignResult res;
    res.state.mode = cfg.ris_mode;
    if (N == 0) {
        res.state.phi = CVec(0);
        res.W = mmse_filter_bank(ch.H_direct, noise_covariance(ch.G, res.state.phi, sv2, ss2), sx2);
        return res;
    }

    CVec phi = CVec::Ones(N);
    if (cfg.ris_mode == RisMode::active)
        phi = truncate_active(phi, ch.F, sx2, sv2, budget.p_ris).phi;

    std::vector<CMat> A(static_cast<std::size_t>(cfg.K));
    for (int i = 0; i < cfg.K; ++i) A[static_cast<std::size_t>(i)] = ch.G * ch.F.col(i).asDiagonal();

    const double rho = (sv2 > 0.0) ? sv2 / sx2 : 0.0;
    for (int round = 0; round < cfg.n_alt; ++round) {
        const CMat Heff = effective_channel(ch, phi);
        const CMat W = mmse_filter_bank(Heff, noise_covariance(ch.G, phi, sv2, ss2), sx2);
        const CVec phi_o = solve_reflection(W, A, Heff, ch.G, sv2, sx2, &res.solve_info);
        const ReflectionState st = (cfg.ris_mode == RisMode::active)
                                       ? truncate_active(phi_o, ch.F, sx2, sv2, budget.p_ris)
                                       : truncate_passive(phi_o);
        phi = st.phi;
        res.W = W;
        res.objective.push_back(design_objective(W, ch.H_direct, A, ch.G, phi, rho));
    }

    res.state.phi = phi;
    if (cfg.n_alt <= 0)
        res.W = mmse_filter_bank(effective_channel(ch, phi), noise_covariance(ch.G, phi, sv2, ss2), sx2);
    if (cfg.ris_mode == RisMode::active)
        for (Eigen::Index n = 0; n < N; ++n)
            if (std::abs(phi[n]) < 1.0) ++res.subunit_entries;
    return res;
}

}  // namespace risidd
