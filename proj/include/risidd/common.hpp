// Shared aliases and error types for the RIS-assisted IDD link simulator.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace risidd {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// LLRs are clipped to this magnitude before any tanh-domain update.
inline constexpr double kLlrClip = 30.0;

// Minimum distance fed into the log-distance path-loss models (their
// reference distance; the models diverge below it).
inline constexpr double kMinDistance = 1.0;

// Raised when a linear system is too ill-conditioned to trust.
class ConditioningError : public std::runtime_error {
public:
    ConditioningError(const std::string& what, double condition_estimate)
        : std::runtime_error(what), condition(condition_estimate) {}
    double condition;
};

inline double clip_llr(double v) {
    if (v > kLlrClip) return kLlrClip;
    if (v < -kLlrClip) return -kLlrClip;
    return v;
}

}  // namespace risidd
