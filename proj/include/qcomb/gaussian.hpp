#pragma once

// Gaussian-state algebra for the handful of sideband modes that beat with a
// single comb line. Quadratures are dimensionless with vacuum variance 1/2,
// so the complex-operator variance <X^dag X> of vacuum is 1.

#include <cstddef>

#include <Eigen/Dense>

namespace qcomb {

/// Linear squeezing gain G = e^{2r} >= 1. An infinite gain is accepted and
/// stands for the ideal-squeezing limit of the closed-form variance formulas.
class SqueezeGain {
  public:
    constexpr SqueezeGain() = default;

    static SqueezeGain linear(double g);
    static SqueezeGain decibels(double db);
    static SqueezeGain none() { return SqueezeGain{}; }

    double value() const noexcept { return g_; }
    double db() const noexcept;
    bool is_infinite() const noexcept;

    friend bool operator==(SqueezeGain, SqueezeGain) = default;

  private:
    explicit constexpr SqueezeGain(double g) : g_(g) {}
    double g_ = 1.0;
};

/// Mean vector and symmetrized covariance over `mode_count` modes, ordered
/// (q1, p1, q2, p2, ...).
class GaussianState {
  public:
    GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

    std::size_t mode_count() const noexcept { return static_cast<std::size_t>(mean_.size() / 2); }
    const Eigen::VectorXd &mean() const noexcept { return mean_; }
    const Eigen::MatrixXd &covariance() const noexcept { return cov_; }

    /// 2x2 covariance block of one mode.
    Eigen::Matrix2d mode_covariance(std::size_t mode) const;

    /// Smallest eigenvalue of covariance + (i/2) Omega. Non-negative (up to
    /// rounding) for every physical state.
    double uncertainty_margin() const;

    /// Symmetry to 1e-12 and the uncertainty relation to `tolerance`.
    bool is_physical(double tolerance = 1e-9) const;

  private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
};

GaussianState vacuum_state(std::size_t mode_count);

/// Two-mode squeezed vacuum: var(q+) = var(p-) = 1/(2G), var(q-) = var(p+) = G/2
/// for the joint modes a_pm = (a1 +- a2)/sqrt2.
GaussianState tmsv_state(SqueezeGain gain);

/// Thermal-loss channel a -> sqrt(kappa) a + sqrt(1-kappa) e on one mode, with
/// the environment mode e thermal at mean occupation `thermal_occupation`.
GaussianState apply_loss(const GaussianState &state, std::size_t mode, double transmissivity,
                         double thermal_occupation = 0.0);

/// Phase shift a -> e^{i phi} a on one mode.
GaussianState apply_phase(const GaussianState &state, std::size_t mode, double phi);

/// <X^dag X> for X = a1 e^{i theta} + a2^dag e^{-i theta} on a TMSV pair of
/// gain G:  [(G^2 + 1) - (G^2 - 1) cos(2 theta)] / (2G).
double joint_quadrature_variance(SqueezeGain gain, double phase_mismatch);

/// <X^dag X> of the same operator evaluated on an arbitrary state's modes
/// (`first`, `second`), using the decomposition
///   X = cos(theta) q+ - sin(theta) p+ + i [cos(theta) p- + sin(theta) q-].
/// Assumes zero mean on the two modes.
double joint_quadrature_variance(const GaussianState &state, std::size_t first, std::size_t second,
                                 double phase_mismatch);

}  // namespace qcomb
