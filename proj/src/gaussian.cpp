#include "qcomb/gaussian.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <limits>

#include <fmt/format.h>

#include "qcomb/errors.hpp"

namespace qcomb {

namespace {

void check_mode(const GaussianState &state, std::size_t mode) {
    if (mode >= state.mode_count()) {
        throw InvalidArgument(
            fmt::format("mode index {} out of range for a {}-mode state", mode, state.mode_count()));
    }
}

}  // namespace

SqueezeGain SqueezeGain::linear(double g) {
    if (std::isnan(g) || g < 1.0) {
        throw InvalidArgument(fmt::format("squeezing gain must satisfy G >= 1, got {}", g));
    }
    return SqueezeGain{g};
}

SqueezeGain SqueezeGain::decibels(double db) {
    if (std::isnan(db) || db < 0.0) {
        throw InvalidArgument(fmt::format("squeezing gain in dB must be >= 0, got {}", db));
    }
    return SqueezeGain{std::pow(10.0, db / 10.0)};
}

double SqueezeGain::db() const noexcept { return 10.0 * std::log10(g_); }

bool SqueezeGain::is_infinite() const noexcept { return std::isinf(g_); }

GaussianState::GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : mean_(std::move(mean)), cov_(std::move(covariance)) {
    if (mean_.size() == 0 || mean_.size() % 2 != 0) {
        throw InvalidArgument("Gaussian state mean must have even, non-zero length");
    }
    if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
        throw InvalidArgument(fmt::format("covariance must be {0}x{0}, got {1}x{2}", mean_.size(),
                                          cov_.rows(), cov_.cols()));
    }
}

Eigen::Matrix2d GaussianState::mode_covariance(std::size_t mode) const {
    check_mode(*this, mode);
    const auto k = static_cast<Eigen::Index>(2 * mode);
    return cov_.block<2, 2>(k, k);
}

double GaussianState::uncertainty_margin() const {
    const auto dim = cov_.rows();
    Eigen::MatrixXcd h = cov_.cast<std::complex<double>>();
    for (Eigen::Index k = 0; k < dim; k += 2) {
        h(k, k + 1) += std::complex<double>(0.0, 0.5);
        h(k + 1, k) -= std::complex<double>(0.0, 0.5);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

bool GaussianState::is_physical(double tolerance) const {
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        return false;
    }
    return uncertainty_margin() >= -tolerance;
}

GaussianState vacuum_state(std::size_t mode_count) {
    if (mode_count == 0) {
        throw InvalidArgument("vacuum_state needs at least one mode");
    }
    const auto dim = static_cast<Eigen::Index>(2 * mode_count);
    return GaussianState(Eigen::VectorXd::Zero(dim), 0.5 * Eigen::MatrixXd::Identity(dim, dim));
}

GaussianState tmsv_state(SqueezeGain gain) {
    const double g = gain.value();
    if (gain.is_infinite()) {
        throw InvalidArgument("tmsv_state needs a finite squeezing gain");
    }
    const double diag = (g + 1.0 / g) / 4.0;
    const double corr = (g - 1.0 / g) / 4.0;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(4, 4);
    cov.diagonal().setConstant(diag);
    // q1 q2 anti-correlated, p1 p2 correlated: q+ and p- squeezed.
    cov(0, 2) = cov(2, 0) = -corr;
    cov(1, 3) = cov(3, 1) = corr;
    return GaussianState(Eigen::VectorXd::Zero(4), cov);
}

GaussianState apply_loss(const GaussianState &state, std::size_t mode, double transmissivity,
                         double thermal_occupation) {
    check_mode(state, mode);
    if (!(transmissivity >= 0.0 && transmissivity <= 1.0)) {
        throw InvalidArgument(fmt::format("transmissivity must lie in [0, 1], got {}", transmissivity));
    }
    if (!(thermal_occupation >= 0.0)) {
        throw InvalidArgument(
            fmt::format("thermal occupation must be >= 0, got {}", thermal_occupation));
    }
    const double amp = std::sqrt(transmissivity);
    const auto k = static_cast<Eigen::Index>(2 * mode);

    Eigen::VectorXd mean = state.mean();
    mean.segment<2>(k) *= amp;

    Eigen::MatrixXd cov = state.covariance();
    cov.middleRows(k, 2) *= amp;
    cov.middleCols(k, 2) *= amp;
    cov.block<2, 2>(k, k) += (1.0 - transmissivity) * (thermal_occupation + 0.5) *
                             Eigen::Matrix2d::Identity();
    return GaussianState(std::move(mean), std::move(cov));
}

GaussianState apply_phase(const GaussianState &state, std::size_t mode, double phi) {
    check_mode(state, mode);
    const auto k = static_cast<Eigen::Index>(2 * mode);
    Eigen::Matrix2d rot;
    rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);

    Eigen::VectorXd mean = state.mean();
    mean.segment<2>(k) = rot * mean.segment<2>(k);

    Eigen::MatrixXd cov = state.covariance();
    cov.middleRows(k, 2) = (rot * cov.middleRows(k, 2)).eval();
    cov.middleCols(k, 2) = (cov.middleCols(k, 2) * rot.transpose()).eval();
    return GaussianState(std::move(mean), std::move(cov));
}

double joint_quadrature_variance(SqueezeGain gain, double phase_mismatch) {
    const double c2 = std::cos(2.0 * phase_mismatch);
    const double g = gain.value();
    if (gain.is_infinite()) {
        // G (1 - cos 2theta)/2 + (1 + cos 2theta)/(2G) as G -> infinity.
        return (1.0 - c2) == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return ((g * g + 1.0) - (g * g - 1.0) * c2) / (2.0 * g);
}

double joint_quadrature_variance(const GaussianState &state, std::size_t first, std::size_t second,
                                 double phase_mismatch) {
    check_mode(state, first);
    check_mode(state, second);
    if (first == second) {
        throw InvalidArgument("joint quadrature needs two distinct modes");
    }
    const double c = std::cos(phase_mismatch);
    const double s = std::sin(phase_mismatch);
    const double r = 1.0 / std::sqrt(2.0);

    // Weights over (q1, p1, q2, p2) of the Hermitian real and imaginary parts.
    const Eigen::Vector4d w_real(c * r, -s * r, c * r, -s * r);
    const Eigen::Vector4d w_imag(s * r, c * r, -s * r, -c * r);

    const std::array<Eigen::Index, 4> idx = {
        static_cast<Eigen::Index>(2 * first), static_cast<Eigen::Index>(2 * first + 1),
        static_cast<Eigen::Index>(2 * second), static_cast<Eigen::Index>(2 * second + 1)};
    Eigen::Matrix4d sub;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            sub(i, j) = state.covariance()(idx[i], idx[j]);
        }
    }
    // Re X and Im X commute, so <X^dag X> = var(Re X) + var(Im X).
    return w_real.dot(sub * w_real) + w_imag.dot(sub * w_imag);
}

}  // namespace qcomb
