#pragma once

#include "pidsx/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace pidsx {

inline constexpr double psd_tolerance = -1e-10;
inline constexpr double max_condition_number = 1e12;

/// Multivariate normal over a fixed set of coordinates. Zero-dimensional
/// instances are allowed and have density 1 (the empty product).
class gaussian {
public:
    gaussian() = default;
    gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
        if (mean_.size() != cov_.rows() || cov_.rows() != cov_.cols())
            throw validation_error(validation_error::kind::dimension_mismatch,
                                   "gaussian mean/covariance dimensions disagree");
        factorize();
    }

    int dim() const noexcept { return static_cast<int>(mean_.size()); }
    const Eigen::VectorXd& mean() const noexcept { return mean_; }
    const Eigen::MatrixXd& cov() const noexcept { return cov_; }
    bool positive_definite() const noexcept { return pd_; }
    double min_eigenvalue() const noexcept { return min_eig_; }

    /// Symmetric with eigenvalues >= -1e-10.
    bool positive_semidefinite() const {
        if (dim() == 0)
            return true;
        const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
        if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            return false;
        return min_eig_ >= psd_tolerance;
    }

    double log_density(std::span<const double> x) const {
        if (dim() == 0)
            return 0.0;
        if (!pd_)
            throw singularity_error("covariance is singular or ill-conditioned (min eigenvalue " +
                                    std::to_string(min_eig_) + ")");
        Eigen::VectorXd d(dim());
        for (int i = 0; i < dim(); ++i)
            d[i] = x[static_cast<std::size_t>(i)] - mean_[i];
        Eigen::VectorXd z = llt_.matrixL().solve(d);
        return log_norm_ - 0.5 * z.squaredNorm();
    }

    double density(std::span<const double> x) const { return dim() == 0 ? 1.0 : std::exp(log_density(x)); }

    gaussian marginal(std::span<const int> idx) const {
        const auto k = static_cast<Eigen::Index>(idx.size());
        Eigen::VectorXd m(k);
        Eigen::MatrixXd c(k, k);
        for (Eigen::Index i = 0; i < k; ++i) {
            m[i] = mean_[idx[static_cast<std::size_t>(i)]];
            for (Eigen::Index j = 0; j < k; ++j)
                c(i, j) = cov_(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        }
        return {std::move(m), std::move(c)};
    }

    /// Law of the `keep` coordinates given the `given` coordinates equal `values`.
    gaussian conditional(std::span<const int> keep, std::span<const int> given, std::span<const double> values) const {
        gaussian g = marginal(given);
        if (!g.pd_)
            throw singularity_error("conditioning block is singular");
        const auto k = static_cast<Eigen::Index>(keep.size());
        const auto n = static_cast<Eigen::Index>(given.size());
        Eigen::MatrixXd cross(k, n);
        Eigen::VectorXd diff(n);
        for (Eigen::Index j = 0; j < n; ++j)
            diff[j] = values[static_cast<std::size_t>(j)] - g.mean_[j];
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                cross(i, j) = cov_(keep[static_cast<std::size_t>(i)], given[static_cast<std::size_t>(j)]);
        gaussian kk = marginal(keep);
        Eigen::VectorXd m = kk.mean_ + cross * g.llt_.solve(diff);
        Eigen::MatrixXd c = kk.cov_ - cross * g.llt_.solve(cross.transpose());
        c = 0.5 * (c + c.transpose());
        return {std::move(m), std::move(c)};
    }

    /// Lower factor L with L L^T = cov, tolerating PSD matrices (used for sampling).
    Eigen::MatrixXd sampling_factor() const {
        if (dim() == 0)
            return {};
        if (pd_)
            return llt_.matrixL();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov_);
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        return es.eigenvectors() * ev.asDiagonal();
    }

private:
    void factorize() {
        if (dim() == 0) {
            pd_ = true;
            return;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov_ + cov_.transpose()), Eigen::EigenvaluesOnly);
        min_eig_ = es.eigenvalues().minCoeff();
        const double max_eig = es.eigenvalues().maxCoeff();
        pd_ = min_eig_ > 0.0 && max_eig / min_eig_ <= max_condition_number;
        if (pd_) {
            llt_.compute(cov_);
            pd_ = llt_.info() == Eigen::Success;
        }
        if (pd_) {
            double logdet = 0.0;
            for (int i = 0; i < dim(); ++i)
                logdet += 2.0 * std::log(llt_.matrixL()(i, i));
            log_norm_ = -0.5 * (dim() * std::log(2.0 * std::numbers::pi) + logdet);
        }
    }

    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double log_norm_ = 0.0;
    double min_eig_ = 0.0;
    bool pd_ = false;
};

} // namespace pidsx
