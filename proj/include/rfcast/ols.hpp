#pragma once

#include "rfcast/design.hpp"
#include "rfcast/error.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rfcast {

/// Least-squares fit with an intercept and classical (homoskedastic) inference.
struct OlsFit {
    std::vector<double> coefficients;  // slopes, one per regressor
    double intercept = 0.0;
    std::vector<double> std_errors;    // intercept first, then slopes
    double r2 = 0.0;
    double adj_r2 = 0.0;
    double residual_se = 0.0;
    std::size_t n = 0;
    std::size_t p = 0;
    std::vector<double> residuals;

    [[nodiscard]] double slope() const { return coefficients.at(0); }
    [[nodiscard]] double slope_se() const { return std_errors.at(1); }
    [[nodiscard]] double intercept_se() const { return std_errors.at(0); }
};

/// 1 - (1 - r2)(n - 1)/(n - p - 1).
[[nodiscard]] inline double adjusted_r2(double r2, std::size_t n, std::size_t p) {
    if (n <= p + 1) {
        throw SampleSizeError("adjusted R2 needs n > p + 1 (n=" + std::to_string(n) + ", p=" + std::to_string(p) + ")");
    }
    return 1.0 - (1.0 - r2) * static_cast<double>(n - 1) / static_cast<double>(n - p - 1);
}

/// Two-sided p-value of a t statistic with `df` degrees of freedom.
[[nodiscard]] inline double t_two_sided_p(double t, double df) {
    if (!std::isfinite(t)) {
        return std::isnan(t) ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    }
    const boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

[[nodiscard]] inline double t_cdf(double t, double df) {
    return boost::math::cdf(boost::math::students_t(df), t);
}

/**
 * Ordinary least squares of y on [1, X] via Householder QR. Standard errors
 * come from R^{-1} R^{-T}, never from an explicit normal-equation inverse.
 * Requires n >= p + 2 and a full-rank design (including the intercept).
 */
[[nodiscard]] inline OlsFit fit_ols(const Matrix& X, std::span<const double> y) {
    const std::size_t n = X.rows();
    const std::size_t p = X.cols();
    if (y.size() != n) {
        throw DomainError("fit_ols: X has " + std::to_string(n) + " rows but y has " + std::to_string(y.size()));
    }
    if (n < p + 2) {
        throw SampleSizeError("fit_ols: need at least p + 2 = " + std::to_string(p + 2) + " observations, got " +
                              std::to_string(n));
    }
    const auto k = static_cast<Eigen::Index>(p + 1);
    Eigen::MatrixXd A(static_cast<Eigen::Index>(n), k);
    Eigen::VectorXd b(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        A(r, 0) = 1.0;
        for (std::size_t j = 0; j < p; ++j) {
            A(r, static_cast<Eigen::Index>(j + 1)) = X(i, j);
        }
        b(r) = y[i];
    }

    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    const Eigen::MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    // Rank check: a diagonal of R negligible against its column norm means the
    // column lies (numerically) in the span of the previous ones.
    for (Eigen::Index j = 0; j < k; ++j) {
        const double col_norm = A.col(j).norm();
        if (col_norm == 0.0 || std::fabs(R(j, j)) <= 1e-10 * col_norm) {
            throw SingularityError(
                "fit_ols: design matrix is rank deficient (" +
                (j == 0 ? std::string("intercept") : "regressor " + std::to_string(j - 1)) +
                " is collinear with the preceding columns; e.g. a constant regressor)");
        }
    }
    const Eigen::VectorXd beta = qr.solve(b);
    const Eigen::VectorXd resid = b - A * beta;

    OlsFit fit;
    fit.n = n;
    fit.p = p;
    fit.intercept = beta(0);
    fit.coefficients.assign(beta.data() + 1, beta.data() + k);
    fit.residuals.assign(resid.data(), resid.data() + resid.size());

    const double sse = resid.squaredNorm();
    const double mean_y = b.mean();
    const double sst = (b.array() - mean_y).square().sum();
    const auto dof = static_cast<double>(n - p - 1);
    fit.r2 = sst > 0.0 ? 1.0 - sse / sst : 1.0;
    fit.adj_r2 = adjusted_r2(fit.r2, n, p);
    fit.residual_se = std::sqrt(sse / dof);

    const Eigen::MatrixXd R_inv =
        R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const double sigma2 = sse / dof;
    fit.std_errors.resize(p + 1);
    for (Eigen::Index j = 0; j < k; ++j) {
        fit.std_errors[static_cast<std::size_t>(j)] = std::sqrt(sigma2 * R_inv.row(j).squaredNorm());
    }
    return fit;
}

/// Single-regressor convenience overload.
[[nodiscard]] inline OlsFit fit_ols(std::span<const double> x, std::span<const double> y) {
    Matrix X(x.size(), 1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        X(i, 0) = x[i];
    }
    return fit_ols(X, y);
}

/// Unbiasedness tests for a forecast-evaluation regression: slope = 1 and intercept = 0.
struct BiasTest {
    double t_slope = 0.0;
    double t_intercept = 0.0;
    double p_slope = 1.0;
    double p_intercept = 1.0;
};

namespace detail {

inline void require_single_regressor(const OlsFit& fit, const char* op) {
    if (fit.p != 1) {
        throw DomainError(std::string(op) + " is defined only for single-regressor fits (p = " +
                          std::to_string(fit.p) + ")");
    }
}

// A departure from the null at rounding level (|d| <= 1e-12 * scale) counts as
// exactly zero, so a perfect fit with se = 0 tests as t = 0 rather than 0/0.
inline double t_ratio(double numerator, double se, double scale = 1.0) {
    if (std::fabs(numerator) <= 1e-12 * std::max(1.0, std::fabs(scale))) {
        return 0.0;
    }
    return numerator / se;
}

} // namespace detail

[[nodiscard]] inline BiasTest bias_test(const OlsFit& fit) {
    detail::require_single_regressor(fit, "bias_test");
    const auto df = static_cast<double>(fit.n - 2);
    BiasTest t;
    t.t_slope = detail::t_ratio(fit.slope() - 1.0, fit.slope_se(), fit.slope());
    t.t_intercept = detail::t_ratio(fit.intercept, fit.intercept_se());
    t.p_slope = t_two_sided_p(t.t_slope, df);
    t.p_intercept = t_two_sided_p(t.t_intercept, df);
    return t;
}

/// Two-sided p-value for H0: slope = 0, t distribution with n - 2 df.
[[nodiscard]] inline double slope_p_value(const OlsFit& fit) {
    detail::require_single_regressor(fit, "slope_p_value");
    return t_two_sided_p(detail::t_ratio(fit.slope(), fit.slope_se()), static_cast<double>(fit.n - 2));
}

} // namespace rfcast
