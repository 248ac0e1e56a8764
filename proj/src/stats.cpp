#include "mgm/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "mgm/util.hpp"

namespace mgm {

double t_pvalue(double t, double df) {
    if (df <= 0.0) return 1.0;
    const boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double f_pvalue(double f, double df1, double df2) {
    if (df1 <= 0.0 || df2 <= 0.0 || f < 0.0) return 1.0;
    const boost::math::fisher_f dist(df1, df2);
    return boost::math::cdf(boost::math::complement(dist, f));
}

double chi2_pvalue(double x, double df) {
    if (df <= 0.0 || x < 0.0) return 1.0;
    const boost::math::chi_squared dist(df);
    return boost::math::cdf(boost::math::complement(dist, x));
}

double normal_pvalue(double z) {
    const boost::math::normal dist;
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(z)));
}

double neg_log10_p(double p) {
    if (!(p > 0.0)) return 300.0;
    return std::min(300.0, -std::log10(p));
}

namespace {
bool rank_deficient(const Eigen::MatrixXd& X) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    return qr.rank() < X.cols();
}
}  // namespace

RegressionFit linear_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    RegressionFit fit;
    const auto n = X.rows();
    const auto k = X.cols();
    fit.df_resid = static_cast<int>(n - k);
    fit.collinear = rank_deficient(X);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    fit.coef = qr.solve(y);
    const Eigen::VectorXd resid = y - X * fit.coef;
    fit.rss = resid.squaredNorm();

    fit.se = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::quiet_NaN());
    fit.cov.resize(0, 0);
    if (!fit.collinear && fit.df_resid > 0) {
        const double sigma2 = fit.rss / fit.df_resid;
        const Eigen::MatrixXd xtx_inv = (X.transpose() * X).llt().solve(
            Eigen::MatrixXd::Identity(k, k));
        fit.cov = sigma2 * xtx_inv;
        fit.se = fit.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    }
    return fit;
}

RegressionFit logistic_regression(const Eigen::MatrixXd& X, const Eigen::VectorXi& y, int max_iter,
                                  double tol) {
    RegressionFit fit;
    const auto n = X.rows();
    const auto k = X.cols();
    fit.df_resid = static_cast<int>(n - k);
    fit.collinear = rank_deficient(X);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd xtwx(k, k);
    fit.converged = false;

    if (!fit.collinear) {
        for (int it = 0; it < max_iter; ++it) {
            const Eigen::VectorXd eta = X * beta;
            const Eigen::VectorXd mu = 1.0 / (1.0 + (-eta.array()).exp());
            const Eigen::VectorXd wdiag = (mu.array() * (1.0 - mu.array())).max(1e-12);
            Eigen::VectorXd grad = Eigen::VectorXd::Zero(k);
            for (Eigen::Index i = 0; i < n; ++i) grad += (y[i] - mu[i]) * X.row(i).transpose();
            xtwx = X.transpose() * wdiag.asDiagonal() * X;
            const Eigen::VectorXd delta = xtwx.ldlt().solve(grad);
            beta += delta;
            if (!beta.allFinite()) break;
            if (delta.lpNorm<Eigen::Infinity>() < tol) {
                fit.converged = true;
                break;
            }
        }
        // runaway coefficients mean (quasi-)separation; Wald results are unusable
        if (beta.allFinite() && beta.lpNorm<Eigen::Infinity>() > 15.0) fit.converged = false;
        if (!beta.allFinite()) beta.setZero();
    }
    fit.coef = beta;
    fit.se = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::quiet_NaN());
    if (!fit.collinear && fit.converged) {
        const Eigen::VectorXd eta = X * beta;
        const Eigen::VectorXd mu = 1.0 / (1.0 + (-eta.array()).exp());
        const Eigen::VectorXd wdiag = (mu.array() * (1.0 - mu.array())).max(1e-12);
        xtwx = X.transpose() * wdiag.asDiagonal() * X;
        fit.cov = xtwx.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
        fit.se = fit.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    }
    return fit;
}

}  // namespace mgm
