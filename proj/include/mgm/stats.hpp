#ifndef MGM_STATS_HPP_
#define MGM_STATS_HPP_

#include <Eigen/Core>

namespace mgm {

// two-sided tail probabilities
double t_pvalue(double t, double df);
double f_pvalue(double f, double df1, double df2);  // upper tail
double chi2_pvalue(double x, double df);            // upper tail
double normal_pvalue(double z);

// -log10(p) with the documented cap at 300 (p underflow)
double neg_log10_p(double p);

struct RegressionFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd se;
    Eigen::MatrixXd cov;  // coefficient covariance
    double rss = 0.0;     // linear only
    int df_resid = 0;
    bool collinear = false;
    bool converged = true;  // logistic: false flags (quasi-)separation
};

// OLS with intercept handled by the caller (X includes whatever columns it
// wants). Collinearity is detected by rank of the design.
RegressionFit linear_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// Maximum-likelihood logistic regression by IRLS with Wald standard errors.
RegressionFit logistic_regression(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                                  int max_iter = 100, double tol = 1e-10);

}  // namespace mgm

#endif  // MGM_STATS_HPP_
