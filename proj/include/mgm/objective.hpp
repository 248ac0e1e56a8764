#ifndef MGM_OBJECTIVE_HPP_
#define MGM_OBJECTIVE_HPP_

#include <Eigen/Core>
#include <vector>

#include "mgm/dataset.hpp"
#include "mgm/theta.hpp"

namespace mgm {

// Dataset repackaged for repeated objective evaluation: per-discrete-variable
// one-hot indicator matrices are built once.
struct FitData {
    ModelShape shape;
    Eigen::MatrixXd x;                    // n x p
    Eigen::MatrixXi y;                    // n x q
    std::vector<Eigen::MatrixXd> onehot;  // q matrices, n x L_j

    static FitData from_dataset(const Dataset& ds);
    static FitData from_matrices(ModelShape shape, Eigen::MatrixXd x, Eigen::MatrixXi y);
    int n() const { return static_cast<int>(x.rows()); }
};

// Conditional distribution of continuous node s given the rest of one sample:
// mean = (alpha_s + sum_j rho_sj(y_j) - sum_{t != s} beta_st x_t) / beta_ss,
// precision = beta_ss.
std::pair<double, double> gaussian_conditional(const Theta& theta, const Eigen::VectorXd& xrow,
                                               const Eigen::VectorXi& yrow, int s);

// Level probabilities of discrete node r given the rest of one sample
// (softmax over level scores).
Eigen::VectorXd discrete_conditional(const Theta& theta, const Eigen::VectorXd& xrow,
                                     const Eigen::VectorXi& yrow, int r);

// Per-sample average of the negative pseudo-log-likelihood (sum over node
// conditionals, divided by n).
double neg_pseudo_loglik(const Theta& theta, const FitData& data);
double neg_pseudo_loglik(const Theta& theta, const Dataset& ds);

// Objective and its analytic gradient in one pass. Symmetric parameters are
// stored once; both node conditionals touching a parameter contribute to its
// partial derivative. Level potentials at baseline levels and, unless
// optimize_beta_diag is set, the beta diagonal are held fixed (zero gradient).
double neg_pseudo_loglik_gradient(const Theta& theta, const FitData& data, Eigen::VectorXd& grad,
                                  bool optimize_beta_diag = false);
Theta pseudo_loglik_gradient(const Theta& theta, const Dataset& ds,
                             bool optimize_beta_diag = false);

}  // namespace mgm

#endif  // MGM_OBJECTIVE_HPP_
