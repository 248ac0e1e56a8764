#ifndef MGM_SOLVER_HPP_
#define MGM_SOLVER_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mgm/objective.hpp"
#include "mgm/theta.hpp"

namespace mgm {

enum class RestartRule { None, FunctionValue, Gradient };

struct SolverConfig {
    int max_iterations = 2000;
    double tolerance = 1e-6;          // relative change of the composite objective
    double initial_step = 1.0;
    double backtracking_factor = 0.5;
    RestartRule restart = RestartRule::FunctionValue;
    bool optimize_beta_diag = false;  // default keeps the diagonal fixed at its start value
    std::uint64_t seed = 0;           // reserved for randomized initialization

    void validate() const;
};

struct FitResult {
    Theta theta;
    std::vector<double> objective_trace;  // composite objective per accepted iteration
    std::vector<double> step_trace;
    std::vector<char> restart_flags;
    int iterations = 0;
    bool converged = false;
    int restarts = 0;

    double final_objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

// Coordinatewise soft-thresholding: sign(v) * max(|v| - t, 0). Thresholds of
// unpenalized coordinates must be zero.
Theta prox_weighted_l1(const Theta& theta, const Eigen::VectorXd& thresholds);

// Smallest lambda for which zero is a fixed point of the prox-gradient map,
// max_k |grad_k(theta0)| / w_k over penalized coordinates.
double lambda_max(const FitData& data, const PenaltyWeights& w);
double lambda_max(const Dataset& ds, const PenaltyWeights& w);

// Accelerated proximal gradient descent with backtracking line search and
// adaptive restarts. Accepted objective values are non-increasing under the
// function-value restart rule (an increase rejects the step and resets
// momentum), so the returned theta attains the best observed objective.
FitResult fit(const FitData& data, double lambda, const PenaltyWeights& w, const SolverConfig& cfg,
              const std::optional<Theta>& warm_start = std::nullopt);
FitResult fit(const Dataset& ds, double lambda, const PenaltyWeights& w, const SolverConfig& cfg,
              const std::optional<Theta>& warm_start = std::nullopt);

// Largest violation of the subgradient optimality conditions at theta:
// penalized nonzero coordinates check |grad + lambda w sign(v)|, zero
// coordinates check max(|grad| - lambda w, 0), unpenalized ones |grad|.
double kkt_residual(const Theta& theta, const FitData& data, double lambda,
                    const PenaltyWeights& w, bool optimize_beta_diag = false);

// Unpenalized maximization of the pseudo-log-likelihood restricted to the
// nonzero pattern of `support` (coordinates at zero stay frozen). This is
// the model-restricted maximizer the EBIC score is defined on.
FitResult refit_support(const FitData& data, const Theta& support, const SolverConfig& cfg);

}  // namespace mgm

#endif  // MGM_SOLVER_HPP_
