#ifndef MGM_SIMULATE_HPP_
#define MGM_SIMULATE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mgm/dataset.hpp"
#include "mgm/graph.hpp"
#include "mgm/theta.hpp"

namespace mgm {

struct GroundTruth {
    Theta theta;
    VariableSchema schema;  // generated names: x0..x{p-1}, y0..y{q-1}; baseline = first level
    MixedGraph graph;       // aggregate(theta)
    std::uint64_t generation_seed = 0;
    double density = 0.0;

    void save(const std::string& theta_path, const std::string& meta_path) const;
};

// Random sparse parameter set: edges are Bernoulli(density) per pair,
// nonzero entries uniform on +-[effect_scale/2, effect_scale], baselines
// zeroed, and the beta diagonal set for strict diagonal dominance
// (beta_ss exceeds the absolute row sum by more than 0.1).
GroundTruth random_sparse_theta(int p, int q, const std::vector<int>& levels, double density,
                                double effect_scale, std::uint64_t seed);

// Systematic-scan Gibbs sampler over the node conditionals; records every
// thinning-th full sweep after burn_in. Refuses non-dominant beta.
Dataset gibbs_sample(const GroundTruth& gt, int n, int burn_in, int thinning, std::uint64_t seed);

struct RecoveryMetrics {
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 1.0;
    double sign_agreement = 1.0;
    int true_edges = 0;
    int estimated_edges = 0;
    int true_positives = 0;
    bool empty_estimate = false;  // precision 1.0 is then the stated convention
};

RecoveryMetrics recovery_metrics(const MixedGraph& truth, const MixedGraph& estimate);

// Test oracles over the joint density.
// Exact state probabilities of a pure-discrete model (mixed-radix order,
// last variable fastest).
Eigen::VectorXd enumerate_discrete_joint(const Theta& theta);
// Mean and covariance of a Gaussian-only model: cov = beta^-1, mean = beta^-1 alpha.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> gaussian_moments(const Theta& theta);

}  // namespace mgm

#endif  // MGM_SIMULATE_HPP_
