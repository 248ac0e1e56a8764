#ifndef MGM_THETA_HPP_
#define MGM_THETA_HPP_

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "mgm/dataset.hpp"
#include "mgm/schema.hpp"

namespace mgm {

// Index map for the flat parameter vector. Layout:
//   [alpha | beta diagonal | beta upper triangle | rho blocks (s-major)
//    | per-node level potentials | pairwise discrete blocks (r<j, row-major)]
struct ModelShape {
    int p = 0;
    int q = 0;
    std::vector<int> levels;
    std::vector<int> baseline;

    int sum_levels = 0;
    std::vector<int> cum_levels;      // size q+1
    int alpha_off = 0;
    int beta_diag_off = 0;
    int beta_tri_off = 0;
    int rho_off = 0;
    int phi_node_off = 0;
    int phi_pair_off = 0;
    int total = 0;
    std::vector<int> phi_pair_block;  // per dd-pair index

    static ModelShape make(int p, int q, std::vector<int> levels, std::vector<int> baseline);
    static ModelShape from_schema(const VariableSchema& schema);

    int cc_pair(int s, int t) const;  // requires s < t
    int dd_pair(int r, int j) const;  // requires r < j

    int idx_alpha(int s) const { return alpha_off + s; }
    int idx_beta_diag(int s) const { return beta_diag_off + s; }
    int idx_beta(int s, int t) const { return beta_tri_off + cc_pair(std::min(s, t), std::max(s, t)); }
    int idx_rho(int s, int j, int l) const { return rho_off + s * sum_levels + cum_levels[j] + l; }
    int idx_phi_node(int r, int l) const { return phi_node_off + cum_levels[r] + l; }
    // symmetric access: phi(r,j)(l,m) == phi(j,r)(m,l)
    int idx_phi(int r, int j, int l, int m) const {
        if (r > j) return idx_phi(j, r, m, l);
        return phi_pair_off + phi_pair_block[dd_pair(r, j)] + l * levels[j] + m;
    }

    bool matches(const VariableSchema& schema) const;
};

// Full MGM parameter set over a flat vector. Symmetric parameters exist
// once; the accessors resolve both orders.
class Theta {
public:
    Theta() = default;
    explicit Theta(ModelShape shape)
        : shape_(std::move(shape)), v_(Eigen::VectorXd::Zero(shape_.total)) {}

    // zero parameters with unit beta diagonal
    static Theta zero(const ModelShape& shape);

    const ModelShape& shape() const { return shape_; }
    const Eigen::VectorXd& values() const { return v_; }
    Eigen::VectorXd& values() { return v_; }

    double alpha(int s) const { return v_[shape_.idx_alpha(s)]; }
    double beta_diag(int s) const { return v_[shape_.idx_beta_diag(s)]; }
    double beta(int s, int t) const { return s == t ? beta_diag(s) : v_[shape_.idx_beta(s, t)]; }
    double rho(int s, int j, int l) const { return v_[shape_.idx_rho(s, j, l)]; }
    double phi_node(int r, int l) const { return v_[shape_.idx_phi_node(r, l)]; }
    double phi(int r, int j, int l, int m) const { return v_[shape_.idx_phi(r, j, l, m)]; }

    double& alpha(int s) { return v_[shape_.idx_alpha(s)]; }
    double& beta_diag(int s) { return v_[shape_.idx_beta_diag(s)]; }
    double& rho(int s, int j, int l) { return v_[shape_.idx_rho(s, j, l)]; }
    double& phi_node(int r, int l) { return v_[shape_.idx_phi_node(r, l)]; }
    double& phi(int r, int j, int l, int m) { return v_[shape_.idx_phi(r, j, l, m)]; }
    void set_beta(int s, int t, double v);

    // Flush near-zero baseline-indexed couplings to exact zero.
    void zero_baseline_entries(double threshold = 1e-8);

private:
    ModelShape shape_;
    Eigen::VectorXd v_;
};

// Penalty weights per group plus the baseline-level multiplier.
struct PenaltyWeights {
    Eigen::MatrixXd cc;  // p x p
    Eigen::MatrixXd cd;  // p x q
    Eigen::MatrixXd dd;  // q x q
    double baseline_multiplier = 10.0;
};

// w_st = sd_s sd_t, w_sj = sd_s sqrt(sum_b f_b(1-f_b)),
// w_rj = sqrt(sum_a f_a(1-f_a) sum_b g_b(1-g_b)), frequencies from the data.
PenaltyWeights compute_penalty_weights(const Dataset& ds, double baseline_multiplier = 10.0);

// Per-coordinate penalty scale (0 on unpenalized coordinates: alpha, beta
// diagonal, level potentials). Baseline-indexed entries carry the multiplier.
Eigen::VectorXd penalty_scale_vector(const ModelShape& shape, const PenaltyWeights& w);

double penalty_value(const Theta& theta, const PenaltyWeights& w, double lambda);

// Text serialization, exact round-trip (17 significant digits).
void save_theta(const Theta& theta, const VariableSchema& schema, const std::string& path);
std::pair<Theta, VariableSchema> load_theta(const std::string& path);

}  // namespace mgm

#endif  // MGM_THETA_HPP_
