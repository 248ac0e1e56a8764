#include "mgm/simulate.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <fstream>

#include "mgm/objective.hpp"
#include "mgm/rng.hpp"
#include "mgm/util.hpp"

namespace mgm {

namespace {

constexpr double kDominanceMargin = 0.15;  // strict slack beyond the 0.1 requirement

VariableSchema synthetic_schema(int p, int q, const std::vector<int>& levels) {
    std::vector<Variable> vars;
    for (int s = 0; s < p; ++s) {
        Variable v;
        v.name = "x" + std::to_string(s);
        v.kind = VarKind::Continuous;
        vars.push_back(std::move(v));
    }
    for (int j = 0; j < q; ++j) {
        Variable v;
        v.name = "y" + std::to_string(j);
        v.kind = VarKind::Discrete;
        for (int l = 0; l < levels[j]; ++l) v.levels.push_back("l" + std::to_string(l));
        v.baseline = 0;
        vars.push_back(std::move(v));
    }
    return VariableSchema(std::move(vars));
}

bool diagonally_dominant(const Theta& theta) {
    const auto& sh = theta.shape();
    for (int s = 0; s < sh.p; ++s) {
        double off = 0.0;
        for (int t = 0; t < sh.p; ++t)
            if (t != s) off += std::abs(theta.beta(s, t));
        if (!(theta.beta_diag(s) > off)) return false;
    }
    return true;
}

}  // namespace

GroundTruth random_sparse_theta(int p, int q, const std::vector<int>& levels, double density,
                                double effect_scale, std::uint64_t seed) {
    if (!(density >= 0.0 && density <= 1.0)) throw UsageError("density must lie in [0,1]");
    if (!(effect_scale > 0.0)) throw UsageError("effect_scale must be positive");
    if (static_cast<int>(levels.size()) != q) throw UsageError("levels list must have length q");

    GroundTruth gt;
    gt.generation_seed = seed;
    gt.density = density;
    gt.schema = synthetic_schema(p, q, levels);
    Theta theta(ModelShape::from_schema(gt.schema));
    Rng rng(seed);
    const double lo = effect_scale / 2.0, hi = effect_scale;

    for (int s = 0; s < p; ++s)
        for (int t = s + 1; t < p; ++t)
            if (rng.bernoulli(density)) theta.set_beta(s, t, rng.signed_uniform(lo, hi));
    for (int s = 0; s < p; ++s)
        for (int j = 0; j < q; ++j)
            if (rng.bernoulli(density))
                for (int l = 0; l < levels[j]; ++l)
                    if (l != theta.shape().baseline[j]) theta.rho(s, j, l) = rng.signed_uniform(lo, hi);
    for (int r = 0; r < q; ++r)
        for (int j = r + 1; j < q; ++j)
            if (rng.bernoulli(density))
                for (int l = 0; l < levels[r]; ++l)
                    for (int m = 0; m < levels[j]; ++m) {
                        if (l == theta.shape().baseline[r] || m == theta.shape().baseline[j]) continue;
                        theta.phi(r, j, l, m) = rng.signed_uniform(lo, hi);
                    }
    for (int s = 0; s < p; ++s) {
        double off = 0.0;
        for (int t = 0; t < p; ++t)
            if (t != s) off += std::abs(theta.beta(s, t));
        theta.beta_diag(s) = off + kDominanceMargin;
    }
    gt.graph = aggregate(theta, gt.schema);
    gt.theta = std::move(theta);
    return gt;
}

Dataset gibbs_sample(const GroundTruth& gt, int n, int burn_in, int thinning, std::uint64_t seed) {
    if (n < 1) throw UsageError("sample count must be positive");
    if (burn_in < 0) throw UsageError("burn_in must be nonnegative");
    if (thinning < 1) throw UsageError("thinning must be at least 1");
    if (!diagonally_dominant(gt.theta))
        throw NumericError("refusing to sample: beta is not diagonally dominant");

    const auto& sh = gt.theta.shape();
    Rng rng(seed);
    Eigen::VectorXd xrow(sh.p);
    Eigen::VectorXi yrow(sh.q);
    for (int s = 0; s < sh.p; ++s) xrow[s] = rng.normal(0.0, 1.0 / std::sqrt(gt.theta.beta_diag(s)));
    for (int j = 0; j < sh.q; ++j) yrow[j] = static_cast<int>(rng.below(sh.levels[j]));

    auto sweep = [&] {
        for (int s = 0; s < sh.p; ++s) {
            const auto [mean, prec] = gaussian_conditional(gt.theta, xrow, yrow, s);
            xrow[s] = rng.normal(mean, 1.0 / std::sqrt(prec));
        }
        for (int r = 0; r < sh.q; ++r) {
            const Eigen::VectorXd probs = discrete_conditional(gt.theta, xrow, yrow, r);
            yrow[r] = rng.categorical({probs.data(), static_cast<std::size_t>(probs.size())});
        }
    };

    for (int b = 0; b < burn_in; ++b) sweep();
    Eigen::MatrixXd x(n, sh.p);
    Eigen::MatrixXi y(n, sh.q);
    for (int i = 0; i < n; ++i) {
        for (int t = 0; t < thinning; ++t) sweep();
        x.row(i) = xrow;
        y.row(i) = yrow;
    }
    std::vector<TransformRecord> log;
    log.push_back({"*", "gibbs_sample",
                   "seed=" + std::to_string(seed) + " burn_in=" + std::to_string(burn_in) +
                       " thinning=" + std::to_string(thinning)});
    return Dataset(gt.schema, std::move(x), std::move(y), std::move(log));
}

RecoveryMetrics recovery_metrics(const MixedGraph& truth, const MixedGraph& estimate) {
    if (truth.nodes.size() != estimate.nodes.size())
        throw DataError("recovery metrics: node sets differ in size");
    for (const auto& n : truth.nodes)
        if (estimate.find_node(n.name) < 0)
            throw DataError("recovery metrics: node missing from estimate: " + n.name);

    auto key = [](const GraphEdge& e) {
        return e.a < e.b ? e.a + "\x1f" + e.b : e.b + "\x1f" + e.a;
    };
    std::vector<std::pair<std::string, int>> truth_edges;
    for (const auto& e : truth.edges) truth_edges.emplace_back(key(e), e.sign);

    RecoveryMetrics m;
    m.true_edges = static_cast<int>(truth.edges.size());
    m.estimated_edges = static_cast<int>(estimate.edges.size());
    int sign_match = 0;
    for (const auto& e : estimate.edges) {
        const std::string k = key(e);
        for (const auto& [tk, tsign] : truth_edges)
            if (tk == k) {
                ++m.true_positives;
                if (tsign == e.sign) ++sign_match;
                break;
            }
    }
    m.empty_estimate = m.estimated_edges == 0;
    m.precision = m.estimated_edges > 0
                      ? static_cast<double>(m.true_positives) / m.estimated_edges
                      : 1.0;  // stated convention for zero predictions
    m.recall = m.true_edges > 0 ? static_cast<double>(m.true_positives) / m.true_edges : 1.0;
    m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                          : 0.0;
    m.sign_agreement =
        m.true_positives > 0 ? static_cast<double>(sign_match) / m.true_positives : 1.0;
    return m;
}

Eigen::VectorXd enumerate_discrete_joint(const Theta& theta) {
    const auto& sh = theta.shape();
    if (sh.p != 0) throw UsageError("joint enumeration is defined for pure-discrete models");
    long long states = 1;
    for (int j = 0; j < sh.q; ++j) {
        states *= sh.levels[j];
        if (states > (1 << 20)) throw UsageError("state space too large to enumerate");
    }
    Eigen::VectorXd logp(states);
    std::vector<int> y(sh.q, 0);
    for (long long st = 0; st < states; ++st) {
        double acc = 0.0;
        for (int r = 0; r < sh.q; ++r) {
            acc += theta.phi_node(r, y[r]);
            for (int j = r + 1; j < sh.q; ++j) acc += theta.phi(r, j, y[r], y[j]);
        }
        logp[st] = acc;
        for (int j = sh.q - 1; j >= 0; --j) {  // mixed radix increment, last variable fastest
            if (++y[j] < sh.levels[j]) break;
            y[j] = 0;
        }
    }
    const double lse = logsumexp(logp.data(), static_cast<int>(states));
    return (logp.array() - lse).exp();
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> gaussian_moments(const Theta& theta) {
    const auto& sh = theta.shape();
    if (sh.q != 0) throw UsageError("gaussian moments are defined for continuous-only models");
    Eigen::MatrixXd beta(sh.p, sh.p);
    Eigen::VectorXd alpha(sh.p);
    for (int s = 0; s < sh.p; ++s) {
        alpha[s] = theta.alpha(s);
        for (int t = 0; t < sh.p; ++t) beta(s, t) = theta.beta(s, t);
    }
    const Eigen::MatrixXd cov = beta.llt().solve(Eigen::MatrixXd::Identity(sh.p, sh.p));
    return {cov * alpha, cov};
}

void GroundTruth::save(const std::string& theta_path, const std::string& meta_path) const {
    save_theta(theta, schema, theta_path);
    std::ofstream out(meta_path);
    if (!out) throw DataError("cannot write ground truth metadata: " + meta_path);
    out << "mgm_groundtruth v1\n"
        << "seed " << generation_seed << '\n'
        << "density " << format_double(density) << '\n'
        << "edges " << graph.edges.size() << '\n';
}

}  // namespace mgm
