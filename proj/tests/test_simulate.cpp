#include <doctest.h>

#include <cmath>
#include <map>

#include "helpers.hpp"
#include "mgm/simulate.hpp"
#include "mgm/util.hpp"

using namespace mgm;
using namespace mgm::test;

TEST_CASE("edge density endpoints") {
    const GroundTruth empty = random_sparse_theta(4, 2, {2, 2}, 0.0, 0.5, 1);
    CHECK(empty.graph.edges.empty());

    const GroundTruth full = random_sparse_theta(3, 0, {}, 1.0, 0.5, 2);
    CHECK(full.graph.edges.size() == 3);  // complete graph on 3 nodes
}

TEST_CASE("generated beta diagonals dominate their rows across seeds") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const GroundTruth gt = random_sparse_theta(5, 2, {2, 3}, 0.3, 0.8, seed);
        for (int s = 0; s < 5; ++s) {
            double off = 0.0;
            for (int t = 0; t < 5; ++t)
                if (t != s) off += std::abs(gt.theta.beta(s, t));
            CHECK(gt.theta.beta_diag(s) > off + 0.1);
        }
        if (seed < 5) {
            // nonzero magnitudes live in [effect/2, effect]
            for (const auto& e : gt.graph.edges)
                for (double v : e.group_values)
                    if (v != 0.0) CHECK((std::abs(v) >= 0.4 && std::abs(v) <= 0.8));
        }
    }
}

TEST_CASE("independence model samples standard normal and uniform marginals") {
    GroundTruth gt = random_sparse_theta(2, 2, {2, 3}, 0.0, 0.5, 7);
    for (int s = 0; s < 2; ++s) gt.theta.beta_diag(s) = 1.0;
    const Dataset ds = gibbs_sample(gt, 10000, 50, 1, 8);

    std::vector<double> col0(ds.n());
    for (int i = 0; i < ds.n(); ++i) col0[i] = ds.x()(i, 0);
    CHECK(ks_normal_pvalue(col0) > 0.01);

    const auto freq = ds.level_frequencies();
    for (int l = 0; l < 2; ++l) CHECK(freq[0][l] == doctest::Approx(0.5).epsilon(0.05));
    for (int l = 0; l < 3; ++l) CHECK(freq[1][l] == doctest::Approx(1.0 / 3.0).epsilon(0.08));
}

TEST_CASE("pure-discrete chain matches exact enumeration in total variation") {
    const GroundTruth gt = random_sparse_theta(0, 2, {2, 2}, 0.9, 0.8, 3);
    const Eigen::VectorXd exact = enumerate_discrete_joint(gt.theta);
    CHECK(exact.sum() == doctest::Approx(1.0).epsilon(1e-12));

    const int n = 100000;
    const Dataset ds = gibbs_sample(gt, n, 200, 1, 4);
    Eigen::VectorXd freq = Eigen::VectorXd::Zero(4);
    for (int i = 0; i < n; ++i) freq[ds.y()(i, 0) * 2 + ds.y()(i, 1)] += 1.0;
    freq /= n;
    const double tv = 0.5 * (freq - exact).cwiseAbs().sum();
    CHECK(tv < 0.01);
}

TEST_CASE("gaussian-only sampler covariance matches the inverse of beta") {
    const GroundTruth gt = random_sparse_theta(2, 0, {}, 1.0, 0.6, 5);
    const auto [mean, cov] = gaussian_moments(gt.theta);
    const Dataset ds = gibbs_sample(gt, 50000, 200, 1, 6);

    Eigen::MatrixXd centered = ds.x().rowwise() - ds.x().colwise().mean();
    const Eigen::MatrixXd sample_cov = centered.transpose() * centered / (ds.n() - 1);
    CHECK((sample_cov - cov).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("chains are bit-reproducible for fixed seeds") {
    const GroundTruth gt = random_sparse_theta(3, 2, {2, 2}, 0.4, 0.7, 11);
    const Dataset a = gibbs_sample(gt, 500, 100, 2, 12);
    const Dataset b = gibbs_sample(gt, 500, 100, 2, 12);
    CHECK(a.x() == b.x());
    CHECK(a.y() == b.y());
    const Dataset c = gibbs_sample(gt, 500, 100, 2, 13);
    CHECK(a.x() != c.x());
}

TEST_CASE("sampler refuses a non-dominant beta") {
    GroundTruth gt = random_sparse_theta(2, 0, {}, 1.0, 0.6, 14);
    gt.theta.beta_diag(0) = std::abs(gt.theta.beta(0, 1)) * 0.5;
    CHECK_THROWS_WITH_AS(gibbs_sample(gt, 10, 0, 1, 1), doctest::Contains("diagonally dominant"),
                         NumericError);
    CHECK_THROWS_AS(gibbs_sample(gt, 0, 0, 1, 1), UsageError);
}

TEST_CASE("recovery metrics on stated conventions") {
    const GroundTruth gt = random_sparse_theta(4, 2, {2, 2}, 0.5, 0.7, 21);
    const RecoveryMetrics perfect = recovery_metrics(gt.graph, gt.graph);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);
    CHECK(perfect.sign_agreement == 1.0);

    MixedGraph empty;
    empty.nodes = gt.graph.nodes;
    const RecoveryMetrics none = recovery_metrics(gt.graph, empty);
    CHECK(none.precision == 1.0);  // convention for zero predictions
    CHECK(none.empty_estimate);
    CHECK(none.recall == 0.0);

    MixedGraph half;
    half.nodes = gt.graph.nodes;
    for (std::size_t e = 0; e < gt.graph.edges.size(); e += 2) half.edges.push_back(gt.graph.edges[e]);
    const RecoveryMetrics part = recovery_metrics(gt.graph, half);
    CHECK(part.precision == 1.0);
    CHECK(part.recall ==
          doctest::Approx(static_cast<double>(half.edges.size()) / gt.graph.edges.size()));

    MixedGraph renamed = empty;
    renamed.nodes[0].name = "zz";
    CHECK_THROWS_AS(recovery_metrics(gt.graph, renamed), DataError);
}

TEST_CASE("ground truth serialization writes a readable pair of files") {
    const GroundTruth gt = random_sparse_theta(2, 1, {2}, 0.5, 0.5, 31);
    const auto dir = temp_dir("gt_io");
    gt.save((dir / "theta.txt").string(), (dir / "meta.txt").string());
    const auto [theta, schema] = load_theta((dir / "theta.txt").string());
    CHECK(theta.values() == gt.theta.values());
    const std::string meta = read_file(dir / "meta.txt");
    CHECK(meta.find("seed 31") != std::string::npos);
}

TEST_CASE("mixed-model sweep order is the declared systematic scan") {
    // a strong positive rho edge drags the continuous node with the level
    const GroundTruth base = random_sparse_theta(1, 1, {2}, 0.0, 0.5, 41);
    GroundTruth gt = base;
    gt.theta.rho(0, 0, 1) = 1.0;
    gt.theta.beta_diag(0) = 1.0;
    const Dataset ds = gibbs_sample(gt, 20000, 100, 1, 42);
    double mean1 = 0.0, mean0 = 0.0;
    int n1 = 0, n0 = 0;
    for (int i = 0; i < ds.n(); ++i) {
        if (ds.y()(i, 0) == 1) {
            mean1 += ds.x()(i, 0);
            ++n1;
        } else {
            mean0 += ds.x()(i, 0);
            ++n0;
        }
    }
    REQUIRE(n1 > 100);
    REQUIRE(n0 > 100);
    CHECK(mean1 / n1 - mean0 / n0 == doctest::Approx(1.0).epsilon(0.1));  // rho / beta_ss
}
