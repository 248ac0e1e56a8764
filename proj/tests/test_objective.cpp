#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mgm/objective.hpp"
#include "mgm/util.hpp"

using namespace mgm;
using namespace mgm::test;

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274;

// analytic gradient vs central finite differences on the free coordinates
double max_rel_gradient_error(const Theta& theta, const FitData& data, bool optimize_diag) {
    Eigen::VectorXd grad;
    neg_pseudo_loglik_gradient(theta, data, grad, optimize_diag);
    const Eigen::VectorXd fd = finite_difference_gradient(theta, data);
    const auto& sh = theta.shape();
    std::vector<bool> skip(sh.total, false);
    if (!optimize_diag)
        for (int s = 0; s < sh.p; ++s) skip[sh.idx_beta_diag(s)] = true;
    for (int r = 0; r < sh.q; ++r) skip[sh.idx_phi_node(r, sh.baseline[r])] = true;
    double worst = 0.0;
    for (int k = 0; k < sh.total; ++k) {
        if (skip[k]) continue;
        const double denom = std::max(1.0, std::abs(fd[k]));
        worst = std::max(worst, std::abs(grad[k] - fd[k]) / denom);
    }
    return worst;
}

}  // namespace

TEST_CASE("gaussian conditional mean and precision") {
    const ModelShape sh = ModelShape::make(2, 1, {2}, {0});
    Eigen::VectorXd x(2);
    Eigen::VectorXi y(1);
    x << 0.0, 1.0;
    y << 0;

    Theta t = Theta::zero(sh);
    auto [m0, p0] = gaussian_conditional(t, x, y, 0);
    CHECK(m0 == 0.0);
    CHECK(p0 == 1.0);

    t.beta_diag(0) = 2.0;
    t.alpha(0) = 4.0;
    auto [m1, p1] = gaussian_conditional(t, x, y, 0);
    CHECK(m1 == doctest::Approx(2.0));
    CHECK(p1 == 2.0);

    Theta u = Theta::zero(sh);
    u.set_beta(0, 1, -0.5);
    auto [m2, p2] = gaussian_conditional(u, x, y, 0);
    CHECK(m2 == doctest::Approx(0.5));  // (0 - (-0.5 * 1)) / 1
    CHECK(p2 == 1.0);

    u.beta_diag(0) = -1.0;
    CHECK_THROWS_AS(gaussian_conditional(u, x, y, 0), NumericError);
}

TEST_CASE("discrete conditional is a softmax over level scores") {
    const ModelShape sh = ModelShape::make(0, 2, {3, 2}, {0, 0});
    Theta t = Theta::zero(sh);
    Eigen::VectorXd x(0);
    Eigen::VectorXi y(2);
    y << 0, 0;

    const Eigen::VectorXd uniform = discrete_conditional(t, x, y, 0);
    for (int l = 0; l < 3; ++l) CHECK(uniform[l] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    t.phi_node(1, 0) = std::log(2.0);
    t.phi_node(1, 1) = 0.0;
    const Eigen::VectorXd two_thirds = discrete_conditional(t, x, y, 1);
    CHECK(two_thirds[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(two_thirds[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    // softmax shift invariance
    Theta shifted = t;
    for (int l = 0; l < 2; ++l) shifted.phi_node(1, l) += 7.5;
    const Eigen::VectorXd same = discrete_conditional(shifted, x, y, 1);
    CHECK((same - two_thirds).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("discrete conditionals are probability vectors everywhere") {
    const ModelShape sh = ModelShape::make(2, 2, {3, 2}, {1, 0});
    Rng rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        const Theta theta = random_theta(sh, rng, 2.0);
        const FitData data = random_fit_data(sh, 8, rng);
        for (int i = 0; i < data.n(); ++i) {
            const Eigen::VectorXd xrow = data.x.row(i);
            const Eigen::VectorXi yrow = data.y.row(i);
            for (int r = 0; r < sh.q; ++r) {
                const Eigen::VectorXd probs = discrete_conditional(theta, xrow, yrow, r);
                CHECK(std::abs(probs.sum() - 1.0) < 1e-12);
                CHECK(probs.minCoeff() >= 0.0);
                CHECK(probs.maxCoeff() <= 1.0);
            }
        }
    }
}

TEST_CASE("objective matches closed forms on degenerate models") {
    // single gaussian node at its mean
    const ModelShape g = ModelShape::make(1, 0, {}, {});
    FitData gd = FitData::from_matrices(g, Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXi(1, 0));
    CHECK(neg_pseudo_loglik(Theta::zero(g), gd) == doctest::Approx(kHalfLog2Pi).epsilon(1e-14));

    // single binary node with uniform conditional
    const ModelShape d = ModelShape::make(0, 1, {2}, {0});
    Eigen::MatrixXi y(1, 1);
    y << 1;
    FitData dd = FitData::from_matrices(d, Eigen::MatrixXd(1, 0), y);
    CHECK(neg_pseudo_loglik(Theta::zero(d), dd) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("per-sample averaging: duplicating the dataset changes nothing") {
    const ModelShape sh = ModelShape::make(2, 1, {2}, {0});
    Rng rng(4);
    const Theta theta = random_theta(sh, rng);
    const FitData once = random_fit_data(sh, 30, rng);
    Eigen::MatrixXd x2(60, 2);
    x2 << once.x, once.x;
    Eigen::MatrixXi y2(60, 1);
    y2 << once.y, once.y;
    const FitData twice = FitData::from_matrices(sh, x2, y2);
    CHECK(neg_pseudo_loglik(theta, once) ==
          doctest::Approx(neg_pseudo_loglik(theta, twice)).epsilon(1e-14));
}

TEST_CASE("analytic gradient matches finite differences") {
    const ModelShape sh = ModelShape::make(3, 2, {2, 3}, {0, 0});
    Rng rng(1234);
    for (int trial = 0; trial < 10; ++trial) {
        const Theta theta = random_theta(sh, rng, 0.7, trial % 2 == 0);
        const FitData data = random_fit_data(sh, 50, rng);
        CHECK(max_rel_gradient_error(theta, data, false) < 1e-5);
        CHECK(max_rel_gradient_error(theta, data, true) < 1e-5);
    }
}

TEST_CASE("gradient of alpha vanishes at the identity model on centered data") {
    const ModelShape sh = ModelShape::make(3, 0, {}, {});
    Rng rng(5);
    Eigen::MatrixXd x(40, 3);
    for (int i = 0; i < 40; ++i)
        for (int s = 0; s < 3; ++s) x(i, s) = rng.normal();
    x.rowwise() -= x.colwise().mean();  // exact centering
    const FitData data = FitData::from_matrices(sh, x, Eigen::MatrixXi(40, 0));
    Eigen::VectorXd grad;
    neg_pseudo_loglik_gradient(Theta::zero(sh), data, grad, false);
    for (int s = 0; s < 3; ++s) CHECK(std::abs(grad[sh.idx_alpha(s)]) < 1e-13);
}

TEST_CASE("composite objective is convex along random segments") {
    const ModelShape sh = ModelShape::make(2, 2, {2, 3}, {0, 2});
    Rng rng(77);
    const FitData data = random_fit_data(sh, 40, rng);
    for (int trial = 0; trial < 20; ++trial) {
        const Theta a = random_theta(sh, rng, 1.5);  // fixed unit beta diagonal
        const Theta b = random_theta(sh, rng, 1.5);
        const double t = rng.uniform(0.05, 0.95);
        Theta mid = a;
        mid.values() = t * a.values() + (1.0 - t) * b.values();
        const double fmid = neg_pseudo_loglik(mid, data);
        const double bound = t * neg_pseudo_loglik(a, data) + (1.0 - t) * neg_pseudo_loglik(b, data);
        CHECK(fmid <= bound + 1e-9);
    }
}

TEST_CASE("relabeling discrete levels with matching parameter permutation is invariant") {
    const ModelShape sh = ModelShape::make(2, 2, {3, 2}, {0, 0});
    Rng rng(31);
    const Theta theta = random_theta(sh, rng, 1.0);
    const FitData data = random_fit_data(sh, 25, rng);
    const double base = neg_pseudo_loglik(theta, data);

    // permutation of variable 0's levels: (0,1,2) -> (2,0,1)
    const int perm[3] = {2, 0, 1};
    const ModelShape sh2 = ModelShape::make(2, 2, {3, 2}, {perm[0], 0});
    Theta relabeled = Theta::zero(sh2);
    relabeled.values() = theta.values();  // same layout; rewrite permuted blocks
    for (int s = 0; s < 2; ++s)
        for (int l = 0; l < 3; ++l) relabeled.rho(s, 0, perm[l]) = theta.rho(s, 0, l);
    for (int l = 0; l < 3; ++l) relabeled.phi_node(0, perm[l]) = theta.phi_node(0, l);
    for (int l = 0; l < 3; ++l)
        for (int m = 0; m < 2; ++m) relabeled.phi(0, 1, perm[l], m) = theta.phi(0, 1, l, m);

    Eigen::MatrixXi y2 = data.y;
    for (int i = 0; i < data.n(); ++i) y2(i, 0) = perm[data.y(i, 0)];
    const FitData data2 = FitData::from_matrices(sh2, data.x, y2);
    CHECK(neg_pseudo_loglik(relabeled, data2) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("objective and gradient are stable across thread counts") {
    const ModelShape sh = ModelShape::make(4, 3, {2, 3, 2}, {0, 1, 0});
    Rng rng(222);
    const Theta theta = random_theta(sh, rng, 0.6);
    const FitData data = random_fit_data(sh, 501, rng);

    set_thread_count(1);
    const double f1 = neg_pseudo_loglik(theta, data);
    Eigen::VectorXd g1;
    neg_pseudo_loglik_gradient(theta, data, g1, false);
    const double f1_again = neg_pseudo_loglik(theta, data);
    CHECK(f1 == f1_again);  // bit-identical rerun at fixed thread count

    for (int threads : {2, 4}) {
        set_thread_count(threads);
        const double ft = neg_pseudo_loglik(theta, data);
        Eigen::VectorXd gt;
        neg_pseudo_loglik_gradient(theta, data, gt, false);
        CHECK(std::abs(ft - f1) < 1e-10);
        CHECK((gt - g1).lpNorm<Eigen::Infinity>() < 1e-10);
        const double ft_again = neg_pseudo_loglik(theta, data);
        CHECK(ft == ft_again);
    }
    set_thread_count(1);
}

TEST_CASE("dimension mismatches are rejected") {
    const ModelShape sh = ModelShape::make(2, 1, {2}, {0});
    const ModelShape other = ModelShape::make(3, 1, {2}, {0});
    Rng rng(8);
    const FitData data = random_fit_data(sh, 10, rng);
    CHECK_THROWS_AS(neg_pseudo_loglik(Theta::zero(other), data), DataError);
}
