#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mgm/selection.hpp"
#include "mgm/solver.hpp"
#include "mgm/util.hpp"

using namespace mgm;
using namespace mgm::test;

namespace {

PenaltyWeights unit_weights(const ModelShape& sh, double baseline_multiplier = 10.0) {
    PenaltyWeights w;
    w.cc = Eigen::MatrixXd::Ones(sh.p, sh.p);
    w.cd = Eigen::MatrixXd::Ones(sh.p, sh.q);
    w.dd = Eigen::MatrixXd::Ones(sh.q, sh.q);
    w.baseline_multiplier = baseline_multiplier;
    return w;
}

}  // namespace

TEST_CASE("soft thresholding closed form") {
    const ModelShape sh = ModelShape::make(2, 1, {2}, {0});
    Theta t = Theta::zero(sh);
    t.set_beta(0, 1, 3.0);
    Eigen::VectorXd thr = Eigen::VectorXd::Zero(sh.total);
    thr[sh.idx_beta(0, 1)] = 1.0;
    CHECK(prox_weighted_l1(t, thr).beta(0, 1) == 2.0);

    t.set_beta(0, 1, -0.5);
    CHECK(prox_weighted_l1(t, thr).beta(0, 1) == 0.0);

    t.set_beta(0, 1, -2.5);
    CHECK(prox_weighted_l1(t, Eigen::VectorXd::Zero(sh.total)).beta(0, 1) == -2.5);

    CHECK_THROWS_AS(prox_weighted_l1(t, Eigen::VectorXd::Constant(sh.total, -1.0)), UsageError);
}

TEST_CASE("soft thresholding equals the closed form on random coordinates") {
    const ModelShape sh = ModelShape::make(40, 0, {}, {});
    Rng rng(2024);
    for (int trial = 0; trial < 13; ++trial) {
        Theta t = Theta::zero(sh);
        Eigen::VectorXd thr = Eigen::VectorXd::Zero(sh.total);
        for (int k = 0; k < sh.total; ++k) {
            t.values()[k] = rng.uniform(-3.0, 3.0);
            thr[k] = rng.uniform(0.0, 2.0);
        }
        thr.segment(sh.alpha_off, sh.p).setZero();
        thr.segment(sh.beta_diag_off, sh.p).setZero();
        const Theta out = prox_weighted_l1(t, thr);
        for (int k = 0; k < sh.total; ++k) {
            const double v = t.values()[k];
            const double expect = (v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0)) * std::max(std::abs(v) - thr[k], 0.0);
            CHECK(out.values()[k] == expect);  // exact to machine precision
        }
    }
}

TEST_CASE("lambda at or above lambda_max yields an all-zero penalized solution") {
    const ModelShape sh = ModelShape::make(3, 2, {2, 2}, {0, 0});
    Rng rng(55);
    const FitData data = random_fit_data(sh, 120, rng);
    const PenaltyWeights w = unit_weights(sh);
    const double lmax = lambda_max(data, w);
    SolverConfig cfg;
    const FitResult fr = fit(data, lmax * 1.0001, w, cfg);
    const Eigen::VectorXd scale = penalty_scale_vector(sh, w);
    for (int k = 0; k < sh.total; ++k)
        if (scale[k] > 0.0) CHECK(fr.theta.values()[k] == 0.0);
    CHECK(edge_count(fr.theta) == 0);
}

TEST_CASE("unpenalized bivariate fit recovers the regression coefficient") {
    // x2 standard normal, x1 = 0.8 x2 + noise, both in standard units
    const ModelShape sh = ModelShape::make(2, 0, {}, {});
    Rng rng(7);
    const int n = 5000;
    Eigen::MatrixXd x(n, 2);
    for (int i = 0; i < n; ++i) {
        x(i, 1) = rng.normal();
        x(i, 0) = 0.8 * x(i, 1) + std::sqrt(1.0 - 0.64) * rng.normal();
    }
    for (int s = 0; s < 2; ++s) {
        const double m = x.col(s).mean();
        const double sd = std::sqrt((x.col(s).array() - m).square().sum() / (n - 1));
        x.col(s) = (x.col(s).array() - m) / sd;
    }
    const FitData data = FitData::from_matrices(sh, x, Eigen::MatrixXi(n, 0));
    SolverConfig cfg;
    cfg.tolerance = 1e-12;

    const FitResult fixed_diag = fit(data, 0.0, unit_weights(sh), cfg);
    CHECK(-fixed_diag.theta.beta(0, 1) / fixed_diag.theta.beta_diag(0) ==
          doctest::Approx(0.8).epsilon(0.05 / 0.8));

    SolverConfig joint = cfg;
    joint.optimize_beta_diag = true;
    const FitResult opt_diag = fit(data, 0.0, unit_weights(sh), joint);
    CHECK(-opt_diag.theta.beta(0, 1) / opt_diag.theta.beta_diag(0) ==
          doctest::Approx(0.8).epsilon(0.05 / 0.8));
    CHECK(opt_diag.theta.beta_diag(0) > 1.5);  // conditional precision 1/(1-0.64) ~ 2.78
}

TEST_CASE("fit matches a derivative-free reference on a tiny mixed problem") {
    const ModelShape sh = ModelShape::make(2, 1, {2}, {0});
    Rng rng(99);
    const FitData data = random_fit_data(sh, 60, rng);
    const PenaltyWeights w = unit_weights(sh);
    SolverConfig cfg;
    cfg.tolerance = 1e-13;
    cfg.max_iterations = 20000;
    const FitResult fr = fit(data, 0.01, w, cfg);

    Theta ref = Theta::zero(sh);
    const double ref_obj =
        coordinate_search_minimize(ref, data, penalty_scale_vector(sh, w) * 0.01, 200);
    CHECK(std::abs(fr.final_objective() - ref_obj) < 1e-4);
    CHECK(kkt_residual(fr.theta, data, 0.01, w) < 1e-4);
}

TEST_CASE("accepted objective values never increase under function restarts") {
    const ModelShape sh = ModelShape::make(3, 2, {2, 3}, {0, 0});
    Rng rng(31);
    const FitData data = random_fit_data(sh, 150, rng);
    SolverConfig cfg;
    cfg.tolerance = 1e-12;
    const FitResult fr = fit(data, 0.02, unit_weights(sh), cfg);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < fr.objective_trace.size(); ++k) {
        const double v = fr.objective_trace[k];
        CHECK(std::isfinite(v));
        CHECK(v <= best + 1e-12 * std::max(1.0, std::abs(best)));
        best = std::min(best, v);
    }
    CHECK(fr.converged);
    // restart points carry strictly decreasing objectives
    double last_restart = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < fr.objective_trace.size(); ++k) {
        if (!fr.restart_flags[k]) continue;
        CHECK(fr.objective_trace[k] < last_restart);
        last_restart = fr.objective_trace[k];
    }
}

TEST_CASE("gradient restart rule also converges") {
    const ModelShape sh = ModelShape::make(3, 1, {2}, {0});
    Rng rng(13);
    const FitData data = random_fit_data(sh, 100, rng);
    SolverConfig cfg;
    cfg.restart = RestartRule::Gradient;
    cfg.tolerance = 1e-12;
    const FitResult fr = fit(data, 0.05, unit_weights(sh), cfg);
    CHECK(fr.converged);
    CHECK(kkt_residual(fr.theta, data, 0.05, unit_weights(sh)) < 1e-4);
}

TEST_CASE("fit is deterministic") {
    const ModelShape sh = ModelShape::make(3, 2, {2, 2}, {0, 1});
    Rng rng(41);
    const FitData data = random_fit_data(sh, 80, rng);
    SolverConfig cfg;
    const FitResult a = fit(data, 0.03, unit_weights(sh), cfg);
    const FitResult b = fit(data, 0.03, unit_weights(sh), cfg);
    CHECK(a.theta.values() == b.theta.values());
    CHECK(a.objective_trace == b.objective_trace);
    CHECK(a.restarts == b.restarts);
}

TEST_CASE("warm starts never end worse than cold starts") {
    const ModelShape sh = ModelShape::make(4, 2, {2, 2}, {0, 0});
    Rng rng(61);
    const FitData data = random_fit_data(sh, 200, rng);
    const PenaltyWeights w = unit_weights(sh);
    SolverConfig cfg;
    cfg.tolerance = 1e-11;
    const double lmax = lambda_max(data, w);
    const FitResult coarse = fit(data, lmax * 0.5, w, cfg);
    const FitResult cold = fit(data, lmax * 0.25, w, cfg);
    const FitResult warm = fit(data, lmax * 0.25, w, cfg, coarse.theta);
    CHECK(warm.final_objective() <= cold.final_objective() + 1e-8);
}

TEST_CASE("solver validates its configuration") {
    SolverConfig cfg;
    cfg.backtracking_factor = 1.5;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
    cfg = {};
    cfg.tolerance = 0.0;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
    cfg = {};
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
}
