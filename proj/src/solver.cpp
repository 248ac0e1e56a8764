#include "mgm/solver.hpp"

#include <cmath>

#include "mgm/util.hpp"

namespace mgm {

namespace {

constexpr double kBetaDiagFloor = 1e-6;

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, const Eigen::VectorXd& thresholds) {
    return v.array().sign() * (v.array().abs() - thresholds.array()).max(0.0);
}

void clamp_beta_diag(Eigen::VectorXd& v, const ModelShape& sh) {
    v.segment(sh.beta_diag_off, sh.p) = v.segment(sh.beta_diag_off, sh.p).cwiseMax(kBetaDiagFloor);
}

}  // namespace

void SolverConfig::validate() const {
    if (max_iterations < 1) throw UsageError("solver: max_iterations must be positive");
    if (!(tolerance > 0.0)) throw UsageError("solver: tolerance must be positive");
    if (!(initial_step > 0.0)) throw UsageError("solver: initial_step must be positive");
    if (!(backtracking_factor > 0.0 && backtracking_factor < 1.0))
        throw UsageError("solver: backtracking_factor must lie in (0,1)");
}

Theta prox_weighted_l1(const Theta& theta, const Eigen::VectorXd& thresholds) {
    if (thresholds.size() != theta.values().size())
        throw UsageError("prox: threshold vector size mismatch");
    if ((thresholds.array() < 0.0).any()) throw UsageError("prox: negative threshold");
    Theta out = theta;
    out.values() = soft_threshold(theta.values(), thresholds);
    return out;
}

double lambda_max(const FitData& data, const PenaltyWeights& w) {
    Theta zero = Theta::zero(data.shape);
    Eigen::VectorXd grad;
    neg_pseudo_loglik_gradient(zero, data, grad, false);
    const Eigen::VectorXd scale = penalty_scale_vector(data.shape, w);
    double lmax = 0.0;
    for (Eigen::Index k = 0; k < grad.size(); ++k)
        if (scale[k] > 0.0) lmax = std::max(lmax, std::abs(grad[k]) / scale[k]);
    return lmax;
}

double lambda_max(const Dataset& ds, const PenaltyWeights& w) {
    return lambda_max(FitData::from_dataset(ds), w);
}

namespace {

// Shared accelerated proximal loop. `frozen`, when present, pins coordinates
// at their starting value (used by the support-restricted refit).
FitResult run_apg(const FitData& data, const Eigen::VectorXd& pen_scale, const SolverConfig& cfg,
                  const std::optional<Theta>& warm_start, const std::vector<char>* frozen) {
    cfg.validate();
    const ModelShape& sh = data.shape;

    Theta x = warm_start ? *warm_start : Theta::zero(sh);
    if (warm_start && !(x.shape().p == sh.p && x.shape().q == sh.q && x.shape().levels == sh.levels))
        throw DataError("warm start shape mismatch");

    Eigen::VectorXd grad(sh.total);
    double obj_x = neg_pseudo_loglik(x, data) + pen_scale.dot(x.values().cwiseAbs());

    FitResult res;
    Theta y = x;
    Theta cand(sh);
    double t_momentum = 1.0;
    double step = cfg.initial_step;

    auto trace_tail = [&res] {
        std::string tail = "trace tail:";
        const std::size_t n = res.objective_trace.size();
        for (std::size_t k = n > 5 ? n - 5 : 0; k < n; ++k)
            tail += " " + std::to_string(res.objective_trace[k]);
        return tail;
    };

    // prox-gradient step from `from`, backtracking until the quadratic upper
    // bound holds; returns the candidate's composite objective
    auto descend = [&](const Theta& from) {
        const double f_from = neg_pseudo_loglik_gradient(from, data, grad, cfg.optimize_beta_diag);
        if (frozen)
            for (int k = 0; k < sh.total; ++k)
                if ((*frozen)[k]) grad[k] = 0.0;
        for (int shrink = 0;; ++shrink) {
            cand.values() = soft_threshold(from.values() - step * grad, step * pen_scale);
            if (cfg.optimize_beta_diag) clamp_beta_diag(cand.values(), sh);
            const Eigen::VectorXd diff = cand.values() - from.values();
            const double f_cand = neg_pseudo_loglik(cand, data);
            if (f_cand <= f_from + grad.dot(diff) + diff.squaredNorm() / (2.0 * step) + 1e-12)
                return f_cand + pen_scale.dot(cand.values().cwiseAbs());
            step *= cfg.backtracking_factor;
            if (shrink > 120 || !(step > 0.0))
                throw NumericError("line search failed: step underflow; " + trace_tail());
        }
    };

    for (int it = 0; it < cfg.max_iterations; ++it) {
        double obj_cand = descend(y);
        if (!std::isfinite(obj_cand))
            throw NumericError("non-finite objective at iteration " + std::to_string(it) + "; " +
                               trace_tail());

        bool restarted = false;
        const double slack = 1e-12 * std::max(1.0, std::abs(obj_x));
        if (cfg.restart == RestartRule::FunctionValue) {
            restarted = obj_cand > obj_x + slack;
        } else if (cfg.restart == RestartRule::Gradient && it > 0) {
            restarted = (y.values() - cand.values()).dot(cand.values() - x.values()) > 0.0;
        }
        if (restarted) {
            // reject the momentum step, clear momentum, and take a plain
            // proximal step from the best iterate (guaranteed descent)
            ++res.restarts;
            t_momentum = 1.0;
            obj_cand = descend(x);
        }

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
        y.values() = cand.values() + ((t_momentum - 1.0) / t_next) * (cand.values() - x.values());
        if (cfg.optimize_beta_diag) clamp_beta_diag(y.values(), sh);
        t_momentum = t_next;

        const double rel_change = std::abs(obj_cand - obj_x) / std::max(1.0, std::abs(obj_x));
        x.values() = cand.values();
        obj_x = obj_cand;
        res.objective_trace.push_back(obj_x);
        res.step_trace.push_back(step);
        res.restart_flags.push_back(restarted ? 1 : 0);
        ++res.iterations;
        if (rel_change < cfg.tolerance) {
            res.converged = true;
            break;
        }
    }

    res.theta = std::move(x);
    return res;
}

}  // namespace

FitResult fit(const FitData& data, double lambda, const PenaltyWeights& w, const SolverConfig& cfg,
              const std::optional<Theta>& warm_start) {
    if (lambda < 0.0) throw UsageError("negative penalty parameter");
    const Eigen::VectorXd pen_scale = penalty_scale_vector(data.shape, w) * lambda;
    FitResult res = run_apg(data, pen_scale, cfg, warm_start, nullptr);
    res.theta.zero_baseline_entries();
    return res;
}

FitResult fit(const Dataset& ds, double lambda, const PenaltyWeights& w, const SolverConfig& cfg,
              const std::optional<Theta>& warm_start) {
    return fit(FitData::from_dataset(ds), lambda, w, cfg, warm_start);
}

FitResult refit_support(const FitData& data, const Theta& support, const SolverConfig& cfg) {
    const ModelShape& sh = data.shape;
    std::vector<char> frozen(sh.total, 0);
    const Eigen::VectorXd unit = penalty_scale_vector(
        sh, PenaltyWeights{Eigen::MatrixXd::Ones(sh.p, sh.p), Eigen::MatrixXd::Ones(sh.p, sh.q),
                           Eigen::MatrixXd::Ones(sh.q, sh.q), 1.0});
    for (int k = 0; k < sh.total; ++k)
        frozen[k] = unit[k] > 0.0 && support.values()[k] == 0.0;  // off-support couplings stay zero
    return run_apg(data, Eigen::VectorXd::Zero(sh.total), cfg, support, &frozen);
}

double kkt_residual(const Theta& theta, const FitData& data, double lambda,
                    const PenaltyWeights& w, bool optimize_beta_diag) {
    Eigen::VectorXd grad;
    neg_pseudo_loglik_gradient(theta, data, grad, optimize_beta_diag);
    const Eigen::VectorXd scale = penalty_scale_vector(theta.shape(), w) * lambda;
    double worst = 0.0;
    for (Eigen::Index k = 0; k < grad.size(); ++k) {
        const double v = theta.values()[k];
        double viol;
        if (scale[k] <= 0.0)
            viol = std::abs(grad[k]);
        else if (v != 0.0)
            viol = std::abs(grad[k] + scale[k] * (v > 0.0 ? 1.0 : -1.0));
        else
            viol = std::max(0.0, std::abs(grad[k]) - scale[k]);
        worst = std::max(worst, viol);
    }
    return worst;
}

}  // namespace mgm
