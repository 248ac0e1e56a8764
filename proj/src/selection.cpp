#include "mgm/selection.hpp"

#include <cmath>
#include <fstream>

#include "mgm/util.hpp"

namespace mgm {

namespace {
constexpr double kEdgeEps = 1e-8;
}

SelectionConfig::SelectionConfig() {
    for (int k = 0; k <= 28; ++k) exponent_grid.push_back(2.0 - 0.25 * k);  // 2.00 .. -5.00
}

void SelectionConfig::validate() const {
    if (gamma < 0.0 || gamma > 1.0) throw UsageError("selection: gamma must lie in [0,1]");
    if (exponent_grid.empty()) throw UsageError("selection: empty exponent grid");
    for (std::size_t k = 1; k < exponent_grid.size(); ++k)
        if (!(exponent_grid[k] < exponent_grid[k - 1]))
            throw UsageError("selection: exponent grid must be strictly decreasing");
}

std::vector<double> lambda_grid(int n, int p, int q, const SelectionConfig& cfg) {
    cfg.validate();
    if (n < 2) throw UsageError("lambda grid needs n >= 2");
    if (p + q < 2) throw UsageError("lambda grid needs p + q >= 2");
    const double lambda0 = std::sqrt(std::log(static_cast<double>(p + q)) / n);
    std::vector<double> grid;
    grid.reserve(cfg.exponent_grid.size());
    for (double e : cfg.exponent_grid) grid.push_back(lambda0 * std::pow(2.0, e));
    return grid;
}

int edge_count(const Theta& theta, bool group_level) {
    const auto& sh = theta.shape();
    int count = 0;
    for (int s = 0; s < sh.p; ++s)
        for (int t = s + 1; t < sh.p; ++t)
            if (std::abs(theta.beta(s, t)) > kEdgeEps) ++count;
    for (int s = 0; s < sh.p; ++s)
        for (int j = 0; j < sh.q; ++j) {
            int nz = 0;
            for (int l = 0; l < sh.levels[j]; ++l) {
                if (l == sh.baseline[j]) continue;
                if (std::abs(theta.rho(s, j, l)) > kEdgeEps) ++nz;
            }
            count += group_level ? (nz > 0 ? 1 : 0) : nz;
        }
    for (int r = 0; r < sh.q; ++r)
        for (int j = r + 1; j < sh.q; ++j) {
            int nz = 0;
            for (int l = 0; l < sh.levels[r]; ++l) {
                if (l == sh.baseline[r]) continue;
                for (int m = 0; m < sh.levels[j]; ++m) {
                    if (m == sh.baseline[j]) continue;
                    if (std::abs(theta.phi(r, j, l, m)) > kEdgeEps) ++nz;
                }
            }
            count += group_level ? (nz > 0 ? 1 : 0) : nz;
        }
    return count;
}

double ebic_from_loglik(double loglik, int edges, int n, int p, const std::vector<int>& levels,
                        double gamma) {
    int nvars = p;  // baseline levels removed: each discrete variable adds L_j - 1
    for (int lj : levels) nvars += lj - 1;
    return -2.0 * loglik + edges * std::log(static_cast<double>(n)) +
           4.0 * edges * gamma * std::log(static_cast<double>(nvars));
}

double ebic(const Theta& theta, const Dataset& ds, double gamma) {
    const double per_sample_nll = neg_pseudo_loglik(theta, ds);
    const double loglik = -static_cast<double>(ds.n()) * per_sample_nll;
    return ebic_from_loglik(loglik, edge_count(theta), ds.n(), theta.shape().p,
                            theta.shape().levels, gamma);
}

std::vector<FitResult> fit_path(const FitData& data, const std::vector<double>& grid,
                                const PenaltyWeights& w, const SolverConfig& solver,
                                bool warm_start, std::vector<std::string>* errors) {
    std::vector<FitResult> path;
    path.reserve(grid.size());
    std::optional<Theta> carry;
    for (double lambda : grid) {
        try {
            FitResult r = fit(data, lambda, w, solver, warm_start ? carry : std::nullopt);
            if (warm_start) carry = r.theta;
            path.push_back(std::move(r));
        } catch (const NumericError& e) {
            if (errors) errors->push_back("lambda=" + format_double(lambda) + ": " + e.what());
            path.emplace_back();  // empty marker row
        }
    }
    return path;
}

SelectionResult select_model(const Dataset& ds, const SelectionConfig& cfg,
                             const SolverConfig& solver,
                             const std::optional<PenaltyWeights>& weights) {
    cfg.validate();
    const FitData data = FitData::from_dataset(ds);
    const PenaltyWeights w = weights ? *weights : compute_penalty_weights(ds);
    const std::vector<double> grid = lambda_grid(ds.n(), ds.p(), ds.q(), cfg);

    std::vector<std::string> errors;
    SelectionResult out;
    out.path = fit_path(data, grid, w, solver, cfg.warm_start, &errors);

    int best = -1;
    std::size_t err_at = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        SelectionRow row;
        row.lambda = grid[k];
        const FitResult& fr = out.path[k];
        if (fr.objective_trace.empty() && fr.iterations == 0 && fr.theta.values().size() == 0) {
            row.failed = true;
            row.note = err_at < errors.size() ? errors[err_at++] : "solver failure";
            out.table.push_back(std::move(row));
            continue;
        }
        row.edge_count = edge_count(fr.theta, cfg.group_edge_count);
        // EBIC scores the maximized likelihood of the selected support, so
        // each path point is refitted without penalty on its nonzero pattern
        const FitResult refit = refit_support(data, fr.theta, solver);
        const double loglik = -static_cast<double>(ds.n()) * refit.final_objective();
        row.ebic = ebic_from_loglik(loglik, row.edge_count, ds.n(), ds.p(),
                                    ds.schema().level_counts(), cfg.gamma);
        row.objective = fr.final_objective();
        // strict comparison keeps the first (largest-lambda, sparsest) minimizer
        if (best < 0 || row.ebic < out.table[best].ebic) best = static_cast<int>(out.table.size());
        out.table.push_back(std::move(row));
    }
    if (best < 0) throw NumericError("model selection failed at every lambda on the grid");
    out.lambda_star = out.table[best].lambda;
    out.theta_star = out.path[best].theta;
    return out;
}

void SelectionResult::save_table_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write selection table: " + path);
    out << "lambda,ebic,edge_count,objective\n";
    for (const auto& row : table) {
        if (row.failed) continue;
        out << format_double(row.lambda) << ',' << format_double(row.ebic) << ','
            << row.edge_count << ',' << format_double(row.objective) << '\n';
    }
}

}  // namespace mgm
