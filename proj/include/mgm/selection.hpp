#ifndef MGM_SELECTION_HPP_
#define MGM_SELECTION_HPP_

#include <optional>
#include <string>
#include <vector>

#include "mgm/solver.hpp"

namespace mgm {

struct SelectionConfig {
    double gamma = 1.0;
    std::vector<double> exponent_grid;  // strictly decreasing; default 2.00 .. -5.00 step 0.25
    bool group_edge_count = false;      // count edge groups instead of scalar parameters
    bool warm_start = true;             // cold starts give identical selection semantics

    SelectionConfig();
    void validate() const;
};

struct SelectionRow {
    double lambda = 0.0;
    double ebic = 0.0;
    int edge_count = 0;
    double objective = 0.0;  // final composite objective of the fit
    bool failed = false;
    std::string note;
};

struct SelectionResult {
    double lambda_star = 0.0;
    Theta theta_star;
    std::vector<SelectionRow> table;
    std::vector<FitResult> path;  // aligned with table rows

    void save_table_csv(const std::string& path) const;
};

// lambda0 * 2^e over the exponent grid, lambda0 = sqrt(log(p+q)/n).
std::vector<double> lambda_grid(int n, int p, int q, const SelectionConfig& cfg = {});

// Nonzero penalized scalar parameters (|v| > 1e-8) after removing baseline
// levels; symmetric pairs count once. Group mode counts variable pairs with
// any surviving entry.
int edge_count(const Theta& theta, bool group_level = false);

// EBIC_gamma = -2 l_n + |E| log n + 4 |E| gamma log P with
// l_n = -n * per-sample objective and P = p + sum_j (L_j - 1).
double ebic(const Theta& theta, const Dataset& ds, double gamma);
double ebic_from_loglik(double loglik, int edge_count, int n, int p,
                        const std::vector<int>& levels, double gamma);

// Fits the whole lambda path, largest lambda first, warm-starting each fit
// from the previous solution. Failed fits are skipped.
std::vector<FitResult> fit_path(const FitData& data, const std::vector<double>& grid,
                                const PenaltyWeights& w, const SolverConfig& solver,
                                bool warm_start = true, std::vector<std::string>* errors = nullptr);

// Full line search: fit path, score by EBIC, return the minimizer with ties
// broken toward larger lambda (the sparser model). The EBIC likelihood is
// the support-restricted maximizer of each path point (refit without
// penalty on its nonzero pattern); theta_star remains the penalized fit.
SelectionResult select_model(const Dataset& ds, const SelectionConfig& cfg,
                             const SolverConfig& solver,
                             const std::optional<PenaltyWeights>& weights = std::nullopt);

}  // namespace mgm

#endif  // MGM_SELECTION_HPP_
