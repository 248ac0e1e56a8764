#ifndef MGM_SCREENING_HPP_
#define MGM_SCREENING_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mgm/dataset.hpp"
#include "mgm/theta.hpp"

namespace mgm {

struct AssociationRecord {
    std::string response;
    std::string predictor;
    double neg_log10_p = 0.0;
    double coefficient = 0.0;
    int rank = 0;
    bool top = false;
    bool collinear = false;
    bool separation = false;
    bool degenerate = false;
};

// Regresses the response on each remaining variable separately (linear with
// t-test for continuous responses, ML logistic with Wald test for binary
// ones, one-vs-baseline logistic per level for multi-level responses) and
// ranks predictors by -log10(p), strongest first.
std::vector<AssociationRecord> univariate_screen(const Dataset& ds, const std::string& response);

// Partial p-value of `predictor` in the multivariate regression of
// `response` on predictor + confounders.
AssociationRecord adjusted_association(const Dataset& ds, const std::string& response,
                                       const std::string& predictor,
                                       const std::vector<std::string>& confounders);

struct ResidualResult {
    Eigen::VectorXd residuals;
    bool collinear = false;
};

// Residuals of a multivariate linear regression of a continuous target on
// the confounders (intercept always included).
ResidualResult residual_adjust(const Dataset& ds, const std::string& target,
                               const std::vector<std::string>& confounders);

// Two-sided Student's t-test; pooled variance by default, Welch behind the flag.
std::pair<double, double> two_sample_t(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                       bool welch = false);

enum class CompareMode { Top5, Random5Of10 };

struct CompareRow {
    std::string response;
    std::string univariate_top;
    double univariate_unadjusted = 0.0;
    double univariate_adjusted = 0.0;
    std::string mgm_top;
    double mgm_unadjusted = 0.0;
    double mgm_adjusted = 0.0;
    double difference = 0.0;       // mgm_adjusted - univariate_adjusted
    double rank_percentile = 0.0;  // 0 = most negative difference, 1 = most positive
    bool skipped = false;          // response had an empty MGM neighborhood
    std::vector<std::string> drawn;  // shared random confounders (Random5Of10)
};

struct CompareTable {
    std::vector<CompareRow> rows;
    int skipped = 0;

    void save_csv(const std::string& path) const;
};

// Contrasts the univariate top association with the MGM top neighbor per
// response after confounder adjustment: top-5 mode adjusts each method for
// its own next five features, random mode adjusts both for the same five
// features drawn from the next top 10 univariate predictors.
CompareTable compare_top_features(const Dataset& ds_train, const Theta& theta, CompareMode mode,
                                  std::uint64_t seed);

}  // namespace mgm

#endif  // MGM_SCREENING_HPP_
