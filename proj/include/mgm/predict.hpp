#ifndef MGM_PREDICT_HPP_
#define MGM_PREDICT_HPP_

#include <Eigen/Core>
#include <string>
#include <vector>

#include "mgm/dataset.hpp"
#include "mgm/theta.hpp"

namespace mgm {

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct PredictionReport {
    std::string node;
    VarKind kind = VarKind::Continuous;
    Eigen::MatrixXd predictions;  // n x 1 conditional means, or n x L level probabilities
    double correlation = 0.0;     // continuous nodes
    double auc = 0.0;             // discrete nodes
    std::vector<RocPoint> roc;
};

// Conditional-mean / conditional-probability predictions of one node per
// sample of `ds`; only fitted neighborhood parameters influence the output.
Eigen::MatrixXd predict_node(const Theta& theta, const Dataset& ds, const std::string& node);

double pearson(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth);

// Threshold sweep over distinct scores; AUC by the trapezoid rule (ties
// contribute half). labels are 0/1 and both classes must be present.
std::pair<double, std::vector<RocPoint>> roc_auc(const Eigen::VectorXd& scores,
                                                 const std::vector<int>& labels);

// predictions plus validation metric against the observed values in `ds`
// (Pearson for continuous nodes; AUC of the non-baseline probability for
// discrete nodes).
PredictionReport evaluate_node(const Theta& theta, const Dataset& ds, const std::string& node);

}  // namespace mgm

#endif  // MGM_PREDICT_HPP_
