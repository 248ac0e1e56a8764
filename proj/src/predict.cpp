#include "mgm/predict.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mgm/objective.hpp"
#include "mgm/util.hpp"

namespace mgm {

Eigen::MatrixXd predict_node(const Theta& theta, const Dataset& ds, const std::string& node) {
    const auto& schema = ds.schema();
    if (!theta.shape().matches(schema)) throw DataError("theta shape does not match schema");
    const int pos = schema.require(node);
    const int k = schema.kind_index(pos);
    const bool continuous = schema.var(pos).kind == VarKind::Continuous;

    Eigen::MatrixXd out(ds.n(), continuous ? 1 : schema.levels(k));
    Eigen::VectorXd xrow(ds.p());
    Eigen::VectorXi yrow(ds.q());
    for (int i = 0; i < ds.n(); ++i) {
        xrow = ds.x().row(i);
        yrow = ds.y().row(i);
        if (continuous)
            out(i, 0) = gaussian_conditional(theta, xrow, yrow, k).first;
        else
            out.row(i) = discrete_conditional(theta, xrow, yrow, k).transpose();
    }
    return out;
}

double pearson(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
    if (pred.size() != truth.size()) throw UsageError("pearson: length mismatch");
    const auto n = pred.size();
    if (n < 3) throw UsageError("pearson: need at least 3 observations");
    const Eigen::VectorXd a = pred.array() - pred.mean();
    const Eigen::VectorXd b = truth.array() - truth.mean();
    const double va = a.squaredNorm(), vb = b.squaredNorm();
    // guard against constant inputs whose centered norm is rounding noise
    const double sa = pred.cwiseAbs().maxCoeff(), sb = truth.cwiseAbs().maxCoeff();
    const double tol = 1e-24 * static_cast<double>(n);
    if (va <= tol * std::max(1.0, sa * sa) || vb <= tol * std::max(1.0, sb * sb))
        throw NumericError("pearson: zero variance input");
    return a.dot(b) / std::sqrt(va * vb);
}

std::pair<double, std::vector<RocPoint>> roc_auc(const Eigen::VectorXd& scores,
                                                 const std::vector<int>& labels) {
    if (static_cast<std::size_t>(scores.size()) != labels.size())
        throw UsageError("roc_auc: length mismatch");
    std::int64_t pos = 0, neg = 0;
    for (int l : labels) (l ? pos : neg)++;
    if (pos == 0 || neg == 0) throw DataError("roc_auc: both classes must be present");

    std::vector<int> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] > scores[b]; });

    std::vector<RocPoint> roc{{0.0, 0.0}};
    double area2 = 0.0;  // twice the area, accumulated in exact counts
    std::int64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::int64_t dtp = 0, dfp = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] ? dtp : dfp)++;
            ++j;
        }
        area2 += static_cast<double>(dfp) * (2 * tp + dtp);  // trapezoid: ties give half credit
        tp += dtp;
        fp += dfp;
        roc.push_back({static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
        i = j;
    }
    return {area2 / (2.0 * static_cast<double>(pos) * static_cast<double>(neg)), std::move(roc)};
}

PredictionReport evaluate_node(const Theta& theta, const Dataset& ds, const std::string& node) {
    PredictionReport rep;
    rep.node = node;
    const int pos = ds.schema().require(node);
    rep.kind = ds.schema().var(pos).kind;
    rep.predictions = predict_node(theta, ds, node);
    const int k = ds.schema().kind_index(pos);
    if (rep.kind == VarKind::Continuous) {
        rep.correlation = pearson(rep.predictions.col(0), ds.x().col(k));
    } else {
        // score = probability of not being at the baseline level
        const int base = ds.schema().baseline(k);
        Eigen::VectorXd score = Eigen::VectorXd::Zero(ds.n());
        for (int l = 0; l < ds.schema().levels(k); ++l)
            if (l != base) score += rep.predictions.col(l);
        std::vector<int> labels(ds.n());
        for (int i = 0; i < ds.n(); ++i) labels[i] = ds.y()(i, k) != base ? 1 : 0;
        auto [auc, roc] = roc_auc(score, labels);
        rep.auc = auc;
        rep.roc = std::move(roc);
    }
    return rep;
}

}  // namespace mgm
