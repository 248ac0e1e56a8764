#include "mgm/screening.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "mgm/graph.hpp"
#include "mgm/rng.hpp"
#include "mgm/stats.hpp"
#include "mgm/util.hpp"

namespace mgm {

namespace {

// dummy-coded width of a variable in a design matrix
int var_width(const VariableSchema& schema, int pos) {
    const auto& v = schema.var(pos);
    return v.kind == VarKind::Continuous ? 1 : v.level_count() - 1;
}

// writes the variable's columns (continuous value or non-baseline level
// indicators) for the given rows
void fill_var_columns(const Dataset& ds, int pos, const std::vector<int>& rows, Eigen::MatrixXd& X,
                      int col0) {
    const auto& schema = ds.schema();
    const int k = schema.kind_index(pos);
    if (schema.var(pos).kind == VarKind::Continuous) {
        for (std::size_t i = 0; i < rows.size(); ++i) X(static_cast<Eigen::Index>(i), col0) = ds.x()(rows[i], k);
        return;
    }
    const auto& v = schema.var(pos);
    int c = col0;
    for (int l = 0; l < v.level_count(); ++l) {
        if (l == v.baseline) continue;
        for (std::size_t i = 0; i < rows.size(); ++i)
            X(static_cast<Eigen::Index>(i), c) = ds.y()(rows[i], k) == l ? 1.0 : 0.0;
        ++c;
    }
}

bool column_degenerate(const Eigen::MatrixXd& X, int col0, int width) {
    for (int c = col0; c < col0 + width; ++c) {
        const double first = X(0, c);
        bool varies = false;
        for (Eigen::Index i = 1; i < X.rows(); ++i)
            if (X(i, c) != first) {
                varies = true;
                break;
            }
        if (varies) return false;
    }
    return true;
}

struct TestOutcome {
    double p = 1.0;
    double coefficient = 0.0;
    bool collinear = false;
    bool separation = false;
    bool degenerate = false;
};

// Partial test of `predictor` in response ~ predictor + confounders over the
// given rows with a binary 0/1 response vector (logistic) or continuous
// response (linear).
TestOutcome run_test(const Dataset& ds, bool logistic, const Eigen::VectorXd& y_cont,
                     const Eigen::VectorXi& y_bin, int predictor_pos,
                     const std::vector<int>& confounders, const std::vector<int>& rows) {
    const auto& schema = ds.schema();
    const int m = var_width(schema, predictor_pos);
    int width = 1 + m;
    for (int c : confounders) width += var_width(schema, c);
    const auto n = static_cast<Eigen::Index>(rows.size());

    TestOutcome out;
    if (n < width + 2) {
        out.degenerate = true;
        return out;
    }
    Eigen::MatrixXd X(n, width);
    X.col(0).setOnes();
    fill_var_columns(ds, predictor_pos, rows, X, 1);
    int col = 1 + m;
    for (int c : confounders) {
        fill_var_columns(ds, c, rows, X, col);
        col += var_width(schema, c);
    }
    if (column_degenerate(X, 1, m)) {
        out.degenerate = true;
        return out;  // zero-variance predictor: p stays 1
    }

    if (!logistic) {
        const RegressionFit full = linear_regression(X, y_cont);
        if (full.collinear) {
            out.collinear = true;
            return out;
        }
        out.coefficient = full.coef[1];
        if (m == 1) {
            // an exactly-zero residual (response duplicates the predictor)
            // degenerates se to 0; the p-value then underflows to the cap
            const double t = full.se[1] > 0.0 ? full.coef[1] / full.se[1]
                                              : (full.coef[1] == 0.0 ? 0.0 : 1e308);
            out.p = t_pvalue(t, full.df_resid);
        } else {
            // nested F-test on the predictor's column block
            Eigen::MatrixXd Xr(n, width - m);
            Xr.col(0) = X.col(0);
            Xr.rightCols(width - m - 1) = X.rightCols(width - m - 1);
            const RegressionFit reduced = linear_regression(Xr, y_cont);
            const double num = std::max(0.0, reduced.rss - full.rss) / m;
            const double den = full.rss / std::max(1, full.df_resid);
            out.p = den > 0.0 ? f_pvalue(num / den, m, full.df_resid) : 0.0;
        }
        return out;
    }

    const RegressionFit full = logistic_regression(X, y_bin);
    if (full.collinear) {
        out.collinear = true;
        return out;
    }
    if (!full.converged) {
        out.separation = true;  // documented cap: separated fits report p = 1e-300
        out.p = 1e-300;
        out.coefficient = full.coef[1];
        return out;
    }
    out.coefficient = full.coef[1];
    if (m == 1) {
        const double z = full.se[1] > 0.0 ? full.coef[1] / full.se[1] : 0.0;
        out.p = normal_pvalue(z);
    } else {
        const Eigen::MatrixXd cov_block = full.cov.block(1, 1, m, m);
        const Eigen::VectorXd b = full.coef.segment(1, m);
        const double chi2 = b.dot(cov_block.ldlt().solve(b));
        out.p = chi2_pvalue(chi2, m);
    }
    return out;
}

// Dispatches on the response kind; multi-level discrete responses run one
// logistic fit per non-baseline level against the baseline and keep the
// strongest level.
TestOutcome association_test(const Dataset& ds, int response_pos, int predictor_pos,
                             const std::vector<int>& confounders) {
    const auto& schema = ds.schema();
    const auto& rv = schema.var(response_pos);
    const int rk = schema.kind_index(response_pos);
    std::vector<int> all_rows(ds.n());
    std::iota(all_rows.begin(), all_rows.end(), 0);

    if (rv.kind == VarKind::Continuous) {
        Eigen::VectorXd y = ds.x().col(rk);
        if ((y.array() - y[0]).abs().maxCoeff() == 0.0)
            throw DataError("screening response has zero variance: " + rv.name);
        return run_test(ds, false, y, {}, predictor_pos, confounders, all_rows);
    }

    TestOutcome best;
    bool first = true;
    for (int level = 0; level < rv.level_count(); ++level) {
        if (level == rv.baseline) continue;
        std::vector<int> rows;
        Eigen::VectorXi yb;
        if (rv.level_count() == 2) {
            rows = all_rows;
            yb.resize(ds.n());
            for (int i = 0; i < ds.n(); ++i) yb[i] = ds.y()(i, rk) == level ? 1 : 0;
        } else {
            for (int i = 0; i < ds.n(); ++i)
                if (ds.y()(i, rk) == level || ds.y()(i, rk) == rv.baseline) rows.push_back(i);
            yb.resize(static_cast<Eigen::Index>(rows.size()));
            for (std::size_t i = 0; i < rows.size(); ++i)
                yb[static_cast<Eigen::Index>(i)] = ds.y()(rows[i], rk) == level ? 1 : 0;
        }
        const int ones = yb.sum();
        if (ones == 0 || ones == yb.size()) {
            if (rv.level_count() == 2)
                throw DataError("screening response has a single observed class: " + rv.name);
            continue;
        }
        TestOutcome t = run_test(ds, true, {}, yb, predictor_pos, confounders, rows);
        if (first || t.p < best.p) {
            best = t;
            first = false;
        }
    }
    if (first) throw DataError("screening response has a single observed class: " + rv.name);
    return best;
}

}  // namespace

std::vector<AssociationRecord> univariate_screen(const Dataset& ds, const std::string& response) {
    const auto& schema = ds.schema();
    const int rpos = schema.require(response);
    std::vector<AssociationRecord> records;
    for (int pos = 0; pos < schema.size(); ++pos) {
        if (pos == rpos) continue;
        const TestOutcome t = association_test(ds, rpos, pos, {});
        AssociationRecord rec;
        rec.response = response;
        rec.predictor = schema.var(pos).name;
        rec.neg_log10_p = neg_log10_p(t.p);
        rec.coefficient = t.coefficient;
        rec.collinear = t.collinear;
        rec.separation = t.separation;
        rec.degenerate = t.degenerate;
        records.push_back(std::move(rec));
    }
    // canonical order: strength descending, schema order at ties
    std::vector<int> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return records[a].neg_log10_p > records[b].neg_log10_p;
    });
    std::vector<AssociationRecord> out;
    out.reserve(records.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        AssociationRecord rec = records[order[r]];
        rec.rank = static_cast<int>(r) + 1;
        rec.top = r == 0;
        out.push_back(std::move(rec));
    }
    return out;
}

AssociationRecord adjusted_association(const Dataset& ds, const std::string& response,
                                       const std::string& predictor,
                                       const std::vector<std::string>& confounders) {
    const auto& schema = ds.schema();
    const int rpos = schema.require(response);
    const int ppos = schema.require(predictor);
    std::vector<int> conf;
    for (const auto& c : confounders) {
        const int cpos = schema.require(c);
        if (cpos == rpos || cpos == ppos)
            throw UsageError("confounder set must exclude response and predictor: " + c);
        conf.push_back(cpos);
    }
    const TestOutcome t = association_test(ds, rpos, ppos, conf);
    AssociationRecord rec;
    rec.response = response;
    rec.predictor = predictor;
    rec.neg_log10_p = neg_log10_p(t.p);
    rec.coefficient = t.coefficient;
    rec.collinear = t.collinear;
    rec.separation = t.separation;
    rec.degenerate = t.degenerate;
    return rec;
}

ResidualResult residual_adjust(const Dataset& ds, const std::string& target,
                               const std::vector<std::string>& confounders) {
    const auto& schema = ds.schema();
    const int tpos = schema.require(target);
    if (schema.var(tpos).kind != VarKind::Continuous)
        throw DataError("residual adjustment target must be continuous: " + target);
    std::vector<int> rows(ds.n());
    std::iota(rows.begin(), rows.end(), 0);
    int width = 1;
    for (const auto& c : confounders) width += var_width(schema, schema.require(c));
    Eigen::MatrixXd X(ds.n(), width);
    X.col(0).setOnes();
    int col = 1;
    for (const auto& c : confounders) {
        const int cpos = schema.require(c);
        fill_var_columns(ds, cpos, rows, X, col);
        col += var_width(schema, cpos);
    }
    const Eigen::VectorXd y = ds.x().col(schema.kind_index(tpos));
    const RegressionFit fit = linear_regression(X, y);
    return {y - X * fit.coef, fit.collinear};
}

std::pair<double, double> two_sample_t(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                       bool welch) {
    const auto n1 = a.size(), n2 = b.size();
    if (n1 < 2 || n2 < 2) throw UsageError("t-test needs at least 2 values per group");
    const double m1 = a.mean(), m2 = b.mean();
    const double s1 = (a.array() - m1).square().sum() / (n1 - 1);
    const double s2 = (b.array() - m2).square().sum() / (n2 - 1);
    double t, df;
    if (welch) {
        const double v1 = s1 / n1, v2 = s2 / n2;
        if (v1 + v2 <= 0.0) throw NumericError("t-test: zero variance in both groups");
        t = (m1 - m2) / std::sqrt(v1 + v2);
        df = (v1 + v2) * (v1 + v2) / (v1 * v1 / (n1 - 1) + v2 * v2 / (n2 - 1));
    } else {
        const double pooled = ((n1 - 1) * s1 + (n2 - 1) * s2) / (n1 + n2 - 2);
        if (pooled <= 0.0) throw NumericError("t-test: zero pooled variance");
        t = (m1 - m2) / std::sqrt(pooled * (1.0 / n1 + 1.0 / n2));
        df = static_cast<double>(n1 + n2 - 2);
    }
    return {t, t_pvalue(t, df)};
}

CompareTable compare_top_features(const Dataset& ds_train, const Theta& theta, CompareMode mode,
                                  std::uint64_t seed) {
    const auto& schema = ds_train.schema();
    const MixedGraph graph = aggregate(theta, schema);
    Rng rng(seed);
    CompareTable table;

    for (int pos = 0; pos < schema.size(); ++pos) {
        const std::string response = schema.var(pos).name;
        CompareRow row;
        row.response = response;

        const auto screen = univariate_screen(ds_train, response);
        if (screen.empty()) continue;
        row.univariate_top = screen[0].predictor;
        row.univariate_unadjusted = screen[0].neg_log10_p;

        // shared random draw: five features out of the next top 10 univariate
        // predictors, reused verbatim for the MGM adjustment
        if (mode == CompareMode::Random5Of10) {
            std::vector<std::string> pool;
            for (std::size_t k = 1; k < screen.size() && pool.size() < 10; ++k)
                pool.push_back(screen[k].predictor);
            std::vector<int> idx(pool.size());
            std::iota(idx.begin(), idx.end(), 0);
            rng.shuffle(idx);
            const std::size_t take = std::min<std::size_t>(5, pool.size());
            std::vector<int> chosen(idx.begin(), idx.begin() + take);
            std::sort(chosen.begin(), chosen.end());
            for (int k : chosen) row.drawn.push_back(pool[k]);
        }

        const MixedGraph star = neighborhood(graph, response);
        if (star.edges.empty()) {
            row.skipped = true;
            ++table.skipped;
            table.rows.push_back(std::move(row));
            continue;
        }
        row.mgm_top = star.edges[0].a == response ? star.edges[0].b : star.edges[0].a;
        row.mgm_unadjusted =
            adjusted_association(ds_train, response, row.mgm_top, {}).neg_log10_p;

        std::vector<std::string> univ_conf, mgm_conf;
        if (mode == CompareMode::Top5) {
            for (std::size_t k = 1; k < screen.size() && univ_conf.size() < 5; ++k)
                univ_conf.push_back(screen[k].predictor);
            for (std::size_t k = 1; k < star.edges.size() && mgm_conf.size() < 5; ++k)
                mgm_conf.push_back(star.edges[k].a == response ? star.edges[k].b : star.edges[k].a);
        } else {
            univ_conf = row.drawn;  // pool starts at rank 2, never contains the top
            for (const auto& f : row.drawn)
                if (f != row.mgm_top) mgm_conf.push_back(f);
        }

        row.univariate_adjusted =
            adjusted_association(ds_train, response, row.univariate_top, univ_conf).neg_log10_p;
        row.mgm_adjusted =
            adjusted_association(ds_train, response, row.mgm_top, mgm_conf).neg_log10_p;
        row.difference = row.mgm_adjusted - row.univariate_adjusted;
        table.rows.push_back(std::move(row));
    }

    // rank percentiles over the scored responses, most negative difference at 0
    std::vector<int> scored;
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        if (!table.rows[i].skipped) scored.push_back(static_cast<int>(i));
    std::stable_sort(scored.begin(), scored.end(),
                     [&](int a, int b) { return table.rows[a].difference < table.rows[b].difference; });
    const std::size_t m = scored.size();
    for (std::size_t r = 0; r < m; ++r)
        table.rows[scored[r]].rank_percentile = m > 1 ? static_cast<double>(r) / (m - 1) : 1.0;
    return table;
}

void CompareTable::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write comparison table: " + path);
    out << "response,univariate_top,univariate_unadjusted,univariate_adjusted,mgm_top,"
           "mgm_unadjusted,mgm_adjusted,difference,rank_percentile,skipped,drawn\n";
    for (const auto& r : rows) {
        out << r.response << ',' << r.univariate_top << ',' << format_double(r.univariate_unadjusted)
            << ',' << format_double(r.univariate_adjusted) << ',' << r.mgm_top << ','
            << format_double(r.mgm_unadjusted) << ',' << format_double(r.mgm_adjusted) << ','
            << format_double(r.difference) << ',' << format_double(r.rank_percentile) << ','
            << (r.skipped ? 1 : 0) << ',';
        for (std::size_t k = 0; k < r.drawn.size(); ++k) {
            if (k) out << ';';
            out << r.drawn[k];
        }
        out << '\n';
    }
}

}  // namespace mgm
