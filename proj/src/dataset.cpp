#include "mgm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mgm/rng.hpp"
#include "mgm/util.hpp"

namespace mgm {

namespace {

constexpr double kSdFloor = 1e-12;

// strict double parse; returns false for empty/partial/NaN cells
bool parse_double(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + cell.size()) return false;
    if (!std::isfinite(v)) return false;
    out = v;
    return true;
}

void standardize_columns(Eigen::MatrixXd& x, const Eigen::VectorXd& mean, const Eigen::VectorXd& sd,
                         const VariableSchema& schema, const char* what,
                         std::vector<TransformRecord>& log) {
    for (int s = 0; s < static_cast<int>(x.cols()); ++s) {
        if (sd[s] < kSdFloor)
            throw DataError(std::string("zero variance under standardization: column ") +
                            schema.continuous(s).name);
        x.col(s) = (x.col(s).array() - mean[s]) / sd[s];
        log.push_back({schema.continuous(s).name, what,
                       "mean=" + format_double(mean[s]) + " sd=" + format_double(sd[s])});
    }
}

}  // namespace

Dataset::Dataset(VariableSchema schema, Eigen::MatrixXd x, Eigen::MatrixXi y,
                 std::vector<TransformRecord> log)
    : schema_(std::move(schema)), x_(std::move(x)), y_(std::move(y)), log_(std::move(log)) {
    if (x_.rows() != y_.rows() && x_.cols() > 0 && y_.cols() > 0)
        throw DataError("dataset: continuous and discrete row counts differ");
    if (x_.cols() != schema_.p() || y_.cols() != schema_.q())
        throw DataError("dataset: matrix shapes do not match schema");
}

bool Dataset::has_transform(const std::string& column, const std::string& op) const {
    for (const auto& r : log_)
        if (r.column == column && r.op == op) return true;
    return false;
}

std::vector<Eigen::VectorXd> Dataset::level_frequencies() const {
    std::vector<Eigen::VectorXd> out;
    out.reserve(q());
    for (int j = 0; j < q(); ++j) {
        Eigen::VectorXd f = Eigen::VectorXd::Zero(schema_.levels(j));
        for (int i = 0; i < n(); ++i) f[y_(i, j)] += 1.0;
        if (n() > 0) f /= static_cast<double>(n());
        out.push_back(std::move(f));
    }
    return out;
}

Eigen::VectorXd Dataset::column_means() const {
    return x_.rows() ? Eigen::VectorXd(x_.colwise().mean()) : Eigen::VectorXd::Zero(p());
}

Eigen::VectorXd Dataset::column_sds() const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(p());
    if (n() < 2) return out;
    const Eigen::VectorXd m = column_means();
    for (int s = 0; s < p(); ++s)
        out[s] = std::sqrt((x_.col(s).array() - m[s]).square().sum() / (n() - 1));
    return out;
}

void Dataset::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write CSV: " + path);
    for (int i = 0; i < schema_.size(); ++i) {
        if (i) out << ',';
        out << schema_.var(i).name;
    }
    out << '\n';
    for (int r = 0; r < n(); ++r) {
        for (int i = 0; i < schema_.size(); ++i) {
            if (i) out << ',';
            const auto& v = schema_.var(i);
            if (v.kind == VarKind::Continuous)
                out << format_double(x_(r, schema_.kind_index(i)));
            else
                out << v.levels[y_(r, schema_.kind_index(i))];
        }
        out << '\n';
    }
}

Dataset load_dataset(const std::string& csv_path, const std::string& schema_path) {
    return load_dataset_csv(csv_path, VariableSchema::load(schema_path));
}

Dataset load_dataset_csv(const std::string& csv_path, const VariableSchema& schema) {
    std::ifstream in(csv_path);
    if (!in) throw DataError("cannot open CSV: " + csv_path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV: " + csv_path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line, ',');

    for (const auto& h : header)
        if (schema.find(trim(h)) < 0)
            throw DataError("unknown column in CSV header: " + trim(h));
    std::vector<int> col_of(schema.size(), -1);  // schema var -> csv column
    for (std::size_t c = 0; c < header.size(); ++c) col_of[schema.require(trim(header[c]))] = static_cast<int>(c);
    for (int i = 0; i < schema.size(); ++i)
        if (col_of[i] < 0)
            throw DataError("column declared in schema but missing from CSV: " + schema.var(i).name);

    std::vector<std::vector<double>> xrows;
    std::vector<std::vector<int>> yrows;
    int dropped = 0;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != header.size())
            throw DataError(csv_path + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " fields, got " + std::to_string(cells.size()));
        std::vector<double> xr(schema.p());
        std::vector<int> yr(schema.q());
        bool missing = false;
        for (int i = 0; i < schema.size() && !missing; ++i) {
            const std::string cell = trim(cells[col_of[i]]);
            const auto& v = schema.var(i);
            if (v.kind == VarKind::Continuous) {
                double val;
                if (!parse_double(cell, val))
                    missing = true;  // empty or unparseable -> complete-case drop
                else
                    xr[schema.kind_index(i)] = val;
            } else {
                if (cell.empty()) {
                    missing = true;
                    continue;
                }
                const int lv = v.level_index(cell);
                if (lv < 0)
                    throw DataError(csv_path + ":" + std::to_string(lineno) + ": undeclared level '" +
                                    cell + "' for column " + v.name);
                yr[schema.kind_index(i)] = lv;
            }
        }
        if (missing) {
            ++dropped;
            continue;
        }
        xrows.push_back(std::move(xr));
        yrows.push_back(std::move(yr));
    }
    if (xrows.empty()) throw DataError("empty dataset after dropping incomplete rows: " + csv_path);

    const int n = static_cast<int>(xrows.size());
    Eigen::MatrixXd x(n, schema.p());
    Eigen::MatrixXi y(n, schema.q());
    for (int r = 0; r < n; ++r) {
        for (int s = 0; s < schema.p(); ++s) x(r, s) = xrows[r][s];
        for (int j = 0; j < schema.q(); ++j) y(r, j) = yrows[r][j];
    }
    std::vector<TransformRecord> log;
    log.push_back({"*", "drop_missing", "rows=" + std::to_string(dropped)});
    return Dataset(schema, std::move(x), std::move(y), std::move(log));
}

Dataset preprocess(const Dataset& ds) {
    Eigen::MatrixXd x = ds.x();
    std::vector<TransformRecord> log = ds.transform_log();
    const auto& schema = ds.schema();

    for (int s = 0; s < ds.p(); ++s) {
        const auto& v = schema.continuous(s);
        if (!v.log2 || ds.has_transform(v.name, "log2")) continue;
        for (int i = 0; i < ds.n(); ++i)
            if (x(i, s) <= 0.0)
                throw DataError("log2 transform requires positive values: column " + v.name +
                                ", row " + std::to_string(i + 1) + " has " + format_double(x(i, s)));
        x.col(s) = x.col(s).array().log() / std::log(2.0);
        log.push_back({v.name, "log2", ""});
    }
    for (int s = 0; s < ds.p(); ++s) {
        const auto& v = schema.continuous(s);
        if (!v.center) continue;
        const double m = x.col(s).mean();
        x.col(s).array() -= m;
        log.push_back({v.name, "center", "mean=" + format_double(m)});
    }
    Eigen::VectorXd mean(ds.p()), sd(ds.p());
    for (int s = 0; s < ds.p(); ++s) {
        mean[s] = x.col(s).mean();
        sd[s] = ds.n() > 1 ? std::sqrt((x.col(s).array() - mean[s]).square().sum() / (ds.n() - 1)) : 0.0;
    }
    standardize_columns(x, mean, sd, schema, "standardize", log);
    return Dataset(schema, std::move(x), ds.y(), std::move(log));
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw UsageError("train fraction must lie in (0,1)");
    if (ds.n() < 3) throw DataError("split requires at least 3 rows");

    std::vector<int> idx(ds.n());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(spec.seed);
    rng.shuffle(idx);
    // the 1e-9 nudge keeps floor() faithful to the intended rational fraction
    const int n_train = static_cast<int>(std::floor(spec.train_fraction * ds.n() + 1e-9));
    if (n_train < 1 || n_train >= ds.n())
        throw DataError("degenerate split: train size " + std::to_string(n_train));

    std::vector<int> train_idx(idx.begin(), idx.begin() + n_train);
    std::vector<int> test_idx(idx.begin() + n_train, idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    auto take = [&](const std::vector<int>& rows) {
        Eigen::MatrixXd x(rows.size(), ds.p());
        Eigen::MatrixXi y(rows.size(), ds.q());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            x.row(r) = ds.x().row(rows[r]);
            y.row(r) = ds.y().row(rows[r]);
        }
        return std::make_pair(std::move(x), std::move(y));
    };
    auto [xtr, ytr] = take(train_idx);
    auto [xte, yte] = take(test_idx);

    // training statistics rescale both splits; test columns never see their own
    Eigen::VectorXd mean(ds.p()), sd(ds.p());
    for (int s = 0; s < ds.p(); ++s) {
        mean[s] = xtr.col(s).mean();
        sd[s] = n_train > 1 ? std::sqrt((xtr.col(s).array() - mean[s]).square().sum() / (n_train - 1)) : 0.0;
    }
    std::vector<TransformRecord> log_tr = ds.transform_log();
    std::vector<TransformRecord> log_te = ds.transform_log();
    log_tr.push_back({"*", "split", "role=train seed=" + std::to_string(spec.seed)});
    log_te.push_back({"*", "split", "role=test seed=" + std::to_string(spec.seed)});
    standardize_columns(xtr, mean, sd, ds.schema(), "standardize_train_stats", log_tr);
    standardize_columns(xte, mean, sd, ds.schema(), "standardize_train_stats", log_te);

    return {Dataset(ds.schema(), std::move(xtr), std::move(ytr), std::move(log_tr)),
            Dataset(ds.schema(), std::move(xte), std::move(yte), std::move(log_te))};
}

}  // namespace mgm
