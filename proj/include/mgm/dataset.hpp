#ifndef MGM_DATASET_HPP_
#define MGM_DATASET_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mgm/schema.hpp"

namespace mgm {

struct TransformRecord {
    std::string column;  // variable name, or "*" for dataset-wide operations
    std::string op;
    std::string params;
};

struct SplitSpec {
    double train_fraction = 2.0 / 3.0;
    std::uint64_t seed = 0;
};

// Complete-case sample matrix. Continuous values live in an n x p matrix,
// discrete values as level indices in an n x q matrix. Immutable after
// construction; the preprocessing operations return new datasets.
class Dataset {
public:
    Dataset() = default;
    Dataset(VariableSchema schema, Eigen::MatrixXd x, Eigen::MatrixXi y,
            std::vector<TransformRecord> log = {});

    int n() const { return static_cast<int>(x_.rows()); }
    int p() const { return schema_.p(); }
    int q() const { return schema_.q(); }

    const VariableSchema& schema() const { return schema_; }
    const Eigen::MatrixXd& x() const { return x_; }
    const Eigen::MatrixXi& y() const { return y_; }
    const std::vector<TransformRecord>& transform_log() const { return log_; }

    bool has_transform(const std::string& column, const std::string& op) const;

    // per-discrete-variable level relative frequencies
    std::vector<Eigen::VectorXd> level_frequencies() const;

    Eigen::VectorXd column_means() const;
    Eigen::VectorXd column_sds() const;  // sample sd, n-1 denominator

    void save_csv(const std::string& path) const;

private:
    friend Dataset preprocess(const Dataset&);
    friend std::pair<Dataset, Dataset> split_train_test(const Dataset&, const SplitSpec&);

    VariableSchema schema_;
    Eigen::MatrixXd x_;
    Eigen::MatrixXi y_;
    std::vector<TransformRecord> log_;
};

// Loads a CSV (header row, '.' decimal separator, empty cell = missing)
// against a schema. Rows with missing or unparseable numeric cells are
// dropped and counted; a non-empty discrete cell that is not a declared
// level is a fatal error.
Dataset load_dataset(const std::string& csv_path, const std::string& schema_path);
Dataset load_dataset_csv(const std::string& csv_path, const VariableSchema& schema);

// log2 where flagged, then mean-centering where flagged, then every
// continuous column scaled to standard units (sample sd). Idempotent:
// already-recorded log2/center steps are not reapplied.
Dataset preprocess(const Dataset& ds);

// Seeded shuffle split; train size = floor(n * fraction). Both splits are
// rescaled to standard units using the training split's means and sds.
std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, const SplitSpec& spec);

}  // namespace mgm

#endif  // MGM_DATASET_HPP_
