#ifndef MGM_SCHEMA_HPP_
#define MGM_SCHEMA_HPP_

#include <string>
#include <vector>

namespace mgm {

enum class VarKind { Continuous, Discrete };

// Node categories are presentation metadata for graph exports.
enum class VarCategory { Clinical, Demographic, Drug, Metabolite, Other };

std::string to_string(VarCategory c);
VarCategory category_from_string(const std::string& s);

struct Variable {
    std::string name;
    VarKind kind = VarKind::Continuous;
    std::vector<std::string> levels;  // discrete only, declared order
    int baseline = 0;                 // index into levels
    bool log2 = false;
    bool center = false;
    VarCategory category = VarCategory::Other;

    int level_count() const { return static_cast<int>(levels.size()); }
    int level_index(const std::string& label) const;  // -1 if unknown
};

// Declares each column of a mixed dataset. Continuous variables are indexed
// 0..p-1 and discrete variables 0..q-1 in declaration order.
class VariableSchema {
public:
    VariableSchema() = default;
    explicit VariableSchema(std::vector<Variable> vars);

    int p() const { return p_; }
    int q() const { return q_; }
    int size() const { return static_cast<int>(vars_.size()); }

    const std::vector<Variable>& variables() const { return vars_; }
    const Variable& var(int i) const { return vars_[i]; }

    const Variable& continuous(int s) const { return vars_[cont_pos_[s]]; }
    const Variable& discrete(int j) const { return vars_[disc_pos_[j]]; }

    int levels(int j) const { return discrete(j).level_count(); }
    int baseline(int j) const { return discrete(j).baseline; }

    // position of variable i within its kind (continuous index or discrete index)
    int kind_index(int i) const { return kind_index_[i]; }
    int position_of_continuous(int s) const { return cont_pos_[s]; }
    int position_of_discrete(int j) const { return disc_pos_[j]; }

    int find(const std::string& name) const;          // -1 if absent
    int require(const std::string& name) const;       // throws DataError

    std::vector<int> level_counts() const;

    static VariableSchema load(const std::string& path);
    void save(const std::string& path) const;

private:
    void validate() const;

    std::vector<Variable> vars_;
    int p_ = 0;
    int q_ = 0;
    std::vector<int> kind_index_;
    std::vector<int> cont_pos_;
    std::vector<int> disc_pos_;
};

}  // namespace mgm

#endif  // MGM_SCHEMA_HPP_
