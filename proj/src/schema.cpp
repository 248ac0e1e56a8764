#include "mgm/schema.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mgm/util.hpp"

namespace mgm {

std::string to_string(VarCategory c) {
    switch (c) {
        case VarCategory::Clinical: return "clinical";
        case VarCategory::Demographic: return "demographic";
        case VarCategory::Drug: return "drug";
        case VarCategory::Metabolite: return "metabolite";
        default: return "other";
    }
}

VarCategory category_from_string(const std::string& s) {
    if (s == "clinical") return VarCategory::Clinical;
    if (s == "demographic") return VarCategory::Demographic;
    if (s == "drug") return VarCategory::Drug;
    if (s == "metabolite") return VarCategory::Metabolite;
    if (s == "other") return VarCategory::Other;
    throw DataError("unknown variable category: " + s);
}

int Variable::level_index(const std::string& label) const {
    for (std::size_t k = 0; k < levels.size(); ++k)
        if (levels[k] == label) return static_cast<int>(k);
    return -1;
}

VariableSchema::VariableSchema(std::vector<Variable> vars) : vars_(std::move(vars)) {
    kind_index_.resize(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i].kind == VarKind::Continuous) {
            kind_index_[i] = p_++;
            cont_pos_.push_back(static_cast<int>(i));
        } else {
            kind_index_[i] = q_++;
            disc_pos_.push_back(static_cast<int>(i));
        }
    }
    validate();
}

void VariableSchema::validate() const {
    std::set<std::string> seen;
    for (const auto& v : vars_) {
        if (v.name.empty()) throw DataError("schema: empty variable name");
        if (!seen.insert(v.name).second)
            throw DataError("schema: duplicate variable name: " + v.name);
        if (v.kind == VarKind::Discrete) {
            if (v.level_count() < 2)
                throw DataError("schema: discrete variable " + v.name + " needs at least 2 levels");
            if (v.baseline < 0 || v.baseline >= v.level_count())
                throw DataError("schema: baseline of " + v.name + " is not a declared level");
            std::set<std::string> lv(v.levels.begin(), v.levels.end());
            if (static_cast<int>(lv.size()) != v.level_count())
                throw DataError("schema: duplicate level label in " + v.name);
        }
    }
    if (p_ + q_ < 2) throw DataError("schema: need at least 2 variables");
}

int VariableSchema::find(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return static_cast<int>(i);
    return -1;
}

int VariableSchema::require(const std::string& name) const {
    const int i = find(name);
    if (i < 0) throw DataError("unknown variable: " + name);
    return i;
}

std::vector<int> VariableSchema::level_counts() const {
    std::vector<int> out(q_);
    for (int j = 0; j < q_; ++j) out[j] = levels(j);
    return out;
}

// Grammar (one variable per line, whitespace separated):
//   variable <name> continuous [log2] [center] [category <c>]
//   variable <name> discrete levels <a,b,c> baseline <b> [category <c>]
// '#' starts a comment.
VariableSchema VariableSchema::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open schema file: " + path);
    std::vector<Variable> vars;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream tok(line);
        std::string word;
        tok >> word;
        if (word != "variable")
            throw DataError("schema " + path + ":" + std::to_string(lineno) +
                            ": expected 'variable', got '" + word + "'");
        Variable v;
        std::string kind;
        if (!(tok >> v.name >> kind))
            throw DataError("schema " + path + ":" + std::to_string(lineno) + ": truncated declaration");
        if (kind == "continuous") {
            v.kind = VarKind::Continuous;
        } else if (kind == "discrete") {
            v.kind = VarKind::Discrete;
        } else {
            throw DataError("schema " + path + ":" + std::to_string(lineno) + ": unknown kind '" + kind + "'");
        }
        std::string baseline_label;
        bool have_baseline = false;
        while (tok >> word) {
            if (word == "log2" && v.kind == VarKind::Continuous) {
                v.log2 = true;
            } else if (word == "center" && v.kind == VarKind::Continuous) {
                v.center = true;
            } else if (word == "levels" && v.kind == VarKind::Discrete) {
                std::string csv;
                if (!(tok >> csv))
                    throw DataError("schema " + path + ":" + std::to_string(lineno) + ": missing level list");
                v.levels = split(csv, ',');
            } else if (word == "baseline" && v.kind == VarKind::Discrete) {
                if (!(tok >> baseline_label))
                    throw DataError("schema " + path + ":" + std::to_string(lineno) + ": missing baseline label");
                have_baseline = true;
            } else if (word == "category") {
                std::string cat;
                if (!(tok >> cat))
                    throw DataError("schema " + path + ":" + std::to_string(lineno) + ": missing category");
                v.category = category_from_string(cat);
            } else {
                throw DataError("schema " + path + ":" + std::to_string(lineno) + ": unexpected token '" + word + "'");
            }
        }
        if (v.kind == VarKind::Discrete) {
            if (!have_baseline)
                throw DataError("schema " + path + ":" + std::to_string(lineno) + ": discrete variable " +
                                v.name + " needs a baseline");
            v.baseline = v.level_index(baseline_label);
            if (v.baseline < 0)
                throw DataError("schema " + path + ":" + std::to_string(lineno) + ": baseline '" +
                                baseline_label + "' is not a level of " + v.name);
        }
        vars.push_back(std::move(v));
    }
    return VariableSchema(std::move(vars));
}

void VariableSchema::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write schema file: " + path);
    for (const auto& v : vars_) {
        out << "variable " << v.name;
        if (v.kind == VarKind::Continuous) {
            out << " continuous";
            if (v.log2) out << " log2";
            if (v.center) out << " center";
        } else {
            out << " discrete levels ";
            for (std::size_t k = 0; k < v.levels.size(); ++k) {
                if (k) out << ',';
                out << v.levels[k];
            }
            out << " baseline " << v.levels[v.baseline];
        }
        if (v.category != VarCategory::Other) out << " category " << to_string(v.category);
        out << '\n';
    }
}

}  // namespace mgm
