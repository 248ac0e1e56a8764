#include "mgm/theta.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mgm/util.hpp"

namespace mgm {

ModelShape ModelShape::make(int p, int q, std::vector<int> levels, std::vector<int> baseline) {
    if (static_cast<int>(levels.size()) != q || static_cast<int>(baseline.size()) != q)
        throw DataError("model shape: level metadata does not match q");
    ModelShape s;
    s.p = p;
    s.q = q;
    s.levels = std::move(levels);
    s.baseline = std::move(baseline);
    s.cum_levels.assign(q + 1, 0);
    for (int j = 0; j < q; ++j) s.cum_levels[j + 1] = s.cum_levels[j] + s.levels[j];
    s.sum_levels = s.cum_levels[q];

    s.alpha_off = 0;
    s.beta_diag_off = s.alpha_off + p;
    s.beta_tri_off = s.beta_diag_off + p;
    s.rho_off = s.beta_tri_off + p * (p - 1) / 2;
    s.phi_node_off = s.rho_off + p * s.sum_levels;
    s.phi_pair_off = s.phi_node_off + s.sum_levels;
    int off = 0;
    for (int r = 0; r < q; ++r)
        for (int j = r + 1; j < q; ++j) {
            s.phi_pair_block.push_back(off);
            off += s.levels[r] * s.levels[j];
        }
    s.total = s.phi_pair_off + off;
    return s;
}

ModelShape ModelShape::from_schema(const VariableSchema& schema) {
    std::vector<int> levels(schema.q()), baseline(schema.q());
    for (int j = 0; j < schema.q(); ++j) {
        levels[j] = schema.levels(j);
        baseline[j] = schema.baseline(j);
    }
    return make(schema.p(), schema.q(), std::move(levels), std::move(baseline));
}

int ModelShape::cc_pair(int s, int t) const {
    return s * p - s * (s + 1) / 2 + (t - s - 1);
}

int ModelShape::dd_pair(int r, int j) const {
    return r * q - r * (r + 1) / 2 + (j - r - 1);
}

bool ModelShape::matches(const VariableSchema& schema) const {
    if (schema.p() != p || schema.q() != q) return false;
    for (int j = 0; j < q; ++j)
        if (schema.levels(j) != levels[j] || schema.baseline(j) != baseline[j]) return false;
    return true;
}

Theta Theta::zero(const ModelShape& shape) {
    Theta t(shape);
    for (int s = 0; s < shape.p; ++s) t.beta_diag(s) = 1.0;
    return t;
}

void Theta::set_beta(int s, int t, double v) {
    if (s == t)
        beta_diag(s) = v;
    else
        v_[shape_.idx_beta(s, t)] = v;
}

void Theta::zero_baseline_entries(double threshold) {
    const auto& sh = shape_;
    for (int s = 0; s < sh.p; ++s)
        for (int j = 0; j < sh.q; ++j) {
            double& v = rho(s, j, sh.baseline[j]);
            if (std::abs(v) < threshold) v = 0.0;
        }
    for (int r = 0; r < sh.q; ++r)
        for (int j = r + 1; j < sh.q; ++j)
            for (int l = 0; l < sh.levels[r]; ++l)
                for (int m = 0; m < sh.levels[j]; ++m) {
                    if (l != sh.baseline[r] && m != sh.baseline[j]) continue;
                    double& v = phi(r, j, l, m);
                    if (std::abs(v) < threshold) v = 0.0;
                }
}

PenaltyWeights compute_penalty_weights(const Dataset& ds, double baseline_multiplier) {
    const int q = ds.q();
    PenaltyWeights w;
    w.baseline_multiplier = baseline_multiplier;
    const Eigen::VectorXd sd = ds.column_sds();
    const auto freq = ds.level_frequencies();
    Eigen::VectorXd disc_spread(q);  // sqrt(sum_b f_b (1 - f_b))
    for (int j = 0; j < q; ++j) {
        double acc = 0.0;
        for (int b = 0; b < ds.schema().levels(j); ++b) acc += freq[j][b] * (1.0 - freq[j][b]);
        disc_spread[j] = std::sqrt(acc);
    }
    w.cc = sd * sd.transpose();
    w.cd = sd * disc_spread.transpose();
    w.dd = disc_spread * disc_spread.transpose();
    return w;
}

Eigen::VectorXd penalty_scale_vector(const ModelShape& sh, const PenaltyWeights& w) {
    Eigen::VectorXd scale = Eigen::VectorXd::Zero(sh.total);
    for (int s = 0; s < sh.p; ++s)
        for (int t = s + 1; t < sh.p; ++t) scale[sh.idx_beta(s, t)] = w.cc(s, t);
    for (int s = 0; s < sh.p; ++s)
        for (int j = 0; j < sh.q; ++j)
            for (int l = 0; l < sh.levels[j]; ++l)
                scale[sh.idx_rho(s, j, l)] =
                    w.cd(s, j) * (l == sh.baseline[j] ? w.baseline_multiplier : 1.0);
    for (int r = 0; r < sh.q; ++r)
        for (int j = r + 1; j < sh.q; ++j)
            for (int l = 0; l < sh.levels[r]; ++l)
                for (int m = 0; m < sh.levels[j]; ++m) {
                    const bool touches_baseline = (l == sh.baseline[r]) || (m == sh.baseline[j]);
                    scale[sh.idx_phi(r, j, l, m)] =
                        w.dd(r, j) * (touches_baseline ? w.baseline_multiplier : 1.0);
                }
    return scale;
}

double penalty_value(const Theta& theta, const PenaltyWeights& w, double lambda) {
    if (lambda < 0.0) throw UsageError("negative penalty parameter");
    const Eigen::VectorXd scale = penalty_scale_vector(theta.shape(), w);
    return lambda * scale.dot(theta.values().cwiseAbs());
}

void save_theta(const Theta& theta, const VariableSchema& schema, const std::string& path) {
    const auto& sh = theta.shape();
    if (!sh.matches(schema)) throw DataError("theta shape does not match schema");
    std::ofstream out(path);
    if (!out) throw DataError("cannot write theta file: " + path);
    out << "mgm_theta v1\n";
    out << "dims " << sh.p << ' ' << sh.q << '\n';
    for (int s = 0; s < sh.p; ++s) out << "cont " << schema.continuous(s).name << '\n';
    for (int j = 0; j < sh.q; ++j) {
        const auto& v = schema.discrete(j);
        out << "disc " << v.name << ' ';
        for (std::size_t k = 0; k < v.levels.size(); ++k) {
            if (k) out << ',';
            out << v.levels[k];
        }
        out << ' ' << v.levels[v.baseline] << '\n';
    }
    auto emit = [&](const char* tag, int a, int b, int first, int count) {
        out << tag;
        if (a >= 0) out << ' ' << a;
        if (b >= 0) out << ' ' << b;
        for (int k = 0; k < count; ++k) out << ' ' << format_double(theta.values()[first + k]);
        out << '\n';
    };
    emit("alpha", -1, -1, sh.alpha_off, sh.p);
    emit("beta_diag", -1, -1, sh.beta_diag_off, sh.p);
    emit("beta_tri", -1, -1, sh.beta_tri_off, sh.p * (sh.p - 1) / 2);
    for (int s = 0; s < sh.p; ++s)
        for (int j = 0; j < sh.q; ++j) emit("rho", s, j, sh.idx_rho(s, j, 0), sh.levels[j]);
    for (int r = 0; r < sh.q; ++r) emit("phi_node", r, -1, sh.idx_phi_node(r, 0), sh.levels[r]);
    for (int r = 0; r < sh.q; ++r)
        for (int j = r + 1; j < sh.q; ++j)
            emit("phi", r, j, sh.idx_phi(r, j, 0, 0), sh.levels[r] * sh.levels[j]);
    out << "end\n";
}

std::pair<Theta, VariableSchema> load_theta(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open theta file: " + path);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "mgm_theta v1")
        throw DataError("not a theta file: " + path);
    int p = -1, q = -1;
    {
        std::string tag;
        if (!(in >> tag >> p >> q) || tag != "dims") throw DataError("theta file: missing dims");
    }
    std::vector<Variable> vars;
    for (int s = 0; s < p; ++s) {
        std::string tag, name;
        if (!(in >> tag >> name) || tag != "cont") throw DataError("theta file: bad continuous block");
        Variable v;
        v.name = name;
        v.kind = VarKind::Continuous;
        vars.push_back(std::move(v));
    }
    for (int j = 0; j < q; ++j) {
        std::string tag, name, levels_csv, baseline;
        if (!(in >> tag >> name >> levels_csv >> baseline) || tag != "disc")
            throw DataError("theta file: bad discrete block");
        Variable v;
        v.name = name;
        v.kind = VarKind::Discrete;
        v.levels = split(levels_csv, ',');
        v.baseline = v.level_index(baseline);
        if (v.baseline < 0) throw DataError("theta file: baseline not among levels for " + name);
        vars.push_back(std::move(v));
    }
    VariableSchema schema{std::move(vars)};
    Theta theta(ModelShape::from_schema(schema));
    const auto& sh = theta.shape();

    auto read_values = [&](int first, int count) {
        for (int k = 0; k < count; ++k)
            if (!(in >> theta.values()[first + k])) throw DataError("theta file: truncated values");
    };
    std::string tag;
    while (in >> tag) {
        if (tag == "end") return {std::move(theta), std::move(schema)};
        if (tag == "alpha") {
            read_values(sh.alpha_off, sh.p);
        } else if (tag == "beta_diag") {
            read_values(sh.beta_diag_off, sh.p);
        } else if (tag == "beta_tri") {
            read_values(sh.beta_tri_off, sh.p * (sh.p - 1) / 2);
        } else if (tag == "rho") {
            int s, j;
            in >> s >> j;
            read_values(sh.idx_rho(s, j, 0), sh.levels[j]);
        } else if (tag == "phi_node") {
            int r;
            in >> r;
            read_values(sh.idx_phi_node(r, 0), sh.levels[r]);
        } else if (tag == "phi") {
            int r, j;
            in >> r >> j;
            read_values(sh.idx_phi(r, j, 0, 0), sh.levels[r] * sh.levels[j]);
        } else {
            throw DataError("theta file: unexpected tag '" + tag + "'");
        }
    }
    throw DataError("theta file: missing end marker");
}

}  // namespace mgm
