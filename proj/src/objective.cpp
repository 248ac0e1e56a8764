#include "mgm/objective.hpp"

#include <cmath>

#include "mgm/util.hpp"

namespace mgm {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

// Dense views of the parameter blocks, rebuilt once per evaluation.
struct ParamBlocks {
    Eigen::MatrixXd beta_off;            // p x p, symmetric, zero diagonal
    Eigen::VectorXd beta_diag;           // p
    Eigen::VectorXd alpha;               // p
    std::vector<Eigen::MatrixXd> rho;    // q blocks, p x L_j
    std::vector<Eigen::VectorXd> phi_node;
    std::vector<std::vector<Eigen::MatrixXd>> phi;  // phi[r][j-r-1], L_r x L_j for r<j

    explicit ParamBlocks(const Theta& theta) {
        const auto& sh = theta.shape();
        beta_off = Eigen::MatrixXd::Zero(sh.p, sh.p);
        beta_diag.resize(sh.p);
        alpha.resize(sh.p);
        for (int s = 0; s < sh.p; ++s) {
            alpha[s] = theta.alpha(s);
            beta_diag[s] = theta.beta_diag(s);
            for (int t = s + 1; t < sh.p; ++t)
                beta_off(s, t) = beta_off(t, s) = theta.beta(s, t);
        }
        rho.resize(sh.q);
        for (int j = 0; j < sh.q; ++j) {
            rho[j].resize(sh.p, sh.levels[j]);
            for (int s = 0; s < sh.p; ++s)
                for (int l = 0; l < sh.levels[j]; ++l) rho[j](s, l) = theta.rho(s, j, l);
        }
        phi_node.resize(sh.q);
        for (int r = 0; r < sh.q; ++r) {
            phi_node[r].resize(sh.levels[r]);
            for (int l = 0; l < sh.levels[r]; ++l) phi_node[r][l] = theta.phi_node(r, l);
        }
        phi.resize(sh.q);
        for (int r = 0; r < sh.q; ++r) {
            phi[r].resize(sh.q - r - 1);
            for (int j = r + 1; j < sh.q; ++j) {
                Eigen::MatrixXd& blk = phi[r][j - r - 1];
                blk.resize(sh.levels[r], sh.levels[j]);
                for (int l = 0; l < sh.levels[r]; ++l)
                    for (int m = 0; m < sh.levels[j]; ++m) blk(l, m) = theta.phi(r, j, l, m);
            }
        }
    }

    // block (r, j) applied to node r's scores; transposed view when r > j
    Eigen::MatrixXd pair_block(int r, int j) const {
        if (r < j) return phi[r][j - r - 1];
        return phi[j][r - j - 1].transpose();
    }
};

struct ChunkResult {
    double nll = 0.0;
    Eigen::VectorXd grad;  // empty when gradient not requested
};

// Core evaluation over one contiguous row range.
ChunkResult eval_rows(const ParamBlocks& pb, const ModelShape& sh, const FitData& data,
                      std::int64_t lo, std::int64_t hi, bool want_grad, bool optimize_beta_diag) {
    ChunkResult out;
    const auto rows = static_cast<Eigen::Index>(hi - lo);
    if (rows == 0) {
        if (want_grad) out.grad = Eigen::VectorXd::Zero(sh.total);
        return out;
    }
    const auto xc = data.x.middleRows(static_cast<Eigen::Index>(lo), rows);

    // continuous conditionals: E(i,s) = alpha_s + sum_j rho_sj(y_ij) - sum_{t!=s} beta_st x_it
    Eigen::MatrixXd e = -(xc * pb.beta_off);
    e.rowwise() += pb.alpha.transpose();
    for (int j = 0; j < sh.q; ++j) {
        const auto hj = data.onehot[j].middleRows(static_cast<Eigen::Index>(lo), rows);
        e.noalias() += hj * pb.rho[j].transpose();
    }
    Eigen::MatrixXd mean = e * pb.beta_diag.cwiseInverse().asDiagonal();
    Eigen::MatrixXd resid = mean - xc;

    for (int s = 0; s < sh.p; ++s) {
        const double d = pb.beta_diag[s];
        if (!(d > 0.0)) throw NumericError("non-positive beta diagonal");
        out.nll += rows * (kHalfLog2Pi - 0.5 * std::log(d)) + 0.5 * d * resid.col(s).squaredNorm();
    }

    Eigen::VectorXd grad;
    if (want_grad) grad = Eigen::VectorXd::Zero(sh.total);

    if (want_grad) {
        grad.segment(sh.alpha_off, sh.p) = resid.colwise().sum();
        Eigen::MatrixXd gb = xc.transpose() * resid;  // gb(t,s) = sum_i x_it r_is
        for (int s = 0; s < sh.p; ++s)
            for (int t = s + 1; t < sh.p; ++t) grad[sh.idx_beta(s, t)] = -(gb(t, s) + gb(s, t));
        if (optimize_beta_diag) {
            for (int s = 0; s < sh.p; ++s)
                grad[sh.idx_beta_diag(s)] = -0.5 * rows / pb.beta_diag[s] +
                                            0.5 * resid.col(s).squaredNorm() -
                                            resid.col(s).dot(mean.col(s));
        }
        for (int j = 0; j < sh.q; ++j) {
            const auto hj = data.onehot[j].middleRows(static_cast<Eigen::Index>(lo), rows);
            const Eigen::MatrixXd gr = hj.transpose() * resid;  // L_j x p
            for (int s = 0; s < sh.p; ++s)
                for (int l = 0; l < sh.levels[j]; ++l) grad[sh.idx_rho(s, j, l)] += gr(l, s);
        }
    }

    // discrete conditionals
    for (int r = 0; r < sh.q; ++r) {
        const int lr = sh.levels[r];
        Eigen::MatrixXd z = xc * pb.rho[r];  // rows x L_r
        z.rowwise() += pb.phi_node[r].transpose();
        for (int j = 0; j < sh.q; ++j) {
            if (j == r) continue;
            const Eigen::MatrixXd blk = pb.pair_block(r, j);  // L_r x L_j
            for (Eigen::Index i = 0; i < rows; ++i)
                z.row(i) += blk.col(data.y(static_cast<Eigen::Index>(lo) + i, j)).transpose();
        }
        Eigen::MatrixXd soft(rows, lr);
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double zmax = z.row(i).maxCoeff();
            const double lse = zmax + std::log((z.row(i).array() - zmax).exp().sum());
            out.nll += lse - z(i, data.y(static_cast<Eigen::Index>(lo) + i, r));
            soft.row(i) = (z.row(i).array() - lse).exp();
        }
        if (!want_grad) continue;
        const auto hr = data.onehot[r].middleRows(static_cast<Eigen::Index>(lo), rows);
        const Eigen::MatrixXd dsc = soft - hr;  // softmax minus observed one-hot
        for (int l = 0; l < lr; ++l) grad[sh.idx_phi_node(r, l)] += dsc.col(l).sum();
        const Eigen::MatrixXd gx = dsc.transpose() * xc;  // L_r x p
        for (int s = 0; s < sh.p; ++s)
            for (int l = 0; l < lr; ++l) grad[sh.idx_rho(s, r, l)] += gx(l, s);
        // both conditionals touch block (r,j); node j's share is added on j's own pass
        for (int j = r + 1; j < sh.q; ++j) {
            const auto hj = data.onehot[j].middleRows(static_cast<Eigen::Index>(lo), rows);
            const Eigen::MatrixXd gp = dsc.transpose() * hj;  // L_r x L_j
            for (int l = 0; l < lr; ++l)
                for (int m = 0; m < sh.levels[j]; ++m) grad[sh.idx_phi(r, j, l, m)] += gp(l, m);
        }
        for (int j = 0; j < r; ++j) {
            const auto hj = data.onehot[j].middleRows(static_cast<Eigen::Index>(lo), rows);
            const Eigen::MatrixXd gp = hj.transpose() * dsc;  // L_j x L_r, block (j,r)
            for (int l = 0; l < sh.levels[j]; ++l)
                for (int m = 0; m < lr; ++m) grad[sh.idx_phi(j, r, l, m)] += gp(l, m);
        }
    }

    if (want_grad) out.grad = std::move(grad);
    return out;
}

double evaluate(const Theta& theta, const FitData& data, Eigen::VectorXd* grad,
                bool optimize_beta_diag) {
    const auto& sh = theta.shape();
    if (sh.p != data.shape.p || sh.q != data.shape.q || sh.levels != data.shape.levels)
        throw DataError("theta dimensions do not match dataset");
    const ParamBlocks pb(theta);
    const int n = data.n();
    if (n == 0) throw DataError("empty dataset");

    const int workers = thread_count();
    std::vector<ChunkResult> parts(std::max(1, std::min<int>(workers, n)));
    parallel_chunks(n, [&](std::int64_t lo, std::int64_t hi, int c) {
        parts[c] = eval_rows(pb, sh, data, lo, hi, grad != nullptr, optimize_beta_diag);
    });

    double nll = 0.0;
    if (grad) grad->setZero(sh.total);
    for (const auto& part : parts) {  // fixed chunk order keeps reductions deterministic
        nll += part.nll;
        if (grad && part.grad.size()) *grad += part.grad;
    }
    nll /= n;
    if (grad) {
        *grad /= n;
        if (!optimize_beta_diag) grad->segment(sh.beta_diag_off, sh.p).setZero();
        // baseline level potentials are the fixed reference of each softmax
        for (int r = 0; r < sh.q; ++r) (*grad)[sh.idx_phi_node(r, sh.baseline[r])] = 0.0;
    }
    if (!std::isfinite(nll)) throw NumericError("non-finite pseudo-log-likelihood");
    return nll;
}

}  // namespace

FitData FitData::from_dataset(const Dataset& ds) {
    return from_matrices(ModelShape::from_schema(ds.schema()), ds.x(), ds.y());
}

FitData FitData::from_matrices(ModelShape shape, Eigen::MatrixXd x, Eigen::MatrixXi y) {
    FitData d;
    d.shape = std::move(shape);
    d.x = std::move(x);
    d.y = std::move(y);
    d.onehot.resize(d.shape.q);
    for (int j = 0; j < d.shape.q; ++j) {
        d.onehot[j] = Eigen::MatrixXd::Zero(d.x.rows(), d.shape.levels[j]);
        for (Eigen::Index i = 0; i < d.y.rows(); ++i) {
            const int l = d.y(i, j);
            if (l < 0 || l >= d.shape.levels[j]) throw DataError("level index out of range");
            d.onehot[j](i, l) = 1.0;
        }
    }
    return d;
}

std::pair<double, double> gaussian_conditional(const Theta& theta, const Eigen::VectorXd& xrow,
                                               const Eigen::VectorXi& yrow, int s) {
    const auto& sh = theta.shape();
    const double d = theta.beta_diag(s);
    if (!(d > 0.0)) throw NumericError("non-positive beta diagonal for node " + std::to_string(s));
    double e = theta.alpha(s);
    for (int j = 0; j < sh.q; ++j) e += theta.rho(s, j, yrow[j]);
    for (int t = 0; t < sh.p; ++t)
        if (t != s) e -= theta.beta(s, t) * xrow[t];
    return {e / d, d};
}

Eigen::VectorXd discrete_conditional(const Theta& theta, const Eigen::VectorXd& xrow,
                                     const Eigen::VectorXi& yrow, int r) {
    const auto& sh = theta.shape();
    Eigen::VectorXd z(sh.levels[r]);
    for (int l = 0; l < sh.levels[r]; ++l) {
        double acc = theta.phi_node(r, l);
        for (int s = 0; s < sh.p; ++s) acc += theta.rho(s, r, l) * xrow[s];
        for (int j = 0; j < sh.q; ++j)
            if (j != r) acc += theta.phi(r, j, l, yrow[j]);
        z[l] = acc;
    }
    const double lse = logsumexp(z.data(), sh.levels[r]);
    return (z.array() - lse).exp();
}

double neg_pseudo_loglik(const Theta& theta, const FitData& data) {
    return evaluate(theta, data, nullptr, false);
}

double neg_pseudo_loglik(const Theta& theta, const Dataset& ds) {
    return neg_pseudo_loglik(theta, FitData::from_dataset(ds));
}

double neg_pseudo_loglik_gradient(const Theta& theta, const FitData& data, Eigen::VectorXd& grad,
                                  bool optimize_beta_diag) {
    return evaluate(theta, data, &grad, optimize_beta_diag);
}

Theta pseudo_loglik_gradient(const Theta& theta, const Dataset& ds, bool optimize_beta_diag) {
    Theta g(theta.shape());
    const FitData data = FitData::from_dataset(ds);
    neg_pseudo_loglik_gradient(theta, data, g.values(), optimize_beta_diag);
    return g;
}

}  // namespace mgm
