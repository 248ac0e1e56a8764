#ifndef MGM_TESTS_HELPERS_HPP_
#define MGM_TESTS_HELPERS_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "mgm/objective.hpp"
#include "mgm/rng.hpp"
#include "mgm/theta.hpp"

namespace mgm::test {

inline std::filesystem::path temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("mgm_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// random parameters with positive-dominant beta diagonal; baseline-fixed
// level potentials stay zero
inline Theta random_theta(const ModelShape& shape, Rng& rng, double scale = 0.5,
                          bool unit_beta_diag = true) {
    Theta theta = Theta::zero(shape);
    for (int s = 0; s < shape.p; ++s) theta.alpha(s) = rng.uniform(-scale, scale);
    for (int s = 0; s < shape.p; ++s)
        for (int t = s + 1; t < shape.p; ++t) theta.set_beta(s, t, rng.uniform(-scale, scale));
    for (int s = 0; s < shape.p; ++s)
        for (int j = 0; j < shape.q; ++j)
            for (int l = 0; l < shape.levels[j]; ++l)
                theta.rho(s, j, l) = rng.uniform(-scale, scale);
    for (int r = 0; r < shape.q; ++r)
        for (int l = 0; l < shape.levels[r]; ++l)
            if (l != shape.baseline[r]) theta.phi_node(r, l) = rng.uniform(-scale, scale);
    for (int r = 0; r < shape.q; ++r)
        for (int j = r + 1; j < shape.q; ++j)
            for (int l = 0; l < shape.levels[r]; ++l)
                for (int m = 0; m < shape.levels[j]; ++m)
                    theta.phi(r, j, l, m) = rng.uniform(-scale, scale);
    if (unit_beta_diag)
        for (int s = 0; s < shape.p; ++s) theta.beta_diag(s) = 1.0;
    else
        for (int s = 0; s < shape.p; ++s) {
            double off = 0.0;
            for (int t = 0; t < shape.p; ++t)
                if (t != s) off += std::abs(theta.beta(s, t));
            theta.beta_diag(s) = off + rng.uniform(0.2, 1.0);
        }
    return theta;
}

// random mixed data, not drawn from any model
inline FitData random_fit_data(const ModelShape& shape, int n, Rng& rng) {
    Eigen::MatrixXd x(n, shape.p);
    Eigen::MatrixXi y(n, shape.q);
    for (int i = 0; i < n; ++i) {
        for (int s = 0; s < shape.p; ++s) x(i, s) = rng.normal();
        for (int j = 0; j < shape.q; ++j) y(i, j) = static_cast<int>(rng.below(shape.levels[j]));
    }
    return FitData::from_matrices(shape, std::move(x), std::move(y));
}

// central finite differences over the flat parameter vector
inline Eigen::VectorXd finite_difference_gradient(const Theta& theta, const FitData& data,
                                                  double h = 1e-5) {
    Eigen::VectorXd g(theta.shape().total);
    Theta probe = theta;
    for (int k = 0; k < theta.shape().total; ++k) {
        const double keep = probe.values()[k];
        probe.values()[k] = keep + h;
        const double up = neg_pseudo_loglik(probe, data);
        probe.values()[k] = keep - h;
        const double down = neg_pseudo_loglik(probe, data);
        probe.values()[k] = keep;
        g[k] = (up - down) / (2.0 * h);
    }
    return g;
}

// golden-section minimization of a convex function along one coordinate
inline double golden_section(const std::function<double(double)>& f, double lo, double hi,
                             double tol = 1e-12) {
    const double gr = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Derivative-free reference minimizer: cyclic coordinate minimization with
// golden-section line searches. The composite objective is convex with
// coordinatewise-separable nonsmooth part, so coordinate descent converges
// to the global minimum. Completely independent of the gradient code.
inline double coordinate_search_minimize(Theta& theta, const FitData& data,
                                         const Eigen::VectorXd& pen_scale, int cycles = 400,
                                         double span = 4.0, double stop_change = 1e-13) {
    const auto& sh = theta.shape();
    auto objective = [&]() {
        return neg_pseudo_loglik(theta, data) + pen_scale.dot(theta.values().cwiseAbs());
    };
    // coordinates that are held fixed during fitting: beta diagonal and
    // baseline level potentials
    std::vector<bool> fixed(sh.total, false);
    for (int s = 0; s < sh.p; ++s) fixed[sh.idx_beta_diag(s)] = true;
    for (int r = 0; r < sh.q; ++r) fixed[sh.idx_phi_node(r, sh.baseline[r])] = true;

    double best = objective();
    for (int cycle = 0; cycle < cycles; ++cycle) {
        const double before = best;
        for (int k = 0; k < sh.total; ++k) {
            if (fixed[k]) continue;
            const double center = theta.values()[k];
            auto slice = [&](double v) {
                theta.values()[k] = v;
                const double val = objective();
                theta.values()[k] = center;
                return val;
            };
            double v = golden_section(slice, center - span, center + span);
            // snap to the kink: zero is the likely optimum of an L1 slice
            if (pen_scale[k] > 0.0 && slice(0.0) <= slice(v)) v = 0.0;
            theta.values()[k] = v;
            best = objective();
        }
        if (before - best < stop_change) break;
    }
    return best;
}

// Kolmogorov-Smirnov test against U(0,1); returns the asymptotic p-value.
inline double ks_uniform_pvalue(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        d = std::max(d, std::abs((i + 1) / n - values[i]));
        d = std::max(d, std::abs(values[i] - i / n));
    }
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) p += 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
    return std::clamp(p, 0.0, 1.0);
}

// KS against the standard normal CDF
inline double ks_normal_pvalue(const std::vector<double>& values) {
    std::vector<double> u;
    u.reserve(values.size());
    for (double v : values) u.push_back(0.5 * std::erfc(-v / std::sqrt(2.0)));
    return ks_uniform_pvalue(std::move(u));
}

}  // namespace mgm::test

#endif  // MGM_TESTS_HELPERS_HPP_
