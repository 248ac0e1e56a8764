#include "mgm/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "mgm/util.hpp"

namespace mgm {

Spectrum Spectrum::load_csv(const std::string& path, const std::string& id) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open spectrum file: " + path);
    Spectrum s;
    s.id = id;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        line = trim(line);
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 2)
            throw DataError(path + ":" + std::to_string(lineno) + ": expected 2 fields");
        char* end = nullptr;
        const double ppm = std::strtod(cells[0].c_str(), &end);
        if (end == cells[0].c_str()) {
            if (lineno == 1) continue;  // header row
            throw DataError(path + ":" + std::to_string(lineno) + ": bad ppm value");
        }
        const double inten = std::strtod(cells[1].c_str(), &end);
        if (end == cells[1].c_str() || inten < 0.0)
            throw DataError(path + ":" + std::to_string(lineno) + ": bad intensity value");
        s.ppm.push_back(ppm);
        s.intensity.push_back(inten);
    }
    if (s.ppm.empty()) throw DataError("spectrum has no points: " + path);
    // normalize to decreasing ppm
    bool increasing = true, decreasing = true;
    for (std::size_t i = 1; i < s.ppm.size(); ++i) {
        if (s.ppm[i] >= s.ppm[i - 1]) decreasing = false;
        if (s.ppm[i] <= s.ppm[i - 1]) increasing = false;
    }
    if (!increasing && !decreasing)
        throw DataError("spectrum ppm axis is not strictly monotone: " + path);
    if (increasing) {
        std::reverse(s.ppm.begin(), s.ppm.end());
        std::reverse(s.intensity.begin(), s.intensity.end());
    }
    return s;
}

Spectrum reference_shift(const Spectrum& s, double observed_ref_ppm, double target_ref_ppm) {
    Spectrum out = s;
    const double delta = target_ref_ppm - observed_ref_ppm;
    for (double& v : out.ppm) v += delta;
    return out;
}

Eigen::VectorXd bin_spectrum(const Spectrum& s, double range_high, double range_low, double width) {
    if (!(range_high > range_low)) throw UsageError("binning range must have high > low");
    if (!(width > 0.0)) throw UsageError("bucket width must be positive");
    const double count_f = (range_high - range_low) / width;
    const double rounded = std::round(count_f);
    if (std::abs(count_f - rounded) > 1e-9)
        throw UsageError("binning range is not an integral number of buckets (" +
                         format_double(count_f) + ")");
    const int k = static_cast<int>(rounded);
    Eigen::VectorXd buckets = Eigen::VectorXd::Zero(k);
    for (std::size_t i = 0; i < s.ppm.size(); ++i) {
        const double v = s.ppm[i];
        if (v < range_low || v >= range_high) continue;  // half-open [low, high)
        // bucket b spans [high-(b+1)w, high-bw)
        int b = static_cast<int>(std::floor((range_high - v) / width));
        if (b >= k) b = k - 1;
        buckets[b] += s.intensity[i];
    }
    return buckets;
}

BucketTable bin_spectra(const std::vector<Spectrum>& spectra, double range_high, double range_low,
                        double width) {
    BucketTable bt;
    bt.width = width;
    const double count_f = (range_high - range_low) / width;
    const int k = static_cast<int>(std::round(count_f));
    bt.centers.resize(k);
    for (int b = 0; b < k; ++b) bt.centers[b] = range_high - (b + 0.5) * width;
    bt.values.resize(static_cast<Eigen::Index>(spectra.size()), k);
    for (std::size_t i = 0; i < spectra.size(); ++i) {
        bt.ids.push_back(spectra[i].id);
        bt.values.row(static_cast<Eigen::Index>(i)) = bin_spectrum(spectra[i], range_high, range_low, width);
    }
    return bt;
}

BucketTable exclude_and_scale(const BucketTable& bt, const std::vector<PpmInterval>& exclusions,
                              const PpmInterval& ref_interval) {
    const int k = static_cast<int>(bt.centers.size());
    std::vector<int> ref_cols;
    for (int b = 0; b < k; ++b)
        if (ref_interval.contains(bt.centers[b])) ref_cols.push_back(b);
    if (ref_cols.empty()) throw DataError("reference interval contains no bucket centers");

    Eigen::MatrixXd scaled = bt.values;
    for (Eigen::Index i = 0; i < scaled.rows(); ++i) {
        double ref = 0.0;
        for (int b : ref_cols) ref += scaled(i, b);
        if (ref <= 0.0)
            throw DataError("zero reference intensity in spectrum " +
                            (i < static_cast<Eigen::Index>(bt.ids.size()) ? bt.ids[i] : std::to_string(i)));
        scaled.row(i) /= ref;
    }

    std::vector<int> keep;
    for (int b = 0; b < k; ++b) {
        bool excluded = false;
        for (const auto& iv : exclusions)
            if (iv.contains(bt.centers[b])) {
                excluded = true;
                break;
            }
        if (!excluded) keep.push_back(b);
    }

    BucketTable out;
    out.width = bt.width;
    out.ids = bt.ids;
    out.excluded = exclusions;
    out.centers.reserve(keep.size());
    out.values.resize(scaled.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        out.centers.push_back(bt.centers[keep[c]]);
        out.values.col(static_cast<Eigen::Index>(c)) = scaled.col(keep[c]);
    }
    return out;
}

std::string format_bucket_center(double center) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", center);
    return buf;
}

void BucketTable::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write bucket table: " + path);
    out << "id";
    for (double c : centers) out << ',' << format_bucket_center(c);
    out << '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        out << (i < static_cast<Eigen::Index>(ids.size()) ? ids[i] : std::to_string(i));
        for (Eigen::Index b = 0; b < values.cols(); ++b) out << ',' << format_double(values(i, b));
        out << '\n';
    }
}

}  // namespace mgm
