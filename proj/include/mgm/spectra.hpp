#ifndef MGM_SPECTRA_HPP_
#define MGM_SPECTRA_HPP_

#include <Eigen/Core>
#include <string>
#include <vector>

namespace mgm {

// One 1D spectrum as (ppm, intensity) pairs, normalized to decreasing ppm.
struct Spectrum {
    std::string id;
    std::vector<double> ppm;
    std::vector<double> intensity;

    static Spectrum load_csv(const std::string& path, const std::string& id);
};

struct PpmInterval {
    double low = 0.0;
    double high = 0.0;  // high > low; membership tests are half-open [low, high)

    bool contains(double x) const { return x >= low && x < high; }
};

// Fixed-width bucket features over a set of spectra. Centers are ordered
// from high to low ppm.
struct BucketTable {
    std::vector<double> centers;
    std::vector<std::string> ids;   // one per row
    Eigen::MatrixXd values;         // spectra x buckets
    double width = 0.0;
    std::vector<PpmInterval> excluded;

    void save_csv(const std::string& path) const;  // 3-decimal center headers
};

// Shifts every ppm by (target - observed); the caller supplies the observed
// reference position (peak picking is out of scope).
Spectrum reference_shift(const Spectrum& s, double observed_ref_ppm, double target_ref_ppm);

// Splits [range_low, range_high) into equal buckets of the given width and
// sums point intensities per bucket, half-open [lo, hi) membership. The
// bucket count must be integral within 1e-9.
Eigen::VectorXd bin_spectrum(const Spectrum& s, double range_high, double range_low, double width);

BucketTable bin_spectra(const std::vector<Spectrum>& spectra, double range_high, double range_low,
                        double width);

// Per spectrum, divides all buckets by the summed intensity over the
// reference interval, then removes buckets whose center lies inside any
// exclusion interval.
BucketTable exclude_and_scale(const BucketTable& bt, const std::vector<PpmInterval>& exclusions,
                              const PpmInterval& ref_interval);

std::string format_bucket_center(double center);  // e.g. "3.275"

}  // namespace mgm

#endif  // MGM_SPECTRA_HPP_
