#ifndef MGM_UTIL_HPP_
#define MGM_UTIL_HPP_

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mgm {

// Error categories map onto CLI exit codes: usage 1, data 2, numeric 3.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Global worker-thread count for sample-parallel reductions. Default 1;
// the CLI raises it via --threads.
void set_thread_count(int n);
int thread_count();

// Runs fn(begin, end, chunk_index) over `count` items split into contiguous
// chunks, one per worker. Chunk boundaries depend only on (count, threads),
// so results are reproducible for a fixed thread count; callers must combine
// per-chunk results in chunk order to keep reductions deterministic.
void parallel_chunks(std::int64_t count,
                     const std::function<void(std::int64_t, std::int64_t, int)>& fn);

// FNV-1a 64-bit, used for content hashes in run manifests.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64_file(const std::string& path);

std::string format_double(double v);  // shortest exact round-trip ("%.17g")

std::vector<std::string> split(const std::string& line, char sep);
std::string trim(const std::string& s);

double logsumexp(const double* v, int n);

}  // namespace mgm

#endif  // MGM_UTIL_HPP_
