#include "mgm/util.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

namespace mgm {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int n) {
    g_threads.store(std::max(1, n));
}

int thread_count() {
    return g_threads.load();
}

void parallel_chunks(std::int64_t count,
                     const std::function<void(std::int64_t, std::int64_t, int)>& fn) {
    const int workers = static_cast<int>(std::min<std::int64_t>(thread_count(), std::max<std::int64_t>(count, 1)));
    if (workers <= 1) {
        fn(0, count, 0);
        return;
    }
    const std::int64_t base = count / workers;
    const std::int64_t rem = count % workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::int64_t lo = 0;
    for (int c = 0; c < workers; ++c) {
        const std::int64_t hi = lo + base + (c < rem ? 1 : 0);
        pool.emplace_back([&fn, lo, hi, c] { fn(lo, hi, c); });
        lo = hi;
    }
    for (auto& t : pool) t.join();
}

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file for hashing: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const auto got = static_cast<std::size_t>(in.gcount());
        for (std::size_t i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    return h;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double logsumexp(const double* v, int n) {
    double m = v[0];
    for (int i = 1; i < n; ++i) m = std::max(m, v[i]);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::exp(v[i] - m);
    return m + std::log(acc);
}

}  // namespace mgm
