#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace scamradar {

// xoshiro256** with splitmix64 seeding. All synthetic-data and classifier
// randomness goes through this so outputs are identical across platforms
// and standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& w : state_) w = splitmix64(x);
    }
    // Independent stream for a sub-task, decoupled from draw order.
    Rng fork(uint64_t salt) const {
        uint64_t x = state_[0] ^ (0x9e3779b97f4a7c15ULL * (salt + 1));
        return Rng(x);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, n). n must be > 0.
    uint64_t below(uint64_t n) { return next_u64() % n; }

    int64_t range_i64(int64_t lo, int64_t hi) {  // inclusive lo, exclusive hi
        return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo)));
    }

    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal(double mean = 0.0, double stddev = 1.0) {
        // Marsaglia polar method, no cached spare.
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        return mean + stddev * u * std::sqrt(-2.0 * std::log(s) / s);
    }

    double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

    // Geometric: number of failures before first success, p in (0,1].
    uint64_t geometric(double p) {
        double u = uniform01();
        if (u >= 1.0) u = 0.9999999999999999;
        return static_cast<uint64_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
    }

    uint64_t poisson(double mean) {
        const double limit = std::exp(-mean);
        uint64_t k = 0;
        double prod = uniform01();
        while (prod > limit) {
            ++k;
            prod *= uniform01();
        }
        return k;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    static uint64_t splitmix64(uint64_t& x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    uint64_t state_[4];
};

// Deterministic static partition across up to `jobs` threads. Results must be
// written to per-index slots so output is independent of scheduling.
inline void parallel_for(size_t n, unsigned jobs, const std::function<void(size_t)>& body) {
    if (jobs <= 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    unsigned workers = std::min<unsigned>(jobs, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (size_t i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

// --- small string helpers -------------------------------------------------

inline std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::string to_lower(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

// Splits one CSV record. Supports double-quoted fields with "" escapes; no
// embedded newlines (records are single lines in all our files).
std::vector<std::string> csv_split(const std::string& line);

// Quotes a field if it contains a comma, quote, or leading/trailing space.
std::string csv_field(const std::string& value);

std::string csv_join(const std::vector<std::string>& fields);

}  // namespace scamradar
