#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gaitline {

/// Malformed or inconsistent input data (CLI exit code 2).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure: non-convergence, indefinite matrix, ... (CLI exit code 3).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Matrix = std::vector<std::vector<double>>;

/// Shortest decimal form that parses back to the same double. Used wherever
/// doubles land in files, so serialized artifacts round-trip bit-exactly.
inline std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive an independent stream seed from a base seed and a salt (fold index,
/// tree index, ...). Stable across platforms and thread schedules.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    return splitmix64(seed ^ splitmix64(salt + 0x632be59bd9b4e019ULL));
}

/// Deterministic RNG: mt19937_64 gives a standardized bit sequence and the
/// distributions are hand-rolled, so streams are reproducible everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform in (0, 1].
    double uniform() {
        return static_cast<double>((eng_() >> 11) + 1) * 0x1p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        double u = static_cast<double>(eng_() >> 11) * 0x1p-53;
        return lo + u * (hi - lo);
    }

    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        // modulo bias is negligible for n << 2^64
        return static_cast<std::size_t>(eng_() % n);
    }

    /// Standard normal via Box-Muller; the sine twin is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Run fn(i) for i in [0, n) on up to `threads` workers. Work is split into
/// contiguous chunks, so any output indexed by i is independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (std::size_t t = 0; t < workers; ++t) {
        std::size_t begin = n * t / workers;
        std::size_t end = n * (t + 1) / workers;
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace gaitline
