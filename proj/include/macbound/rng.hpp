#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

// Seeded, platform-stable random streams. Monte Carlo code derives one
// substream per trial (counter-based), so results do not depend on how
// trials are distributed across workers.

namespace macbound::rng {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// State seed for the substream with the given index under a master seed.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed) + 0x632BE59BD9B4E019ULL * index);
}

/// SplitMix64 generator with Box-Muller normals.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, k).
    std::uint64_t uniform_int(std::uint64_t k) {
        const std::uint64_t threshold = (-k) % k;
        std::uint64_t x;
        do { x = next(); } while (x < threshold);
        return x % k;
    }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // Shift u1 into (0, 1] so the log is finite.
        const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Worker cap: MACBOUND_THREADS if set, otherwise hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("MACBOUND_THREADS")) {
        const long v = std::atol(env);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Runs fn(chunk_index, begin, end) over the index range [0, total) in
/// fixed-size chunks. Chunk boundaries do not depend on the worker count,
/// so per-chunk accumulators combined in chunk order give identical
/// results for any number of workers.
template <typename F>
void parallel_chunks(std::int64_t total, std::int64_t chunk_size, F fn) {
    if (total <= 0) return;
    const std::int64_t num_chunks = (total + chunk_size - 1) / chunk_size;
    unsigned workers = worker_count();
    if (static_cast<std::int64_t>(workers) > num_chunks)
        workers = static_cast<unsigned>(num_chunks);
    std::atomic<std::int64_t> next_chunk{0};
    auto run = [&] {
        for (;;) {
            const std::int64_t c = next_chunk.fetch_add(1);
            if (c >= num_chunks) break;
            const std::int64_t begin = c * chunk_size;
            const std::int64_t end = std::min(begin + chunk_size, total);
            fn(c, begin, end);
        }
    };
    if (workers <= 1) {
        run();
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(run);
    for (auto& t : pool) t.join();
}

}  // namespace macbound::rng
