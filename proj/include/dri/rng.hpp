#pragma once

#include <cstdint>

// Small deterministic RNG utilities. Everything randomized in the toolkit
// (clustering tie-breaks, fuzzy membership init, solver restarts, synthetic
// fixtures) draws from these so that runs are reproducible bit-for-bit across
// platforms and standard libraries. std::uniform_*_distribution is avoided on
// purpose: its output is implementation-defined.
namespace dri::rng {

    // SplitMix64: tiny, fast, passes BigCrush, and fully specified.
    class SplitMix64 {
    public:
        explicit SplitMix64(std::uint64_t seed) : state(seed) {}

        std::uint64_t next() {
            std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            return z ^ (z >> 31);
        }

        // Uniform in [0, 1).
        double next_double() {
            return static_cast<double>(next() >> 11) * 0x1.0p-53;
        }

        // Uniform in [lo, hi).
        double next_double(double lo, double hi) {
            return lo + (hi - lo) * next_double();
        }

        // Uniform integer in [0, n). Multiply-shift reduction: slightly biased
        // for astronomically large n, irrelevant here, and fully portable.
        std::uint64_t bounded(std::uint64_t n) {
            return static_cast<std::uint64_t>(
                (static_cast<unsigned __int128>(next()) * n) >> 64);
        }

    private:
        std::uint64_t state;
    };

    // Derives an independent child seed from a master seed and a stream tag,
    // so one user-facing seed reproducibly fans out to all randomized stages.
    inline std::uint64_t derive(std::uint64_t master, std::uint64_t stream) {
        SplitMix64 mix(master ^ (0xA0761D6478BD642FULL + stream * 0xE7037ED1A0B428DBULL));
        mix.next();
        return mix.next();
    }

}  // namespace dri::rng
