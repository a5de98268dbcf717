#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tvfbe {

// Deterministic random source. mt19937_64 output is pinned by the standard,
// but the std distributions are not (their algorithms are
// implementation-defined), so uniform and normal variates are derived from
// raw 64-bit draws by hand. This is what makes reruns byte-identical across
// toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // Uniform on [0, 1): top 53 bits of one draw.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; consumes two draws per pair and caches
    // the second value.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the log is finite.
        double u1 = static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
        double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    // Splitmix64 step, used to derive independent stream seeds (one per sweep
    // cell / run) from a base seed without overlapping the mt19937_64 states.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace tvfbe
