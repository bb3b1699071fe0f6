#ifndef RAMSEY_RNG_HPP
#define RAMSEY_RNG_HPP

#include <cmath>
#include <cstdint>

namespace ramsey {

// splitmix64 finalizer (Steele/Lea/Flood via Vigna's fixed-increment variant).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
    return z ^ (z >> 31);
}

// Counter-based stream: output n is a pure function of (key, n), so streams can
// be split per (repetition, source) and consumed in parallel while staying
// reproducible for a fixed root seed.
class Stream {
public:
    explicit Stream(std::uint64_t key) : key_(key) {}

    static Stream root(std::uint64_t seed) {
        return Stream(mix64(seed + UINT64_C(0x9E3779B97F4A7C15)));
    }

    // Child stream for a tagged substream (repetition index, TLS index, ...).
    Stream sub(std::uint64_t tag) const {
        std::uint64_t k = key_ ^ mix64(tag + UINT64_C(0xD1B54A32D192ED03));
        return Stream(mix64(k + UINT64_C(0x9E3779B97F4A7C15)));
    }

    std::uint64_t next_u64() {
        ctr_ += UINT64_C(0x9E3779B97F4A7C15);
        return mix64(key_ + ctr_);
    }

    // uniform in [0,1) with 53-bit resolution
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // standard normal, Box-Muller; second value cached
    double next_normal() {
        if (have_cache_) {
            have_cache_ = false;
            return cache_;
        }
        double u1, u2;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cache_ = r * std::sin(a);
        have_cache_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    double cache_ = 0.0;
    bool have_cache_ = false;
};

} // namespace ramsey

#endif
