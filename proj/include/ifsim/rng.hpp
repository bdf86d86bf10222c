#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace ifsim {

// Counter-based random substreams. Every stochastic concern in a run draws
// from its own stream keyed by (seed, concern, slot, node, extra), so any
// draw is recomputable in isolation and toggling one concern on or off never
// perturbs the draws of another.

enum class Concern : std::uint64_t {
    Placement = 1, // topology sampling (counts, positions, angles)
    Arrival = 2,   // per-node packet arrivals
    Mac = 3,       // ALOHA access / CSMA backoff draws
    Fade = 4,      // per (rx, tx, slot) fading on data links
    Sense = 5,     // per (sensor, tx, slot) fading on the sensing channel
    Generic = 6,   // test and tool usage
};

namespace detail {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
inline std::uint64_t splitmix_fin(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_key(std::uint64_t h, std::uint64_t k) {
    h += 0x9E3779B97F4A7C15ull * (k + 0x632BE59BD9B4E019ull);
    return splitmix_fin(h);
}

} // namespace detail

class RngStream {
public:
    RngStream(std::uint64_t seed, Concern concern, std::uint64_t slot = 0,
              std::uint64_t node = 0, std::uint64_t extra = 0) {
        std::uint64_t h = detail::splitmix_fin(seed ^ 0x8E2AB7C11F386D4Bull);
        h = detail::mix_key(h, static_cast<std::uint64_t>(concern));
        h = detail::mix_key(h, slot);
        h = detail::mix_key(h, node);
        h = detail::mix_key(h, extra);
        state_ = h;
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return detail::splitmix_fin(state_);
    }

    // Uniform on [0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Unit-mean exponential; used for Rayleigh power fading.
    double exponential_mean1() {
        double u = uniform01();
        return -std::log1p(-u);
    }

    // Poisson count via exponential inter-arrivals; stable for any mean that
    // fits in memory as a link count.
    std::uint64_t poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        std::uint64_t k = 0;
        double t = exponential_mean1();
        while (t < mean) {
            ++k;
            t += exponential_mean1();
        }
        return k;
    }

private:
    std::uint64_t state_;
};

} // namespace ifsim
