#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace lppgap::rng {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// Every draw is addressed by (seed, stream, index), so a weight or point can be
// produced without touching any other draw.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += w0;
            key[1] += w1;
        }
        const std::uint64_t p0 = std::uint64_t(m0) * ctr[0];
        const std::uint64_t p1 = std::uint64_t(m1) * ctr[2];
        ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
               std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
    }
    return ctr;
}

// Stream ids used by the model constructors.
enum Stream : std::uint32_t {
    poisson_count = 1,
    poisson_coord = 2,
    lattice_weight = 3,
    test_stream = 100,
};

// Two 64-bit words from one Philox block.
inline std::array<std::uint64_t, 2> block64(std::uint64_t seed, std::uint32_t stream,
                                            std::uint64_t index) {
    const auto out = philox4x32({std::uint32_t(index), std::uint32_t(index >> 32), stream, 0u},
                                {std::uint32_t(seed), std::uint32_t(seed >> 32)});
    return {(std::uint64_t(out[1]) << 32) | out[0], (std::uint64_t(out[3]) << 32) | out[2]};
}

// Uniform on the open interval (0,1) with 52 bits (53 would round the top
// value up to 1).
inline double to_open01(std::uint64_t bits) {
    return (double(bits >> 12) + 0.5) * 0x1.0p-52;
}

inline double uniform(std::uint64_t seed, std::uint32_t stream, std::uint64_t index, int lane = 0) {
    return to_open01(block64(seed, stream, index)[lane & 1]);
}

// Number of failures before the first success; inversion by repeated
// multiplication so the result does not depend on libm.
inline std::int64_t geometric_from_uniform(double u, double p) {
    const double q = 1.0 - p;
    std::int64_t k = 0;
    double tail = q;
    while (u < tail) {
        ++k;
        tail *= q;
    }
    return k;
}

inline double exponential_from_uniform(double u) { return -std::log(u); }

// Poisson(mean) by sequential inversion.  Large means are split into chunks
// so that exp(-chunk) never underflows; each chunk uses its own counter.
inline std::int64_t poisson(std::uint64_t seed, std::uint32_t stream, double mean) {
    constexpr double chunk = 256.0;
    std::int64_t total = 0;
    std::uint64_t index = 0;
    while (mean > 0.0) {
        const double m = mean > chunk ? chunk : mean;
        mean -= m;
        const double u = uniform(seed, stream, index++);
        double p = std::exp(-m);
        double cdf = p;
        std::int64_t k = 0;
        while (u > cdf && k < 100000) {
            ++k;
            p *= m / double(k);
            cdf += p;
            if (p == 0.0) break;
        }
        total += k;
    }
    return total;
}

}  // namespace lppgap::rng
