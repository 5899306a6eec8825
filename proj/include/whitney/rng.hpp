#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace whitney {

/// Philox4x32-10 (Salmon et al. 2011). Counter-based: the output block depends only on
/// (counter, key), so sample i of a run is the same no matter which worker draws it.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t p0 = std::uint64_t{M0} * ctr[0];
        std::uint64_t p1 = std::uint64_t{M1} * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

/// Random stream for one sample: key = seed, counter = (index, draw number).
class SampleRng {
public:
    SampleRng(std::uint64_t seed, std::uint64_t index)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0u, 0u} {}

    std::uint32_t next_u32() {
        if (pos_ == 4) {
            buf_ = philox4x32(ctr_, key_);
            if (++ctr_[2] == 0) {
                ++ctr_[3];
            }
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = -n % n;
        while (true) {
            std::uint64_t v = next_u64();
            if (v >= limit) {
                return v % n;
            }
        }
    }

    double normal() {
        double u = uniform_open();
        double v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

} // namespace whitney
