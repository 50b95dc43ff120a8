#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace qv {

// Philox4x32-10 counter-based generator (Salmon et al. 2011).
// Stateless: output is a pure function of (key, counter).
struct Philox4x32 {
    using ctr_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static ctr_type eval(ctr_type c, key_type k) {
        for (int r = 0; r < 10; ++r) {
            c = round(c, k);
            k[0] += 0x9E3779B9u;
            k[1] += 0xBB67AE85u;
        }
        return c;
    }

private:
    static ctr_type round(const ctr_type& c, const key_type& k) {
        const std::uint64_t p0 = std::uint64_t(0xD2511F53u) * c[0];
        const std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * c[2];
        const auto hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
        const auto hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

// uniform in the open interval (0, 1)
inline double u32_to_open01(std::uint32_t x) { return (double(x) + 0.5) * 2.3283064365386963e-10; }

// Four standard normals per counter value via Box-Muller.
// Stream is keyed by (seed, path); block indexes successive draws.
inline std::array<double, 4> normals4(std::uint64_t seed, std::uint64_t path, std::uint64_t block) {
    Philox4x32::key_type k{std::uint32_t(seed), std::uint32_t(seed >> 32)};
    Philox4x32::ctr_type c{std::uint32_t(block), std::uint32_t(block >> 32), std::uint32_t(path),
                           std::uint32_t(path >> 32)};
    auto r = Philox4x32::eval(c, k);
    std::array<double, 4> z;
    for (int j = 0; j < 2; ++j) {
        double u1 = u32_to_open01(r[2 * j]), u2 = u32_to_open01(r[2 * j + 1]);
        double rad = std::sqrt(-2.0 * std::log(u1));
        double ang = 6.283185307179586 * u2;
        z[2 * j] = rad * std::cos(ang);
        z[2 * j + 1] = rad * std::sin(ang);
    }
    return z;
}

} // namespace qv
