#include "gpot/rng.hpp"

#include <cmath>

namespace gpot {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mul_hilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> round_once(std::array<std::uint32_t, 4> c,
                                               std::array<std::uint32_t, 2> k) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mul_hilo(kPhiloxM0, c[0], hi0, lo0);
    mul_hilo(kPhiloxM1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

} // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> k) {
    ctr = round_once(ctr, k);
    for (int r = 1; r < 10; ++r) {
        k[0] += kWeyl0;
        k[1] += kWeyl1;
        ctr = round_once(ctr, k);
    }
    return ctr;
}

std::array<std::uint32_t, 4> Philox4x32::next() {
    const auto out = block(counter, key);
    if (++counter[0] == 0u) {
        if (++counter[1] == 0u) {
            if (++counter[2] == 0u) ++counter[3];
        }
    }
    return out;
}

PathRng::PathRng(std::uint64_t master_seed, std::uint64_t stream_id) {
    gen_.key = {static_cast<std::uint32_t>(master_seed),
                static_cast<std::uint32_t>(master_seed >> 32)};
    gen_.counter = {0u, 0u, static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
}

std::uint64_t PathRng::next_u64() {
    if (buf_pos_ > 2) {
        buf_ = gen_.next();
        buf_pos_ = 0;
    }
    const std::uint64_t lo = buf_[static_cast<std::size_t>(buf_pos_)];
    const std::uint64_t hi = buf_[static_cast<std::size_t>(buf_pos_ + 1)];
    buf_pos_ += 2;
    return (hi << 32) | lo;
}

double PathRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double PathRng::exponential() {
    // 1 - uniform() lies in (0, 1], so the log is finite.
    return -std::log(1.0 - uniform());
}

double PathRng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return normal_spare_;
    }
    // Marsaglia polar: trig-free, ~1.27 candidate pairs per two normals
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    normal_spare_ = v * f;
    have_spare_ = true;
    return u * f;
}

double PathRng::gamma(double shape) {
    // Marsaglia-Tsang; shape < 1 boosted through Gamma(shape+1) * U^{1/shape}.
    if (shape < 1.0) {
        const double u = 1.0 - uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = 1.0 - uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

} // namespace gpot
