#ifndef ELLHYP_RNG_HPP
#define ELLHYP_RNG_HPP

#include <cstdint>

#include "ellhyp/types.hpp"

namespace ellhyp {

// xoshiro256** seeded through splitmix64. Self-contained so that seeded
// draws are bit-identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& s : s_) {
            x += 0x9e3779b97f4a7c15ULL;
            uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            s = z ^ (z >> 31);
        }
    }

    uint64_t next() {
        auto rotl = [](uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // modulus in [rlo,rhi), phase in [plo,phi)
    cd annulus(double rlo, double rhi, double plo = -kPi, double phi = kPi) {
        double r = uniform(rlo, rhi);
        double a = uniform(plo, phi);
        return std::polar(r, a);
    }

    cd unit_phase() { return std::polar(1.0, uniform(-kPi, kPi)); }

private:
    uint64_t s_[4];
};

}  // namespace ellhyp

#endif
