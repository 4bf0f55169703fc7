#include "bkmr/rng.hpp"

#include <cmath>

namespace bkmr {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

Rng Rng::substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ splitmix64(a + 0x100000001ULL));
    s = splitmix64(s ^ splitmix64(b + 0x200000003ULL));
    return Rng(s);
}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = eng_();
    } while (x >= limit);
    return x % bound;
}

double Rng::normal() {
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
}

} // namespace bkmr
