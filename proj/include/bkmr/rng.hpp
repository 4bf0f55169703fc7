#pragma once

#include <cstdint>
#include <random>

// Deterministic random numbers. The engine is std::mt19937_64; the variate
// mappings are written out explicitly (rather than using std distributions)
// so that a given seed produces the same stream everywhere and substreams
// stay reproducible under parallel scheduling.

namespace bkmr {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Independent stream derived from (seed, a, b); used to give every
    // simulation replication its own reproducible stream.
    static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

    std::uint64_t next_u64() { return eng_(); }

    // uniform on [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, bound), rejection sampled
    std::uint64_t uniform_below(std::uint64_t bound);

    // standard normal via the Marsaglia polar method (may consume a variable
    // number of engine draws; no state is cached between calls)
    double normal();

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // lognormal with log-mean mu and log-sd sigma
    double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

private:
    std::mt19937_64 eng_;
};

} // namespace bkmr
