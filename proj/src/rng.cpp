#include "lagdeconv/rng.hpp"

#include <cmath>

namespace lagdeconv {

namespace {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                           std::uint64_t lane) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (stream + 0xd1b54a32d192ed03ULL));
    h = splitmix64(h ^ (index + 0x2545f4914f6cdd1dULL));
    h = splitmix64(h ^ (lane + 0x9e3779b97f4a7c15ULL));
    return h;
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t index) const {
    const std::uint64_t h = counter_hash(seed_, stream, index, 0);
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t stream, std::uint64_t index) const {
    const std::uint64_t h1 = counter_hash(seed_, stream, index, 1);
    const std::uint64_t h2 = counter_hash(seed_, stream, index, 2);
    const double u1 = (static_cast<double>(h1 >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = (static_cast<double>(h2 >> 11) + 0.5) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}
