#include "pemscl/rng.hpp"

#include <cmath>
#include <numbers>

namespace pemscl {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t hash_tag(std::string_view tag) {
    // FNV-1a
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t index, std::string_view purpose)
    : key_(mix64(mix64(seed + kGolden) ^ mix64(index + 2 * kGolden) ^ hash_tag(purpose))) {}

CounterRng::result_type CounterRng::operator()() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

CounterRng CounterRng::split(std::uint64_t index, std::string_view purpose) const {
    return CounterRng(key_, index, purpose);
}

double CounterRng::uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::uint64_t CounterRng::below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
        x = (*this)();
    } while (x >= limit);
    return x % bound;
}

double CounterRng::normal() {
    // Box-Muller, one variate per call.
    double u1;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace pemscl
