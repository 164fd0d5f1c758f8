#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace pemscl {

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_tag(std::string_view tag);

/// Counter-based generator: output i is mix64(key + i * golden), so a stream
/// is fully identified by its key and position. Keys are derived from
/// (global seed, epoch-or-index, purpose tag), which keeps every random
/// decision reproducible regardless of evaluation order.
///
/// The distribution helpers below are implemented here rather than through
/// <random> distributions so results are identical across standard libraries.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key = 0) : key_(key) {}
    CounterRng(std::uint64_t seed, std::uint64_t index, std::string_view purpose);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Independent child stream; does not advance this one.
    CounterRng split(std::uint64_t index, std::string_view purpose = {}) const;

    double uniform();                          // [0, 1)
    double uniform(double lo, double hi);
    std::uint64_t below(std::uint64_t bound);  // [0, bound), unbiased
    double normal();
    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace pemscl
