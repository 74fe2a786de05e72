#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace propest {

/// Counter-based 64-bit stream: the n-th output is a fixed mix of (key, n),
/// so independent streams are derived from ids without any shared state.
/// Satisfies UniformRandomBitGenerator.
class SeededStream {
public:
    using result_type = std::uint64_t;

    explicit SeededStream(std::uint64_t key) : key_(key) {}

    /// Stream for one replication of one experiment; independent of the order
    /// in which replications run.
    static SeededStream for_replication(std::uint64_t seed, std::string_view scenario,
                                        std::uint64_t rep);

    /// Child stream; the parent is not advanced.
    SeededStream split(std::uint64_t id) const;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace propest
