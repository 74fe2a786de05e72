#include "propest/rng.hpp"

namespace propest {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace

SeededStream SeededStream::for_replication(std::uint64_t seed, std::string_view scenario,
                                           std::uint64_t rep) {
    std::uint64_t key = mix64(seed);
    key = mix64(key ^ fnv1a(scenario));
    key = mix64(key ^ rep);
    return SeededStream(key);
}

SeededStream SeededStream::split(std::uint64_t id) const {
    return SeededStream(mix64(key_ ^ mix64(id ^ 0xD6E8FEB86659FD93ULL)));
}

SeededStream::result_type SeededStream::operator()() {
    return mix64(key_ ^ mix64(counter_++));
}

double SeededStream::uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

}  // namespace propest
