#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace brdel {

std::uint64_t fnv1a64(std::string_view s);
std::uint64_t splitmix64(std::uint64_t x);

// Philox4x32-10. The key is the master seed, the upper 64 counter bits hold
// the stream id and the lower 64 bits count blocks, so distinct streams never
// overlap and any position is reachable in O(1).
class Philox {
public:
    using result_type = std::uint64_t;

    Philox(std::uint64_t key, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();
    void seek(std::uint64_t block);

    std::uint64_t key() const { return key_; }
    std::uint64_t stream() const { return stream_; }

    static std::array<std::uint32_t, 4> round10(std::array<std::uint32_t, 4> ctr,
                                                std::array<std::uint32_t, 2> key);

private:
    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

struct SeedRecord {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;

    // (master seed, experiment id, replication id) -> stream
    static SeedRecord replication(std::uint64_t master, std::string_view experiment,
                                  std::uint64_t rep);
    SeedRecord child(std::string_view tag) const;
    SeedRecord child(std::uint64_t index) const;
    Philox engine() const { return Philox(master, stream); }
};

} // namespace brdel
