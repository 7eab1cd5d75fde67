#include "brdel/rng.hpp"

namespace brdel {

std::uint64_t fnv1a64(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Philox::Philox(std::uint64_t key, std::uint64_t stream) : key_(key), stream_(stream) {}

std::array<std::uint32_t, 4> Philox::round10(std::array<std::uint32_t, 4> c,
                                             std::array<std::uint32_t, 2> k)
{
    constexpr std::uint64_t M0 = 0xD2511F53, M1 = 0xCD9E8D57;
    constexpr std::uint32_t W0 = 0x9E3779B9, W1 = 0xBB67AE85;
    for (int r = 0; r < 10; ++r) {
        const std::uint64_t p0 = M0 * c[0];
        const std::uint64_t p1 = M1 * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += W0;
        k[1] += W1;
    }
    return c;
}

Philox::result_type Philox::operator()()
{
    if (pos_ >= 4) {
        buf_ = round10({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                       {static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32)});
        ++counter_;
        pos_ = 0;
    }
    const std::uint64_t out = (std::uint64_t(buf_[pos_]) << 32) | buf_[pos_ + 1];
    pos_ += 2;
    return out;
}

void Philox::seek(std::uint64_t block)
{
    counter_ = block;
    pos_ = 4;
}

SeedRecord SeedRecord::replication(std::uint64_t master, std::string_view experiment, std::uint64_t rep)
{
    return {master, splitmix64(fnv1a64(experiment) ^ splitmix64(rep + 0x632be59bd9b4e019ULL))};
}

SeedRecord SeedRecord::child(std::string_view tag) const
{
    return {master, splitmix64(stream ^ splitmix64(fnv1a64(tag)))};
}

SeedRecord SeedRecord::child(std::uint64_t index) const
{
    return {master, splitmix64(splitmix64(stream) + 0x9e3779b97f4a7c15ULL * (index + 1))};
}

} // namespace brdel
