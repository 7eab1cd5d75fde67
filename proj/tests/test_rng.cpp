#include "brdel/rng.hpp"

#include <doctest.h>

#include <set>
#include <vector>

using namespace brdel;

// Known-answer vectors of the Philox4x32-10 reference implementation.
TEST_CASE("philox known answers")
{
    using A4 = std::array<std::uint32_t, 4>;
    using A2 = std::array<std::uint32_t, 2>;
    CHECK(Philox::round10(A4{0, 0, 0, 0}, A2{0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox::round10(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff})
          == A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox::round10(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0})
          == A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("philox streams are reproducible and seekable")
{
    Philox a(42, 7), b(42, 7);
    std::vector<std::uint64_t> first;
    for (int i = 0; i < 100; ++i) {
        first.push_back(a());
        CHECK(first.back() == b());
    }
    Philox c(42, 7);
    c.seek(10); // two 64-bit outputs per block
    CHECK(c() == first[20]);
    Philox d(42, 8);
    CHECK(d() != first[0]);
}

TEST_CASE("replication seeds do not collide")
{
    std::set<std::uint64_t> streams;
    for (std::uint64_t r = 0; r < 2000; ++r)
        streams.insert(SeedRecord::replication(1, "mc-clt", r).stream);
    for (std::uint64_t r = 0; r < 2000; ++r)
        streams.insert(SeedRecord::replication(1, "mc-maxtwo", r).stream);
    CHECK(streams.size() == 4000);

    const auto s = SeedRecord::replication(5, "x", 3);
    CHECK(s.child("a").stream != s.child("b").stream);
    CHECK(s.child(1).stream != s.child(2).stream);
    CHECK(s.child("a").stream == SeedRecord::replication(5, "x", 3).child("a").stream);
}

TEST_CASE("philox output is roughly uniform")
{
    Philox g(3, 0);
    std::array<int, 16> bins{};
    const int n = 160000;
    for (int i = 0; i < n; ++i)
        ++bins[g() >> 60];
    double chi2 = 0;
    for (int b : bins)
        chi2 += (b - n / 16.0) * (b - n / 16.0) / (n / 16.0);
    CHECK(chi2 < 37.7); // 15 dof, p = 0.001
}
