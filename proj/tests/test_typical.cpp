#include "brdel/geometry.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace brdel;
using namespace brdel::geometry;
using testsupport::ks_distance;

namespace {

double tri_area(const Point2& a, const Point2& b, const Point2& c)
{
    return 0.5 * std::abs((b - a).x() * (c - a).y() - (c - a).x() * (b - a).y());
}

} // namespace

TEST_CASE("typical cell radius and identity")
{
    Philox g(21, 0);
    const int n = 100000;
    double r2 = 0;
    long attempts = 0;
    for (int i = 0; i < n; ++i) {
        const auto c = sample_typical_cell(g);
        r2 += c.radius * c.radius;
        attempts += c.attempts;
        for (int k = 0; k < 3; ++k) {
            const int j = (k + 1) % 3, l = (k + 2) % 3;
            REQUIRE(c.edge_lengths[k] == doctest::Approx(c.radius * (c.directions[j] - c.directions[l]).norm()).epsilon(1e-14));
            CHECK(c.directions[k].norm() == doctest::Approx(1.0).epsilon(1e-14));
        }
        const auto& D = c.edge_lengths;
        CHECK(D[0] <= D[1] + D[2] + 1e-12);
    }
    CHECK(r2 / n == doctest::Approx(2 / std::numbers::pi).epsilon(0.01));

    // acceptance ratio against E[a(triangle)] / (3 sqrt3 / 4) from direct area sampling
    std::uniform_real_distribution<double> u(0, 2 * std::numbers::pi);
    Philox h(22, 0);
    double area = 0;
    const int m = 400000;
    for (int i = 0; i < m; ++i) {
        const double t1 = u(h), t2 = u(h), t3 = u(h);
        area += tri_area({std::cos(t1), std::sin(t1)}, {std::cos(t2), std::sin(t2)}, {std::cos(t3), std::sin(t3)});
    }
    const double expected_rate = area / m / (3 * std::sqrt(3.0) / 4);
    const double observed_rate = static_cast<double>(n) / attempts;
    CHECK(observed_rate == doctest::Approx(expected_rate).epsilon(0.02));
}

TEST_CASE("typical edge cdf")
{
    CHECK(typical_edge_cdf(0) == 0);
    CHECK(typical_edge_cdf(-1) == 0);
    CHECK(typical_edge_cdf(10) == doctest::Approx(1).epsilon(1e-6));
    double prev = 0;
    for (double l = 0.05; l < 4; l += 0.05) {
        const double f = typical_edge_cdf(l);
        CHECK(f >= prev - 1e-12);
        prev = f;
    }
    // mean length 32/(9 pi) at unit intensity
    CHECK(typical_edge_moment(1) == doctest::Approx(32 / (9 * std::numbers::pi)).epsilon(1e-6));

    Philox g(23, 0);
    std::vector<double> d;
    for (int i = 0; i < 100000; ++i)
        d.push_back(sample_typical_cell(g).edge_lengths[0]);
    const double below1 = std::count_if(d.begin(), d.end(), [](double x) { return x <= 1; }) / double(d.size());
    CHECK(std::abs(below1 - typical_edge_cdf(1)) < 0.005);
    CHECK(ks_distance(d, typical_edge_cdf) < 0.01);
}

TEST_CASE("typical edge pair")
{
    Philox g(24, 0);
    std::vector<double> d2;
    for (int i = 0; i < 100000; ++i) {
        const auto e = sample_typical_edge_pair(g);
        CHECK(e.d1 > 0);
        CHECK(e.theta >= -std::numbers::pi / 2);
        CHECK(e.theta < std::numbers::pi / 2);
        d2.push_back(e.d2);
    }
    CHECK(ks_distance(d2, typical_edge_cdf) < 0.01);
}

TEST_CASE("typical edge mean against direct Delaunay edges")
{
    const double N = 20000;
    const auto s = sample_poisson(N, Window::for_intensity(N), SeedRecord{25, 0});
    const auto d = make_design(s);
    double sum = 0;
    for (auto [i, j] : d.edges)
        sum += (site(d.sites, i) - site(d.sites, j)).norm() * std::sqrt(N);
    const double mean = sum / d.edges.size();
    Philox g(26, 0);
    double m = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i)
        m += sample_typical_cell(g).edge_lengths[1];
    CHECK(mean == doctest::Approx(m / n).epsilon(0.01));
}

TEST_CASE("anchored lengths")
{
    Philox g(27, 0);
    for (int i = 0; i < 1000; ++i) {
        const auto c = sample_typical_cell(g);
        const auto l = anchored_lengths(c);
        std::array<double, 3> a = l, b = c.edge_lengths;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a[0] == doctest::Approx(b[0]));
        CHECK(a[2] == doctest::Approx(b[2]));
    }
}
