#include "brdel/geometry.hpp"
#include "brdel/predicates.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace brdel;
using namespace brdel::geometry;

namespace {

SiteMatrix pts(std::initializer_list<std::pair<double, double>> l)
{
    SiteMatrix s(static_cast<Eigen::Index>(l.size()), 2);
    Eigen::Index i = 0;
    for (auto [x, y] : l) {
        s(i, 0) = x;
        s(i, 1) = y;
        ++i;
    }
    return s;
}

SiteMatrix uniform(int n, std::uint64_t seed, double lo = -0.5, double hi = 0.5)
{
    Philox g(seed, 0);
    std::uniform_real_distribution<double> u(lo, hi);
    SiteMatrix s(n, 2);
    for (int i = 0; i < n; ++i) {
        s(i, 0) = u(g);
        s(i, 1) = u(g);
    }
    return s;
}

// brute force: strictly inside the circumcircle of a ccw triangle, in long double
bool strictly_inside(const Point2& a, const Point2& b, const Point2& c, const Point2& p)
{
    using L = long double;
    const L adx = L(a.x()) - p.x(), ady = L(a.y()) - p.y();
    const L bdx = L(b.x()) - p.x(), bdy = L(b.y()) - p.y();
    const L cdx = L(c.x()) - p.x(), cdy = L(c.y()) - p.y();
    const L det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) - (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady)
                  + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
    return det > 1e-15L;
}

void check_empty_circumdisk(const Triangulation& t)
{
    long violations = 0;
    for (const auto& tr : t.triangles) {
        const Point2 a = site(t.vertices, tr[0]), b = site(t.vertices, tr[1]), c = site(t.vertices, tr[2]);
        for (Eigen::Index v = 0; v < t.vertices.rows(); ++v) {
            if (v == tr[0] || v == tr[1] || v == tr[2])
                continue;
            violations += strictly_inside(a, b, c, site(t.vertices, v));
        }
    }
    CHECK(violations == 0);
}

// E_N and DT_N by enumeration from the triangle list
std::set<std::array<int, 2>> brute_edges(const Triangulation& t, const Window& w)
{
    std::set<std::array<int, 2>> e;
    for (const auto& tr : t.triangles)
        for (int k = 0; k < 3; ++k) {
            int i = tr[k], j = tr[(k + 1) % 3];
            if (lex_less(site(t.vertices, j), site(t.vertices, i)))
                std::swap(i, j);
            if (w.in_c(site(t.vertices, i)))
                e.insert({i, j});
        }
    return e;
}

} // namespace

TEST_CASE("sample_poisson counts")
{
    CHECK_THROWS(sample_poisson(0, Window{0.5, 0}, SeedRecord{1, 1}));
    CHECK(sample_poisson(1e-9, Window{0.5, 0}, SeedRecord{1, 1}).points.rows() == 0);

    // chi-square against Poisson(500) over 2000 seeds, bins of width 10 around the mean
    const int reps = 2000;
    std::vector<int> counts;
    double mean = 0;
    for (int r = 0; r < reps; ++r) {
        const auto s = sample_poisson(500, Window{0.5, 0}, SeedRecord::replication(11, "poisson", r));
        counts.push_back(static_cast<int>(s.points.rows()));
        mean += s.points.rows();
        for (Eigen::Index i = 0; i < s.points.rows(); ++i)
            REQUIRE(Window{0.5, 0}.in_c(site(s.points, i)));
    }
    mean /= reps;
    CHECK(std::abs(mean - 500) < 3 * std::sqrt(500.0 / reps));

    std::vector<double> edges = {0, 470, 480, 490, 500, 510, 520, 530, 1e9};
    auto pois_cdf = [](int k) {
        double lp = -500, s = 0;
        for (int i = 0; i <= k; ++i) {
            if (i > 0)
                lp += std::log(500.0 / i);
            s += std::exp(lp);
        }
        return s;
    };
    double chi2 = 0;
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
        const int lo = static_cast<int>(edges[b]), hi = static_cast<int>(std::min(edges[b + 1], 2000.0));
        const double p = (b + 2 == edges.size() ? 1.0 : pois_cdf(hi - 1)) - (lo == 0 ? 0.0 : pois_cdf(lo - 1));
        const long obs = std::count_if(counts.begin(), counts.end(), [&](int c) { return c >= lo && c < hi; });
        chi2 += (obs - reps * p) * (obs - reps * p) / (reps * p);
    }
    CHECK(chi2 < 18.48); // 7 dof at level 0.01
}

TEST_CASE("delaunay small cases")
{
    CHECK_THROWS_AS(delaunay(pts({{0, 0}, {1, 1}})), DegenerateInput);
    CHECK_THROWS_AS(delaunay(pts({{0, 0}, {1, 1}, {2, 2}, {3, 3}})), DegenerateInput);

    const auto t1 = delaunay(pts({{0, 0}, {1, 0}, {0, 1}}));
    CHECK(t1.triangles.size() == 1);
    CHECK(t1.edges.size() == 3);

    // co-circular square: both diagonals are Delaunay, the tie-break picks one
    const auto sq = pts({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const auto t2 = delaunay(sq);
    CHECK(t2.triangles.size() == 2);
    CHECK(t2.edges.size() == 5);
    check_empty_circumdisk(t2);
    // the choice does not depend on input order
    const auto t3 = delaunay(pts({{1, 1}, {0, 1}, {1, 0}, {0, 0}}));
    auto diag = [](const Triangulation& t) {
        std::set<std::pair<double, double>> ends;
        for (auto [i, j] : t.edges) {
            const Point2 a = site(t.vertices, i), b = site(t.vertices, j);
            if ((a - b).norm() > 1.2)
                ends = {{a.x(), a.y()}, {b.x(), b.y()}};
        }
        return ends;
    };
    CHECK(diag(t2) == diag(t3));
}

TEST_CASE("delaunay empty circumdisk and Euler count")
{
    for (int n : {200, 500}) {
        const auto t = delaunay(uniform(n, 100 + n));
        check_empty_circumdisk(t);
        CHECK(static_cast<int>(t.edges.size()) == 3 * n - 3 - t.hull_size);
        CHECK(static_cast<int>(t.triangles.size()) == 2 * n - 2 - t.hull_size);
        // edges equal the union of triangle edges
        std::set<std::array<int, 2>> from_tri;
        for (const auto& tr : t.triangles)
            for (int k = 0; k < 3; ++k)
                from_tri.insert({std::min(tr[k], tr[(k + 1) % 3]), std::max(tr[k], tr[(k + 1) % 3])});
        CHECK(from_tri == std::set<std::array<int, 2>>(t.edges.begin(), t.edges.end()));
        for (const auto& tr : t.triangles)
            CHECK(orient2d(site(t.vertices, tr[0]), site(t.vertices, tr[1]), site(t.vertices, tr[2])) > 0);
    }
}

TEST_CASE("delaunay on a lattice with many co-circular quadruples")
{
    SiteMatrix s(49, 2);
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) {
            s(i * 7 + j, 0) = i * 0.1;
            s(i * 7 + j, 1) = j * 0.1;
        }
    const auto t = delaunay(s);
    CHECK(t.triangles.size() == 72);
    check_empty_circumdisk(t);
}

TEST_CASE("extract edges and triples match enumeration")
{
    const Window w{0.5, 0.1};
    // hand-built: three points in C, two outside
    const auto p5 = pts({{-0.2, -0.1}, {0.3, 0.05}, {0.0, 0.4}, {0.55, -0.3}, {-0.58, 0.3}});
    const auto t = delaunay(p5);
    const auto es = extract_edges(t, w);
    const auto brute = brute_edges(t, w);
    CHECK(std::set<std::array<int, 2>>(es.pairs.begin(), es.pairs.end()) == brute);
    CHECK(es.pairs.size() == brute.size());

    const auto ts = extract_triples(t, w);
    std::set<std::array<int, 3>> bt;
    for (auto tr : t.triangles) {
        std::sort(tr.begin(), tr.end(),
                  [&](int a, int b) { return lex_less(site(t.vertices, a), site(t.vertices, b)); });
        if (w.in_c(site(t.vertices, tr[0])))
            bt.insert(tr);
    }
    CHECK(std::set<std::array<int, 3>>(ts.triples.begin(), ts.triples.end()) == bt);
    for (const auto& tr : ts.triples) {
        CHECK(lex_less(site(t.vertices, tr[0]), site(t.vertices, tr[1])));
        CHECK(lex_less(site(t.vertices, tr[1]), site(t.vertices, tr[2])));
    }

    const auto far = delaunay(pts({{5, 5}, {6, 5}, {5, 6}}));
    CHECK(extract_edges(far, w).pairs.empty());
    const auto one = delaunay(pts({{0, 0}, {0.1, 0}, {0, 0.1}}));
    CHECK(extract_triples(one, w).triples.size() == 1);
}

TEST_CASE("design at moderate intensity")
{
    const auto s = sample_poisson(3000, Window::for_intensity(3000), SeedRecord{4, 4});
    const auto d = make_design(s);
    const auto t = delaunay(s.points);
    const auto e = extract_edges(t, s.window);
    CHECK(d.edges.size() == e.pairs.size());
    for (auto [i, j] : d.edges) {
        CHECK(d.window.in_c(site(d.sites, i)));
        CHECK(lex_less(site(d.sites, i), site(d.sites, j)));
    }
    CHECK(std::abs(static_cast<double>(d.edges.size()) / 3000 - 3) < 0.15);
    CHECK(std::abs(static_cast<double>(d.triples.size()) / 3000 - 2) < 0.1);
    const auto w = c_weights(d);
    CHECK(w.size() == static_cast<Eigen::Index>(d.in_c.size()));
    CHECK(w.sum() == doctest::Approx(1.0));
}

TEST_CASE("axis swap changes only labels")
{
    auto s = uniform(300, 9);
    const auto t = delaunay(s);
    SiteMatrix sw = s;
    sw.col(0) = s.col(1);
    sw.col(1) = s.col(0);
    const auto t2 = delaunay(sw);
    CHECK(t.edges.size() == t2.edges.size());
    std::set<std::array<int, 2>> a(t.edges.begin(), t.edges.end()), b(t2.edges.begin(), t2.edges.end());
    CHECK(a == b);
}
