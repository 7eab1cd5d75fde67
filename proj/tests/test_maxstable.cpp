#include "brdel/likelihood.hpp"
#include "brdel/maxstable.hpp"
#include "brdel/increments.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace brdel;
using namespace brdel::maxstable;
using testsupport::ks_distance;

namespace {

SiteMatrix rows(std::initializer_list<std::pair<double, double>> l)
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

double frechet(double z) { return z > 0 ? std::exp(-1 / z) : 0; }

} // namespace

TEST_CASE("single site is unit Frechet")
{
    const auto s = rows({{0.2, -0.1}});
    const ModelParams p{1, 0.5};
    std::vector<double> eta;
    for (int r = 0; r < 4000; ++r)
        eta.push_back(simulate_br(s, p, SeedRecord::replication(41, "one", r)).eta(0));
    CHECK(ks_distance(eta, frechet) < 1.628 / std::sqrt(4000.0));
}

TEST_CASE("pair margins and joint coverage, exact mode")
{
    const auto s = rows({{0.1, 0.1}, {0.4, 0.1}});
    const ModelParams p{1, 0.5};
    const int n = 4000;
    std::vector<double> e1, e2;
    long both = 0;
    for (int r = 0; r < n; ++r) {
        const auto b = simulate_br(s, p, SeedRecord::replication(42, "pair", r));
        e1.push_back(b.eta(0));
        e2.push_back(b.eta(1));
        both += b.eta(0) <= 1 && b.eta(1) <= 1;
        CHECK(b.argmax_id(0) >= 1);
    }
    CHECK(ks_distance(e1, frechet) < 1.628 / std::sqrt(double(n)));
    CHECK(ks_distance(e2, frechet) < 1.628 / std::sqrt(double(n)));
    const double a = p.sigma * std::pow(0.3, p.alpha / 2);
    const double target = std::exp(-2 * testsupport::std_normal_cdf(a / 2));
    CHECK(std::abs(both / double(n) - target) < 3 * std::sqrt(target * (1 - target) / n));
}

TEST_CASE("truncated mode agrees with exact mode")
{
    const auto s = rows({{0.1, 0.1}, {0.15, 0.12}, {-0.3, 0.3}});
    const ModelParams p{1, 0.5};
    SimulationOptions t;
    t.mode = Mode::truncated;
    const int n = 2000;
    std::vector<double> a, b;
    long warnings = 0;
    for (int r = 0; r < n; ++r) {
        const auto x = simulate_br(s, p, SeedRecord::replication(43, "ex", r));
        const auto y = simulate_br(s, p, SeedRecord::replication(43, "tr", r), t);
        a.push_back(std::log(x.eta(1) / x.eta(0)) + std::log(x.eta(2)));
        b.push_back(std::log(y.eta(1) / y.eta(0)) + std::log(y.eta(2)));
        warnings += static_cast<long>(y.warnings.size());
        CHECK(y.truncation.margin > 0);
        CHECK(y.functions >= 2);
        // eta equals the largest retained Z
        CHECK(y.second_log(0) < y.log_eta(0));
    }
    CHECK(warnings == 0);
    CHECK(testsupport::ks_two_sample(a, b) < testsupport::ks_two_sample_critical(n, n));
}

TEST_CASE("max-stability")
{
    const auto s = rows({{0.0, 0.1}, {0.2, -0.1}, {-0.25, 0.3}});
    const ModelParams p{1, 0.7};
    const int n = 1500, m = 4;
    for (int site = 0; site < 3; ++site) {
        std::vector<double> single, pooled;
        for (int r = 0; r < n; ++r) {
            single.push_back(simulate_br(s, p, SeedRecord::replication(44, "single", r)).eta(site));
            double mx = 0;
            for (int k = 0; k < m; ++k)
                mx = std::max(mx, simulate_br(s, p, SeedRecord::replication(44, "pool", r * m + k)).eta(site));
            pooled.push_back(mx / m);
        }
        CHECK(testsupport::ks_two_sample(single, pooled) < testsupport::ks_two_sample_critical(n, n));
    }
}

TEST_CASE("stationarity of eta")
{
    const auto s = rows({{-0.3, -0.3}, {-0.2, -0.3}, {0.3, 0.2}, {0.4, 0.2}});
    const ModelParams p{1, 0.5};
    const int n = 3000;
    std::vector<double> a, b;
    for (int r = 0; r < n; ++r) {
        const auto x = simulate_br(s, p, SeedRecord::replication(45, "st", r));
        a.push_back(std::log(x.eta(1) / x.eta(0)));
        b.push_back(std::log(x.eta(3) / x.eta(2)));
    }
    CHECK(testsupport::ks_two_sample(a, b) < testsupport::ks_two_sample_critical(n, n));
}

TEST_CASE("log increment and marginal_u_cdf at d = 0.1")
{
    const auto s = rows({{0.0, 0.0}, {0.1, 0.0}});
    const ModelParams p{1, 1};
    const int n = 3000;
    std::vector<double> u;
    for (int r = 0; r < n; ++r) {
        const auto b = simulate_br(s, p, SeedRecord::replication(46, "u", r));
        u.push_back(log_increment_u(b, 0, 1));
        CHECK(log_increment_u(b, Point2(0, 0), Point2(0.1, 0)) == u.back());
    }
    const likelihood::PairGeometry g{0.1};
    CHECK(ks_distance(u, [&](double x) { return likelihood::marginal_u_cdf(x, g, p); }) < 1.628 / std::sqrt(double(n)));
}

TEST_CASE("cell cover on a grid")
{
    SiteMatrix s = rows({{0.1, 0.1}});
    SimulationOptions t;
    t.mode = Mode::truncated;
    t.grid_resolution = 16;
    t.retain_values = true;
    const ModelParams p{1, 0.5};
    const auto b = simulate_br(s, p, SeedRecord{47, 0}, t);
    REQUIRE(b.nodes->rows() == 1 + 256);
    const auto cover = build_cell_cover(b, 16);
    CHECK(cover.nodes.rows() == 256);
    std::set<int> top;
    for (Eigen::Index i = 0; i < cover.k.size(); ++i) {
        top.insert(cover.k(i));
        CHECK(cover.gap(i) >= 0);
        CHECK(cover.k(i) != cover.j(i));
        CHECK(cover.k(i) == b.argmax_id(cover.node_index(i)));
    }
    CHECK(static_cast<long>(top.size()) <= b.functions);

    // labels agree with the retained spectral values
    REQUIRE(!b.spectral.empty());
    for (Eigen::Index i = 0; i < cover.k.size(); ++i) {
        const Eigen::Index node = cover.node_index(i);
        double best = -INFINITY, second = -INFINITY;
        long kb = -1, ks = -1;
        for (const auto& f : b.spectral) {
            const double z = f.values(node);
            if (z > best) {
                second = best;
                ks = kb;
                best = z;
                kb = f.id;
            } else if (z > second) {
                second = z;
                ks = f.id;
            }
        }
        CHECK(kb == cover.k(i));
        CHECK(ks == cover.j(i));
        CHECK(cover.gap(i) == doctest::Approx(best - second).epsilon(1e-12));
    }

    const auto exact = simulate_br(s, p, SeedRecord{47, 1});
    CHECK_THROWS_AS(build_cell_cover(exact, 16), UnsupportedMode);
    CHECK_THROWS(build_cell_cover(b, 32));
}

TEST_CASE("lattice")
{
    const auto l = lattice(4, 0.5);
    CHECK(l.rows() == 16);
    CHECK(l.col(0).minCoeff() == doctest::Approx(-0.375));
    CHECK(l.col(1).maxCoeff() == doctest::Approx(0.375));
}
