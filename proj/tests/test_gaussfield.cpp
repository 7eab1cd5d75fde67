#include "brdel/gaussfield.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace brdel;
using namespace brdel::gaussfield;
using testsupport::ks_distance;
using testsupport::ks_two_sample;
using testsupport::ks_two_sample_critical;

namespace {

std::shared_ptr<const SiteMatrix> make_sites(std::initializer_list<std::pair<double, double>> l)
{
    auto s = std::make_shared<SiteMatrix>(static_cast<Eigen::Index>(l.size()), 2);
    Eigen::Index i = 0;
    for (auto [x, y] : l) {
        (*s)(i, 0) = x;
        (*s)(i, 1) = y;
        ++i;
    }
    return s;
}

} // namespace

TEST_CASE("fbm covariance values")
{
    const ModelParams p{1, 1};
    CHECK(fbm_cov(Point2(1, 0), Point2(0, 1), p) == doctest::Approx((2 - std::sqrt(2.0)) / 2).epsilon(1e-12));
    CHECK(fbm_cov(Point2(0, 0), Point2(0.3, -2), p) == 0);
    const ModelParams q{1.7, 0.6};
    const Point2 x(0.3, -0.4);
    CHECK(fbm_cov(x, x, q) == doctest::Approx(1.7 * 1.7 * std::pow(0.5, 0.6)).epsilon(1e-14));
    CHECK(fbm_cov(x, Point2(0.1, 0.2), q) == fbm_cov(Point2(0.1, 0.2), x, q));
    CHECK_THROWS(ModelParams{-1, 0.5}.validate());
    CHECK_THROWS(ModelParams{1, 2.0}.validate());
}

TEST_CASE("covariance is positive semidefinite and the factor reproduces it")
{
    const auto s = geometry::sample_poisson(300, geometry::Window{0.5, 0}, SeedRecord{31, 0});
    auto sites = std::make_shared<const SiteMatrix>(s.points);
    const ModelParams p{1.3, 0.7};
    const Eigen::MatrixXd c = fbm_covariance(*sites, p);
    CHECK((c - c.transpose()).cwiseAbs().maxCoeff() == 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * c.trace());
    const auto f = factorize(sites, p);
    const Eigen::MatrixXd L = f.lower.triangularView<Eigen::Lower>();
    CHECK((L * L.transpose() - c).cwiseAbs().maxCoeff() <= 1e-8 * c.trace() / c.rows() + f.jitter);
}

TEST_CASE("simulated variances and origin pinning")
{
    const auto sites = make_sites({{0, 0}, {0.3, 0.1}, {-0.2, 0.25}, {0.31, 0.1}});
    const ModelParams p{1.5, 0.5};
    const auto f = factorize(sites, p);
    Philox g(32, 0);
    const int n = 10000;
    const Eigen::MatrixXd w = draw(f, g, n);
    CHECK(w.row(0).cwiseAbs().maxCoeff() == 0);
    for (int i = 1; i < 4; ++i) {
        const double v = w.row(i).squaredNorm() / n;
        const double target = p.sigma * p.sigma * std::pow(geometry::site(*sites, i).norm(), p.alpha);
        CHECK(std::abs(v - target) < 3 * target * std::sqrt(2.0 / n));
    }
    // increment variance sigma^2 d^alpha
    const Eigen::VectorXd inc = (w.row(2) - w.row(1)).transpose();
    const double d = (geometry::site(*sites, 2) - geometry::site(*sites, 1)).norm();
    const double target = p.sigma * p.sigma * std::pow(d, p.alpha);
    CHECK(std::abs(inc.squaredNorm() / n - target) < 3 * target * std::sqrt(2.0 / n));

    // increment_u is standard normal
    std::vector<double> u;
    for (int r = 0; r < n; ++r) {
        FieldValues fv{sites, w.col(r), p, {}};
        u.push_back(increment_u(fv, 1, 3));
    }
    CHECK(ks_distance(u, testsupport::std_normal_cdf) < 1.628 / std::sqrt(double(n)));

    const auto one = simulate_fbm(sites, p, SeedRecord{33, 0});
    CHECK(one.values(0) == 0);
    const auto again = simulate_fbm(sites, p, SeedRecord{33, 0});
    CHECK(one.values == again.values);
}

TEST_CASE("increment_u arithmetic")
{
    const auto sites = make_sites({{0.1, 0.1}, {0.11, 0.1}});
    const ModelParams p{2, 0.5};
    Eigen::VectorXd v(2);
    v << 0.4, 0.5;
    const FieldValues fv{sites, v, p, {}};
    CHECK(increment_u(fv, 0, 1) == doctest::Approx(0.1 / (2 * std::pow(0.01, 0.25))).epsilon(1e-12));
    CHECK(increment_u(fv, Point2(0.1, 0.1), Point2(0.11, 0.1)) == doctest::Approx(0.158114).epsilon(1e-5));
    v(1) = 0.4;
    CHECK(increment_u(FieldValues{sites, v, p, {}}, 0, 1) == 0);
    CHECK_THROWS(increment_u(fv, Point2(0.5, 0.5), Point2(0.1, 0.1)));
}

TEST_CASE("pointwise max")
{
    const auto sites = make_sites({{0, 0.1}, {0.2, 0.1}, {-0.3, 0.2}});
    const ModelParams p;
    const auto a = simulate_fbm(sites, p, SeedRecord{34, 0});
    const auto b = simulate_fbm(sites, p, SeedRecord{34, 1});
    CHECK(pointwise_max(a, a).values == a.values);
    const auto ab = pointwise_max(a, b), ba = pointwise_max(b, a);
    CHECK(ab.values == ba.values);
    for (int i = 0; i < 3; ++i)
        CHECK(ab.values(i) == (b.values(i) - a.values(i) > 0 ? b.values(i) : a.values(i)));
    const auto other = make_sites({{0, 0.1}, {0.2, 0.1}, {-0.3, 0.25}});
    CHECK_THROWS(pointwise_max(a, simulate_fbm(other, p, SeedRecord{34, 2})));
}

TEST_CASE("self-similarity path by path")
{
    const auto s = geometry::sample_poisson(200, geometry::Window{0.5, 0}, SeedRecord{35, 0});
    auto sites = std::make_shared<const SiteMatrix>(s.points);
    const double lambda = 0.1;
    auto scaled = std::make_shared<const SiteMatrix>(s.points * lambda);
    const ModelParams p{1, 0.8};
    Philox g1(36, 0), g2(36, 0);
    const Eigen::MatrixXd w1 = draw(factorize(sites, p), g1, 3);
    const Eigen::MatrixXd w2 = draw(factorize(scaled, p), g2, 3);
    const double k = std::pow(lambda, p.alpha / 2);
    CHECK((w2 - k * w1).cwiseAbs().maxCoeff() < 1e-9 * w1.cwiseAbs().maxCoeff());
}

TEST_CASE("stationary increments")
{
    const ModelParams p{1, 0.5};
    const auto sites = make_sites({{0.05, 0.0}, {0.15, 0.05}, {-0.4, 0.3}, {-0.3, 0.35}});
    const auto f = factorize(sites, p);
    Philox g(37, 0);
    const int n = 5000;
    const Eigen::MatrixXd w = draw(f, g, n);
    std::vector<double> a, b;
    for (int r = 0; r < n; ++r) {
        a.push_back(w(1, r) - w(0, r));
        b.push_back(w(3, r) - w(2, r));
    }
    CHECK(ks_two_sample(a, b) < ks_two_sample_critical(n, n));
}
