#include "brdel/geometry.hpp"
#include "brdel/predicates.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace brdel::geometry {

namespace {

constexpr double kPi = std::numbers::pi;
const double kMaxArea = 3.0 * std::sqrt(3.0) / 4.0;

// Law of the angular separation phi in [0, pi] of the two endpoints of the
// typical edge, area-weighted over the third direction: A(phi) / (3 pi).
double chord_weight(double phi)
{
    const double s = std::sin(phi / 2), c = std::cos(phi / 2);
    return 2 * s * (2 * s + (kPi - phi) * c) / (3 * kPi);
}

// P[R <= x] for the circumradius density 2 pi^2 r^3 exp(-pi r^2)
double radius_cdf(double x)
{
    const double t = kPi * x * x;
    return -std::expm1(-t) - t * std::exp(-t);
}

} // namespace

TypicalCellSample sample_typical_cell(Philox& rng)
{
    std::gamma_distribution<double> g(2.0, 1.0);
    std::uniform_real_distribution<double> ang(0.0, 2 * kPi);
    std::uniform_real_distribution<double> acc(0.0, 1.0);

    TypicalCellSample s;
    s.radius = std::sqrt(g(rng) / kPi);
    for (;;) {
        ++s.attempts;
        for (auto& u : s.directions) {
            const double t = ang(rng);
            u = Point2(std::cos(t), std::sin(t));
        }
        const Point2 e1 = s.directions[1] - s.directions[0];
        const Point2 e2 = s.directions[2] - s.directions[0];
        const double area = 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x());
        if (acc(rng) * kMaxArea < area)
            break;
    }
    const auto& u = s.directions;
    s.edge_lengths = {s.radius * (u[1] - u[2]).norm(), s.radius * (u[0] - u[2]).norm(),
                      s.radius * (u[0] - u[1]).norm()};
    return s;
}

double typical_edge_cdf(double l)
{
    if (!(l > 0))
        return 0.0;
    auto f = [l](double phi) {
        const double c = 2 * std::sin(phi / 2);
        return chord_weight(phi) * (c > 0 ? radius_cdf(l / c) : 1.0);
    };
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, kPi, 20, 1e-13);
    return std::clamp(v, 0.0, 1.0);
}

double typical_edge_moment(double p)
{
    auto f = [p](double phi) { return std::pow(2 * std::sin(phi / 2), p) * chord_weight(phi); };
    const double angular = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, kPi, 20, 1e-13);
    return boost::math::tgamma(2 + p / 2) / std::pow(kPi, p / 2) * angular;
}

TypicalEdgePair sample_typical_edge_pair(Philox& rng)
{
    const TypicalCellSample c = sample_typical_cell(rng);
    const auto& u = c.directions;
    TypicalEdgePair e;
    e.d1 = c.radius * (u[2] - u[1]).norm();
    e.d2 = c.radius * (u[1] - u[0]).norm();
    double zeta = std::atan2(u[0].x() * u[1].y() - u[0].y() * u[1].x(), u[0].dot(u[1]));
    if (zeta <= 0)
        zeta += 2 * kPi;
    e.theta = std::asin(std::cos(zeta / 2));
    if (e.theta >= kPi / 2)
        e.theta = std::nextafter(kPi / 2, 0.0);
    return e;
}

std::array<double, 3> anchored_lengths(const TypicalCellSample& cell)
{
    std::array<Point2, 3> p;
    for (int i = 0; i < 3; ++i)
        p[i] = cell.radius * cell.directions[i];
    std::sort(p.begin(), p.end(), [](const Point2& a, const Point2& b) { return lex_less(a, b); });
    return {(p[1] - p[0]).norm(), (p[2] - p[1]).norm(), (p[2] - p[0]).norm()};
}

} // namespace brdel::geometry
