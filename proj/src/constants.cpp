#include "brdel/increments.hpp"
#include "brdel/likelihood.hpp"
#include "brdel/normal.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace brdel::increments {

namespace {

using likelihood::norm_cdf;
using likelihood::norm_pdf;
using likelihood::norm_sf;

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

double g_closed(double x, double y)
{
    const double a = std::max(x, y), b = std::min(x, y);
    return (a - b) * (a - b) * (a + 2 * b) / 3;
}

double omega_z_integral(double x1, double y1, double x2, double y2, double s1, double s3, double R)
{
    // Omega is a polynomial of degree <= 2 in z between the breakpoints, where
    // 3-point Gauss-Legendre is exact.
    std::array<double, 3> b{0.0, (x1 - x2) * s1, (y1 - y2) * s3};
    std::sort(b.begin(), b.end());
    static constexpr double node = 0.77459666924148337704; // sqrt(3/5)
    static constexpr std::array<double, 3> gx{-node, 0.0, node};
    static constexpr std::array<double, 3> gw{5.0 / 9, 8.0 / 9, 5.0 / 9};
    double total = 0;
    for (int k = 0; k < 2; ++k) {
        const double lo = b[k], hi = b[k + 1];
        if (!(hi > lo))
            continue;
        const double c = (lo + hi) / 2, h = (hi - lo) / 2;
        double s = 0;
        for (int q = 0; q < 3; ++q) {
            const double z = c + h * gx[q];
            s += gw[q] * omega(x1, x2, y1, y2, z / s1, z / s3, R);
        }
        total += h * s;
    }
    return total;
}

QuadResult compute_psi()
{
    // u phi(u) [1/2 - Phibar(u)] - u^2 Phibar(u) Phi(u): the display with the
    // phi(u) factor distributed, so nothing is divided by phi in the tail
    auto f = [](double u) { return u * norm_pdf(u) * (0.5 - norm_sf(u)) - u * u * norm_sf(u) * norm_cdf(u); };
    double err = 0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, kInf, 15, 1e-13, &err);
    return {v, err};
}

QuadResult compute_expected_g()
{
    // E G(X, Y) = 2 E[G; X > Y], inner integral over x > y
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double inner_err = 0;
    auto outer = [&](double y) {
        double e = 0;
        const double v = GK::integrate(
            [y](double x) { return (x - y) * (x - y) * (x + 2 * y) / 3 * norm_pdf(x); }, y, kInf, 15, 1e-13, &e);
        inner_err = std::max(inner_err, e);
        return 2 * norm_pdf(y) * v;
    };
    double err = 0;
    const double v = GK::integrate(outer, -kInf, kInf, 15, 1e-12, &err);
    return {v, err + inner_err};
}

QuadResult compute_c_v2(double alpha)
{
    if (!(alpha > 0 && alpha < 2))
        throw std::invalid_argument("compute_c_v2: alpha must lie in (0, 2)");
    const double m = geometry::typical_edge_moment(alpha / 2);
    const QuadResult g = compute_expected_g();
    return {m * g.value, std::abs(m) * g.error + 1e-12 * std::abs(g.value)};
}

CV3Result compute_c_v3(double alpha, const SeedRecord& seed, const CV3Options& opt)
{
    if (!(alpha > 0 && alpha < 2))
        throw std::invalid_argument("compute_c_v3: alpha must lie in (0, 2)");
    Philox rng = seed.engine();
    std::normal_distribution<double> nd;
    CV3Result r;
    double mean = 0, m2 = 0;
    long n = 0;
    const long batch = std::max(1L, opt.batch);
    while (n < opt.max_samples) {
        for (long b = 0; b < batch; ++b) {
            const auto cell = geometry::sample_typical_cell(rng);
            const auto [d1, d2, d3] = geometry::anchored_lengths(cell);
            const double R = triangle_r(d1, d3, d2, alpha);
            if (!(1 - std::abs(R) >= likelihood::kDegenerateTol)) {
                ++r.rejected;
                continue;
            }
            const double s = std::sqrt(1 - R * R);
            // (x1, y1) and (x2, y2): correlated increment pairs of the two fields
            const double x1 = nd(rng), e1 = nd(rng), x2 = nd(rng), e2 = nd(rng);
            const double y1 = R * x1 + s * e1, y2 = R * x2 + s * e2;
            const double s1 = std::pow(d1, alpha / 2), s3 = std::pow(d3, alpha / 2);
            const double v = opt.r_zero_reduction ? s1 * g_closed(x1, x2) + s3 * g_closed(y1, y2)
                                                  : omega_z_integral(x1, y1, x2, y2, s1, s3, R);
            ++n;
            const double delta = v - mean;
            mean += delta / n;
            m2 += delta * (v - mean);
        }
        if (n >= opt.min_samples && n > 1) {
            const double se = std::sqrt(m2 / (n - 1) / n);
            if (se <= opt.target_rel_se * std::abs(mean))
                break;
        }
    }
    r.value = mean;
    r.samples = n;
    r.se = n > 1 ? std::sqrt(m2 / (n - 1) / n) : kInf;
    return r;
}

AsymptoticConstants compute_constants(double alpha, const SeedRecord& seed, const CV3Options& opt)
{
    AsymptoticConstants c;
    c.alpha = alpha;
    const QuadResult psi = compute_psi();
    c.psi = psi.value;
    c.psi_error = psi.error;
    c.edge_moment = geometry::typical_edge_moment(alpha / 2);
    c.expected_g = compute_expected_g().value;
    const QuadResult v2 = compute_c_v2(alpha);
    c.c_v2 = v2.value;
    c.c_v2_error = v2.error;
    const CV3Result v3 = compute_c_v3(alpha, seed, opt);
    c.c_v3 = v3.value;
    c.c_v3_se = v3.se;
    c.c_v3_samples = v3.samples;
    c.c_v3_rejected = v3.rejected;
    return c;
}

} // namespace brdel::increments
