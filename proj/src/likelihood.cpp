#include "brdel/likelihood.hpp"

#include <algorithm>
#include <sstream>

namespace brdel::likelihood {

namespace {

void check_z(double z, const char* what)
{
    if (!(z > 0) || !std::isfinite(z))
        throw std::invalid_argument(std::string(what) + ": z must be positive and finite");
}

void check_d(double d, const char* what)
{
    if (!(d > 0) || !std::isfinite(d))
        throw std::invalid_argument(std::string(what) + ": distance must be positive and finite");
}

AD ad_sigma(const ModelParams& p) { return AD(p.sigma, Eigen::Vector2d::UnitX()); }
AD ad_alpha(const ModelParams& p) { return AD(p.alpha, Eigen::Vector2d::UnitY()); }

std::string describe(const TripleGeometry& g)
{
    std::ostringstream os;
    os << "d12=" << g.d12 << " d13=" << g.d13 << " d23=" << g.d23;
    return os.str();
}

} // namespace

// ---- pairs -------------------------------------------------------------

ExponentEval pair_exponent(const PairGeometry& g, double z1, double z2, const ModelParams& p)
{
    check_d(g.d, "pair_exponent");
    check_z(z1, "pair_exponent");
    check_z(z2, "pair_exponent");
    p.validate();
    const AD a = ad_sigma(p) * dpow(g.d, AD(ad_alpha(p) / 2));
    const double lr = std::log(z2 / z1);
    const AD V = Phi(AD(a / 2 + lr / a)) / z1 + Phi(AD(a / 2 - lr / a)) / z2;
    const double av = a.value();
    const double q1 = av / 2 + lr / av, q2 = av / 2 - lr / av;

    ExponentEval e;
    e.value = V.value();
    e.dz = {-norm_cdf(q1) / (z1 * z1), -norm_cdf(q2) / (z2 * z2), 0.0};
    e.mixed = {-norm_pdf(q1) / (av * z1 * z1 * z2), 0.0, 0.0, 0.0};
    e.d_sigma = V.derivatives()(0);
    e.d_alpha = V.derivatives()(1);
    return e;
}

LogDensityEval pair_log_density(const PairGeometry& g, double z1, double z2, const ModelParams& p)
{
    check_d(g.d, "pair_log_density");
    check_z(z1, "pair_log_density");
    check_z(z2, "pair_log_density");
    p.validate();
    const AD lf = pair_log_density_t(g.d, z1, z2, ad_sigma(p), ad_alpha(p));
    if (!std::isfinite(lf.value())) {
        std::ostringstream os;
        os << "pair density degenerate at d=" << g.d << " z=(" << z1 << ", " << z2 << ")";
        throw std::domain_error(os.str());
    }
    return {lf.value(), lf.derivatives()(0), lf.derivatives()(1)};
}

double pair_log_density_value(double d, double z1, double z2, double sigma, double alpha)
{
    return pair_log_density_t<double>(d, z1, z2, sigma, alpha);
}

double marginal_u_cdf(double u, const PairGeometry& g, const ModelParams& p)
{
    check_d(g.d, "marginal_u_cdf");
    if (u == std::numeric_limits<double>::infinity())
        return 1;
    if (u == -std::numeric_limits<double>::infinity())
        return 0;
    const double a = p.sigma * std::pow(g.d, p.alpha / 2);
    // Phi(a/2 + u) / (Phi(a/2 + u) + e^{-au} Phi(a/2 - u)), evaluated in logs
    const double l1 = log_norm_cdf(a / 2 + u);
    const double l2 = -a * u + log_norm_cdf(a / 2 - u);
    return 1 / (1 + std::exp(l2 - l1));
}

double conditional_u_cdf(double u, const PairGeometry& g, const ModelParams& p, double eta1)
{
    check_d(g.d, "conditional_u_cdf");
    check_z(eta1, "conditional_u_cdf");
    if (u == std::numeric_limits<double>::infinity())
        return 1;
    if (u == -std::numeric_limits<double>::infinity())
        return 0;
    const double a = p.sigma * std::pow(g.d, p.alpha / 2);
    const double v1 = norm_cdf(a / 2 + u);
    // V(1, e^{au}) - 1 = Phi(a/2 + u) - 1 + e^{-au} Phi(a/2 - u)
    const double excess = -norm_sf(a / 2 + u) + std::exp(-a * u + log_norm_cdf(a / 2 - u));
    return std::exp(-excess / eta1) * v1;
}

// ---- triples -----------------------------------------------------------

double triangle_slack(const TripleGeometry& g, double alpha)
{
    const auto R = triangle_correlations(g, alpha);
    return std::min({1 - std::abs(R[0]), 1 - std::abs(R[1]), 1 - std::abs(R[2])});
}

void check_triangle(const TripleGeometry& g, double alpha)
{
    check_d(g.d12, "triangle");
    check_d(g.d13, "triangle");
    check_d(g.d23, "triangle");
    const auto R = triangle_correlations(g, alpha);
    for (int i = 0; i < 3; ++i)
        if (!(1 - std::abs(R[i]) >= kDegenerateTol)) {
            std::ostringstream os;
            os.precision(17);
            os << "degenerate triangle (" << describe(g) << "): R" << i + 1 << " = " << R[i];
            throw DegenerateTriangle(os.str());
        }
}

ExponentEval triple_exponent(const TripleGeometry& g, double z1, double z2, double z3, const ModelParams& p)
{
    check_z(z1, "triple_exponent");
    check_z(z2, "triple_exponent");
    check_z(z3, "triple_exponent");
    p.validate();
    check_triangle(g, p.alpha);
    const TripleCore<AD> ca = triple_core(g, z1, z2, z3, ad_sigma(p), ad_alpha(p));
    const AD V = triple_V(ca, z1, z2, z3);
    const TripleCore<double> c = triple_core(g, z1, z2, z3, p.sigma, p.alpha);

    const double s1 = std::sqrt(1 - c.R[0] * c.R[0]);
    const double s2 = std::sqrt(1 - c.R[1] * c.R[1]);
    ExponentEval e;
    e.value = V.value();
    e.dz = {-std::exp(log_bvn_cdf(c.A1, c.B1, c.R[0])) / (z1 * z1), -std::exp(log_bvn_cdf(c.A2, c.B2, c.R[1])) / (z2 * z2),
            -std::exp(log_bvn_cdf(c.A3, c.B3, c.R[2])) / (z3 * z3)};
    e.mixed[0] = -norm_pdf(c.A1) * norm_cdf((c.B1 - c.R[0] * c.A1) / s1) / (c.a12 * z1 * z1 * z2);
    e.mixed[1] = -norm_pdf(c.B1) * norm_cdf((c.A1 - c.R[0] * c.B1) / s1) / (c.a13 * z1 * z1 * z3);
    e.mixed[2] = -norm_pdf(c.B2) * norm_cdf((c.A2 - c.R[1] * c.B2) / s2) / (c.a23 * z2 * z2 * z3);
    e.mixed[3] = -bvn_pdf(c.A1, c.B1, c.R[0]) / (c.a12 * c.a13 * z1 * z1 * z2 * z3);
    e.d_sigma = V.derivatives()(0);
    e.d_alpha = V.derivatives()(1);
    return e;
}

LogDensityEval triple_log_density(const TripleGeometry& g, double z1, double z2, double z3, const ModelParams& p)
{
    check_z(z1, "triple_log_density");
    check_z(z2, "triple_log_density");
    check_z(z3, "triple_log_density");
    p.validate();
    check_triangle(g, p.alpha);
    const AD lf = triple_log_density_t(g, z1, z2, z3, ad_sigma(p), ad_alpha(p));
    if (!std::isfinite(lf.value())) {
        std::ostringstream os;
        os << "triple density degenerate at " << describe(g) << " z=(" << z1 << ", " << z2 << ", " << z3 << ")";
        throw std::domain_error(os.str());
    }
    return {lf.value(), lf.derivatives()(0), lf.derivatives()(1)};
}

double triple_log_density_value(const TripleGeometry& g, double z1, double z2, double z3, double sigma,
                                double alpha)
{
    return triple_log_density_t<double>(g, z1, z2, z3, sigma, alpha);
}

double pair_u_cdf(double u2, double u3, const TripleGeometry& g, const ModelParams& p)
{
    p.validate();
    check_triangle(g, p.alpha);
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (u2 == -inf || u3 == -inf)
        return 0;
    const double a12 = p.sigma * std::pow(g.d12, p.alpha / 2);
    const double a13 = p.sigma * std::pow(g.d13, p.alpha / 2);
    if (u3 == inf && u2 == inf)
        return 1;
    if (u3 == inf)
        return marginal_u_cdf(u2, {g.d12}, p);
    if (u2 == inf)
        return marginal_u_cdf(u3, {g.d13}, p);
    // z = (1, e^{a12 u2}, e^{a13 u3}); V(1, z2, z3) with the first term pulled out
    const double lz2 = a12 * u2, lz3 = a13 * u3;
    const TripleCore<double> c = triple_core(g, 1.0, std::exp(lz2), std::exp(lz3), p.sigma, p.alpha);
    const double t1 = std::exp(log_bvn_cdf(c.A1, c.B1, c.R[0]));
    const double t2 = std::exp(-lz2) * std::exp(log_bvn_cdf(c.A2, c.B2, c.R[1]));
    const double t3 = std::exp(-lz3) * std::exp(log_bvn_cdf(c.A3, c.B3, c.R[2]));
    if (t1 == 0)
        return 0;
    return t1 / (t1 + t2 + t3);
}

} // namespace brdel::likelihood
