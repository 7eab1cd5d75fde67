#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/AutoDiff>

#include <cmath>
#include <numbers>

namespace brdel::likelihood {

using AD = Eigen::AutoDiffScalar<Eigen::Vector2d>; // derivatives in (sigma, alpha)

struct NormalEval {
    double pdf;
    double cdf;
    double sf;
};

NormalEval std_normal(double x);

double norm_pdf(double x);
double norm_cdf(double x);
double norm_sf(double x);
double log_norm_pdf(double x);
double log_norm_cdf(double x);

// P[X <= h, Y <= k] for a standard bivariate normal with correlation rho
// (Genz's Gauss-Legendre scheme for the Drezner-Wesolowsky integral).
double bvn_cdf(double h, double k, double rho);
double log_bvn_cdf(double h, double k, double rho);
double bvn_pdf(double x, double y, double rho);

// Scalar-generic wrappers; the AutoDiff overloads carry the chain rule.
inline double Phi(double x) { return norm_cdf(x); }
inline double log_Phi(double x) { return log_norm_cdf(x); }
inline double Phi2(double h, double k, double r) { return bvn_cdf(h, k, r); }
inline double log_Phi2(double h, double k, double r) { return log_bvn_cdf(h, k, r); }

inline AD Phi(const AD& x) { return AD(norm_cdf(x.value()), norm_pdf(x.value()) * x.derivatives()); }

inline AD log_Phi(const AD& x)
{
    const double v = x.value();
    const double lc = log_norm_cdf(v);
    return AD(lc, std::exp(log_norm_pdf(v) - lc) * x.derivatives());
}

inline AD Phi2(const AD& h, const AD& k, const AD& r)
{
    const double hv = h.value(), kv = k.value(), rv = r.value();
    const double s = std::sqrt(1 - rv * rv);
    const double dh = norm_pdf(hv) * norm_cdf((kv - rv * hv) / s);
    const double dk = norm_pdf(kv) * norm_cdf((hv - rv * kv) / s);
    const double dr = bvn_pdf(hv, kv, rv);
    return AD(bvn_cdf(hv, kv, rv), dh * h.derivatives() + dk * k.derivatives() + dr * r.derivatives());
}

inline AD log_Phi2(const AD& h, const AD& k, const AD& r)
{
    const double hv = h.value(), kv = k.value(), rv = r.value();
    const double s = std::sqrt(1 - rv * rv);
    const double lp = log_bvn_cdf(hv, kv, rv);
    const double dh = std::exp(log_norm_pdf(hv) + log_norm_cdf((kv - rv * hv) / s) - lp);
    const double dk = std::exp(log_norm_pdf(kv) + log_norm_cdf((hv - rv * kv) / s) - lp);
    const double q = (hv * hv - 2 * rv * hv * kv + kv * kv) / (1 - rv * rv);
    const double dr = std::exp(-q / 2 - std::log(2 * std::numbers::pi * s) - lp);
    return AD(lp, dh * h.derivatives() + dk * k.derivatives() + dr * r.derivatives());
}

template <typename S>
S log_phi(const S& x)
{
    return -x * x / 2 - 0.91893853320467274178; // log sqrt(2 pi)
}

template <typename S>
S log_phi2(const S& x, const S& y, const S& r)
{
    using std::log;
    const S om = 1 - r * r;
    return -(x * x - 2 * r * x * y + y * y) / (2 * om) - log(om) / 2 - 1.83787706640934548356;
}

inline double value_of(double x) { return x; }
inline double value_of(const AD& x) { return x.value(); }

} // namespace brdel::likelihood
