#include "brdel/normal.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace brdel::likelihood {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Upper orthant P[X > dh, Y > dk] (Genz, "Numerical computation of
// rectangular bivariate and trivariate normal and t probabilities").
double bvnu(double dh, double dk, double r)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (dh == inf || dk == inf)
        return 0;
    if (dh == -inf)
        return dk == -inf ? 1 : norm_sf(dk);
    if (dk == -inf)
        return norm_sf(dh);
    if (r == 0)
        return norm_sf(dh) * norm_sf(dk);

    static constexpr std::array<double, 3> w6{0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
    static constexpr std::array<double, 3> x6{0.9324695142031522, 0.6612093864662647, 0.2386191860831970};
    static constexpr std::array<double, 6> w12{0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                                               0.2031674267230659, 0.2334925365383547, 0.2491470458134029};
    static constexpr std::array<double, 6> x12{0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
                                               0.5873179542866171, 0.3678314989981802, 0.1252334085114692};
    static constexpr std::array<double, 10> w20{0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                                                0.08327674157670475, 0.1019301198172404, 0.1181945319615184,
                                                0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
                                                0.1527533871307259};
    static constexpr std::array<double, 10> x20{0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
                                                0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
                                                0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
                                                0.07652652113349733};
    const double* w;
    const double* x;
    int lg;
    if (std::abs(r) < 0.3) {
        w = w6.data(), x = x6.data(), lg = 3;
    } else if (std::abs(r) < 0.75) {
        w = w12.data(), x = x12.data(), lg = 6;
    } else {
        w = w20.data(), x = x20.data(), lg = 10;
    }

    const double tp = 2 * std::numbers::pi;
    double h = dh, k = dk, hk = h * k, bvn = 0;
    if (std::abs(r) < 0.925) {
        const double hs = (h * h + k * k) / 2, asr = std::asin(r) / 2;
        for (int i = 0; i < lg; ++i)
            for (int sgn : {-1, 1}) {
                const double sn = std::sin(asr * (1 + sgn * x[i]));
                bvn += w[i] * std::exp((sn * hk - hs) / (1 - sn * sn));
            }
        bvn = bvn * asr / tp + norm_sf(h) * norm_sf(k);
    } else {
        if (r < 0) {
            k = -k;
            hk = -hk;
        }
        if (std::abs(r) < 1) {
            const double as = 1 - r * r;
            double a = std::sqrt(as);
            const double bs = (h - k) * (h - k);
            const double c = (4 - hk) / 8, d = (12 - hk) / 16;
            double asr = -(bs / as + hk) / 2;
            if (asr > -100)
                bvn = a * std::exp(asr) * (1 - c * (bs - as) * (1 - d * bs / 5) / 3 + c * d * as * as / 5);
            if (hk > -100) {
                const double b = std::sqrt(bs);
                const double sp = std::sqrt(tp) * norm_sf(b / a);
                bvn -= std::exp(-hk / 2) * sp * b * (1 - c * bs * (1 - d * bs / 5) / 3);
            }
            a /= 2;
            for (int i = 0; i < lg; ++i)
                for (int sgn : {-1, 1}) {
                    const double xs = std::pow(a * (1 + sgn * x[i]), 2);
                    asr = -(bs / xs + hk) / 2;
                    if (asr > -100) {
                        const double sp = 1 + c * xs * (1 + d * xs);
                        const double rs = std::sqrt(1 - xs);
                        const double ep = std::exp(-hk * (1 - rs) / (2 * (1 + rs))) / rs;
                        bvn += a * w[i] * std::exp(asr) * (ep - sp);
                    }
                }
            bvn = -bvn / tp;
        }
        if (r > 0) {
            bvn += norm_sf(std::max(h, k));
        } else if (h >= k) {
            bvn = -bvn;
        } else {
            const double L = h < 0 ? norm_cdf(k) - norm_cdf(h) : norm_sf(h) - norm_sf(k);
            bvn = L - bvn;
        }
    }
    return std::clamp(bvn, 0.0, 1.0);
}

} // namespace

double norm_pdf(double x) { return std::exp(-x * x / 2 - kLogSqrt2Pi); }

double norm_cdf(double x) { return x < 0 ? 0.5 * std::erfc(-x * kInvSqrt2) : 1 - 0.5 * std::erfc(x * kInvSqrt2); }

double norm_sf(double x) { return x >= 0 ? 0.5 * std::erfc(x * kInvSqrt2) : 1 - 0.5 * std::erfc(-x * kInvSqrt2); }

NormalEval std_normal(double x)
{
    const double tail = 0.5 * std::erfc(std::abs(x) * kInvSqrt2);
    if (x >= 0)
        return {norm_pdf(x), 1 - tail, tail};
    return {norm_pdf(x), tail, 1 - tail};
}

double log_norm_pdf(double x) { return -x * x / 2 - kLogSqrt2Pi; }

double log_norm_cdf(double x)
{
    if (x > -30)
        return x > 5 ? std::log1p(-norm_sf(x)) : std::log(norm_cdf(x));
    // Mills-ratio asymptotics
    const double t = 1 / (x * x);
    const double series = 1 - t * (1 - 3 * t * (1 - 5 * t * (1 - 7 * t)));
    return -x * x / 2 - std::log(-x) - kLogSqrt2Pi + std::log(series);
}

double bvn_cdf(double h, double k, double rho)
{
    if (rho >= 1)
        return norm_cdf(std::min(h, k));
    if (rho <= -1)
        return std::max(0.0, norm_cdf(h) + norm_cdf(k) - 1);
    return bvnu(-h, -k, rho);
}

double log_bvn_cdf(double h, double k, double rho)
{
    const double v = bvn_cdf(h, k, rho);
    // Genz is accurate in absolute terms only; below this the log needs
    // relative accuracy, so integrate phi(x) Phi((b - rho x)/s) over x < a
    if (v > 1e-6 || std::isinf(h) || std::isinf(k) || std::abs(rho) >= 1)
        return std::log(v);
    const double a = std::min(h, k), b = std::max(h, k);
    const double s = std::sqrt((1 - rho) * (1 + rho));
    auto g = [&](double x) { return log_norm_pdf(x) + log_norm_cdf((b - rho * x) / s); };
    auto dg = [&](double x) {
        const double t = (b - rho * x) / s;
        return -x - rho / s * std::exp(log_norm_pdf(t) - log_norm_cdf(t));
    };
    // g is concave: locate its maximum on (-inf, a]
    double mode = a;
    if (dg(a) < 0) {
        double lo = a - 1;
        for (double step = 1; dg(lo) < 0; step *= 2)
            lo -= step;
        double hi = a;
        for (int i = 0; i < 200 && hi - lo > 1e-12 * (1 + std::abs(hi)); ++i) {
            const double m = 0.5 * (lo + hi);
            (dg(m) < 0 ? hi : lo) = m;
        }
        mode = 0.5 * (lo + hi);
    }
    const double gmax = g(mode);
    double left = mode - 1e-3;
    for (double step = 1e-3; g(left) > gmax - 60; step *= 2)
        left -= step;
    auto f = [&](double x) { return std::exp(g(x) - gmax); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double I = GK::integrate(f, left, mode, 15, 1e-13);
    if (mode < a)
        I += GK::integrate(f, mode, a, 15, 1e-13);
    return gmax + std::log(I);
}

double bvn_pdf(double x, double y, double rho)
{
    const double om = 1 - rho * rho;
    return std::exp(-(x * x - 2 * rho * x * y + y * y) / (2 * om)) / (2 * std::numbers::pi * std::sqrt(om));
}

} // namespace brdel::likelihood
