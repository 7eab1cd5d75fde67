#pragma once

#include "brdel/gaussfield.hpp"
#include "brdel/normal.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace brdel::likelihood {

using gaussfield::ModelParams;

struct PairGeometry {
    double d = 1;
};

struct TripleGeometry {
    double d12 = 1, d13 = 1, d23 = 1;
};

struct DegenerateTriangle : std::domain_error {
    using std::domain_error::domain_error;
};

constexpr double kDegenerateTol = 1e-8;

// AutoDiff math returns expression scalars; these pin the result type.
template <typename S>
S sexp(const S& x)
{
    using std::exp;
    return S(exp(x));
}

template <typename S>
S slog(const S& x)
{
    using std::log;
    return S(log(x));
}

template <typename S>
S ssqrt(const S& x)
{
    using std::sqrt;
    return S(sqrt(x));
}

template <typename S>
S dpow(double d, const S& e)
{
    return sexp(S(e * std::log(d)));
}

// Correlations R1, R2, R3 of the normalized increments anchored at each vertex.
template <typename S>
std::array<S, 3> triangle_correlations(const TripleGeometry& g, const S& alpha)
{
    const S p12 = dpow(g.d12, alpha), p13 = dpow(g.d13, alpha), p23 = dpow(g.d23, alpha);
    const S h = alpha / 2;
    return {(p12 + p13 - p23) / (2 * dpow(g.d12 * g.d13, h)), (p12 + p23 - p13) / (2 * dpow(g.d12 * g.d23, h)),
            (p13 + p23 - p12) / (2 * dpow(g.d13 * g.d23, h))};
}

double triangle_slack(const TripleGeometry& g, double alpha); // min_i (1 - |R_i|)

struct ExponentEval {
    double value = 0;
    std::array<double, 3> dz{};    // V_1, V_2, V_3
    std::array<double, 4> mixed{}; // V_12, V_13, V_23, V_123
    double d_sigma = 0;
    double d_alpha = 0;
};

struct LogDensityEval {
    double log_f = 0;
    double d_sigma = 0;
    double d_alpha = 0;
};

// ---- pairs -------------------------------------------------------------

// log f for the pair with a = sigma d^{alpha/2}; generic in the scalar so the
// same code yields values and (sigma, alpha) scores.
template <typename S>
S pair_log_density_a(const S& a, double z1, double z2)
{
    using std::exp;
    using std::log;
    using std::max;
    const double lr = std::log(z2 / z1);
    const S q1 = a / 2 + lr / a;
    const S q2 = a / 2 - lr / a;
    const double l1 = std::log(z1), l2 = std::log(z2);
    const S V = Phi(q1) / z1 + Phi(q2) / z2;
    // V1 V2 and -V12, both positive
    const S t1 = log_Phi(q1) + log_Phi(q2) - 2 * l1 - 2 * l2;
    const S t2 = log_phi(q1) - slog(a) - 2 * l1 - l2;
    const S m = value_of(t1) > value_of(t2) ? t1 : t2;
    return -V + m + slog(S(sexp(S(t1 - m)) + sexp(S(t2 - m))));
}

template <typename S>
S pair_log_density_t(double d, double z1, double z2, const S& sigma, const S& alpha)
{
    return pair_log_density_a(S(sigma * dpow(d, S(alpha / 2))), z1, z2);
}

ExponentEval pair_exponent(const PairGeometry& g, double z1, double z2, const ModelParams& p);
LogDensityEval pair_log_density(const PairGeometry& g, double z1, double z2, const ModelParams& p);
double pair_log_density_value(double d, double z1, double z2, double sigma, double alpha);

double marginal_u_cdf(double u, const PairGeometry& g, const ModelParams& p);
double conditional_u_cdf(double u, const PairGeometry& g, const ModelParams& p, double eta1);

// ---- triples -----------------------------------------------------------

template <typename S>
struct TripleCore {
    S a12, a13, a23;
    std::array<S, 3> R;
    S A1, B1, A2, B2, A3, B3;
};

template <typename S>
TripleCore<S> triple_core(const TripleGeometry& g, double z1, double z2, double z3, const S& sigma,
                          const S& alpha)
{
    TripleCore<S> c;
    const S h = alpha / 2;
    c.a12 = sigma * dpow(g.d12, h);
    c.a13 = sigma * dpow(g.d13, h);
    c.a23 = sigma * dpow(g.d23, h);
    c.R = triangle_correlations(g, alpha);
    const S u12 = std::log(z2 / z1) / c.a12;
    const S u13 = std::log(z3 / z1) / c.a13;
    const S u23 = std::log(z3 / z2) / c.a23;
    c.A1 = c.a12 / 2 + u12;
    c.B1 = c.a13 / 2 + u13;
    c.A2 = c.a12 / 2 - u12;
    c.B2 = c.a23 / 2 + u23;
    c.A3 = c.a13 / 2 - u13;
    c.B3 = c.a23 / 2 - u23;
    return c;
}

template <typename S>
S triple_V(const TripleCore<S>& c, double z1, double z2, double z3)
{
    return Phi2(c.A1, c.B1, c.R[0]) / z1 + Phi2(c.A2, c.B2, c.R[1]) / z2 + Phi2(c.A3, c.B3, c.R[2]) / z3;
}

// f = e^{-V} (-V123 + V1 V23 + V2 V13 + V3 V12 - V1 V2 V3); every summand is
// positive, so the bracket is accumulated in the log domain.
template <typename S>
S triple_log_density_t(const TripleGeometry& g, double z1, double z2, double z3, const S& sigma, const S& alpha)
{
    using std::exp;
    using std::log;
    using std::sqrt;
    const TripleCore<S> c = triple_core(g, z1, z2, z3, sigma, alpha);
    const double l1 = std::log(z1), l2 = std::log(z2), l3 = std::log(z3);
    const S s1 = ssqrt(S(1 - c.R[0] * c.R[0]));
    const S s2 = ssqrt(S(1 - c.R[1] * c.R[1]));
    const S la12 = slog(c.a12), la13 = slog(c.a13), la23 = slog(c.a23);

    const S lP1 = log_Phi2(c.A1, c.B1, c.R[0]) - 2 * l1; // log(-V1)
    const S lP2 = log_Phi2(c.A2, c.B2, c.R[1]) - 2 * l2;
    const S lP3 = log_Phi2(c.A3, c.B3, c.R[2]) - 2 * l3;
    const S lV12 = log_phi(c.A1) + log_Phi((c.B1 - c.R[0] * c.A1) / s1) - la12 - 2 * l1 - l2;
    const S lV13 = log_phi(c.B1) + log_Phi((c.A1 - c.R[0] * c.B1) / s1) - la13 - 2 * l1 - l3;
    const S lV23 = log_phi(c.B2) + log_Phi((c.A2 - c.R[1] * c.B2) / s2) - la23 - 2 * l2 - l3;
    const S lV123 = log_phi2(c.A1, c.B1, c.R[0]) - la12 - la13 - 2 * l1 - l2 - l3;

    const std::array<S, 5> t{lV123, lP1 + lV23, lP2 + lV13, lP3 + lV12, lP1 + lP2 + lP3};
    S m = t[0];
    for (const S& x : t)
        if (value_of(x) > value_of(m))
            m = x;
    S acc = S(0) * m;
    for (const S& x : t)
        acc += sexp(S(x - m));
    return -triple_V(c, z1, z2, z3) + m + slog(acc);
}

ExponentEval triple_exponent(const TripleGeometry& g, double z1, double z2, double z3, const ModelParams& p);
LogDensityEval triple_log_density(const TripleGeometry& g, double z1, double z2, double z3, const ModelParams& p);
double triple_log_density_value(const TripleGeometry& g, double z1, double z2, double z3, double sigma,
                                double alpha);

// P[U12 <= u2, U13 <= u3]
double pair_u_cdf(double u2, double u3, const TripleGeometry& g, const ModelParams& p);

// throws DegenerateTriangle when min_i(1 - |R_i|) < kDegenerateTol
void check_triangle(const TripleGeometry& g, double alpha);

} // namespace brdel::likelihood
