#define BOOST_MATH_DISABLE_FLOAT128
#include "brdel/normal.hpp"

#include <boost/math/special_functions/owens_t.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace brdel::likelihood;

namespace {

// bivariate normal cdf through Owen's T function (h, k nonzero)
double bvn_oracle(double h, double k, double rho)
{
    const double s = std::sqrt(1 - rho * rho);
    const double beta = h * k < 0 ? 0.5 : 0.0;
    return 0.5 * norm_cdf(h) + 0.5 * norm_cdf(k) - boost::math::owens_t(h, (k - rho * h) / (h * s))
           - boost::math::owens_t(k, (h - rho * k) / (k * s)) - beta;
}

} // namespace

TEST_CASE("univariate normal")
{
    CHECK(norm_cdf(0) == 0.5);
    CHECK(norm_pdf(0) == doctest::Approx(1 / std::sqrt(2 * std::numbers::pi)).epsilon(1e-15));
    CHECK(std::abs(norm_cdf(1.96) - 0.97500210485177952) < 1e-15);
    CHECK(std::abs(norm_cdf(-3) - 0.0013498980316300946) < 1e-17);
    for (double x = -8; x <= 8; x += 0.37) {
        const auto e = std_normal(x);
        CHECK(std::abs(e.cdf + e.sf - 1) <= 1e-16);
        CHECK(e.cdf == norm_cdf(x));
        CHECK(e.sf == doctest::Approx(norm_cdf(-x)).epsilon(1e-15));
    }
    // log cdf deep in the lower tail against the asymptotic Mills series
    for (double x : {-40.0, -100.0, -1000.0}) {
        const double s = 1 - 1 / (x * x) + 3 / std::pow(x, 4) - 15 / std::pow(x, 6) + 105 / std::pow(x, 8);
        const double ref = log_norm_pdf(x) - std::log(-x) + std::log(s);
        CHECK(log_norm_cdf(x) == doctest::Approx(ref).epsilon(1e-13));
    }
    CHECK(log_norm_cdf(-5) == doctest::Approx(std::log(norm_cdf(-5))).epsilon(1e-14));
    CHECK(log_norm_cdf(5) == doctest::Approx(std::log1p(-norm_sf(5))).epsilon(1e-14));
}

TEST_CASE("bivariate normal")
{
    CHECK(bvn_cdf(0, 0, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(std::abs(bvn_cdf(0, 0, 0.5) - (0.25 + std::asin(0.5) / (2 * std::numbers::pi))) < 1e-12);
    for (double k : {-2.0, 0.0, 1.3})
        for (double rho : {-0.9, 0.0, 0.7})
            CHECK(std::abs(bvn_cdf(8, k, rho) - norm_cdf(k)) < 1e-10);
    CHECK(bvn_cdf(0.3, -0.2, 1.0) == doctest::Approx(norm_cdf(-0.2)).epsilon(1e-14));
    CHECK(bvn_cdf(0.3, 0.5, -1.0) == doctest::Approx(norm_cdf(0.3) + norm_cdf(0.5) - 1).epsilon(1e-14));
    CHECK(bvn_cdf(-0.3, -0.5, -1.0) == 0);

    for (double h : {-3.0, -0.7, 0.1, 1.1, 2.5})
        for (double k : {-2.2, 0.4, 1.9})
            for (double rho : {-0.999, -0.95, -0.6, -0.1, 0.2, 0.75, 0.93, 0.95, 0.99, 0.9999}) {
                const double ref = bvn_oracle(h, k, rho);
                CHECK(std::abs(bvn_cdf(h, k, rho) - ref) < 1e-10);
                CHECK(std::abs(bvn_cdf(h, k, rho) - bvn_cdf(k, h, rho)) < 1e-14);
                if (ref > 1e-8) // the oracle cancels below this
                    CHECK(log_bvn_cdf(h, k, rho) == doctest::Approx(std::log(ref)).epsilon(1e-8));
            }
    // deep lower tail stays finite in logs
    const double lt = log_bvn_cdf(-40, -41, 0.5);
    CHECK(std::isfinite(lt));
    CHECK(lt < log_norm_cdf(-41));
    CHECK(lt > log_norm_cdf(-40) + log_norm_cdf(-41));
    CHECK(log_bvn_cdf(-40, -41, 0) == doctest::Approx(log_norm_cdf(-40) + log_norm_cdf(-41)).epsilon(1e-10));
    CHECK(bvn_pdf(0, 0, 0) == doctest::Approx(1 / (2 * std::numbers::pi)));
}

TEST_CASE("log bivariate cdf keeps relative accuracy in the tail")
{
    // the Owen's T identity in 100 digits survives the cancellation down to about e^-150
    using F = boost::multiprecision::cpp_bin_float_100;
    auto oracle = [](double hd, double kd, double rd) {
        const F h = hd, k = kd, r = rd, s = sqrt(1 - r * r);
        auto Phi = [](const F& x) { return erfc(-x / sqrt(F(2))) / 2; };
        const F beta = (h * k < 0 || (h * k == 0 && h + k < 0)) ? F(0.5) : F(0);
        const F v = Phi(h) / 2 + Phi(k) / 2 - boost::math::owens_t(h, (k - r * h) / (h * s))
                    - boost::math::owens_t(k, (h - r * k) / (k * s)) - beta;
        return static_cast<double>(log(v));
    };
    for (double h : {-3.0, -5.5, -9.0})
        for (double k : {-2.5, -4.0, 1.5})
            for (double rho : {-0.9, -0.3, 0.4, 0.8, 0.97}) {
                const double ref = oracle(h, k, rho);
                if (ref > -150)
                    CHECK(log_bvn_cdf(h, k, rho) == doctest::Approx(ref).epsilon(1e-9));
            }
}

TEST_CASE("autodiff wrappers carry the chain rule")
{
    const double h = 1e-6;
    auto fd = [&](auto f, double x) { return (f(x + h) - f(x - h)) / (2 * h); };
    for (double x : {-6.0, -1.0, 0.3, 2.0}) {
        const AD ax(x, Eigen::Vector2d(1, 0));
        CHECK(Phi(ax).derivatives()(0) == doctest::Approx(fd([](double t) { return norm_cdf(t); }, x)).epsilon(1e-6));
        CHECK(log_Phi(ax).derivatives()(0)
              == doctest::Approx(fd([](double t) { return log_norm_cdf(t); }, x)).epsilon(1e-6));
    }
    const double r = 0.4;
    const AD ah(0.2, Eigen::Vector2d(1, 0)), ak(-0.5, Eigen::Vector2d(0, 1));
    const AD v = log_Phi2(ah, ak, AD(r));
    CHECK(v.derivatives()(0)
          == doctest::Approx(fd([&](double t) { return log_bvn_cdf(t, -0.5, r); }, 0.2)).epsilon(1e-6));
    CHECK(v.derivatives()(1)
          == doctest::Approx(fd([&](double t) { return log_bvn_cdf(0.2, t, r); }, -0.5)).epsilon(1e-6));
    const AD ar(r, Eigen::Vector2d(1, 0));
    CHECK(Phi2(AD(0.2), AD(-0.5), ar).derivatives()(0)
          == doctest::Approx(fd([&](double t) { return bvn_cdf(0.2, -0.5, t); }, r)).epsilon(1e-6));
}
