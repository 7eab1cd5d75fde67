#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace testsupport {

// sup |F_n - F| for a continuous reference F
inline double ks_distance(std::vector<double> x, const std::function<double(double)>& cdf)
{
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, std::abs((i + 1) / n - f), std::abs(f - i / n)});
    }
    return d;
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        const double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= t)
            ++i;
        while (j < b.size() && b[j] <= t)
            ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

// c(alpha) sqrt((n+m)/(n m)) critical value of the two-sample test
inline double ks_two_sample_critical(std::size_t n, std::size_t m, double c = 1.628)
{
    return c * std::sqrt(double(n + m) / (double(n) * m));
}

struct Moments {
    double mean = 0, var = 0, skew = 0, kurt = 0;
};

inline Moments moments(const std::vector<double>& x)
{
    Moments m;
    const double n = static_cast<double>(x.size());
    m.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double v : x) {
        const double d = v - m.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    m.var = m2 * n / (n - 1);
    m.skew = m3 / std::pow(m2, 1.5);
    m.kurt = m4 / (m2 * m2);
    return m;
}

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

} // namespace testsupport
