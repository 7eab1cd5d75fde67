#pragma once

#include "brdel/geometry.hpp"
#include "brdel/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace brdel::gaussfield {

using geometry::Point2;
using geometry::SiteMatrix;

struct ModelParams {
    double sigma = 1.0;
    double alpha = 0.5;

    void validate() const;
    double hurst() const { return alpha / 2; }
    template <typename Scalar>
    Scalar gamma(const Scalar& r) const
    {
        using std::pow;
        return sigma * sigma * pow(r, alpha) / 2;
    }
};

// sigma^2 (|x1|^a + |x2|^a - |x1 - x2|^a) / 2
template <typename Scalar>
Scalar fbm_cov(const Eigen::Matrix<Scalar, 2, 1>& x1, const Eigen::Matrix<Scalar, 2, 1>& x2,
               const Scalar& sigma, const Scalar& alpha)
{
    using std::pow;
    auto rpow = [&](const Scalar& r2) { return r2 > Scalar(0) ? pow(r2, alpha / 2) : Scalar(0); };
    return sigma * sigma * (rpow(x1.squaredNorm()) + rpow(x2.squaredNorm()) - rpow((x1 - x2).squaredNorm())) / 2;
}

inline double fbm_cov(const Point2& x1, const Point2& x2, const ModelParams& p)
{
    return fbm_cov<double>(x1, x2, p.sigma, p.alpha);
}

// Dense covariance of the sites (rows of `sites`).
template <typename Derived>
Eigen::MatrixXd fbm_covariance(const Eigen::MatrixBase<Derived>& sites, const ModelParams& p)
{
    const Eigen::Index n = sites.rows();
    const double h = p.alpha / 2, s2 = p.sigma * p.sigma / 2;
    Eigen::VectorXd rad(n);
    for (Eigen::Index i = 0; i < n; ++i)
        rad(i) = std::pow(sites.row(i).squaredNorm(), h);
    Eigen::MatrixXd c(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j; i < n; ++i) {
            const double d2 = (sites.row(i) - sites.row(j)).squaredNorm();
            c(i, j) = s2 * (rad(i) + rad(j) - (d2 > 0 ? std::pow(d2, h) : 0.0));
        }
    for (Eigen::Index j = 1; j < n; ++j)
        for (Eigen::Index i = 0; i < j; ++i)
            c(i, j) = c(j, i);
    return c;
}

struct IllConditioned : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lower Cholesky factor over the sites other than the origin; the origin, if
// present, is pinned to 0.
struct CovFactor {
    std::shared_ptr<const SiteMatrix> sites;
    Eigen::MatrixXd lower;           // only the lower triangle is meaningful
    Eigen::VectorXi free_index;      // row of `sites` for each factor row
    int origin = -1;
    double jitter = 0;               // absolute ridge added to the diagonal

    Eigen::Index size() const { return sites->rows(); }
};

CovFactor factorize(std::shared_ptr<const SiteMatrix> sites, const ModelParams& p);

// Standard normal matrix filled column by column from the engine.
Eigen::MatrixXd standard_normal(Philox& rng, Eigen::Index rows, Eigen::Index cols);

// `count` independent field paths, one per column, origin pinned to 0.
Eigen::MatrixXd draw(const CovFactor& f, Philox& rng, Eigen::Index count = 1);

struct FieldValues {
    std::shared_ptr<const SiteMatrix> sites;
    Eigen::VectorXd values;
    ModelParams params;
    SeedRecord seed;

    Eigen::Index index_of(const Point2& x) const;
};

FieldValues simulate_fbm(std::shared_ptr<const SiteMatrix> sites, const ModelParams& p, const SeedRecord& seed);
FieldValues simulate_fbm(const CovFactor& f, const ModelParams& p, const SeedRecord& seed);

// sigma^{-1} d^{-alpha/2} (W(x2) - W(x1))
double increment_u(const FieldValues& fv, Eigen::Index i1, Eigen::Index i2);
double increment_u(const FieldValues& fv, const Point2& x1, const Point2& x2);

FieldValues pointwise_max(const FieldValues& a, const FieldValues& b);

} // namespace brdel::gaussfield
