#include "brdel/gaussfield.hpp"

#include <limits>
#include <random>
#include <sstream>

namespace brdel::gaussfield {

void ModelParams::validate() const
{
    if (!(sigma > 0) || !std::isfinite(sigma))
        throw std::invalid_argument("sigma must be > 0");
    if (!(alpha > 0 && alpha < 2))
        throw std::invalid_argument("alpha must lie in (0, 2)");
}

namespace {

std::string closest_pair_report(const SiteMatrix& s)
{
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index bi = 0, bj = 0;
    for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index j = i + 1; j < s.rows(); ++j) {
            const double d = (s.row(i) - s.row(j)).norm();
            if (d < best) {
                best = d;
                bi = i;
                bj = j;
            }
        }
    std::ostringstream os;
    os << "closest site pair " << bi << ", " << bj << " at distance " << best;
    return os.str();
}

} // namespace

CovFactor factorize(std::shared_ptr<const SiteMatrix> sites, const ModelParams& p)
{
    p.validate();
    CovFactor f;
    f.sites = sites;
    const Eigen::Index n = sites->rows();
    std::vector<int> keep;
    keep.reserve(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (sites->row(i).isZero(0)) {
            if (f.origin >= 0)
                throw std::invalid_argument("factorize: duplicate origin site");
            f.origin = static_cast<int>(i);
        } else {
            keep.push_back(static_cast<int>(i));
        }
    }
    f.free_index = Eigen::Map<Eigen::VectorXi>(keep.data(), static_cast<Eigen::Index>(keep.size()));
    const SiteMatrix free_sites = (*sites)(f.free_index, Eigen::all);

    const double ladder[] = {0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8};
    for (double rel : ladder) {
        f.lower = fbm_covariance(free_sites, p);
        const double scale = f.lower.rows() ? f.lower.trace() / static_cast<double>(f.lower.rows()) : 0.0;
        f.jitter = rel * scale;
        f.lower.diagonal().array() += f.jitter;
        Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(f.lower);
        if (llt.info() == Eigen::Success)
            return f;
    }
    throw IllConditioned("fbm covariance not positive definite after jitter 1e-8 x trace scale; "
                         + closest_pair_report(free_sites));
}

Eigen::MatrixXd standard_normal(Philox& rng, Eigen::Index rows, Eigen::Index cols)
{
    std::normal_distribution<double> nd;
    Eigen::MatrixXd z(rows, cols);
    double* p = z.data();
    for (Eigen::Index k = 0; k < rows * cols; ++k)
        p[k] = nd(rng);
    return z;
}

Eigen::MatrixXd draw(const CovFactor& f, Philox& rng, Eigen::Index count)
{
    const Eigen::Index m = f.free_index.size();
    Eigen::MatrixXd z = standard_normal(rng, m, count);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(f.size(), count);
    if (m > 0)
        w(f.free_index, Eigen::all) = f.lower.triangularView<Eigen::Lower>() * z;
    return w;
}

Eigen::Index FieldValues::index_of(const Point2& x) const
{
    for (Eigen::Index i = 0; i < sites->rows(); ++i)
        if (sites->row(i).transpose() == x)
            return i;
    std::ostringstream os;
    os << "site (" << x.x() << ", " << x.y() << ") not in field";
    throw std::out_of_range(os.str());
}

FieldValues simulate_fbm(const CovFactor& f, const ModelParams& p, const SeedRecord& seed)
{
    Philox rng = seed.engine();
    return {f.sites, draw(f, rng, 1).col(0), p, seed};
}

FieldValues simulate_fbm(std::shared_ptr<const SiteMatrix> sites, const ModelParams& p, const SeedRecord& seed)
{
    return simulate_fbm(factorize(std::move(sites), p), p, seed);
}

double increment_u(const FieldValues& fv, Eigen::Index i1, Eigen::Index i2)
{
    const double d = (fv.sites->row(i2) - fv.sites->row(i1)).norm();
    if (!(d > 0))
        throw std::invalid_argument("increment_u: coincident sites");
    const double diff = fv.values(i2) - fv.values(i1);
    return diff / (fv.params.sigma * std::pow(d, fv.params.alpha / 2));
}

double increment_u(const FieldValues& fv, const Point2& x1, const Point2& x2)
{
    return increment_u(fv, fv.index_of(x1), fv.index_of(x2));
}

FieldValues pointwise_max(const FieldValues& a, const FieldValues& b)
{
    if (a.sites != b.sites && (a.sites->rows() != b.sites->rows() || *a.sites != *b.sites))
        throw std::invalid_argument("pointwise_max: site lists differ");
    if (a.params.sigma != b.params.sigma || a.params.alpha != b.params.alpha)
        throw std::invalid_argument("pointwise_max: parameters differ");
    return {a.sites, a.values.cwiseMax(b.values), a.params, a.seed};
}

} // namespace brdel::gaussfield
