#include "brdel/estimators.hpp"

#include "brdel/likelihood.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace brdel::estimators {

namespace {

double dist(const SiteMatrix& s, int i, int j) { return (s.row(i) - s.row(j)).norm(); }

void check_data(const FitData& d)
{
    if (!d.sites || d.z.size() != d.sites->rows())
        throw std::invalid_argument("fit data: values do not match sites");
}

[[noreturn]] void bad_term(const char* what, std::initializer_list<int> ids, double v)
{
    std::ostringstream os;
    os << what << ": non-finite term " << v << " at sites";
    for (int i : ids)
        os << ' ' << i;
    throw std::domain_error(os.str());
}

} // namespace

TripleTerms prepare_triples(const FitData& data, const std::vector<double>& alphas)
{
    check_data(data);
    TripleTerms t;
    const SiteMatrix& s = *data.sites;
    for (const auto& tr : data.triples) {
        const likelihood::TripleGeometry g{dist(s, tr[0], tr[1]), dist(s, tr[0], tr[2]), dist(s, tr[1], tr[2])};
        bool ok = g.d12 > 0 && g.d13 > 0 && g.d23 > 0;
        for (double a : alphas)
            ok = ok && likelihood::triangle_slack(g, a) >= likelihood::kDegenerateTol;
        if (!ok) {
            ++t.skipped_degenerate;
            continue;
        }
        t.triples.push_back(tr);
        t.lengths.push_back({g.d12, g.d13, g.d23});
    }
    return t;
}

double cl2_objective(const FitData& data, double sigma, double alpha)
{
    check_data(data);
    const SiteMatrix& s = *data.sites;
    std::vector<double> t(data.edges.size());
    for (std::size_t e = 0; e < t.size(); ++e) {
        const auto& [i, j] = data.edges[e];
        t[e] = likelihood::pair_log_density_value(dist(s, i, j), data.z(i), data.z(j), sigma, alpha);
        if (!std::isfinite(t[e]))
            bad_term("cl2_objective", {i, j}, t[e]);
    }
    return increments::pairwise_sum(t);
}

double cl3_objective(const FitData& data, const TripleTerms& terms, double sigma, double alpha)
{
    check_data(data);
    std::vector<double> t(terms.triples.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        const auto& [a, b, c] = terms.triples[k];
        const auto& L = terms.lengths[k];
        t[k] = likelihood::triple_log_density_value({L[0], L[1], L[2]}, data.z(a), data.z(b), data.z(c), sigma,
                                                    alpha);
        if (!std::isfinite(t[k]))
            bad_term("cl3_objective", {a, b, c}, t[k]);
    }
    return increments::pairwise_sum(t);
}

double cl3_objective(const FitData& data, double sigma, double alpha)
{
    return cl3_objective(data, prepare_triples(data, {alpha}), sigma, alpha);
}

std::array<double, 2> cl2_score(const FitData& data, double sigma, double alpha)
{
    check_data(data);
    const SiteMatrix& s = *data.sites;
    std::vector<double> ds(data.edges.size()), da(data.edges.size());
    for (std::size_t e = 0; e < ds.size(); ++e) {
        const auto& [i, j] = data.edges[e];
        const auto r = likelihood::pair_log_density({dist(s, i, j)}, data.z(i), data.z(j), {sigma, alpha});
        ds[e] = r.d_sigma;
        da[e] = r.d_alpha;
    }
    return {increments::pairwise_sum(ds), increments::pairwise_sum(da)};
}

std::array<double, 2> cl3_score(const FitData& data, const TripleTerms& terms, double sigma, double alpha)
{
    check_data(data);
    std::vector<double> ds(terms.triples.size()), da(terms.triples.size());
    for (std::size_t k = 0; k < ds.size(); ++k) {
        const auto& [a, b, c] = terms.triples[k];
        const auto& L = terms.lengths[k];
        const auto r = likelihood::triple_log_density({L[0], L[1], L[2]}, data.z(a), data.z(b), data.z(c),
                                                      {sigma, alpha});
        ds[k] = r.d_sigma;
        da[k] = r.d_alpha;
    }
    return {increments::pairwise_sum(ds), increments::pairwise_sum(da)};
}

namespace {

struct Objective {
    const FitData& data;
    CLObjectiveSpec spec;
    TripleTerms terms;

    Objective(const FitData& d, const CLObjectiveSpec& s) : data(d), spec(s)
    {
        if (spec.order != 2 && spec.order != 3)
            throw std::invalid_argument("composite likelihood order must be 2 or 3");
        if (!(spec.bounds.lo < spec.bounds.hi))
            throw std::invalid_argument("empty parameter bounds");
        if (spec.free == Param::sigma && !(spec.bounds.lo > 0))
            throw std::invalid_argument("sigma bounds must lie in (0, inf)");
        if (spec.free == Param::alpha && !(spec.bounds.lo > 0 && spec.bounds.hi < 2))
            throw std::invalid_argument("alpha bounds must lie in (0, 2)");
        if (spec.order == 3) {
            const auto& b = spec.bounds;
            const std::vector<double> alphas = spec.free == Param::alpha
                                                   ? std::vector<double>{b.lo, (b.lo + b.hi) / 2, b.hi}
                                                   : std::vector<double>{spec.fixed_value};
            terms = prepare_triples(data, alphas);
            if (terms.triples.empty())
                throw std::invalid_argument("no usable triples");
        } else if (data.edges.empty()) {
            throw std::invalid_argument("no edges");
        }
    }

    double operator()(double x) const
    {
        const double sigma = spec.free == Param::sigma ? x : spec.fixed_value;
        const double alpha = spec.free == Param::alpha ? x : spec.fixed_value;
        return spec.order == 2 ? cl2_objective(data, sigma, alpha) : cl3_objective(data, terms, sigma, alpha);
    }

    long skipped() const { return terms.skipped_degenerate; }
};

} // namespace

FitResult fit(const FitData& data, const CLObjectiveSpec& spec)
{
    const Objective obj(data, spec);
    const Bounds b = spec.bounds;
    const double target = 1e-6 * b.width();
    const double scale = 4 * std::max(std::abs(b.lo), std::abs(b.hi)) + 1;
    // Brent stops once b - a <= 4 tol |x| + tol with tol = 2^{1 - bits}
    int bits = static_cast<int>(std::ceil(1 - std::log2(target / scale)));
    bits = std::min(bits, std::numeric_limits<double>::digits / 2);
    const double tol = std::ldexp(1.0, 1 - bits);

    FitResult r;
    int evals = 0;
    auto neg = [&](double x) {
        ++evals;
        return -obj(x);
    };
    const std::uintmax_t max_iter_start = 500;
    std::uintmax_t iters = max_iter_start;
    const auto [x, fx] = boost::math::tools::brent_find_minima(neg, b.lo, b.hi, bits, iters);
    r.estimate = x;
    r.objective_at_optimum = -fx;
    r.evaluations = evals;
    r.tolerance = target;
    r.bracket_width_final = 4 * tol * std::abs(x) + tol;
    r.skipped_terms = obj.skipped();
    r.at_boundary = x - b.lo <= 10 * target || b.hi - x <= 10 * target;
    r.converged = iters < max_iter_start && !r.at_boundary;
    return r;
}

FitResult fit_sigma(int order, const FitData& data, double alpha0, Bounds bounds)
{
    return fit(data, {order, Param::sigma, alpha0, bounds});
}

FitResult fit_alpha(int order, const FitData& data, double sigma0, Bounds bounds)
{
    return fit(data, {order, Param::alpha, sigma0, bounds});
}

GridScan grid_scan(const FitData& data, const CLObjectiveSpec& spec, int points)
{
    if (points < 2)
        throw std::invalid_argument("grid_scan: need at least two points");
    const Objective obj(data, spec);
    GridScan g;
    g.x.resize(points);
    g.value.resize(points);
    for (int i = 0; i < points; ++i) {
        g.x[i] = spec.bounds.lo + spec.bounds.width() * i / (points - 1);
        g.value[i] = obj(g.x[i]);
        if (g.value[i] > g.value[g.argmax])
            g.argmax = static_cast<std::size_t>(i);
    }
    for (std::size_t i = 1; i < g.value.size(); ++i) {
        const bool rising = i <= g.argmax;
        if (rising ? g.value[i] < g.value[i - 1] : g.value[i] > g.value[i - 1])
            g.unimodal = false;
    }
    return g;
}

double rate_normalization(int order, Param param, double N, long edge_count, double alpha0)
{
    if (order != 2 && order != 3)
        throw std::invalid_argument("rate_normalization: order must be 2 or 3");
    double c = order == 2 ? std::sqrt(3.0) / 3 : std::sqrt(2.0) / 2;
    if (param == Param::alpha)
        c /= 2;
    double v = c * std::sqrt(static_cast<double>(edge_count)) * std::pow(N, -(2 - alpha0) / 4);
    if (param == Param::alpha)
        v *= std::log(N);
    return v;
}

RateDiagnostic rate_diagnostics(const FitResult& fit, int order, Param param, double N, long edge_count,
                                double sigma0, double alpha0, const increments::AsymptoticConstants* constants,
                                std::optional<double> localtime)
{
    RateDiagnostic d;
    d.N = N;
    d.alpha0 = alpha0;
    d.sigma0 = sigma0;
    d.order = order;
    d.param = param;
    d.normalization = rate_normalization(order, param, N, edge_count, alpha0);
    const double err = param == Param::sigma ? fit.estimate * fit.estimate - sigma0 * sigma0 : fit.estimate - alpha0;
    d.normalized_error = d.normalization * err;
    if (constants && localtime) {
        const double c = order == 2 ? constants->c_v2 : constants->c_v3;
        const double limit = c * sigma0 * *localtime;
        d.predicted_limit = param == Param::sigma ? sigma0 * sigma0 * limit : -limit;
    }
    return d;
}

} // namespace brdel::estimators
