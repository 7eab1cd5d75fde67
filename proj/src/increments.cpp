#include "brdel/increments.hpp"

#include "brdel/likelihood.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace brdel::increments {

double pairwise_sum(const double* x, std::size_t n)
{
    if (n <= 16) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i)
            s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

IncrementStat v2_stat(const std::vector<double>& u)
{
    if (u.empty())
        throw std::invalid_argument("v2_stat: no increments");
    std::vector<double> t(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        t[i] = H2(u[i]);
    const auto n = static_cast<long>(u.size());
    return {Kind::pair, pairwise_sum(t) / std::sqrt(static_cast<double>(n)), n, 0};
}

IncrementStat v3_stat(const std::vector<TripleEntry>& entries, long skipped_degenerate)
{
    if (entries.empty())
        throw std::invalid_argument("v3_stat: no triples");
    std::vector<double> t(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const TripleEntry& e = entries[i];
        if (!(std::abs(e.R) < 1))
            throw std::domain_error("v3_stat: |R| >= 1 reached the statistic");
        t[i] = quadratic_form(e.u12, e.u13, e.R) - 2;
    }
    const auto n = static_cast<long>(entries.size());
    return {Kind::triple, pairwise_sum(t) / std::sqrt(static_cast<double>(n)), n, skipped_degenerate};
}

double triangle_r(double d12, double d13, double d23, double alpha)
{
    return likelihood::triangle_correlations<double>({d12, d13, d23}, alpha)[0];
}

namespace {

double dist(const SiteMatrix& s, int i, int j) { return (s.row(i) - s.row(j)).norm(); }

double scale(const ModelParams& p, double d) { return p.sigma * std::pow(d, p.alpha / 2); }

struct TripleGeom {
    double s12, s13, R;
};

// Geometry of each triangle; degenerate ones come back with R = NaN.
std::vector<TripleGeom> triple_geometry(const SiteMatrix& sites, const std::vector<std::array<int, 3>>& triples,
                                        const ModelParams& p)
{
    std::vector<TripleGeom> g(triples.size());
    for (std::size_t t = 0; t < triples.size(); ++t) {
        const auto& [a, b, c] = triples[t];
        const double d12 = dist(sites, a, b), d13 = dist(sites, a, c), d23 = dist(sites, b, c);
        const likelihood::TripleGeometry tg{d12, d13, d23};
        const double R = triangle_r(d12, d13, d23, p.alpha);
        const bool degenerate = !(d12 > 0 && d13 > 0 && d23 > 0)
                                || !(likelihood::triangle_slack(tg, p.alpha) >= likelihood::kDegenerateTol);
        g[t] = {scale(p, d12), scale(p, d13), degenerate ? std::nan("") : R};
    }
    return g;
}

} // namespace

std::vector<double> edge_increments(const SiteMatrix& sites, const Eigen::VectorXd& values,
                                    const std::vector<std::array<int, 2>>& edges, const ModelParams& p)
{
    std::vector<double> u(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& [a, b] = edges[e];
        u[e] = (values(b) - values(a)) / scale(p, dist(sites, a, b));
    }
    return u;
}

std::vector<TripleEntry> triple_increments(const SiteMatrix& sites, const Eigen::VectorXd& values,
                                           const std::vector<std::array<int, 3>>& triples, const ModelParams& p,
                                           long* skipped)
{
    const auto g = triple_geometry(sites, triples, p);
    std::vector<TripleEntry> out;
    out.reserve(triples.size());
    long skip = 0;
    for (std::size_t t = 0; t < triples.size(); ++t) {
        if (std::isnan(g[t].R)) {
            ++skip;
            continue;
        }
        const auto& [a, b, c] = triples[t];
        out.push_back({(values(b) - values(a)) / g[t].s12, (values(c) - values(a)) / g[t].s13, g[t].R});
    }
    if (skipped)
        *skipped = skip;
    return out;
}

IncrementStat v2_field(const SiteMatrix& sites, const Eigen::VectorXd& values,
                       const std::vector<std::array<int, 2>>& edges, const ModelParams& p)
{
    return v2_stat(edge_increments(sites, values, edges, p));
}

IncrementStat v3_field(const SiteMatrix& sites, const Eigen::VectorXd& values,
                       const std::vector<std::array<int, 3>>& triples, const ModelParams& p)
{
    long skipped = 0;
    const auto e = triple_increments(sites, values, triples, p, &skipped);
    return v3_stat(e, skipped);
}

// ---- decompositions ------------------------------------------------------

double psi_f(FKind f, double x, double y, double w)
{
    auto fv = [f](double u) { return f == FKind::H2 ? H2(u) : u; };
    double r = 0;
    if (x - y <= w && w <= 0)
        r += fv(y + w) - fv(x);
    if (0 <= w && w <= x - y)
        r += fv(x - w) - fv(y);
    return r;
}

double omega(double u1, double v1, double u2, double v2, double w1, double w2, double R)
{
    if (!(std::abs(R) < 1))
        throw std::domain_error("omega: |R| must be < 1");
    const double om = 1 - R * R;
    const double pi1 = psi_f(FKind::I, u1, v1, w1), pi2 = psi_f(FKind::I, u2, v2, w2);
    double r = (psi_f(FKind::H2, u1, v1, w1) + psi_f(FKind::H2, u2, v2, w2)) / om;
    r -= 2 * R / om * pi1 * pi2;
    if (w1 < 0)
        r -= 2 * R / om * (u1 * pi2 + u2 * pi1);
    if (w1 > 0)
        r -= 2 * R / om * (v1 * pi2 + v2 * pi1);
    return r;
}

namespace {

void check_pair(const FieldValues& f1, const FieldValues& f2)
{
    if (f1.sites->rows() != f2.sites->rows() || (f1.sites != f2.sites && *f1.sites != *f2.sites))
        throw std::invalid_argument("decompose: fields live on different sites");
}

[[noreturn]] void tie(int site)
{
    throw TieAtAnchor("decompose: W2 - W1 vanishes at anchor site " + std::to_string(site));
}

} // namespace

DecompositionParts decompose_v2(const FieldValues& f1, const FieldValues& f2,
                                const std::vector<std::array<int, 2>>& edges, const ModelParams& p)
{
    check_pair(f1, f2);
    if (edges.empty())
        throw std::invalid_argument("decompose_v2: no edges");
    const SiteMatrix& s = *f1.sites;
    const std::size_t n = edges.size();
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n);
    for (std::size_t e = 0; e < n; ++e) {
        const auto& [i, j] = edges[e];
        const double sc = scale(p, dist(s, i, j));
        const double u = (f1.values(j) - f1.values(i)) / sc;
        const double v = (f2.values(j) - f2.values(i)) / sc;
        const double w = f2.values(i) - f1.values(i);
        if (w == 0)
            tie(i);
        if (w < 0)
            a[e] = H2(u);
        else
            b[e] = H2(v);
        c[e] = psi_f(FKind::H2, u, v, w / sc);
    }
    const double norm = std::sqrt(static_cast<double>(n));
    return {pairwise_sum(a) / norm, pairwise_sum(b) / norm, pairwise_sum(c) / norm, static_cast<long>(n), 0};
}

DecompositionParts decompose_v3(const FieldValues& f1, const FieldValues& f2,
                                const std::vector<std::array<int, 3>>& triples, const ModelParams& p)
{
    check_pair(f1, f2);
    const SiteMatrix& s = *f1.sites;
    const auto g = triple_geometry(s, triples, p);
    std::vector<double> a, b, c;
    a.reserve(triples.size());
    b.reserve(triples.size());
    c.reserve(triples.size());
    long skipped = 0;
    for (std::size_t t = 0; t < triples.size(); ++t) {
        if (std::isnan(g[t].R)) {
            ++skipped;
            continue;
        }
        const auto& [i, j, k] = triples[t];
        const double R = g[t].R;
        const double u1 = (f1.values(j) - f1.values(i)) / g[t].s12;
        const double v1 = (f2.values(j) - f2.values(i)) / g[t].s12;
        const double u2 = (f1.values(k) - f1.values(i)) / g[t].s13;
        const double v2 = (f2.values(k) - f2.values(i)) / g[t].s13;
        const double w = f2.values(i) - f1.values(i);
        if (w == 0)
            tie(i);
        a.push_back(w < 0 ? quadratic_form(u1, u2, R) - 2 : 0.0);
        b.push_back(w > 0 ? quadratic_form(v1, v2, R) - 2 : 0.0);
        c.push_back(omega(u1, v1, u2, v2, w / g[t].s12, w / g[t].s13, R));
    }
    if (a.empty())
        throw std::invalid_argument("decompose_v3: no usable triples");
    const double norm = std::sqrt(static_cast<double>(a.size()));
    return {pairwise_sum(a) / norm, pairwise_sum(b) / norm, pairwise_sum(c) / norm, static_cast<long>(a.size()),
            skipped};
}

// ---- local times ---------------------------------------------------------

// Kernel sums restricted to a cell cover are biased by O(sqrt(eps)) where the
// cover cuts the kernel off; the Poisson-site quadrature has variance
// O(1 / (N sqrt(eps))). Balancing the two gives eps ~ N^{-2/3}.
double default_epsilon(double intensity, double /*alpha*/) { return std::pow(intensity, -2.0 / 3); }

LocalTimeEstimate local_time_zero(const Eigen::VectorXd& values, const Eigen::VectorXd& weights, double epsilon,
                                  const std::vector<char>& mask)
{
    if (!(epsilon > 0))
        throw std::invalid_argument("local_time_zero: epsilon must be > 0");
    if (weights.size() != values.size() || (!mask.empty() && mask.size() != static_cast<std::size_t>(values.size())))
        throw std::invalid_argument("local_time_zero: size mismatch");
    LocalTimeEstimate L;
    L.epsilon = epsilon;
    const double c = 1 / std::sqrt(2 * std::numbers::pi * epsilon);
    std::vector<double> t;
    t.reserve(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (!mask.empty() && !mask[i])
            continue;
        t.push_back(weights(i) * c * std::exp(-values(i) * values(i) / (2 * epsilon)));
    }
    L.nodes = static_cast<long>(t.size());
    L.empty_mask = t.empty();
    L.value = pairwise_sum(t);
    return L;
}

LocalTimeEstimate local_time_zero_grid(const Eigen::VectorXd& values, int resolution, double half_side,
                                       double epsilon, const std::vector<char>& mask)
{
    if (values.size() != static_cast<Eigen::Index>(resolution) * resolution)
        throw std::invalid_argument("local_time_zero_grid: values do not match the lattice");
    const double area = std::pow(2 * half_side / resolution, 2);
    LocalTimeEstimate L = local_time_zero(values, Eigen::VectorXd::Constant(values.size(), area), epsilon, mask);
    L.grid_resolution = resolution;
    return L;
}

BrLocalTime br_local_time_sum(const maxstable::CellCover& cover, double epsilon, const Eigen::VectorXd& weights)
{
    if (!(epsilon > 0))
        throw std::invalid_argument("br_local_time_sum: epsilon must be > 0");
    const Eigen::Index n = cover.gap.size();
    Eigen::VectorXd w = weights;
    if (w.size() == 0) {
        if (cover.resolution <= 0)
            throw std::invalid_argument("br_local_time_sum: node-set cover needs weights");
        w = Eigen::VectorXd::Constant(n, std::pow(1.0 / cover.resolution, 2));
    }
    if (w.size() != n)
        throw std::invalid_argument("br_local_time_sum: weight size mismatch");
    BrLocalTime r;
    r.epsilon = epsilon;
    const double c = 1 / std::sqrt(2 * std::numbers::pi * epsilon);
    std::map<std::pair<int, int>, std::vector<double>> terms;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (cover.flagged[i])
            ++r.flagged_nodes;
        if (cover.j(i) < 0)
            continue; // only one function reached this node
        const std::pair<int, int> key{std::min(cover.k(i), cover.j(i)), std::max(cover.k(i), cover.j(i))};
        const double g = cover.gap(i);
        terms[key].push_back(w(i) * c * std::exp(-g * g / (2 * epsilon)));
    }
    std::vector<double> totals;
    for (auto& [key, t] : terms) {
        const double v = pairwise_sum(t);
        r.by_pair[key] = v;
        totals.push_back(v);
    }
    r.value = pairwise_sum(totals);
    return r;
}

} // namespace brdel::increments
