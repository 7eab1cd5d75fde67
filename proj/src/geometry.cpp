#include "brdel/geometry.hpp"
#include "brdel/predicates.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace brdel::geometry {

double Window::default_margin(double intensity) { return std::max(0.1, 3.0 / std::sqrt(intensity)); }

PoissonSample sample_poisson(double intensity, const Window& window, const SeedRecord& seed)
{
    if (!(intensity > 0) || !std::isfinite(intensity))
        throw std::invalid_argument("sample_poisson: intensity must be positive");
    if (!(window.guard_margin >= 0))
        throw std::invalid_argument("sample_poisson: guard margin must be >= 0");
    Philox rng = seed.engine();
    const double h = window.outer_half_side();
    const double mean = intensity * 4 * h * h;
    std::poisson_distribution<long> count(mean);
    std::uniform_real_distribution<double> coord(-h, h);
    const long n = count(rng);
    PoissonSample s{intensity, window, SiteMatrix(n, 2), seed};
    for (long i = 0; i < n; ++i) {
        s.points(i, 0) = coord(rng);
        s.points(i, 1) = coord(rng);
    }
    return s;
}

EdgeSet extract_edges(const Triangulation& tri, const Window& window)
{
    EdgeSet out;
    for (const auto& e : tri.edges) {
        int a = e[0], b = e[1];
        if (lex_less(site(tri.vertices, b), site(tri.vertices, a)))
            std::swap(a, b);
        if (window.in_c(site(tri.vertices, a)))
            out.pairs.push_back({a, b});
    }
    std::sort(out.pairs.begin(), out.pairs.end());
    return out;
}

TripleSet extract_triples(const Triangulation& tri, const Window& window)
{
    TripleSet out;
    for (auto t : tri.triangles) {
        std::sort(t.begin(), t.end(),
                  [&](int a, int b) { return lex_less(site(tri.vertices, a), site(tri.vertices, b)); });
        if (window.in_c(site(tri.vertices, t[0])))
            out.triples.push_back(t);
    }
    std::sort(out.triples.begin(), out.triples.end());
    return out;
}

Design make_design(const SiteMatrix& points, const Window& window, double intensity)
{
    const Triangulation tri = delaunay(points);
    const EdgeSet edges = extract_edges(tri, window);
    const TripleSet triples = extract_triples(tri, window);

    const int n = static_cast<int>(points.rows());
    std::vector<char> used(n, 0);
    for (int i = 0; i < n; ++i)
        if (window.in_c(site(points, i)))
            used[i] = 1;
    for (const auto& e : edges.pairs)
        used[e[0]] = used[e[1]] = 1;
    for (const auto& t : triples.triples)
        used[t[0]] = used[t[1]] = used[t[2]] = 1;

    Design d;
    d.intensity = intensity;
    d.window = window;
    std::vector<int> remap(n, -1);
    for (int i = 0; i < n; ++i)
        if (used[i]) {
            remap[i] = static_cast<int>(d.source.size());
            d.source.push_back(i);
        }
    d.sites.resize(static_cast<Eigen::Index>(d.source.size()), 2);
    for (std::size_t k = 0; k < d.source.size(); ++k) {
        d.sites.row(static_cast<Eigen::Index>(k)) = points.row(d.source[k]);
        if (window.in_c(site(points, d.source[k])))
            d.in_c.push_back(static_cast<int>(k));
    }
    for (const auto& e : edges.pairs)
        d.edges.push_back({remap[e[0]], remap[e[1]]});
    for (const auto& t : triples.triples)
        d.triples.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
    return d;
}

Design make_design(const PoissonSample& sample)
{
    return make_design(sample.points, sample.window, sample.intensity);
}

Eigen::VectorXd c_weights(const Design& d)
{
    const double area = 4 * d.window.half_side * d.window.half_side;
    return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d.in_c.size()),
                                     d.in_c.empty() ? 0.0 : area / static_cast<double>(d.in_c.size()));
}

} // namespace brdel::geometry
