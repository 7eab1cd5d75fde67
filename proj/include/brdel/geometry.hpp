#pragma once

#include "brdel/rng.hpp"

#include <Eigen/Core>

#include <array>
#include <stdexcept>
#include <vector>

namespace brdel::geometry {

using Point2 = Eigen::Vector2d;
using SiteMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2>;

inline Point2 site(const SiteMatrix& s, Eigen::Index i) { return s.row(i).transpose(); }

struct DegenerateInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Observation square C = (-h, h]^2 plus a guard band of width m.
struct Window {
    double half_side = 0.5;
    double guard_margin = 0.1;

    double outer_half_side() const { return half_side + guard_margin; }
    bool in_c(double x, double y) const
    {
        return x > -half_side && x <= half_side && y > -half_side && y <= half_side;
    }
    bool in_c(const Point2& p) const { return in_c(p.x(), p.y()); }

    static double default_margin(double intensity);
    static Window for_intensity(double intensity) { return {0.5, default_margin(intensity)}; }
};

struct PoissonSample {
    double intensity = 0;
    Window window;
    SiteMatrix points;
    SeedRecord seed;
};

PoissonSample sample_poisson(double intensity, const Window& window, const SeedRecord& seed);

struct Triangulation {
    SiteMatrix vertices;
    std::vector<std::array<int, 3>> triangles; // counter-clockwise
    std::vector<std::array<int, 2>> edges;     // i < j
    std::vector<std::vector<int>> adjacency;
    int hull_size = 0;
};

// Bowyer-Watson with ghost triangles. Co-circular ties are broken by
// symbolic perturbation of the lifted heights, lexicographically smaller
// points receiving the dominant perturbation, so the result does not depend
// on insertion order.
Triangulation delaunay(const SiteMatrix& points);

struct EdgeSet {
    std::vector<std::array<int, 2>> pairs; // (x1, x2), x1 lex-smaller and in C
};

struct TripleSet {
    std::vector<std::array<int, 3>> triples; // x1 < x2 < x3 lexicographically, x1 in C
};

EdgeSet extract_edges(const Triangulation& tri, const Window& window);
TripleSet extract_triples(const Triangulation& tri, const Window& window);

// The sites actually needed downstream: every point of C plus every endpoint
// of an extracted edge or triangle, with the index sets renumbered into it.
struct Design {
    double intensity = 0;
    Window window;
    SiteMatrix sites;
    std::vector<std::array<int, 2>> edges;
    std::vector<std::array<int, 3>> triples;
    std::vector<int> in_c;        // indices of sites lying in C
    std::vector<int> source;      // index of each site in the originating point set
};

Design make_design(const SiteMatrix& points, const Window& window, double intensity);
Design make_design(const PoissonSample& sample);

// Quadrature weights |C| / n_C on the design points of C (Monte Carlo rule).
Eigen::VectorXd c_weights(const Design& d);

// Typical cell and typical edge of the unit-intensity Poisson-Delaunay
// tessellation.
struct TypicalCellSample {
    double radius = 0;
    std::array<Point2, 3> directions;
    std::array<double, 3> edge_lengths; // D_i = R |U_j - U_k|, {i,j,k} = {1,2,3}
    int attempts = 0;                   // rejection attempts spent on the directions
};

TypicalCellSample sample_typical_cell(Philox& rng);

double typical_edge_cdf(double l);
double typical_edge_moment(double p); // E[D^p]

struct TypicalEdgePair {
    double d1 = 0;
    double d2 = 0;
    double theta = 0; // in [-pi/2, pi/2)
};

TypicalEdgePair sample_typical_edge_pair(Philox& rng);

// Side lengths of the typical triangle relative to its lexicographically
// smallest vertex x1: (|x1 x2|, |x2 x3|, |x1 x3|) with x2 < x3.
std::array<double, 3> anchored_lengths(const TypicalCellSample& cell);

} // namespace brdel::geometry
