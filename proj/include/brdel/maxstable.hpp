#pragma once

#include "brdel/gaussfield.hpp"

#include <Eigen/Core>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace brdel::maxstable {

using gaussfield::CovFactor;
using gaussfield::ModelParams;
using geometry::Point2;
using geometry::SiteMatrix;

enum class Mode { exact_extremal, truncated };

struct SimulationOptions {
    Mode mode = Mode::exact_extremal;
    int grid_resolution = 0;         // r x r cell-centred lattice over C appended to the sites (0: none)
    double grid_half_side = 0.5;
    // truncated mode
    double tail_probability = 1e-6;  // per-function miss bound in the stopping rule
    int pilot_draws = 64;
    long max_functions = 2'000'000;
    bool retain_values = false;      // keep every Z_i on all nodes (memory n x K)
    // both modes
    int batch = 64;                  // fBm paths per triangular product
};

struct SpectralFunction {
    long id = 0;             // 1-based position in the decreasing enumeration of U
    double log_u = 0;
    Eigen::VectorXd values;  // Z_i on the nodes; empty unless retained
};

struct TruncationReport {
    double q = 0;               // bound on sup(W - gamma) used by the stopping rule
    double pilot_mean_sup = 0;
    double last_log_u = 0;      // first log U that was not generated
    double min_second = 0;      // min over nodes of the second-largest Z
    double margin = 0;          // min_second - (last_log_u + q); > 0 when stopped by the rule
    bool hit_cap = false;
};

struct BrownResnickSample {
    std::shared_ptr<const SiteMatrix> nodes; // observation sites first, then grid nodes
    Eigen::Index n_sites = 0;
    int grid_resolution = 0;
    double grid_half_side = 0.5;

    Eigen::VectorXd log_eta;   // on all nodes
    Eigen::VectorXi argmax_id;
    Eigen::VectorXd second_log; // truncated mode: second-largest Z (-inf if none yet)
    Eigen::VectorXi second_id;
    std::vector<SpectralFunction> spectral;

    Mode mode = Mode::exact_extremal;
    ModelParams params;
    SeedRecord seed;

    long functions = 0;  // accepted (exact) or generated (truncated) spectral functions
    long proposals = 0;  // fBm paths drawn
    TruncationReport truncation;
    std::vector<std::string> warnings;

    double eta(Eigen::Index i) const { return std::exp(log_eta(i)); }
    Eigen::Index index_of(const Point2& x) const;
    bool diagnostic() const { return mode == Mode::truncated; }
};

struct UnsupportedMode : std::logic_error {
    using std::logic_error::logic_error;
};

// Cell-centred r x r lattice over (-h, h]^2.
SiteMatrix lattice(int resolution, double half_side);

BrownResnickSample simulate_br(const SiteMatrix& sites, const ModelParams& p, const SeedRecord& seed,
                               const SimulationOptions& opt = {});

// Reuses a factorization over `f.sites`; the first n_sites rows are the
// observation sites and any remaining rows the diagnostic grid.
BrownResnickSample simulate_br(const CovFactor& f, Eigen::Index n_sites, const ModelParams& p,
                               const SeedRecord& seed, const SimulationOptions& opt = {});

// Top-two labels per node, k the argmax and j the runner-up.
struct CellCover {
    SiteMatrix nodes;
    Eigen::VectorXi node_index; // row in sample.nodes
    Eigen::VectorXi k, j;
    Eigen::VectorXd gap;        // Z_k - Z_j >= 0
    std::vector<char> flagged;  // gap below tolerance
    double tolerance = 1e-12;
    int resolution = 0;         // 0 for a node-set cover
};

// Over the diagnostic grid of the sample, which must have the given resolution.
CellCover build_cell_cover(const BrownResnickSample& sample, int grid_resolution);
// Over an arbitrary subset of sample nodes (for instance the sites in C).
CellCover build_cell_cover(const BrownResnickSample& sample, const std::vector<int>& node_rows);

// sigma^{-1} |x2 - x1|^{-alpha/2} log(eta(x2) / eta(x1))
double log_increment_u(const BrownResnickSample& s, Eigen::Index i1, Eigen::Index i2);
double log_increment_u(const BrownResnickSample& s, const Point2& x1, const Point2& x2);

} // namespace brdel::maxstable
