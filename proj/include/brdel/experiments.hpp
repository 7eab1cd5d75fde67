#pragma once

#include "brdel/config.hpp"
#include "brdel/estimators.hpp"
#include "brdel/increments.hpp"
#include "brdel/maxstable.hpp"

#include <optional>
#include <string>
#include <vector>

namespace brdel::experiments {

using gaussfield::ModelParams;
using increments::AsymptoticConstants;
using increments::DecompositionParts;
using increments::IncrementStat;

geometry::Window window_for(double N, double half_side = 0.5);

struct GeometryRep {
    double N = 0;
    long points_in_c = 0;
    long edges = 0;
    long triples = 0;
};
GeometryRep geometry_rep(double N, const SeedRecord& seed, double half_side = 0.5);

// Single-path regime: one fBm path on a Poisson-Delaunay design.
struct CltRep {
    IncrementStat v2, v3;
};
CltRep clt_rep(const ModelParams& p, double N, const SeedRecord& seed);

// sqrt3/3 N^{-(2-alpha)/4} V2 and sqrt2/2 N^{-(2-alpha)/4} V3
double scaled_v2(double v, double N, double alpha);
double scaled_v3(double v, double N, double alpha);

// Two independent fBm paths and their pointwise maximum.
struct MaxTwoRep {
    DecompositionParts d2, d3;
    IncrementStat v2max, v3max;
    double localtime = 0; // L of W2 - W1 at 0 over C
    double epsilon = 0;
};
MaxTwoRep maxtwo_rep(const ModelParams& p, double N, const SeedRecord& seed);

struct OrderFits {
    int order = 2;
    estimators::FitResult sigma, alpha;
};

struct BrRateOptions {
    std::vector<int> orders{2, 3};
    estimators::Bounds sigma_bounds = estimators::kSigmaBounds;
    estimators::Bounds alpha_bounds = estimators::kAlphaBounds;
    maxstable::SimulationOptions sim{maxstable::Mode::truncated};
    bool fit = true;
};

struct BrRateRep {
    double N = 0;
    IncrementStat v2, v3;
    std::optional<double> localtime; // truncated mode only
    double epsilon = 0;
    long edges = 0;
    long functions = 0;
    long flagged_nodes = 0;
    std::vector<std::string> warnings;
    std::vector<OrderFits> fits;
};
BrRateRep br_rate_rep(const ModelParams& p, double N, const SeedRecord& seed, const BrRateOptions& opt);

// One exact Brown-Resnick realization observed at nested intensities
// obtained by thinning a Poisson sample of intensity N_max.
struct SweepLevel {
    double N = 0;
    long edges = 0, triples = 0;
    std::vector<OrderFits> fits;
};
std::vector<SweepLevel> sweep_rep(const ModelParams& p, double N_max, const std::vector<double>& keep,
                                  const SeedRecord& seed, const BrRateOptions& opt);

AsymptoticConstants constants_for(double alpha, std::uint64_t master_seed, const increments::CV3Options& opt = {});

// ---- orchestration -------------------------------------------------------

struct RunOptions {
    bool resume = false;
    bool quiet = false;
};

// Exit status: 0 success, 2 configuration error, 3 systemic failure.
int run(const config::ExperimentConfig& cfg, const RunOptions& opt = {});

inline constexpr const char* kCodeVersion = "brdel 1.0.0";

} // namespace brdel::experiments
