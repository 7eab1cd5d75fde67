#pragma once

#include "brdel/geometry.hpp"
#include "brdel/increments.hpp"

#include <Eigen/Core>

#include <array>
#include <memory>
#include <optional>
#include <vector>

namespace brdel::estimators {

using geometry::SiteMatrix;

// Observed max-stable values z > 0 on sites, with the tapering index sets.
struct FitData {
    std::shared_ptr<const SiteMatrix> sites;
    Eigen::VectorXd z;
    std::vector<std::array<int, 2>> edges;
    std::vector<std::array<int, 3>> triples;
};

struct Bounds {
    double lo = 0, hi = 0;
    double width() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

inline constexpr Bounds kSigmaBounds{0.2, 5.0};
inline constexpr Bounds kAlphaBounds{0.05, 0.95};

enum class Param { sigma, alpha };

struct CLObjectiveSpec {
    int order = 2;
    Param free = Param::sigma;
    double fixed_value = 0.5; // the known parameter
    Bounds bounds = kSigmaBounds;
};

// Pair terms need no preparation; triples are screened once per fit so the
// objective does not switch terms on and off as alpha moves.
struct TripleTerms {
    std::vector<std::array<int, 3>> triples;
    std::vector<std::array<double, 3>> lengths; // d12, d13, d23
    long skipped_degenerate = 0;
};

TripleTerms prepare_triples(const FitData& data, const std::vector<double>& alphas);

double cl2_objective(const FitData& data, double sigma, double alpha);
double cl3_objective(const FitData& data, const TripleTerms& terms, double sigma, double alpha);
double cl3_objective(const FitData& data, double sigma, double alpha); // screens at this alpha

// Summed (sigma, alpha) scores, for consistency checks.
std::array<double, 2> cl2_score(const FitData& data, double sigma, double alpha);
std::array<double, 2> cl3_score(const FitData& data, const TripleTerms& terms, double sigma, double alpha);

struct FitResult {
    double estimate = 0;
    double objective_at_optimum = 0;
    int evaluations = 0;
    double bracket_width_final = 0;
    double tolerance = 0;
    bool converged = false;
    bool at_boundary = false;
    long skipped_terms = 0;
};

FitResult fit(const FitData& data, const CLObjectiveSpec& spec);
FitResult fit_sigma(int order, const FitData& data, double alpha0, Bounds bounds = kSigmaBounds);
FitResult fit_alpha(int order, const FitData& data, double sigma0, Bounds bounds = kAlphaBounds);

// Grid-search maximizer used as an oracle in tests and for unimodality scans.
struct GridScan {
    std::vector<double> x, value;
    std::size_t argmax = 0;
    bool unimodal = true;
};
GridScan grid_scan(const FitData& data, const CLObjectiveSpec& spec, int points);

struct RateDiagnostic {
    double N = 0;
    double alpha0 = 0, sigma0 = 0;
    int order = 2;
    Param param = Param::sigma;
    double normalization = 0;   // prefactor multiplying the raw error
    double normalized_error = 0;
    std::optional<double> predicted_limit;
};

// Rate normalization: (sqrt3/3 | sqrt2/2) sqrt|E_N| N^{-(2-alpha0)/4}
// for sigma^2, and (sqrt3/6 | sqrt2/4) sqrt|E_N| N^{-(2-alpha0)/4} log N for alpha.
double rate_normalization(int order, Param param, double N, long edge_count, double alpha0);

// The limit is predicted as c sigma0^2 (sigma0 L) for sigma^2 and -c (sigma0 L)
// for alpha, with c = c_V2 or c_V3 and L the local-time sum.
RateDiagnostic rate_diagnostics(const FitResult& fit, int order, Param param, double N, long edge_count,
                                double sigma0, double alpha0, const increments::AsymptoticConstants* constants,
                                std::optional<double> localtime);

} // namespace brdel::estimators
