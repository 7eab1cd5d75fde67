#pragma once

#include "brdel/gaussfield.hpp"
#include "brdel/geometry.hpp"
#include "brdel/maxstable.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace brdel::increments {

using gaussfield::FieldValues;
using gaussfield::ModelParams;
using geometry::SiteMatrix;

// Sum with a fixed binary reduction tree, so the result does not depend on
// how replications were scheduled.
double pairwise_sum(const double* x, std::size_t n);
inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

template <typename S>
S H2(const S& u)
{
    return u * u - 1;
}

enum class Kind { pair, triple };

struct IncrementStat {
    Kind kind = Kind::pair;
    double value = 0;
    long term_count = 0;
    long skipped_degenerate = 0;
};

struct TripleEntry {
    double u12 = 0, u13 = 0, R = 0;
};

// (U12, U13) Sigma_R^{-1} (U12, U13)^T
inline double quadratic_form(double p, double q, double R) { return (p * p - 2 * R * p * q + q * q) / (1 - R * R); }
// the same quantity as the sum of two squared whitened increments
inline double whitened_form(double p, double q, double R)
{
    const double t = (p - R * q) / std::sqrt(1 - R * R);
    return q * q + t * t;
}

IncrementStat v2_stat(const std::vector<double>& u);
IncrementStat v3_stat(const std::vector<TripleEntry>& entries, long skipped_degenerate = 0);

// R at x1 of the triangle (x1, x2, x3)
double triangle_r(double d12, double d13, double d23, double alpha);

// Increments of any field given by its values on `sites`.
std::vector<double> edge_increments(const SiteMatrix& sites, const Eigen::VectorXd& values,
                                    const std::vector<std::array<int, 2>>& edges, const ModelParams& p);
// Degenerate triangles (1 - |R| < 1e-8) are dropped and counted in `skipped`.
std::vector<TripleEntry> triple_increments(const SiteMatrix& sites, const Eigen::VectorXd& values,
                                           const std::vector<std::array<int, 3>>& triples, const ModelParams& p,
                                           long* skipped = nullptr);

IncrementStat v2_field(const SiteMatrix& sites, const Eigen::VectorXd& values,
                       const std::vector<std::array<int, 2>>& edges, const ModelParams& p);
IncrementStat v3_field(const SiteMatrix& sites, const Eigen::VectorXd& values,
                       const std::vector<std::array<int, 3>>& triples, const ModelParams& p);

// ---- decompositions for the pointwise maximum ---------------------------

enum class FKind { H2, I };

double psi_f(FKind f, double x, double y, double w);
double omega(double u1, double v1, double u2, double v2, double w1, double w2, double R);

struct DecompositionParts {
    double part1 = 0, part2 = 0, cross = 0;
    long term_count = 0;
    long skipped_degenerate = 0;
    double total() const { return part1 + part2 + cross; }
};

struct TieAtAnchor : std::domain_error {
    using std::domain_error::domain_error;
};

DecompositionParts decompose_v2(const FieldValues& f1, const FieldValues& f2,
                                const std::vector<std::array<int, 2>>& edges, const ModelParams& p);
DecompositionParts decompose_v3(const FieldValues& f1, const FieldValues& f2,
                                const std::vector<std::array<int, 3>>& triples, const ModelParams& p);

// ---- local times ---------------------------------------------------------

struct LocalTimeEstimate {
    double level = 0;
    double value = 0;
    double epsilon = 0;
    int grid_resolution = 0; // 0: weighted node set
    long nodes = 0;
    bool empty_mask = false;
};

// epsilon = N^{-2/3}
double default_epsilon(double intensity, double alpha);

// sum_i w_i (2 pi eps)^{-1/2} exp(-v_i^2 / (2 eps)) over nodes with mask set
LocalTimeEstimate local_time_zero(const Eigen::VectorXd& values, const Eigen::VectorXd& weights, double epsilon,
                                  const std::vector<char>& mask = {});
// node area (2h / r)^2 on an r x r lattice
LocalTimeEstimate local_time_zero_grid(const Eigen::VectorXd& values, int resolution, double half_side,
                                       double epsilon, const std::vector<char>& mask = {});

struct BrLocalTime {
    double value = 0;
    double epsilon = 0;
    std::map<std::pair<int, int>, double> by_pair; // (min id, max id) -> L over C_{k,j}
    long flagged_nodes = 0;
};

// weights per cover node; an empty vector selects the lattice area of the cover
BrLocalTime br_local_time_sum(const maxstable::CellCover& cover, double epsilon,
                              const Eigen::VectorXd& weights = {});

// ---- asymptotic constants ----------------------------------------------

// int_z Psi_H2(x, y, z / s) dz = s G(x, y)
double g_closed(double x, double y);
// int_z Omega(x1, x2, y1, y2, z / s1, z / s3; R) dz, exact piecewise quadrature
double omega_z_integral(double x1, double y1, double x2, double y2, double s1, double s3, double R);

struct QuadResult {
    double value = 0;
    double error = 0;
};

QuadResult compute_psi();
QuadResult compute_expected_g();

struct CV3Options {
    double target_rel_se = 0.01;
    long min_samples = 200'000;
    long max_samples = 20'000'000;
    long batch = 100'000;
    bool r_zero_reduction = false; // replace Omega by its R = 0 reduction (oracle mode)
};

struct CV3Result {
    double value = 0;
    double se = 0;
    long samples = 0;
    long rejected = 0;
};

QuadResult compute_c_v2(double alpha);
CV3Result compute_c_v3(double alpha, const SeedRecord& seed, const CV3Options& opt = {});

struct AsymptoticConstants {
    double alpha = 0;
    double psi = 0, psi_error = 0;
    double edge_moment = 0; // E[D^{alpha/2}]
    double expected_g = 0;
    double c_v2 = 0, c_v2_error = 0;
    double c_v3 = 0, c_v3_se = 0;
    long c_v3_samples = 0, c_v3_rejected = 0;
    double sigma2_v2_hat = 0, sigma2_v3_hat = 0; // replication variances, filled by the harness
};

AsymptoticConstants compute_constants(double alpha, const SeedRecord& seed, const CV3Options& opt = {});

} // namespace brdel::increments
