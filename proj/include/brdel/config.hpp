#pragma once

#include "brdel/estimators.hpp"
#include "brdel/gaussfield.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace brdel::config {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Kind { simulate, fit, mc_clt, mc_maxtwo, mc_br_rate, constants, geometry_check, eval };

const char* kind_name(Kind k);
Kind parse_kind(const std::string& s);

struct EvalPoint {
    std::string what = "pair";     // pair | triple
    std::vector<double> d;         // pair: {d}; triple: {d12, d13, d23}
    std::vector<double> z;
};

struct ExperimentConfig {
    Kind kind = Kind::geometry_check;
    gaussfield::ModelParams params{1.0, 0.5};
    std::vector<double> intensities{1000};
    std::vector<double> thinning{};         // mc-br-rate sweep: keep probabilities applied to intensities[0]
    long replications = 1;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out = "out";
    std::vector<int> orders{2, 3};
    estimators::Bounds sigma_bounds = estimators::kSigmaBounds;
    estimators::Bounds alpha_bounds = estimators::kAlphaBounds;
    std::string br_mode = "exact";          // exact | truncated
    int grid_resolution = 0;
    double tail_probability = 1e-6;
    double window_half_side = 0.5;
    std::string input;                      // fit: x,y,value CSV
    double cv3_target_rel_se = 0.01;
    long cv3_min_samples = 200000;
    long cv3_max_samples = 20000000;
    std::optional<EvalPoint> eval;

    void validate() const;
    std::string canonical_json() const;
    std::uint64_t hash() const;
};

// Parses and validates; unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text, const std::string& source = "config");
ExperimentConfig load_config(const std::string& path);

} // namespace brdel::config
