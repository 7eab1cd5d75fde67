#include "brdel/config.hpp"

#include "brdel/io.hpp"
#include "brdel/rng.hpp"

#include <json.hpp>

#include <set>

namespace brdel::config {

using nlohmann::json;

namespace {

const std::pair<Kind, const char*> kKinds[] = {
    {Kind::simulate, "simulate"},       {Kind::fit, "fit"},
    {Kind::mc_clt, "mc-clt"},           {Kind::mc_maxtwo, "mc-maxtwo"},
    {Kind::mc_br_rate, "mc-br-rate"},   {Kind::constants, "constants"},
    {Kind::geometry_check, "geometry-check"}, {Kind::eval, "eval"},
};

const std::set<std::string> kKeys = {
    "experiment", "sigma", "alpha", "intensities", "thinning", "replications", "seed", "threads", "out",
    "orders", "sigma_bounds", "alpha_bounds", "br_mode", "grid_resolution", "tail_probability",
    "window_half_side", "input", "cv3_target_rel_se", "cv3_min_samples", "cv3_max_samples", "eval"};

const std::set<std::string> kEvalKeys = {"what", "d", "z"};

template <typename T>
T get(const json& j, const char* key, const std::string& src)
{
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(src + ": key '" + key + "': " + e.what());
    }
}

estimators::Bounds get_bounds(const json& j, const char* key, const std::string& src)
{
    const auto v = get<std::vector<double>>(j, key, src);
    if (v.size() != 2)
        throw ConfigError(src + ": '" + key + "' must be [lo, hi]");
    return {v[0], v[1]};
}

} // namespace

const char* kind_name(Kind k)
{
    for (const auto& [kk, name] : kKinds)
        if (kk == k)
            return name;
    return "?";
}

Kind parse_kind(const std::string& s)
{
    for (const auto& [k, name] : kKinds)
        if (s == name)
            return k;
    throw ConfigError("unknown experiment kind '" + s + "'");
}

void ExperimentConfig::validate() const
{
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (intensities.empty())
        throw ConfigError("intensities must be nonempty");
    for (double n : intensities)
        if (!(n >= 3))
            throw ConfigError("intensities must be >= 3");
    for (double t : thinning)
        if (!(t > 0 && t <= 1))
            throw ConfigError("thinning probabilities must lie in (0, 1]");
    if (replications < 1)
        throw ConfigError("replications must be >= 1");
    if (threads < 1)
        throw ConfigError("threads must be >= 1");
    for (int o : orders)
        if (o != 2 && o != 3)
            throw ConfigError("orders may contain only 2 and 3");
    if (!(sigma_bounds.lo > 0 && sigma_bounds.lo < sigma_bounds.hi))
        throw ConfigError("sigma_bounds must satisfy 0 < lo < hi");
    if (!(alpha_bounds.lo > 0 && alpha_bounds.lo < alpha_bounds.hi && alpha_bounds.hi < 2))
        throw ConfigError("alpha_bounds must satisfy 0 < lo < hi < 2");
    if (br_mode != "exact" && br_mode != "truncated")
        throw ConfigError("br_mode must be 'exact' or 'truncated'");
    if (grid_resolution < 0)
        throw ConfigError("grid_resolution must be >= 0");
    if (!(tail_probability > 0 && tail_probability < 1))
        throw ConfigError("tail_probability must lie in (0, 1)");
    if (!(window_half_side > 0))
        throw ConfigError("window_half_side must be > 0");
    if (kind == Kind::fit && input.empty())
        throw ConfigError("fit needs 'input'");
    if (!(cv3_target_rel_se > 0) || cv3_min_samples < 2 || cv3_max_samples < cv3_min_samples)
        throw ConfigError("c_V3 sampling settings are inconsistent");
    if (kind == Kind::eval) {
        if (!eval)
            throw ConfigError("eval needs an 'eval' object");
        const std::size_t nd = eval->what == "pair" ? 1 : eval->what == "triple" ? 3 : 0;
        if (nd == 0)
            throw ConfigError("eval.what must be 'pair' or 'triple'");
        if (eval->d.size() != nd || eval->z.size() != (nd == 1 ? 2 : 3))
            throw ConfigError("eval: wrong number of distances or z values");
    }
}

ExperimentConfig parse_config(const std::string& text, const std::string& src)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(src + ": " + e.what());
    }
    if (!j.is_object())
        throw ConfigError(src + ": top level must be an object");
    for (const auto& [key, _] : j.items())
        if (!kKeys.count(key))
            throw ConfigError(src + ": unknown key '" + key + "'");
    if (!j.contains("experiment"))
        throw ConfigError(src + ": missing 'experiment'");

    ExperimentConfig c;
    c.kind = parse_kind(get<std::string>(j, "experiment", src));
    if (j.contains("sigma"))
        c.params.sigma = get<double>(j, "sigma", src);
    if (j.contains("alpha"))
        c.params.alpha = get<double>(j, "alpha", src);
    if (j.contains("intensities"))
        c.intensities = get<std::vector<double>>(j, "intensities", src);
    if (j.contains("thinning"))
        c.thinning = get<std::vector<double>>(j, "thinning", src);
    if (j.contains("replications"))
        c.replications = get<long>(j, "replications", src);
    if (j.contains("seed"))
        c.seed = get<std::uint64_t>(j, "seed", src);
    if (j.contains("threads"))
        c.threads = get<int>(j, "threads", src);
    if (j.contains("out"))
        c.out = get<std::string>(j, "out", src);
    if (j.contains("orders"))
        c.orders = get<std::vector<int>>(j, "orders", src);
    if (j.contains("sigma_bounds"))
        c.sigma_bounds = get_bounds(j, "sigma_bounds", src);
    if (j.contains("alpha_bounds"))
        c.alpha_bounds = get_bounds(j, "alpha_bounds", src);
    if (j.contains("br_mode"))
        c.br_mode = get<std::string>(j, "br_mode", src);
    if (j.contains("grid_resolution"))
        c.grid_resolution = get<int>(j, "grid_resolution", src);
    if (j.contains("tail_probability"))
        c.tail_probability = get<double>(j, "tail_probability", src);
    if (j.contains("window_half_side"))
        c.window_half_side = get<double>(j, "window_half_side", src);
    if (j.contains("input"))
        c.input = get<std::string>(j, "input", src);
    if (j.contains("cv3_target_rel_se"))
        c.cv3_target_rel_se = get<double>(j, "cv3_target_rel_se", src);
    if (j.contains("cv3_min_samples"))
        c.cv3_min_samples = get<long>(j, "cv3_min_samples", src);
    if (j.contains("cv3_max_samples"))
        c.cv3_max_samples = get<long>(j, "cv3_max_samples", src);
    if (j.contains("eval")) {
        const json& e = j["eval"];
        if (!e.is_object())
            throw ConfigError(src + ": 'eval' must be an object");
        for (const auto& [key, _] : e.items())
            if (!kEvalKeys.count(key))
                throw ConfigError(src + ": unknown key 'eval." + key + "'");
        EvalPoint p;
        if (e.contains("what"))
            p.what = get<std::string>(e, "what", src);
        p.d = get<std::vector<double>>(e, "d", src);
        p.z = get<std::vector<double>>(e, "z", src);
        c.eval = p;
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text, path);
}

std::string ExperimentConfig::canonical_json() const
{
    // threads and out do not change results and are left out of the hash
    json j;
    j["experiment"] = kind_name(kind);
    j["sigma"] = params.sigma;
    j["alpha"] = params.alpha;
    j["intensities"] = intensities;
    j["thinning"] = thinning;
    j["replications"] = replications;
    j["seed"] = seed;
    j["orders"] = orders;
    j["sigma_bounds"] = {sigma_bounds.lo, sigma_bounds.hi};
    j["alpha_bounds"] = {alpha_bounds.lo, alpha_bounds.hi};
    j["br_mode"] = br_mode;
    j["grid_resolution"] = grid_resolution;
    j["tail_probability"] = tail_probability;
    j["window_half_side"] = window_half_side;
    j["input"] = input;
    j["cv3_target_rel_se"] = cv3_target_rel_se;
    j["cv3_min_samples"] = cv3_min_samples;
    j["cv3_max_samples"] = cv3_max_samples;
    if (eval)
        j["eval"] = {{"what", eval->what}, {"d", eval->d}, {"z", eval->z}};
    return j.dump();
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(canonical_json()); }

} // namespace brdel::config
