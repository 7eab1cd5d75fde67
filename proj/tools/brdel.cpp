#include "brdel/config.hpp"
#include "brdel/experiments.hpp"
#include "brdel/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

using namespace brdel;

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out;
    bool resume = false;
    bool quiet = false;
    // quick overrides when no config file is given
    std::optional<double> sigma, alpha;
    std::vector<double> intensities, thinning;
    std::optional<long> replications;
    std::string input, br_mode;
    std::optional<int> grid;
    std::string what;
    std::vector<double> d, z;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--config", c.config_path, "JSON experiment config");
    sub->add_option("--seed", c.seed, "master seed");
    sub->add_option("--threads", c.threads, "worker threads");
    sub->add_option("--out", c.out, "output directory");
    sub->add_flag("--resume", c.resume, "skip replications already recorded in the manifest");
    sub->add_flag("--quiet", c.quiet, "no progress output");
    sub->add_option("--sigma", c.sigma);
    sub->add_option("--alpha", c.alpha);
    sub->add_option("--N", c.intensities, "intensity grid")->delimiter(',');
    sub->add_option("--thinning", c.thinning, "keep probabilities for a paired sweep")->delimiter(',');
    sub->add_option("--replications", c.replications);
    sub->add_option("--input", c.input, "x,y,value CSV for fit");
    sub->add_option("--br-mode", c.br_mode, "exact | truncated");
    sub->add_option("--grid", c.grid, "grid resolution for truncated mode diagnostics");
    sub->add_option("--what", c.what, "eval: pair | triple");
    sub->add_option("--d", c.d, "eval: distances (pair: d; triple: d12,d13,d23)")->delimiter(',');
    sub->add_option("--z", c.z, "eval: observations")->delimiter(',');
}

config::ExperimentConfig build_config(const std::string& name, const Common& c)
{
    nlohmann::json j = nlohmann::json::object();
    if (!c.config_path.empty()) {
        j = nlohmann::json::parse(io::read_file(c.config_path), nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw config::ConfigError(c.config_path + ": not a JSON object");
        if (j.contains("experiment") && j["experiment"] != name)
            throw config::ConfigError(c.config_path + ": experiment '" + j["experiment"].get<std::string>()
                                      + "' does not match subcommand '" + name + "'");
    }
    j["experiment"] = name;
    if (c.sigma)
        j["sigma"] = *c.sigma;
    if (c.alpha)
        j["alpha"] = *c.alpha;
    if (!c.intensities.empty())
        j["intensities"] = c.intensities;
    if (!c.thinning.empty())
        j["thinning"] = c.thinning;
    if (c.replications)
        j["replications"] = *c.replications;
    if (c.seed)
        j["seed"] = *c.seed;
    if (c.threads)
        j["threads"] = *c.threads;
    if (!c.out.empty())
        j["out"] = c.out;
    if (!c.input.empty())
        j["input"] = c.input;
    if (!c.br_mode.empty())
        j["br_mode"] = c.br_mode;
    if (c.grid)
        j["grid_resolution"] = *c.grid;
    if (name == "eval" && (!c.d.empty() || !c.z.empty() || !c.what.empty())) {
        nlohmann::json e = j.contains("eval") ? j["eval"] : nlohmann::json::object();
        if (!c.what.empty())
            e["what"] = c.what;
        if (!c.d.empty())
            e["d"] = c.d;
        if (!c.z.empty())
            e["z"] = c.z;
        j["eval"] = e;
    }
    return config::parse_config(j.dump(), c.config_path.empty() ? "command line" : c.config_path);
}

void print_eval(const config::ExperimentConfig& cfg)
{
    const std::string csv = io::read_file(cfg.out + "/results.csv");
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        // replication_id,N,alpha,stat_kind,value,...
        std::vector<std::string> f;
        std::string cur;
        std::istringstream ls(line);
        while (std::getline(ls, cur, ','))
            f.push_back(cur);
        if (f.size() > 4)
            std::cout << f[3] << " = " << f[4] << '\n';
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Brown-Resnick processes on Poisson-Delaunay designs: simulation, increments, composite likelihood"};
    app.require_subcommand(1);
    const std::vector<std::string> names = {"simulate",   "fit",       "mc-clt",         "mc-maxtwo",
                                            "mc-br-rate", "constants", "geometry-check", "eval"};
    Common common;
    for (const auto& n : names)
        add_common(app.add_subcommand(n), common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    try {
        const auto cfg = build_config(name, common);
        const int rc = experiments::run(cfg, {common.resume, common.quiet});
        if (rc == 0 && cfg.kind == config::Kind::eval)
            print_eval(cfg);
        return rc;
    } catch (const config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const io::IngestError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
