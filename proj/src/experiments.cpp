#include "brdel/experiments.hpp"

#include "brdel/io.hpp"
#include "brdel/likelihood.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace brdel::experiments {

using nlohmann::json;
namespace fs = std::filesystem;

geometry::Window window_for(double N, double half_side)
{
    return {half_side, geometry::Window::default_margin(N)};
}

GeometryRep geometry_rep(double N, const SeedRecord& seed, double half_side)
{
    const auto sample = geometry::sample_poisson(N, window_for(N, half_side), seed);
    const auto d = geometry::make_design(sample);
    return {N, static_cast<long>(d.in_c.size()), static_cast<long>(d.edges.size()),
            static_cast<long>(d.triples.size())};
}

namespace {

std::shared_ptr<const geometry::SiteMatrix> shared_sites(const geometry::SiteMatrix& s)
{
    return std::make_shared<const geometry::SiteMatrix>(s);
}

} // namespace

CltRep clt_rep(const ModelParams& p, double N, const SeedRecord& seed)
{
    const auto d = geometry::make_design(geometry::sample_poisson(N, window_for(N), seed.child("sites")));
    const auto fv = gaussfield::simulate_fbm(shared_sites(d.sites), p, seed.child("field"));
    return {increments::v2_field(d.sites, fv.values, d.edges, p), increments::v3_field(d.sites, fv.values, d.triples, p)};
}

double scaled_v2(double v, double N, double alpha) { return std::sqrt(3.0) / 3 * std::pow(N, -(2 - alpha) / 4) * v; }
double scaled_v3(double v, double N, double alpha) { return std::sqrt(2.0) / 2 * std::pow(N, -(2 - alpha) / 4) * v; }

MaxTwoRep maxtwo_rep(const ModelParams& p, double N, const SeedRecord& seed)
{
    const auto d = geometry::make_design(geometry::sample_poisson(N, window_for(N), seed.child("sites")));
    const auto sites = shared_sites(d.sites);
    const auto f = gaussfield::factorize(sites, p);
    Philox rng = seed.child("fields").engine();
    const Eigen::MatrixXd w = gaussfield::draw(f, rng, 2);
    const gaussfield::FieldValues f1{sites, w.col(0), p, seed.child("fields")};
    const gaussfield::FieldValues f2{sites, w.col(1), p, seed.child("fields")};
    const auto fmax = gaussfield::pointwise_max(f1, f2);

    MaxTwoRep r;
    r.d2 = increments::decompose_v2(f1, f2, d.edges, p);
    r.d3 = increments::decompose_v3(f1, f2, d.triples, p);
    r.v2max = increments::v2_field(d.sites, fmax.values, d.edges, p);
    r.v3max = increments::v3_field(d.sites, fmax.values, d.triples, p);

    Eigen::VectorXd diff(static_cast<Eigen::Index>(d.in_c.size()));
    for (std::size_t k = 0; k < d.in_c.size(); ++k)
        diff(static_cast<Eigen::Index>(k)) = w(d.in_c[k], 1) - w(d.in_c[k], 0);
    r.epsilon = increments::default_epsilon(N, p.alpha);
    r.localtime = increments::local_time_zero(diff, geometry::c_weights(d), r.epsilon).value;
    return r;
}

namespace {

std::vector<OrderFits> fit_orders(const estimators::FitData& data, const ModelParams& p, const BrRateOptions& opt)
{
    std::vector<OrderFits> out;
    for (int order : opt.orders) {
        OrderFits f;
        f.order = order;
        f.sigma = estimators::fit_sigma(order, data, p.alpha, opt.sigma_bounds);
        f.alpha = estimators::fit_alpha(order, data, p.sigma, opt.alpha_bounds);
        out.push_back(f);
    }
    return out;
}

} // namespace

BrRateRep br_rate_rep(const ModelParams& p, double N, const SeedRecord& seed, const BrRateOptions& opt)
{
    const auto d = geometry::make_design(geometry::sample_poisson(N, window_for(N), seed.child("sites")));
    const auto sites = shared_sites(d.sites);
    const auto f = gaussfield::factorize(sites, p);
    const auto s = maxstable::simulate_br(f, d.sites.rows(), p, seed.child("field"), opt.sim);

    BrRateRep r;
    r.N = N;
    r.edges = static_cast<long>(d.edges.size());
    r.functions = s.functions;
    r.warnings = s.warnings;
    const Eigen::VectorXd logz = s.log_eta.head(d.sites.rows());
    r.v2 = increments::v2_field(d.sites, logz, d.edges, p);
    r.v3 = increments::v3_field(d.sites, logz, d.triples, p);
    r.epsilon = increments::default_epsilon(N, p.alpha);
    if (s.diagnostic()) {
        const auto cover = maxstable::build_cell_cover(s, d.in_c);
        const auto L = increments::br_local_time_sum(cover, r.epsilon, geometry::c_weights(d));
        r.localtime = L.value;
        r.flagged_nodes = L.flagged_nodes;
    }
    if (opt.fit) {
        estimators::FitData data{sites, logz.array().exp().matrix(), d.edges, d.triples};
        r.fits = fit_orders(data, p, opt);
    }
    return r;
}

std::vector<SweepLevel> sweep_rep(const ModelParams& p, double N_max, const std::vector<double>& keep,
                                  const SeedRecord& seed, const BrRateOptions& opt)
{
    if (keep.empty())
        throw std::invalid_argument("sweep_rep: no levels");
    const double min_keep = *std::min_element(keep.begin(), keep.end());
    const auto sample = geometry::sample_poisson(N_max, window_for(N_max * min_keep), seed.child("sites"));
    const Eigen::Index n = sample.points.rows();

    // nested thinning: one uniform mark per point, level kept where mark < keep
    Philox mrng = seed.child("marks").engine();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd mark(n);
    for (Eigen::Index i = 0; i < n; ++i)
        mark(i) = unif(mrng);

    std::vector<geometry::Design> designs;
    std::vector<std::vector<int>> origin; // design site -> row of sample.points
    for (double q : keep) {
        std::vector<int> rows;
        for (Eigen::Index i = 0; i < n; ++i)
            if (mark(i) < q)
                rows.push_back(static_cast<int>(i));
        geometry::SiteMatrix pts(static_cast<Eigen::Index>(rows.size()), 2);
        for (std::size_t k = 0; k < rows.size(); ++k)
            pts.row(static_cast<Eigen::Index>(k)) = sample.points.row(rows[k]);
        const double N = N_max * q;
        designs.push_back(geometry::make_design(pts, window_for(N), N));
        std::vector<int> o;
        for (int src : designs.back().source)
            o.push_back(rows[src]);
        origin.push_back(std::move(o));
    }

    // one field on the union of the active sites
    std::map<int, int> union_index;
    for (const auto& o : origin)
        for (int r : o)
            union_index.emplace(r, 0);
    geometry::SiteMatrix usites(static_cast<Eigen::Index>(union_index.size()), 2);
    {
        int k = 0;
        for (auto& [r, idx] : union_index) {
            idx = k;
            usites.row(k++) = sample.points.row(r);
        }
    }
    maxstable::SimulationOptions sim = opt.sim;
    sim.mode = maxstable::Mode::exact_extremal;
    sim.grid_resolution = 0;
    const auto s = maxstable::simulate_br(usites, p, seed.child("field"), sim);

    std::vector<SweepLevel> out;
    for (std::size_t l = 0; l < keep.size(); ++l) {
        const auto& d = designs[l];
        Eigen::VectorXd z(d.sites.rows());
        for (Eigen::Index i = 0; i < z.size(); ++i)
            z(i) = s.eta(union_index.at(origin[l][static_cast<std::size_t>(i)]));
        SweepLevel lv;
        lv.N = N_max * keep[l];
        lv.edges = static_cast<long>(d.edges.size());
        lv.triples = static_cast<long>(d.triples.size());
        estimators::FitData data{shared_sites(d.sites), z, d.edges, d.triples};
        lv.fits = fit_orders(data, p, opt);
        out.push_back(std::move(lv));
    }
    return out;
}

AsymptoticConstants constants_for(double alpha, std::uint64_t master_seed, const increments::CV3Options& opt)
{
    return increments::compute_constants(alpha, SeedRecord::replication(master_seed, "constants", 0), opt);
}

// ---- orchestration -------------------------------------------------------

namespace {

using config::ExperimentConfig;
using config::Kind;
using io::ResultRow;

json constants_json(const AsymptoticConstants& c, const increments::CV3Options& o)
{
    return {{"alpha", c.alpha},
            {"psi", c.psi},
            {"psi_error", c.psi_error},
            {"edge_moment", c.edge_moment},
            {"expected_g", c.expected_g},
            {"c_v2", c.c_v2},
            {"c_v2_error", c.c_v2_error},
            {"c_v3", c.c_v3},
            {"c_v3_se", c.c_v3_se},
            {"c_v3_samples", c.c_v3_samples},
            {"c_v3_rejected", c.c_v3_rejected},
            {"method", "quadrature+typical-cell-mc"},
            {"cv3_target_rel_se", o.target_rel_se},
            {"cv3_min_samples", o.min_samples}};
}

increments::CV3Options cv3_options(const ExperimentConfig& c)
{
    increments::CV3Options o;
    o.target_rel_se = c.cv3_target_rel_se;
    o.min_samples = c.cv3_min_samples;
    o.max_samples = c.cv3_max_samples;
    return o;
}

// Reuses out/constants.json when its key (alpha, method, sample settings) matches.
AsymptoticConstants cached_constants(const ExperimentConfig& c, const fs::path& dir)
{
    const auto o = cv3_options(c);
    const fs::path path = dir / "constants.json";
    if (fs::exists(path)) {
        try {
            const json j = json::parse(io::read_file(path.string()));
            if (j.at("alpha") == c.params.alpha && j.at("cv3_target_rel_se") == o.target_rel_se
                && j.at("cv3_min_samples") == o.min_samples) {
                AsymptoticConstants k;
                k.alpha = j.at("alpha");
                k.psi = j.at("psi");
                k.psi_error = j.at("psi_error");
                k.edge_moment = j.at("edge_moment");
                k.expected_g = j.at("expected_g");
                k.c_v2 = j.at("c_v2");
                k.c_v2_error = j.at("c_v2_error");
                k.c_v3 = j.at("c_v3");
                k.c_v3_se = j.at("c_v3_se");
                k.c_v3_samples = j.at("c_v3_samples");
                k.c_v3_rejected = j.at("c_v3_rejected");
                return k;
            }
        } catch (const std::exception&) {
            // stale or foreign file: recompute
        }
    }
    const auto k = constants_for(c.params.alpha, c.seed, o);
    io::write_atomic(path.string(), constants_json(k, o).dump(2) + "\n");
    return k;
}

std::string fit_aux(const estimators::FitResult& f)
{
    std::ostringstream os;
    os.precision(12);
    os << "estimate=" << f.estimate << ";converged=" << f.converged << ";boundary=" << f.at_boundary
       << ";evals=" << f.evaluations << ";skipped=" << f.skipped_terms;
    return os.str();
}

void fit_rows(std::vector<ResultRow>& rows, long rep, double N, long edge_count, const ModelParams& p,
              const std::vector<OrderFits>& fits, const AsymptoticConstants* k, std::optional<double> L)
{
    for (const auto& f : fits) {
        for (auto param : {estimators::Param::sigma, estimators::Param::alpha}) {
            const auto& fr = param == estimators::Param::sigma ? f.sigma : f.alpha;
            const auto d = estimators::rate_diagnostics(fr, f.order, param, N, edge_count, p.sigma, p.alpha, k, L);
            ResultRow r;
            r.replication_id = rep;
            r.N = N;
            r.alpha = p.alpha;
            r.stat_kind = std::string(param == estimators::Param::sigma ? "sigma2" : "alpha") + "_rate_o"
                          + std::to_string(f.order);
            r.value = d.normalized_error;
            r.term_count = edge_count;
            r.localtime = L.value_or(std::nan(""));
            r.constant = k ? (f.order == 2 ? k->c_v2 : k->c_v3) : std::nan("");
            r.prediction = d.predicted_limit.value_or(std::nan(""));
            r.aux = fit_aux(fr);
            rows.push_back(r);
        }
    }
}

struct Shared {
    std::optional<AsymptoticConstants> constants;
    std::optional<estimators::FitData> fit_data;
    double fit_N = 0;
    fs::path dir;
};

maxstable::SimulationOptions sim_options(const ExperimentConfig& c)
{
    maxstable::SimulationOptions s;
    s.mode = c.br_mode == "exact" ? maxstable::Mode::exact_extremal : maxstable::Mode::truncated;
    s.grid_resolution = c.grid_resolution;
    s.grid_half_side = c.window_half_side;
    s.tail_probability = c.tail_probability;
    return s;
}

BrRateOptions rate_options(const ExperimentConfig& c)
{
    BrRateOptions o;
    o.orders = c.orders;
    o.sigma_bounds = c.sigma_bounds;
    o.alpha_bounds = c.alpha_bounds;
    o.sim = sim_options(c);
    return o;
}

std::vector<ResultRow> replicate(const ExperimentConfig& c, long rep, const SeedRecord& seed, const Shared& sh)
{
    std::vector<ResultRow> rows;
    const ModelParams& p = c.params;
    auto row = [&](double N, const std::string& kind, double value, long terms) -> ResultRow& {
        ResultRow r;
        r.replication_id = rep;
        r.N = N;
        r.alpha = p.alpha;
        r.stat_kind = kind;
        r.value = value;
        r.term_count = terms;
        r.localtime = r.constant = r.prediction = std::nan("");
        rows.push_back(r);
        return rows.back();
    };
    const AsymptoticConstants* k = sh.constants ? &*sh.constants : nullptr;

    switch (c.kind) {
    case Kind::geometry_check:
        for (double N : c.intensities) {
            const auto g = geometry_rep(N, seed.child(static_cast<std::uint64_t>(N)), c.window_half_side);
            row(N, "edges_per_N", g.edges / N, g.edges);
            row(N, "triples_per_N", g.triples / N, g.triples);
            row(N, "points_in_c", static_cast<double>(g.points_in_c), g.points_in_c);
        }
        break;
    case Kind::mc_clt:
        for (double N : c.intensities) {
            const auto r = clt_rep(p, N, seed.child(static_cast<std::uint64_t>(N)));
            row(N, "V2", r.v2.value, r.v2.term_count);
            row(N, "V3", r.v3.value, r.v3.term_count).aux = "skipped=" + std::to_string(r.v3.skipped_degenerate);
        }
        break;
    case Kind::mc_maxtwo:
        for (double N : c.intensities) {
            const auto r = maxtwo_rep(p, N, seed.child(static_cast<std::uint64_t>(N)));
            for (int order : {2, 3}) {
                const auto& d = order == 2 ? r.d2 : r.d3;
                const auto& v = order == 2 ? r.v2max : r.v3max;
                auto& rr = row(N, order == 2 ? "V2max_scaled" : "V3max_scaled",
                               order == 2 ? scaled_v2(v.value, N, p.alpha) : scaled_v3(v.value, N, p.alpha),
                               v.term_count);
                rr.localtime = r.localtime;
                if (k) {
                    rr.constant = order == 2 ? k->c_v2 : k->c_v3;
                    rr.prediction = rr.constant * p.sigma * r.localtime;
                }
                std::ostringstream os;
                os.precision(17);
                os << "raw=" << v.value << ";part1=" << d.part1 << ";part2=" << d.part2 << ";cross=" << d.cross
                   << ";epsilon=" << r.epsilon;
                rr.aux = os.str();
            }
        }
        break;
    case Kind::mc_br_rate:
        if (!c.thinning.empty()) {
            const double Nmax = c.intensities.front();
            const auto levels = sweep_rep(p, Nmax, c.thinning, seed, rate_options(c));
            for (const auto& lv : levels)
                fit_rows(rows, rep, lv.N, lv.edges, p, lv.fits, nullptr, std::nullopt);
        } else {
            for (double N : c.intensities) {
                const auto r = br_rate_rep(p, N, seed.child(static_cast<std::uint64_t>(N)), rate_options(c));
                for (int order : {2, 3}) {
                    const auto& v = order == 2 ? r.v2 : r.v3;
                    auto& rr = row(N, order == 2 ? "V2eta_scaled" : "V3eta_scaled",
                                   order == 2 ? scaled_v2(v.value, N, p.alpha) : scaled_v3(v.value, N, p.alpha),
                                   v.term_count);
                    if (r.localtime) {
                        rr.localtime = *r.localtime;
                        if (k) {
                            rr.constant = order == 2 ? k->c_v2 : k->c_v3;
                            rr.prediction = rr.constant * p.sigma * *r.localtime;
                        }
                    }
                    rr.aux = "functions=" + std::to_string(r.functions)
                             + ";warnings=" + std::to_string(r.warnings.size());
                }
                fit_rows(rows, rep, N, r.edges, p, r.fits, k, r.localtime);
            }
        }
        break;
    case Kind::simulate:
        for (double N : c.intensities) {
            const SeedRecord s = seed.child(static_cast<std::uint64_t>(N));
            const auto d = geometry::make_design(geometry::sample_poisson(N, window_for(N, c.window_half_side),
                                                                          s.child("sites")));
            const auto sample = maxstable::simulate_br(d.sites, p, s.child("field"), sim_options(c));
            const std::string stem = "sample_" + std::to_string(rep) + "_N" + std::to_string(static_cast<long>(N));
            io::write_br_sample((sh.dir / (stem + ".csv")).string(), sample);
            // observation sites alone, in the x,y,value form that `fit` ingests
            io::write_site_values((sh.dir / (stem + "_values.csv")).string(), d.sites,
                                  sample.log_eta.head(sample.n_sites).array().exp().matrix());
            if (sample.diagnostic() && c.grid_resolution > 0)
                io::write_cell_cover((sh.dir / (stem + "_cells.csv")).string(),
                                     maxstable::build_cell_cover(sample, c.grid_resolution));
            std::string warn;
            for (const auto& w : sample.warnings)
                warn += w + ";";
            row(N, "functions", static_cast<double>(sample.functions), static_cast<long>(d.sites.rows())).aux = warn;
        }
        break;
    case Kind::fit: {
        const auto& data = *sh.fit_data;
        BrRateOptions o = rate_options(c);
        const auto fits = fit_orders(data, p, o);
        for (const auto& f : fits) {
            row(sh.fit_N, "sigma_hat_o" + std::to_string(f.order), f.sigma.estimate,
                static_cast<long>(f.order == 2 ? data.edges.size() : data.triples.size()))
                .aux = fit_aux(f.sigma);
            row(sh.fit_N, "alpha_hat_o" + std::to_string(f.order), f.alpha.estimate,
                static_cast<long>(f.order == 2 ? data.edges.size() : data.triples.size()))
                .aux = fit_aux(f.alpha);
        }
        break;
    }
    case Kind::constants: {
        const auto& kk = *sh.constants;
        row(0, "psi", kk.psi, 0).aux = "error=" + std::to_string(kk.psi_error);
        row(0, "c_v2", kk.c_v2, 0).aux = "error=" + std::to_string(kk.c_v2_error);
        row(0, "c_v3", kk.c_v3, kk.c_v3_samples).aux = "se=" + std::to_string(kk.c_v3_se);
        break;
    }
    case Kind::eval: {
        const auto& e = *c.eval;
        std::ostringstream os;
        os.precision(17);
        if (e.what == "pair") {
            const auto lf = likelihood::pair_log_density({e.d[0]}, e.z[0], e.z[1], p);
            const auto V = likelihood::pair_exponent({e.d[0]}, e.z[0], e.z[1], p);
            row(0, "log_f", lf.log_f, 1);
            row(0, "score_sigma", lf.d_sigma, 1);
            row(0, "score_alpha", lf.d_alpha, 1);
            row(0, "V", V.value, 1);
        } else {
            const likelihood::TripleGeometry g{e.d[0], e.d[1], e.d[2]};
            const auto lf = likelihood::triple_log_density(g, e.z[0], e.z[1], e.z[2], p);
            const auto V = likelihood::triple_exponent(g, e.z[0], e.z[1], e.z[2], p);
            row(0, "log_f", lf.log_f, 1);
            row(0, "score_sigma", lf.d_sigma, 1);
            row(0, "score_alpha", lf.d_alpha, 1);
            row(0, "V", V.value, 1);
        }
        break;
    }
    }
    return rows;
}

std::string hex(std::uint64_t v)
{
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
}

} // namespace

int run(const ExperimentConfig& cfg, const RunOptions& opt)
{
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir(cfg.out);
    fs::create_directories(dir);
    const fs::path results = dir / "results.csv";
    const fs::path manifest_path = dir / "manifest.json";
    const std::string hash = hex(cfg.hash());

    json manifest;
    std::set<long> done;
    if (opt.resume && fs::exists(manifest_path)) {
        manifest = json::parse(io::read_file(manifest_path.string()));
        if (manifest.value("config_hash", std::string()) != hash)
            throw config::ConfigError("resume: manifest in " + dir.string() + " belongs to a different config");
        for (long id : manifest.value("completed", std::vector<long>{}))
            done.insert(id);
        io::truncate_results(results.string(), done);
    } else {
        manifest = json::object();
        manifest["failures"] = json::object();
        manifest["seeds"] = json::object();
    }
    manifest["config"] = json::parse(cfg.canonical_json());
    manifest["config_hash"] = hash;
    manifest["code_version"] = kCodeVersion;
    manifest["status"] = "running";

    Shared sh;
    sh.dir = dir;
    if (cfg.kind == Kind::constants || cfg.kind == Kind::mc_maxtwo || cfg.kind == Kind::mc_br_rate)
        sh.constants = cached_constants(cfg, dir);
    if (cfg.kind == Kind::fit) {
        const auto sv = io::ingest_site_values(cfg.input);
        const geometry::Window w{cfg.window_half_side, 0};
        long in_c = 0;
        for (Eigen::Index i = 0; i < sv.sites->rows(); ++i)
            in_c += w.in_c(geometry::site(*sv.sites, i));
        sh.fit_N = static_cast<double>(in_c) / (4 * w.half_side * w.half_side);
        const auto d = geometry::make_design(*sv.sites, w, sh.fit_N);
        Eigen::VectorXd z(d.sites.rows());
        for (Eigen::Index i = 0; i < z.size(); ++i)
            z(i) = sv.values(d.source[static_cast<std::size_t>(i)]);
        sh.fit_data = estimators::FitData{shared_sites(d.sites), z, d.edges, d.triples};
    }
    const long reps = (cfg.kind == Kind::fit || cfg.kind == Kind::constants || cfg.kind == Kind::eval)
                          ? 1
                          : cfg.replications;

    io::ResultWriter writer(results.string(), opt.resume);
    std::mutex mu;
    auto save_manifest = [&] {
        manifest["completed"] = std::vector<long>(done.begin(), done.end());
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        manifest["wall_clock_seconds"] = secs;
        io::write_atomic(manifest_path.string(), manifest.dump(2) + "\n");
    };
    save_manifest();

    std::vector<long> todo;
    for (long r = 0; r < reps; ++r)
        if (!done.count(r))
            todo.push_back(r);
    std::atomic<std::size_t> next{0};
    std::atomic<long> failed{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next++;
            if (i >= todo.size())
                return;
            const long rep = todo[i];
            const SeedRecord seed = SeedRecord::replication(cfg.seed, config::kind_name(cfg.kind),
                                                            static_cast<std::uint64_t>(rep));
            std::vector<ResultRow> rows;
            std::string error;
            try {
                rows = replicate(cfg, rep, seed, sh);
            } catch (const std::exception& e) {
                error = e.what();
            }
            std::lock_guard lock(mu);
            manifest["seeds"][std::to_string(rep)] = {seed.master, seed.stream};
            if (error.empty()) {
                writer.write(rows);
                done.insert(rep);
                manifest["failures"].erase(std::to_string(rep));
            } else {
                ++failed;
                manifest["failures"][std::to_string(rep)] = error;
                if (!opt.quiet)
                    std::cerr << "replication " << rep << " failed: " << error << '\n';
            }
            save_manifest();
        }
    };
    const int nt = std::max(1, std::min<int>(cfg.threads, static_cast<int>(todo.size())));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }

    if (cfg.kind == Kind::constants)
        io::write_atomic((dir / "constants.json").string(), constants_json(*sh.constants, cv3_options(cfg)).dump(2) + "\n");
    manifest["status"] = failed == 0 ? "complete" : "partial";
    save_manifest();
    if (!todo.empty() && failed == static_cast<long>(todo.size()))
        return 3;
    return 0;
}

} // namespace brdel::experiments
