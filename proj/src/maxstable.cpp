#include "brdel/maxstable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace brdel::maxstable {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Hands out fBm paths one column at a time, drawing them in blocks so the
// triangular product runs as a matrix-matrix multiply.
class PathPool {
public:
    PathPool(const CovFactor& f, Philox rng, int batch) : f_(f), rng_(rng), batch_(std::max(1, batch)) {}

    Eigen::Ref<const Eigen::VectorXd> next()
    {
        if (col_ >= block_.cols()) {
            block_ = gaussfield::draw(f_, rng_, batch_);
            col_ = 0;
        }
        ++drawn_;
        return block_.col(col_++);
    }
    long drawn() const { return drawn_; }

private:
    const CovFactor& f_;
    Philox rng_;
    int batch_;
    Eigen::MatrixXd block_;
    Eigen::Index col_ = 0;
    long drawn_ = 0;
};

Eigen::VectorXd gamma_at(const SiteMatrix& nodes, const Point2& origin, const ModelParams& p)
{
    const double h = p.alpha / 2, s = p.sigma * p.sigma / 2;
    Eigen::VectorXd g(nodes.rows());
    for (Eigen::Index i = 0; i < nodes.rows(); ++i) {
        const double r2 = (nodes.row(i).transpose() - origin).squaredNorm();
        g(i) = r2 > 0 ? s * std::pow(r2, h) : 0.0;
    }
    return g;
}

// Extremal functions (Dombry, Engelke and Oesting): site by site, only the
// Poisson points able to exceed the current value at that site are drawn, and
// a proposal is kept when it does not exceed the earlier sites.
void run_exact(BrownResnickSample& s, const CovFactor& f, const ModelParams& p, const SimulationOptions& opt)
{
    const SiteMatrix& nodes = *s.nodes;
    const Eigen::Index n = nodes.rows();
    Philox erng = s.seed.child("spacings").engine();
    PathPool pool(f, s.seed.child("paths").engine(), opt.batch);
    std::exponential_distribution<double> expo(1.0);

    s.log_eta = Eigen::VectorXd::Constant(n, kNegInf);
    s.argmax_id = Eigen::VectorXi::Constant(n, -1);
    int next_id = 1;
    Eigen::VectorXd cand(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Point2 xj = nodes.row(j).transpose();
        const Eigen::VectorXd gj = gamma_at(nodes, xj, p);
        double gsum = expo(erng);
        while (true) {
            const double log_zeta = -std::log(gsum);
            if (j > 0 && log_zeta <= s.log_eta(j))
                break;
            const auto w = pool.next();
            cand = (log_zeta - w(j)) + w.array() - gj.array();
            bool ok = true;
            for (Eigen::Index i = 0; i < j && ok; ++i)
                ok = cand(i) < s.log_eta(i);
            if (ok) {
                for (Eigen::Index i = j; i < n; ++i)
                    if (cand(i) > s.log_eta(i)) {
                        s.log_eta(i) = cand(i);
                        s.argmax_id(i) = next_id;
                    }
                ++next_id;
            }
            if (j == 0)
                break;
            gsum += expo(erng);
        }
    }
    s.functions = next_id - 1;
    s.proposals = pool.drawn();
}

// Poisson points in decreasing order, Gamma spacings, all functions kept until
// the Borell-TIS bound says no later one can reach the top two anywhere.
void run_truncated(BrownResnickSample& s, const CovFactor& f, const ModelParams& p, const SimulationOptions& opt)
{
    const SiteMatrix& nodes = *s.nodes;
    const Eigen::Index n = nodes.rows();
    const Eigen::VectorXd g = gamma_at(nodes, Point2::Zero(), p);

    // pilot estimate of E sup (W - gamma), on its own stream
    TruncationReport& tr = s.truncation;
    {
        PathPool pilot(f, s.seed.child("pilot").engine(), opt.batch);
        double acc = 0;
        const int m = std::max(1, opt.pilot_draws);
        for (int i = 0; i < m; ++i)
            acc += (pilot.next().array() - g.array()).maxCoeff();
        tr.pilot_mean_sup = acc / m;
    }
    const double var_max = 2 * g.maxCoeff();
    tr.q = tr.pilot_mean_sup + std::sqrt(2 * var_max * std::log(1 / opt.tail_probability));

    Philox erng = s.seed.child("spacings").engine();
    PathPool pool(f, s.seed.child("paths").engine(), opt.batch);
    std::exponential_distribution<double> expo(1.0);

    s.log_eta = Eigen::VectorXd::Constant(n, kNegInf);
    s.second_log = Eigen::VectorXd::Constant(n, kNegInf);
    s.argmax_id = Eigen::VectorXi::Constant(n, -1);
    s.second_id = Eigen::VectorXi::Constant(n, -1);

    double gsum = 0;
    double min_second = kNegInf;
    long id = 0;
    while (true) {
        gsum += expo(erng);
        const double log_u = -std::log(gsum);
        if (log_u + tr.q < min_second) {
            tr.last_log_u = log_u;
            break;
        }
        if (id >= opt.max_functions) {
            tr.last_log_u = log_u;
            tr.hit_cap = true;
            std::ostringstream os;
            os << "truncated simulation stopped at the cap of " << opt.max_functions
               << " functions before the retention bound held";
            s.warnings.push_back(os.str());
            break;
        }
        ++id;
        const auto w = pool.next();
        SpectralFunction sf{id, log_u, {}};
        if (opt.retain_values)
            sf.values = log_u + w.array() - g.array();
        double ms = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double z = log_u + w(i) - g(i);
            if (z > s.log_eta(i)) {
                s.second_log(i) = s.log_eta(i);
                s.second_id(i) = s.argmax_id(i);
                s.log_eta(i) = z;
                s.argmax_id(i) = static_cast<int>(id);
            } else if (z > s.second_log(i)) {
                s.second_log(i) = z;
                s.second_id(i) = static_cast<int>(id);
            }
            ms = std::min(ms, s.second_log(i));
        }
        min_second = ms;
        s.spectral.push_back(std::move(sf));
    }
    tr.min_second = min_second;
    tr.margin = min_second - (tr.last_log_u + tr.q);
    s.functions = id;
    s.proposals = pool.drawn();
}

} // namespace

SiteMatrix lattice(int resolution, double half_side)
{
    if (resolution <= 0)
        return SiteMatrix(0, 2);
    SiteMatrix g(static_cast<Eigen::Index>(resolution) * resolution, 2);
    const double step = 2 * half_side / resolution;
    for (int iy = 0; iy < resolution; ++iy)
        for (int ix = 0; ix < resolution; ++ix) {
            const Eigen::Index r = static_cast<Eigen::Index>(iy) * resolution + ix;
            g(r, 0) = -half_side + (ix + 0.5) * step;
            g(r, 1) = -half_side + (iy + 0.5) * step;
        }
    return g;
}

Eigen::Index BrownResnickSample::index_of(const Point2& x) const
{
    for (Eigen::Index i = 0; i < nodes->rows(); ++i)
        if (nodes->row(i).transpose() == x)
            return i;
    std::ostringstream os;
    os << "site (" << x.x() << ", " << x.y() << ") not in sample";
    throw std::out_of_range(os.str());
}

BrownResnickSample simulate_br(const CovFactor& f, Eigen::Index n_sites, const ModelParams& p,
                               const SeedRecord& seed, const SimulationOptions& opt)
{
    p.validate();
    if (n_sites < 0 || n_sites > f.size())
        throw std::invalid_argument("simulate_br: n_sites out of range");
    if (opt.mode == Mode::truncated && !(opt.tail_probability > 0 && opt.tail_probability < 1))
        throw std::invalid_argument("simulate_br: tail_probability must lie in (0, 1)");
    BrownResnickSample s;
    s.nodes = f.sites;
    s.n_sites = n_sites;
    s.grid_resolution = opt.grid_resolution;
    s.grid_half_side = opt.grid_half_side;
    s.mode = opt.mode;
    s.params = p;
    s.seed = seed;
    if (f.size() == 0)
        return s;
    if (opt.mode == Mode::exact_extremal)
        run_exact(s, f, p, opt);
    else
        run_truncated(s, f, p, opt);
    return s;
}

BrownResnickSample simulate_br(const SiteMatrix& sites, const ModelParams& p, const SeedRecord& seed,
                               const SimulationOptions& opt)
{
    const SiteMatrix grid = lattice(opt.grid_resolution, opt.grid_half_side);
    auto nodes = std::make_shared<SiteMatrix>(sites.rows() + grid.rows(), 2);
    nodes->topRows(sites.rows()) = sites;
    nodes->bottomRows(grid.rows()) = grid;
    const CovFactor f = gaussfield::factorize(nodes, p);
    return simulate_br(f, sites.rows(), p, seed, opt);
}

CellCover build_cell_cover(const BrownResnickSample& sample, const std::vector<int>& node_rows)
{
    if (!sample.diagnostic())
        throw UnsupportedMode("build_cell_cover needs a truncated (spectral-retaining) sample");
    CellCover c;
    const auto m = static_cast<Eigen::Index>(node_rows.size());
    c.nodes.resize(m, 2);
    c.node_index.resize(m);
    c.k.resize(m);
    c.j.resize(m);
    c.gap.resize(m);
    c.flagged.assign(node_rows.size(), 0);
    for (Eigen::Index r = 0; r < m; ++r) {
        const int i = node_rows[r];
        if (i < 0 || i >= sample.nodes->rows())
            throw std::out_of_range("build_cell_cover: node row out of range");
        c.nodes.row(r) = sample.nodes->row(i);
        c.node_index(r) = i;
        c.k(r) = sample.argmax_id(i);
        c.j(r) = sample.second_id(i);
        c.gap(r) = sample.log_eta(i) - sample.second_log(i);
        c.flagged[r] = !(c.gap(r) > c.tolerance);
    }
    return c;
}

CellCover build_cell_cover(const BrownResnickSample& sample, int grid_resolution)
{
    if (!sample.diagnostic())
        throw UnsupportedMode("build_cell_cover needs a truncated (spectral-retaining) sample");
    if (grid_resolution <= 0 || grid_resolution != sample.grid_resolution)
        throw std::invalid_argument("build_cell_cover: sample was not simulated on this grid");
    std::vector<int> rows(static_cast<std::size_t>(grid_resolution) * grid_resolution);
    for (std::size_t r = 0; r < rows.size(); ++r)
        rows[r] = static_cast<int>(sample.n_sites + static_cast<Eigen::Index>(r));
    CellCover c = build_cell_cover(sample, rows);
    c.resolution = grid_resolution;
    return c;
}

double log_increment_u(const BrownResnickSample& s, Eigen::Index i1, Eigen::Index i2)
{
    const double d = (s.nodes->row(i2) - s.nodes->row(i1)).norm();
    if (!(d > 0))
        throw std::invalid_argument("log_increment_u: coincident sites");
    return (s.log_eta(i2) - s.log_eta(i1)) / (s.params.sigma * std::pow(d, s.params.alpha / 2));
}

double log_increment_u(const BrownResnickSample& s, const Point2& x1, const Point2& x2)
{
    return log_increment_u(s, s.index_of(x1), s.index_of(x2));
}

} // namespace brdel::maxstable
