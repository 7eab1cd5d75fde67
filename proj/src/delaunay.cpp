#include "brdel/geometry.hpp"
#include "brdel/predicates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace brdel::geometry {

namespace {

constexpr int kGhost = -1;

struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> n; // n[i] lies across the edge opposite v[i]
    bool alive = true;
};

std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y)
{
    constexpr std::uint32_t n = 1u << 16;
    std::uint64_t d = 0;
    for (std::uint32_t s = n / 2; s > 0; s /= 2) {
        const std::uint32_t rx = (x & s) > 0;
        const std::uint32_t ry = (y & s) > 0;
        d += std::uint64_t(s) * s * ((3 * rx) ^ ry);
        if (ry == 0) {
            if (rx == 1) {
                x = n - 1 - x;
                y = n - 1 - y;
            }
            std::swap(x, y);
        }
    }
    return d;
}

class Builder {
public:
    explicit Builder(const SiteMatrix& p) : p_(p) {}

    Triangulation run();

private:
    Point2 pt(int i) const { return p_.row(i).transpose(); }
    bool lexlt(int a, int b) const { return lex_less(pt(a), pt(b)); }
    static int ghost_pos(const Tri& t)
    {
        for (int i = 0; i < 3; ++i)
            if (t.v[i] == kGhost)
                return i;
        return -1;
    }

    int incircle_sos(int a, int b, int c, int d) const;
    bool conflict(int t, int q) const;
    int locate(int q);
    void insert(int q);
    int alloc();
    void link_initial();

    const SiteMatrix& p_;
    std::vector<Tri> tris_;
    std::vector<int> free_;
    std::vector<unsigned> in_, out_;
    unsigned stamp_ = 0;
    int last_ = 0;
};

int Builder::incircle_sos(int a, int b, int c, int d) const
{
    const int s = incircle(pt(a), pt(b), pt(c), pt(d));
    if (s != 0)
        return s;
    std::array<int, 4> order{a, b, c, d};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return lexlt(i, j); });
    // sign of the derivative of the lifted determinant in each height,
    // taken in priority order
    for (int v : order) {
        int r;
        if (v == a)
            r = orient2d(pt(b), pt(c), pt(d));
        else if (v == b)
            r = -orient2d(pt(a), pt(c), pt(d));
        else if (v == c)
            r = orient2d(pt(a), pt(b), pt(d));
        else
            r = -orient2d(pt(a), pt(b), pt(c));
        if (r != 0)
            return r;
    }
    return 0;
}

bool Builder::conflict(int t, int q) const
{
    const Tri& T = tris_[t];
    const int g = ghost_pos(T);
    if (g < 0)
        return incircle_sos(T.v[0], T.v[1], T.v[2], q) > 0;
    const int a = T.v[(g + 1) % 3];
    const int b = T.v[(g + 2) % 3];
    const int o = orient2d(pt(a), pt(b), pt(q));
    if (o != 0)
        return o > 0;
    // on the supporting line: only the open segment counts
    return (lexlt(a, q) && lexlt(q, b)) || (lexlt(b, q) && lexlt(q, a));
}

int Builder::alloc()
{
    if (!free_.empty()) {
        const int t = free_.back();
        free_.pop_back();
        return t;
    }
    tris_.push_back({});
    in_.push_back(0);
    out_.push_back(0);
    return static_cast<int>(tris_.size()) - 1;
}

int Builder::locate(int q)
{
    int t = last_;
    if (!tris_[t].alive || ghost_pos(tris_[t]) >= 0) {
        for (t = 0; t < static_cast<int>(tris_.size()); ++t)
            if (tris_[t].alive && ghost_pos(tris_[t]) < 0)
                break;
    }
    int rot = 0;
    for (;;) {
        const Tri& T = tris_[t];
        bool moved = false;
        for (int k = 0; k < 3; ++k) {
            const int i = (k + rot) % 3;
            if (orient2d(pt(T.v[(i + 1) % 3]), pt(T.v[(i + 2) % 3]), pt(q)) < 0) {
                t = T.n[i];
                moved = true;
                break;
            }
        }
        if (!moved || ghost_pos(tris_[t]) >= 0)
            return t;
        rot = (rot + 1) % 3;
    }
}

void Builder::insert(int q)
{
    const int seed = locate(q);
    ++stamp_;
    std::vector<int> cavity{seed};
    in_[seed] = stamp_;

    struct BEdge {
        int u, w, outer;
    };
    std::vector<BEdge> boundary;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
        const int t = cavity[k];
        for (int i = 0; i < 3; ++i) {
            const int nb = tris_[t].n[i];
            if (in_[nb] == stamp_)
                continue;
            if (out_[nb] != stamp_) {
                if (conflict(nb, q)) {
                    in_[nb] = stamp_;
                    cavity.push_back(nb);
                    continue;
                }
                out_[nb] = stamp_;
            }
            boundary.push_back({tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3], nb});
        }
    }

    for (int t : cavity)
        tris_[t].alive = false;
    free_.insert(free_.end(), cavity.begin(), cavity.end());

    std::vector<int> made(boundary.size());
    std::vector<std::pair<int, int>> by_start(boundary.size());
    for (std::size_t j = 0; j < boundary.size(); ++j) {
        const auto& e = boundary[j];
        const int s = alloc();
        Tri& T = tris_[s];
        T.v = {e.u, e.w, q};
        T.n = {-1, -1, e.outer};
        T.alive = true;
        Tri& O = tris_[e.outer];
        for (int m = 0; m < 3; ++m)
            if (O.v[(m + 1) % 3] == e.w && O.v[(m + 2) % 3] == e.u)
                O.n[m] = s;
        made[j] = s;
        by_start[j] = {e.u, s};
        if (e.u != kGhost && e.w != kGhost)
            last_ = s;
    }
    std::sort(by_start.begin(), by_start.end());
    auto find_start = [&](int v) {
        auto it = std::lower_bound(by_start.begin(), by_start.end(), std::make_pair(v, -1));
        return it->second;
    };
    for (std::size_t j = 0; j < boundary.size(); ++j) {
        const int s = made[j];
        const int nxt = find_start(boundary[j].w);
        tris_[s].n[0] = nxt;  // edge (w, q)
        tris_[nxt].n[1] = s;  // its edge (q, u') with u' = w
    }
}

void Builder::link_initial()
{
    for (std::size_t t = 0; t < tris_.size(); ++t)
        for (int i = 0; i < 3; ++i) {
            const int a = tris_[t].v[(i + 1) % 3], b = tris_[t].v[(i + 2) % 3];
            for (std::size_t s = 0; s < tris_.size(); ++s)
                for (int m = 0; m < 3; ++m)
                    if (tris_[s].v[(m + 1) % 3] == b && tris_[s].v[(m + 2) % 3] == a)
                        tris_[t].n[i] = static_cast<int>(s);
        }
}

Triangulation Builder::run()
{
    const int n = static_cast<int>(p_.rows());
    if (n < 3)
        throw DegenerateInput("delaunay: need at least 3 points, got " + std::to_string(n));
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(p_(i, 0)) || !std::isfinite(p_(i, 1)))
            throw DegenerateInput("delaunay: non-finite coordinate at point " + std::to_string(i));

    std::vector<int> lex(n);
    std::iota(lex.begin(), lex.end(), 0);
    std::sort(lex.begin(), lex.end(), [&](int a, int b) { return lexlt(a, b); });
    for (int i = 1; i < n; ++i)
        if (!lexlt(lex[i - 1], lex[i])) {
            std::ostringstream os;
            os << "delaunay: duplicate point (" << p_(lex[i], 0) << ", " << p_(lex[i], 1) << ") at indices "
               << lex[i - 1] << " and " << lex[i];
            throw DegenerateInput(os.str());
        }

    const Eigen::Vector2d lo = p_.colwise().minCoeff().transpose();
    const Eigen::Vector2d hi = p_.colwise().maxCoeff().transpose();
    const Eigen::Vector2d span = (hi - lo).cwiseMax(1e-300);
    std::vector<std::pair<std::uint64_t, int>> keyed(n);
    for (int i = 0; i < n; ++i) {
        const auto gx = static_cast<std::uint32_t>(std::min(65535.0, (p_(i, 0) - lo.x()) / span.x() * 65535.0));
        const auto gy = static_cast<std::uint32_t>(std::min(65535.0, (p_(i, 1) - lo.y()) / span.y() * 65535.0));
        keyed[i] = {hilbert_index(gx, gy), i};
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i)
        order[i] = keyed[i].second;

    int a = order[0], b = order[1], c = -1, ci = -1;
    for (int k = 2; k < n; ++k)
        if (orient2d(pt(a), pt(b), pt(order[k])) != 0) {
            c = order[k];
            ci = k;
            break;
        }
    if (c < 0)
        throw DegenerateInput("delaunay: all points are collinear");
    if (orient2d(pt(a), pt(b), pt(c)) < 0)
        std::swap(b, c);

    tris_ = {Tri{{a, b, c}, {-1, -1, -1}}, Tri{{b, a, kGhost}, {-1, -1, -1}},
             Tri{{c, b, kGhost}, {-1, -1, -1}}, Tri{{a, c, kGhost}, {-1, -1, -1}}};
    in_.assign(4, 0);
    out_.assign(4, 0);
    link_initial();
    last_ = 0;

    for (int k = 2; k < n; ++k)
        if (k != ci)
            insert(order[k]);

    Triangulation out;
    out.vertices = p_;
    for (const Tri& T : tris_) {
        if (!T.alive)
            continue;
        if (ghost_pos(T) >= 0) {
            ++out.hull_size;
            continue;
        }
        std::array<int, 3> v = T.v;
        std::rotate(v.begin(), std::min_element(v.begin(), v.end()), v.end());
        out.triangles.push_back(v);
    }
    std::sort(out.triangles.begin(), out.triangles.end());
    out.adjacency.assign(n, {});
    for (const auto& t : out.triangles)
        for (int i = 0; i < 3; ++i) {
            const int u = t[i], w = t[(i + 1) % 3];
            out.edges.push_back({std::min(u, w), std::max(u, w)});
        }
    std::sort(out.edges.begin(), out.edges.end());
    out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
    for (const auto& e : out.edges) {
        out.adjacency[e[0]].push_back(e[1]);
        out.adjacency[e[1]].push_back(e[0]);
    }
    for (auto& adj : out.adjacency)
        std::sort(adj.begin(), adj.end());
    return out;
}

} // namespace

Triangulation delaunay(const SiteMatrix& points) { return Builder(points).run(); }

} // namespace brdel::geometry
