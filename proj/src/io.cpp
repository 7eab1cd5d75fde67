#include "brdel/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <set>
#include <sstream>

namespace brdel::io {

namespace {

std::string num(double v)
{
    if (std::isnan(v))
        return "nan";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + '"';
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> f;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ','))
        f.push_back(cur);
    if (!line.empty() && line.back() == ',')
        f.emplace_back();
    return f;
}

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

} // namespace

std::string format_row(const ResultRow& r)
{
    std::ostringstream os;
    os << r.replication_id << ',' << num(r.N) << ',' << num(r.alpha) << ',' << quote(r.stat_kind) << ','
       << num(r.value) << ',' << r.term_count << ',' << num(r.localtime) << ',' << num(r.constant) << ','
       << num(r.prediction) << ',' << quote(r.aux);
    return os.str();
}

ResultWriter::ResultWriter(const std::string& path, bool append)
{
    const bool fresh = !append || !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    out_.open(path, fresh ? std::ios::trunc : std::ios::app);
    if (!out_)
        throw std::runtime_error("cannot open " + path + " for writing");
    if (fresh)
        out_ << kResultHeader << '\n';
    out_.flush();
}

void ResultWriter::write(const std::vector<ResultRow>& rows)
{
    std::lock_guard lock(mu_);
    for (const auto& r : rows)
        out_ << format_row(r) << '\n';
    out_.flush();
}

void truncate_results(const std::string& path, const std::set<long>& keep)
{
    if (!std::filesystem::exists(path))
        return;
    std::ifstream in(path);
    std::string line, out;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            out += line + '\n';
            header = false;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            continue;
        try {
            if (keep.count(std::stol(line.substr(0, comma))))
                out += line + '\n';
        } catch (const std::exception&) {
            // a torn last line from a killed run
        }
    }
    write_atomic(path, out);
}

SiteValues parse_site_values(std::istream& in, const std::string& name, double half_side, double margin)
{
    std::string line;
    long lineno = 0;
    auto fail = [&](const std::string& msg) -> IngestError {
        return IngestError(name + ":" + std::to_string(lineno) + ": " + msg);
    };
    if (!std::getline(in, line))
        throw IngestError(name + ": empty file");
    ++lineno;
    {
        auto h = split(trim(line));
        for (auto& s : h)
            s = trim(s);
        if (h != std::vector<std::string>{"x", "y", "value"})
            throw fail("header must be x,y,value");
    }
    std::vector<double> xs, ys, vs;
    std::set<std::pair<double, double>> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty())
            continue;
        const auto f = split(trim(line));
        if (f.size() != 3)
            throw fail("expected 3 fields, got " + std::to_string(f.size()));
        double v[3];
        for (int k = 0; k < 3; ++k) {
            const std::string s = trim(f[k]);
            std::size_t used = 0;
            try {
                v[k] = std::stod(s, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (s.empty() || used != s.size() || !std::isfinite(v[k]))
                throw fail("field " + std::to_string(k + 1) + " is not a finite number: '" + s + "'");
        }
        if (!(v[2] > 0))
            throw fail("value must be positive");
        if (margin >= 0) {
            const double h = half_side + margin;
            if (!(v[0] > -h && v[0] <= h && v[1] > -h && v[1] <= h))
                throw fail("site outside the declared window");
        }
        if (!seen.insert({v[0], v[1]}).second)
            throw fail("duplicate site");
        xs.push_back(v[0]);
        ys.push_back(v[1]);
        vs.push_back(v[2]);
    }
    if (xs.empty())
        throw IngestError(name + ": no data rows");
    SiteValues sv;
    sv.sites = std::make_shared<geometry::SiteMatrix>(static_cast<Eigen::Index>(xs.size()), 2);
    sv.values.resize(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        (*sv.sites)(i, 0) = xs[i];
        (*sv.sites)(i, 1) = ys[i];
        sv.values(i) = vs[i];
    }
    return sv;
}

SiteValues ingest_site_values(const std::string& path, double half_side, double margin)
{
    std::ifstream in(path);
    if (!in)
        throw IngestError(path + ": cannot open");
    return parse_site_values(in, path, half_side, margin);
}

void write_site_values(const std::string& path, const geometry::SiteMatrix& sites, const Eigen::VectorXd& values)
{
    std::ostringstream os;
    os << "x,y,value\n" << std::setprecision(17);
    for (Eigen::Index i = 0; i < sites.rows(); ++i)
        os << sites(i, 0) << ',' << sites(i, 1) << ',' << values(i) << '\n';
    write_atomic(path, os.str());
}

void write_br_sample(const std::string& path, const maxstable::BrownResnickSample& s)
{
    std::ostringstream os;
    os << "x,y,eta,argmax_id\n" << std::setprecision(17);
    for (Eigen::Index i = 0; i < s.nodes->rows(); ++i)
        os << (*s.nodes)(i, 0) << ',' << (*s.nodes)(i, 1) << ',' << s.eta(i) << ',' << s.argmax_id(i) << '\n';
    write_atomic(path, os.str());
}

void write_cell_cover(const std::string& path, const maxstable::CellCover& c)
{
    std::ostringstream os;
    os << "gx,gy,k,j\n" << std::setprecision(17);
    for (Eigen::Index i = 0; i < c.nodes.rows(); ++i)
        os << c.nodes(i, 0) << ',' << c.nodes(i, 1) << ',' << c.k(i) << ',' << c.j(i) << '\n';
    write_atomic(path, os.str());
}

void write_atomic(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open " + tmp + " for writing");
        out << content;
        if (!out.flush())
            throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace brdel::io
