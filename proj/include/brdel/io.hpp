#pragma once

#include "brdel/geometry.hpp"
#include "brdel/maxstable.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace brdel::io {

// One long-format result row.
struct ResultRow {
    long replication_id = 0;
    double N = 0;
    double alpha = 0;
    std::string stat_kind;
    double value = 0;
    long term_count = 0;
    double localtime = 0;
    double constant = 0;
    double prediction = 0;
    std::string aux;
};

inline constexpr const char* kResultHeader =
    "replication_id,N,alpha,stat_kind,value,term_count,localtime,constant,prediction,aux";

std::string format_row(const ResultRow& r);

// Serializes writers from several worker threads into one CSV.
class ResultWriter {
public:
    ResultWriter(const std::string& path, bool append);
    void write(const std::vector<ResultRow>& rows);

private:
    std::mutex mu_;
    std::ofstream out_;
};

// Keeps the header and the rows whose replication id is in `keep`.
void truncate_results(const std::string& path, const std::set<long>& keep);

struct IngestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SiteValues {
    std::shared_ptr<geometry::SiteMatrix> sites;
    Eigen::VectorXd values;
};

// CSV `x,y,value`, values > 0, sites distinct and inside (-h, h]^2 widened by
// `margin` when given.
SiteValues ingest_site_values(const std::string& path, double half_side = 0, double margin = -1);
SiteValues parse_site_values(std::istream& in, const std::string& name, double half_side = 0, double margin = -1);

void write_site_values(const std::string& path, const geometry::SiteMatrix& sites, const Eigen::VectorXd& values);
void write_br_sample(const std::string& path, const maxstable::BrownResnickSample& s);
void write_cell_cover(const std::string& path, const maxstable::CellCover& c);

// write to a temporary file and rename over the target
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace brdel::io
