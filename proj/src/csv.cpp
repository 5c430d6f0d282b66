#include "ladreg/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>
#include <vector>

#include "ladreg/errors.hpp"

namespace ladreg {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_real(const std::string& field, std::size_t line_no, const char* what) {
    std::size_t consumed = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &consumed);
    } catch (const std::exception&) {
        throw DataError("line " + std::to_string(line_no) + ": cannot parse " + what + " '" +
                        field + "'");
    }
    if (consumed != field.size())
        throw DataError("line " + std::to_string(line_no) + ": trailing junk in " + what + " '" +
                        field + "'");
    if (!std::isfinite(v))
        throw DataError("line " + std::to_string(line_no) + ": non-finite " + what);
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Dataset ingest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file: " + path);

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    ++line_no;
    if (trim(line) != "subject_id,x,y")
        throw DataError("line 1: expected header 'subject_id,x,y'");

    std::map<std::string, std::vector<std::pair<double, double>>> groups;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        // Terminal summary record written by the CLI tools.
        if (t.rfind("STATUS=", 0) == 0) continue;
        std::istringstream row(t);
        std::string id, xs, ys, extra;
        if (!std::getline(row, id, ',') || !std::getline(row, xs, ',') ||
            !std::getline(row, ys, ','))
            throw DataError("line " + std::to_string(line_no) + ": expected subject_id,x,y");
        if (std::getline(row, extra, ','))
            throw DataError("line " + std::to_string(line_no) + ": too many fields");
        id = trim(id);
        if (id.empty()) throw DataError("line " + std::to_string(line_no) + ": empty subject_id");
        const double x = parse_real(trim(xs), line_no, "x");
        const double y = parse_real(trim(ys), line_no, "y");
        groups[id].emplace_back(x, y);
    }
    if (groups.empty()) throw DataError("no data rows in " + path);

    Dataset data;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (auto& [id, pts] : groups) {
        std::sort(pts.begin(), pts.end());
        Subject subj;
        subj.id = id;
        subj.x.reserve(pts.size());
        subj.y.reserve(pts.size());
        for (const auto& [x, y] : pts) {
            subj.x.push_back(x);
            subj.y.push_back(y);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        data.subjects.push_back(std::move(subj));
    }
    data.a = lo;
    data.b = hi;
    return data;
}

void export_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    out << "subject_id,x,y\n";
    for (const auto& subj : data.subjects)
        for (std::size_t j = 0; j < subj.x.size(); ++j)
            out << subj.id << ',' << format_double(subj.x[j]) << ',' << format_double(subj.y[j])
                << '\n';
    if (!out) throw DataError("failed writing " + path);
}

}  // namespace ladreg
