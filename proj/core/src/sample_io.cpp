#include "drsyn/sample_io.hpp"

#include <bit>
#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "drsyn/error.hpp"

namespace drsyn {

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
    out.clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const char* b = cell.c_str();
        char* e = nullptr;
        errno = 0;
        const double v = std::strtod(b, &e);
        while (*e == ' ' || *e == '\t' || *e == '\r') ++e;
        if (e == b || *e != '\0' || errno == ERANGE) return false;
        out.push_back(v);
    }
    return !out.empty();
}

template <class T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
        std::memcpy(&v, b, sizeof(T));
    }
    return v;
}

}  // namespace

PointSet read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open sample file '" + path + "'");
    std::string line;
    std::vector<double> row, data;
    std::size_t dim = 0, lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (!parse_row(line, row)) {
            if (dim == 0 && data.empty() && lineno == 1) continue;  // header
            throw InvalidInput(path + ":" + std::to_string(lineno) + ": malformed sample row");
        }
        if (dim == 0) dim = row.size();
        if (row.size() != dim) throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(dim) + " columns");
        data.insert(data.end(), row.begin(), row.end());
    }
    if (dim == 0) throw InvalidInput("sample file '" + path + "' contains no samples");
    return PointSet(dim, std::move(data));
}

void write_points_csv(const std::string& path, const PointSet& points) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << std::setprecision(17);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto r = points.row(i);
        for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << r[k];
        out << '\n';
    }
}

PointSet read_points_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open sample file '" + path + "'");
    std::uint32_t n = 0, d = 0;
    in.read(reinterpret_cast<char*>(&n), 4);
    in.read(reinterpret_cast<char*>(&d), 4);
    if (!in) throw InvalidInput("sample file '" + path + "' has a truncated header");
    n = to_little(n);
    d = to_little(d);
    if (n == 0 || d == 0) throw InvalidInput("sample file '" + path + "' declares an empty matrix");
    std::vector<double> data(static_cast<std::size_t>(n) * d);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (!in) throw InvalidInput("sample file '" + path + "' is shorter than its header declares");
    for (double& v : data) v = to_little(v);
    return PointSet(d, std::move(data));
}

void write_points_binary(const std::string& path, const PointSet& points) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    const std::uint32_t n = to_little(static_cast<std::uint32_t>(points.size()));
    const std::uint32_t d = to_little(static_cast<std::uint32_t>(points.dim()));
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&d), 4);
    for (double v : points.data()) {
        const double le = to_little(v);
        out.write(reinterpret_cast<const char*>(&le), sizeof(double));
    }
}

PointSet read_points(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0) return read_points_binary(path);
    return read_points_csv(path);
}

}  // namespace drsyn
