#pragma once

#include <string>

#include "drsyn/ambiguity.hpp"

namespace drsyn {

/// One sample per line, comma separated; a non-numeric first line is a header.
PointSet read_points_csv(const std::string& path);
void write_points_csv(const std::string& path, const PointSet& points);

/// Little-endian: uint32 N, uint32 d, then N*d float64 values row by row.
PointSet read_points_binary(const std::string& path);
void write_points_binary(const std::string& path, const PointSet& points);

/// Dispatches on the extension: ".bin" is binary, anything else CSV.
PointSet read_points(const std::string& path);

}  // namespace drsyn
