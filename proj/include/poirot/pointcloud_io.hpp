#pragma once

#include <iosfwd>
#include <string>

#include "poirot/geometry.hpp"

namespace poirot {

/// XYZ text format: one point per line, "x y z [nx ny nz] [label]",
/// whitespace separated. Lines starting with '#' and blank lines are
/// skipped. Non-finite coordinates are rejected with the offending line
/// number.
PointCloud read_xyz(std::istream& in, const std::string& name = "<xyz>");
PointCloud read_xyz_file(const std::string& path);
void write_xyz(std::ostream& out, const PointCloud& cloud);
void write_xyz_file(const std::string& path, const PointCloud& cloud);

/// ASCII OFF, vertices only; face records are ignored.
PointCloud read_off(std::istream& in, const std::string& name = "<off>");
PointCloud read_off_file(const std::string& path);

/// ASCII PLY, vertex element only; other elements are skipped.
PointCloud read_ply(std::istream& in, const std::string& name = "<ply>");
PointCloud read_ply_file(const std::string& path);

/// Dispatch on extension: .xyz, .off, .ply.
PointCloud read_point_cloud(const std::string& path);

} // namespace poirot
