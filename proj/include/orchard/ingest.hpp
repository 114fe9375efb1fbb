#pragma once

#include <string>
#include <vector>

#include "orchard/geometry.hpp"
#include "orchard/terrain.hpp"

namespace orchard {

// One line of pmatrix.txt: an image name followed by its row-major 3x4
// projection matrix.
struct ImagePose {
    std::string image_name;
    Mat34 pmatrix;
};

// Additive offset between local project coordinates and global coordinates:
// global = local + offset.
struct WorldOffset {
    double x = 0.0, y = 0.0, z = 0.0;
};

// Grammar: `<image_name> <12 floats>` per non-blank line, order preserved.
std::vector<ImagePose> parse_pmatrix(const std::string& text);

// Single non-blank line of three floats.
WorldOffset parse_offset(const std::string& text);

// ESRI ASCII grid: ncols/nrows/xllcorner/yllcorner/cellsize headers
// (NODATA_value optional, default -9999), then nrows rows of ncols values,
// first data row northernmost.
TerrainGrid parse_ascii_grid(const std::string& text);

// CSV with header `row,start_x,start_y,end_x,end_y,spacing`.
std::vector<RowSpec> parse_rows_csv(const std::string& text);

std::string write_pmatrix(const std::vector<ImagePose>& poses, int significant_digits = 12);
std::string write_offset(const WorldOffset& offset, int significant_digits = 12);
std::string write_ascii_grid(const TerrainGrid& grid, int significant_digits = 12);
std::string write_rows_csv(const std::vector<RowSpec>& rows, int significant_digits = 12);

} // namespace orchard
