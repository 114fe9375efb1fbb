#pragma once

#include <span>
#include <string>
#include <vector>

#include "orchard/geometry.hpp"

namespace orchard {

// Georeferenced elevation raster. Row 0 of `values` is the northernmost row
// (largest y), matching the on-disk layout of ESRI ASCII grids.
struct TerrainGrid {
    int ncols = 0, nrows = 0;
    double xll = 0.0, yll = 0.0; // lower-left corner of the lower-left cell
    double cellsize = 1.0;
    double nodata = -9999.0;
    std::vector<double> values; // nrows * ncols, row-major

    double at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * static_cast<std::size_t>(ncols) +
                      static_cast<std::size_t>(col)];
    }
    bool is_nodata(double v) const { return v == nodata; }
};

// Bilinear interpolation over cell centres. Queries in the outer half-cell
// margin clamp to the edge centres; queries outside the grid extent throw
// out_of_extent, and a NODATA value among the four surrounding centres throws
// nodata_cell.
double sample_terrain(const TerrainGrid& grid, double x, double y);

// One orchard row: RTK positions of the first and last tree base plus the
// grower's tree spacing.
struct RowSpec {
    int row_index = 0;
    double start_x = 0.0, start_y = 0.0;
    double end_x = 0.0, end_y = 0.0;
    double spacing = 1.0;
};

struct TreePosition {
    int col = 0;
    double x = 0.0, y = 0.0;
};

// Positions trees every `spacing` metres from start towards end; a residual
// shorter than one spacing is dropped. Columns are numbered from 0.
std::vector<TreePosition> extrapolate_row(const RowSpec& spec);

struct TreeRecord {
    std::string tree_id;
    int row = 0, col = 0;
    WorldPoint base;
    WorldPoint top;
};

// "R{row:02}C{col:02}", widening past two digits as needed.
std::string make_tree_id(int row, int col);

// base.z from the DTM, top.z from the DSM, top sharing the base (x, y).
// Sampling failures and DSM < DTM cells are reported with the offending tree.
std::vector<TreeRecord> build_tree_records(std::span<const RowSpec> rows,
                                           const TerrainGrid& dtm,
                                           const TerrainGrid& dsm);

} // namespace orchard
