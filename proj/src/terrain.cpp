#include "orchard/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "orchard/util.hpp"

namespace orchard {

double sample_terrain(const TerrainGrid& grid, double x, double y) {
    double width = grid.ncols * grid.cellsize;
    double height = grid.nrows * grid.cellsize;
    if (x < grid.xll || x > grid.xll + width || y < grid.yll || y > grid.yll + height) {
        fail(ErrorKind::out_of_extent,
             "query (" + format_g(x) + ", " + format_g(y) + ") outside grid extent");
    }

    // Fractional position in the cell-centre lattice; row measured from the
    // southern edge, converted to the stored north-first row order below.
    double gx = (x - grid.xll) / grid.cellsize - 0.5;
    double gy = (y - grid.yll) / grid.cellsize - 0.5;
    gx = std::clamp(gx, 0.0, static_cast<double>(grid.ncols - 1));
    gy = std::clamp(gy, 0.0, static_cast<double>(grid.nrows - 1));

    int c0 = std::min(static_cast<int>(std::floor(gx)), std::max(grid.ncols - 2, 0));
    int r0 = std::min(static_cast<int>(std::floor(gy)), std::max(grid.nrows - 2, 0));
    int c1 = std::min(c0 + 1, grid.ncols - 1);
    int r1 = std::min(r0 + 1, grid.nrows - 1);
    double fx = gx - c0;
    double fy = gy - r0;

    auto value = [&](int row_from_bottom, int col) {
        return grid.at(grid.nrows - 1 - row_from_bottom, col);
    };
    double v00 = value(r0, c0), v01 = value(r0, c1);
    double v10 = value(r1, c0), v11 = value(r1, c1);
    for (double v : {v00, v01, v10, v11}) {
        if (grid.is_nodata(v)) {
            fail(ErrorKind::nodata_cell,
                 "NODATA cell near (" + format_g(x) + ", " + format_g(y) + ")");
        }
    }

    double bottom = v00 * (1.0 - fx) + v01 * fx;
    double top = v10 * (1.0 - fx) + v11 * fx;
    return bottom * (1.0 - fy) + top * fy;
}

std::vector<TreePosition> extrapolate_row(const RowSpec& spec) {
    double dx = spec.end_x - spec.start_x;
    double dy = spec.end_y - spec.start_y;
    double length = std::hypot(dx, dy);

    std::vector<TreePosition> out;
    if (length == 0.0) {
        out.push_back(TreePosition{0, spec.start_x, spec.start_y});
        return out;
    }
    // Small relative slack absorbs representation error in length/spacing.
    int n = static_cast<int>(std::floor(length / spec.spacing * (1.0 + 1e-12))) + 1;
    double ux = dx / length, uy = dy / length;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double d = i * spec.spacing;
        out.push_back(TreePosition{i, spec.start_x + d * ux, spec.start_y + d * uy});
    }
    return out;
}

std::string make_tree_id(int row, int col) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "R%02dC%02d", row, col);
    return buf;
}

std::vector<TreeRecord> build_tree_records(std::span<const RowSpec> rows,
                                           const TerrainGrid& dtm,
                                           const TerrainGrid& dsm) {
    // Identifier uniqueness needs distinct row indices.
    std::set<int> seen_rows;
    for (const RowSpec& row : rows) {
        if (!seen_rows.insert(row.row_index).second) {
            fail(ErrorKind::domain_error,
                 "duplicate row index " + std::to_string(row.row_index) + " in row specs");
        }
    }

    std::vector<TreeRecord> out;
    for (const RowSpec& row : rows) {
        for (const TreePosition& pos : extrapolate_row(row)) {
            std::string id = make_tree_id(row.row_index, pos.col);
            auto annotate = [&](const Error& e) -> Error {
                return Error(e.kind(), std::string(e.what()) + " [tree " + id + " at (" +
                                           format_g(pos.x) + ", " + format_g(pos.y) + ")]");
            };
            double base_z, top_z;
            try {
                base_z = sample_terrain(dtm, pos.x, pos.y);
                top_z = sample_terrain(dsm, pos.x, pos.y);
            } catch (const Error& e) {
                throw annotate(e);
            }
            if (top_z < base_z) {
                throw annotate(Error(ErrorKind::elevation_inversion,
                                     "DSM (" + format_g(top_z) + ") below DTM (" +
                                         format_g(base_z) + ")"));
            }
            TreeRecord rec;
            rec.tree_id = std::move(id);
            rec.row = row.row_index;
            rec.col = pos.col;
            rec.base = WorldPoint{pos.x, pos.y, base_z};
            rec.top = WorldPoint{pos.x, pos.y, top_z};
            out.push_back(std::move(rec));
        }
    }
    return out;
}

} // namespace orchard
