#include "orchard/synth.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "orchard/util.hpp"

namespace orchard {

namespace {

double ground_elevation(TerrainKind kind, double x, double y) {
    switch (kind) {
        case TerrainKind::flat: return 100.0;
        case TerrainKind::inclined: return 100.0 + 0.02 * x + 0.01 * y;
        case TerrainKind::sinusoid:
            return 100.0 + 0.8 * std::sin(x / 11.0) + 0.5 * std::cos(y / 7.0);
    }
    return 100.0;
}

double canopy_height(double x, double y) {
    return 2.5 + 0.6 * std::sin(x / 5.0 + y / 9.0);
}

TerrainGrid make_grid(double x0, double y0, double x1, double y1, double cellsize,
                      TerrainKind kind, bool surface, const WorldOffset& offset) {
    TerrainGrid grid;
    grid.cellsize = cellsize;
    grid.ncols = static_cast<int>(std::ceil((x1 - x0) / cellsize)) + 1;
    grid.nrows = static_cast<int>(std::ceil((y1 - y0) / cellsize)) + 1;
    grid.xll = x0 + offset.x;
    grid.yll = y0 + offset.y;
    grid.nodata = -9999.0;
    grid.values.resize(static_cast<std::size_t>(grid.ncols) * static_cast<std::size_t>(grid.nrows));
    for (int r = 0; r < grid.nrows; ++r) {
        // Stored row 0 is the northernmost row.
        int row_from_bottom = grid.nrows - 1 - r;
        double y = y0 + (row_from_bottom + 0.5) * cellsize;
        for (int c = 0; c < grid.ncols; ++c) {
            double x = x0 + (c + 0.5) * cellsize;
            double z = ground_elevation(kind, x, y);
            if (surface) z += canopy_height(x, y);
            grid.values[static_cast<std::size_t>(r) * static_cast<std::size_t>(grid.ncols) +
                        static_cast<std::size_t>(c)] = z + offset.z;
        }
    }
    return grid;
}

// Right-handed camera basis: z forward, y as close to `up_hint` as possible.
CameraExtrinsics look_at(const WorldPoint& eye, const WorldPoint& target) {
    double fx = target.x - eye.x, fy = target.y - eye.y, fz = target.z - eye.z;
    double fn = std::sqrt(fx * fx + fy * fy + fz * fz);
    fx /= fn;
    fy /= fn;
    fz /= fn;
    // x = normalize(up x z), y = z cross x.
    double ux = 0.0, uy = 0.0, uz = 1.0;
    double xx = uy * fz - uz * fy, xy = uz * fx - ux * fz, xz = ux * fy - uy * fx;
    double xn = std::sqrt(xx * xx + xy * xy + xz * xz);
    xx /= xn;
    xy /= xn;
    xz /= xn;
    double yx = fy * xz - fz * xy, yy = fz * xx - fx * xz, yz = fx * xy - fy * xx;

    CameraExtrinsics ext;
    ext.rotation.m = {xx, yx, fx,
                      xy, yy, fy,
                      xz, yz, fz};
    ext.translation = eye;
    return ext;
}

} // namespace

Scene generate_scene(const SceneSpec& spec) {
    Scene scene;
    scene.spec = spec;
    scene.offset = WorldOffset{345000.0, 5621000.0, 0.0};

    double span_x = (spec.trees_per_row - 1) * spec.spacing;
    double span_y = (spec.n_rows - 1) * spec.row_gap;

    std::mt19937_64 rng(mix_seed(spec.seed, 0));
    for (int r = 0; r < spec.n_rows; ++r) {
        RowSpec row;
        row.row_index = r;
        double y = r * spec.row_gap;
        row.start_x = 0.0 + scene.offset.x;
        row.start_y = y + scene.offset.y;
        row.end_x = span_x + scene.offset.x;
        row.end_y = y + scene.offset.y;
        row.spacing = spec.spacing;
        scene.rows.push_back(row);
    }

    scene.dtm = make_grid(-12.0, -12.0, span_x + 12.0, span_y + 12.0, 1.0, spec.terrain, false,
                          scene.offset);
    scene.dsm = make_grid(-12.0, -12.0, span_x + 12.0, span_y + 12.0, 1.0, spec.terrain, true,
                          scene.offset);
    scene.trees = build_tree_records(scene.rows, scene.dtm, scene.dsm);

    // Oblique camera track south of the orchard, stepped for the requested
    // frame overlap but never wider than what covers the rows end to end.
    double stand_off = 10.0;
    double altitude = 14.0;
    double mid_y = span_y / 2.0;
    double cam_y = -stand_off;
    double view_distance = std::hypot(mid_y - cam_y, altitude);
    double footprint = spec.image_width / spec.focal_px * view_distance;
    double step = footprint * (1.0 - spec.overlap_fraction);
    double track_begin = -4.0, track_end = span_x + 4.0;
    if (spec.n_poses > 1) {
        step = std::min(step, (track_end - track_begin) / (spec.n_poses - 1));
    }

    for (int i = 0; i < spec.n_poses; ++i) {
        double cx = track_begin + i * step + uniform_range(rng, -0.2, 0.2);
        double cy = cam_y + uniform_range(rng, -0.4, 0.4);
        double ground = ground_elevation(spec.terrain, cx, 0.0);
        WorldPoint eye{cx, cy, ground + altitude + uniform_range(rng, -0.5, 0.5)};
        WorldPoint target{cx + uniform_range(rng, -0.5, 0.5), mid_y,
                          ground_elevation(spec.terrain, cx, mid_y) + 1.5};

        ScenePose pose;
        char name[32];
        std::snprintf(name, sizeof(name), "img_%03d.png", i);
        pose.image_name = name;
        pose.extrinsics = look_at(eye, target);
        pose.intrinsics.focal_length = spec.focal_px;
        pose.intrinsics.cx = spec.image_width / 2.0;
        pose.intrinsics.cy = spec.image_height / 2.0;
        pose.intrinsics.image_width = spec.image_width;
        pose.intrinsics.image_height = spec.image_height;
        scene.poses.push_back(pose);
        scene.image_poses.push_back(
            ImagePose{pose.image_name, compose_projection(pose.extrinsics, pose.intrinsics)});
    }

    // Exhaustive groundtruth sightings: every tree through every composed
    // matrix, with the direct homogeneous arithmetic written out here.
    for (std::size_t p = 0; p < scene.image_poses.size(); ++p) {
        const Mat34& m = scene.image_poses[p].pmatrix;
        auto project = [&](const WorldPoint& global, PixelPoint& px, double& depth) {
            double x = global.x - scene.offset.x;
            double y = global.y - scene.offset.y;
            double z = global.z - scene.offset.z;
            double hu = m(0, 0) * x + m(0, 1) * y + m(0, 2) * z + m(0, 3);
            double hv = m(1, 0) * x + m(1, 1) * y + m(1, 2) * z + m(1, 3);
            double hw = m(2, 0) * x + m(2, 1) * y + m(2, 2) * z + m(2, 3);
            if (!(hw > kMinProjectionDepth)) return false;
            px.u = hu / hw;
            px.v = hv / hw;
            depth = hw;
            return px.u >= 0.0 && px.u < spec.image_width && px.v >= 0.0 &&
                   px.v < spec.image_height;
        };
        for (const TreeRecord& tree : scene.trees) {
            PixelPoint base_px, top_px;
            double base_depth = 0.0, top_depth = 0.0;
            if (!project(tree.base, base_px, base_depth)) continue;
            if (!project(tree.top, top_px, top_depth)) continue;
            scene.sightings.push_back(TreeSighting{tree.tree_id, scene.image_poses[p].image_name,
                                                   base_px, top_px, base_depth});
        }
    }
    return scene;
}

void write_scene_files(const Scene& scene, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const int digits = 17; // full double precision, exact re-parse
    write_text_file_atomic(dir / "pmatrix.txt", write_pmatrix(scene.image_poses, digits));
    write_text_file_atomic(dir / "offset.xyz", write_offset(scene.offset, digits));
    write_text_file_atomic(dir / "dtm.asc", write_ascii_grid(scene.dtm, digits));
    write_text_file_atomic(dir / "dsm.asc", write_ascii_grid(scene.dsm, digits));
    write_text_file_atomic(dir / "rows.csv", write_rows_csv(scene.rows, digits));
}

} // namespace orchard
