#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "orchard/crop.hpp"
#include "orchard/geometry.hpp"
#include "orchard/ingest.hpp"
#include "orchard/terrain.hpp"

namespace orchard {

enum class TerrainKind { flat, inclined, sinusoid };

struct SceneSpec {
    int n_rows = 5;
    int trees_per_row = 20;
    double spacing = 3.0;  // metres between trees
    double row_gap = 4.0;  // metres between rows
    TerrainKind terrain = TerrainKind::flat;
    int n_poses = 20;
    double overlap_fraction = 0.5; // in [0, 1)
    std::uint64_t seed = 0;
    int image_width = 640;
    int image_height = 480;
    double focal_px = 600.0;
};

struct ScenePose {
    std::string image_name;
    CameraExtrinsics extrinsics; // local frame
    CameraIntrinsics intrinsics;
};

struct Scene {
    SceneSpec spec;
    WorldOffset offset;            // global = local + offset
    std::vector<RowSpec> rows;     // global coordinates
    TerrainGrid dtm, dsm;          // global coordinates
    std::vector<TreeRecord> trees; // global coordinates
    std::vector<ScenePose> poses;
    std::vector<ImagePose> image_poses;   // composed matrices, local frame
    std::vector<TreeSighting> sightings;  // exhaustive projection of every tree into every pose
};

// Synthesises an orchard survey with exact groundtruth sightings. The
// sighting table is computed by directly projecting every tree into every
// pose, independent of the pipeline code it checks.
Scene generate_scene(const SceneSpec& spec);

// Emits pmatrix.txt, offset.xyz, dtm.asc, dsm.asc and rows.csv into `dir`
// at full float precision so that re-parsing reproduces the scene exactly.
void write_scene_files(const Scene& scene, const std::filesystem::path& dir);

} // namespace orchard
