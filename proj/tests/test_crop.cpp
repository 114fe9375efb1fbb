#include <doctest.h>

#include <set>

#include "orchard/crop.hpp"
#include "orchard/synth.hpp"

using namespace orchard;

namespace {

// A straight-ahead camera at the origin looking down +z in camera terms:
// identity rotation, so world z is the viewing depth.
CameraModel straight_camera(int width = 640, int height = 480, double f = 500.0) {
    DecomposedCamera cam;
    cam.intrinsics = CameraIntrinsics{f, width / 2.0, height / 2.0, width, height};
    return CameraModel{cam};
}

TreeRecord tree(const std::string& id, double x, double y, double base_z, double top_z) {
    TreeRecord t;
    t.tree_id = id;
    t.base = WorldPoint{x, y, base_z};
    t.top = WorldPoint{x, y, top_z};
    return t;
}

} // namespace

TEST_CASE("visible_trees: a tree dead ahead is sighted") {
    // Camera frame equals world frame; depth along +z. A vertical tree in
    // world z does not change viewing depth, so build it along world y
    // instead: base below, top above, both in front at z = 10.
    TreeRecord t;
    t.tree_id = "R00C00";
    t.base = WorldPoint{0.0, -1.0, 10.0};
    t.top = WorldPoint{0.0, 1.0, 10.0};
    auto sightings = visible_trees(straight_camera(), "img", std::vector<TreeRecord>{t});
    REQUIRE(sightings.size() == 1);
    CHECK(sightings[0].tree_id == "R00C00");
    CHECK(sightings[0].depth == doctest::Approx(10.0));
    // Base below the centre line (larger v), top above.
    CHECK(sightings[0].base_px.v > sightings[0].top_px.v);
}

TEST_CASE("visible_trees: behind-camera and out-of-bounds trees are excluded") {
    TreeRecord behind = tree("R00C01", 0.0, 0.0, -5.0, -4.0);
    // Projects far left of the frame: u = 500 * (-10) / 10 + 320 = -180.
    TreeRecord outside = tree("R00C02", -10.0, 0.0, 10.0, 10.5);
    auto sightings = visible_trees(straight_camera(), "img",
                                   std::vector<TreeRecord>{behind, outside});
    CHECK(sightings.empty());
}

TEST_CASE("plan_crop: frozen arithmetic for extents and margin") {
    TreeSighting s;
    s.tree_id = "R01C01";
    s.image_name = "img";
    s.base_px = PixelPoint{500, 900};
    s.top_px = PixelPoint{500, 400};
    s.depth = 10.0;
    CropPlanParams params;
    params.focal_px = 1000.0;
    params.margin = 0.1;
    params.image_width = 5472;
    params.image_height = 3648;
    // Projected width = spacing * focal / depth = 2 * 1000 / 10 = 200 px.
    CropRect rect = plan_crop(s, 2.0, params);
    CHECK(rect.xmin == 390);
    CHECK(rect.xmax == 610);
    CHECK(rect.ymin == 350);
    CHECK(rect.ymax == 950);
}

TEST_CASE("plan_crop: zero margin keeps the exact projected extents") {
    TreeSighting s;
    s.base_px = PixelPoint{500, 900};
    s.top_px = PixelPoint{500, 400};
    s.depth = 10.0;
    CropPlanParams params;
    params.focal_px = 1000.0;
    params.margin = 0.0;
    params.image_width = 5472;
    params.image_height = 3648;
    CropRect rect = plan_crop(s, 2.0, params);
    CHECK(rect.xmin == 400);
    CHECK(rect.xmax == 600);
    CHECK(rect.ymin == 400);
    CHECK(rect.ymax == 900);
}

TEST_CASE("plan_crop: base and top on the same pixel is degenerate") {
    TreeSighting s;
    s.base_px = PixelPoint{100, 100};
    s.top_px = PixelPoint{100, 100};
    s.depth = 5.0;
    CropPlanParams params;
    params.focal_px = 1000.0;
    try {
        plan_crop(s, 2.0, params);
        FAIL("expected degenerate_crop");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate_crop);
    }
}

TEST_CASE("plan_crop: clamped to image bounds") {
    TreeSighting s;
    s.base_px = PixelPoint{10, 470};
    s.top_px = PixelPoint{10, 20};
    s.depth = 2.0;
    CropPlanParams params;
    params.focal_px = 1000.0;
    params.margin = 0.1;
    params.image_width = 640;
    params.image_height = 480;
    CropRect rect = plan_crop(s, 2.0, params);
    CHECK(rect.xmin == 0); // 10 - 550 clamps
    CHECK(rect.ymin == 0);
    CHECK(rect.xmax <= 640);
    CHECK(rect.ymax <= 480);
    CHECK(rect.xmin < rect.xmax);
    CHECK(rect.ymin < rect.ymax);
}

namespace {

std::function<CropRect(const TreeSighting&)> simple_planner() {
    return [](const TreeSighting& s) {
        CropPlanParams params;
        params.focal_px = 500.0;
        params.margin = 0.1;
        params.image_width = 640;
        params.image_height = 480;
        return plan_crop(s, 3.0, params);
    };
}

TreeSighting sighting(const std::string& id, const std::string& image) {
    TreeSighting s;
    s.tree_id = id;
    s.image_name = image;
    s.base_px = PixelPoint{320, 400};
    s.top_px = PixelPoint{320, 100};
    s.depth = 12.0;
    return s;
}

} // namespace

TEST_CASE("dedup_assign: first image wins") {
    std::vector<std::string> images = {"img_a.png", "img_b.png"};
    std::vector<TreeSighting> sightings = {sighting("R00C00", "img_b.png"),
                                           sighting("R00C00", "img_a.png")};
    std::vector<std::string> ids = {"R00C00"};
    CropManifest manifest = dedup_assign(images, sightings, ids, simple_planner());
    REQUIRE(manifest.crops.size() == 1);
    CHECK(manifest.crops[0].image_name == "img_a.png");
    CHECK(manifest.missing.empty());
}

TEST_CASE("dedup_assign: unique sightings map one to one") {
    std::vector<std::string> images = {"img_a.png", "img_b.png"};
    std::vector<TreeSighting> sightings = {sighting("R00C00", "img_a.png"),
                                           sighting("R00C01", "img_b.png")};
    std::vector<std::string> ids = {"R00C00", "R00C01"};
    CropManifest manifest = dedup_assign(images, sightings, ids, simple_planner());
    REQUIRE(manifest.crops.size() == 2);
    CHECK(manifest.crops[0].tree_id == "R00C00");
    CHECK(manifest.crops[0].image_name == "img_a.png");
    CHECK(manifest.crops[1].image_name == "img_b.png");
}

TEST_CASE("dedup_assign: unsighted trees land in missing") {
    std::vector<std::string> images = {"img_a.png"};
    std::vector<TreeSighting> sightings = {sighting("R00C00", "img_a.png")};
    std::vector<std::string> ids = {"R00C00", "R07C07"};
    CropManifest manifest = dedup_assign(images, sightings, ids, simple_planner());
    REQUIRE(manifest.missing.size() == 1);
    CHECK(manifest.missing[0] == "R07C07");
}

TEST_CASE("dedup_assign: no tree id appears twice; coverage is exact") {
    SceneSpec spec;
    spec.n_rows = 4;
    spec.trees_per_row = 10;
    spec.n_poses = 8;
    spec.seed = 9;
    Scene scene = generate_scene(spec);

    std::vector<std::string> images;
    for (const ScenePose& p : scene.poses) images.push_back(p.image_name);
    std::sort(images.begin(), images.end());
    std::vector<std::string> ids;
    for (const TreeRecord& t : scene.trees) ids.push_back(t.tree_id);

    CropManifest manifest = dedup_assign(images, scene.sightings, ids, simple_planner());
    std::set<std::string> seen;
    for (const CropRect& c : manifest.crops) CHECK(seen.insert(c.tree_id).second);
    CHECK(seen.size() + manifest.missing.size() + manifest.degenerate.size() == ids.size());

    // Deterministic: a second run gives the same manifest.
    CropManifest again = dedup_assign(images, scene.sightings, ids, simple_planner());
    REQUIRE(again.crops.size() == manifest.crops.size());
    for (std::size_t i = 0; i < again.crops.size(); ++i) {
        CHECK(again.crops[i].tree_id == manifest.crops[i].tree_id);
        CHECK(again.crops[i].image_name == manifest.crops[i].image_name);
    }
}

TEST_CASE("dedup_assign: two-image overlap survey crops every tree exactly once") {
    SceneSpec spec;
    spec.n_rows = 2;
    spec.trees_per_row = 4;
    spec.spacing = 3.0;
    spec.n_poses = 2;
    spec.overlap_fraction = 0.5;
    spec.seed = 15;
    Scene scene = generate_scene(spec);

    // Precondition of the invariant: every tree is visible somewhere.
    std::set<std::string> sighted;
    for (const TreeSighting& s : scene.sightings) sighted.insert(s.tree_id);
    REQUIRE(sighted.size() == scene.trees.size());

    std::vector<std::string> images = {"img_000.png", "img_001.png"};
    std::vector<std::string> ids;
    for (const TreeRecord& t : scene.trees) ids.push_back(t.tree_id);
    CropPlanParams params;
    params.focal_px = spec.focal_px;
    params.margin = 0.1;
    params.image_width = spec.image_width;
    params.image_height = spec.image_height;
    CropManifest manifest =
        dedup_assign(images, scene.sightings, ids,
                     [&](const TreeSighting& s) { return plan_crop(s, spec.spacing, params); });
    CHECK(manifest.crops.size() == scene.trees.size());
    CHECK(manifest.missing.empty());
    CHECK(manifest.degenerate.empty());
}

TEST_CASE("crop manifest CSV layout") {
    CropManifest manifest;
    manifest.crops.push_back(CropRect{"R00C00", "img_a.png", 1, 2, 3, 4});
    manifest.missing.push_back("R09C09");
    CHECK(write_crop_manifest_csv(manifest) ==
          "tree_id,image,xmin,ymin,xmax,ymax\nR00C00,img_a.png,1,2,3,4\n");
    CHECK(write_missing_list(manifest) == "R09C09\n");
}
