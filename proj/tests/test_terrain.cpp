#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "orchard/terrain.hpp"
#include "orchard/util.hpp"

using namespace orchard;

namespace {

TerrainGrid make_grid(int ncols, int nrows, std::vector<double> values, double cellsize = 1.0,
                      double xll = 0.0, double yll = 0.0) {
    TerrainGrid g;
    g.ncols = ncols;
    g.nrows = nrows;
    g.xll = xll;
    g.yll = yll;
    g.cellsize = cellsize;
    g.values = std::move(values);
    return g;
}

} // namespace

TEST_CASE("sample_terrain: constant field is constant everywhere inside") {
    TerrainGrid g = make_grid(3, 3, std::vector<double>(9, 100.0));
    CHECK(sample_terrain(g, 1.5, 1.5) == doctest::Approx(100.0));
    CHECK(sample_terrain(g, 0.1, 2.9) == doctest::Approx(100.0));
    CHECK(sample_terrain(g, 2.999, 0.001) == doctest::Approx(100.0));
}

TEST_CASE("sample_terrain: hand bilinear value at the centre of four cells") {
    // First stored row is the northern one: north row = 0, south row = 10.
    TerrainGrid g = make_grid(2, 2, {0.0, 0.0, 10.0, 10.0});
    CHECK(sample_terrain(g, 1.0, 1.0) == doctest::Approx(5.0));
}

TEST_CASE("sample_terrain: exact at cell centres") {
    std::mt19937_64 rng(7);
    TerrainGrid g = make_grid(5, 4, {}, 2.0, 10.0, 20.0);
    g.values.resize(20);
    for (double& v : g.values) v = uniform_range(rng, 50, 150);
    for (int r = 0; r < g.nrows; ++r) {
        for (int c = 0; c < g.ncols; ++c) {
            int row_from_bottom = g.nrows - 1 - r;
            double x = g.xll + (c + 0.5) * g.cellsize;
            double y = g.yll + (row_from_bottom + 0.5) * g.cellsize;
            CHECK(sample_terrain(g, x, y) == doctest::Approx(g.at(r, c)).epsilon(1e-12));
        }
    }
}

TEST_CASE("sample_terrain: outside the extent") {
    TerrainGrid g = make_grid(2, 2, {1, 2, 3, 4});
    try {
        sample_terrain(g, -0.5, 1.0);
        FAIL("expected out_of_extent");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::out_of_extent);
    }
    CHECK_THROWS_AS(sample_terrain(g, 1.0, 2.5), Error);
}

TEST_CASE("sample_terrain: NODATA neighbours are rejected") {
    TerrainGrid g = make_grid(2, 2, {1, -9999, 3, 4});
    try {
        sample_terrain(g, 1.0, 1.0);
        FAIL("expected nodata_cell");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::nodata_cell);
    }
}

TEST_CASE("extrapolate_row: uniform spacing on a line") {
    std::vector<TreePosition> trees = extrapolate_row({0, 0, 0, 9, 0, 3.0});
    REQUIRE(trees.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(trees[static_cast<std::size_t>(i)].col == i);
        CHECK(trees[static_cast<std::size_t>(i)].x == doctest::Approx(3.0 * i));
        CHECK(trees[static_cast<std::size_t>(i)].y == doctest::Approx(0.0));
    }
}

TEST_CASE("extrapolate_row: degenerate single-tree row") {
    std::vector<TreePosition> trees = extrapolate_row({2, 4, 5, 4, 5, 3.0});
    REQUIRE(trees.size() == 1);
    CHECK(trees[0].col == 0);
    CHECK(trees[0].x == doctest::Approx(4.0));
    CHECK(trees[0].y == doctest::Approx(5.0));
}

TEST_CASE("extrapolate_row: residual shorter than one spacing is dropped") {
    std::vector<TreePosition> trees = extrapolate_row({0, 0, 0, 10, 0, 3.0});
    REQUIRE(trees.size() == 4);
    CHECK(trees.back().x == doctest::Approx(9.0));
}

TEST_CASE("extrapolate_row: collinearity, exact spacing and the floor count rule") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 300; ++i) {
        RowSpec spec;
        spec.start_x = uniform_range(rng, -50, 50);
        spec.start_y = uniform_range(rng, -50, 50);
        spec.end_x = spec.start_x + uniform_range(rng, -40, 40);
        spec.end_y = spec.start_y + uniform_range(rng, -40, 40);
        spec.spacing = uniform_range(rng, 0.5, 5.0);
        std::vector<TreePosition> trees = extrapolate_row(spec);

        double dx = spec.end_x - spec.start_x, dy = spec.end_y - spec.start_y;
        double length = std::hypot(dx, dy);
        std::size_t expected =
            length == 0.0 ? 1 : static_cast<std::size_t>(std::floor(length / spec.spacing)) + 1;
        // One representation-error tolerance step on the boundary.
        CHECK(trees.size() >= expected);
        CHECK(trees.size() <= expected + 1);

        for (std::size_t t = 0; t < trees.size(); ++t) {
            // Collinear: cross product of (tree - start) with (end - start).
            double cx = trees[t].x - spec.start_x, cy = trees[t].y - spec.start_y;
            CHECK(std::abs(cx * dy - cy * dx) / std::max(1.0, length) <= 1e-9);
            if (t > 0) {
                double step = std::hypot(trees[t].x - trees[t - 1].x, trees[t].y - trees[t - 1].y);
                CHECK(std::abs(step - spec.spacing) <= 1e-9);
            }
        }
    }
}

TEST_CASE("make_tree_id: zero-padded and injective") {
    CHECK(make_tree_id(3, 7) == "R03C07");
    CHECK(make_tree_id(0, 0) == "R00C00");
    CHECK(make_tree_id(123, 4) == "R123C04");
    std::set<std::string> seen;
    for (int r = 0; r < 130; ++r) {
        for (int c = 0; c < 130; ++c) {
            CHECK(seen.insert(make_tree_id(r, c)).second);
        }
    }
}

TEST_CASE("build_tree_records: flat DTM and DSM") {
    TerrainGrid dtm = make_grid(20, 8, std::vector<double>(160, 100.0));
    TerrainGrid dsm = make_grid(20, 8, std::vector<double>(160, 103.0));
    std::vector<RowSpec> rows = {{0, 2, 2, 14, 2, 3.0}, {1, 2, 5, 14, 5, 3.0}};
    std::vector<TreeRecord> trees = build_tree_records(rows, dtm, dsm);
    REQUIRE(trees.size() == 10);
    for (const TreeRecord& t : trees) {
        CHECK(t.base.z == doctest::Approx(100.0));
        CHECK(t.top.z == doctest::Approx(103.0));
        CHECK(t.top.x == doctest::Approx(t.base.x));
        CHECK(t.top.y == doctest::Approx(t.base.y));
    }
    CHECK(trees[0].tree_id == "R00C00");
    CHECK(trees.back().tree_id == "R01C04");
}

TEST_CASE("build_tree_records: DSM below DTM is an error naming the tree") {
    TerrainGrid dtm = make_grid(6, 6, std::vector<double>(36, 100.0));
    TerrainGrid dsm = make_grid(6, 6, std::vector<double>(36, 99.0));
    std::vector<RowSpec> rows = {{0, 1, 1, 4, 1, 1.5}};
    try {
        build_tree_records(rows, dtm, dsm);
        FAIL("expected elevation_inversion");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::elevation_inversion);
        CHECK(std::string(e.what()).find("R00C00") != std::string::npos);
    }
}

TEST_CASE("build_tree_records: duplicate row indices are rejected") {
    TerrainGrid dtm = make_grid(6, 6, std::vector<double>(36, 100.0));
    TerrainGrid dsm = make_grid(6, 6, std::vector<double>(36, 103.0));
    std::vector<RowSpec> rows = {{1, 1, 1, 4, 1, 1.5}, {1, 1, 3, 4, 3, 1.5}};
    try {
        build_tree_records(rows, dtm, dsm);
        FAIL("expected domain_error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::domain_error);
    }
}

TEST_CASE("build_tree_records: sampling failures carry the tree position") {
    TerrainGrid dtm = make_grid(2, 2, std::vector<double>(4, 100.0));
    TerrainGrid dsm = make_grid(2, 2, std::vector<double>(4, 103.0));
    std::vector<RowSpec> rows = {{4, 0, 0, 40, 0, 2.0}};
    try {
        build_tree_records(rows, dtm, dsm);
        FAIL("expected out_of_extent");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::out_of_extent);
        CHECK(std::string(e.what()).find("tree R04C") != std::string::npos);
    }
}
