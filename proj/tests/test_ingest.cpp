#include <doctest.h>

#include <cmath>
#include <random>

#include "orchard/ingest.hpp"
#include "orchard/util.hpp"

using namespace orchard;

TEST_CASE("parse_pmatrix: identity projection line") {
    auto poses = parse_pmatrix("img1.jpg 1 0 0 0 0 1 0 0 0 0 1 0\n");
    REQUIRE(poses.size() == 1);
    CHECK(poses[0].image_name == "img1.jpg");
    CHECK(poses[0].pmatrix(0, 0) == 1.0);
    CHECK(poses[0].pmatrix(1, 1) == 1.0);
    CHECK(poses[0].pmatrix(2, 2) == 1.0);
    CHECK(poses[0].pmatrix(2, 3) == 0.0);
}

TEST_CASE("parse_pmatrix: wrong token count names the line") {
    try {
        parse_pmatrix("img1.jpg 1 2 3 4 5 6 7 8 9 10 11\n");
        FAIL("expected malformed_line");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::malformed_line);
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_pmatrix("img1.jpg 1 2 3 4 5 x 7 8 9 10 11 12\n"), Error);
}

TEST_CASE("parse_pmatrix: file order preserved, blank lines tolerated") {
    auto poses = parse_pmatrix(
        "b.jpg 1 2 3 4 5 6 7 8 9 10 11 12\n"
        "\n"
        "a.jpg 12 11 10 9 8 7 6 5 4 3 2 1\n");
    REQUIRE(poses.size() == 2);
    CHECK(poses[0].image_name == "b.jpg");
    CHECK(poses[1].image_name == "a.jpg");
    CHECK(poses[1].pmatrix(0, 0) == 12.0);
}

TEST_CASE("parse_offset: single-line form") {
    WorldOffset off = parse_offset("345000.0 5621000.0 0.0\n");
    CHECK(off.x == doctest::Approx(345000.0));
    CHECK(off.y == doctest::Approx(5621000.0));
    CHECK(off.z == doctest::Approx(0.0));

    WorldOffset zero = parse_offset("0 0 0");
    CHECK(zero.x == 0.0);
    CHECK(zero.y == 0.0);
    CHECK(zero.z == 0.0);
}

TEST_CASE("parse_offset: a second line is rejected") {
    try {
        parse_offset("1 2 3\n4 5 6\n");
        FAIL("expected malformed_line");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::malformed_line);
    }
    CHECK_THROWS_AS(parse_offset("1 2\n"), Error);
    CHECK_THROWS_AS(parse_offset(""), Error);
}

TEST_CASE("parse_ascii_grid: single cell") {
    TerrainGrid g = parse_ascii_grid(
        "ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n7\n");
    CHECK(g.ncols == 1);
    CHECK(g.nrows == 1);
    CHECK(g.at(0, 0) == 7.0);
}

TEST_CASE("parse_ascii_grid: value count must match the header") {
    try {
        parse_ascii_grid("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2 3\n");
        FAIL("expected dimension_mismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::dimension_mismatch);
    }
}

TEST_CASE("parse_ascii_grid: missing header") {
    try {
        parse_ascii_grid("ncols 2\nnrows 2\ncellsize 1\n1 2 3 4\n");
        FAIL("expected header_missing");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::header_missing);
    }
}

TEST_CASE("parse_ascii_grid: NODATA cells survive a round trip unchanged") {
    TerrainGrid g = parse_ascii_grid(
        "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -1\n-1 5\n6 7\n");
    CHECK(g.nodata == -1.0);
    CHECK(g.is_nodata(g.at(0, 0)));
    TerrainGrid again = parse_ascii_grid(write_ascii_grid(g));
    CHECK(again.at(0, 0) == -1.0);
    CHECK(again.is_nodata(again.at(0, 0)));
}

TEST_CASE("parse_rows_csv: header and fields") {
    auto rows = parse_rows_csv("row,start_x,start_y,end_x,end_y,spacing\n0,1,2,3,4,2.5\n");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].row_index == 0);
    CHECK(rows[0].end_y == 4.0);
    CHECK(rows[0].spacing == 2.5);

    CHECK_THROWS_AS(parse_rows_csv("bad,header\n"), Error);
    CHECK_THROWS_AS(parse_rows_csv("row,start_x,start_y,end_x,end_y,spacing\n0,1,2,3,4,0\n"),
                    Error);
}

TEST_CASE("parse/serialize round trip at 12 significant digits") {
    std::mt19937_64 rng(11);
    auto close = [](double a, double b) {
        return std::abs(a - b) <= std::max(1e-9, std::abs(b) * 1e-10);
    };

    std::vector<ImagePose> poses(3);
    for (std::size_t p = 0; p < poses.size(); ++p) {
        poses[p].image_name = "img_" + std::to_string(p) + ".png";
        for (double& v : poses[p].pmatrix.m) v = uniform_range(rng, -1000, 1000);
    }
    auto poses2 = parse_pmatrix(write_pmatrix(poses));
    REQUIRE(poses2.size() == poses.size());
    for (std::size_t p = 0; p < poses.size(); ++p) {
        CHECK(poses2[p].image_name == poses[p].image_name);
        for (int i = 0; i < 12; ++i) {
            CHECK(close(poses2[p].pmatrix.m[static_cast<std::size_t>(i)],
                        poses[p].pmatrix.m[static_cast<std::size_t>(i)]));
        }
    }

    WorldOffset off{345000.123, 5621000.456, 12.5};
    WorldOffset off2 = parse_offset(write_offset(off));
    CHECK(close(off2.x, off.x));
    CHECK(close(off2.y, off.y));
    CHECK(close(off2.z, off.z));

    TerrainGrid g;
    g.ncols = 4;
    g.nrows = 3;
    g.xll = 345012.25;
    g.yll = 5621034.5;
    g.cellsize = 0.5;
    g.nodata = -9999;
    for (int i = 0; i < 12; ++i) g.values.push_back(uniform_range(rng, 50, 150));
    TerrainGrid g2 = parse_ascii_grid(write_ascii_grid(g));
    CHECK(g2.ncols == g.ncols);
    CHECK(g2.nrows == g.nrows);
    CHECK(close(g2.xll, g.xll));
    CHECK(close(g2.yll, g.yll));
    for (std::size_t i = 0; i < g.values.size(); ++i) CHECK(close(g2.values[i], g.values[i]));

    std::vector<RowSpec> rows = {{0, 345000.0, 5621000.0, 345060.0, 5621000.5, 3.25}};
    auto rows2 = parse_rows_csv(write_rows_csv(rows));
    REQUIRE(rows2.size() == 1);
    CHECK(close(rows2[0].start_x, rows[0].start_x));
    CHECK(close(rows2[0].end_y, rows[0].end_y));
    CHECK(close(rows2[0].spacing, rows[0].spacing));
}
