#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "orchard/image.hpp"
#include "orchard/errors.hpp"
#include "orchard/util.hpp"

using namespace orchard;
namespace fs = std::filesystem;

TEST_CASE("png: write/read round trip for RGB, gray and RGBA") {
    std::mt19937_64 rng(91);
    fs::path path = fs::temp_directory_path() / "orchard_test_roundtrip.png";
    for (int channels : {1, 3, 4}) {
        Image img;
        img.width = 37;
        img.height = 21;
        img.channels = channels;
        img.pixels.resize(static_cast<std::size_t>(37 * 21 * channels));
        for (auto& p : img.pixels) p = static_cast<std::uint8_t>(uniform_below(rng, 256));

        write_png(path, img);
        Image back = read_png(path);
        CHECK(back.width == img.width);
        CHECK(back.height == img.height);
        CHECK(back.channels == img.channels);
        CHECK(back.pixels == img.pixels);
    }
    fs::remove(path);
}

TEST_CASE("png: corrupt files are reported as unreadable") {
    fs::path path = fs::temp_directory_path() / "orchard_test_bad.png";
    {
        std::ofstream out(path, std::ios::binary);
        out << "definitely not a png";
    }
    try {
        read_png(path);
        FAIL("expected io_error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::io_error);
        CHECK(std::string(e.what()).find("orchard_test_bad.png") != std::string::npos);
    }
    fs::remove(path);
    CHECK_THROWS_AS(read_png(path), Error); // missing file
}

TEST_CASE("crop_image: extracts the expected pixels") {
    Image img = Image::solid(10, 8, 1, 2, 3);
    // Paint one marker pixel.
    img.row(5)[3 * 4] = 200;
    Image piece = crop_image(img, 4, 5, 7, 8);
    CHECK(piece.width == 3);
    CHECK(piece.height == 3);
    CHECK(piece.row(0)[0] == 200);
    CHECK(piece.row(0)[3] == 1);

    CHECK_THROWS_AS(crop_image(img, -1, 0, 5, 5), Error);
    CHECK_THROWS_AS(crop_image(img, 4, 4, 4, 8), Error);
    CHECK_THROWS_AS(crop_image(img, 0, 0, 11, 5), Error);
}
