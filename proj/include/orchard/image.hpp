#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace orchard {

// 8-bit interleaved raster; channels is 1 (gray), 3 (RGB) or 4 (RGBA).
struct Image {
    int width = 0, height = 0, channels = 3;
    std::vector<std::uint8_t> pixels;

    static Image solid(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b);

    std::uint8_t* row(int y) {
        return pixels.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(width) *
                                   static_cast<std::size_t>(channels);
    }
    const std::uint8_t* row(int y) const {
        return pixels.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(width) *
                                   static_cast<std::size_t>(channels);
    }
};

// Non-interlaced 8-bit PNG, color types gray/RGB/RGBA.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& image);

// Pixel rectangle [xmin, xmax) x [ymin, ymax); bounds must be valid.
Image crop_image(const Image& image, int xmin, int ymin, int xmax, int ymax);

} // namespace orchard
