#include "orchard/image.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include "orchard/errors.hpp"

namespace orchard {

namespace {

constexpr std::uint8_t kSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

std::uint32_t read_be32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

void append_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::uint8_t* data, std::size_t size) {
    append_be32(out, static_cast<std::uint32_t>(size));
    std::size_t crc_begin = out.size();
    out.insert(out.end(), type, type + 4);
    if (size) out.insert(out.end(), data, data + size);
    std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(0, out.data() + crc_begin, static_cast<uInt>(out.size() - crc_begin)));
    append_be32(out, crc);
}

int paeth(int a, int b, int c) {
    int p = a + b - c;
    int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

[[noreturn]] void bad_png(const std::filesystem::path& path, const std::string& what) {
    fail(ErrorKind::io_error, "unreadable image " + path.string() + ": " + what);
}

} // namespace

Image Image::solid(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    Image img;
    img.width = width;
    img.height = height;
    img.channels = 3;
    img.pixels.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
    for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
        img.pixels[i] = r;
        img.pixels[i + 1] = g;
        img.pixels[i + 2] = b;
    }
    return img;
}

Image read_png(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io_error, "cannot open image: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());

    if (bytes.size() < 8 || std::memcmp(bytes.data(), kSignature, 8) != 0)
        bad_png(path, "not a PNG file");

    Image img;
    int bit_depth = 0, color_type = -1;
    std::vector<std::uint8_t> idat;
    bool saw_ihdr = false, saw_iend = false;

    std::size_t pos = 8;
    while (pos + 8 <= bytes.size() && !saw_iend) {
        std::uint32_t length = read_be32(bytes.data() + pos);
        if (pos + 12 + length > bytes.size()) bad_png(path, "truncated chunk");
        const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
        const std::uint8_t* data = bytes.data() + pos + 8;

        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (length != 13) bad_png(path, "bad IHDR");
            img.width = static_cast<int>(read_be32(data));
            img.height = static_cast<int>(read_be32(data + 4));
            bit_depth = data[8];
            color_type = data[9];
            if (data[12] != 0) bad_png(path, "interlaced PNG not supported");
            if (bit_depth != 8) bad_png(path, "only 8-bit PNG supported");
            if (color_type == 0) img.channels = 1;
            else if (color_type == 2) img.channels = 3;
            else if (color_type == 6) img.channels = 4;
            else bad_png(path, "unsupported color type " + std::to_string(color_type));
            if (img.width <= 0 || img.height <= 0 || img.width > 65535 || img.height > 65535)
                bad_png(path, "bad dimensions");
            saw_ihdr = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), data, data + length);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            saw_iend = true;
        }
        pos += 12 + length;
    }
    if (!saw_ihdr || !saw_iend || idat.empty()) bad_png(path, "missing chunks");

    std::size_t stride = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.channels);
    std::size_t raw_size = (stride + 1) * static_cast<std::size_t>(img.height);
    std::vector<std::uint8_t> raw(raw_size);
    uLongf dest_len = raw_size;
    if (uncompress(raw.data(), &dest_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
        dest_len != raw_size) {
        bad_png(path, "corrupt image data");
    }

    img.pixels.resize(stride * static_cast<std::size_t>(img.height));
    int bpp = img.channels;
    for (int y = 0; y < img.height; ++y) {
        const std::uint8_t* src = raw.data() + static_cast<std::size_t>(y) * (stride + 1);
        std::uint8_t filter = src[0];
        ++src;
        std::uint8_t* dst = img.row(y);
        const std::uint8_t* prev = y > 0 ? img.row(y - 1) : nullptr;
        for (std::size_t x = 0; x < stride; ++x) {
            int a = x >= static_cast<std::size_t>(bpp) ? dst[x - static_cast<std::size_t>(bpp)] : 0;
            int b = prev ? prev[x] : 0;
            int c = (prev && x >= static_cast<std::size_t>(bpp))
                        ? prev[x - static_cast<std::size_t>(bpp)]
                        : 0;
            int value;
            switch (filter) {
                case 0: value = src[x]; break;
                case 1: value = src[x] + a; break;
                case 2: value = src[x] + b; break;
                case 3: value = src[x] + (a + b) / 2; break;
                case 4: value = src[x] + paeth(a, b, c); break;
                default: bad_png(path, "bad filter byte");
            }
            dst[x] = static_cast<std::uint8_t>(value & 0xFF);
        }
    }
    return img;
}

void write_png(const std::filesystem::path& path, const Image& image) {
    if (image.channels != 1 && image.channels != 3 && image.channels != 4)
        fail(ErrorKind::io_error, "unsupported channel count");

    std::size_t stride = static_cast<std::size_t>(image.width) *
                         static_cast<std::size_t>(image.channels);
    std::vector<std::uint8_t> raw;
    raw.reserve((stride + 1) * static_cast<std::size_t>(image.height));
    for (int y = 0; y < image.height; ++y) {
        raw.push_back(0); // filter: none
        raw.insert(raw.end(), image.row(y), image.row(y) + stride);
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> compressed(bound);
    if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                  Z_BEST_SPEED) != Z_OK) {
        fail(ErrorKind::io_error, "compression failure writing " + path.string());
    }
    compressed.resize(bound);

    std::vector<std::uint8_t> out;
    out.insert(out.end(), kSignature, kSignature + 8);
    std::uint8_t ihdr[13];
    ihdr[0] = static_cast<std::uint8_t>(image.width >> 24);
    ihdr[1] = static_cast<std::uint8_t>(image.width >> 16);
    ihdr[2] = static_cast<std::uint8_t>(image.width >> 8);
    ihdr[3] = static_cast<std::uint8_t>(image.width);
    ihdr[4] = static_cast<std::uint8_t>(image.height >> 24);
    ihdr[5] = static_cast<std::uint8_t>(image.height >> 16);
    ihdr[6] = static_cast<std::uint8_t>(image.height >> 8);
    ihdr[7] = static_cast<std::uint8_t>(image.height);
    ihdr[8] = 8; // bit depth
    ihdr[9] = image.channels == 1 ? 0 : (image.channels == 3 ? 2 : 6);
    ihdr[10] = 0;
    ihdr[11] = 0;
    ihdr[12] = 0;
    append_chunk(out, "IHDR", ihdr, sizeof(ihdr));
    append_chunk(out, "IDAT", compressed.data(), compressed.size());
    append_chunk(out, "IEND", nullptr, 0);

    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
        if (!file) fail(ErrorKind::io_error, "cannot open image for writing: " + tmp.string());
        file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
        if (!file.flush()) fail(ErrorKind::io_error, "write failure: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(ErrorKind::io_error, "rename failure: " + path.string() + ": " + ec.message());
}

Image crop_image(const Image& image, int xmin, int ymin, int xmax, int ymax) {
    if (xmin < 0 || ymin < 0 || xmax > image.width || ymax > image.height || xmin >= xmax ||
        ymin >= ymax) {
        fail(ErrorKind::degenerate_crop, "crop rectangle outside image bounds");
    }
    Image out;
    out.width = xmax - xmin;
    out.height = ymax - ymin;
    out.channels = image.channels;
    std::size_t row_bytes = static_cast<std::size_t>(out.width) *
                            static_cast<std::size_t>(out.channels);
    out.pixels.resize(row_bytes * static_cast<std::size_t>(out.height));
    for (int y = 0; y < out.height; ++y) {
        const std::uint8_t* src = image.row(ymin + y) +
                                  static_cast<std::size_t>(xmin) *
                                      static_cast<std::size_t>(image.channels);
        std::memcpy(out.row(y), src, row_bytes);
    }
    return out;
}

} // namespace orchard
