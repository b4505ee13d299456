#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace vitdesc {

// 8-bit interleaved image; channels is 1 (gray) or 3 (RGB).
struct Image {
    int height = 0;
    int width = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;

    Image() = default;
    Image(int h, int w, int c, std::uint8_t fill = 0)
        : height(h), width(w), channels(c), pixels(static_cast<std::size_t>(h) * w * c, fill) {}

    std::uint8_t* at(int row, int col) {
        return pixels.data() + (static_cast<std::size_t>(row) * width + col) * channels;
    }
    const std::uint8_t* at(int row, int col) const {
        return pixels.data() + (static_cast<std::size_t>(row) * width + col) * channels;
    }

    bool operator==(const Image&) const = default;
};

// Reads gray, gray+alpha, RGB, RGBA or palette PNGs; alpha is dropped and
// palettes are expanded. Throws IoError.
Image read_png(const std::filesystem::path& path);
// Gray PNG read as-is (palette indices are kept, not expanded).
Image read_png_gray(const std::filesystem::path& path);
void write_png(const Image& image, const std::filesystem::path& path);

}  // namespace vitdesc
