#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace terra {

void write_pgm(const std::filesystem::path& path, int width, int height,
               const std::vector<std::uint8_t>& gray);

// Minimal PNG writer (zlib-compressed, filter 0 per scanline).
void write_png_gray(const std::filesystem::path& path, int width, int height,
                    const std::vector<std::uint8_t>& gray);
void write_png_rgb(const std::filesystem::path& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb);

}  // namespace terra
