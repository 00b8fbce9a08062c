#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tsal/frame.hpp"
#include "tsal/geometry.hpp"
#include "tsal/spatial.hpp"

namespace tsal::io {

// 8-bit quantization used for every image written: round(v * 255), clamped.
std::uint8_t to_byte(float v);
float from_byte(std::uint8_t b);

// Binary PPM (P6, maxval 255) or PNG, chosen by file extension.
Frame read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Frame& frame);

// Reads only the header.
geometry::Resolution image_size(const std::filesystem::path& path);

// Grayscale export of a map grid scaled so its maximum is white (PGM or PNG).
void write_grayscale(const std::filesystem::path& path, const spatial::SaliencyGrid& grid);

}  // namespace tsal::io
