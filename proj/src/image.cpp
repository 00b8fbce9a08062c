#include "tsal/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "tsal/error.hpp"

namespace tsal::io {
namespace fs = std::filesystem;

namespace {

enum class Format { Ppm, Png };

Format format_of(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return Format::Png;
  if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return Format::Ppm;
  throw Error(ErrorCode::AssetError, "unsupported image format: " + path.string());
}

// Reads one PNM header token, skipping whitespace and comments.
std::string pnm_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

struct PnmHeader {
  std::string magic;
  int width = 0;
  int height = 0;
  int maxval = 0;
};

PnmHeader read_pnm_header(std::istream& in, const fs::path& path) {
  PnmHeader h;
  h.magic = pnm_token(in);
  try {
    h.width = std::stoi(pnm_token(in));
    h.height = std::stoi(pnm_token(in));
    h.maxval = std::stoi(pnm_token(in));
  } catch (const std::exception&) {
    throw Error(ErrorCode::AssetError, "malformed PNM header: " + path.string());
  }
  if ((h.magic != "P6" && h.magic != "P5") || h.width <= 0 || h.height <= 0 || h.maxval != 255) {
    throw Error(ErrorCode::AssetError, "only 8-bit binary PPM/PGM is supported: " + path.string());
  }
  return h;
}

std::vector<std::uint8_t> png_read(const fs::path& path, png_uint_32 format, int& w, int& h) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(ErrorCode::AssetError, "cannot read PNG " + path.string() + ": " + image.message);
  }
  image.format = format;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(ErrorCode::AssetError, "cannot decode PNG " + path.string() + ": " + image.message);
  }
  w = static_cast<int>(image.width);
  h = static_cast<int>(image.height);
  return buffer;
}

void png_write(const fs::path& path, const std::vector<std::uint8_t>& bytes, int w, int h,
               png_uint_32 format) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = format;
  if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    throw Error(ErrorCode::IoError, "cannot write PNG " + path.string() + ": " + image.message);
  }
}

void write_bytes(const fs::path& path, const std::string& header,
                 const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << header;
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

}  // namespace

std::uint8_t to_byte(float v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0f), 0L, 255L));
}

float from_byte(std::uint8_t b) { return b / 255.0f; }

Frame read_image(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::AssetError, "missing image " + path.string());
  std::vector<std::uint8_t> bytes;
  int w = 0, h = 0;
  bool gray = false;
  if (format_of(path) == Format::Png) {
    bytes = png_read(path, PNG_FORMAT_RGB, w, h);
  } else {
    std::ifstream in(path, std::ios::binary);
    const PnmHeader header = read_pnm_header(in, path);
    w = header.width;
    h = header.height;
    gray = header.magic == "P5";
    bytes.resize(static_cast<std::size_t>(w) * h * (gray ? 1 : 3));
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
      throw Error(ErrorCode::AssetError, "truncated image data: " + path.string());
    }
  }
  Frame frame(w, h);
  for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
    frame.pixels[i] = from_byte(bytes[gray ? i / 3 : i]);
  }
  return frame;
}

void write_image(const fs::path& path, const Frame& frame) {
  std::vector<std::uint8_t> bytes(frame.pixels.size());
  std::transform(frame.pixels.begin(), frame.pixels.end(), bytes.begin(), to_byte);
  if (format_of(path) == Format::Png) {
    png_write(path, bytes, frame.width, frame.height, PNG_FORMAT_RGB);
  } else {
    write_bytes(path, "P6\n" + std::to_string(frame.width) + " " + std::to_string(frame.height) +
                          "\n255\n",
                bytes);
  }
}

geometry::Resolution image_size(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::AssetError, "missing image " + path.string());
  if (format_of(path) == Format::Png) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
      throw Error(ErrorCode::AssetError, "cannot read PNG " + path.string());
    }
    geometry::Resolution r{static_cast<int>(image.width), static_cast<int>(image.height)};
    png_image_free(&image);
    return r;
  }
  std::ifstream in(path, std::ios::binary);
  const PnmHeader header = read_pnm_header(in, path);
  return {header.width, header.height};
}

void write_grayscale(const fs::path& path, const spatial::SaliencyGrid& grid) {
  double peak = 0.0;
  for (double v : grid.values) peak = std::max(peak, v);
  std::vector<std::uint8_t> bytes(grid.values.size(), 0);
  if (peak > 0.0) {
    for (std::size_t i = 0; i < bytes.size(); ++i) {
      bytes[i] = to_byte(static_cast<float>(grid.values[i] / peak));
    }
  }
  if (format_of(path) == Format::Png) {
    png_write(path, bytes, grid.width, grid.height, PNG_FORMAT_GRAY);
  } else {
    write_bytes(path, "P5\n" + std::to_string(grid.width) + " " + std::to_string(grid.height) +
                          "\n255\n",
                bytes);
  }
}

}  // namespace tsal::io
