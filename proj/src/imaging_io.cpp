#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <vector>

#include "fao/imaging.hpp"

namespace fao {

namespace {

std::string lower_ext(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

float normalized(unsigned value, unsigned maxval) {
  return (float)((double)value / maxval);
}

unsigned quantize(float v, unsigned maxval) {
  const double clamped = std::clamp((double)v, 0.0, 1.0);
  return (unsigned)std::lround(clamped * maxval);
}

// ---- PNG ----

Image decode_gray_rows(const std::vector<unsigned char>& data, int w, int h,
                       int depth) {
  Image img(w, h);
  img.bit_depth = depth;
  const unsigned maxval = depth == 16 ? 65535u : 255u;
  const size_t stride = (size_t)w * (depth / 8);
  for (int y = 0; y < h; ++y) {
    const unsigned char* row = data.data() + y * stride;
    for (int x = 0; x < w; ++x) {
      unsigned v;
      if (depth == 16) {
        unsigned short s;
        std::memcpy(&s, row + 2 * x, 2);
        v = s;
      } else {
        v = row[x];
      }
      img.at(x, y) = normalized(v, maxval);
    }
  }
  return img;
}

Image load_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) raise(ErrorCode::io, "cannot open " + path);

  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8))
    raise(ErrorCode::malformed_file, path + ": not a PNG file");

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    raise(ErrorCode::internal, "libpng initialization failed");
  }
  std::vector<png_bytep> row_ptrs;
  std::vector<unsigned char> data;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    raise(ErrorCode::malformed_file, path + ": corrupt PNG data");
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (color != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    raise(ErrorCode::unsupported_format,
          path + ": only grayscale PNG is supported");
  }
  if (depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
    depth = 8;
  }
  if (depth == 16 && std::endian::native == std::endian::little)
    png_set_swap(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const size_t stride = (size_t)w * (depth / 8);
  data.resize(stride * h);
  row_ptrs.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = data.data() + y * stride;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  return decode_gray_rows(data, (int)w, (int)h, depth);
}

void save_png(const Image& img, const std::string& path) {
  const int depth = img.bit_depth == 8 ? 8 : 16;
  const unsigned maxval = depth == 16 ? 65535u : 255u;

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) raise(ErrorCode::io, "cannot write " + path);

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    raise(ErrorCode::internal, "libpng initialization failed");
  }
  std::vector<unsigned char> data;
  std::vector<png_bytep> row_ptrs;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    raise(ErrorCode::io, "PNG write failed for " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width(), img.height(), depth,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (depth == 16 && std::endian::native == std::endian::little)
    png_set_swap(png);

  const size_t stride = (size_t)img.width() * (depth / 8);
  data.resize(stride * img.height());
  row_ptrs.resize(img.height());
  for (int y = 0; y < img.height(); ++y) {
    unsigned char* row = data.data() + (size_t)y * stride;
    row_ptrs[y] = row;
    for (int x = 0; x < img.width(); ++x) {
      const unsigned v = quantize(img.at(x, y), maxval);
      if (depth == 16) {
        const unsigned short s = (unsigned short)v;
        std::memcpy(row + 2 * x, &s, 2);
      } else {
        row[x] = (unsigned char)v;
      }
    }
  }
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// ---- PGM (binary P5) ----

int pgm_next_token(std::FILE* f, char* buf, size_t cap) {
  int c;
  do {
    c = std::fgetc(f);
    if (c == '#') {
      while (c != '\n' && c != EOF) c = std::fgetc(f);
    }
  } while (c != EOF && std::isspace(c));
  if (c == EOF) return -1;
  size_t n = 0;
  while (c != EOF && !std::isspace(c) && n + 1 < cap) {
    buf[n++] = (char)c;
    c = std::fgetc(f);
  }
  buf[n] = '\0';
  return (int)n;
}

Image load_pgm(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) raise(ErrorCode::io, "cannot open " + path);

  char tok[64];
  if (pgm_next_token(fp.get(), tok, sizeof tok) <= 0 || std::strcmp(tok, "P5") != 0)
    raise(ErrorCode::malformed_file, path + ": missing P5 magic");
  long vals[3];
  for (int i = 0; i < 3; ++i) {
    if (pgm_next_token(fp.get(), tok, sizeof tok) <= 0)
      raise(ErrorCode::malformed_file, path + ": truncated PGM header");
    char* end = nullptr;
    vals[i] = std::strtol(tok, &end, 10);
    if (end == tok || *end != '\0' || vals[i] <= 0)
      raise(ErrorCode::malformed_file, path + ": bad PGM header field");
  }
  const long w = vals[0], h = vals[1], maxval = vals[2];
  if (maxval > 65535)
    raise(ErrorCode::malformed_file, path + ": PGM maxval exceeds 65535");

  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> data((size_t)w * h * bytes);
  if (std::fread(data.data(), 1, data.size(), fp.get()) != data.size())
    raise(ErrorCode::malformed_file, path + ": truncated PGM pixel data");

  Image img((int)w, (int)h);
  img.bit_depth = bytes == 2 ? 16 : 8;
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      const size_t i = ((size_t)y * w + x) * bytes;
      // PGM multi-byte samples are most-significant-byte first.
      const unsigned v = bytes == 2 ? (unsigned)data[i] << 8 | data[i + 1]
                                    : data[i];
      img.at((int)x, (int)y) = normalized(v, (unsigned)maxval);
    }
  }
  return img;
}

void save_pgm(const Image& img, const std::string& path) {
  const int depth = img.bit_depth == 8 ? 8 : 16;
  const unsigned maxval = depth == 16 ? 65535u : 255u;
  const int bytes = depth / 8;

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) raise(ErrorCode::io, "cannot write " + path);
  std::fprintf(fp.get(), "P5\n%d %d\n%u\n", img.width(), img.height(), maxval);
  std::vector<unsigned char> row((size_t)img.width() * bytes);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const unsigned v = quantize(img.at(x, y), maxval);
      if (bytes == 2) {
        row[2 * x] = (unsigned char)(v >> 8);
        row[2 * x + 1] = (unsigned char)(v & 0xff);
      } else {
        row[x] = (unsigned char)v;
      }
    }
    if (std::fwrite(row.data(), 1, row.size(), fp.get()) != row.size())
      raise(ErrorCode::io, "short write to " + path);
  }
}

// ---- raw float32 with JSON sidecar ----

Image load_f32(const std::string& path) {
  std::ifstream side(path + ".json");
  if (!side) raise(ErrorCode::io, "cannot open sidecar " + path + ".json");
  nlohmann::json j = nlohmann::json::parse(side, nullptr, false);
  if (j.is_discarded() || !j.contains("width") || !j.contains("height") ||
      !j["width"].is_number_integer() || !j["height"].is_number_integer())
    raise(ErrorCode::malformed_file, path + ".json: bad sidecar");
  const int w = j["width"].get<int>();
  const int h = j["height"].get<int>();
  if (w < 1 || h < 1)
    raise(ErrorCode::malformed_file, path + ".json: nonpositive dimensions");

  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) raise(ErrorCode::io, "cannot open " + path);
  Image img(w, h);
  img.bit_depth = 0;
  const size_t count = (size_t)w * h;
  if (std::fread(img.pixels().data(), sizeof(float), count, fp.get()) != count)
    raise(ErrorCode::malformed_file, path + ": truncated float data");
  if (std::endian::native != std::endian::little)
    raise(ErrorCode::unsupported_format, "f32 I/O requires a little-endian host");
  for (float v : img.pixels())
    if (!std::isfinite(v))
      raise(ErrorCode::malformed_file, path + ": non-finite sample");
  return img;
}

void save_f32(const Image& img, const std::string& path) {
  if (std::endian::native != std::endian::little)
    raise(ErrorCode::unsupported_format, "f32 I/O requires a little-endian host");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) raise(ErrorCode::io, "cannot write " + path);
  const size_t count = (size_t)img.width() * img.height();
  if (std::fwrite(img.pixels().data(), sizeof(float), count, fp.get()) != count)
    raise(ErrorCode::io, "short write to " + path);
  std::ofstream side(path + ".json", std::ios::trunc);
  if (!side) raise(ErrorCode::io, "cannot write sidecar " + path + ".json");
  nlohmann::ordered_json j;
  j["width"] = img.width();
  j["height"] = img.height();
  side << j.dump() << '\n';
}

}  // namespace

Image load_image(const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == "png") return load_png(path);
  if (ext == "pgm") return load_pgm(path);
  if (ext == "f32") return load_f32(path);
  raise(ErrorCode::unsupported_format,
        path + ": unsupported image format ." + ext);
}

void save_image(const Image& img, const std::string& path) {
  if (img.empty()) raise(ErrorCode::invalid_argument, "cannot save empty image");
  const std::string ext = lower_ext(path);
  if (ext == "png") return save_png(img, path);
  if (ext == "pgm") return save_pgm(img, path);
  if (ext == "f32") return save_f32(img, path);
  raise(ErrorCode::unsupported_format,
        path + ": unsupported image format ." + ext);
}

}  // namespace fao
