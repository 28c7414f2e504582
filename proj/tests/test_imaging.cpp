#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "fao/imaging.hpp"
#include "synthetic_scene.hpp"

using namespace fao;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("fao_imaging_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

Image random_8bit_image(int w, int h, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> byte(0, 255);
  Image img(w, h);
  img.bit_depth = 8;
  for (float& v : img.pixels()) v = (float)(byte(rng) / 255.0);
  return img;
}

double global_mean(const Image& img) {
  double acc = 0.0;
  for (float v : img.pixels()) acc += v;
  return acc / img.pixels().size();
}

}  // namespace

TEST_CASE("8-bit round-trips are bit-identical across formats") {
  TempDir tmp;
  const Image img = random_8bit_image(64, 64, 5);
  for (const char* name : {"a.png", "a.pgm"}) {
    const std::string path = tmp.file(name);
    save_image(img, path);
    const Image back = load_image(path);
    REQUIRE(back.width() == 64);
    REQUIRE(back.height() == 64);
    CHECK(back.bit_depth == 8);
    CHECK(back.pixels() == img.pixels());
  }
}

TEST_CASE("16-bit PGM normalizes by 65535") {
  TempDir tmp;
  const std::string path = tmp.file("wide.pgm");
  {
    std::ofstream out(path, std::ios::binary);
    out << "P5\n2 1\n65535\n";
    const unsigned char bytes[4] = {0xff, 0xff, 0x00, 0x01};  // 65535, 1
    out.write((const char*)bytes, 4);
  }
  const Image img = load_image(path);
  CHECK(img.bit_depth == 16);
  CHECK(img.at(0, 0) == doctest::Approx(1.0));
  CHECK(img.at(1, 0) == doctest::Approx(1.0 / 65535.0));
}

TEST_CASE("16-bit PNG round-trip") {
  TempDir tmp;
  Image img(32, 16);
  img.bit_depth = 16;
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> word(0, 65535);
  for (float& v : img.pixels()) v = (float)(word(rng) / 65535.0);
  const std::string path = tmp.file("wide.png");
  save_image(img, path);
  const Image back = load_image(path);
  CHECK(back.bit_depth == 16);
  CHECK(back.pixels() == img.pixels());
}

TEST_CASE("f32 round-trip is exact") {
  TempDir tmp;
  Image img(17, 9);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<float> v(0.0f, 3.0f);  // beyond [0,1] on purpose
  for (float& p : img.pixels()) p = v(rng);
  const std::string path = tmp.file("grid.f32");
  save_image(img, path);
  const Image back = load_image(path);
  CHECK(back.bit_depth == 0);
  CHECK(back.pixels() == img.pixels());
}

TEST_CASE("I/O error classes are distinct") {
  TempDir tmp;

  try {
    load_image(tmp.file("missing.png"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }

  const std::string trunc = tmp.file("trunc.pgm");
  {
    std::ofstream out(trunc, std::ios::binary);
    out << "P5\n8 8\n255\nab";  // far too little pixel data
  }
  try {
    load_image(trunc);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::malformed_file);
  }

  const std::string garbled = tmp.file("garbled.png");
  {
    std::ofstream out(garbled, std::ios::binary);
    out << "definitely not a png";
  }
  try {
    load_image(garbled);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::malformed_file);
  }

  const std::string odd = tmp.file("image.tiff");
  {
    std::ofstream out(odd, std::ios::binary);
    out << "x";
  }
  try {
    load_image(odd);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unsupported_format);
  }
}

TEST_CASE("truncated PNG reports malformed data") {
  TempDir tmp;
  const Image img = random_8bit_image(64, 64, 21);
  const std::string path = tmp.file("whole.png");
  save_image(img, path);
  const auto size = fs::file_size(path);
  const std::string cut = tmp.file("cut.png");
  {
    std::ifstream in(path, std::ios::binary);
    std::vector<char> head(size / 2);
    in.read(head.data(), (std::streamsize)head.size());
    std::ofstream out(cut, std::ios::binary);
    out.write(head.data(), (std::streamsize)head.size());
  }
  try {
    load_image(cut);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::malformed_file);
  }
}

TEST_CASE("downsample boundary rule") {
  Image big(4096, 4096, 0.5f);
  const Image ok = downsample(big, 32);
  CHECK(ok.width() == 128);
  CHECK(ok.height() == 128);

  try {
    downsample(big, 64);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::rate_too_high);
  }
}

TEST_CASE("downsample box filter on a constant block") {
  Image img(4, 4, 0.7f);
  const Image out = downsample(img, 2, /*enforce_min_scale=*/false);
  REQUIRE(out.width() == 2);
  REQUIRE(out.height() == 2);
  for (float v : out.pixels()) CHECK(v == doctest::Approx(0.7f));
}

TEST_CASE("downsample preserves the global mean when blocks tile exactly") {
  const Image img = testing::make_textured_image(256, 256, 3);
  const Image out = downsample(img, 4, false);
  CHECK(global_mean(out) == doctest::Approx(global_mean(img)).epsilon(1e-6));
}

TEST_CASE("gaussian blur leaves constants alone") {
  Image img(33, 21, 0.42f);
  const Image out = gaussian_blur(img, 2.7);
  for (float v : out.pixels()) CHECK(v == doctest::Approx(0.42f).epsilon(1e-6));
}

TEST_CASE("gaussian blur of a unit impulse peaks near 1/(2*pi)") {
  Image img(33, 33, 0.0f);
  img.at(16, 16) = 1.0f;
  const Image out = gaussian_blur(img, 1.0);
  const double expected = 1.0 / (2.0 * std::numbers::pi);
  CHECK(std::abs(out.at(16, 16) - expected) / expected < 0.02);
}

TEST_CASE("gaussian blur semigroup property") {
  const Image img = testing::make_smooth_image(64, 64, 31, 1.0);
  const Image twice = gaussian_blur(gaussian_blur(img, 2.0), 2.0);
  const Image once = gaussian_blur(img, 2.0 * std::numbers::sqrt2);
  double max_dev = 0.0;
  for (size_t i = 0; i < twice.pixels().size(); ++i)
    max_dev = std::max(max_dev,
                       (double)std::abs(twice.pixels()[i] - once.pixels()[i]));
  CHECK(max_dev < 1e-3);
}

TEST_CASE("synth pair: huge looks collapse to the clean pair") {
  SynthSpec spec;
  spec.source = testing::make_textured_image(256, 256, 41);
  spec.truth = AffineTransform::identity();
  spec.looks = 1000000;
  spec.seed = 4;
  const SynthPair pair = synth_pair(spec);
  double dev1 = 0.0, dev2 = 0.0;
  for (size_t i = 0; i < pair.i1.pixels().size(); ++i) {
    dev1 = std::max(dev1, (double)std::abs(pair.i1.pixels()[i] -
                                           spec.source.pixels()[i]));
    dev2 = std::max(dev2, (double)std::abs(pair.i2.pixels()[i] -
                                           spec.source.pixels()[i]));
  }
  CHECK(dev1 < 0.01);
  CHECK(dev2 < 0.01);
}

TEST_CASE("speckle is unit mean at one look") {
  SynthSpec spec;
  spec.source = Image(2048, 2048, 1.0f);  // i1 becomes the bare speckle field
  spec.truth = AffineTransform::identity();
  spec.looks = 1;
  spec.seed = 77;
  const SynthPair pair = synth_pair(spec);
  const double mean = global_mean(pair.i1);
  CHECK(mean > 0.99);
  CHECK(mean < 1.01);
}

TEST_CASE("synth pair is deterministic in the seed") {
  SynthSpec spec;
  spec.source = testing::make_textured_image(128, 128, 51);
  spec.truth = AffineTransform::similarity(64, 64, 0.03, 1.01, 4, -2);
  spec.looks = 2;
  spec.seed = 99;
  const SynthPair a = synth_pair(spec);
  const SynthPair b = synth_pair(spec);
  CHECK(a.i1.pixels() == b.i1.pixels());
  CHECK(a.i2.pixels() == b.i2.pixels());
}

TEST_CASE("synth pair rejects tiny overlap") {
  SynthSpec spec;
  spec.source = testing::make_textured_image(128, 128, 61);
  spec.truth = AffineTransform::translation(120, 0);
  spec.looks = 1;
  spec.seed = 0;
  try {
    synth_pair(spec);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::insufficient_overlap);
  }
}

TEST_CASE("synth validity mask marks the warped footprint") {
  SynthSpec spec;
  spec.source = testing::make_textured_image(128, 128, 71);
  spec.truth = AffineTransform::translation(30, 0);
  spec.looks = 1000;
  spec.seed = 1;
  const SynthPair pair = synth_pair(spec);
  // i2(q) = source(q - (30, 0)): columns left of x=30 fall outside.
  CHECK(pair.validity.at(10, 64) == 0.0f);
  CHECK(pair.validity.at(64, 64) == 1.0f);
  CHECK(pair.i2.at(10, 64) == 0.0f);
}
