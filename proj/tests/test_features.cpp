#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fao/features.hpp"
#include "synthetic_scene.hpp"

using namespace fao;

namespace {

double descriptor_distance(const Feature& a, const Feature& b) {
  double acc = 0.0;
  for (int i = 0; i < 128; ++i) {
    const double d = (double)a.descriptor[i] - b.descriptor[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

Feature synthetic_feature(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Feature f;
  double norm = 0.0;
  std::array<double, 128> v;
  for (auto& e : v) {
    e = std::abs(gauss(rng));
    norm += e * e;
  }
  norm = std::sqrt(norm);
  for (int i = 0; i < 128; ++i) f.descriptor[i] = (float)(v[i] / norm);
  return f;
}

Image rotate90_ccw(const Image& img) {
  // out(x, y) = img(width-1-y, x): a 90-degree rotation on the pixel grid.
  Image out(img.height(), img.width());
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x)
      out.at(x, y) = img.at(img.width() - 1 - y, x);
  return out;
}

}  // namespace

TEST_CASE("constant image yields no features") {
  Image img(128, 128, 0.5f);
  CHECK(detect_and_describe(img).empty());
}

TEST_CASE("too-small images are rejected") {
  Image img(63, 128, 0.5f);
  try {
    detect_and_describe(img);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::image_too_small);
  }
}

TEST_CASE("detection is deterministic") {
  const Image img = testing::make_textured_image(192, 192, 2);
  const auto a = detect_and_describe(img);
  const auto b = detect_and_describe(img);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
    CHECK(a[i].descriptor == b[i].descriptor);
  }
}

TEST_CASE("descriptor invariants: unit norm, clamped components, in bounds") {
  const Image img = testing::make_textured_image(256, 256, 4);
  const auto features = detect_and_describe(img);
  REQUIRE(features.size() > 20);
  for (const Feature& f : features) {
    double norm = 0.0;
    for (float v : f.descriptor) {
      CHECK(v >= 0.0f);
      CHECK(v <= 0.2f);
      norm += (double)v * v;
    }
    CHECK(std::abs(std::sqrt(norm) - 1.0) < 1e-4);
    CHECK(f.x >= 0.0);
    CHECK(f.x <= img.width() - 1.0);
    CHECK(f.y >= 0.0);
    CHECK(f.y <= img.height() - 1.0);
    CHECK(f.theta >= 0.0);
    CHECK(f.theta < 2.0 * std::numbers::pi);
    CHECK(f.sigma > 0.0);
  }
}

TEST_CASE("an image matches itself feature for feature") {
  const Image img = testing::make_textured_image(256, 256, 6);
  const auto f = detect_and_describe(img);
  REQUIRE(f.size() > 20);
  const auto matches = match_features(f, f, 0.8);
  CHECK(matches.size() == f.size());
  for (const auto& m : matches) {
    CHECK(m.index1 == m.index2);
    CHECK(m.distance == doctest::Approx(0.0));
    CHECK(m.ratio < 0.8);
  }
}

TEST_CASE("matching an empty reference set yields nothing") {
  const Image img = testing::make_textured_image(128, 128, 8);
  const auto f = detect_and_describe(img);
  CHECK(match_features(f, {}, 0.8).empty());
  CHECK(match_features({}, f, 0.8).empty());
}

TEST_CASE("ratio threshold is validated and enforced") {
  CHECK_THROWS_AS(match_features({}, {}, 1.2), Error);
  const Image img = testing::make_textured_image(160, 160, 10);
  const auto f = detect_and_describe(img);
  for (const auto& m : match_features(f, f, 0.5)) CHECK(m.ratio < 0.5);
}

TEST_CASE("planted matches among random distractors are all recovered") {
  std::mt19937_64 rng(12);
  std::vector<Feature> a, b;
  for (int i = 0; i < 50; ++i) {
    Feature f = synthetic_feature(rng);
    a.push_back(f);
    // The planted twin gets a whisper of noise.
    Feature g = f;
    for (int k = 0; k < 8; ++k) g.descriptor[k] += 0.001f;
    b.push_back(g);
  }
  for (int i = 0; i < 200; ++i) b.push_back(synthetic_feature(rng));

  const auto matches = match_features(a, b, 0.8);
  CHECK(matches.size() == 50);
  for (const auto& m : matches) CHECK(m.index2 == m.index1);
}

TEST_CASE("integer translation moves features and keeps descriptors") {
  const Image master = testing::make_textured_image(640, 640, 14);
  const int off = 8;  // multiple of every pyramid stride in play
  const Image a = crop(master, {0, 0, 512, 512});
  const Image b = crop(master, {off, off, 512, 512});
  const auto fa = detect_and_describe(a);
  const auto fb = detect_and_describe(b);
  REQUIRE(fa.size() > 50);

  // Features whose description support sits inside the shared window must
  // reappear shifted, possibly as one of several orientations at the spot.
  int considered = 0, consistent = 0;
  for (const Feature& f : fa) {
    const double support = 11.0 * f.sigma + 4.0;
    if (f.x < off + support || f.y < off + support || f.x > 512 - support ||
        f.y > 512 - support)
      continue;
    ++considered;
    bool ok = false;
    for (const Feature& g : fb) {
      const double dx = (g.x + off) - f.x;
      const double dy = (g.y + off) - f.y;
      if (std::sqrt(dx * dx + dy * dy) <= 0.5 &&
          descriptor_distance(f, g) <= 0.1) {
        ok = true;
        break;
      }
    }
    if (ok) ++consistent;
  }
  REQUIRE(considered > 30);
  CHECK((double)consistent / considered >= 0.9);
}

TEST_CASE("90-degree rotation: features match and positions are consistent") {
  const Image img = testing::make_textured_image(256, 256, 16);
  const Image rot = rotate90_ccw(img);
  const auto f1 = detect_and_describe(img);
  const auto f2 = detect_and_describe(rot);
  REQUIRE(f1.size() > 30);
  const auto matches = match_features(f1, f2, 0.8);

  int consistent = 0;
  for (const auto& m : matches) {
    // Forward map of rotate90_ccw: (x, y) -> (y, width-1-x).
    const double ex = f1[m.index1].y;
    const double ey = img.width() - 1 - f1[m.index1].x;
    const double dx = f2[m.index2].x - ex;
    const double dy = f2[m.index2].y - ey;
    if (std::sqrt(dx * dx + dy * dy) <= 2.0) ++consistent;
  }
  const size_t smaller = std::min(f1.size(), f2.size());
  CHECK((double)consistent / smaller >= 0.5);
}
