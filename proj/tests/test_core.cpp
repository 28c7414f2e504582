#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fao/core.hpp"

using namespace fao;

namespace {

AffineTransform random_invertible(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> small(-0.3, 0.3);
  std::uniform_real_distribution<double> shift(-40.0, 40.0);
  for (;;) {
    AffineTransform h{1.0 + small(rng), small(rng), shift(rng),
                      small(rng), 1.0 + small(rng), shift(rng)};
    if (std::abs(h.det()) > 0.2) return h;
  }
}

double max_coeff_diff(const AffineTransform& a, const AffineTransform& b) {
  const auto ca = a.coeffs();
  const auto cb = b.coeffs();
  double m = 0.0;
  for (int i = 0; i < 6; ++i) m = std::max(m, std::abs(ca[i] - cb[i]));
  return m;
}

}  // namespace

TEST_CASE("apply_transform basic cases") {
  const Point p = apply_transform(AffineTransform::identity(), {10, 20});
  CHECK(p.x == doctest::Approx(10.0));
  CHECK(p.y == doctest::Approx(20.0));

  const Point t = apply_transform(AffineTransform::translation(3, -2), {0, 0});
  CHECK(t.x == doctest::Approx(3.0));
  CHECK(t.y == doctest::Approx(-2.0));

  const AffineTransform rot90{0, -1, 0, 1, 0, 0};
  const Point r = apply_transform(rot90, {1, 0});
  CHECK(r.x == doctest::Approx(0.0));
  CHECK(r.y == doctest::Approx(1.0));
}

TEST_CASE("apply_transform is linear in homogeneous coordinates") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-100.0, 100.0);
  std::uniform_real_distribution<double> alpha(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const AffineTransform h = random_invertible(rng);
    const Point p{coord(rng), coord(rng)};
    const Point q{coord(rng), coord(rng)};
    const double a = alpha(rng);
    const Point mix{a * p.x + (1 - a) * q.x, a * p.y + (1 - a) * q.y};
    const Point lhs = apply_transform(h, mix);
    const Point hp = apply_transform(h, p);
    const Point hq = apply_transform(h, q);
    CHECK(lhs.x == doctest::Approx(a * hp.x + (1 - a) * hq.x).epsilon(1e-12));
    CHECK(lhs.y == doctest::Approx(a * hp.y + (1 - a) * hq.y).epsilon(1e-12));
  }
}

TEST_CASE("invert basics and composition check") {
  CHECK(max_coeff_diff(invert(AffineTransform::identity()),
                       AffineTransform::identity()) < 1e-15);
  CHECK(max_coeff_diff(invert(AffineTransform::translation(3, -2)),
                       AffineTransform::translation(-3, 2)) < 1e-15);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const AffineTransform h = random_invertible(rng);
    CHECK(max_coeff_diff(compose(h, invert(h)), AffineTransform::identity()) <
          1e-12);
  }
}

TEST_CASE("invert rejects singular transforms") {
  AffineTransform h{1, 2, 0, 2, 4, 0};  // det == 0
  CHECK_THROWS_AS(invert(h), Error);
  try {
    invert(h);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::singular_transform);
  }
}

TEST_CASE("compose basics and pointwise agreement") {
  std::mt19937_64 rng(13);
  const AffineTransform h = random_invertible(rng);
  CHECK(max_coeff_diff(compose(AffineTransform::identity(), h), h) < 1e-15);

  CHECK(max_coeff_diff(compose(AffineTransform::translation(3, 4),
                               AffineTransform::translation(1, 2)),
                       AffineTransform::translation(4, 6)) < 1e-15);

  std::uniform_real_distribution<double> coord(-200.0, 200.0);
  const AffineTransform h1 = random_invertible(rng);
  const AffineTransform h2 = random_invertible(rng);
  const AffineTransform c = compose(h2, h1);
  for (int i = 0; i < 100; ++i) {
    const Point p{coord(rng), coord(rng)};
    const Point direct = apply_transform(c, p);
    const Point stepwise = apply_transform(h2, apply_transform(h1, p));
    CHECK(std::abs(direct.x - stepwise.x) < 1e-10);
    CHECK(std::abs(direct.y - stepwise.y) < 1e-10);
  }
}

TEST_CASE("compose is associative") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 30; ++i) {
    const AffineTransform a = random_invertible(rng);
    const AffineTransform b = random_invertible(rng);
    const AffineTransform c = random_invertible(rng);
    CHECK(max_coeff_diff(compose(compose(a, b), c), compose(a, compose(b, c))) <
          1e-10);
  }
}

TEST_CASE("sample_bilinear lattice points are exact") {
  Image img(4, 3);
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  for (float& v : img.pixels()) v = unit(rng);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 4; ++x) {
      const auto v = sample_bilinear(img, {(double)x, (double)y});
      REQUIRE(v.has_value());
      CHECK(*v == (double)img.at(x, y));
    }
}

TEST_CASE("sample_bilinear midpoint and out-of-bounds") {
  Image img(2, 2);
  img.at(0, 0) = 0.0f;
  img.at(1, 0) = 0.0f;
  img.at(0, 1) = 1.0f;
  img.at(1, 1) = 1.0f;
  const auto mid = sample_bilinear(img, {0.5, 0.5});
  REQUIRE(mid.has_value());
  CHECK(*mid == doctest::Approx(0.5));

  CHECK_FALSE(sample_bilinear(img, {-0.5, 1.0}).has_value());
  CHECK_FALSE(sample_bilinear(img, {0.0, 1.0001}).has_value());
}

TEST_CASE("sample_bilinear of a constant image is that constant") {
  Image img(9, 7, 0.37f);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> x(0.0, 8.0), y(0.0, 6.0);
  for (int i = 0; i < 200; ++i) {
    const auto v = sample_bilinear(img, {x(rng), y(rng)});
    REQUIRE(v.has_value());
    CHECK(*v == doctest::Approx(0.37).epsilon(1e-7));
  }
}

TEST_CASE("transform JSON round-trip keeps full precision") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 20; ++i) {
    const AffineTransform h = random_invertible(rng);
    const AffineTransform back = transform_from_json(transform_to_json(h));
    CHECK(max_coeff_diff(h, back) == 0.0);
  }
  const std::string text = transform_to_json(AffineTransform::identity());
  CHECK(text.find("\"a1\"") != std::string::npos);
  CHECK(text.find("\"c2\"") != std::string::npos);
}

TEST_CASE("transform JSON rejects junk") {
  CHECK_THROWS_AS(transform_from_json("not json"), Error);
  CHECK_THROWS_AS(transform_from_json("{\"a1\":1}"), Error);
  CHECK_THROWS_AS(transform_from_json("{\"a1\":\"x\"}"), Error);
}

TEST_CASE("rect intersection") {
  const Rect a{0, 0, 256, 256};
  CHECK(intersect(a, a).area() == 65536);
  CHECK(intersect(a, Rect{300, 0, 10, 10}).area() == 0);
  CHECK(intersect(a, Rect{128, 0, 256, 256}).area() == 128 * 256);
}

TEST_CASE("crop copies the window") {
  Image img(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) img.at(x, y) = (float)(y * 8 + x);
  const Image sub = crop(img, {2, 3, 4, 2});
  CHECK(sub.width() == 4);
  CHECK(sub.height() == 2);
  CHECK(sub.at(0, 0) == img.at(2, 3));
  CHECK(sub.at(3, 1) == img.at(5, 4));
  CHECK_THROWS_AS(crop(img, {6, 6, 4, 4}), Error);
}

TEST_CASE("mix_seed separates streams deterministically") {
  CHECK(mix_seed(0, 1) == mix_seed(0, 1));
  CHECK(mix_seed(0, 1) != mix_seed(0, 2));
  CHECK(mix_seed(0, 1) != mix_seed(1, 1));
}
