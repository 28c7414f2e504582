#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fao/evaluation.hpp"
#include "fao/imaging.hpp"
#include "fao/optimizer.hpp"
#include "synthetic_scene.hpp"

using namespace fao;

namespace {

SliceSet single_slice(const Rect& r1, const Rect& r2) {
  SliceSet set;
  set.pairs.push_back({r1, r2, 0, 0});
  set.proportion = 0.0;
  return set;
}

// A noiseless warped pair built from a shared master so that at the true
// translation the residual is exactly zero.
struct ShiftedPair {
  Image i1, i2;
  AffineTransform truth;
};

ShiftedPair make_shifted_pair(int size, int shift_x, int shift_y,
                              uint64_t seed) {
  const Image master =
      testing::make_textured_image(size + std::abs(shift_x) + 8,
                                   size + std::abs(shift_y) + 8, seed);
  ShiftedPair out;
  out.i1 = crop(master, {std::max(0, shift_x), std::max(0, shift_y), size, size});
  out.i2 = crop(master, {std::max(0, -shift_x), std::max(0, -shift_y), size, size});
  out.truth = AffineTransform::translation(shift_x, shift_y);
  // i2(p + shift) = master(p + max(0,shift) ...) == i1(p) by construction.
  return out;
}

}  // namespace

TEST_CASE("data term vanishes for an aligned identical pair") {
  const Image img = testing::make_textured_image(256, 256, 3);
  const auto set = single_slice({32, 32, 192, 192}, {32, 32, 192, 192});
  const DataTermResult d =
      data_term(AffineTransform::identity(), set, img, img);
  CHECK(d.value == 0.0);
  CHECK(d.m == 192 * 192);
}

TEST_CASE("data term vanishes at the exact planted translation") {
  const ShiftedPair pair = make_shifted_pair(256, 5, 0, 5);
  const auto set = single_slice({40, 40, 128, 128}, {45, 40, 128, 128});
  const DataTermResult d = data_term(pair.truth, set, pair.i1, pair.i2);
  CHECK(d.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.m == 128 * 128);
}

TEST_CASE("constant offset gives the closed-form residual") {
  const Image i1 = testing::make_textured_image(192, 192, 7);
  Image i2 = i1;
  for (float& v : i2.pixels()) v += 0.1f;
  const auto set = single_slice({16, 16, 160, 160}, {16, 16, 160, 160});
  const DataTermResult d =
      data_term(AffineTransform::identity(), set, i1, i2);
  CHECK(d.value == doctest::Approx(0.01).epsilon(1e-5));
}

TEST_CASE("data term raises when every slice leaves the frame") {
  const Image img = testing::make_textured_image(128, 128, 9);
  const auto set = single_slice({0, 0, 128, 128}, {0, 0, 128, 128});
  try {
    data_term(AffineTransform::translation(500, 0), set, img, img);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_support);
  }
}

TEST_CASE("regularizer is the squared coefficient distance") {
  const AffineTransform h0{1.0, 0.0, 3.0, 0.0, 1.0, -2.0};
  CHECK(regularizer(h0, h0) == 0.0);

  AffineTransform h = h0;
  h.c1 += 2.0;
  CHECK(regularizer(h, h0) == doctest::Approx(4.0));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> delta(-0.5, 0.5);
  AffineTransform hp = h0;
  double expect = 0.0;
  double* slots[6] = {&hp.a1, &hp.b1, &hp.c1, &hp.a2, &hp.b2, &hp.c2};
  for (double* s : slots) {
    const double d = delta(rng);
    *s += d;
    expect += d * d;
  }
  CHECK(regularizer(hp, h0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("objective composes data term and regularizer") {
  const Image img = testing::make_textured_image(160, 160, 13);
  const auto set = single_slice({16, 16, 128, 128}, {16, 16, 128, 128});
  const AffineTransform h0 = AffineTransform::identity();
  AffineTransform h = h0;
  h.c1 += 0.25;

  ObjectiveConfig cfg;
  cfg.lambda = 0.0;
  CHECK(objective(h, h0, set, img, img, cfg) ==
        doctest::Approx(data_term(h, set, img, img).value));

  cfg.lambda = 0.001;
  CHECK(objective(h0, h0, set, img, img, cfg) == 0.0);
  const double d = data_term(h, set, img, img).value;
  CHECK(objective(h, h, set, img, img, cfg) == doctest::Approx(d));
}

TEST_CASE("gradient vanishes at a perfect alignment") {
  const Image img = testing::make_textured_image(192, 192, 17);
  const auto set = single_slice({24, 24, 144, 144}, {24, 24, 144, 144});
  ObjectiveConfig cfg;
  const auto g = gradient(AffineTransform::identity(),
                          AffineTransform::identity(), set, img, img, cfg);
  for (double v : g) CHECK(std::abs(v) < 1e-6);
}

TEST_CASE("huge lambda reduces the gradient to the regularizer pull") {
  const Image i1 = testing::make_textured_image(160, 160, 19);
  const Image i2 = testing::make_textured_image(160, 160, 20);
  const auto set = single_slice({16, 16, 128, 128}, {16, 16, 128, 128});
  const AffineTransform h0 = AffineTransform::identity();
  AffineTransform h = h0;
  h.c1 += 0.7;
  h.b1 += 0.01;

  ObjectiveConfig cfg;
  cfg.lambda = 1e6;
  const auto g = gradient(h, h0, set, i1, i2, cfg);
  const auto ch = h.coeffs();
  const auto c0 = h0.coeffs();
  for (int i = 0; i < 6; ++i) {
    const double expect = 2.0 * cfg.lambda * (ch[i] - c0[i]);
    CHECK(g[i] == doctest::Approx(expect).epsilon(1e-4));
  }
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> tiny(-0.01, 0.01);
  std::uniform_real_distribution<double> px(-1.5, 1.5);

  const Image i1 = testing::make_smooth_image(160, 160, 29, 1.5);
  const Image i2 = testing::make_smooth_image(160, 160, 30, 1.5);
  const auto set = single_slice({32, 32, 96, 96}, {30, 34, 96, 96});
  ObjectiveConfig cfg;

  for (int trial = 0; trial < 5; ++trial) {
    AffineTransform h{1.0 + tiny(rng), tiny(rng), px(rng),
                      tiny(rng), 1.0 + tiny(rng), px(rng)};
    AffineTransform h0 = h;
    h0.c1 += tiny(rng);
    const auto g = gradient(h, h0, set, i1, i2, cfg);

    double max_abs = 0.0;
    for (double v : g) max_abs = std::max(max_abs, std::abs(v));
    const double step = 1e-5;
    double* slots[6] = {&h.a1, &h.b1, &h.c1, &h.a2, &h.b2, &h.c2};
    for (int k = 0; k < 6; ++k) {
      const double keep = *slots[k];
      *slots[k] = keep + step;
      const double f_plus = objective(h, h0, set, i1, i2, cfg);
      *slots[k] = keep - step;
      const double f_minus = objective(h, h0, set, i1, i2, cfg);
      *slots[k] = keep;
      const double fd = (f_plus - f_minus) / (2.0 * step);
      CHECK(std::abs(fd - g[k]) < 1e-3 * std::max(1e-6, max_abs));
    }
  }
}

TEST_CASE("solve stays put when started at the optimum") {
  const Image img = testing::make_textured_image(256, 256, 31);
  const auto set = single_slice({48, 48, 160, 160}, {48, 48, 160, 160});
  ObjectiveConfig cfg;
  cfg.max_generation = 50;
  const RegistrationResult res =
      solve(AffineTransform::identity(), set, img, img, cfg);
  const auto c = res.h.coeffs();
  const auto e = AffineTransform::identity().coeffs();
  for (int i = 0; i < 6; ++i) CHECK(std::abs(c[i] - e[i]) < 1e-6);
}

TEST_CASE("solve pulls a 2 px initialization error below 0.25 px") {
  const ShiftedPair pair = make_shifted_pair(512, 7, -4, 33);
  const auto set = single_slice({96, 96, 256, 256}, {103, 92, 256, 256});
  AffineTransform h0 = pair.truth;
  h0.c1 += 1.5;
  h0.c2 -= 1.3;

  ObjectiveConfig cfg;
  cfg.max_generation = 200;
  const RegistrationResult res = solve(h0, set, pair.i1, pair.i2, cfg);

  const ControlGrid grid = make_control_grid(512, 512, 20, 20, pair.truth);
  CHECK(rmse(res.h, grid) < 0.25);
  CHECK(res.trace.size() >= 2);
}

TEST_CASE("accepted steps strictly decrease the objective") {
  const ShiftedPair pair = make_shifted_pair(384, 3, 2, 35);
  const auto set = single_slice({64, 64, 192, 192}, {67, 66, 192, 192});
  AffineTransform h0 = pair.truth;
  h0.c1 -= 1.0;
  h0.c2 += 0.8;
  h0.b1 += 0.002;

  ObjectiveConfig cfg;
  cfg.max_generation = 120;
  const RegistrationResult res = solve(h0, set, pair.i1, pair.i2, cfg);
  REQUIRE(res.trace.size() >= 3);
  for (size_t i = 1; i < res.trace.size(); ++i)
    CHECK(res.trace[i].objective < res.trace[i - 1].objective);
  for (const auto& e : res.trace)
    CHECK(e.objective ==
          doctest::Approx(e.data_term + cfg.lambda * e.regularizer)
              .epsilon(1e-12));
}

TEST_CASE("slice objective equals the direct whole-image objective") {
  const Image i1 = testing::make_textured_image(160, 160, 41);
  const Image i2 = testing::make_textured_image(160, 160, 42);
  SliceSet set;
  set.pairs.push_back({{0, 0, 160, 160}, {0, 0, 160, 160}, 0, 0});
  set.proportion = 1.0;

  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> tiny(-0.02, 0.02);
  std::uniform_real_distribution<double> px(-6.0, 6.0);
  ObjectiveConfig cfg;
  cfg.lambda = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const AffineTransform h{1.0 + tiny(rng), tiny(rng), px(rng),
                            tiny(rng), 1.0 + tiny(rng), px(rng)};
    const double via_slices = objective(h, h, set, i1, i2, cfg);
    const double direct = direct_objective(h, i1, i2);
    CHECK(std::abs(via_slices - direct) <= 1e-9 * std::max(1.0, direct));
  }
}

TEST_CASE("trace CSV is stable and well formed") {
  const Image img = testing::make_textured_image(160, 160, 47);
  const auto set = single_slice({16, 16, 128, 128}, {16, 16, 128, 128});
  ObjectiveConfig cfg;
  cfg.max_generation = 5;
  AffineTransform h0 = AffineTransform::identity();
  h0.c1 += 0.5;
  const RegistrationResult res = solve(h0, set, img, img, cfg);
  const std::string a = trace_to_csv(res.trace);
  const std::string b = trace_to_csv(res.trace);
  CHECK(a == b);
  CHECK(a.rfind("generation,objective,data_term,regularizer,a1,b1,c1,a2,b2,c2\n",
                0) == 0);
}
