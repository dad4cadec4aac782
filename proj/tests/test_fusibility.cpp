#include <doctest.h>

#include "bitone/fusibility.hpp"
#include "test_support.hpp"

using namespace bitone;
using namespace bitone::test;

namespace {

LdrImage gray(int w, int h, double v) { return LdrImage(w, h, Rgb{v, v, v}); }

FusibilityMap random_maps(Rng& rng, int w, int h, double max_ratio) {
  std::uniform_real_distribution<double> u(0.0, max_ratio);
  FusibilityMap m{Plane<double>(w, h), Plane<double>(w, h)};
  for (std::size_t i = 0; i < m.contour.size(); ++i) {
    m.contour[i] = u(rng);
    m.region[i] = u(rng);
  }
  return m;
}

}  // namespace

TEST_CASE("threshold validation") {
  CHECK_NOTHROW(FusibilityThresholds{}.validate());
  CHECK_THROWS_AS((FusibilityThresholds{0.0, 0.6}.validate()), InputError);
  CHECK_THROWS_AS((FusibilityThresholds{0.8, -1}.validate()), InputError);
  CHECK_THROWS_AS(ThresholdPredictor(FusibilityThresholds{0.8, 0.0}), InputError);
}

TEST_CASE("identical views give zero ratios and zero energy") {
  Rng rng(1);
  for (int i = 0; i < 5; ++i) {
    const auto v = random_ldr(rng, 24, 18);
    const auto maps = fusibility_maps(v, v);
    for (double x : maps.contour.values()) CHECK(x == 0.0);
    for (double x : maps.region.values()) CHECK(x == 0.0);
    CHECK(fusibility_energy(maps) == 0.0);
  }
}

TEST_CASE("brightness difference 0.3 gives region ratio 0.5") {
  const auto maps = fusibility_maps(gray(20, 20, 0.6), gray(20, 20, 0.3));
  for (double x : maps.region.values()) CHECK(x == doctest::Approx(0.5).epsilon(1e-12));
  for (double x : maps.contour.values()) CHECK(x == 0.0);
  CHECK(fusibility_energy(maps) == 0.0);
}

TEST_CASE("brightness difference 0.9 is flagged and costs 0.5") {
  const auto maps = fusibility_maps(gray(20, 20, 0.95), gray(20, 20, 0.05));
  for (double x : maps.region.values()) {
    CHECK(x == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(x > 1.0);
  }
  CHECK(fusibility_energy(maps) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("soft excess is zero on [0, 1], non-negative and monotone") {
  double prev = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double x = i / 1000.0;
    const double y = soft_excess(x);
    CHECK(y >= 0.0);
    CHECK(y >= prev);
    if (x <= 1.0) CHECK(y == 0.0);
    else CHECK(y == doctest::Approx(x - 1.0));
    prev = y;
  }
}

TEST_CASE("energy vanishes exactly when every ratio is at most one") {
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    auto maps = random_maps(rng, 7, 5, i % 2 ? 1.0 : 1.3);
    bool all_fine = true;
    for (std::size_t k = 0; k < maps.contour.size(); ++k)
      all_fine = all_fine && maps.contour[k] <= 1.0 && maps.region[k] <= 1.0;
    CHECK((fusibility_energy(maps) == 0.0) == all_fine);
  }
  auto maps = random_maps(rng, 7, 5, 1.0);
  maps.contour[3] = 1.0 + 1e-12;
  CHECK(fusibility_energy(maps) > 0.0);
}

TEST_CASE("energy is symmetric under view swap") {
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const auto l = random_ldr(rng, 30, 20);
    const auto r = random_ldr(rng, 30, 20);
    CHECK(fusibility_energy(fusibility_maps(l, r)) ==
          fusibility_energy(fusibility_maps(r, l)));
  }
}

TEST_CASE("contour ratio follows the default predictor formula") {
  ViewFeatures l{BrightnessMap(1, 1, 0.5), ContrastMap(1, 1, 10.0)};
  ViewFeatures r{BrightnessMap(1, 1, 0.5), ContrastMap(1, 1, 1.0)};
  const auto maps = ThresholdPredictor().predict(l, r);
  CHECK(maps.contour[0] == doctest::Approx(9.0 / (0.8 * 10.0 + 1e-6)).epsilon(1e-15));
  CHECK(maps.region[0] == 0.0);
}

TEST_CASE("views of different size are rejected") {
  CHECK_THROWS_AS(fusibility_maps(gray(4, 4, 0.5), gray(4, 5, 0.5)), InputError);
}
