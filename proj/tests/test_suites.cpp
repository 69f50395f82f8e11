#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <json.hpp>

#include "dfo/rng.hpp"
#include "dfo/suites.hpp"

using namespace dfo;
using namespace dfo::suites;

namespace {

double max_orthogonality_defect(const std::vector<double>& m, std::size_t n) {
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < n; ++k) dot += m[k * n + i] * m[k * n + j];
      worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("catalog optima evaluate to f_star") {
  CHECK(catalog().size() == 14);
  for (const auto& f : catalog()) {
    for (std::size_t dim : {2, 5, 10, 20}) {
      CAPTURE(f.name);
      CAPTURE(dim);
      const auto x = f.x_star_canonical(dim);
      CHECK(std::abs(f.evaluator(x) - f.f_star(dim)) <= 1e-12 * std::max(1.0, std::abs(f.f_star(dim))));
    }
  }
}

TEST_CASE("make_function examples") {
  const Problem s = make_function("sphere", 5, 0);
  CHECK(s.objective(std::vector<double>(5, 0.0)) == 0.0);
  CHECK(s.f_star == 0.0);
  CHECK(s.lower == std::vector<double>(5, -100.0));
  CHECK(s.upper == std::vector<double>(5, 100.0));

  const Problem r = make_function("rastrigin", 10, 7);
  CHECK(std::abs(r.objective(r.x_star) - r.f_star) <= 1e-10);

  const Problem sh = make_function("sphere", 2, 7, TransformKind::shift);
  CHECK(sh.objective(sh.x_star) <= 1e-20);
  std::vector<double> off = sh.x_star;
  off[0] += 1.0;
  CHECK(sh.objective(off) > 0.0);

  CHECK_THROWS_AS(make_function("nope", 2, 0), InvalidArgument);
  CHECK_THROWS_AS(make_function("sphere", 1, 0), InvalidArgument);
}

TEST_CASE("stored optimum reaches f_star for every instance") {
  for (const auto& f : catalog()) {
    for (std::size_t dim : {2, 5, 10, 20}) {
      for (auto kind : {TransformKind::none, TransformKind::shift, TransformKind::shift_rotate}) {
        const Problem p = make_function(f.name, dim, 31, kind);
        CAPTURE(p.name);
        CHECK(std::abs(p.objective(p.x_star) - p.f_star) <= 1e-10 * std::max(1.0, std::abs(p.f_star)));
        for (double v : p.x_star) {
          if (kind != TransformKind::none) CHECK(std::abs(v) <= kShiftHalfWidth);
        }
      }
    }
  }
}

TEST_CASE("random_orthogonal") {
  const auto one = random_orthogonal(1, 5);
  REQUIRE(one.size() == 1);
  CHECK(std::abs(std::abs(one[0]) - 1.0) < 1e-15);
  CHECK(max_orthogonality_defect(random_orthogonal(5, 42), 5) < 1e-10);
  CHECK(max_orthogonality_defect(random_orthogonal(20, 3), 20) < 1e-10);
  CHECK(random_orthogonal(3, 42) == random_orthogonal(3, 42));
  CHECK(random_orthogonal(3, 42) != random_orthogonal(3, 43));
}

TEST_CASE("transform invariance") {
  Rng rng(2024);
  for (const auto& f : catalog()) {
    for (std::size_t dim : {2, 5, 10}) {
      const Problem classic = make_function(f.name, dim, 0);
      const Problem moved = make_function(f.name, dim, 55, TransformKind::shift_rotate);
      const Transform t = make_transform(f, dim, 55, TransformKind::shift_rotate);
      CHECK(t.rotated());
      for (int i = 0; i < 100; ++i) {
        // Ball of radius 15 around the optimum, so R x + s stays within 95 of the origin.
        std::vector<double> x(dim);
        for (auto& v : x) v = f.optimum_in_box() + rng.uniform(-15.0, 15.0) / std::sqrt(static_cast<double>(dim));
        const auto y = t.forward(x);
        REQUIRE(moved.contains(y));
        const double a = moved.objective(y);
        const double b = classic.objective(x);
        CAPTURE(f.name);
        CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)));
      }
      const auto x = std::vector<double>(dim, 1.25);
      const auto back = t.inverse(t.forward(x));
      for (std::size_t k = 0; k < dim; ++k) CHECK(back[k] == doctest::Approx(x[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("objective is finite over the box") {
  Rng rng(8);
  for (const auto& p : suite("shifted_rotated", 5)) {
    for (int i = 0; i < 10000; ++i) {
      std::vector<double> x(5);
      for (auto& v : x) v = rng.uniform(-100.0, 100.0);
      const double f = p.objective(x);
      if (!std::isfinite(f)) FAIL(p.name);
      if (f < p.f_star - 1e-9) FAIL(p.name);
    }
  }
}

TEST_CASE("suites") {
  const auto classic = suite("classic", 5);
  CHECK(classic.size() == 14);
  for (const auto& p : classic) CHECK(std::abs(p.objective(p.x_star) - p.f_star) <= 1e-10 * std::max(1.0, std::abs(p.f_star)));

  const auto a = suite("shifted", 10);
  const auto b = suite("shifted", 10);
  CHECK(a[0].name == b[0].name);
  CHECK(a[0].x_star == b[0].x_star);

  const auto hard = suite("multimodal_hard", 10);
  CHECK(hard.size() == 7);
  for (const auto& p : hard) CHECK(p.multimodal);

  CHECK(suite("shifted_rotated", 2).size() == 14);
  CHECK_THROWS_AS(suite("cec", 5), InvalidArgument);

  // Names encode base, transform kind and seed.
  CHECK(classic[0].name == "sphere");
  CHECK(a[0].name == "sphere_shift_s1");
  CHECK(suite("shifted_rotated", 2)[0].name == "sphere_rot_s101");
}

TEST_CASE("suite listing json") {
  const std::vector<std::size_t> dims{2, 5};
  const auto j = nlohmann::json::parse(suite_listing_json("multimodal_hard", dims));
  REQUIRE(j.is_array());
  CHECK(j.size() == 14);
  CHECK(j[0]["dim"] == 2);
  CHECK(j[0]["transform"] == "shift_rotate");
  CHECK(j[0]["x_star"].size() == 2);
}
