#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <vector>

#include "dfo/core.hpp"
#include "dfo/direct.hpp"
#include "dfo/nature.hpp"
#include "dfo/suites.hpp"

using namespace dfo;

namespace {

Problem sphere2() {
  Problem p;
  p.name = "sphere";
  p.dim = 2;
  p.lower = {-100, -100};
  p.upper = {100, 100};
  p.objective = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
  return p;
}

}  // namespace

TEST_CASE("evaluate counts and enforces the contract") {
  const Problem p = sphere2();
  Budget b{3};
  const std::vector<double> origin{0, 0};
  CHECK(evaluate(p, b, origin) == p.f_star);
  CHECK(b.used == 1);

  Budget spent{2, 2};
  CHECK_THROWS_AS(evaluate(p, spent, origin), BudgetExhausted);
  CHECK(spent.used == 2);

  const std::vector<double> outside{120, -150};
  CHECK_THROWS_AS(evaluate(p, b, outside), OutOfBounds);
  CHECK(b.used == 1);
}

TEST_CASE("snap_error") {
  CHECK(snap_error(3e-9) == 0.0);
  CHECK(snap_error(1e-2) == 1e-2);
  CHECK(snap_error(1e-8) == 0.0);
  CHECK(snap_error(-5e-7) == 0.0);
  CHECK_THROWS_AS(snap_error(-1e-3), NegativeError);
  for (double e : {0.0, 1e-9, 1e-8, 2e-8, 0.5, 1e10}) CHECK(snap_error(snap_error(e)) == snap_error(e));
}

TEST_CASE("maxfes_for") {
  CHECK(maxfes_for(5) == 50000);
  CHECK(maxfes_for(10) == 200000);
  CHECK(maxfes_for(15) == 500000);
  CHECK(maxfes_for(20) == 1000000);
  CHECK(maxfes_for(2) == 50000 * 4 / 25);
  CHECK(maxfes_for(10, 0.01) == 2000);
  CHECK(maxfes_for(10, 0.25) == 50000);
  CHECK_THROWS_AS(maxfes_for(0), InvalidArgument);
}

TEST_CASE("checkpoint_schedule") {
  using A = std::array<std::int64_t, 8>;
  CHECK(checkpoint_schedule(200000) == A{781, 1562, 6250, 25000, 50000, 100000, 150000, 200000});
  CHECK(checkpoint_schedule(256) == A{1, 2, 8, 32, 64, 128, 192, 256});
  CHECK(checkpoint_schedule(50000) == A{195, 390, 1562, 6250, 12500, 25000, 37500, 50000});
  CHECK_THROWS_AS(checkpoint_schedule(255), InvalidArgument);
  for (std::int64_t m : {256, 257, 1000, 4097, 123457}) {
    const auto s = checkpoint_schedule(m);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
  }
  CHECK(stage_labels().front() == "(1/256)*MaxFES");
  CHECK(stage_labels().back() == "MaxFES");
}

TEST_CASE("tracker records improvements and checkpoints") {
  Problem p = sphere2();
  p.f_star = -1.0;
  Budget b{256};
  Tracker t(p, b);
  const std::vector<double> far{10, 10}, near{1, 0};
  t(far);
  CHECK(t.trajectory().size() == 1);
  CHECK(t.trajectory()[0] == TrajectoryPoint{1, 201.0});
  t(near);
  CHECK(t.trajectory().back() == TrajectoryPoint{2, 2.0});
  for (int i = 0; i < 10; ++i) t(far);
  // Checkpoint 8 is sampled although nothing improved.
  CHECK(t.trajectory().back() == TrajectoryPoint{8, 2.0});

  const RunRecord r = t.finish("x", 0, 0.0);
  CHECK(r.fes_used == 12);
  CHECK(r.final_error == 2.0);
  CHECK(r.error_at(0) == std::numeric_limits<double>::infinity());
  CHECK(r.error_at(1) == 201.0);
  CHECK(r.error_at(5) == 2.0);
}

TEST_CASE("tracker stops after reaching the target") {
  const Problem p = sphere2();
  Budget b{100};
  Tracker t(p, b);
  const std::vector<double> origin{0, 0};
  t(origin);
  CHECK(t.target_hit());
  CHECK(t.finished());
  CHECK_THROWS_AS(t(origin), TargetReached);
  CHECK(b.used == 1);

  Budget b2{100};
  Tracker keep_going(p, b2, false);
  keep_going(origin);
  CHECK_NOTHROW(keep_going(origin));
}

TEST_CASE("budget accounting and trajectory shape across all algorithms") {
  const std::vector<std::string> algos{"pso", "de", "lshade", "dir", "dir_l", "dir_gl", "dirmin"};
  for (const auto& algo : algos) {
    for (const char* fn : {"rosenbrock", "ackley", "step_sphere"}) {
      auto calls = std::make_shared<std::int64_t>(0);
      Problem p = suites::make_function(fn, 4, 3);
      p.objective = [inner = p.objective, calls](std::span<const double> x) {
        ++*calls;
        return inner(x);
      };
      Budget b{3000};
      const RunRecord r = direct::is_direct_algorithm(algo)
                              ? direct::run_direct({direct::parse_variant(algo)}, p, b)
                              : nature::run_optimizer(algo, p, b, 9);
      CAPTURE(algo);
      CAPTURE(fn);
      CHECK(*calls == r.fes_used);
      CHECK(r.fes_used <= 3000);
      REQUIRE(!r.trajectory.empty());
      CHECK(r.trajectory.back().fes <= r.max_fes);
      CHECK(r.final_error == r.trajectory.back().best_error);
      for (std::size_t i = 1; i < r.trajectory.size(); ++i) {
        CHECK(r.trajectory[i].fes > r.trajectory[i - 1].fes);
        CHECK(r.trajectory[i].best_error <= r.trajectory[i - 1].best_error);
      }
    }
  }
}
