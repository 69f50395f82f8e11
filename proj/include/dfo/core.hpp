#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dfo {

inline constexpr double kTargetError = 1e-8;
inline constexpr double kNegativeErrorTolerance = 1e-6;
inline constexpr std::size_t kStageCount = 8;

// Error hierarchy. Everything thrown by the library derives from Error.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidArgument : Error {
  using Error::Error;
};
struct OutOfBounds : Error {
  using Error::Error;
};
struct NegativeError : Error {
  using Error::Error;
};

// Thrown by evaluation when a run must stop. Optimizers unwind to their run
// loop on this; it is not a failure.
struct StopSearch : Error {
  using Error::Error;
};
struct BudgetExhausted : StopSearch {
  using StopSearch::StopSearch;
};
struct TargetReached : StopSearch {
  using StopSearch::StopSearch;
};

using Objective = std::function<double(std::span<const double>)>;

/// Box-constrained black-box minimization problem with a known optimum value.
struct Problem {
  std::string name;
  std::size_t dim = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  Objective objective;
  double f_star = 0.0;
  // Location of a global minimizer when known (empty otherwise).
  std::vector<double> x_star;
  bool multimodal = false;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument if the bounds are malformed.
  void validate() const;
  bool contains(std::span<const double> x) const;
};

struct Budget {
  std::int64_t max_fes = 0;
  std::int64_t used = 0;
  double target_error = kTargetError;

  std::int64_t remaining() const { return max_fes - used; }
  bool exhausted() const { return used >= max_fes; }
};

struct TrajectoryPoint {
  std::int64_t fes = 0;
  double best_error = 0.0;

  bool operator==(const TrajectoryPoint&) const = default;
};

struct RunRecord {
  std::string algorithm;
  std::string problem;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::int64_t max_fes = 0;
  std::int64_t fes_used = 0;
  std::vector<TrajectoryPoint> trajectory;
  double final_error = std::numeric_limits<double>::infinity();
  double elapsed_seconds = 0.0;
  // Effective algorithm parameters, in a stable order.
  std::vector<std::pair<std::string, double>> params;

  /// Best error recorded at or before `fes`; +inf before the first evaluation.
  double error_at(std::int64_t fes) const;
};

/// Counts one evaluation against `budget` and returns f(x).
/// Throws BudgetExhausted when nothing is left, OutOfBounds on a bound violation.
double evaluate(const Problem& problem, Budget& budget, std::span<const double> x);

/// Errors at or below 1E-08 count as zero. Throws NegativeError below -1E-6.
double snap_error(double raw_error);

/// Fixed budgets for D = 5/10/15/20; 2000*D^2 elsewhere, scaled and floored.
std::int64_t maxfes_for(int dim, double scale = 1.0);

/// floor(max_fes * {1/256, 1/128, 1/32, 1/8, 1/4, 1/2, 3/4, 1}).
std::array<std::int64_t, kStageCount> checkpoint_schedule(std::int64_t max_fes);

/// Labels matching the stage fractions above, e.g. "(1/256)*MaxFES".
const std::array<std::string, kStageCount>& stage_labels();

// Wraps a Problem and Budget for a single run: every evaluation is counted,
// the best-so-far error is tracked and the trajectory is recorded on
// improvement and at each checkpoint.
class Tracker {
public:
  Tracker(const Problem& problem, Budget& budget, bool stop_at_target = true);

  /// Evaluate x. Throws TargetReached once a previous call hit the target,
  /// BudgetExhausted once the budget is spent.
  double operator()(std::span<const double> x);

  bool finished() const { return target_hit_ || budget_.exhausted(); }
  bool target_hit() const { return target_hit_; }
  double best_value() const { return best_value_; }
  double best_error() const;
  const std::vector<double>& best_x() const { return best_x_; }
  const std::vector<TrajectoryPoint>& trajectory() const { return trajectory_; }
  const Problem& problem() const { return problem_; }
  const Budget& budget() const { return budget_; }

  /// Moves the recorded state into a RunRecord.
  RunRecord finish(std::string algorithm, std::uint64_t seed, double elapsed_seconds);

private:
  const Problem& problem_;
  Budget& budget_;
  bool stop_at_target_;
  bool target_hit_ = false;
  double best_value_ = std::numeric_limits<double>::infinity();
  std::vector<double> best_x_;
  std::vector<TrajectoryPoint> trajectory_;
  std::vector<std::int64_t> checkpoints_;
  std::size_t next_checkpoint_ = 0;
};

}  // namespace dfo
