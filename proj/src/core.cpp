#include "dfo/core.hpp"

#include <algorithm>
#include <cmath>

namespace dfo {

void Problem::validate() const {
  if (dim == 0) throw InvalidArgument("problem '" + name + "': dimension must be positive");
  if (lower.size() != dim || upper.size() != dim)
    throw InvalidArgument("problem '" + name + "': bounds size does not match dimension");
  for (std::size_t k = 0; k < dim; ++k) {
    if (!(lower[k] < upper[k]))
      throw InvalidArgument("problem '" + name + "': lower bound not below upper bound");
  }
  if (!objective) throw InvalidArgument("problem '" + name + "': missing objective");
}

bool Problem::contains(std::span<const double> x) const {
  if (x.size() != dim) return false;
  for (std::size_t k = 0; k < dim; ++k) {
    if (!(x[k] >= lower[k] && x[k] <= upper[k])) return false;
  }
  return true;
}

double RunRecord::error_at(std::int64_t fes) const {
  auto it = std::upper_bound(trajectory.begin(), trajectory.end(), fes,
                             [](std::int64_t f, const TrajectoryPoint& p) { return f < p.fes; });
  if (it == trajectory.begin()) return std::numeric_limits<double>::infinity();
  return std::prev(it)->best_error;
}

double evaluate(const Problem& problem, Budget& budget, std::span<const double> x) {
  if (budget.used >= budget.max_fes) throw BudgetExhausted("evaluation budget exhausted");
  if (!problem.contains(x)) throw OutOfBounds("point outside the bounds of '" + problem.name + "'");
  ++budget.used;
  return problem.objective(x);
}

double snap_error(double raw_error) {
  if (std::isnan(raw_error)) throw NegativeError("error is NaN");
  if (raw_error < -kNegativeErrorTolerance)
    throw NegativeError("function value below the known optimum: error " + std::to_string(raw_error));
  return raw_error <= kTargetError ? 0.0 : raw_error;
}

std::int64_t maxfes_for(int dim, double scale) {
  if (dim < 1) throw InvalidArgument("dimension must be at least 1");
  if (!(scale > 0.0)) throw InvalidArgument("budget scale must be positive");
  std::int64_t base = 0;
  switch (dim) {
    case 5: base = 50'000; break;
    case 10: base = 200'000; break;
    case 15: base = 500'000; break;
    case 20: base = 1'000'000; break;
    default: base = 2000 * static_cast<std::int64_t>(dim) * dim; break;
  }
  return static_cast<std::int64_t>(std::floor(static_cast<double>(base) * scale));
}

namespace {
constexpr std::array<std::pair<std::int64_t, std::int64_t>, kStageCount> kStageFractions{{
    {1, 256}, {1, 128}, {1, 32}, {1, 8}, {1, 4}, {1, 2}, {3, 4}, {1, 1}}};
}

std::array<std::int64_t, kStageCount> checkpoint_schedule(std::int64_t max_fes) {
  if (max_fes < 256) throw InvalidArgument("checkpoint schedule needs MaxFES >= 256");
  std::array<std::int64_t, kStageCount> out{};
  for (std::size_t i = 0; i < kStageCount; ++i)
    out[i] = max_fes * kStageFractions[i].first / kStageFractions[i].second;
  return out;
}

const std::array<std::string, kStageCount>& stage_labels() {
  static const std::array<std::string, kStageCount> labels{
      "(1/256)*MaxFES", "(1/128)*MaxFES", "(1/32)*MaxFES", "(1/8)*MaxFES",
      "(1/4)*MaxFES",   "(1/2)*MaxFES",   "(3/4)*MaxFES",  "MaxFES"};
  return labels;
}

Tracker::Tracker(const Problem& problem, Budget& budget, bool stop_at_target)
    : problem_(problem), budget_(budget), stop_at_target_(stop_at_target) {
  if (budget_.max_fes >= 256) {
    auto cps = checkpoint_schedule(budget_.max_fes);
    checkpoints_.assign(cps.begin(), cps.end());
  }
}

double Tracker::best_error() const {
  if (trajectory_.empty()) return std::numeric_limits<double>::infinity();
  return trajectory_.back().best_error;
}

double Tracker::operator()(std::span<const double> x) {
  if (target_hit_) throw TargetReached("target precision reached");
  const double f = evaluate(problem_, budget_, x);
  const std::int64_t fes = budget_.used;

  if (f < best_value_ || trajectory_.empty()) {
    if (f < best_value_) {
      best_value_ = f;
      best_x_.assign(x.begin(), x.end());
    }
    const double raw = best_value_ - problem_.f_star;
    const double snapped = snap_error(raw);
    const double err = std::max(raw, 0.0);
    if (trajectory_.empty() || err < trajectory_.back().best_error) {
      trajectory_.push_back({fes, err});
    }
    if (stop_at_target_ && snapped == 0.0) target_hit_ = true;
  }

  while (next_checkpoint_ < checkpoints_.size() && checkpoints_[next_checkpoint_] <= fes) {
    if (checkpoints_[next_checkpoint_] == fes && trajectory_.back().fes != fes)
      trajectory_.push_back({fes, trajectory_.back().best_error});
    ++next_checkpoint_;
  }
  return f;
}

RunRecord Tracker::finish(std::string algorithm, std::uint64_t seed, double elapsed_seconds) {
  RunRecord rec;
  rec.algorithm = std::move(algorithm);
  rec.problem = problem_.name;
  rec.dim = problem_.dim;
  rec.seed = seed;
  rec.max_fes = budget_.max_fes;
  rec.fes_used = budget_.used;
  rec.trajectory = trajectory_;
  rec.final_error = best_error();
  rec.elapsed_seconds = elapsed_seconds;
  return rec;
}

}  // namespace dfo
