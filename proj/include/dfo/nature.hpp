#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dfo/core.hpp"
#include "dfo/rng.hpp"

namespace dfo::nature {

struct PsoParams {
  std::size_t pop = 40;
  double w_max = 0.9;
  double w_min = 0.4;
  double c1 = 2.0;
  double c2 = 2.0;
  // Velocity limit as a fraction of each coordinate's range.
  double v_max_fraction = 0.2;

  void validate() const;
};

struct DeParams {
  std::size_t pop = 0;  // 0: 5*D clamped to [20, 100]
  double F = 0.5;
  double CR = 0.9;

  void validate() const;
  std::size_t population_for(std::size_t dim) const;
};

struct LshadeParams {
  double n_init_per_dim = 18.0;
  std::size_t n_min = 4;
  std::size_t memory_size = 6;
  double p_best = 0.11;
  double archive_rate = 2.6;
  double initial_memory = 0.5;

  void validate() const;
  std::size_t initial_population(std::size_t dim) const;
};

/// w*v + c1*r1.*(p_best - x) + c2*r2.*(g_best - x), clamped to [-v_max, v_max].
std::vector<double> pso_velocity(std::span<const double> v, std::span<const double> x,
                                 std::span<const double> p_best, std::span<const double> g_best,
                                 double w, std::span<const double> r1, std::span<const double> r2,
                                 const PsoParams& params, std::span<const double> v_max);

/// Linear inertia schedule from w_max at gen 0 to w_min at max_gen.
double pso_inertia(std::size_t gen, std::size_t max_gen, const PsoParams& params);

/// rand/1/bin trial vector. `a`, `b`, `c` must be distinct individuals
/// (distinct storage) and distinct from `x`; throws InvalidArgument
/// ("indices not distinct") otherwise. `j` is the forced crossover index.
std::vector<double> de_trial(std::span<const double> x, std::span<const double> a,
                             std::span<const double> b, std::span<const double> c, std::size_t j,
                             std::span<const double> crossover_draws, const DeParams& params,
                             std::span<const double> lower, std::span<const double> upper);

/// Greedy one-to-one selection; ties go to the trial.
std::pair<std::vector<double>, double> de_select(std::span<const double> x, double fx,
                                                 std::span<const double> trial, double ftrial);

/// round(n_init - (n_init - n_min) * nfes / max_fes).
std::size_t lshade_pop_size(std::int64_t nfes, std::int64_t max_fes, std::size_t n_init,
                            std::size_t n_min);

/// Size of the p-best pool: max(2, round(p * pop)).
std::size_t pbest_pool_size(double p, std::size_t pop);

struct Individual {
  std::vector<double> x;
  double f = 0.0;
};

class Pso {
public:
  Pso(const PsoParams& params, Tracker& tracker, Rng& rng);

  /// One generation: every particle moves once and is evaluated.
  void step();

  const std::vector<Individual>& particles() const { return particles_; }
  const std::vector<Individual>& personal_best() const { return personal_best_; }
  const Individual& global_best() const { return global_best_; }
  std::size_t generation() const { return generation_; }

private:
  void evaluate_particle(std::size_t i);

  PsoParams params_;
  Tracker& tracker_;
  Rng& rng_;
  std::vector<Individual> particles_;
  std::vector<std::vector<double>> velocities_;
  std::vector<Individual> personal_best_;
  Individual global_best_;
  std::vector<double> v_max_;
  std::size_t generation_ = 0;
  std::size_t max_gen_ = 1;
};

class De {
public:
  De(const DeParams& params, Tracker& tracker, Rng& rng);

  void step();

  const std::vector<Individual>& population() const { return population_; }

private:
  DeParams params_;
  Tracker& tracker_;
  Rng& rng_;
  std::vector<Individual> population_;
};

class Lshade {
public:
  Lshade(const LshadeParams& params, Tracker& tracker, Rng& rng);

  void step();

  const std::vector<Individual>& population() const { return population_; }
  const std::vector<std::vector<double>>& archive() const { return archive_; }
  std::size_t archive_capacity() const;
  const std::vector<double>& memory_f() const { return memory_f_; }
  const std::vector<double>& memory_cr() const { return memory_cr_; }
  std::size_t n_init() const { return n_init_; }
  std::size_t n_min() const { return params_.n_min; }

  /// Adds a replaced parent, evicting a random member when at capacity.
  void archive_insert(std::vector<double> x);

private:
  LshadeParams params_;
  Tracker& tracker_;
  Rng& rng_;
  std::size_t n_init_;
  std::vector<Individual> population_;
  std::vector<std::vector<double>> archive_;
  std::vector<double> memory_f_;
  std::vector<double> memory_cr_;
  std::size_t memory_pos_ = 0;
};

struct AlgorithmParams {
  PsoParams pso;
  DeParams de;
  LshadeParams lshade;
};

bool is_nature_algorithm(std::string_view algo);

/// Effective parameter list for `algo` in `dim`, as echoed into run records.
std::vector<std::pair<std::string, double>> effective_params(std::string_view algo, std::size_t dim,
                                                             const AlgorithmParams& params);

/// Full seeded run of pso, de or lshade until the budget is spent or the
/// snapped error reaches zero.
RunRecord run_optimizer(std::string_view algo, const Problem& problem, Budget& budget,
                        std::uint64_t seed, const AlgorithmParams& params = {});

}  // namespace dfo::nature
