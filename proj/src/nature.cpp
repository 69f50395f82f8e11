#include "dfo/nature.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace dfo::nature {

void PsoParams::validate() const {
  if (pop < 2) throw InvalidArgument("pso: pop must be >= 2");
  if (!(w_max > w_min && w_min > 0.0)) throw InvalidArgument("pso: need w_max > w_min > 0");
  if (!(v_max_fraction > 0.0)) throw InvalidArgument("pso: v_max_fraction must be positive");
}

void DeParams::validate() const {
  if (pop != 0 && pop < 4) throw InvalidArgument("de: pop must be >= 4");
  if (!(F > 0.0)) throw InvalidArgument("de: F must be positive");
  if (!(CR >= 0.0 && CR <= 1.0)) throw InvalidArgument("de: CR must lie in [0, 1]");
}

std::size_t DeParams::population_for(std::size_t dim) const {
  if (pop != 0) return pop;
  return std::clamp<std::size_t>(5 * dim, 20, 100);
}

void LshadeParams::validate() const {
  if (n_min < 4) throw InvalidArgument("lshade: n_min must be >= 4");
  if (memory_size < 1) throw InvalidArgument("lshade: memory_size must be >= 1");
  if (!(p_best > 0.0 && p_best <= 1.0)) throw InvalidArgument("lshade: p_best must lie in (0, 1]");
  if (!(archive_rate >= 0.0)) throw InvalidArgument("lshade: archive_rate must be >= 0");
  if (!(initial_memory > 0.0 && initial_memory <= 1.0))
    throw InvalidArgument("lshade: initial_memory must lie in (0, 1]");
  if (!(n_init_per_dim > 0.0)) throw InvalidArgument("lshade: n_init_per_dim must be positive");
}

std::size_t LshadeParams::initial_population(std::size_t dim) const {
  const auto n = static_cast<std::size_t>(std::lround(n_init_per_dim * static_cast<double>(dim)));
  return std::max(n, n_min + 1);
}

std::vector<double> pso_velocity(std::span<const double> v, std::span<const double> x,
                                 std::span<const double> p_best, std::span<const double> g_best,
                                 double w, std::span<const double> r1, std::span<const double> r2,
                                 const PsoParams& params, std::span<const double> v_max) {
  const std::size_t n = x.size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double raw = w * v[k] + params.c1 * r1[k] * (p_best[k] - x[k]) + params.c2 * r2[k] * (g_best[k] - x[k]);
    out[k] = std::clamp(raw, -v_max[k], v_max[k]);
  }
  return out;
}

double pso_inertia(std::size_t gen, std::size_t max_gen, const PsoParams& params) {
  if (max_gen == 0) throw InvalidArgument("pso_inertia: max_gen must be >= 1");
  const double t = static_cast<double>(std::min(gen, max_gen)) / static_cast<double>(max_gen);
  return params.w_max - (params.w_max - params.w_min) * t;
}

std::vector<double> de_trial(std::span<const double> x, std::span<const double> a,
                             std::span<const double> b, std::span<const double> c, std::size_t j,
                             std::span<const double> crossover_draws, const DeParams& params,
                             std::span<const double> lower, std::span<const double> upper) {
  const double* ptrs[4] = {x.data(), a.data(), b.data(), c.data()};
  for (int p = 0; p < 4; ++p) {
    for (int q = p + 1; q < 4; ++q) {
      if (ptrs[p] == ptrs[q]) throw InvalidArgument("de_trial: indices not distinct");
    }
  }
  const std::size_t n = x.size();
  if (j >= n) throw InvalidArgument("de_trial: crossover index out of range");
  std::vector<double> trial(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = a[i] + params.F * (b[i] - c[i]);
    const double v = (i == j || crossover_draws[i] < params.CR) ? z : x[i];
    trial[i] = std::clamp(v, lower[i], upper[i]);
  }
  return trial;
}

std::pair<std::vector<double>, double> de_select(std::span<const double> x, double fx,
                                                 std::span<const double> trial, double ftrial) {
  if (ftrial <= fx) return {std::vector<double>(trial.begin(), trial.end()), ftrial};
  return {std::vector<double>(x.begin(), x.end()), fx};
}

std::size_t lshade_pop_size(std::int64_t nfes, std::int64_t max_fes, std::size_t n_init,
                            std::size_t n_min) {
  if (max_fes <= 0) throw InvalidArgument("lshade_pop_size: max_fes must be positive");
  const double t = static_cast<double>(std::clamp<std::int64_t>(nfes, 0, max_fes)) / static_cast<double>(max_fes);
  const double n = static_cast<double>(n_init) - (static_cast<double>(n_init) - static_cast<double>(n_min)) * t;
  return std::max<std::size_t>(static_cast<std::size_t>(std::lround(n)), n_min);
}

std::size_t pbest_pool_size(double p, std::size_t pop) {
  const auto k = static_cast<std::size_t>(std::lround(p * static_cast<double>(pop)));
  return std::min(std::max<std::size_t>(2, k), pop);
}

namespace {

std::vector<double> random_point(const Problem& problem, Rng& rng) {
  std::vector<double> x(problem.dim);
  for (std::size_t k = 0; k < problem.dim; ++k) x[k] = rng.uniform(problem.lower[k], problem.upper[k]);
  return x;
}

std::vector<Individual> initial_population(std::size_t size, Tracker& tracker, Rng& rng) {
  std::vector<Individual> pop;
  pop.reserve(size);
  for (std::size_t i = 0; i < size; ++i) pop.push_back({random_point(tracker.problem(), rng), 0.0});
  for (auto& ind : pop) ind.f = tracker(ind.x);
  return pop;
}

}  // namespace

// ---- PSO ------------------------------------------------------------------

Pso::Pso(const PsoParams& params, Tracker& tracker, Rng& rng)
    : params_(params), tracker_(tracker), rng_(rng) {
  params_.validate();
  const Problem& p = tracker_.problem();
  v_max_.resize(p.dim);
  for (std::size_t k = 0; k < p.dim; ++k) v_max_[k] = params_.v_max_fraction * (p.upper[k] - p.lower[k]);
  max_gen_ = std::max<std::size_t>(1, static_cast<std::size_t>(tracker_.budget().max_fes) / params_.pop);

  particles_.reserve(params_.pop);
  velocities_.reserve(params_.pop);
  for (std::size_t i = 0; i < params_.pop; ++i) {
    particles_.push_back({random_point(p, rng_), 0.0});
    std::vector<double> v(p.dim);
    for (std::size_t k = 0; k < p.dim; ++k) v[k] = rng_.uniform(-v_max_[k], v_max_[k]);
    velocities_.push_back(std::move(v));
  }
  personal_best_ = particles_;
  global_best_.f = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < params_.pop; ++i) evaluate_particle(i);
}

void Pso::evaluate_particle(std::size_t i) {
  Individual& part = particles_[i];
  part.f = tracker_(part.x);
  if (generation_ == 0 || part.f < personal_best_[i].f) personal_best_[i] = part;
  if (part.f < global_best_.f) global_best_ = part;
}

void Pso::step() {
  ++generation_;
  const Problem& p = tracker_.problem();
  const double w = pso_inertia(generation_, max_gen_, params_);
  std::vector<double> r1(p.dim), r2(p.dim);
  for (std::size_t i = 0; i < particles_.size(); ++i) {
    for (std::size_t k = 0; k < p.dim; ++k) {
      r1[k] = rng_.uniform();
      r2[k] = rng_.uniform();
    }
    auto& x = particles_[i].x;
    auto& v = velocities_[i];
    v = pso_velocity(v, x, personal_best_[i].x, global_best_.x, w, r1, r2, params_, v_max_);
    for (std::size_t k = 0; k < p.dim; ++k) {
      x[k] += v[k];
      if (x[k] < p.lower[k]) {
        x[k] = p.lower[k];
        v[k] = 0.0;
      } else if (x[k] > p.upper[k]) {
        x[k] = p.upper[k];
        v[k] = 0.0;
      }
    }
    evaluate_particle(i);
  }
}

// ---- DE -------------------------------------------------------------------

De::De(const DeParams& params, Tracker& tracker, Rng& rng)
    : params_(params), tracker_(tracker), rng_(rng) {
  params_.validate();
  params_.pop = params_.population_for(tracker_.problem().dim);
  population_ = initial_population(params_.pop, tracker_, rng_);
}

void De::step() {
  const Problem& p = tracker_.problem();
  const std::size_t np = population_.size();
  std::vector<Individual> next = population_;
  std::vector<double> draws(p.dim);
  for (std::size_t i = 0; i < np; ++i) {
    std::size_t a, b, c;
    do { a = rng_.index(np); } while (a == i);
    do { b = rng_.index(np); } while (b == i || b == a);
    do { c = rng_.index(np); } while (c == i || c == a || c == b);
    const std::size_t j = rng_.index(p.dim);
    for (auto& d : draws) d = rng_.uniform();
    auto trial = de_trial(population_[i].x, population_[a].x, population_[b].x, population_[c].x, j,
                          draws, params_, p.lower, p.upper);
    const double ft = tracker_(trial);
    auto [x, fx] = de_select(population_[i].x, population_[i].f, trial, ft);
    next[i] = {std::move(x), fx};
  }
  population_ = std::move(next);
}

// ---- LSHADE ---------------------------------------------------------------

Lshade::Lshade(const LshadeParams& params, Tracker& tracker, Rng& rng)
    : params_(params), tracker_(tracker), rng_(rng) {
  params_.validate();
  n_init_ = params_.initial_population(tracker_.problem().dim);
  memory_f_.assign(params_.memory_size, params_.initial_memory);
  memory_cr_.assign(params_.memory_size, params_.initial_memory);
  population_ = initial_population(n_init_, tracker_, rng_);
}

std::size_t Lshade::archive_capacity() const {
  return static_cast<std::size_t>(std::lround(params_.archive_rate * static_cast<double>(population_.size())));
}

void Lshade::archive_insert(std::vector<double> x) {
  const std::size_t cap = archive_capacity();
  if (cap == 0) return;
  if (archive_.size() < cap) {
    archive_.push_back(std::move(x));
  } else {
    archive_[rng_.index(archive_.size())] = std::move(x);
  }
}

void Lshade::step() {
  const Problem& p = tracker_.problem();
  const std::size_t n = p.dim;
  const std::size_t np = population_.size();

  std::vector<std::size_t> order(np);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return population_[l].f < population_[r].f; });
  const std::size_t pool = pbest_pool_size(params_.p_best, np);

  std::vector<std::vector<double>> trials(np, std::vector<double>(n));
  std::vector<double> f_used(np), cr_used(np);
  for (std::size_t i = 0; i < np; ++i) {
    const std::size_t slot = rng_.index(memory_f_.size());
    const double cr = std::clamp(rng_.normal(memory_cr_[slot], 0.1), 0.0, 1.0);
    double f;
    do { f = rng_.cauchy(memory_f_[slot], 0.1); } while (f <= 0.0);
    f = std::min(f, 1.0);
    f_used[i] = f;
    cr_used[i] = cr;

    const std::size_t pbest = order[rng_.index(pool)];
    std::size_t r1;
    do { r1 = rng_.index(np); } while (r1 == i);
    std::size_t r2;
    do { r2 = rng_.index(np + archive_.size()); } while (r2 == i || r2 == r1);
    const auto& xi = population_[i].x;
    const auto& xp = population_[pbest].x;
    const auto& x1 = population_[r1].x;
    const auto& x2 = r2 < np ? population_[r2].x : archive_[r2 - np];

    const std::size_t jrand = rng_.index(n);
    auto& u = trials[i];
    for (std::size_t k = 0; k < n; ++k) {
      double v = xi[k] + f * (xp[k] - xi[k]) + f * (x1[k] - x2[k]);
      if (v < p.lower[k]) v = 0.5 * (p.lower[k] + xi[k]);
      else if (v > p.upper[k]) v = 0.5 * (p.upper[k] + xi[k]);
      u[k] = (k == jrand || rng_.uniform() < cr) ? v : xi[k];
    }
  }

  std::vector<double> f_trial(np);
  for (std::size_t i = 0; i < np; ++i) f_trial[i] = tracker_(trials[i]);

  std::vector<double> s_f, s_cr, delta;
  for (std::size_t i = 0; i < np; ++i) {
    if (f_trial[i] < population_[i].f) {
      archive_insert(population_[i].x);
      s_f.push_back(f_used[i]);
      s_cr.push_back(cr_used[i]);
      delta.push_back(population_[i].f - f_trial[i]);
      population_[i] = {std::move(trials[i]), f_trial[i]};
    } else if (f_trial[i] == population_[i].f) {
      population_[i] = {std::move(trials[i]), f_trial[i]};
    }
  }

  if (!s_f.empty()) {
    const double total = std::accumulate(delta.begin(), delta.end(), 0.0);
    double num_f = 0.0, den_f = 0.0, num_cr = 0.0, den_cr = 0.0;
    for (std::size_t s = 0; s < s_f.size(); ++s) {
      const double w = total > 0.0 ? delta[s] / total : 1.0 / static_cast<double>(s_f.size());
      num_f += w * s_f[s] * s_f[s];
      den_f += w * s_f[s];
      num_cr += w * s_cr[s] * s_cr[s];
      den_cr += w * s_cr[s];
    }
    if (den_f > 0.0) memory_f_[memory_pos_] = num_f / den_f;
    // All-zero CR successes leave the slot unchanged.
    if (den_cr > 0.0) memory_cr_[memory_pos_] = num_cr / den_cr;
    memory_pos_ = (memory_pos_ + 1) % memory_f_.size();
  }

  const std::size_t target =
      lshade_pop_size(tracker_.budget().used, tracker_.budget().max_fes, n_init_, params_.n_min);
  if (target < population_.size()) {
    std::stable_sort(population_.begin(), population_.end(),
                     [](const Individual& l, const Individual& r) { return l.f < r.f; });
    population_.resize(target);
    const std::size_t cap = archive_capacity();
    while (archive_.size() > cap) {
      const std::size_t victim = rng_.index(archive_.size());
      archive_[victim] = std::move(archive_.back());
      archive_.pop_back();
    }
  }
}

// ---- Runner ---------------------------------------------------------------

bool is_nature_algorithm(std::string_view algo) {
  return algo == "pso" || algo == "de" || algo == "lshade";
}

std::vector<std::pair<std::string, double>> effective_params(std::string_view algo, std::size_t dim,
                                                             const AlgorithmParams& params) {
  if (algo == "pso") {
    const auto& q = params.pso;
    return {{"pop", static_cast<double>(q.pop)}, {"w_max", q.w_max}, {"w_min", q.w_min},
            {"c1", q.c1}, {"c2", q.c2}, {"v_max_fraction", q.v_max_fraction}};
  }
  if (algo == "de") {
    const auto& q = params.de;
    return {{"pop", static_cast<double>(q.population_for(dim))}, {"F", q.F}, {"CR", q.CR}};
  }
  if (algo == "lshade") {
    const auto& q = params.lshade;
    return {{"n_init", static_cast<double>(q.initial_population(dim))},
            {"n_min", static_cast<double>(q.n_min)},
            {"memory_size", static_cast<double>(q.memory_size)},
            {"p_best", q.p_best},
            {"archive_rate", q.archive_rate},
            {"initial_memory", q.initial_memory}};
  }
  throw InvalidArgument("unknown nature-inspired algorithm '" + std::string(algo) + "'");
}

namespace {

template <class Algo, class Params>
void drive(const Params& params, Tracker& tracker, Rng& rng) {
  Algo algo(params, tracker, rng);
  while (!tracker.finished()) algo.step();
}

}  // namespace

RunRecord run_optimizer(std::string_view algo, const Problem& problem, Budget& budget,
                        std::uint64_t seed, const AlgorithmParams& params) {
  problem.validate();
  auto eff = effective_params(algo, problem.dim, params);

  const auto start = std::chrono::steady_clock::now();
  Tracker tracker(problem, budget);
  Rng rng(seed);
  try {
    if (algo == "pso") drive<Pso>(params.pso, tracker, rng);
    else if (algo == "de") drive<De>(params.de, tracker, rng);
    else drive<Lshade>(params.lshade, tracker, rng);
  } catch (const StopSearch&) {
    // Budget spent or target reached, possibly mid-generation.
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  RunRecord rec = tracker.finish(std::string(algo), seed, elapsed);
  rec.params = std::move(eff);
  return rec;
}

}  // namespace dfo::nature
