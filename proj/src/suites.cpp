#include "dfo/suites.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "dfo/rng.hpp"

namespace dfo::suites {

namespace {

constexpr double kPi = std::numbers::pi;

double sphere(std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return s;
}

double ellipsoid(std::span<const double> u) {
  const std::size_t n = u.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = n > 1 ? std::pow(1e6, static_cast<double>(i) / static_cast<double>(n - 1)) : 1.0;
    s += c * u[i] * u[i];
  }
  return s;
}

double rosenbrock(std::span<const double> u) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double a = u[i + 1] - u[i] * u[i];
    const double b = u[i] - 1.0;
    s += 100.0 * a * a + b * b;
  }
  return s;
}

double rastrigin(std::span<const double> u) {
  // 10 - 10 cos(2 pi v) written as 20 sin^2(pi v): no cancellation near 0.
  double s = 0.0;
  for (double v : u) {
    const double t = std::sin(kPi * v);
    s += v * v + 20.0 * t * t;
  }
  return s;
}

double ackley(std::span<const double> u) {
  const double n = static_cast<double>(u.size());
  double sq = 0.0, cs = 0.0;
  for (double v : u) {
    sq += v * v;
    cs += std::cos(2.0 * kPi * v);
  }
  const double r = -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 + std::numbers::e;
  return std::max(r, 0.0);
}

double griewank(std::span<const double> u) {
  double s = 0.0, p = 1.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    s += u[i] * u[i];
    p *= std::cos(u[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return 1.0 + s / 4000.0 - p;
}

double levy(std::span<const double> u) {
  const std::size_t n = u.size();
  auto w = [&](std::size_t i) { return 1.0 + (u[i] - 1.0) / 4.0; };
  const double s1 = std::sin(kPi * w(0));
  double s = s1 * s1;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double wi = w(i);
    const double si = std::sin(kPi * wi + 1.0);
    s += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * si * si);
  }
  const double wn = w(n - 1);
  const double sn = std::sin(2.0 * kPi * wn);
  s += (wn - 1.0) * (wn - 1.0) * (1.0 + sn * sn);
  return s;
}

double schwefel222(std::span<const double> u) {
  double s = 0.0, p = 1.0;
  for (double v : u) {
    s += std::abs(v);
    p *= std::abs(v);
  }
  return s + p;
}

double zakharov(std::span<const double> u) {
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    s1 += u[i] * u[i];
    s2 += 0.5 * static_cast<double>(i + 1) * u[i];
  }
  const double s2sq = s2 * s2;
  return s1 + s2sq + s2sq * s2sq;
}

double bent_cigar(std::span<const double> u) {
  double s = u[0] * u[0];
  for (std::size_t i = 1; i < u.size(); ++i) s += 1e6 * u[i] * u[i];
  return s;
}

double discus(std::span<const double> u) {
  double s = 1e6 * u[0] * u[0];
  for (std::size_t i = 1; i < u.size(); ++i) s += u[i] * u[i];
  return s;
}

double schaffer_f7(std::span<const double> u) {
  const std::size_t n = u.size();
  if (n < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double si = std::sqrt(u[i] * u[i] + u[i + 1] * u[i + 1]);
    const double t = std::sin(50.0 * std::pow(si, 0.2));
    s += std::sqrt(si) * (1.0 + t * t);
  }
  s /= static_cast<double>(n - 1);
  return s * s;
}

double styblinski_term(double v) { return 0.5 * (v * v * v * v - 16.0 * v * v + 5.0 * v); }

double styblinski_tang(std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += styblinski_term(v);
  return s;
}

// Global minimizer of the one-dimensional term: root of 2u^3 - 16u + 2.5 near -2.9.
double styblinski_root() {
  double x = -2.9;
  for (int i = 0; i < 60; ++i) {
    const double g = 2.0 * x * x * x - 16.0 * x + 2.5;
    const double h = 6.0 * x * x - 16.0;
    const double next = x - g / h;
    if (next == x) break;
    x = next;
  }
  return x;
}

double step_sphere(std::span<const double> u) {
  double s = 0.0;
  for (double v : u) {
    const double q = std::floor(v + 0.5);
    s += q * q;
  }
  return s;
}

void require_dim(std::size_t dim) {
  if (dim < 2) throw InvalidArgument("benchmark functions need dim >= 2");
}

}  // namespace

double BaseFunction::f_star(std::size_t dim) const {
  // Every entry is zero at its minimizer except Styblinski-Tang.
  if (name == "styblinski_tang") return static_cast<double>(dim) * styblinski_term(optimum_coord);
  return 0.0;
}

std::vector<double> BaseFunction::x_star_canonical(std::size_t dim) const {
  return std::vector<double>(dim, optimum_coord);
}

double BaseFunction::optimum_in_box() const {
  return -kBoxHalfWidth + (optimum_coord - domain_lo) * (2.0 * kBoxHalfWidth) / (domain_hi - domain_lo);
}

double BaseFunction::to_domain(double z) const {
  return domain_lo + (z + kBoxHalfWidth) * (domain_hi - domain_lo) / (2.0 * kBoxHalfWidth);
}

const std::vector<BaseFunction>& catalog() {
  static const std::vector<BaseFunction> functions{
      {"sphere", -5.12, 5.12, 0.0, sphere, true, false},
      {"ellipsoid", -100.0, 100.0, 0.0, ellipsoid, true, false},
      {"rosenbrock", -5.0, 10.0, 1.0, rosenbrock, true, false},
      {"rastrigin", -5.12, 5.12, 0.0, rastrigin, true, true},
      {"ackley", -32.768, 32.768, 0.0, ackley, true, true},
      {"griewank", -600.0, 600.0, 0.0, griewank, true, true},
      {"levy", -10.0, 10.0, 1.0, levy, true, true},
      {"schwefel222", -10.0, 10.0, 0.0, schwefel222, false, false},
      {"zakharov", -5.0, 10.0, 0.0, zakharov, true, false},
      {"bent_cigar", -100.0, 100.0, 0.0, bent_cigar, true, false},
      {"discus", -100.0, 100.0, 0.0, discus, true, false},
      {"schaffer_f7", -100.0, 100.0, 0.0, schaffer_f7, false, true},
      {"styblinski_tang", -5.0, 5.0, styblinski_root(), styblinski_tang, true, true},
      // Plateaus make every non-optimal level set a (weak) local minimum.
      {"step_sphere", -100.0, 100.0, 0.0, step_sphere, false, true},
  };
  return functions;
}

const BaseFunction& find_function(std::string_view name) {
  for (const auto& f : catalog()) {
    if (f.name == name) return f;
  }
  throw InvalidArgument("unknown function '" + std::string(name) + "'");
}

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::none: return "none";
    case TransformKind::shift: return "shift";
    case TransformKind::shift_rotate: return "shift_rotate";
  }
  return "none";
}

std::vector<double> Transform::forward(std::span<const double> x) const {
  std::vector<double> y(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    double v = 0.0;
    if (rotated()) {
      for (std::size_t j = 0; j < dim; ++j) v += rotation[i * dim + j] * x[j];
    } else {
      v = x[i];
    }
    y[i] = v + shift[i];
  }
  return y;
}

std::vector<double> Transform::inverse(std::span<const double> y) const {
  std::vector<double> x(dim);
  if (!rotated()) {
    for (std::size_t i = 0; i < dim; ++i) x[i] = y[i] - shift[i];
    return x;
  }
  std::vector<double> d(dim);
  for (std::size_t i = 0; i < dim; ++i) d[i] = y[i] - shift[i];
  for (std::size_t j = 0; j < dim; ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i < dim; ++i) v += rotation[i * dim + j] * d[i];
    x[j] = v;
  }
  return x;
}

std::vector<double> random_orthogonal(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw InvalidArgument("random_orthogonal needs dim >= 1");
  std::vector<double> m(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) m[i * dim + i] = 1.0;

  Rng rng = Rng::derive(seed, 1);
  std::vector<double> v(dim), mv(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& vi : v) {
        vi = rng.normal(0.0, 1.0);
        norm2 += vi * vi;
      }
    } while (norm2 < 1e-12);
    // M <- M (I - 2 v v^T / v^T v)
    for (std::size_t i = 0; i < dim; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < dim; ++j) s += m[i * dim + j] * v[j];
      mv[i] = s;
    }
    const double scale = 2.0 / norm2;
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) m[i * dim + j] -= scale * mv[i] * v[j];
    }
  }
  return m;
}

Transform make_transform(const BaseFunction& base, std::size_t dim, std::uint64_t seed,
                         TransformKind kind) {
  Transform t;
  t.dim = dim;
  t.seed = seed;
  const double c = base.optimum_in_box();
  if (seed == 0 || kind == TransformKind::none) {
    t.seed = 0;
    t.shift.assign(dim, 0.0);
    return t;
  }
  if (kind == TransformKind::shift_rotate) t.rotation = random_orthogonal(dim, seed);

  // Draw the optimum location o, then solve R*c + s = o for s.
  Rng rng = Rng::derive(seed, 2);
  std::vector<double> target(dim);
  for (auto& o : target) o = rng.uniform(-kShiftHalfWidth, kShiftHalfWidth);
  const std::vector<double> canonical(dim, c);
  std::vector<double> rc = canonical;
  if (t.rotated()) {
    for (std::size_t i = 0; i < dim; ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j < dim; ++j) v += t.rotation[i * dim + j] * canonical[j];
      rc[i] = v;
    }
  }
  t.shift.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) t.shift[i] = target[i] - rc[i];
  return t;
}

namespace {

struct Instance {
  const BaseFunction* base;
  Transform transform;
};

std::string instance_name(const BaseFunction& base, std::uint64_t seed, TransformKind kind) {
  std::string name(base.name);
  if (seed == 0 || kind == TransformKind::none) return name;
  name += kind == TransformKind::shift ? "_shift_s" : "_rot_s";
  name += std::to_string(seed);
  return name;
}

}  // namespace

Problem make_function(std::string_view name, std::size_t dim, std::uint64_t seed, TransformKind kind) {
  const BaseFunction& base = find_function(name);
  require_dim(dim);

  auto inst = std::make_shared<const Instance>(Instance{&base, make_transform(base, dim, seed, kind)});

  Problem p;
  p.name = instance_name(base, inst->transform.seed, kind);
  p.dim = dim;
  p.lower.assign(dim, -kBoxHalfWidth);
  p.upper.assign(dim, kBoxHalfWidth);
  p.f_star = base.f_star(dim);
  p.multimodal = base.multimodal;
  p.seed = inst->transform.seed;
  p.x_star = inst->transform.forward(std::vector<double>(dim, base.optimum_in_box()));
  if (inst->transform.seed != 0) {
    // Store the drawn location itself rather than the round-tripped value.
    Rng rng = Rng::derive(inst->transform.seed, 2);
    for (auto& o : p.x_star) o = rng.uniform(-kShiftHalfWidth, kShiftHalfWidth);
  }
  p.objective = [inst](std::span<const double> x) {
    std::vector<double> z = inst->transform.inverse(x);
    for (auto& v : z) v = inst->base->to_domain(v);
    return inst->base->evaluator(z);
  };
  return p;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"classic", "shifted", "shifted_rotated", "multimodal_hard"};
  return names;
}

namespace {

struct SuiteEntry {
  const BaseFunction* base;
  std::uint64_t seed;
  TransformKind kind;
};

std::vector<SuiteEntry> suite_entries(std::string_view name) {
  const auto& cat = catalog();
  std::vector<SuiteEntry> out;
  if (name == "classic") {
    for (const auto& f : cat) out.push_back({&f, 0, TransformKind::none});
  } else if (name == "shifted") {
    for (std::size_t i = 0; i < cat.size(); ++i) out.push_back({&cat[i], 1 + i, TransformKind::shift});
  } else if (name == "shifted_rotated") {
    for (std::size_t i = 0; i < cat.size(); ++i)
      out.push_back({&cat[i], 101 + i, TransformKind::shift_rotate});
  } else if (name == "multimodal_hard") {
    for (std::size_t i = 0; i < cat.size(); ++i) {
      if (cat[i].multimodal) out.push_back({&cat[i], 201 + i, TransformKind::shift_rotate});
    }
  } else {
    throw InvalidArgument("unknown suite '" + std::string(name) + "'");
  }
  return out;
}

}  // namespace

std::vector<Problem> suite(std::string_view name, std::size_t dim) {
  auto entries = suite_entries(name);
  require_dim(dim);
  std::vector<Problem> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(make_function(e.base->name, dim, e.seed, e.kind));
  return out;
}

std::string suite_listing_json(std::string_view name, std::span<const std::size_t> dims) {
  const auto entries = suite_entries(name);
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t dim : dims) {
    require_dim(dim);
    for (const auto& e : entries) {
      const Problem p = make_function(e.base->name, dim, e.seed, e.kind);
      nlohmann::json j;
      j["name"] = p.name;
      j["base"] = std::string(e.base->name);
      j["suite"] = std::string(name);
      j["dim"] = p.dim;
      j["f_star"] = p.f_star;
      j["seed"] = p.seed;
      j["transform"] = std::string(to_string(p.seed == 0 ? TransformKind::none : e.kind));
      j["multimodal"] = p.multimodal;
      j["smooth"] = e.base->smooth;
      j["lower"] = p.lower.front();
      j["upper"] = p.upper.front();
      j["x_star"] = p.x_star;
      arr.push_back(std::move(j));
    }
  }
  return arr.dump(2);
}

}  // namespace dfo::suites
