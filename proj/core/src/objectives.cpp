#include "mkvnoise/objectives.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <utility>

namespace mkvnoise {

namespace {

using std::numbers::pi;
using ConstRef = const Eigen::Ref<const Vector>&;
using OutRef = Eigen::Ref<Vector>;

double sign(double v) { return (v > 0.0) - (v < 0.0); }

// Root of d/dx [x sin(sqrt x)] near 420.97, found with Newton on s = sqrt x:
// sin s + (s/2) cos s = 0.
double schwefel_argmin() {
  double s = 20.5;
  for (int it = 0; it < 50; ++it) {
    const double h = std::sin(s) + 0.5 * s * std::cos(s);
    const double dh = 1.5 * std::cos(s) - 0.5 * s * std::sin(s);
    s -= h / dh;
  }
  return s * s;
}

// Root of 4x^3 - 32x + 5 near -2.9035.
double styblinski_tang_argmin() {
  double x = -2.9;
  for (int it = 0; it < 50; ++it) x -= (4 * x * x * x - 32 * x + 5) / (12 * x * x - 32);
  return x;
}

const double kSchwefelArgmin = schwefel_argmin();
const double kSchwefelConstant = kSchwefelArgmin * std::sin(std::sqrt(kSchwefelArgmin));
const double kStArgmin = styblinski_tang_argmin();
const double kStMinPerCoord =
    0.5 * (std::pow(kStArgmin, 4) - 16 * kStArgmin * kStArgmin + 5 * kStArgmin);

// Each benchmark: value, gradient, box, minimum. Standard literature forms.
struct Definition {
  RegistryEntry entry;
  double (*value)(ConstRef);
  void (*gradient)(ConstRef, OutRef);
  std::pair<double, double> (*box)(Index dim);
  Vector (*argmin)(Index dim);
  double (*min_value)(Index dim);
};

std::pair<double, double> fixed_box(double lo, double hi) { return {lo, hi}; }
Vector filled(Index d, double v) { return Vector::Constant(d, v); }

// Ackley: -20 exp(-0.2 sqrt(mean x^2)) - exp(mean cos 2 pi x) + 20 + e; min 0 at 0.
double ackley(ConstRef x) {
  const double d = static_cast<double>(x.size());
  const double r = std::sqrt(x.squaredNorm() / d);
  const double c = (2 * pi * x.array()).cos().sum() / d;
  // expm1 form so that f(0) is exactly 0
  return -20.0 * std::expm1(-0.2 * r) - (std::exp(c) - std::numbers::e);
}
void ackley_grad(ConstRef x, OutRef g) {
  const double d = static_cast<double>(x.size());
  const double r = std::sqrt(x.squaredNorm() / d);
  const double ec = std::exp((2 * pi * x.array()).cos().sum() / d);
  const double a = r > 0.0 ? 4.0 * std::exp(-0.2 * r) / (d * r) : 0.0;
  g = a * x.array() + (2 * pi / d) * ec * (2 * pi * x.array()).sin();
}

// Deb N.1: -(1/d) sum sin^6(5 pi x); min -1 at x_j = 0.1.
double deb1(ConstRef x) {
  return -(5 * pi * x.array()).sin().pow(6).sum() / static_cast<double>(x.size());
}
void deb1_grad(ConstRef x, OutRef g) {
  const double d = static_cast<double>(x.size());
  const auto s = (5 * pi * x.array()).sin();
  const auto c = (5 * pi * x.array()).cos();
  g = -(30 * pi / d) * s.pow(5) * c;
}

// Griewank: 1 + sum x^2/4000 - prod cos(x_i / sqrt i); min 0 at 0.
double griewank(ConstRef x) {
  double prod = 1.0;
  for (Index i = 0; i < x.size(); ++i) prod *= std::cos(x[i] / std::sqrt(double(i + 1)));
  return 1.0 + x.squaredNorm() / 4000.0 - prod;
}
void griewank_grad(ConstRef x, OutRef g) {
  const Index d = x.size();
  Vector c(d), prefix(d + 1), suffix(d + 1);
  for (Index i = 0; i < d; ++i) c[i] = std::cos(x[i] / std::sqrt(double(i + 1)));
  prefix[0] = 1.0;
  for (Index i = 0; i < d; ++i) prefix[i + 1] = prefix[i] * c[i];
  suffix[d] = 1.0;
  for (Index i = d; i-- > 0;) suffix[i] = suffix[i + 1] * c[i];
  for (Index i = 0; i < d; ++i) {
    const double s = std::sqrt(double(i + 1));
    g[i] = x[i] / 2000.0 + std::sin(x[i] / s) / s * prefix[i] * suffix[i + 1];
  }
}

// Levy with w = 1 + (x - 1)/4; min 0 at x = 1.
double levy(ConstRef x) {
  const Index d = x.size();
  auto w = [&](Index i) { return 1.0 + (x[i] - 1.0) / 4.0; };
  const double w1 = w(0);
  const double wd = w(d - 1);
  double f = std::pow(std::sin(pi * w1), 2);
  for (Index i = 0; i + 1 < d; ++i) {
    const double wi = w(i);
    f += (wi - 1) * (wi - 1) * (1 + 10 * std::pow(std::sin(pi * wi + 1), 2));
  }
  f += (wd - 1) * (wd - 1) * (1 + std::pow(std::sin(2 * pi * wd), 2));
  return f;
}
void levy_grad(ConstRef x, OutRef g) {
  const Index d = x.size();
  auto w = [&](Index i) { return 1.0 + (x[i] - 1.0) / 4.0; };
  g.setZero();
  g[0] += pi * std::sin(2 * pi * w(0));
  for (Index i = 0; i + 1 < d; ++i) {
    const double wi = w(i);
    const double s = std::sin(pi * wi + 1);
    g[i] += 2 * (wi - 1) * (1 + 10 * s * s) + (wi - 1) * (wi - 1) * 10 * pi * std::sin(2 * (pi * wi + 1));
  }
  const double wd = w(d - 1);
  const double s = std::sin(2 * pi * wd);
  g[d - 1] += 2 * (wd - 1) * (1 + s * s) + (wd - 1) * (wd - 1) * 2 * pi * std::sin(4 * pi * wd);
  g *= 0.25;  // dw/dx
}

// Rastrigin: 10 d + sum (x^2 - 10 cos 2 pi x); min 0 at 0.
double rastrigin(ConstRef x) {
  return 10.0 * static_cast<double>(x.size()) +
         (x.array().square() - 10.0 * (2 * pi * x.array()).cos()).sum();
}
void rastrigin_grad(ConstRef x, OutRef g) {
  g = 2.0 * x.array() + 20.0 * pi * (2 * pi * x.array()).sin();
}

// Schwefel: c d - sum x sin sqrt|x|; min 0 at x_j = 420.9687...
double schwefel(ConstRef x) {
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i) s += x[i] * std::sin(std::sqrt(std::abs(x[i])));
  return kSchwefelConstant * static_cast<double>(x.size()) - s;
}
void schwefel_grad(ConstRef x, OutRef g) {
  for (Index i = 0; i < x.size(); ++i) {
    const double r = std::sqrt(std::abs(x[i]));
    // d/dx [x sin sqrt|x|] = sin r + (r/2) cos r; the kink at 0 maps to 0.
    g[i] = x[i] == 0.0 ? 0.0 : -(std::sin(r) + 0.5 * r * std::cos(r));
  }
}

// Styblinski-Tang: 1/2 sum (x^4 - 16 x^2 + 5 x); min -39.166... d at x_j = -2.9035...
double styblinski_tang(ConstRef x) {
  const auto a = x.array();
  return 0.5 * (a.pow(4) - 16.0 * a.square() + 5.0 * a).sum();
}
void styblinski_tang_grad(ConstRef x, OutRef g) {
  const auto a = x.array();
  g = 2.0 * a.cube() - 16.0 * a + 2.5;
}

// Bent cigar: x_1^2 + 1e6 sum_{i>1} x_i^2; min 0 at 0.
double bent_cigar(ConstRef x) { return x[0] * x[0] + 1e6 * x.tail(x.size() - 1).squaredNorm(); }
void bent_cigar_grad(ConstRef x, OutRef g) {
  g = 2e6 * x;
  g[0] = 2.0 * x[0];
}

// Dixon-Price: (x_1 - 1)^2 + sum_{i>=2} i (2 x_i^2 - x_{i-1})^2;
// min 0 at x_i = 2^{-(2^i - 2)/2^i}.
double dixon_price(ConstRef x) {
  double f = (x[0] - 1.0) * (x[0] - 1.0);
  for (Index i = 1; i < x.size(); ++i) {
    const double t = 2.0 * x[i] * x[i] - x[i - 1];
    f += double(i + 1) * t * t;
  }
  return f;
}
void dixon_price_grad(ConstRef x, OutRef g) {
  g.setZero();
  g[0] = 2.0 * (x[0] - 1.0);
  for (Index i = 1; i < x.size(); ++i) {
    const double t = 2.0 * x[i] * x[i] - x[i - 1];
    const double k = 2.0 * double(i + 1) * t;
    g[i] += k * 4.0 * x[i];
    g[i - 1] -= k;
  }
}
Vector dixon_price_argmin(Index d) {
  Vector x(d);
  for (Index i = 0; i < d; ++i) {
    const double p = std::ldexp(1.0, static_cast<int>(std::min<Index>(i + 1, 1000)));
    x[i] = std::pow(2.0, -(p - 2.0) / p);
  }
  return x;
}

// Axis-parallel hyper-ellipsoid: sum i x_i^2; min 0 at 0.
double hyper_ellipsoid(ConstRef x) {
  double f = 0.0;
  for (Index i = 0; i < x.size(); ++i) f += double(i + 1) * x[i] * x[i];
  return f;
}
void hyper_ellipsoid_grad(ConstRef x, OutRef g) {
  for (Index i = 0; i < x.size(); ++i) g[i] = 2.0 * double(i + 1) * x[i];
}

// Rosenbrock: sum 100 (x_{i+1} - x_i^2)^2 + (x_i - 1)^2; min 0 at 1.
double rosenbrock(ConstRef x) {
  double f = 0.0;
  for (Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    f += 100.0 * a * a + (x[i] - 1.0) * (x[i] - 1.0);
  }
  return f;
}
void rosenbrock_grad(ConstRef x, OutRef g) {
  g.setZero();
  for (Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    g[i] += -400.0 * a * x[i] + 2.0 * (x[i] - 1.0);
    g[i + 1] += 200.0 * a;
  }
}

// Square: sum x^2; min 0 at 0.
double square(ConstRef x) { return x.squaredNorm(); }
void square_grad(ConstRef x, OutRef g) { g = 2.0 * x; }

// Sum of different powers: sum |x_i|^{i+1}; min 0 at 0.
double sumpow(ConstRef x) {
  double f = 0.0;
  for (Index i = 0; i < x.size(); ++i) f += std::pow(std::abs(x[i]), double(i + 2));
  return f;
}
void sumpow_grad(ConstRef x, OutRef g) {
  for (Index i = 0; i < x.size(); ++i)
    g[i] = double(i + 2) * std::pow(std::abs(x[i]), double(i + 1)) * sign(x[i]);
}

// Trid: sum (x_i - 1)^2 - sum x_i x_{i-1}; min -d(d+4)(d-1)/6 at x_i = i(d+1-i).
double trid(ConstRef x) {
  double f = (x.array() - 1.0).square().sum();
  for (Index i = 1; i < x.size(); ++i) f -= x[i] * x[i - 1];
  return f;
}
void trid_grad(ConstRef x, OutRef g) {
  const Index d = x.size();
  for (Index i = 0; i < d; ++i) {
    g[i] = 2.0 * (x[i] - 1.0);
    if (i > 0) g[i] -= x[i - 1];
    if (i + 1 < d) g[i] -= x[i + 1];
  }
}
Vector trid_argmin(Index d) {
  Vector x(d);
  for (Index i = 0; i < d; ++i) x[i] = double(i + 1) * double(d - i);
  return x;
}

// Zakharov: sum x^2 + s^2 + s^4 with s = sum 0.5 i x_i; min 0 at 0.
double zakharov(ConstRef x) {
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i) s += 0.5 * double(i + 1) * x[i];
  return x.squaredNorm() + s * s + s * s * s * s;
}
void zakharov_grad(ConstRef x, OutRef g) {
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i) s += 0.5 * double(i + 1) * x[i];
  const double k = 2.0 * s + 4.0 * s * s * s;
  for (Index i = 0; i < x.size(); ++i) g[i] = 2.0 * x[i] + k * 0.5 * double(i + 1);
}

double zero_min(Index) { return 0.0; }

const std::array<Definition, 15>& definitions() {
  static const std::array<Definition, 15> defs = {{
      {{"ackley", "Ackley", 1, "[-32.768, 32.768]^d", "0 at origin"},
       ackley, ackley_grad, [](Index) { return fixed_box(-32.768, 32.768); },
       [](Index d) { return filled(d, 0.0); }, zero_min},
      {{"deb-n1", "Deb N.1", 1, "[0, 1]^d", "-1 at x_j = 0.1"},
       deb1, deb1_grad, [](Index) { return fixed_box(0.0, 1.0); },
       [](Index d) { return filled(d, 0.1); }, [](Index) { return -1.0; }},
      {{"griewank", "Griewank", 1, "[-600, 600]^d", "0 at origin"},
       griewank, griewank_grad, [](Index) { return fixed_box(-600.0, 600.0); },
       [](Index d) { return filled(d, 0.0); }, zero_min},
      {{"levy", "Levy", 1, "[-10, 10]^d", "0 at x_j = 1"},
       levy, levy_grad, [](Index) { return fixed_box(-10.0, 10.0); },
       [](Index d) { return filled(d, 1.0); }, zero_min},
      {{"rastrigin", "Rastrigin", 1, "[-5.12, 5.12]^d", "0 at origin"},
       rastrigin, rastrigin_grad, [](Index) { return fixed_box(-5.12, 5.12); },
       [](Index d) { return filled(d, 0.0); }, zero_min},
      {{"schwefel", "Schwefel", 1, "[-500, 500]^d", "0 at x_j = 420.9687"},
       schwefel, schwefel_grad, [](Index) { return fixed_box(-500.0, 500.0); },
       [](Index d) { return filled(d, kSchwefelArgmin); }, zero_min},
      {{"styblinski-tang", "Styblinski-Tang", 1, "[-5, 5]^d", "-39.1662 d at x_j = -2.9035"},
       styblinski_tang, styblinski_tang_grad, [](Index) { return fixed_box(-5.0, 5.0); },
       [](Index d) { return filled(d, kStArgmin); },
       [](Index d) { return kStMinPerCoord * static_cast<double>(d); }},
      {{"bent-cigar", "Bent cigar", 1, "[-100, 100]^d", "0 at origin"},
       bent_cigar, bent_cigar_grad, [](Index) { return fixed_box(-100.0, 100.0); },
       [](Index d) { return filled(d, 0.0); }, zero_min},
      {{"dixon-price", "Dixon-Price", 2, "[-10, 10]^d", "0 at x_i = 2^-((2^i-2)/2^i)"},
       dixon_price, dixon_price_grad, [](Index) { return fixed_box(-10.0, 10.0); },
       dixon_price_argmin, zero_min},
      {{"hyper-ellipsoid", "Hyper-Ellipsoid", 1, "[-5, 5]^d", "0 at origin"},
       hyper_ellipsoid, hyper_ellipsoid_grad, [](Index) { return fixed_box(-5.0, 5.0); },
       [](Index d) { return filled(d, 0.0); }, zero_min},
      {{"rosenbrock", "Rosenbrock", 2, "[-5, 10]^d", "0 at x_j = 1"},
       rosenbrock, rosenbrock_grad, [](Index) { return fixed_box(-5.0, 10.0); },
       [](Index d) { return filled(d, 1.0); }, zero_min},
      {{"square", "Square", 1, "[-5, 5]^d", "0 at origin"},
       square, square_grad, [](Index) { return fixed_box(-5.0, 5.0); },
       [](Index d) { return filled(d, 0.0); }, zero_min},
      {{"sumpow", "Sumpow", 1, "[-5, 5]^d", "0 at origin"},
       sumpow, sumpow_grad, [](Index) { return fixed_box(-5.0, 5.0); },
       [](Index d) { return filled(d, 0.0); }, zero_min},
      {{"trid", "Trid", 2, "[-d^2, d^2]^d", "-d(d+4)(d-1)/6 at x_i = i(d+1-i)"},
       trid, trid_grad,
       [](Index d) {
         const double r = static_cast<double>(d * d);
         return fixed_box(-r, r);
       },
       trid_argmin,
       [](Index d) {
         const double dd = static_cast<double>(d);
         return -dd * (dd + 4.0) * (dd - 1.0) / 6.0;
       }},
      {{"zakharov", "Zakharov", 1, "[-10, 10]^d", "0 at origin"},
       zakharov, zakharov_grad, [](Index) { return fixed_box(-10.0, 10.0); },
       [](Index d) { return filled(d, 0.0); }, zero_min},
  }};
  return defs;
}

std::string squash(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

const Definition& find_definition(std::string_view name) {
  const std::string key = squash(name);
  for (const auto& def : definitions()) {
    if (squash(def.entry.name) == key || squash(def.entry.display_name) == key) return def;
  }
  throw RegistryError("unknown objective '" + std::string(name) + "'");
}

}  // namespace

Box Box::uniform(Index dim, double low, double high) {
  return Box{Vector::Constant(dim, low), Vector::Constant(dim, high)};
}

bool Box::contains(const Eigen::Ref<const Vector>& x) const {
  return x.size() == dim() && (x.array() >= low.array()).all() &&
         (x.array() <= high.array()).all();
}

Objective::Objective(std::string name, Index dim, ValueFn value, GradientFn gradient, Box domain,
                     double known_min_value, Vector known_min_location)
    : name_(std::move(name)),
      dim_(dim),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      domain_(std::move(domain)),
      known_min_value_(known_min_value),
      known_min_location_(std::move(known_min_location)) {
  if (dim_ < 1) throw InvalidInput("objective dimension must be >= 1");
  if (domain_.dim() != dim_ || domain_.high.size() != dim_)
    throw InvalidInput("objective domain does not match its dimension");
  if (known_min_location_.size() != dim_)
    throw InvalidInput("known minimiser does not match objective dimension");
}

Vector Objective::gradient(const Eigen::Ref<const Vector>& x) const {
  Vector g(x.size());
  gradient_(x, g);
  return g;
}

Vector Objective::values(const ParticleCloud& cloud) const {
  Vector f(cloud.size());
  for (Index i = 0; i < cloud.size(); ++i) f[i] = value_(cloud.particle(i).transpose());
  return f;
}

RowMatrix Objective::gradients(const ParticleCloud& cloud) const {
  RowMatrix g(cloud.size(), cloud.dim());
  Vector gi(cloud.dim());
  for (Index i = 0; i < cloud.size(); ++i) {
    gradient_(cloud.particle(i).transpose(), gi);
    g.row(i) = gi.transpose();
  }
  return g;
}

std::span<const RegistryEntry> objective_registry() {
  static const std::vector<RegistryEntry> entries = [] {
    std::vector<RegistryEntry> out;
    for (const auto& def : definitions()) out.push_back(def.entry);
    return out;
  }();
  return entries;
}

std::string canonical_objective_name(std::string_view name) {
  return std::string(find_definition(name).entry.name);
}

Objective make_objective(std::string_view name, Index dim, ObjectiveOptions options) {
  const Definition& def = find_definition(name);
  if (dim < def.entry.min_dim) {
    throw RegistryError(std::string(def.entry.display_name) + " needs dim >= " +
                        std::to_string(def.entry.min_dim));
  }
  const auto [lo, hi] = def.box(dim);
  double min_value = def.min_value(dim);

  Objective::ValueFn value = def.value;
  Objective::GradientFn gradient = def.gradient;
  if (options.normalize_by_dim) {
    const double scale = 1.0 / static_cast<double>(dim);
    value = [f = def.value, scale](ConstRef x) { return scale * f(x); };
    gradient = [g = def.gradient, scale](ConstRef x, OutRef out) {
      g(x, out);
      out *= scale;
    };
    min_value *= scale;
  }
  return Objective(std::string(def.entry.name), dim, std::move(value), std::move(gradient),
                   Box::uniform(dim, lo, hi), min_value, def.argmin(dim));
}

double gradient_check(const Objective& objective, std::span<const Vector> points, double h) {
  double worst = 0.0;
  Vector xp, xm;
  for (const Vector& x : points) {
    const Vector g = objective.gradient(x);
    Vector fd(x.size());
    for (Index j = 0; j < x.size(); ++j) {
      xp = x;
      xm = x;
      xp[j] += h;
      xm[j] -= h;
      fd[j] = (objective.value(xp) - objective.value(xm)) / (2.0 * h);
    }
    worst = std::max(worst, (g - fd).norm() / (1.0 + g.norm()));
  }
  return worst;
}

}  // namespace mkvnoise
