#pragma once

// Benchmark objectives with analytic gradients.

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mkvnoise/core.hpp"

namespace mkvnoise {

/// Axis-aligned search box [low, high].
struct Box {
  Vector low;
  Vector high;

  static Box uniform(Index dim, double low, double high);

  Index dim() const noexcept { return low.size(); }
  bool contains(const Eigen::Ref<const Vector>& x) const;
};

class Objective {
 public:
  using ValueFn = std::function<double(const Eigen::Ref<const Vector>&)>;
  using GradientFn = std::function<void(const Eigen::Ref<const Vector>&, Eigen::Ref<Vector>)>;

  Objective(std::string name, Index dim, ValueFn value, GradientFn gradient, Box domain,
            double known_min_value, Vector known_min_location);

  const std::string& name() const noexcept { return name_; }
  Index dim() const noexcept { return dim_; }
  const Box& domain() const noexcept { return domain_; }
  double known_min_value() const noexcept { return known_min_value_; }
  const Vector& known_min_location() const noexcept { return known_min_location_; }

  double value(const Eigen::Ref<const Vector>& x) const { return value_(x); }
  void gradient(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const {
    gradient_(x, out);
  }
  Vector gradient(const Eigen::Ref<const Vector>& x) const;

  /// Objective values of every particle.
  Vector values(const ParticleCloud& cloud) const;
  /// Gradients of every particle, one per row.
  RowMatrix gradients(const ParticleCloud& cloud) const;

 private:
  std::string name_;
  Index dim_;
  ValueFn value_;
  GradientFn gradient_;
  Box domain_;
  double known_min_value_;
  Vector known_min_location_;
};

struct ObjectiveOptions {
  /// Divide value and gradient by d.
  bool normalize_by_dim = false;
};

struct RegistryEntry {
  std::string_view name;          // canonical lower-case key
  std::string_view display_name;  // as printed in reports
  Index min_dim;
  std::string_view domain_note;
  std::string_view minimum_note;
};

std::span<const RegistryEntry> objective_registry();

/// Looks a benchmark up by name; case, spaces and punctuation are ignored so
/// "Deb N.1", "deb-n1" and "debn1" all resolve. Throws RegistryError.
Objective make_objective(std::string_view name, Index dim, ObjectiveOptions options = {});

/// Canonical registry key for a name, or throws RegistryError.
std::string canonical_objective_name(std::string_view name);

/// max over points of |grad(x) - central_fd(x)| / (1 + |grad(x)|), step h.
double gradient_check(const Objective& objective, std::span<const Vector> points,
                      double h = 1e-5);

}  // namespace mkvnoise
