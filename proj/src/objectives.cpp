#include "psolab/objectives.hpp"

#include <cmath>
#include <numbers>

namespace psolab {

double sphere(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += v * v;
  return sum;
}

double rastrigin(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v) + 10.0;
  return sum;
}

double griewank(std::span<const double> x) {
  double sum = 0.0;
  double product = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += x[i] * x[i];
    // 1-based index under the root.
    product *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return sum / 4000.0 - product + 1.0;
}

double schwefel(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum -= v * std::sin(std::sqrt(std::abs(v)));
  return sum;
}

double evaluate(ObjectiveId id, std::span<const double> x) {
  switch (id) {
    case ObjectiveId::Sphere: return sphere(x);
    case ObjectiveId::Rastrigin: return rastrigin(x);
    case ObjectiveId::Griewank: return griewank(x);
    case ObjectiveId::Schwefel: return schwefel(x);
  }
  return std::nan("");
}

ObjectiveFn objective_fn(ObjectiveId id) {
  switch (id) {
    case ObjectiveId::Sphere: return sphere;
    case ObjectiveId::Rastrigin: return rastrigin;
    case ObjectiveId::Griewank: return griewank;
    case ObjectiveId::Schwefel: return schwefel;
  }
  return sphere;
}

std::string_view to_string(ObjectiveId id) {
  switch (id) {
    case ObjectiveId::Sphere: return "sphere";
    case ObjectiveId::Rastrigin: return "rastrigin";
    case ObjectiveId::Griewank: return "griewank";
    case ObjectiveId::Schwefel: return "schwefel";
  }
  return "?";
}

std::optional<ObjectiveId> parse_objective(std::string_view name) {
  for (auto id : {ObjectiveId::Sphere, ObjectiveId::Rastrigin, ObjectiveId::Griewank,
                  ObjectiveId::Schwefel}) {
    if (name == to_string(id)) return id;
  }
  return std::nullopt;
}

}  // namespace psolab
