#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>

namespace psolab {

/// Benchmark fitness functions. All are minimized.
enum class ObjectiveId { Sphere, Rastrigin, Griewank, Schwefel };

using ObjectiveFn = std::function<double(std::span<const double>)>;

/// Sum of squares. Minimum 0 at the origin.
double sphere(std::span<const double> x);

/// Sum of x^2 - 10 cos(2 pi x) + 10. Minimum 0 at the origin.
double rastrigin(std::span<const double> x);

/// sum(x^2)/4000 - prod(cos(x_i / sqrt(i))) + 1 with 1-based i. Minimum 0 at the origin.
double griewank(std::span<const double> x);

/// Sum of -x sin(sqrt|x|). Minimum about -418.9829 per dimension, reached at
/// x_i = +420.9687 for this sign convention.
double schwefel(std::span<const double> x);

double evaluate(ObjectiveId id, std::span<const double> x);
ObjectiveFn objective_fn(ObjectiveId id);

std::string_view to_string(ObjectiveId id);
std::optional<ObjectiveId> parse_objective(std::string_view name);

}  // namespace psolab
