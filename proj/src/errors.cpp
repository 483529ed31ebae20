#include "psolab/errors.hpp"

#include <sstream>
#include <utility>

namespace psolab {

namespace {

std::string describe_evaluation(std::size_t particle, const std::vector<double>& position,
                                double value) {
  std::ostringstream out;
  out << "objective returned " << value << " for particle " << particle << " at (";
  for (std::size_t d = 0; d < position.size(); ++d) {
    if (d) out << ", ";
    if (d == 8 && position.size() > 9) {
      out << "... " << position.size() - 8 << " more";
      break;
    }
    out << position[d];
  }
  out << ")";
  return out.str();
}

}  // namespace

EvaluationError::EvaluationError(std::size_t particle, std::vector<double> position, double value)
    : std::runtime_error(describe_evaluation(particle, position, value)),
      particle_(particle),
      position_(std::move(position)),
      value_(value) {}

ParseError::ParseError(std::string file, std::size_t line, const std::string& what)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
      file_(std::move(file)),
      line_(line) {}

}  // namespace psolab
