#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace psolab {

/// Invalid swarm/run configuration (bad N, D, B, epsilon, schedule, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The objective returned a non-finite value for some particle.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(std::size_t particle, std::vector<double> position, double value);

  std::size_t particle() const noexcept { return particle_; }
  const std::vector<double>& position() const noexcept { return position_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t particle_;
  std::vector<double> position_;
  double value_;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Largest eigenvalue modulus is zero (or not finite); the matrix cannot be normalized.
class SingularSpectrumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sample set cannot support a fit (all identical, too few distinct values).
class DegenerateSampleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed trace file; carries the offending file and 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what);

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

}  // namespace psolab
