#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace plsreg {

// Two error families, mapped to distinct CLI exit codes:
//   InputError     -> bad data, bad configuration, contract misuse (exit 2)
//   NumericalError -> a computation broke down at runtime (exit 3)
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- input-side ------------------------------------------------------------

class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& detail)
      : InputError("parse error at line " + std::to_string(line) + ": " + detail), line(line) {}
  std::size_t line;
};

class MissingTarget : public InputError {
 public:
  explicit MissingTarget(const std::string& name)
      : InputError("target column '" + name + "' not found in header") {}
};

class NonNumericCell : public InputError {
 public:
  NonNumericCell(std::size_t row, std::size_t col)
      : InputError("non-numeric cell at row " + std::to_string(row) + ", column " +
                   std::to_string(col)),
        row(row),
        col(col) {}
  std::size_t row;
  std::size_t col;
};

class NonFiniteInput : public InputError {
 public:
  NonFiniteInput() : InputError("input contains non-finite values") {}
};

class ZeroVarianceColumn : public InputError {
 public:
  explicit ZeroVarianceColumn(std::ptrdiff_t index)
      : InputError("column " + std::to_string(index) + " has zero sample variance"), index(index) {}
  std::ptrdiff_t index;
};

class InvalidDataset : public InputError {
 public:
  using InputError::InputError;
};

class DimensionTooSmall : public InputError {
 public:
  using InputError::InputError;
};

class DimensionMismatch : public InputError {
 public:
  using InputError::InputError;
};

class ComponentOutOfRange : public InputError {
 public:
  explicit ComponentOutOfRange(int m)
      : InputError("component index " + std::to_string(m) + " out of range"), m(m) {}
  ComponentOutOfRange(int m, const std::string& detail)
      : InputError("component index " + std::to_string(m) + " out of range: " + detail), m(m) {}
  int m;
};

class FoldTooSmall : public InputError {
 public:
  using InputError::InputError;
};

class SplitTooLarge : public InputError {
 public:
  using InputError::InputError;
};

class RankExceeded : public InputError {
 public:
  using InputError::InputError;
};

class JacobiansNotRetained : public InputError {
 public:
  JacobiansNotRetained() : InputError("per-component Jacobians were not retained by this run") {}
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

// ---- numerical-side --------------------------------------------------------

// A latent component collapsed (zero weight / zero score norm): the fit is
// truncated there, which callers normally record rather than rethrow.
class DegenerateComponent : public NumericalError {
 public:
  explicit DegenerateComponent(int component)
      : NumericalError("latent component " + std::to_string(component) +
                       " is degenerate (Krylov space exhausted)"),
        component(component) {}
  int component;
};

// The propagated model-complexity estimate went negative at this component.
class NumericalInstability : public NumericalError {
 public:
  explicit NumericalInstability(int m)
      : NumericalError("complexity estimate became negative at component " + std::to_string(m)),
        m(m) {}
  int m;
};

class SingularBasis : public NumericalError {
 public:
  explicit SingularBasis(int m, double condition)
      : NumericalError("moment basis is numerically singular at size " + std::to_string(m) +
                       " (condition " + std::to_string(condition) + ")"),
        m(m),
        condition(condition) {}
  int m;
  double condition;
};

class SingularSystem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EigFailure : public NumericalError {
 public:
  EigFailure() : NumericalError("symmetric eigendecomposition did not converge") {}
};

class DegenerateDenominator : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DofExceedsN : public NumericalError {
 public:
  DofExceedsN(double dof, std::ptrdiff_t n)
      : NumericalError("model complexity " + std::to_string(dof) +
                       " reaches the sample size " + std::to_string(n)) {}
};

class ZeroGradient : public NumericalError {
 public:
  ZeroGradient() : NumericalError("predictor-response covariance is degenerate (zero gradient)") {}
};

class NonDeterministicFit : public NumericalError {
 public:
  NonDeterministicFit()
      : NumericalError("fit function returned different values for identical input") {}
};

class DegenerateSignal : public NumericalError {
 public:
  DegenerateSignal() : NumericalError("noise-free signal has zero sample variance") {}
};

}  // namespace plsreg
