#pragma once

#include <stdexcept>
#include <string>

namespace conleg {

// Bad inputs: model parameters, intervals, payoff names. The CLI maps these to exit code 2.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Something failed to converge or became non-finite. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace conleg
