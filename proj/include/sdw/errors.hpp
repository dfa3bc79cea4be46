// Exception hierarchy shared by the solver suite.
#ifndef SDW_ERRORS_HPP
#define SDW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sdw {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// numerics
struct StepSizeUnderflow : Error {
  using Error::Error;
};
struct NonFiniteRhs : Error {
  using Error::Error;
};
struct NoSignChange : Error {
  using Error::Error;
};
struct MaxDepthExceeded : Error {
  using Error::Error;
};

// model
struct NegativeTime : Error {
  using Error::Error;
};
struct UnknownModel : Error {
  using Error::Error;
};
struct InvalidParameter : Error {
  using Error::Error;
};

// riemann solvers
struct RegionViolation : Error {
  using Error::Error;
};
struct BracketFailure : Error {
  using Error::Error;
};

// front tracking
struct InvalidPartition : Error {
  using Error::Error;
};
struct NonOvercompressiveMerge : Error {
  using Error::Error;
};
struct EventBudgetExceeded : Error {
  using Error::Error;
};
struct TimeOutOfRange : Error {
  using Error::Error;
};

// diagnostics
struct InsufficientSamples : Error {
  using Error::Error;
};

// variational solver
struct OutOfSupport : Error {
  using Error::Error;
};
struct UnboundedBelow : Error {
  using Error::Error;
};
struct SupportEscape : Error {
  using Error::Error;
};

// scenarios
struct ValidationError : Error {
  using Error::Error;
};
struct IncompatibleScenario : Error {
  using Error::Error;
};

}  // namespace sdw

#endif  // SDW_ERRORS_HPP
