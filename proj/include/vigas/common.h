// include/vigas/common.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_COMMON_H_
#define VIGAS_COMMON_H_

#include <stdexcept>
#include <string>

namespace vigas {

// Error hierarchy. Every failure surfaced by the library derives from
// vigas::Error so callers can catch library errors separately from
// std:: failures.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed data or out-of-range arguments.
struct InvalidInput : Error {
  explicit InvalidInput(const std::string& msg) : Error("invalid input: " + msg) {}
};

// Inconsistent or unusable configuration.
struct InvalidConfig : Error {
  explicit InvalidConfig(const std::string& msg) : Error("invalid config: " + msg) {}
};

// NaN/Inf encountered where a finite value is required.
struct NumericalError : Error {
  explicit NumericalError(const std::string& msg) : Error("numerical error: " + msg) {}
};

// An estimator could not produce a value (e.g. decay curve too short).
struct EstimationFailed : Error {
  explicit EstimationFailed(const std::string& msg) : Error("estimation failed: " + msg) {}
};

// Rejection sampling or similar gave up; the configuration is infeasible.
struct ConfigInfeasible : Error {
  explicit ConfigInfeasible(const std::string& msg) : Error("config infeasible: " + msg) {}
};

// Filesystem failures, always carrying the offending path.
struct IoError : Error {
  explicit IoError(const std::string& msg) : Error("i/o error: " + msg) {}
};

}  // namespace vigas

#endif  // VIGAS_COMMON_H_
