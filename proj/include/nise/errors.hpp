#pragma once

#include <stdexcept>
#include <string>

namespace nise {

// Base class for every failure this library reports.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// linalg
struct NotPositiveDefinite : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };

// stats
struct EmptyInput : Error { using Error::Error; };
struct TooFewPoints : Error { using Error::Error; };
struct InvalidDf : Error { using Error::Error; };
struct ZeroVariance : Error { using Error::Error; };

// estimators
struct OrderConditionFailed : Error { using Error::Error; };
struct EmptyExogenous : Error { using Error::Error; };
struct NormalizationFailure : Error { using Error::Error; };
struct SingularA : Error { using Error::Error; };

// diagnostics
struct PreconditionFailed : Error { using Error::Error; };
struct InvalidCorrelation : Error { using Error::Error; };
struct NoInstruments : Error { using Error::Error; };
struct JustIdentified : Error { using Error::Error; };

// resample
struct TooManyFailures : Error { using Error::Error; };
struct InvalidB : Error { using Error::Error; };

// simulate
struct UnknownScenario : Error { using Error::Error; };

// csv / cli input
struct CsvError : Error { using Error::Error; };

}  // namespace nise
