#pragma once

#include <string>
#include <vector>

#include "nise/linalg.hpp"

namespace nise {

// One equation's worth of data: endogenous block Y (n x G), included
// exogenous block X (n x H, non-constant columns), and an optional block W of
// excluded exogenous variables usable as instruments (n x L).
struct Dataset {
  Matrix endog;        // Y
  Matrix exog;         // X; may have zero columns
  Matrix instruments;  // W; may have zero columns

  std::vector<std::string> endog_names;
  std::vector<std::string> exog_names;
  std::vector<std::string> instrument_names;

  bool intercept = true;

  Index n() const { return endog.rows(); }
  Index g() const { return endog.cols(); }
  Index h() const { return exog.cols(); }
  Index l() const { return instruments.cols(); }

  // Checks block conformance, finiteness, n > G + H + 1, and name counts.
  void validate() const;

  // Number of exogenous columns with nonzero sample variance. A constant
  // smuggled into X counts toward the intercept, not toward H.
  Index effective_exog_count() const;
};

// Convenience constructor that fills default names (y1.., x1.., w1..).
Dataset make_dataset(Matrix endog, Matrix exog, Matrix instruments = {},
                     bool intercept = true);

}  // namespace nise
