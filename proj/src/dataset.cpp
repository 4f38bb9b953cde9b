#include "nise/dataset.hpp"

#include <string>

namespace nise {

void Dataset::validate() const {
  if (endog.rows() < 1 || endog.cols() < 1) {
    throw Error("dataset: endogenous block must be non-empty");
  }
  if (exog.cols() > 0 && exog.rows() != endog.rows()) {
    throw Error("dataset: exogenous block row count mismatch");
  }
  if (instruments.cols() > 0 && instruments.rows() != endog.rows()) {
    throw Error("dataset: instrument block row count mismatch");
  }
  require_finite(endog, "endogenous block");
  if (exog.size() > 0) require_finite(exog, "exogenous block");
  if (instruments.size() > 0) require_finite(instruments, "instrument block");

  if (n() <= g() + h() + 1) {
    throw Error("dataset: need n > G + H + 1 observations, have n=" +
                std::to_string(n()));
  }
  if (!endog_names.empty() &&
      static_cast<Index>(endog_names.size()) != g()) {
    throw Error("dataset: endogenous name count mismatch");
  }
  if (!exog_names.empty() && static_cast<Index>(exog_names.size()) != h()) {
    throw Error("dataset: exogenous name count mismatch");
  }
  if (!instrument_names.empty() &&
      static_cast<Index>(instrument_names.size()) != l()) {
    throw Error("dataset: instrument name count mismatch");
  }
}

Index Dataset::effective_exog_count() const {
  Index count = 0;
  for (Index j = 0; j < exog.cols(); ++j) {
    const auto col = exog.col(j);
    if ((col.array() - col.mean()).abs().maxCoeff() > 0.0) ++count;
  }
  return count;
}

Dataset make_dataset(Matrix endog, Matrix exog, Matrix instruments,
                     bool intercept) {
  Dataset d;
  d.endog = std::move(endog);
  d.exog = std::move(exog);
  d.instruments = std::move(instruments);
  d.intercept = intercept;
  for (Index j = 0; j < d.endog.cols(); ++j) {
    d.endog_names.push_back("y" + std::to_string(j + 1));
  }
  for (Index j = 0; j < d.exog.cols(); ++j) {
    d.exog_names.push_back("x" + std::to_string(j + 1));
  }
  for (Index j = 0; j < d.instruments.cols(); ++j) {
    d.instrument_names.push_back("w" + std::to_string(j + 1));
  }
  d.validate();
  return d;
}

}  // namespace nise
