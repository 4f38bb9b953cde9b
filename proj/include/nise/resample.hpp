#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nise/dataset.hpp"

namespace nise {

struct BootstrapResult {
  Matrix draws;       // (B - failures) x K re-estimated coefficient vectors
  Vector se_sd;       // per-coefficient standard deviation across draws
  Vector se_qn;       // per-coefficient Qn scale across draws
  int failures = 0;   // resample slots abandoned after the retry cap
  std::uint64_t seed = 0;
};

using FitProcedure = std::function<Vector(const Dataset&)>;

// Resample indices for slot `slot` of stream `seed`, attempt `attempt`.
// Pure function of its arguments, so any execution order gives the same
// resamples.
std::vector<Index> resample_indices(std::uint64_t seed, std::uint64_t slot,
                                    Index n, int attempt = 0);

// Rows of all blocks drawn together with replacement.
Dataset resample_rows(const Dataset& data, const std::vector<Index>& rows);

// Pairs (cases) bootstrap: B resamples of whole rows, the fit re-run on
// each. A resample whose fit throws is redrawn from its own substream up to
// a retry cap and then counted as a failure. More than B/10 failures is an
// error. Results are identical for any `threads`.
BootstrapResult pairs_bootstrap(const Dataset& data, const FitProcedure& fit,
                                int b, std::uint64_t seed, int threads = 1);

}  // namespace nise
