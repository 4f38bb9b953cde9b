#include "nise/resample.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <thread>
#include <vector>

#include "nise/rng.hpp"
#include "nise/stats.hpp"

namespace nise {

namespace {

constexpr int kRetryCap = 20;

// Attempts within a slot advance the same substream, so a redraw never
// collides with another slot's indices.
std::uint64_t slot_stream(std::uint64_t slot) { return slot; }

}  // namespace

std::vector<Index> resample_indices(std::uint64_t seed, std::uint64_t slot,
                                    Index n, int attempt) {
  RngStream rng(seed, slot_stream(slot));
  std::vector<Index> rows(static_cast<std::size_t>(n));
  for (int a = 0; a <= attempt; ++a) {
    for (auto& r : rows) {
      r = static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(n));
    }
  }
  return rows;
}

Dataset resample_rows(const Dataset& data, const std::vector<Index>& rows) {
  Dataset out = data;
  const Index n = static_cast<Index>(rows.size());
  out.endog.resize(n, data.endog.cols());
  if (data.exog.cols() > 0) out.exog.resize(n, data.exog.cols());
  if (data.instruments.cols() > 0) {
    out.instruments.resize(n, data.instruments.cols());
  }
  for (Index i = 0; i < n; ++i) {
    out.endog.row(i) = data.endog.row(rows[static_cast<std::size_t>(i)]);
    if (data.exog.cols() > 0) {
      out.exog.row(i) = data.exog.row(rows[static_cast<std::size_t>(i)]);
    }
    if (data.instruments.cols() > 0) {
      out.instruments.row(i) =
          data.instruments.row(rows[static_cast<std::size_t>(i)]);
    }
  }
  return out;
}

BootstrapResult pairs_bootstrap(const Dataset& data, const FitProcedure& fit,
                                int b, std::uint64_t seed, int threads) {
  if (b < 1) throw InvalidB("pairs_bootstrap: B must be at least 1");
  data.validate();

  const Index n = data.n();
  const Index k = fit(data).size();  // also validates the fit on the sample

  Matrix slot_draws(b, k);
  std::vector<char> ok(static_cast<std::size_t>(b), 0);

  auto run_slot = [&](int slot) {
    for (int attempt = 0; attempt <= kRetryCap; ++attempt) {
      const auto rows = resample_indices(
          seed, static_cast<std::uint64_t>(slot), n, attempt);
      try {
        const Vector coef = fit(resample_rows(data, rows));
        if (coef.size() != k) {
          throw Error("pairs_bootstrap: fit returned inconsistent length");
        }
        slot_draws.row(slot) = coef.transpose();
        ok[static_cast<std::size_t>(slot)] = 1;
        return;
      } catch (const Error&) {
        // redraw
      }
    }
  };

  threads = std::max(1, threads);
  if (threads == 1) {
    for (int slot = 0; slot < b; ++slot) run_slot(slot);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int slot = t; slot < b; slot += threads) run_slot(slot);
      });
    }
    for (auto& th : pool) th.join();
  }

  BootstrapResult result;
  result.seed = seed;
  result.failures =
      b - static_cast<int>(std::count(ok.begin(), ok.end(), char(1)));
  if (result.failures > b / 10) {
    throw TooManyFailures("pairs_bootstrap: " +
                          std::to_string(result.failures) + " of " +
                          std::to_string(b) + " resamples failed");
  }

  result.draws.resize(b - result.failures, k);
  Index row = 0;
  for (int slot = 0; slot < b; ++slot) {
    if (ok[static_cast<std::size_t>(slot)]) {
      result.draws.row(row++) = slot_draws.row(slot);
    }
  }

  result.se_sd.resize(k);
  result.se_qn.resize(k);
  const Index m = result.draws.rows();
  for (Index j = 0; j < k; ++j) {
    const Vector col = result.draws.col(j);
    const double mean = col.mean();
    result.se_sd(j) =
        m > 1 ? std::sqrt((col.array() - mean).square().sum() / (m - 1)) : 0.0;
    result.se_qn(j) =
        m > 1 ? qn_scale(std::span<const double>(col.data(),
                                                 static_cast<std::size_t>(m)))
              : 0.0;
  }
  return result;
}

}  // namespace nise
