#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tag/numcore/graph.hpp"
#include "tag/numcore/param_store.hpp"

namespace tag {

using LossFn = std::function<Expr(Graph&)>;

struct GradCheckOptions {
  double epsilon = 1e-5;
  // Coordinates sampled per parameter tensor; 0 checks every coordinate.
  std::size_t coords_per_param = 6;
  std::uint64_t seed = 17;
  // When non-empty, only parameters whose name starts with one of these prefixes.
  std::vector<std::string> prefixes;
  // Five-point stencil (8(f(x+e) - f(x-e)) - (f(x+2e) - f(x-2e))) / 12e instead
  // of the two-point central difference. Its O(e^4) truncation error allows a
  // larger e, which matters for coordinates whose gradient is many orders of
  // magnitude below the loss itself.
  bool five_point = false;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coords_checked = 0;
};

// Compares backward() against central differences
//   |analytic - numeric| / max(|analytic|, |numeric|, 1e-8)
// over sampled coordinates. Throws NumericError if two evaluations of the
// unperturbed loss disagree.
GradCheckResult finite_difference_check(const LossFn& loss_fn, ParamStore& params,
                                        const GradCheckOptions& options = {});

}  // namespace tag
