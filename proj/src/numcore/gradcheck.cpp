#include "tag/numcore/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tag/error.hpp"

namespace tag {

namespace {

double evaluate(const LossFn& loss_fn) {
  Graph g;
  return loss_fn(g).scalar();
}

bool selected(const std::string& name, const std::vector<std::string>& prefixes) {
  if (prefixes.empty()) return true;
  return std::any_of(prefixes.begin(), prefixes.end(),
                     [&](const std::string& p) { return name.rfind(p, 0) == 0; });
}

}  // namespace

GradCheckResult finite_difference_check(const LossFn& loss_fn, ParamStore& params,
                                        const GradCheckOptions& options) {
  if (!(options.epsilon > 0.0)) throw ConfigError("finite_difference_check: epsilon must be > 0");

  params.zero_grad();
  double base = 0.0;
  {
    Graph g;
    Expr loss = loss_fn(g);
    base = loss.scalar();
    g.backward(loss);
  }
  const double again = evaluate(loss_fn);
  if (again != base) {
    throw NumericError("finite_difference_check: loss function is not deterministic");
  }

  Rng rng(options.seed);
  GradCheckResult result;
  for (auto& [name, tensor] : params.entries()) {
    if (!selected(name, options.prefixes)) continue;
    const std::vector<double> analytic = tensor.grad();
    std::vector<std::size_t> coords(tensor.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (options.coords_per_param != 0 && coords.size() > options.coords_per_param) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.coords_per_param);
      std::sort(coords.begin(), coords.end());
    }
    for (std::size_t i : coords) {
      const double saved = tensor[i];
      const double e = options.epsilon;
      auto at = [&](double offset) {
        tensor[i] = saved + offset;
        return evaluate(loss_fn);
      };
      double numeric = 0.0;
      if (options.five_point) {
        const double f2 = at(2 * e), f1 = at(e), b1 = at(-e), b2 = at(-2 * e);
        numeric = (8.0 * (f1 - b1) - (f2 - b2)) / (12.0 * e);
      } else {
        const double up = at(e), down = at(-e);
        numeric = (up - down) / (2.0 * e);
      }
      tensor[i] = saved;
      const double a = analytic[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double rel = std::abs(a - numeric) / denom;
      ++result.coords_checked;
      if (!(rel <= result.max_relative_error)) {
        result.max_relative_error = rel;
        result.worst_param = name;
        result.worst_index = i;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  params.zero_grad();
  return result;
}

}  // namespace tag
