#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace warplab::testing {

// Exhaustive scan with its own interpolation and its own window grid: every
// sample abscissa r is tested against every t in {1, 1 + step, ..., l}.
inline std::vector<double> brute_force_scales(const std::vector<double>& x,
                                              const std::vector<double>& F, double k,
                                              double l, double step) {
  auto interp = [&](double v) {
    const auto it = std::lower_bound(x.begin() + 1, x.end() - 1, v);
    const auto j = static_cast<std::size_t>(it - x.begin());
    const double w = (v - x[j - 1]) / (x[j] - x[j - 1]);
    return (1.0 - w) * F[j - 1] + w * F[j];
  };
  std::vector<double> ts;
  const int nsteps = static_cast<int>(std::floor((l - 1.0) / step + 1e-9));
  for (int j = 0; j <= nsteps; ++j) ts.push_back(1.0 + j * step);
  if (ts.back() < l - 1e-12) ts.push_back(l);
  std::vector<double> out;
  for (double r : x) {
    if (r + l > x.back()) continue;
    bool ok = true;
    for (double t : ts) ok = ok && interp(r + t) - interp(r) <= (k + 1.0 / l) * t + 1e-12;
    if (ok) out.push_back(r);
  }
  return out;
}

}  // namespace warplab::testing
