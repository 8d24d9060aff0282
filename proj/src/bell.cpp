#include "qflow/bell.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qflow/measurement.hpp"
#include "qflow/rng.hpp"

namespace qflow {

double singlet_branch_probability(int a, int b, double theta, double phi) {
  if ((a != 1 && a != -1) || (b != 1 && b != -1)) {
    throw std::invalid_argument("spin outcomes must be +1 or -1");
  }
  return 0.25 * (1.0 - a * b * std::cos(theta - phi));
}

double chsh_combination(const Correlations& e) {
  return e[0][0] - e[0][1] + e[1][1] + e[1][0];
}

ChshAngles optimal_angles() {
  constexpr double pi = std::numbers::pi;
  return {{0.0, pi / 2}, {-3 * pi / 4, -pi / 4}};
}

ChshResult chsh_analytic(double gain, const ChshAngles& angles) {
  const double eta = binning_efficiency(gain);
  ChshResult r;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      r.analytic[i][j] = -eta * eta * std::cos(angles.theta[i] - angles.phi[j]);
    }
  }
  r.correlations = r.analytic;
  r.B_analytic = chsh_combination(r.analytic);
  r.B = r.B_analytic;
  return r;
}

namespace {

struct BatchCounts {
  long long product = 0;
  long long a = 0;
  long long b = 0;
};

BatchCounts run_batch(std::uint64_t seed, std::uint64_t setting, std::uint64_t batch,
                      std::size_t n, const std::array<double, 4>& cumulative, double sigma) {
  static constexpr int kA[4] = {1, 1, -1, -1};
  static constexpr int kB[4] = {1, -1, 1, -1};
  StreamRng rng(seed, setting, batch);
  BatchCounts c;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = rng.uniform();
    int branch = 0;
    while (branch < 3 && u >= cumulative[branch]) ++branch;
    const int sa = bin_spin(kA[branch] + sigma * rng.normal());
    const int sb = bin_spin(kB[branch] + sigma * rng.normal());
    c.product += sa * sb;
    c.a += sa;
    c.b += sb;
  }
  return c;
}

}  // namespace

ChshResult chsh_monte_carlo(const ChshSettings& s) {
  if (!(s.gain > 0)) throw std::invalid_argument("gain must be > 0");
  if (s.n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (s.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  for (double a : {s.theta[0], s.theta[1], s.phi[0], s.phi[1]}) {
    if (!std::isfinite(a)) throw std::invalid_argument("angles must be finite");
  }
  ChshResult r = chsh_analytic(s.gain, {s.theta, s.phi});
  r.n_samples = s.n_samples;
  const double sigma = 1.0 / (std::sqrt(2.0) * s.gain);
  const std::size_t n_batches = (s.n_samples + s.batch_size - 1) / s.batch_size;
  const double n = static_cast<double>(s.n_samples);
  double var_b = 0.0;

  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      std::array<double, 4> cumulative{};
      double acc = 0.0;
      int k = 0;
      for (int a : {1, -1}) {
        for (int b : {1, -1}) {
          acc += singlet_branch_probability(a, b, s.theta[i], s.phi[j]);
          cumulative[k++] = acc;
        }
      }
      const std::uint64_t setting = static_cast<std::uint64_t>(2 * i + j);
      std::vector<BatchCounts> counts(n_batches);
      const auto body = [&](std::size_t batch) {
        const std::size_t begin = batch * s.batch_size;
        const std::size_t len = std::min(s.batch_size, s.n_samples - begin);
        counts[batch] = run_batch(s.seed, setting, batch, len, cumulative, sigma);
      };
      const auto nb = static_cast<long long>(n_batches);
      if (s.execution == Execution::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long batch = 0; batch < nb; ++batch) body(static_cast<std::size_t>(batch));
      } else {
        for (long long batch = 0; batch < nb; ++batch) body(static_cast<std::size_t>(batch));
      }
      BatchCounts total;
      for (const auto& c : counts) {
        total.product += c.product;
        total.a += c.a;
        total.b += c.b;
      }
      const double e = static_cast<double>(total.product) / n;
      r.correlations[i][j] = e;
      r.marginal_a[i][j] = static_cast<double>(total.a) / n;
      r.marginal_b[i][j] = static_cast<double>(total.b) / n;
      var_b += (1.0 - e * e) / n;
    }
  }
  r.B = chsh_combination(r.correlations);
  r.stderr_B = std::sqrt(var_b);
  return r;
}

double bell_b_optimal(double gain) {
  const double eta = binning_efficiency(gain);
  return 2.0 * std::numbers::sqrt2 * eta * eta;
}

double bell_threshold_gain(double tol) {
  double lo = 0.0;
  double hi = 5.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (bell_b_optimal(mid) > 2.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace qflow
