#include "qflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "qflow/csv.hpp"
#include "qflow/rng.hpp"

namespace qflow {

std::string to_string(Scheme s) {
  return s == Scheme::ExactOU ? "exact_ou" : "euler_maruyama";
}

Scheme parse_scheme(const std::string& text) {
  if (text == "exact_ou" || text == "ExactOU" || text == "exact") return Scheme::ExactOU;
  if (text == "euler_maruyama" || text == "EulerMaruyama" || text == "euler") {
    return Scheme::EulerMaruyama;
  }
  throw std::invalid_argument("unknown scheme '" + text + "'");
}

BoundarySpec amplifier_boundary(double q0, double var_q0, double var_p0, double tau_0,
                                double tau_f) {
  if (var_q0 < 0 || var_p0 < 0) throw std::invalid_argument("operator variances must be >= 0");
  const double g_f = std::exp(tau_f - tau_0);
  BoundarySpec bc;
  bc.coordinates.push_back(
      {BoundaryEnd::Future, GaussianMixture1D::single(g_f * q0, 1.0 + g_f * g_f * var_q0)});
  bc.coordinates.push_back({BoundaryEnd::Past, GaussianMixture1D::single(0.0, 1.0 + var_p0)});
  return bc;
}

BoundarySpec eigenstate_boundary(double q0, double tau_0, double tau_f) {
  return amplifier_boundary(q0, 0.0, 0.0, tau_0, tau_f);
}

TrajectoryEnsemble::TrajectoryEnsemble(TimeGrid grid, std::vector<double> times,
                                       std::vector<std::string> names, std::size_t n_traj,
                                       std::uint64_t seed, Scheme scheme)
    : grid_(grid),
      times_(std::move(times)),
      names_(std::move(names)),
      n_traj_(n_traj),
      seed_(seed),
      scheme_(scheme),
      data_(n_traj_ * times_.size() * names_.size(), 0.0) {}

std::size_t TrajectoryEnsemble::coordinate_index(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::out_of_range("ensemble has no coordinate '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

std::vector<double> TrajectoryEnsemble::slice(std::size_t coord, std::size_t time) const {
  std::vector<double> out(n_traj_);
  for (std::size_t n = 0; n < n_traj_; ++n) out[n] = at(n, time, coord);
  return out;
}

double exact_ou_step(double x, double dtau, double damping, double diffusion_abs,
                     double gaussian) {
  if (damping == 0.0) return x + gaussian * std::sqrt(diffusion_abs * dtau);
  // -expm1(-2 k dt)/(2k) stays positive for either sign of k
  const double var = diffusion_abs * (-std::expm1(-2.0 * damping * dtau)) / (2.0 * damping);
  return x * std::exp(-damping * dtau) + gaussian * std::sqrt(var);
}

namespace {

// dphi = (slope * phi + intercept) dt + sqrt(D) dW in the integration direction.
struct CoordinateLaw {
  BoundaryEnd end;
  double slope = 0.0;
  double intercept = 0.0;
  double diffusion_abs = 0.0;
  const GaussianMixture1D* sampler = nullptr;
};

std::vector<CoordinateLaw> coordinate_laws(const PhaseSpacePDE& pde, const BoundarySpec& bc) {
  const std::size_t dims = pde.dims();
  if (bc.coordinates.size() != dims) {
    throw SignSplitError("boundary spec has " + std::to_string(bc.coordinates.size()) +
                         " coordinates, PDE has " + std::to_string(dims));
  }
  if (!pde.has_constant_diagonal_diffusion()) {
    throw UnsupportedPdeError("diffusion must be diagonal and constant");
  }
  const auto diffusion = pde.diagonal_diffusion();
  std::vector<CoordinateLaw> laws(dims);
  for (std::size_t mu = 0; mu < dims; ++mu) {
    const auto& drift = pde.drift[mu];
    double slope = 0.0;
    double intercept = 0.0;
    for (const auto& [e, c] : drift.terms()) {
      const int degree = total_degree(e);
      if (degree == 0) {
        intercept = c.re.to_double();
      } else if (degree == 1 && e[mu] == 1) {
        slope = c.re.to_double();
      } else {
        throw UnsupportedPdeError("drift of '" + pde.variables[mu] +
                                  "' must be affine in that coordinate alone");
      }
    }
    const auto end = bc.coordinates[mu].end;
    if (diffusion[mu] > 0 && end != BoundaryEnd::Past) {
      throw SignSplitError("'" + pde.variables[mu] + "' has positive diffusion and must be fixed in the past");
    }
    if (diffusion[mu] < 0 && end != BoundaryEnd::Future) {
      throw SignSplitError("'" + pde.variables[mu] + "' has negative diffusion and must be fixed in the future");
    }
    const double sign = end == BoundaryEnd::Past ? 1.0 : -1.0;
    laws[mu] = {end, sign * slope, sign * intercept, std::abs(diffusion[mu]),
                &bc.coordinates[mu].sampler};
  }
  return laws;
}

void integrate_trajectory(TrajectoryEnsemble& ens, const std::vector<CoordinateLaw>& laws,
                          std::size_t traj, std::size_t n_steps, double dtau,
                          std::size_t stride, Scheme scheme) {
  for (std::size_t mu = 0; mu < laws.size(); ++mu) {
    const auto& law = laws[mu];
    StreamRng rng(ens.seed(), traj, mu);
    double value = rng.sample(*law.sampler);
    const bool forward = law.end == BoundaryEnd::Past;
    const auto record = [&](std::size_t k) {
      if (k % stride == 0) ens.at(traj, k / stride, mu) = value;
    };
    record(forward ? 0 : n_steps);
    const double damping = -law.slope;
    const double fixed_point = damping != 0.0 ? law.intercept / damping : 0.0;
    for (std::size_t s = 1; s <= n_steps; ++s) {
      const double xi = rng.normal();
      if (scheme == Scheme::ExactOU) {
        if (damping != 0.0) {
          value = fixed_point +
                  exact_ou_step(value - fixed_point, dtau, damping, law.diffusion_abs, xi);
        } else {
          value = exact_ou_step(value + law.intercept * dtau, dtau, 0.0, law.diffusion_abs, xi);
        }
      } else {
        value += (law.slope * value + law.intercept) * dtau +
                 std::sqrt(law.diffusion_abs * dtau) * xi;
      }
      record(forward ? s : n_steps - s);
    }
  }
}

}  // namespace

TrajectoryEnsemble simulate(const PhaseSpacePDE& pde, const BoundarySpec& bc,
                            const TimeGrid& grid, std::size_t n_traj, std::uint64_t seed,
                            Scheme scheme, const SimulationOptions& options) {
  const auto laws = coordinate_laws(pde, bc);
  const double dtau = grid.step();
  double max_slope = 0.0;
  for (const auto& law : laws) max_slope = std::max(max_slope, std::abs(law.slope));
  if (dtau * max_slope > 0.1) {
    throw StepError("dtau * |drift slope| = " + std::to_string(dtau * max_slope) +
                    " exceeds 0.1; refine the time grid");
  }
  const std::size_t stride = options.record_stride;
  if (stride == 0 || grid.n_steps % stride != 0) {
    throw std::invalid_argument("record_stride must divide the number of steps");
  }
  std::vector<double> times;
  for (std::size_t k = 0; k <= grid.n_steps; k += stride) times.push_back(grid.time(k));

  TrajectoryEnsemble ens(grid, std::move(times), pde.variables, n_traj, seed, scheme);
  const auto n = static_cast<long long>(n_traj);
  if (options.execution == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long traj = 0; traj < n; ++traj) {
      integrate_trajectory(ens, laws, static_cast<std::size_t>(traj), grid.n_steps, dtau,
                           stride, scheme);
    }
  } else {
    for (long long traj = 0; traj < n; ++traj) {
      integrate_trajectory(ens, laws, static_cast<std::size_t>(traj), grid.n_steps, dtau,
                           stride, scheme);
    }
  }
  return ens;
}

double exponential_gain(double tau) { return std::exp(tau); }

std::vector<double> measured_value_paths(const TrajectoryEnsemble& e,
                                         const std::string& coordinate,
                                         const std::function<double(double)>& gain_of_tau) {
  const std::size_t c = e.coordinate_index(coordinate);
  std::vector<double> gains(e.n_times());
  for (std::size_t t = 0; t < e.n_times(); ++t) gains[t] = gain_of_tau(e.times()[t]);
  std::vector<double> out(e.n_traj() * e.n_times());
  for (std::size_t n = 0; n < e.n_traj(); ++n) {
    for (std::size_t t = 0; t < e.n_times(); ++t) {
      out[n * e.n_times() + t] = e.at(n, t, c) / gains[t];
    }
  }
  return out;
}

void write_ensemble_csv(std::ostream& os, const TrajectoryEnsemble& e,
                        const std::vector<std::pair<std::string, std::vector<double>>>& extra) {
  std::vector<std::string> header{"tau", "traj_id"};
  header.insert(header.end(), e.coordinates().begin(), e.coordinates().end());
  for (const auto& [name, values] : extra) {
    if (values.size() != e.n_traj() * e.n_times()) {
      throw std::invalid_argument("extra column '" + name + "' has wrong length");
    }
    header.push_back(name);
  }
  write_csv_row(os, header);
  std::vector<std::string> row;
  for (std::size_t n = 0; n < e.n_traj(); ++n) {
    for (std::size_t t = 0; t < e.n_times(); ++t) {
      row.clear();
      row.push_back(csv_number(e.times()[t]));
      row.push_back(std::to_string(n));
      for (std::size_t c = 0; c < e.n_dims(); ++c) row.push_back(csv_number(e.at(n, t, c)));
      for (const auto& [name, values] : extra) row.push_back(csv_number(values[n * e.n_times() + t]));
      write_csv_row(os, row);
    }
  }
}

nlohmann::ordered_json ensemble_metadata(const TrajectoryEnsemble& e) {
  nlohmann::ordered_json j;
  j["seed"] = e.seed();
  j["scheme"] = to_string(e.scheme());
  j["grid"] = {{"tau_0", e.grid().tau_0}, {"tau_f", e.grid().tau_f}, {"n_steps", e.grid().n_steps}};
  j["recorded_times"] = e.n_times();
  j["n_traj"] = e.n_traj();
  j["coordinates"] = e.coordinates();
  return j;
}

}  // namespace qflow
