#pragma once

// Forward-backward stochastic trajectories of a generalized Fokker-Planck
// equation. Positive-diffusion coordinates are fixed in the past and
// integrated forward; negative-diffusion coordinates are fixed in the future
// and integrated backward in tau_minus = tau_f - tau with drift -A.
//
// Supported PDEs: constant diagonal diffusion and affine drift in which each
// coordinate depends only on itself (the factorized case). Anything else is
// rejected with UnsupportedPdeError.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qflow/phase_space.hpp"
#include "qflow/symbolic_fpe.hpp"

namespace qflow {

enum class Scheme { EulerMaruyama, ExactOU };
enum class BoundaryEnd { Past, Future };
enum class Execution { Serial, Parallel };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& text);

struct SignSplitError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct StepError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct UnsupportedPdeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CoordinateBoundary {
  BoundaryEnd end = BoundaryEnd::Past;
  GaussianMixture1D sampler = GaussianMixture1D::single(0.0, 1.0);
};

/// One entry per PDE coordinate, in the PDE's variable order.
struct BoundarySpec {
  std::vector<CoordinateBoundary> coordinates;
};

/// Amplifier boundaries in OperatorQuadratures: q fixed at tau_f by
/// N(G_f q0, 1 + G_f^2 var_q0), p fixed at tau_0 by N(0, 1 + var_p0).
BoundarySpec amplifier_boundary(double q0, double var_q0, double var_p0, double tau_0,
                                double tau_f);

/// The q-eigenstate limit: var_q0 = 0, and p takes the vacuum-limit
/// variance 1 at the past boundary.
BoundarySpec eigenstate_boundary(double q0, double tau_0, double tau_f);

struct SimulationOptions {
  /// Store every k-th grid point; must divide the step count.
  std::size_t record_stride = 1;
  Execution execution = Execution::Parallel;
};

class TrajectoryEnsemble {
 public:
  TrajectoryEnsemble(TimeGrid grid, std::vector<double> times, std::vector<std::string> names,
                     std::size_t n_traj, std::uint64_t seed, Scheme scheme);

  const TimeGrid& grid() const { return grid_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<std::string>& coordinates() const { return names_; }
  std::uint64_t seed() const { return seed_; }
  Scheme scheme() const { return scheme_; }

  std::size_t n_traj() const { return n_traj_; }
  std::size_t n_times() const { return times_.size(); }
  std::size_t n_dims() const { return names_.size(); }
  std::size_t coordinate_index(const std::string& name) const;

  double at(std::size_t traj, std::size_t time, std::size_t coord) const {
    return data_[(traj * n_times() + time) * n_dims() + coord];
  }
  double& at(std::size_t traj, std::size_t time, std::size_t coord) {
    return data_[(traj * n_times() + time) * n_dims() + coord];
  }

  /// Values of one coordinate across trajectories at a recorded time.
  std::vector<double> slice(std::size_t coord, std::size_t time) const;

  const std::vector<double>& raw() const { return data_; }

 private:
  TimeGrid grid_;
  std::vector<double> times_;
  std::vector<std::string> names_;
  std::size_t n_traj_;
  std::uint64_t seed_;
  Scheme scheme_;
  std::vector<double> data_;
};

/// x e^{-k dtau} + gaussian * sqrt(D/(2k) (1 - e^{-2 k dtau})); k = 0 falls
/// back to the Brownian limit and k < 0 gives the exact growing solution.
double exact_ou_step(double x, double dtau, double damping, double diffusion_abs,
                     double gaussian);

TrajectoryEnsemble simulate(const PhaseSpacePDE& pde, const BoundarySpec& bc,
                            const TimeGrid& grid, std::size_t n_traj, std::uint64_t seed,
                            Scheme scheme, const SimulationOptions& options = {});

/// Gain convention G(tau) = e^tau.
double exponential_gain(double tau);

/// N x T row-major array of coordinate / G(tau).
std::vector<double> measured_value_paths(
    const TrajectoryEnsemble& e, const std::string& coordinate,
    const std::function<double(double)>& gain_of_tau = exponential_gain);

/// Header "tau,traj_id,<coord>...[,extra...]"; one row per (trajectory, time).
void write_ensemble_csv(std::ostream& os, const TrajectoryEnsemble& e,
                        const std::vector<std::pair<std::string, std::vector<double>>>& extra = {});

nlohmann::ordered_json ensemble_metadata(const TrajectoryEnsemble& e);

}  // namespace qflow
