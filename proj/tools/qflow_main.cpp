// qflow: figure data and checks for the Q-function measurement model.

#include <omp.h>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qflow/bell.hpp"
#include "qflow/csv.hpp"
#include "qflow/dynamics.hpp"
#include "qflow/fock_oracle.hpp"
#include "qflow/measurement.hpp"
#include "qflow/operator_expr.hpp"
#include "qflow/symbolic_fpe.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr std::uint64_t kDefaultSeed = 20240611;

enum Exit { kOk = 0, kUsage = 1, kIo = 2, kParse = 3, kOrder = 4, kTolerance = 5 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = kDefaultSeed;
  std::string output = "-";
  std::string format = "csv";
};

// NaN cells are written empty in CSV and null in JSON.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

using Json = nlohmann::ordered_json;

std::string render(const Table& t, const Json& meta, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    Json j;
    j["meta"] = meta;
    j["columns"] = t.columns;
    Json rows = Json::array();
    for (const auto& r : t.rows) {
      Json row = Json::array();
      for (double v : r) {
        if (std::isnan(v)) {
          row.push_back(nullptr);
        } else {
          row.push_back(v);
        }
      }
      rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    os << j.dump(2) << "\n";
    return os.str();
  }
  qflow::write_csv_row(os, t.columns);
  std::vector<std::string> cells;
  for (const auto& r : t.rows) {
    cells.clear();
    for (double v : r) cells.push_back(std::isnan(v) ? "" : qflow::csv_number(v));
    qflow::write_csv_row(os, cells);
  }
  return os.str();
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path + "': " + std::strerror(errno));
  f << body;
  f.close();
  if (!f) throw IoError("cannot write '" + path + "': " + std::strerror(errno));
}

void emit(const Common& c, const std::string& body, const Json& meta) {
  if (c.output == "-") {
    std::cout << body;
    std::cout.flush();
    return;
  }
  write_file(c.output, body);
  if (c.format != "json") write_file(c.output + ".meta.json", meta.dump(2) + "\n");
}

Json base_meta(const std::string& command, const std::string& figure, const Common& c) {
  Json m;
  m["command"] = command;
  m["figure"] = figure;
  m["version"] = kVersion;
  m["seed"] = c.seed;
  return m;
}

const double kNaN = std::numeric_limits<double>::quiet_NaN();

// --- subcommands ------------------------------------------------------------

struct EigenDistArgs {
  double q0 = 1.0;
  double tau_max = 3.0;
  std::size_t tau_steps = 30;
  double qm_min = -2.0;
  double qm_max = 4.0;
  std::size_t qm_points = 301;
};

int cmd_eigen_dist(const EigenDistArgs& a, const Common& c) {
  Table t{{"tau", "q_m", "density"}, {}};
  const auto grid = qflow::linear_grid(a.qm_min, a.qm_max, a.qm_points);
  for (std::size_t k = 0; k <= a.tau_steps; ++k) {
    const double tau = a.tau_steps == 0 ? 0.0 : a.tau_max * static_cast<double>(k) /
                                                    static_cast<double>(a.tau_steps);
    const auto r = qflow::continuous_measurement(a.q0, 0.0, tau);
    for (double qm : grid) t.rows.push_back({tau, qm, r.q_m_distribution.pdf(qm)});
  }
  auto meta = base_meta("eigen-dist", "fig1", c);
  meta["convention"] = "quadrature";
  meta["q0"] = a.q0;
  emit(c, render(t, meta, c.format), meta);
  return kOk;
}

struct TrajectoryArgs {
  double q0 = 1.0;
  double var0 = 0.0;
  double tau_f = 3.0;
  double dtau = 1e-3;
  std::size_t n_traj = 10;
  std::size_t stride = 1;
  std::string scheme = "exact_ou";
};

int cmd_trajectories(const TrajectoryArgs& a, const Common& c) {
  using namespace qflow;
  const auto pde = compile_fpe(parse_hamiltonian("0.5i*adag^2 - 0.5i*a^2"),
                               QuadratureConvention::OperatorQuadratures);
  const auto bc = amplifier_boundary(a.q0, a.var0, 0.0, 0.0, a.tau_f);
  const auto scheme = parse_scheme(a.scheme);
  const auto n_steps = static_cast<std::size_t>(std::llround(a.tau_f / a.dtau));
  if (n_steps == 0) throw std::invalid_argument("--dtau must not exceed --tau-f");
  const auto ens = simulate(pde, bc, TimeGrid(0.0, a.tau_f, n_steps), a.n_traj, c.seed, scheme,
                            {a.stride, Execution::Parallel});
  const auto qm = measured_value_paths(ens, "q");
  const std::size_t iq = ens.coordinate_index("q");
  const std::size_t ip = ens.coordinate_index("p");
  Table t{{"tau", "traj_id", "q", "p", "q_m"}, {}};
  for (std::size_t n = 0; n < ens.n_traj(); ++n) {
    for (std::size_t k = 0; k < ens.n_times(); ++k) {
      t.rows.push_back({ens.times()[k], static_cast<double>(n), ens.at(n, k, iq), ens.at(n, k, ip),
                        qm[n * ens.n_times() + k]});
    }
  }
  auto meta = base_meta("trajectories", "fig2,fig3", c);
  meta["convention"] = "quadrature";
  meta["scheme"] = to_string(scheme);
  meta["ensemble"] = ensemble_metadata(ens);
  meta["q0"] = a.q0;
  meta["var0"] = a.var0;
  emit(c, render(t, meta, c.format), meta);
  return kOk;
}

struct SpinArgs {
  std::vector<double> gains{1.0, 2.0, 4.0};
  std::string spin = "equal";
  double lo = -3.0;
  double hi = 3.0;
  std::size_t points = 601;
  double gain = 2.0;
  std::size_t n_samples = 1000;
};

qflow::fock::SpinState spin_from_name(const std::string& s) {
  if (s == "up") return {1.0, 0.0};
  if (s == "down") return {0.0, 1.0};
  return qflow::fock::SpinState::equal_superposition();
}

Json spin_meta(const std::string& command, const Common& c, const std::string& spin) {
  auto meta = base_meta(command, "fig3-spin", c);
  meta["convention"] = "amplitude";
  meta["convention_note"] = "sigma_m = x/G with alpha = x + ip; the quadrature q = 2x";
  meta["spin"] = spin;
  return meta;
}

int cmd_spin_dist(const SpinArgs& a, const Common& c) {
  Table t{{"G", "sigma_m", "density"}, {}};
  const auto grid = qflow::linear_grid(a.lo, a.hi, a.points);
  for (double g : a.gains) {
    const auto r = qflow::qubit_measurement(spin_from_name(a.spin), g);
    for (double s : grid) t.rows.push_back({g, s, r.sigma_m_distribution.pdf(s)});
  }
  const auto meta = spin_meta("spin-dist", c, a.spin);
  emit(c, render(t, meta, c.format), meta);
  return kOk;
}

int cmd_spin_samples(const SpinArgs& a, const Common& c) {
  auto r = qflow::qubit_measurement(spin_from_name(a.spin), a.gain);
  const auto values = qflow::sample_spin(r, a.n_samples, c.seed);
  Table t{{"traj_id", "value", "binned"}, {}};
  for (std::size_t i = 0; i < values.size(); ++i) {
    t.rows.push_back({static_cast<double>(i), values[i],
                      static_cast<double>((*r.binned_samples)[i])});
  }
  auto meta = spin_meta("spin-samples", c, a.spin);
  meta["G"] = a.gain;
  emit(c, render(t, meta, c.format), meta);
  return kOk;
}

struct BellArgs {
  double g_min = 0.2;
  double g_max = 3.0;
  std::size_t n_g = 29;
  std::size_t n_samples = 100000;
  std::vector<double> theta;
  std::vector<double> phi;
};

int cmd_bell(const BellArgs& a, const Common& c) {
  auto angles = qflow::optimal_angles();
  if (!a.theta.empty()) {
    if (a.theta.size() != 2) throw CLI::ValidationError("--theta", "needs two angles");
    angles.theta = {a.theta[0], a.theta[1]};
  }
  if (!a.phi.empty()) {
    if (a.phi.size() != 2) throw CLI::ValidationError("--phi", "needs two angles");
    angles.phi = {a.phi[0], a.phi[1]};
  }
  Table t{{"G", "B_analytic", "B_mc", "stderr"}, {}};
  const auto gains = qflow::linear_grid(a.g_min, a.g_max, a.n_g);
  for (std::size_t i = 0; i < gains.size(); ++i) {
    const double g = gains[i];
    const double analytic = qflow::chsh_analytic(g, angles).B_analytic;
    if (a.n_samples == 0 || g <= 0) {
      t.rows.push_back({g, analytic, kNaN, kNaN});
      continue;
    }
    qflow::ChshSettings s;
    s.theta = angles.theta;
    s.phi = angles.phi;
    s.gain = g;
    s.n_samples = a.n_samples;
    s.seed = c.seed + i;
    const auto r = qflow::chsh_monte_carlo(s);
    t.rows.push_back({g, analytic, r.B, r.stderr_B});
  }
  auto meta = base_meta("bell", "fig4", c);
  meta["convention"] = "amplitude";
  meta["theta"] = angles.theta;
  meta["phi"] = angles.phi;
  meta["n_samples"] = a.n_samples;
  meta["threshold_gain"] = qflow::bell_threshold_gain();
  emit(c, render(t, meta, c.format), meta);
  return kOk;
}

struct DeriveArgs {
  std::string hamiltonian;
  std::string convention = "quadrature";
};

int cmd_derive_fpe(const DeriveArgs& a, const Common& c) {
  const auto conv = qflow::parse_convention(a.convention);
  const auto pde = qflow::compile_fpe(qflow::parse_hamiltonian(a.hamiltonian), conv);
  Json j;
  j["hamiltonian"] = a.hamiltonian;
  j["pretty"] = qflow::pretty_print(pde);
  j["pde"] = qflow::to_json(pde);
  std::string body;
  if (c.format == "json") {
    body = j.dump(2) + "\n";
  } else {
    body = qflow::pretty_print(pde) + "\n" + qflow::to_json(pde).dump() + "\n";
  }
  if (c.output == "-") {
    std::cout << body;
  } else {
    write_file(c.output, body);
  }
  return kOk;
}

struct VerifyArgs {
  int dim = 30;
  double tolerance = 1e-6;
  int points = 20;
};

int cmd_verify(const VerifyArgs& a, const Common& c) {
  const auto checks = qflow::fock::run_identity_suite(a.dim, a.points, c.seed);
  double worst = 0.0;
  std::ostringstream os;
  qflow::write_csv_row(os, {"identity", "re", "im", "error"});
  for (const auto& k : checks) {
    worst = std::max(worst, k.error);
    qflow::write_csv_row(os, {k.name, qflow::csv_number(k.point.real()),
                              qflow::csv_number(k.point.imag()), qflow::csv_number(k.error)});
  }
  if (c.format == "json") {
    Json j;
    j["dim"] = a.dim;
    j["tolerance"] = a.tolerance;
    j["max_error"] = worst;
    j["passed"] = worst < a.tolerance;
    Json rows = Json::array();
    for (const auto& k : checks) {
      rows.push_back({{"identity", k.name}, {"re", k.point.real()}, {"im", k.point.imag()},
                      {"error", k.error}});
    }
    j["checks"] = std::move(rows);
    const std::string body = j.dump(2) + "\n";
    if (c.output == "-") {
      std::cout << body;
    } else {
      write_file(c.output, body);
    }
  } else if (c.output == "-") {
    std::cout << os.str();
  } else {
    write_file(c.output, os.str());
  }
  std::cerr << "max error " << worst << (worst < a.tolerance ? " < " : " >= ") << a.tolerance
            << "\n";
  return worst < a.tolerance ? kOk : kTolerance;
}

void apply_thread_cap() {
  const char* env = std::getenv("QFLOW_THREADS");
  if (!env) return;
  const int n = std::atoi(env);
  if (n > 0) omp_set_num_threads(n);
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();

  CLI::App app{"qflow: Q-function measurement simulator"};
  app.set_config("--config", "", "flat key = value file mirroring the flags");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  const auto add_common = [&](CLI::App* sub, bool seeded) {
    if (seeded) sub->add_option("--seed", common.seed, "RNG seed")->capture_default_str();
    sub->add_option("-o,--output", common.output, "output path, - for stdout")->capture_default_str();
    sub->add_option("--format", common.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  };

  EigenDistArgs eigen;
  auto* s_eigen = app.add_subcommand("eigen-dist", "P(q_m, tau) for a quadrature eigenstate");
  s_eigen->add_option("--q0", eigen.q0)->capture_default_str();
  s_eigen->add_option("--tau-max", eigen.tau_max)->check(CLI::NonNegativeNumber)->capture_default_str();
  s_eigen->add_option("--tau-steps", eigen.tau_steps)->capture_default_str();
  s_eigen->add_option("--qm-min", eigen.qm_min)->capture_default_str();
  s_eigen->add_option("--qm-max", eigen.qm_max)->capture_default_str();
  s_eigen->add_option("--qm-points", eigen.qm_points)->capture_default_str();
  add_common(s_eigen, false);

  TrajectoryArgs traj;
  auto* s_traj = app.add_subcommand("trajectories", "forward-backward amplifier trajectories");
  s_traj->add_option("--q0", traj.q0)->capture_default_str();
  s_traj->add_option("--var0", traj.var0, "initial operator variance of q")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  s_traj->add_option("--tau-f", traj.tau_f)->check(CLI::PositiveNumber)->capture_default_str();
  s_traj->add_option("--dtau", traj.dtau, "step; rounded so the grid ends at tau-f")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_traj->add_option("--n-traj", traj.n_traj)->capture_default_str();
  s_traj->add_option("--record-stride", traj.stride)->check(CLI::PositiveNumber)->capture_default_str();
  s_traj->add_option("--scheme", traj.scheme)
      ->check(CLI::IsMember({"exact_ou", "euler_maruyama"}))
      ->capture_default_str();
  add_common(s_traj, true);

  SpinArgs spin;
  auto* s_spin = app.add_subcommand("spin-dist", "P(sigma_m) for a qubit measured with gain G");
  s_spin->add_option("--gains", spin.gains)->delimiter(',')->check(CLI::PositiveNumber)->capture_default_str();
  s_spin->add_option("--spin", spin.spin)->check(CLI::IsMember({"equal", "up", "down"}))->capture_default_str();
  s_spin->add_option("--sigma-min", spin.lo)->capture_default_str();
  s_spin->add_option("--sigma-max", spin.hi)->capture_default_str();
  s_spin->add_option("--points", spin.points)->capture_default_str();
  add_common(s_spin, false);

  auto* s_samples = app.add_subcommand("spin-samples", "sampled sigma_m and binned spins");
  s_samples->add_option("--gain", spin.gain)->check(CLI::PositiveNumber)->capture_default_str();
  s_samples->add_option("--spin", spin.spin)->check(CLI::IsMember({"equal", "up", "down"}))->capture_default_str();
  s_samples->add_option("--n-samples", spin.n_samples)->capture_default_str();
  add_common(s_samples, true);

  BellArgs bell;
  auto* s_bell = app.add_subcommand("bell", "CHSH B(G), analytic and Monte Carlo");
  s_bell->add_option("--g-min", bell.g_min)->check(CLI::NonNegativeNumber)->capture_default_str();
  s_bell->add_option("--g-max", bell.g_max)->check(CLI::NonNegativeNumber)->capture_default_str();
  s_bell->add_option("--n-g", bell.n_g)->capture_default_str();
  s_bell->add_option("--n-samples", bell.n_samples)->capture_default_str();
  s_bell->add_option("--theta", bell.theta, "two angles for site A")->delimiter(',');
  s_bell->add_option("--phi", bell.phi, "two angles for site B")->delimiter(',');
  add_common(s_bell, true);

  DeriveArgs derive;
  auto* s_derive = app.add_subcommand("derive-fpe", "phase-space PDE of a Hamiltonian");
  s_derive->add_option("hamiltonian", derive.hamiltonian, "e.g. \"0.5i*adag^2 - 0.5i*a^2\"")->required();
  s_derive->add_option("--convention", derive.convention)
      ->check(CLI::IsMember({"quadrature", "amplitude"}))
      ->capture_default_str();
  add_common(s_derive, false);

  VerifyArgs verify;
  auto* s_verify = app.add_subcommand("verify", "operator identities in truncated Fock space");
  s_verify->add_option("--dim", verify.dim)->check(CLI::Range(4, 400))->capture_default_str();
  s_verify->add_option("--tolerance", verify.tolerance)->check(CLI::PositiveNumber)->capture_default_str();
  s_verify->add_option("--points", verify.points)->check(CLI::PositiveNumber)->capture_default_str();
  add_common(s_verify, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::FileError& e) {
    std::cerr << "qflow: " << e.what() << "\n";
    return kIo;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s_eigen) return cmd_eigen_dist(eigen, common);
    if (*s_traj) return cmd_trajectories(traj, common);
    if (*s_spin) return cmd_spin_dist(spin, common);
    if (*s_samples) return cmd_spin_samples(spin, common);
    if (*s_bell) return cmd_bell(bell, common);
    if (*s_derive) return cmd_derive_fpe(derive, common);
    if (*s_verify) return cmd_verify(verify, common);
  } catch (const IoError& e) {
    std::cerr << "qflow: " << e.what() << "\n";
    return kIo;
  } catch (const qflow::ParseError& e) {
    std::cerr << "qflow: " << e.what() << "\n";
    return kParse;
  } catch (const qflow::OrderError& e) {
    std::cerr << "qflow: " << e.what() << "\n";
    return kOrder;
  } catch (const qflow::NonHermitianError& e) {
    std::cerr << "qflow: " << e.what() << "\n";
    return kOrder;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "qflow: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "qflow: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
