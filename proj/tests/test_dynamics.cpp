#include "doctest.h"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qflow/dynamics.hpp"
#include "qflow/operator_expr.hpp"

using namespace qflow;

namespace {

const PhaseSpacePDE& amp() {
  static const auto pde = compile_fpe(parse_hamiltonian("0.5i*adag^2 - 0.5i*a^2"),
                                      QuadratureConvention::OperatorQuadratures);
  return pde;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

BoundarySpec vacuum_bc(double tau_f, double var_p0) {
  return amplifier_boundary(0.0, 1.0, var_p0, 0.0, tau_f);
}

}  // namespace

TEST_CASE("exact_ou_step examples") {
  CHECK(exact_ou_step(0.7, 0.0, 1.0, 2.0, 1.3) == 0.7);
  CHECK(exact_ou_step(1.0, 0.5, 1.0, 2.0, 0.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  // stationary: variance D / 2k
  CHECK(exact_ou_step(0.0, 200.0, 1.0, 2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  // Brownian limit
  CHECK(exact_ou_step(0.5, 0.25, 0.0, 2.0, 1.0) == doctest::Approx(0.5 + std::sqrt(0.5)));
  // tiny damping agrees with the Brownian limit
  CHECK(exact_ou_step(0.5, 0.25, 1e-12, 2.0, 1.0) == doctest::Approx(0.5 + std::sqrt(0.5)).epsilon(1e-9));
}

TEST_CASE("scheme names") {
  CHECK(parse_scheme(to_string(Scheme::ExactOU)) == Scheme::ExactOU);
  CHECK(parse_scheme(to_string(Scheme::EulerMaruyama)) == Scheme::EulerMaruyama);
  CHECK_THROWS(parse_scheme("rk4"));
}

TEST_CASE("boundary checks") {
  const TimeGrid grid(0.0, 1.0, 100);
  auto bc = eigenstate_boundary(1.0, 0.0, 1.0);
  std::swap(bc.coordinates[0].end, bc.coordinates[1].end);
  CHECK_THROWS_AS(simulate(amp(), bc, grid, 4, 1, Scheme::ExactOU), SignSplitError);
  BoundarySpec short_bc;
  short_bc.coordinates.resize(1);
  CHECK_THROWS_AS(simulate(amp(), short_bc, grid, 4, 1, Scheme::ExactOU), SignSplitError);
  CHECK_THROWS_AS(simulate(amp(), eigenstate_boundary(1, 0, 1), TimeGrid(0, 1, 5), 4, 1,
                           Scheme::ExactOU),
                  StepError);
  CHECK_THROWS(simulate(amp(), eigenstate_boundary(1, 0, 1), grid, 4, 1, Scheme::ExactOU,
                        {3, Execution::Serial}));
}

TEST_CASE("unsupported PDEs are rejected") {
  const TimeGrid grid(0.0, 1.0, 100);
  const auto rot = compile_fpe(parse_hamiltonian("adag*a"), QuadratureConvention::OperatorQuadratures);
  BoundarySpec bc;
  bc.coordinates.resize(2);
  CHECK_THROWS_AS(simulate(rot, bc, grid, 2, 1, Scheme::ExactOU), UnsupportedPdeError);
  const auto kerr = compile_fpe(parse_hamiltonian("adag^2*a^2"), QuadratureConvention::OperatorQuadratures);
  CHECK_THROWS_AS(simulate(kerr, bc, grid, 2, 1, Scheme::ExactOU), UnsupportedPdeError);
}

TEST_CASE("zero PDE keeps boundary samples") {
  PhaseSpacePDE zero = compile_fpe(OperatorExpr(), QuadratureConvention::OperatorQuadratures);
  BoundarySpec bc;
  bc.coordinates = {{BoundaryEnd::Future, GaussianMixture1D::single(3, 2)},
                    {BoundaryEnd::Past, GaussianMixture1D::single(-1, 0.5)}};
  const auto e = simulate(zero, bc, TimeGrid(0, 2, 20), 50, 9, Scheme::EulerMaruyama);
  for (std::size_t n = 0; n < e.n_traj(); ++n) {
    for (std::size_t t = 1; t < e.n_times(); ++t) {
      CHECK(e.at(n, t, 0) == e.at(n, 0, 0));
      CHECK(e.at(n, t, 1) == e.at(n, 0, 1));
    }
  }
}

TEST_CASE("backward q has unit variance at every time") {
  const std::size_t n = 20000;
  const auto e = simulate(amp(), eigenstate_boundary(0.0, 0.0, 3.0), TimeGrid(0, 3, 300), n,
                          2024, Scheme::ExactOU, {30, Execution::Parallel});
  for (std::size_t t = 0; t < e.n_times(); ++t) {
    const double v = variance(e.slice(0, t));
    CHECK(std::abs(v - 1.0) < 5.0 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("vacuum p variance follows 1 + e^(-2 tau)") {
  const std::size_t n = 40000;
  const auto e = simulate(amp(), vacuum_bc(2.0, 1.0), TimeGrid(0, 2, 200), n, 5,
                          Scheme::ExactOU, {100, Execution::Parallel});
  const double expect = 1 + std::exp(-2.0);
  CHECK(expect == doctest::Approx(1.13534).epsilon(1e-5));
  const double v = variance(e.slice(1, 1));
  CHECK(std::abs(v / expect - 1) < 5.0 / std::sqrt(static_cast<double>(n)));
  // and vacuum q reaches 1 + G^2 at the future end
  const double vq = variance(e.slice(0, 2));
  CHECK(std::abs(vq / (1 + std::exp(4.0)) - 1) < 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("measured_value_paths") {
  PhaseSpacePDE zero = compile_fpe(OperatorExpr(), QuadratureConvention::OperatorQuadratures);
  BoundarySpec bc;
  bc.coordinates = {{BoundaryEnd::Future, GaussianMixture1D::single(1, 1e-300)},
                    {BoundaryEnd::Past, GaussianMixture1D::single(0, 1)}};
  const auto e = simulate(zero, bc, TimeGrid(0, 1, 10), 3, 1, Scheme::ExactOU);
  const auto qm = measured_value_paths(e, "q");
  for (std::size_t t = 0; t < e.n_times(); ++t) {
    CHECK(qm[t] == doctest::Approx(std::exp(-e.times()[t])).epsilon(1e-12));
  }
  CHECK(qm[0] == e.at(0, 0, 0));
  CHECK_THROWS(measured_value_paths(e, "z"));
}

TEST_CASE("eigenstate ensemble: measured variance shrinks as 1/G^2") {
  const std::size_t n = 20000;
  const auto e = simulate(amp(), eigenstate_boundary(1.0, 0.0, 3.0), TimeGrid(0, 3, 300), n, 11,
                          Scheme::ExactOU, {100, Execution::Parallel});
  const auto qm = measured_value_paths(e, "q");
  for (std::size_t t = 0; t < e.n_times(); ++t) {
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = qm[k * e.n_times() + t];
    const double expect = std::exp(-2 * e.times()[t]);
    CHECK(std::abs(variance(col) / expect - 1) < 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(mean(col) - 1.0) < 5.0 * std::sqrt(expect / static_cast<double>(n)));
  }
}

TEST_CASE("empirical q law matches the marginal equation (KS)") {
  // P_q solves dP/dtau_- = [d_q q + d_q^2] P, so from N(G_f q0, 1) at tau_f
  // q(tau) ~ N(G(tau) q0, 1)
  const std::size_t n = 100000;
  const double q0 = 0.5;
  const auto e = simulate(amp(), eigenstate_boundary(q0, 0.0, 2.0), TimeGrid(0, 2, 200), n, 3,
                          Scheme::ExactOU, {50, Execution::Parallel});
  const double critical = 1.628 / std::sqrt(static_cast<double>(n));  // 1% level
  for (std::size_t t = 0; t < e.n_times(); ++t) {
    auto v = e.slice(0, t);
    std::sort(v.begin(), v.end());
    const double mu = std::exp(e.times()[t]) * q0;
    double d = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double f = 0.5 * std::erfc(-(v[k] - mu) / std::sqrt(2.0));
      d = std::max({d, std::abs(f - static_cast<double>(k) / n),
                    std::abs(f - static_cast<double>(k + 1) / n)});
    }
    CHECK(d < critical);
  }
}

TEST_CASE("deterministic and independent of thread count") {
  const auto run = [](Execution x) {
    return simulate(amp(), eigenstate_boundary(1.0, 0.0, 1.0), TimeGrid(0, 1, 100), 257, 42,
                    Scheme::EulerMaruyama, {1, x});
  };
  const auto serial = run(Execution::Serial);
  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 3, 4}) {
    omp_set_num_threads(threads);
    CHECK(run(Execution::Parallel).raw() == serial.raw());
  }
  omp_set_num_threads(saved);
  CHECK(run(Execution::Serial).raw() == serial.raw());
  const auto other = simulate(amp(), eigenstate_boundary(1.0, 0.0, 1.0), TimeGrid(0, 1, 100), 257,
                              43, Scheme::EulerMaruyama, {1, Execution::Serial});
  CHECK(other.raw() != serial.raw());
}

TEST_CASE("Euler-Maruyama converges to the exact OU step") {
  // p forward from its stationary law N(0,1); EM stationary variance is
  // 1/(1 - dtau/2), so the gap is O(dtau)
  const std::size_t n = 50000;
  BoundarySpec bc = amplifier_boundary(0.0, 0.0, 0.0, 0.0, 2.0);
  std::vector<double> gaps;
  for (std::size_t steps : {20, 40, 80}) {
    const TimeGrid grid(0, 2, steps);
    const SimulationOptions opt{steps, Execution::Parallel};
    const auto em = simulate(amp(), bc, grid, n, 8, Scheme::EulerMaruyama, opt);
    const auto ex = simulate(amp(), bc, grid, n, 8, Scheme::ExactOU, opt);
    gaps.push_back(variance(em.slice(1, 1)) - variance(ex.slice(1, 1)));
  }
  CHECK(gaps[0] > 0);
  for (std::size_t k = 1; k < gaps.size(); ++k) {
    CHECK(gaps[k - 1] / gaps[k] == doctest::Approx(2.0).epsilon(0.2));
  }
}

TEST_CASE("ensemble CSV and metadata") {
  const auto e = simulate(amp(), eigenstate_boundary(1.0, 0.0, 1.0), TimeGrid(0, 1, 10), 2, 4,
                          Scheme::ExactOU, {5, Execution::Serial});
  std::ostringstream os;
  write_ensemble_csv(os, e, {{"q_m", measured_value_paths(e, "q")}});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "tau,traj_id,q,p,q_m\r");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 2 * 3);
  const auto meta = ensemble_metadata(e);
  CHECK(meta["seed"] == 4);
  CHECK(meta["scheme"] == "exact_ou");
  CHECK(meta["grid"]["n_steps"] == 10);
  CHECK_THROWS(write_ensemble_csv(os, e, {{"bad", {1.0}}}));
}
