#include "doctest.h"

#include <cmath>
#include <numbers>

#include "qflow/fock_oracle.hpp"

using namespace qflow;
using namespace qflow::fock;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("ladder operators") {
  const int dim = 16;
  const Matrix a = annihilation(dim);
  for (int n = 1; n < dim; ++n) CHECK(a(n - 1, n).real() == doctest::Approx(std::sqrt(n)));
  const Matrix comm = a * creation(dim) - creation(dim) * a;
  for (int i = 0; i < dim - 1; ++i) {
    for (int j = 0; j < dim - 1; ++j) {
      CHECK(std::abs(comm(i, j) - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
  }
  CHECK((number(dim) - creation(dim) * a).norm() < 1e-12);
}

TEST_CASE("coherent_state examples") {
  const Vector vac = coherent_state({0, 0}, 10);
  CHECK((vac - fock_state(0, 10)).norm() < 1e-15);
  const Vector one = coherent_state({1, 0}, 30);
  CHECK(one(0).real() == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(one.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(coherent_state({2, 0}, 8), TruncationError);
  // annihilation eigenvector away from the cutoff
  const Complex alpha(0.4, -0.3);
  const Vector c = coherent_state(ComplexAmplitude(alpha), 40);
  CHECK(((annihilation(40) * c - alpha * c).head(30)).norm() < 1e-12);
}

TEST_CASE("husimi_q examples") {
  const auto vac = DensityMatrix::pure(fock_state(0, 20));
  CHECK(husimi_q(vac, {0, 0}) == doctest::Approx(1 / kPi).epsilon(1e-14));
  CHECK(husimi_q(vac, {0.6, 0.8}) == doctest::Approx(std::exp(-1.0) / kPi).epsilon(1e-14));
  const ComplexAmplitude beta(0.7, -0.2);
  const auto coh = DensityMatrix::pure(coherent_state(beta, 30));
  CHECK(husimi_q(coh, beta) == doctest::Approx(1 / kPi).epsilon(1e-10));
  // far outside the represented region the exact coefficients still give a value
  CHECK(husimi_q(vac, {8, 0}) >= 0.0);
}

TEST_CASE("DensityMatrix and SpinState validation") {
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 1) = 1.0;
  bad(0, 0) = 1.0;
  CHECK_THROWS(DensityMatrix(bad));
  CHECK_THROWS(DensityMatrix(Matrix::Identity(2, 2)));
  CHECK_THROWS(SpinState(1.0, 1.0));
  CHECK_NOTHROW(SpinState(0.6, Complex(0, 0.8)));
}

namespace {

double q_mass(const Vector& psi, double half_width) {
  return husimi_moments(psi, -half_width, half_width, -half_width, half_width, 241).mass;
}

}  // namespace

TEST_CASE("Q-function is normalized and positive") {
  const int dim = 48;
  std::vector<Vector> states{fock_state(0, dim), fock_state(3, dim),
                             coherent_state({0.8, -0.5}, dim),
                             evolve_parametric(coherent_state({0.3, 0.2}, dim), 0.4)};
  for (const auto& psi : states) {
    CHECK(q_mass(psi, 7.0) == doctest::Approx(1.0).epsilon(1e-4));
    for (double x = -3; x <= 3; x += 0.5) {
      for (double p = -3; p <= 3; p += 0.5) CHECK(husimi_q(psi, {x, p}) >= -1e-12);
    }
  }
  Matrix mix = 0.3 * DensityMatrix::pure(states[1]).matrix() + 0.7 * DensityMatrix::pure(states[2]).matrix();
  const auto rho = DensityMatrix(mix);
  CHECK(husimi_moments(rho, -7, 7, -7, 7, 241).mass == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("evolve_parametric") {
  const int dim = 64;
  const Vector vac = fock_state(0, dim);
  CHECK((evolve_parametric(vac, 0.0) - vac).norm() == 0.0);

  const Matrix u = unitary_from_hermitian(parametric_hamiltonian(dim), 0.7);
  CHECK((u.adjoint() * u - Matrix::Identity(dim, dim)).norm() < 1e-9);

  const Vector sq = evolve_parametric(vac, 0.5);
  const auto m = quadrature_moments(sq);
  CHECK(m.var_q == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
  CHECK(m.var_p == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
  CHECK(std::abs(m.mean_q) < 1e-12);

  // Q variance in quadrature units is 4 Var_Q(x)
  const double s = std::sqrt((1 + std::exp(1.0)) / 4);
  const auto qm = husimi_moments(sq, -8 * s, 8 * s, -4, 4, 241);
  CHECK(4 * qm.var_x == doctest::Approx(1 + std::exp(1.0)).epsilon(1e-6));
  CHECK(4 * qm.var_p == doctest::Approx(1 + std::exp(-1.0)).epsilon(1e-6));
}

TEST_CASE("quadrature variances scale as e^(+-2 tau)") {
  const int dim = 96;
  const Vector vac = fock_state(0, dim);
  for (double tau : {0.1, 0.3, 0.6, 0.9}) {
    const auto m = quadrature_moments(evolve_parametric(vac, tau));
    CHECK(m.var_q == doctest::Approx(std::exp(2 * tau)).epsilon(1e-6));
    CHECK(m.var_p == doctest::Approx(std::exp(-2 * tau)).epsilon(1e-6));
  }
}

TEST_CASE("density matrix evolution keeps trace and Hermiticity") {
  const int dim = 48;
  Matrix mix = 0.5 * DensityMatrix::pure(fock_state(1, dim)).matrix() +
               0.5 * DensityMatrix::pure(coherent_state({0.5, 0.1}, dim)).matrix();
  const auto out = evolve_parametric(DensityMatrix(mix), 0.4);
  CHECK(std::abs(out.matrix().trace() - 1.0) < 1e-9);
  CHECK((out.matrix() - out.matrix().adjoint()).norm() < 1e-9);
}

TEST_CASE("truncation is detected") {
  CHECK_THROWS_AS(evolve_parametric(fock_state(0, 16), 1.5), TruncationError);
}

TEST_CASE("Q variance is operator variance plus one") {
  const int dim = 64;
  std::vector<Vector> states{coherent_state({0.4, 0.3}, dim),
                             evolve_parametric(fock_state(0, dim), 0.3),
                             evolve_parametric(coherent_state({-0.2, 0.5}, dim), -0.4)};
  for (const auto& psi : states) {
    const auto op = quadrature_moments(psi);
    const auto q = husimi_moments(psi, -6, 6, -6, 6, 301);
    CHECK(4 * q.var_x == doctest::Approx(op.var_q + 1).epsilon(1e-6));
    CHECK(4 * q.var_p == doctest::Approx(op.var_p + 1).epsilon(1e-6));
    CHECK(2 * q.mean_x == doctest::Approx(op.mean_q).epsilon(1e-6));
  }
}

TEST_CASE("qubit meter evolution") {
  const int dim = 64;
  const double g = 2.0;
  const Vector meter = coherent_state(ComplexAmplitude(Complex(0, -g)), dim);
  const auto spin = SpinState::equal_superposition();
  const Vector joint = qubit_meter_state(spin, meter);
  CHECK((evolve_qubit_meter(joint, 0.0) - joint).norm() == 0.0);

  const auto branches = meter_branches(evolve_qubit_meter(spin, meter, kPi));
  const double s = 1 / std::sqrt(2.0);
  const auto up = quadrature_moments(branches[0] / s);
  const auto down = quadrature_moments(branches[1] / s);
  CHECK(up.mean_q == doctest::Approx(2 * g).epsilon(1e-10));
  CHECK(down.mean_q == doctest::Approx(-2 * g).epsilon(1e-10));
  CHECK(std::abs(up.mean_p) < 1e-10);
  CHECK(std::abs(branches[0].dot(coherent_state({g, 0}, dim))) == doctest::Approx(s).epsilon(1e-10));
  CHECK(std::abs(branches[1].dot(coherent_state({-g, 0}, dim))) == doctest::Approx(s).epsilon(1e-10));

  // sigma_z is conserved
  const auto r = reduced_spin(evolve_qubit_meter(SpinState(1.0, 0.0), meter, 1.3));
  CHECK(std::abs(r(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(r(1, 1)) < 1e-12);
}

TEST_CASE("bosonic identities") {
  const Complex alpha(0.5, 0.3);
  CHECK(verify_bosonic_identity(BosonicIdentity::Annihilation, alpha, 30) < 1e-10);
  CHECK(verify_bosonic_identity(BosonicIdentity::Creation, alpha, 30) < 1e-6);
  CHECK(verify_bosonic_identity(BosonicIdentity::Annihilation, 0.0, 30) < 1e-12);
  CHECK(verify_bosonic_identity(BosonicIdentity::RightAnnihilation, alpha, 30) < 1e-6);
  CHECK(verify_bosonic_identity(BosonicIdentity::RightCreation, alpha, 30) < 1e-10);
  CHECK(verify_bosonic_identity(BosonicIdentity::NumberLog, alpha, 30) < 1e-6);
}

TEST_CASE("identity names round trip") {
  for (auto id : {BosonicIdentity::Annihilation, BosonicIdentity::Creation,
                  BosonicIdentity::RightAnnihilation, BosonicIdentity::RightCreation,
                  BosonicIdentity::NumberLog}) {
    CHECK(parse_identity(to_string(id)) == id);
  }
  CHECK(to_string(BosonicIdentity::Creation) == "a_dagger");
  CHECK_THROWS(parse_identity("b"));
}

TEST_CASE("spin identities") {
  CHECK(verify_spin_identity(1.0) < 1e-6);
  CHECK(verify_spin_identity(Complex(0.3, -0.7)) < 1e-6);
  CHECK(verify_spin_identity(0.0) < 1e-6);
  CHECK(verify_spin_log_identity(Complex(0.2, 0.9)) < 1e-6);
  CHECK(verify_spin_log_identity(Complex(-1.1, 2.5)) < 1e-6);
}

TEST_CASE("identity suite") {
  const auto checks = run_identity_suite(30, 20, 1234);
  CHECK(checks.size() == 20 * 7);
  for (const auto& c : checks) CHECK(c.error < 1e-6);
}
