#pragma once

// Exact quantum mechanics in a truncated Fock space, optionally tensored
// with one or two qubits. Everything else in qflow is checked against it.
//
// Joint layouts:
//   qubit + meter:        index = s * dim + n            (s = 0 up, 1 down)
//   two qubits + meters:  index = ((sA*2 + sB) * dim + nA) * dim + nB

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qflow/operator_expr.hpp"
#include "qflow/phase_space.hpp"

namespace qflow::fock {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct TruncationError : std::runtime_error {
  TruncationError(const std::string& what, double tail_);
  double tail;
};

Matrix annihilation(int dim);
Matrix creation(int dim);
Matrix number(int dim);
Matrix identity(int dim);

/// Dense matrix of an operator expression on dim^n_modes levels
/// (mode a is the slow index). Products are formed in the truncated space.
Matrix operator_matrix(const OperatorExpr& e, int dim, int n_modes = 1);

/// Exact <n|alpha> = e^{-|alpha|^2/2} alpha^n / sqrt(n!) for n < dim, not renormalized.
Vector coherent_coefficients(Complex alpha, int dim);

/// Normalized, truncated coherent state. Throws TruncationError when the
/// discarded norm exceeds tail_tolerance.
Vector coherent_state(ComplexAmplitude alpha, int dim, double tail_tolerance = 1e-8);

Vector fock_state(int n, int dim);

/// Weight in the top eighth of the Fock levels; a proxy for truncation loss.
double tail_weight(const Vector& psi, int dim);

class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix rho);
  static DensityMatrix pure(const Vector& psi);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const Matrix& matrix() const { return rho_; }

 private:
  Matrix rho_;
};

struct SpinState {
  Complex up = 1.0;
  Complex down = 0.0;

  SpinState() = default;
  SpinState(Complex up_, Complex down_);
  static SpinState equal_superposition();
};

/// Q(alpha) = <alpha|rho|alpha>/pi, using exact coherent amplitudes on the
/// retained levels (exact for any state supported on them).
double husimi_q(const DensityMatrix& rho, ComplexAmplitude alpha);
double husimi_q(const Vector& psi, ComplexAmplitude alpha);

/// exp(-i H tau) for Hermitian H via eigendecomposition.
Matrix unitary_from_hermitian(const Matrix& h, double tau);

/// Hermitian generator (i/2)(adag^2 - a^2) of the parametric amplifier.
Matrix parametric_hamiltonian(int dim);

/// Applies exp(tau (adag^2 - a^2)/2); q-quadrature gains e^tau. Negative tau
/// squeezes q. Throws TruncationError if the result's tail weight > tail_tolerance.
Vector evolve_parametric(const Vector& psi, double tau, double tail_tolerance = 1e-6);
DensityMatrix evolve_parametric(const DensityMatrix& rho, double tau,
                                double tail_tolerance = 1e-6);

/// Spin (x) meter product state.
Vector qubit_meter_state(const SpinState& spin, const Vector& meter);

/// Applies exp(+i tau n sigma_z / 2) to a qubit-meter state. The drive sign
/// makes |up>|G/i> evolve to |up>|G> at tau = pi.
Vector evolve_qubit_meter(const Vector& joint, double tau);
Vector evolve_qubit_meter(const SpinState& spin, const Vector& meter, double tau);

/// Reduced spin density matrix (2x2) of a qubit-meter state.
Eigen::Matrix2cd reduced_spin(const Vector& joint);

struct OperatorMoments {
  double mean_q = 0, mean_p = 0, var_q = 0, var_p = 0;
};

/// Moments of q = a + adag and p = (a - adag)/i.
OperatorMoments quadrature_moments(const Vector& psi);

struct QMoments {
  double mass = 0, mean_x = 0, mean_p = 0, var_x = 0, var_p = 0;
};

/// Trapezoid moments of the Q-function over [x_lo,x_hi] x [p_lo,p_hi]
/// in AmplitudeParts coordinates (alpha = x + i p).
QMoments husimi_moments(const Vector& psi, double x_lo, double x_hi, double p_lo,
                        double p_hi, int n_points);
QMoments husimi_moments(const DensityMatrix& rho, double x_lo, double x_hi, double p_lo,
                        double p_hi, int n_points);

/// Integral of the meter Q-function over p at fixed x = Re(alpha), with the
/// spin traced out. meters holds one Fock vector per orthogonal spin branch.
double husimi_x_marginal(const std::vector<Vector>& meters, double x, double p_lo, double p_hi,
                         int n_points);

/// Spin-up and spin-down meter vectors of a qubit-meter state.
std::vector<Vector> meter_branches(const Vector& joint);

// --- two-site Bell measurement -------------------------------------------

/// (|up,down> - |down,up>)/sqrt2 (x) |G/i>_A |G/i>_B.
Vector singlet_meter_state(double gain, int dim);

/// Eigenvector of sigma_theta = cos(theta) sigma_z + sin(theta) sigma_x with
/// eigenvalue `sign` in the (up, down) basis.
Eigen::Vector2cd spin_eigenvector(double theta, int sign);

/// Applies exp(+i tau (sigma_theta^A n^A + sigma_phi^B n^B)).
Vector evolve_two_site_meters(const Vector& state, double theta, double phi, double tau, int dim);

/// Probability of (sigma_theta^A, sigma_phi^B) = (a, b), indexed [a==-1][b==-1].
std::array<std::array<double, 2>, 2> branch_weights(const Vector& state, double theta,
                                                    double phi, int dim);

/// Joint x-marginal density of both meters (spins traced out) on a grid of
/// (x_A, x_B) points; p integrals use n_p-point trapezoid on [p_lo, p_hi].
Eigen::MatrixXd two_meter_x_marginal(const Vector& state, int dim,
                                     const std::vector<double>& x_a,
                                     const std::vector<double>& x_b, double p_lo, double p_hi,
                                     int n_p);

// --- differential identities ---------------------------------------------

enum class BosonicIdentity {
  Annihilation,       // a L = alpha L
  Creation,           // adag L = (d_alpha + alpha*) L
  RightAnnihilation,  // L a = (d_alpha* + alpha) L
  RightCreation,      // L adag = alpha* L
  NumberLog,          // n L_phi = (d_phi + e^{2 phi'} - 1) L_phi,  alpha = e^phi
};

std::string to_string(BosonicIdentity id);
BosonicIdentity parse_identity(const std::string& name);

/// Max elementwise |lhs - rhs| with alpha and alpha* as independent variables
/// and derivatives by Richardson-extrapolated central differences of step h.
double verify_bosonic_identity(BosonicIdentity id, Complex alpha, int dim, double h = 1e-4);

/// sigma_z |z><z| = [2 z d_z + (z z* - 1)/(1 + z z*)] |z><z| for the SU(2)
/// coherent state |z> = exp(z sigma+)|down>/sqrt(1+|z|^2).
double verify_spin_identity(Complex z, double h = 1e-4);

/// sigma_z L_eta = 2[d_eta + (3/2) tanh(eta')] L_eta with z = e^eta.
double verify_spin_log_identity(Complex eta, double h = 1e-4);

struct IdentityCheck {
  std::string name;
  Complex point;
  double error;
};

/// Every identity at n_points random points (|alpha| <= 1, |z| <= 3).
std::vector<IdentityCheck> run_identity_suite(int dim, int n_points, std::uint64_t seed,
                                              double h = 1e-4);

}  // namespace qflow::fock
