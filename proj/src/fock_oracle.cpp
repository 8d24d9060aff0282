#include "qflow/fock_oracle.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

namespace qflow::fock {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

void require_dim(int dim) {
  if (dim < 1) throw std::invalid_argument("Fock dimension must be positive");
}

std::vector<double> trapezoid_weights(double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("trapezoid needs at least two points");
  const double h = (hi - lo) / (n - 1);
  std::vector<double> w(static_cast<std::size_t>(n), h);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

double grid_point(double lo, double hi, int n, int i) {
  return lo + (hi - lo) * static_cast<double>(i) / (n - 1);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// u_n(alpha) = alpha^n / sqrt(n!)
Vector analytic_coefficients(Complex alpha, int dim) {
  Vector u(dim);
  u(0) = 1.0;
  for (int n = 1; n < dim; ++n) u(n) = u(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return u;
}

// |alpha><alpha| with alpha, beta = alpha* independent.
Matrix projector(Complex alpha, Complex beta, int dim) {
  return std::exp(-alpha * beta) * analytic_coefficients(alpha, dim) *
         analytic_coefficients(beta, dim).transpose();
}

template <class F>
Matrix richardson_derivative(F&& f, Complex at, double h) {
  const auto central = [&](double step) {
    return Matrix((f(at + step) - f(at - step)) / (2.0 * step));
  };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TruncationError::TruncationError(const std::string& what, double tail_)
    : std::runtime_error(what + " (tail norm " + std::to_string(tail_) + ")"), tail(tail_) {}

Matrix annihilation(int dim) {
  require_dim(dim);
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix creation(int dim) { return annihilation(dim).adjoint(); }

Matrix number(int dim) {
  require_dim(dim);
  Matrix n = Matrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

Matrix identity(int dim) { return Matrix::Identity(dim, dim); }

Matrix operator_matrix(const OperatorExpr& e, int dim, int n_modes) {
  if (n_modes < 1 || n_modes > kMaxModes) throw std::invalid_argument("unsupported mode count");
  if (e.max_mode() >= n_modes) throw std::invalid_argument("expression uses more modes than requested");
  const Matrix a = annihilation(dim);
  const Matrix id = identity(dim);
  std::array<Matrix, kMaxModes> ann;
  for (int k = 0; k < n_modes; ++k) {
    Matrix op = k == 0 ? a : id;
    for (int j = 1; j < n_modes; ++j) op = kron(op, j == k ? a : id);
    ann[k] = op;
  }
  const Eigen::Index total = ann[0].rows();
  Matrix out = Matrix::Zero(total, total);
  for (const auto& t : e.terms()) {
    Matrix prod = Matrix::Identity(total, total);
    for (const auto& op : t.word) {
      prod = prod * (op.dagger ? Matrix(ann[op.mode].adjoint()) : ann[op.mode]);
    }
    out += Complex(t.coeff.re.to_double(), t.coeff.im.to_double()) * prod;
  }
  return out;
}

Vector coherent_coefficients(Complex alpha, int dim) {
  require_dim(dim);
  return std::exp(-0.5 * std::norm(alpha)) * analytic_coefficients(alpha, dim);
}

Vector coherent_state(ComplexAmplitude alpha, int dim, double tail_tolerance) {
  Vector c = coherent_coefficients(alpha.value(), dim);
  const double kept = c.squaredNorm();
  const double tail = std::max(0.0, 1.0 - kept);
  if (tail > tail_tolerance) {
    throw TruncationError("coherent state does not fit in " + std::to_string(dim) + " levels", tail);
  }
  return c / std::sqrt(kept);
}

Vector fock_state(int n, int dim) {
  require_dim(dim);
  if (n < 0 || n >= dim) throw std::out_of_range("Fock level outside truncation");
  Vector v = Vector::Zero(dim);
  v(n) = 1.0;
  return v;
}

double tail_weight(const Vector& psi, int dim) {
  const int start = dim - std::max(1, dim / 8);
  double w = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if (static_cast<int>(i % dim) >= start) w += std::norm(psi(i));
  }
  return w;
}

DensityMatrix::DensityMatrix(Matrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
    throw std::invalid_argument("density matrix must be square and non-empty");
  }
  if (max_abs(rho_ - rho_.adjoint()) > 1e-12) throw std::invalid_argument("density matrix not Hermitian");
  if (std::abs(rho_.trace() - Complex(1.0)) > 1e-10) throw std::invalid_argument("density matrix trace != 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) throw std::invalid_argument("density matrix not positive");
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const Vector n = psi / psi.norm();
  return DensityMatrix(n * n.adjoint());
}

SpinState::SpinState(Complex up_, Complex down_) : up(up_), down(down_) {
  const double norm = std::norm(up) + std::norm(down);
  if (std::abs(norm - 1.0) > 1e-12) throw std::invalid_argument("spin state not normalized");
}

SpinState SpinState::equal_superposition() {
  const double s = 1.0 / std::sqrt(2.0);
  return {s, s};
}

double husimi_q(const DensityMatrix& rho, ComplexAmplitude alpha) {
  const Vector c = coherent_coefficients(alpha.value(), rho.dim());
  const double q = (c.adjoint() * rho.matrix() * c)(0, 0).real() / kPi;
  return q;
}

double husimi_q(const Vector& psi, ComplexAmplitude alpha) {
  const Vector c = coherent_coefficients(alpha.value(), static_cast<int>(psi.size()));
  return std::norm(c.dot(psi)) / kPi;
}

Matrix unitary_from_hermitian(const Matrix& h, double tau) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Eigen::VectorXd& lambda = es.eigenvalues();
  Vector phases(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) phases(k) = std::exp(-kI * lambda(k) * tau);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix parametric_hamiltonian(int dim) {
  const Matrix a = annihilation(dim);
  const Matrix ad = a.adjoint();
  return 0.5 * kI * (ad * ad - a * a);
}

Vector evolve_parametric(const Vector& psi, double tau, double tail_tolerance) {
  const int dim = static_cast<int>(psi.size());
  if (tau == 0.0) return psi;
  Vector out = unitary_from_hermitian(parametric_hamiltonian(dim), tau) * psi;
  const double tail = tail_weight(out, dim);
  if (tail > tail_tolerance) {
    throw TruncationError("amplified state exceeds " + std::to_string(dim) + " levels", tail);
  }
  return out;
}

DensityMatrix evolve_parametric(const DensityMatrix& rho, double tau, double tail_tolerance) {
  if (tau == 0.0) return rho;
  const int dim = rho.dim();
  const Matrix u = unitary_from_hermitian(parametric_hamiltonian(dim), tau);
  Matrix out = u * rho.matrix() * u.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  double tail = 0.0;
  for (int n = dim - std::max(1, dim / 8); n < dim; ++n) tail += out(n, n).real();
  if (tail > tail_tolerance) {
    throw TruncationError("amplified state exceeds " + std::to_string(dim) + " levels", tail);
  }
  return DensityMatrix(out);
}

Vector qubit_meter_state(const SpinState& spin, const Vector& meter) {
  const Eigen::Index dim = meter.size();
  Vector joint(2 * dim);
  joint.head(dim) = spin.up * meter;
  joint.tail(dim) = spin.down * meter;
  return joint;
}

Vector evolve_qubit_meter(const Vector& joint, double tau) {
  const Eigen::Index dim = joint.size() / 2;
  Vector out = joint;
  for (Eigen::Index n = 0; n < dim; ++n) {
    const Complex phase = std::exp(kI * (0.5 * tau * static_cast<double>(n)));
    out(n) *= phase;
    out(dim + n) *= std::conj(phase);
  }
  return out;
}

Vector evolve_qubit_meter(const SpinState& spin, const Vector& meter, double tau) {
  return evolve_qubit_meter(qubit_meter_state(spin, meter), tau);
}

Eigen::Matrix2cd reduced_spin(const Vector& joint) {
  const Eigen::Index dim = joint.size() / 2;
  const auto up = joint.head(dim);
  const auto down = joint.tail(dim);
  Eigen::Matrix2cd r;
  r(0, 0) = up.squaredNorm();
  r(1, 1) = down.squaredNorm();
  r(0, 1) = down.dot(up);  // sum up_n conj(down_n)
  r(1, 0) = std::conj(r(0, 1));
  return r;
}

std::vector<Vector> meter_branches(const Vector& joint) {
  const Eigen::Index dim = joint.size() / 2;
  return {joint.head(dim), joint.tail(dim)};
}

OperatorMoments quadrature_moments(const Vector& psi) {
  const int dim = static_cast<int>(psi.size());
  const Matrix a = annihilation(dim);
  const Matrix q = a + a.adjoint();
  const Matrix p = (a - a.adjoint()) / kI;
  const auto expect = [&](const Matrix& m) { return psi.dot(m * psi).real(); };
  OperatorMoments m;
  m.mean_q = expect(q);
  m.mean_p = expect(p);
  m.var_q = expect(q * q) - m.mean_q * m.mean_q;
  m.var_p = expect(p * p) - m.mean_p * m.mean_p;
  return m;
}

namespace {

template <class QFn>
QMoments integrate_moments(QFn&& q, double x_lo, double x_hi, double p_lo, double p_hi, int n) {
  const auto wx = trapezoid_weights(x_lo, x_hi, n);
  const auto wp = trapezoid_weights(p_lo, p_hi, n);
  double m0 = 0, mx = 0, mp = 0, mxx = 0, mpp = 0;
  for (int i = 0; i < n; ++i) {
    const double x = grid_point(x_lo, x_hi, n, i);
    for (int j = 0; j < n; ++j) {
      const double p = grid_point(p_lo, p_hi, n, j);
      const double w = wx[i] * wp[j] * q(ComplexAmplitude(x, p));
      m0 += w;
      mx += w * x;
      mp += w * p;
      mxx += w * x * x;
      mpp += w * p * p;
    }
  }
  QMoments out;
  out.mass = m0;
  out.mean_x = mx / m0;
  out.mean_p = mp / m0;
  out.var_x = mxx / m0 - out.mean_x * out.mean_x;
  out.var_p = mpp / m0 - out.mean_p * out.mean_p;
  return out;
}

}  // namespace

QMoments husimi_moments(const Vector& psi, double x_lo, double x_hi, double p_lo, double p_hi,
                        int n_points) {
  return integrate_moments([&](ComplexAmplitude a) { return husimi_q(psi, a); }, x_lo, x_hi,
                           p_lo, p_hi, n_points);
}

QMoments husimi_moments(const DensityMatrix& rho, double x_lo, double x_hi, double p_lo,
                        double p_hi, int n_points) {
  return integrate_moments([&](ComplexAmplitude a) { return husimi_q(rho, a); }, x_lo, x_hi,
                           p_lo, p_hi, n_points);
}

double husimi_x_marginal(const std::vector<Vector>& meters, double x, double p_lo, double p_hi,
                         int n_points) {
  const auto w = trapezoid_weights(p_lo, p_hi, n_points);
  double sum = 0.0;
  for (int j = 0; j < n_points; ++j) {
    const ComplexAmplitude alpha(x, grid_point(p_lo, p_hi, n_points, j));
    double q = 0.0;
    for (const auto& m : meters) q += husimi_q(m, alpha);
    sum += w[j] * q;
  }
  return sum;
}

Vector singlet_meter_state(double gain, int dim) {
  const Vector meter = coherent_state(ComplexAmplitude(Complex(gain, 0.0) / kI), dim);
  const Vector pair = kron(meter, meter);
  const Eigen::Index block = pair.size();
  Vector state = Vector::Zero(4 * block);
  const double s = 1.0 / std::sqrt(2.0);
  state.segment(1 * block, block) = s * pair;   // up_A down_B
  state.segment(2 * block, block) = -s * pair;  // down_A up_B
  return state;
}

Eigen::Vector2cd spin_eigenvector(double theta, int sign) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  Eigen::Vector2cd v;
  if (sign > 0) v << c, s;
  else v << -s, c;
  return v;
}

namespace {

// Component of `state` along spin product vA (x) vB, as a Fock block.
Vector spin_component(const Vector& state, const Eigen::Vector2cd& va, const Eigen::Vector2cd& vb,
                      Eigen::Index block) {
  Vector out = Vector::Zero(block);
  for (int sa = 0; sa < 2; ++sa) {
    for (int sb = 0; sb < 2; ++sb) {
      out += std::conj(va(sa)) * std::conj(vb(sb)) * state.segment((sa * 2 + sb) * block, block);
    }
  }
  return out;
}

}  // namespace

Vector evolve_two_site_meters(const Vector& state, double theta, double phi, double tau, int dim) {
  const Eigen::Index block = static_cast<Eigen::Index>(dim) * dim;
  if (state.size() != 4 * block) throw std::invalid_argument("two-site state has wrong size");
  Vector out = Vector::Zero(state.size());
  for (int a : {1, -1}) {
    for (int b : {1, -1}) {
      const auto va = spin_eigenvector(theta, a);
      const auto vb = spin_eigenvector(phi, b);
      Vector fockpart = spin_component(state, va, vb, block);
      for (int na = 0; na < dim; ++na) {
        for (int nb = 0; nb < dim; ++nb) {
          fockpart(na * dim + nb) *= std::exp(kI * (tau * (a * na + b * nb)));
        }
      }
      for (int sa = 0; sa < 2; ++sa) {
        for (int sb = 0; sb < 2; ++sb) {
          out.segment((sa * 2 + sb) * block, block) += va(sa) * vb(sb) * fockpart;
        }
      }
    }
  }
  return out;
}

std::array<std::array<double, 2>, 2> branch_weights(const Vector& state, double theta,
                                                    double phi, int dim) {
  const Eigen::Index block = static_cast<Eigen::Index>(dim) * dim;
  std::array<std::array<double, 2>, 2> w{};
  for (int a : {1, -1}) {
    for (int b : {1, -1}) {
      w[a < 0][b < 0] = spin_component(state, spin_eigenvector(theta, a),
                                       spin_eigenvector(phi, b), block)
                            .squaredNorm();
    }
  }
  return w;
}

Eigen::MatrixXd two_meter_x_marginal(const Vector& state, int dim,
                                     const std::vector<double>& x_a,
                                     const std::vector<double>& x_b, double p_lo, double p_hi,
                                     int n_p) {
  const Eigen::Index block = static_cast<Eigen::Index>(dim) * dim;
  const auto wp = trapezoid_weights(p_lo, p_hi, n_p);
  // columns: conj coherent coefficients on the (x, p) grid, x slow
  const auto grid_vectors = [&](const std::vector<double>& xs) {
    Matrix v(dim, static_cast<Eigen::Index>(xs.size()) * n_p);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (int j = 0; j < n_p; ++j) {
        v.col(static_cast<Eigen::Index>(i) * n_p + j) =
            coherent_coefficients(Complex(xs[i], grid_point(p_lo, p_hi, n_p, j)), dim).conjugate();
      }
    }
    return v;
  };
  const Matrix va = grid_vectors(x_a);
  const Matrix vb = grid_vectors(x_b);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(va.cols(), vb.cols());
  for (int s = 0; s < 4; ++s) {
    // block element (nA, nB) sits at nA*dim + nB: column-major map is B^T
    const Eigen::Map<const Matrix> bt(state.data() + s * block, dim, dim);
    const Matrix amp = va.transpose() * bt.transpose() * vb;
    q += amp.cwiseAbs2();
  }
  q /= kPi * kPi;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x_a.size()),
                                              static_cast<Eigen::Index>(x_b.size()));
  for (std::size_t i = 0; i < x_a.size(); ++i) {
    for (std::size_t k = 0; k < x_b.size(); ++k) {
      double sum = 0.0;
      for (int j = 0; j < n_p; ++j) {
        for (int l = 0; l < n_p; ++l) {
          sum += wp[j] * wp[l] *
                 q(static_cast<Eigen::Index>(i) * n_p + j, static_cast<Eigen::Index>(k) * n_p + l);
        }
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = sum;
    }
  }
  return out;
}

std::string to_string(BosonicIdentity id) {
  switch (id) {
    case BosonicIdentity::Annihilation: return "a";
    case BosonicIdentity::Creation: return "a_dagger";
    case BosonicIdentity::RightAnnihilation: return "a_right";
    case BosonicIdentity::RightCreation: return "a_dagger_right";
    case BosonicIdentity::NumberLog: return "n_log";
  }
  return "?";
}

BosonicIdentity parse_identity(const std::string& name) {
  for (auto id : {BosonicIdentity::Annihilation, BosonicIdentity::Creation,
                  BosonicIdentity::RightAnnihilation, BosonicIdentity::RightCreation,
                  BosonicIdentity::NumberLog}) {
    if (to_string(id) == name) return id;
  }
  throw std::invalid_argument("unknown identity '" + name + "'");
}

double verify_bosonic_identity(BosonicIdentity id, Complex alpha, int dim, double h) {
  if (dim < 2) throw std::invalid_argument("identity check needs dim >= 2");
  const Complex beta = std::conj(alpha);
  const Matrix a = annihilation(dim);
  const Matrix ad = a.adjoint();
  const Matrix lambda = projector(alpha, beta, dim);
  switch (id) {
    case BosonicIdentity::Annihilation: {
      // row dim-1 of a*L needs the discarded level dim
      const Matrix diff = a * lambda - alpha * lambda;
      return max_abs(diff.topRows(dim - 1));
    }
    case BosonicIdentity::Creation: {
      const Matrix d = richardson_derivative([&](Complex x) { return projector(x, beta, dim); },
                                             alpha, h);
      return max_abs(ad * lambda - (d + beta * lambda));
    }
    case BosonicIdentity::RightAnnihilation: {
      const Matrix d = richardson_derivative([&](Complex y) { return projector(alpha, y, dim); },
                                             beta, h);
      return max_abs(lambda * a - (d + alpha * lambda));
    }
    case BosonicIdentity::RightCreation: {
      const Matrix diff = lambda * ad - beta * lambda;
      return max_abs(diff.leftCols(dim - 1));
    }
    case BosonicIdentity::NumberLog: {
      // L_phi = (alpha beta / pi) |alpha><alpha|, d_phi = alpha d_alpha
      const auto l_phi = [&](Complex x) { return Matrix((x * beta / kPi) * projector(x, beta, dim)); };
      const Matrix l = l_phi(alpha);
      const Matrix d = alpha * richardson_derivative(l_phi, alpha, h);
      return max_abs(number(dim) * l - (d + (alpha * beta - 1.0) * l));
    }
  }
  return 0.0;
}

namespace {

// |z><z| with z, w = z* independent; basis (up, down).
Eigen::Matrix2cd spin_projector(Complex z, Complex w) {
  Eigen::Vector2cd ket(z, 1.0);
  Eigen::Vector2cd bra(w, 1.0);
  return ket * bra.transpose() / (1.0 + z * w);
}

Eigen::Matrix2cd sigma_z() {
  Eigen::Matrix2cd s;
  s << 1, 0, 0, -1;
  return s;
}

}  // namespace

double verify_spin_identity(Complex z, double h) {
  const Complex w = std::conj(z);
  const Eigen::Matrix2cd p = spin_projector(z, w);
  const Matrix d = richardson_derivative([&](Complex x) { return Matrix(spin_projector(x, w)); }, z, h);
  const Matrix rhs = 2.0 * z * d + ((z * w - 1.0) / (1.0 + z * w)) * Matrix(p);
  return max_abs(Matrix(sigma_z() * p) - rhs);
}

double verify_spin_log_identity(Complex eta, double h) {
  const Complex w = std::exp(std::conj(eta));
  // L_eta = 2 z w / (pi (1 + z w)^2) |z><z|
  const auto l_eta = [&](Complex e) {
    const Complex z = std::exp(e);
    return Matrix(2.0 * z * w / (kPi * (1.0 + z * w) * (1.0 + z * w)) * spin_projector(z, w));
  };
  const Matrix l = l_eta(eta);
  const Matrix d = richardson_derivative(l_eta, eta, h);
  const double m = 1.5 * std::tanh(eta.real());
  return max_abs(Matrix(sigma_z()) * l - 2.0 * (d + m * l));
}

std::vector<IdentityCheck> run_identity_suite(int dim, int n_points, std::uint64_t seed, double h) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto disk_point = [&](double radius) {
    const double r = radius * std::sqrt(unit(rng));
    const double t = 2.0 * kPi * unit(rng);
    return std::polar(r, t);
  };
  std::vector<IdentityCheck> out;
  for (int k = 0; k < n_points; ++k) {
    const Complex alpha = disk_point(1.0);
    for (auto id : {BosonicIdentity::Annihilation, BosonicIdentity::Creation,
                    BosonicIdentity::RightAnnihilation, BosonicIdentity::RightCreation,
                    BosonicIdentity::NumberLog}) {
      out.push_back({to_string(id), alpha, verify_bosonic_identity(id, alpha, dim, h)});
    }
    const Complex z = disk_point(3.0);
    out.push_back({"sigma_z", z, verify_spin_identity(z, h)});
    const Complex eta = std::log(z);
    out.push_back({"sigma_z_log", eta, verify_spin_log_identity(eta, h)});
  }
  return out;
}

}  // namespace qflow::fock
