#include "iontrap/spin_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "iontrap/errors.hpp"

namespace iontrap {

namespace {

using Complex = std::complex<double>;

// sigma^z of spin j in basis state idx: bit clear = up = +1.
inline double spin_z(std::size_t idx, int j) {
  return ((idx >> j) & 1u) ? -1.0 : 1.0;
}

class SpinHamiltonian {
 public:
  SpinHamiltonian(const Eigen::MatrixXd& couplings, double b_transverse)
      : n_(static_cast<int>(couplings.rows())),
        dim_(std::size_t{1} << n_),
        b_(b_transverse),
        diagonal_(static_cast<Eigen::Index>(dim_)) {
    const double inv_n = 1.0 / static_cast<double>(n_);
    for (std::size_t idx = 0; idx < dim_; ++idx) {
      double energy = 0.0;
      for (int i = 0; i < n_; ++i) {
        const double zi = spin_z(idx, i);
        for (int j = i + 1; j < n_; ++j) {
          energy += couplings(i, j) * zi * spin_z(idx, j);
        }
      }
      diagonal_(static_cast<Eigen::Index>(idx)) = inv_n * energy;
    }
  }

  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
    const Eigen::Index dim = in.size();
    out.resize(dim);
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
      out(idx) = diagonal_(idx) * in(idx);
    }
    if (b_ != 0.0) {
      const double half_b = 0.5 * b_;
      for (int j = 0; j < n_; ++j) {
        const std::size_t bit = std::size_t{1} << j;
        for (std::size_t idx = 0; idx < dim_; ++idx) {
          out(static_cast<Eigen::Index>(idx)) +=
              half_b * in(static_cast<Eigen::Index>(idx ^ bit));
        }
      }
    }
  }

  double norm_bound() const {
    return diagonal_.cwiseAbs().maxCoeff() + 0.5 * std::abs(b_) * n_;
  }

  std::size_t dimension() const { return dim_; }

 private:
  int n_;
  std::size_t dim_;
  double b_;
  Eigen::VectorXd diagonal_;
};

// One Lanczos step of exp(-i H dt) applied to psi. Full reorthogonalization
// keeps the Krylov basis orthonormal, so the propagation stays unitary up to
// rounding.
void lanczos_expm(const SpinHamiltonian& h, double dt, int krylov_dim,
                  Eigen::VectorXcd& psi) {
  const Eigen::Index dim = psi.size();
  const int m_max = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(krylov_dim), h.dimension()));
  const double norm0 = psi.norm();

  Eigen::MatrixXcd basis(dim, m_max);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m_max);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(m_max);
  basis.col(0) = psi / norm0;

  Eigen::VectorXcd v(dim), w(dim);
  int m_used = m_max;
  for (int k = 0; k < m_max; ++k) {
    v = basis.col(k);
    h.apply(v, w);
    alpha(k) = std::real(v.dot(w));
    w -= alpha(k) * v;
    if (k > 0) w -= beta(k - 1) * basis.col(k - 1);
    for (int i = 0; i <= k; ++i) {
      const Complex overlap = basis.col(i).dot(w);
      w -= overlap * basis.col(i);
    }
    if (k + 1 == m_max) break;
    beta(k) = w.norm();
    if (beta(k) < 1e-14 * std::max(1.0, h.norm_bound())) {
      m_used = k + 1;  // invariant subspace found; exact within it
      break;
    }
    basis.col(k + 1) = w / beta(k);
  }

  Eigen::MatrixXd tridiag = Eigen::MatrixXd::Zero(m_used, m_used);
  for (int k = 0; k < m_used; ++k) {
    tridiag(k, k) = alpha(k);
    if (k + 1 < m_used) {
      tridiag(k, k + 1) = beta(k);
      tridiag(k + 1, k) = beta(k);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tridiag);
  const Eigen::VectorXd& eigenvalues = solver.eigenvalues();
  const Eigen::MatrixXcd u = solver.eigenvectors().cast<Complex>();

  Eigen::VectorXcd phases(m_used);
  for (int k = 0; k < m_used; ++k) {
    phases(k) = std::exp(Complex(0.0, -eigenvalues(k) * dt));
  }
  const Eigen::VectorXcd coefficients = u * phases.cwiseProduct(u.row(0).transpose());
  psi.noalias() = basis.leftCols(m_used) * (norm0 * coefficients);
}

void propagate(const SpinHamiltonian& h, double dt, const EvolveOptions& options,
               Eigen::VectorXcd& psi) {
  if (dt == 0.0) return;
  const double phase = std::abs(dt) * h.norm_bound();
  const int substeps =
      std::max(1, static_cast<int>(std::ceil(phase / options.max_phase_per_step)));
  const double sub_dt = dt / substeps;
  for (int s = 0; s < substeps; ++s) {
    lanczos_expm(h, sub_dt, options.krylov_dimension, psi);
  }
}

Eigen::VectorXcd product_state(int n, double theta) {
  const std::size_t dim = std::size_t{1} << n;
  const double up = std::cos(0.5 * theta);
  const double down = std::sin(0.5 * theta);
  Eigen::VectorXcd psi(static_cast<Eigen::Index>(dim));
  for (std::size_t idx = 0; idx < dim; ++idx) {
    double amplitude = 1.0;
    for (int j = 0; j < n; ++j) {
      amplitude *= ((idx >> j) & 1u) ? down : up;
    }
    psi(static_cast<Eigen::Index>(idx)) = amplitude;
  }
  return psi;
}

// <sigma^y psi>(idx) = (bit set ? +i : -i) psi(idx ^ bit); taking real parts
// of conj(psi) * (...) gives -+ cross.imag() accordingly.
void measure(const Eigen::VectorXcd& psi, int n, Eigen::VectorXd& sx, Eigen::VectorXd& sy,
             Eigen::VectorXd& sz) {
  const std::size_t dim = static_cast<std::size_t>(psi.size());
  sx.resize(n);
  sy.resize(n);
  sz.resize(n);
  for (int j = 0; j < n; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    double x = 0.0, y = 0.0, z = 0.0;
    for (std::size_t idx = 0; idx < dim; ++idx) {
      const Complex amp = psi(static_cast<Eigen::Index>(idx));
      const Complex cross = std::conj(amp) * psi(static_cast<Eigen::Index>(idx ^ bit));
      x += cross.real();
      y += (idx & bit) ? -cross.imag() : cross.imag();
      z += spin_z(idx, j) * std::norm(amp);
    }
    sx(j) = x;
    sy(j) = y;
    sz(j) = z;
  }
}

}  // namespace

Eigen::VectorXd mean_field_field(const CouplingMatrix& cm,
                                 const Eigen::VectorXd& z_expectations) {
  const Eigen::Index n = cm.j.rows();
  if (z_expectations.size() != n) {
    throw std::invalid_argument("mean_field_field: expectation vector size mismatch");
  }
  if ((z_expectations.cwiseAbs().array() > 1.0 + 1e-12).any()) {
    throw std::invalid_argument("mean_field_field: |<sigma^z>| must not exceed 1");
  }
  return (2.0 / static_cast<double>(n)) * (cm.j * z_expectations);
}

Eigen::MatrixXd analytic_depolarization(const CouplingMatrix& cm,
                                        std::span<const double> times, double theta) {
  if (std::abs(theta - 0.5 * std::numbers::pi) > 1e-9) {
    throw UnsupportedPreparationError(
        "analytic_depolarization: closed form requires theta = pi/2");
  }
  const Eigen::Index n = cm.j.rows();
  Eigen::MatrixXd sx(static_cast<Eigen::Index>(times.size()), n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t t = 0; t < times.size(); ++t) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double product = 1.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == j) continue;
        product *= std::cos(2.0 * cm.j(j, k) * times[t] * inv_n);
      }
      sx(static_cast<Eigen::Index>(t), j) = product;
    }
  }
  return sx;
}

EvolveResult exact_evolve(const CouplingMatrix& cm, double b_transverse, double theta,
                          std::span<const double> times, const EvolveOptions& options) {
  const int n = static_cast<int>(cm.j.rows());
  if (n < 1) throw std::invalid_argument("exact_evolve: need at least one spin");
  if (n > options.max_spins) {
    std::ostringstream msg;
    msg << "exact_evolve: " << n << " spins above the cap of " << options.max_spins;
    throw SizeCapError(msg.str());
  }
  for (double t : times) {
    if (!std::isfinite(t)) throw std::invalid_argument("exact_evolve: times must be finite");
  }

  const SpinHamiltonian h(cm.j, b_transverse);
  Eigen::VectorXcd psi = product_state(n, theta);

  EvolveResult result;
  result.times.assign(times.begin(), times.end());
  const Eigen::Index count = static_cast<Eigen::Index>(times.size());
  result.sx.resize(count, n);
  result.sy.resize(count, n);
  result.sz.resize(count, n);

  Eigen::VectorXd sx, sy, sz;
  double t_current = 0.0;
  for (Eigen::Index row = 0; row < count; ++row) {
    propagate(h, times[static_cast<std::size_t>(row)] - t_current, options, psi);
    t_current = times[static_cast<std::size_t>(row)];
    const double drift = std::abs(psi.norm() - 1.0);
    result.max_norm_drift = std::max(result.max_norm_drift, drift);
    if (drift > options.norm_drift_tolerance) {
      std::ostringstream msg;
      msg << "exact_evolve: norm drift " << drift << " beyond "
          << options.norm_drift_tolerance << " at t = " << t_current;
      throw Error(msg.str());
    }
    measure(psi, n, sx, sy, sz);
    result.sx.row(row) = sx.transpose();
    result.sy.row(row) = sy.transpose();
    result.sz.row(row) = sz.transpose();
  }
  result.sx_mean = result.sx.rowwise().mean();
  result.sy_mean = result.sy.rowwise().mean();
  result.sz_mean = result.sz.rowwise().mean();
  return result;
}

std::vector<double> excess_precession_curve(const CouplingMatrix& cm,
                                            std::span<const double> thetas) {
  const Eigen::Index n = cm.j.rows();
  std::vector<double> rates;
  rates.reserve(thetas.size());
  for (double theta : thetas) {
    const Eigen::VectorXd field =
        mean_field_field(cm, Eigen::VectorXd::Constant(n, std::cos(theta)));
    rates.push_back(field.mean());
  }
  return rates;
}

}  // namespace iontrap
