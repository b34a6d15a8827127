#include "chiralcat/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace chiralcat {

void PhysicalParams::validate() const {
  if (!(refractive_index > 1.0)) throw std::invalid_argument("refractive index must exceed 1");
  if (!(radius_m > 0.0)) throw std::invalid_argument("radius must be positive");
  if (!(wavelength_m > 0.0)) throw std::invalid_argument("wavelength must be positive");
  if (!(omega_rad_s >= 0.0)) throw std::invalid_argument("rotation rate must be non-negative");
}

double PhysicalParams::cavity_frequency() const {
  return 2.0 * kPi * kSpeedOfLight / wavelength_m;
}

namespace {

// Delta_sag / Omega
double sagnac_per_rotation(const PhysicalParams& p) {
  const double n = p.refractive_index;
  const double dispersion = 1.0 - 1.0 / (n * n) - (p.wavelength_m / n) * p.dn_dlambda;
  return n * p.radius_m * p.cavity_frequency() / PhysicalParams::kSpeedOfLight * dispersion;
}

}  // namespace

double sagnac_shift(const PhysicalParams& p) {
  p.validate();
  return sagnac_per_rotation(p) * p.omega_rad_s;
}

double required_rotation(double shift_rad_s, const PhysicalParams& p) {
  PhysicalParams q = p;
  q.omega_rad_s = 0.0;
  q.validate();
  const double per = sagnac_per_rotation(q);
  if (per == 0.0) throw DegenerateDetuning("resonator has no Sagnac response");
  return shift_rad_s / per;
}

void SystemParams::validate() const {
  // J = 0 is accepted as the decoupled limit.
  if (!(J >= 0.0)) throw std::invalid_argument("coupling J must be non-negative");
  if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be non-negative");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
  if (!std::isfinite(delta) || !std::isfinite(delta_sag) || !std::isfinite(std::abs(alpha))) {
    throw std::invalid_argument("system parameters must be finite");
  }
}

StarkRates stark_rates(const SystemParams& s) {
  if (s.delta_cw() == 0.0 || s.delta_ccw() == 0.0) {
    std::ostringstream msg;
    msg << "degenerate detuning: Delta_CW = " << s.delta_cw()
        << ", Delta_CCW = " << s.delta_ccw();
    throw DegenerateDetuning(msg.str());
  }
  const double j2 = s.J * s.J;
  return {j2 / s.delta_cw(), j2 / s.delta_ccw()};
}

DispersiveReport dispersive_check(const SystemParams& s, double threshold) {
  DispersiveReport r;
  r.threshold = threshold;
  const StarkRates z = stark_rates(s);
  const double j2 = s.J * s.J;
  r.mixing_ratio_cw = j2 * s.trunc.n_cw() / (s.delta_cw() * s.delta_cw());
  r.mixing_ratio_ccw = j2 * s.trunc.n_ccw() / (s.delta_ccw() * s.delta_ccw());
  if (s.delta_sag != 0.0) {
    r.sagnac_ratio_cw = std::abs(z.cw / (4.0 * s.delta_sag));
    r.sagnac_ratio_ccw = std::abs(z.ccw / (4.0 * s.delta_sag));
  }
  r.pass = r.sagnac_ratio_cw && r.sagnac_ratio_ccw &&
           *r.sagnac_ratio_cw < threshold && *r.sagnac_ratio_ccw < threshold &&
           r.mixing_ratio_cw < threshold && r.mixing_ratio_ccw < threshold;
  return r;
}

double cat_time(const SystemParams& s) {
  const StarkRates z = stark_rates(s);
  if (!(z.cw > 0.0)) throw DegenerateDetuning("cat time needs zeta_CW > 0");
  return kPi / (2.0 * z.cw);
}

// ---------------------------------------------------------------------------

HermitianOperator::HermitianOperator(Truncation trunc, CMatrix matrix)
    : trunc_(trunc), matrix_(std::move(matrix)) {
  if (matrix_.rows() != trunc_.dim() || matrix_.cols() != trunc_.dim()) {
    throw DimensionMismatch("operator does not match truncation");
  }
}

double HermitianOperator::hermiticity_error() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

// sum_eps Delta_eps n_eps, identical on both atomic blocks.
CMatrix free_field(const SystemParams& s) {
  const Truncation& t = s.trunc;
  CMatrix h = CMatrix::Zero(t.dim(), t.dim());
  for (int i = 0; i < t.dim(); ++i) {
    const auto [w, m, k] = t.deindex(i);
    h(i, i) = m * s.delta_cw() + k * s.delta_ccw();
  }
  return h;
}

}  // namespace

HermitianOperator build_full_hamiltonian(const SystemParams& s) {
  const Truncation& t = s.trunc;
  CMatrix h = free_field(s);
  // J (a^dag sigma_- + a sigma_+) couples |e,m,k> with |g,m+1,k> and |g,m,k+1>.
  for (int m = 0; m < t.n_cw(); ++m) {
    for (int k = 0; k < t.n_ccw(); ++k) {
      const int e = t.index(Atom::Excited, m, k);
      if (m + 1 < t.n_cw()) {
        const int g = t.index(Atom::Ground, m + 1, k);
        h(g, e) = h(e, g) = s.J * std::sqrt(double(m + 1));
      }
      if (k + 1 < t.n_ccw()) {
        const int g = t.index(Atom::Ground, m, k + 1);
        h(g, e) = h(e, g) = s.J * std::sqrt(double(k + 1));
      }
    }
  }
  return {t, std::move(h)};
}

HermitianOperator build_effective_hamiltonian(const SystemParams& s, CrossTerm cross) {
  const Truncation& t = s.trunc;
  const StarkRates z = stark_rates(s);
  CMatrix h = free_field(s);
  for (int i = 0; i < t.dim(); ++i) {
    const auto [w, m, k] = t.deindex(i);
    const double sz = w == Atom::Excited ? 1.0 : -1.0;
    h(i, i) -= sz * (z.cw * (m + 0.5) + z.ccw * (k + 0.5));
  }
  if (cross == CrossTerm::Include) {
    const double g = -0.5 * z.sum();
    // a_CW^dag a_CCW |w,m,k+1> = sqrt(m+1) sqrt(k+1) |w,m+1,k>
    for (Atom w : {Atom::Excited, Atom::Ground}) {
      const double sz = w == Atom::Excited ? 1.0 : -1.0;
      for (int m = 0; m + 1 < t.n_cw(); ++m) {
        for (int k = 0; k + 1 < t.n_ccw(); ++k) {
          const int to = t.index(w, m + 1, k);
          const int from = t.index(w, m, k + 1);
          const double v = g * sz * std::sqrt(double(m + 1) * double(k + 1));
          h(to, from) += v;
          h(from, to) += v;
        }
      }
    }
  }
  return {t, std::move(h)};
}

HermitianOperator build_approx_hamiltonian(const SystemParams& s) {
  return build_effective_hamiltonian(s, CrossTerm::Omit);
}

HermitianOperator number_operator(const Truncation& t, Mode mode) {
  CMatrix n = CMatrix::Zero(t.dim(), t.dim());
  for (int i = 0; i < t.dim(); ++i) {
    const auto [w, m, k] = t.deindex(i);
    n(i, i) = mode == Mode::CW ? m : k;
  }
  return {t, std::move(n)};
}

HermitianOperator sigma_z(const Truncation& t) {
  CMatrix z = CMatrix::Zero(t.dim(), t.dim());
  for (int i = 0; i < t.dim(); ++i) {
    z(i, i) = t.deindex(i).atom == Atom::Excited ? 1.0 : -1.0;
  }
  return {t, std::move(z)};
}

HermitianOperator excitation_number(const Truncation& t) {
  CMatrix n = CMatrix::Zero(t.dim(), t.dim());
  for (int i = 0; i < t.dim(); ++i) {
    const auto [w, m, k] = t.deindex(i);
    n(i, i) = m + k + (w == Atom::Excited ? 1 : 0);
  }
  return {t, std::move(n)};
}

}  // namespace chiralcat
