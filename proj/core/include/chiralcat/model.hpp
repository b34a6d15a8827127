#pragma once

#include <optional>

#include "chiralcat/hilbert.hpp"
#include "chiralcat/types.hpp"

namespace chiralcat {

/// Laboratory description of the spinning resonator, SI units.
struct PhysicalParams {
  static constexpr double kSpeedOfLight = 299792458.0;  // m/s

  double refractive_index = 1.4;
  double radius_m = 1.1e-3;
  double wavelength_m = 1550e-9;
  double omega_rad_s = 0.0;  // rotation angular velocity
  double dn_dlambda = 0.0;   // 1/m

  void validate() const;
  double cavity_frequency() const;  // 2 pi c / lambda, rad/s
};

/// Rotation-induced shift of the CW (+) and CCW (-) resonances, rad/s.
double sagnac_shift(const PhysicalParams& p);

/// Rotation rate (rad/s) producing the given shift; p.omega_rad_s is ignored.
double required_rotation(double shift_rad_s, const PhysicalParams& p);

/// Model constants. Rates are in units of the coupling J (J = 1 by default).
struct SystemParams {
  double J = 1.0;
  double delta = 33.0;      // omega_c - omega_a
  double delta_sag = 11.0;  // Sagnac shift
  double kappa = 0.0;       // cavity decay, both modes
  double gamma = 0.0;       // atomic decay
  cplx alpha{1.8, 0.0};
  Truncation trunc{13, 13};

  double delta_cw() const { return delta + delta_sag; }
  double delta_ccw() const { return delta - delta_sag; }
  double detuning(Mode m) const { return m == Mode::CW ? delta_cw() : delta_ccw(); }

  void validate() const;
};

struct StarkRates {
  double cw = 0.0;
  double ccw = 0.0;

  double of(Mode m) const { return m == Mode::CW ? cw : ccw; }
  double sum() const { return cw + ccw; }
};

/// zeta_eps = J^2 / Delta_eps. Throws DegenerateDetuning on a zero detuning.
StarkRates stark_rates(const SystemParams& s);

struct DispersiveReport {
  /// zeta_eps / (4 Delta_sag); empty when Delta_sag = 0.
  std::optional<double> sagnac_ratio_cw;
  std::optional<double> sagnac_ratio_ccw;
  /// J^2 (n_eps + 1) / Delta_eps^2 with n_eps the highest kept Fock level.
  double mixing_ratio_cw = 0.0;
  double mixing_ratio_ccw = 0.0;
  double threshold = 0.05;
  bool pass = false;
};

DispersiveReport dispersive_check(const SystemParams& s, double threshold = 0.05);

/// t_s = pi / (2 zeta_CW), the time at which the CW branch amplitudes are
/// maximally separated.
double cat_time(const SystemParams& s);

/// Dense Hermitian matrix on the composite basis of a Truncation.
class HermitianOperator {
 public:
  HermitianOperator(Truncation trunc, CMatrix matrix);

  const Truncation& truncation() const { return trunc_; }
  const CMatrix& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

  /// max |H - H^dagger| elementwise
  double hermiticity_error() const;

 private:
  Truncation trunc_;
  CMatrix matrix_;
};

/// sum_eps [Delta_eps n_eps + J (a_eps^dag sigma_- + a_eps sigma_+)]
HermitianOperator build_full_hamiltonian(const SystemParams& s);

enum class CrossTerm { Include, Omit };

/// Second-order dispersive Hamiltonian, diagonal in sigma_z, with the
/// mode-exchange term -(zeta_CW + zeta_CCW)/2 (a_CW^dag a_CCW + h.c.) sigma_z.
HermitianOperator build_effective_hamiltonian(const SystemParams& s,
                                              CrossTerm cross = CrossTerm::Include);

/// Effective Hamiltonian without the mode-exchange term; fully diagonal.
HermitianOperator build_approx_hamiltonian(const SystemParams& s);

HermitianOperator number_operator(const Truncation& t, Mode m);
HermitianOperator sigma_z(const Truncation& t);
/// n_CW + n_CCW + |e><e|
HermitianOperator excitation_number(const Truncation& t);

}  // namespace chiralcat
