#include <gtest/gtest.h>

#include <algorithm>

#include "chiralcat/model.hpp"
#include "oracles/oracles.hpp"

using namespace chiralcat;

namespace {

SystemParams small(int n) {
  SystemParams s;
  s.trunc = Truncation(n, n);
  return s;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Sagnac, ZeroRotation) {
  PhysicalParams p;
  EXPECT_EQ(sagnac_shift(p), 0.0);
}

TEST(Sagnac, ResonatorAtQuotedRotation) {
  PhysicalParams p;
  p.omega_rad_s = 2.0 * kPi * 136.9e3;
  const double c = PhysicalParams::kSpeedOfLight;
  const double wc = 2.0 * kPi * c / 1550e-9;
  const double want = 1.4 * 1.1e-3 * p.omega_rad_s * wc / c * (1.0 - 1.0 / (1.4 * 1.4));
  EXPECT_NEAR(sagnac_shift(p) / want, 1.0, 1e-14);
  EXPECT_NEAR(sagnac_shift(p) / (2.0 * kPi * 1e6), 418.6, 0.1);
}

TEST(Sagnac, LinearInRotation) {
  PhysicalParams p;
  p.omega_rad_s = 1234.5;
  const double one = sagnac_shift(p);
  p.omega_rad_s *= 2.0;
  EXPECT_NEAR(sagnac_shift(p), 2.0 * one, 1e-9 * one);
}

TEST(Sagnac, DispersionTerm) {
  PhysicalParams p;
  p.omega_rad_s = 1000.0;
  p.dn_dlambda = -2.0e4;
  const double c = PhysicalParams::kSpeedOfLight;
  const double wc = 2.0 * kPi * c / p.wavelength_m;
  const double factor = 1.0 - 1.0 / (1.4 * 1.4) - (p.wavelength_m / 1.4) * p.dn_dlambda;
  EXPECT_NEAR(sagnac_shift(p), 1.4 * 1.1e-3 * 1000.0 * wc / c * factor, 1e-6);
}

TEST(Sagnac, RequiredRotationInvertsShift) {
  PhysicalParams p;
  p.omega_rad_s = 2.0 * kPi * 136.9e3;
  EXPECT_NEAR(required_rotation(sagnac_shift(p), p) / p.omega_rad_s, 1.0, 1e-13);
  // Delta_sag = 11 J with J/2pi = 38 MHz lands on the quoted rotation rate.
  EXPECT_NEAR(required_rotation(11 * 2.0 * kPi * 38.05e6, p) / (2.0 * kPi * 1e3), 136.9, 0.2);
}

TEST(Sagnac, RejectsUnphysicalResonator) {
  PhysicalParams p;
  p.refractive_index = 1.0;
  EXPECT_THROW(sagnac_shift(p), std::invalid_argument);
  p = PhysicalParams{};
  p.radius_m = -1.0;
  EXPECT_THROW(sagnac_shift(p), std::invalid_argument);
}

TEST(StarkRates, DefaultParameters) {
  const StarkRates z = stark_rates(SystemParams{});
  EXPECT_DOUBLE_EQ(z.cw, 1.0 / 44.0);
  EXPECT_DOUBLE_EQ(z.ccw, 1.0 / 22.0);
}

TEST(StarkRates, SymmetricWithoutRotation) {
  SystemParams s;
  s.delta_sag = 0.0;
  const StarkRates z = stark_rates(s);
  EXPECT_EQ(z.cw, z.ccw);
}

TEST(StarkRates, QuadraticInCoupling) {
  SystemParams s;
  const StarkRates one = stark_rates(s);
  s.J = 2.0;
  const StarkRates two = stark_rates(s);
  EXPECT_DOUBLE_EQ(two.cw, 4.0 * one.cw);
  EXPECT_DOUBLE_EQ(two.ccw, 4.0 * one.ccw);
}

TEST(StarkRates, DegenerateDetuning) {
  SystemParams s;
  s.delta_sag = 33.0;
  EXPECT_THROW(stark_rates(s), DegenerateDetuning);
  s.delta_sag = -33.0;
  EXPECT_THROW(stark_rates(s), DegenerateDetuning);
}

TEST(DispersiveCheck, DefaultParametersPass) {
  const DispersiveReport r = dispersive_check(SystemParams{});
  ASSERT_TRUE(r.sagnac_ratio_cw && r.sagnac_ratio_ccw);
  EXPECT_NEAR(*r.sagnac_ratio_cw, (1.0 / 44.0) / 44.0, 1e-15);
  EXPECT_NEAR(*r.sagnac_ratio_ccw, (1.0 / 22.0) / 44.0, 1e-15);
  EXPECT_NEAR(*r.sagnac_ratio_cw, 5.2e-4, 0.1e-4);
  EXPECT_NEAR(*r.sagnac_ratio_ccw, 1.0e-3, 0.05e-3);
  EXPECT_NEAR(r.mixing_ratio_cw, 13.0 / (44.0 * 44.0), 1e-15);
  EXPECT_NEAR(r.mixing_ratio_ccw, 13.0 / (22.0 * 22.0), 1e-15);
  EXPECT_TRUE(r.pass);
}

TEST(DispersiveCheck, StrongCouplingFails) {
  SystemParams s;
  s.J = s.delta / 2.0;
  EXPECT_FALSE(dispersive_check(s).pass);
}

TEST(DispersiveCheck, ZeroThresholdFails) {
  EXPECT_FALSE(dispersive_check(SystemParams{}, 0.0).pass);
}

TEST(DispersiveCheck, NoRotationIsNotApplicable) {
  SystemParams s;
  s.delta_sag = 0.0;
  const DispersiveReport r = dispersive_check(s);
  EXPECT_FALSE(r.sagnac_ratio_cw.has_value());
  EXPECT_FALSE(r.sagnac_ratio_ccw.has_value());
  EXPECT_FALSE(r.pass);
}

TEST(CatTime, DefaultParameters) {
  const SystemParams s;
  EXPECT_NEAR(cat_time(s), 22.0 * kPi, 1e-12);
  EXPECT_NEAR(cat_time(s), 69.11, 0.01);
  EXPECT_DOUBLE_EQ(s.delta_cw(), 2.0 * s.delta_ccw());
}

TEST(CatTime, HalvesWhenStarkRateDoubles) {
  SystemParams s;
  const double t1 = cat_time(s);
  s.J = std::sqrt(2.0);
  EXPECT_NEAR(cat_time(s), t1 / 2.0, 1e-12);
}

TEST(CatTime, UndefinedWithoutCoupling) {
  SystemParams s;
  s.J = 0.0;
  EXPECT_THROW(cat_time(s), DegenerateDetuning);
}

TEST(FullHamiltonian, MatrixElements) {
  const SystemParams s;
  const Truncation& t = s.trunc;
  const CMatrix h = build_full_hamiltonian(s).matrix();
  EXPECT_EQ(h(t.index(Atom::Ground, 0, 0), t.index(Atom::Ground, 0, 0)), cplx(0.0));
  EXPECT_EQ(h(t.index(Atom::Excited, 0, 0), t.index(Atom::Ground, 1, 0)), cplx(1.0));
  EXPECT_EQ(h(t.index(Atom::Ground, 1, 1), t.index(Atom::Ground, 1, 1)), cplx(66.0));
}

TEST(FullHamiltonian, MatchesKroneckerConstruction) {
  SystemParams s;
  s.trunc = Truncation(4, 3);
  s.J = 0.7;
  const oracle::Operators ops(4, 3);
  const CMatrix want = ops.full_hamiltonian(0.7, s.delta_cw(), s.delta_ccw());
  EXPECT_LT(max_abs(build_full_hamiltonian(s).matrix() - want), 1e-13);
}

TEST(FullHamiltonian, ConservesExcitationNumber) {
  const SystemParams s = small(5);
  const CMatrix h = build_full_hamiltonian(s).matrix();
  const CMatrix n = excitation_number(s.trunc).matrix();
  // The truncated space cuts excitation manifolds, but H never couples
  // states of different N_tot, so the commutator vanishes exactly.
  EXPECT_EQ(max_abs(h * n - n * h), 0.0);
}

TEST(Hamiltonians, AllHermitian) {
  const SystemParams s;
  EXPECT_LE(build_full_hamiltonian(s).hermiticity_error(), 1e-12);
  EXPECT_LE(build_effective_hamiltonian(s).hermiticity_error(), 1e-12);
  EXPECT_LE(build_approx_hamiltonian(s).hermiticity_error(), 1e-12);
}

TEST(EffectiveHamiltonian, CommutesWithAtomicInversion) {
  const SystemParams s = small(6);
  const CMatrix h = build_effective_hamiltonian(s).matrix();
  const CMatrix z = sigma_z(s.trunc).matrix();
  EXPECT_EQ(max_abs(h * z - z * h), 0.0);
}

TEST(EffectiveHamiltonian, ModeExchangeElement) {
  const SystemParams s;
  const Truncation& t = s.trunc;
  const CMatrix h = build_effective_hamiltonian(s).matrix();
  const cplx v = h(t.index(Atom::Excited, 1, 0), t.index(Atom::Excited, 0, 1));
  EXPECT_NEAR(v.real(), -3.0 / 88.0, 1e-15);
  EXPECT_EQ(v.imag(), 0.0);
  const cplx g = h(t.index(Atom::Ground, 1, 0), t.index(Atom::Ground, 0, 1));
  EXPECT_NEAR(g.real(), 3.0 / 88.0, 1e-15);
}

TEST(EffectiveHamiltonian, WithoutExchangeIsApproximate) {
  const SystemParams s = small(6);
  EXPECT_EQ(max_abs(build_effective_hamiltonian(s, CrossTerm::Omit).matrix() -
                    build_approx_hamiltonian(s).matrix()),
            0.0);
}

TEST(EffectiveHamiltonian, SpectrumApproachesFullAtWeakCoupling) {
  // Low-lying spectrum at 3x3: the second-order Hamiltonian converges to
  // the exact one as J/Delta shrinks.
  double prev = 1e300;
  for (double J : {1.0, 0.5, 0.25, 0.125}) {
    SystemParams s = small(3);
    s.J = J;
    Eigen::SelfAdjointEigenSolver<CMatrix> full(build_full_hamiltonian(s).matrix());
    Eigen::SelfAdjointEigenSolver<CMatrix> eff(build_effective_hamiltonian(s).matrix());
    // Gaps within the lowest manifolds; the second-order form carries a constant offset.
    const Eigen::VectorXd gf = full.eigenvalues().head(4).array() - full.eigenvalues()(0);
    const Eigen::VectorXd ge = eff.eigenvalues().head(4).array() - eff.eigenvalues()(0);
    const double dev = (gf - ge).cwiseAbs().maxCoeff();
    EXPECT_LT(dev, prev);
    prev = dev;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(ApproxHamiltonian, DiagonalElement) {
  const SystemParams s;
  const Truncation& t = s.trunc;
  const double e = build_approx_hamiltonian(s).matrix()(t.index(Atom::Excited, 1, 0),
                                                        t.index(Atom::Excited, 1, 0)).real();
  EXPECT_NEAR(e, 44.0 - 1.0 / 44.0 - 0.5 * (1.0 / 44.0 + 1.0 / 22.0), 1e-13);
  EXPECT_NEAR(e, 43.943, 1e-3);
}

TEST(ApproxHamiltonian, IsDiagonal) {
  const SystemParams s = small(5);
  CMatrix h = build_approx_hamiltonian(s).matrix();
  h.diagonal().setZero();
  EXPECT_EQ(max_abs(h), 0.0);
  const CMatrix a = build_approx_hamiltonian(s).matrix();
  for (const HermitianOperator& o : {number_operator(s.trunc, Mode::CW),
                                     number_operator(s.trunc, Mode::CCW), sigma_z(s.trunc)}) {
    EXPECT_EQ(max_abs(a * o.matrix() - o.matrix() * a), 0.0);
  }
}

TEST(ApproxHamiltonian, ModeSwapSymmetryWithoutRotation) {
  SystemParams s = small(4);
  s.delta_sag = 0.0;
  const Truncation& t = s.trunc;
  const CMatrix h = build_approx_hamiltonian(s).matrix();
  for (int i = 0; i < t.dim(); ++i) {
    const auto [w, m, k] = t.deindex(i);
    const int j = t.index(w, k, m);
    EXPECT_EQ(h(i, i), h(j, j));
  }
}

TEST(SystemParams, Validation) {
  SystemParams s;
  s.kappa = -0.1;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = SystemParams{};
  s.J = -1.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = SystemParams{};
  s.J = 0.0;
  EXPECT_NO_THROW(s.validate());
}
