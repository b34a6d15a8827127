#include <gtest/gtest.h>

#include "chiralcat/wigner.hpp"
#include "oracles/oracles.hpp"

using namespace chiralcat;

namespace {

CMatrix coherent_density(cplx alpha, int n) {
  const CVector c = coherent_amplitudes(alpha, n).normalized();
  return c * c.adjoint();
}

double max_abs(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

const ClosedSimulation& paper_run() {
  static const ClosedSimulation sim{SystemParams{}};
  return sim;
}

GridSpec coarse() { return {-4.0, 4.0, -4.0, 4.0, 81, 81}; }

}  // namespace

TEST(Displacement, VacuumElement) {
  const cplx chi(0.7, -1.2);
  EXPECT_NEAR(std::abs(displacement_element(0, 0, chi) - std::exp(-0.5 * std::norm(chi))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(displacement_element(1, 0, chi) - chi * std::exp(-0.5 * std::norm(chi))), 0.0,
              1e-15);
  EXPECT_NEAR(std::abs(displacement_element(0, 1, chi) + std::conj(chi) * std::exp(-0.5 * std::norm(chi))),
              0.0, 1e-15);
  EXPECT_EQ(displacement_element(3, 1, 0.0), cplx(0.0));
  EXPECT_EQ(displacement_element(2, 2, 0.0), cplx(1.0));
}

TEST(Displacement, MatchesMatrixExponential) {
  for (cplx chi : {cplx(0.3, 0.2), cplx(-1.1, 0.9), cplx(2.0, -1.5)}) {
    const oracle::Mat d = oracle::displacement(chi, 120);
    const CMatrix m = displacement_matrix(20, chi);
    for (int n = 0; n < 20; ++n) {
      for (int l = 0; l < 20; ++l) {
        EXPECT_NEAR(std::abs(displacement_element(n, l, chi) - d(n, l)), 0.0, 1e-12);
        EXPECT_EQ(m(n, l), displacement_element(n, l, chi));
      }
    }
  }
}

TEST(Displacement, ColumnsOrthonormal) {
  const int cutoff = 80;
  for (cplx chi : {cplx(0.5, 0.5), cplx(-0.9, 0.1), cplx(0.0, 1.0)}) {
    CMatrix d(cutoff, cutoff);
    for (int n = 0; n < cutoff; ++n)
      for (int l = 0; l < cutoff; ++l) d(n, l) = displacement_element(n, l, chi);
    const CMatrix g = d.adjoint() * d;
    EXPECT_LT((g.topLeftCorner(20, 20) - CMatrix::Identity(20, 20)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Displacement, LargeArgumentStaysFinite) {
  const CMatrix d = displacement_matrix(40, cplx(8.0, 8.0));
  EXPECT_TRUE(d.allFinite());
}

TEST(WignerTrace, CoherentState) {
  const cplx alpha(1.8, 0.0);
  const CMatrix rho = coherent_density(alpha, 40);
  for (cplx chi : {cplx(1.8, 0.0), cplx(0.5, 1.0), cplx(-0.2, -0.3), cplx(3.5, 1.1)}) {
    EXPECT_NEAR(wigner_from_density(rho, chi), 2.0 / kPi * std::exp(-2.0 * std::norm(chi - alpha)),
                1e-12);
  }
}

TEST(WignerTrace, MatchesDisplacedParityOracle) {
  const CMatrix rho = oracle::random_density(6, 21);
  for (cplx chi : {cplx(0.0, 0.0), cplx(0.4, -0.6), cplx(-1.2, 0.3), cplx(2.0, 2.0)}) {
    const cplx w = wigner_trace(rho, chi);
    EXPECT_NEAR(w.real(), oracle::wigner_displaced_parity(rho, chi, 90), 1e-10);
    EXPECT_LE(std::abs(w.imag()), 1e-10);
  }
}

TEST(WignerTrace, ParitySumConvergesToTrace) {
  const CMatrix rho = oracle::random_density(8, 4);
  const cplx chi(0.9, -1.4);
  const cplx exact = wigner_trace(rho, chi);
  EXPECT_NEAR(std::abs(wigner_parity_sum(rho, chi, 80) - exact), 0.0, 1e-12);
  // Cutting the parity sum at the state's own Fock cutoff is not enough away from the origin.
  EXPECT_GT(std::abs(wigner_parity_sum(rho, chi, 8) - exact), 1e-3);
}

TEST(WignerTrace, ParityIdentityAtOrigin) {
  const CMatrix rho = oracle::random_density(9, 13);
  double parity = 0.0;
  for (int n = 0; n < 9; ++n) parity += (n % 2 ? -1.0 : 1.0) * rho(n, n).real();
  EXPECT_NEAR(wigner_from_density(rho, 0.0), 2.0 / kPi * parity, 1e-14);
}

TEST(ExactWigner, InitialBranchIsCoherent) {
  const BranchResult b = measure_branch(paper_run().initial(), Branch::Plus);
  for (Mode m : {Mode::CW, Mode::CCW}) {
    for (cplx d : {cplx(0.0, 0.0), cplx(1.0, 1.0), cplx(-2.0, 0.0), cplx(0.3, -1.9)}) {
      const cplx chi = 1.8 + d;
      const oracle::Vec c = oracle::coherent(1.8, 13).normalized();
      const double want = oracle::wigner_displaced_parity(c * c.adjoint(), chi, 90);
      EXPECT_NEAR(wigner_exact_branch(b, m, chi), want, 1e-10);
      // The 13-level cutoff only perturbs the untruncated Gaussian slightly.
      EXPECT_NEAR(wigner_exact_branch(b, m, chi), 2.0 / kPi * std::exp(-2.0 * std::norm(d)), 5e-3);
    }
  }
}

TEST(ExactWigner, ChiralityAtCatTime) {
  const double ts = cat_time(SystemParams{});
  const BranchResult b = measure_branch(paper_run().exact_state(ts), Branch::Plus);
  const WignerGrid cw = evaluate_grid(WignerSource::exact(b, Mode::CW, ts), GridSpec{});
  const WignerGrid ccw = evaluate_grid(WignerSource::exact(b, Mode::CCW, ts), GridSpec{});
  EXPECT_LT(cw.min(), -0.1);
  EXPECT_LT(std::abs(ccw.min()), std::abs(cw.min()));
  // Lobes near +-1.8i, the CCW peak near -1.8.
  EXPECT_GT(wigner_exact_branch(b, Mode::CW, cplx(0.0, 1.8)), 0.2);
  EXPECT_GT(wigner_exact_branch(b, Mode::CW, cplx(0.0, -1.8)), 0.2);
  EXPECT_NEAR(ccw.argmax().real(), -1.8, 0.1);
  EXPECT_NEAR(ccw.argmax().imag(), 0.0, 0.1);
}

TEST(OpenWigner, ClosedLimitMatchesExact) {
  SystemParams s;
  s.trunc = Truncation(6, 6);
  s.alpha = 0.5;
  const double t = 9.0;
  const BranchResult exact = measure_branch(ClosedSimulation(s).exact_state(t), Branch::Minus);
  const BranchDensity open =
      branch_density(evolve_master(s, initial_density(s.alpha, s.trunc), t), Branch::Minus);
  for (Mode m : {Mode::CW, Mode::CCW}) {
    for (cplx chi : {cplx(0.1, 0.2), cplx(-0.6, 0.4), cplx(1.0, -1.0)}) {
      EXPECT_NEAR(wigner_open_branch(open, m, chi), wigner_exact_branch(exact, m, chi), 1e-6);
    }
  }
}

TEST(OpenWigner, LongTimeVacuum) {
  SystemParams s;
  s.trunc = Truncation(5, 5);
  s.alpha = 0.5;
  s.kappa = 0.5;
  s.gamma = 0.5;
  const BranchDensity bd =
      branch_density(evolve_master(s, initial_density(s.alpha, s.trunc), 60.0), Branch::Plus);
  for (cplx chi : {cplx(0.0, 0.0), cplx(0.5, -0.5), cplx(-1.0, 0.2)}) {
    EXPECT_NEAR(wigner_open_branch(bd, Mode::CW, chi), 2.0 / kPi * std::exp(-2.0 * std::norm(chi)), 1e-6);
  }
}

TEST(Grid, CoherentStateNormalizationAndCenter) {
  const cplx alpha(0.9, -0.6);
  WignerMetadata meta;
  const WignerGrid g = evaluate_grid(WignerSource::density(coherent_density(alpha, 30), meta),
                                     GridSpec::square(std::abs(alpha) + 4.0, 0.05));
  EXPECT_NEAR(g.integral(), 1.0, 1e-2);
  const double cell = 0.05;
  EXPECT_LE(std::abs(g.argmax().real() - alpha.real()), cell);
  EXPECT_LE(std::abs(g.argmax().imag() - alpha.imag()), cell);
  const Negativity n = negativity(g);
  EXPECT_GE(n.min_value, -1e-9);
  EXPECT_NEAR(n.negative_volume, 0.0, 1e-9);
}

TEST(Grid, BoundedRealAndNormalized) {
  const SystemParams s;
  const double ts = cat_time(s);
  const BranchResult b = measure_branch(paper_run().exact_state(ts), Branch::Minus);
  const GridSpec spec = GridSpec::square(std::abs(s.alpha) + 4.0, 0.05);
  for (const WignerSource& src : {WignerSource::analytic(s, ts, Branch::Minus, Mode::CW),
                                  WignerSource::exact(b, Mode::CW, ts),
                                  WignerSource::exact(b, Mode::CCW, ts)}) {
    const WignerGrid g = evaluate_grid(src, spec);
    EXPECT_LE(g.max_imag_residue, 1e-10);
    EXPECT_LE(g.max(), 2.0 / kPi + 1e-9);
    EXPECT_GE(g.min(), -2.0 / kPi - 1e-9);
    EXPECT_NEAR(g.integral(), 1.0, 1e-2);
    for (double v : g.values) ASSERT_TRUE(std::isfinite(v));
  }
}

TEST(Grid, ConjugationSymmetryForRealDensity) {
  // At t_s the CCW factor is |-1.8>, whose Fock density matrix is real.
  const SystemParams s;
  const WignerGrid g =
      evaluate_grid(WignerSource::analytic(s, cat_time(s), Branch::Plus, Mode::CCW), coarse());
  for (int i = 0; i < g.grid.n_re; ++i) {
    for (int j = 0; j < g.grid.n_im; ++j) {
      EXPECT_NEAR(g.at(i, j), g.at(i, g.grid.n_im - 1 - j), 1e-12);
    }
  }
}

TEST(Grid, ThreadCountDoesNotChangeValues) {
  const SystemParams s;
  const WignerSource src = WignerSource::analytic(s, 31.0, Branch::Plus, Mode::CW);
  const WignerGrid one = evaluate_grid(src, coarse(), 1);
  const WignerGrid four = evaluate_grid(src, coarse(), 4);
  EXPECT_EQ(one.values, four.values);
}

TEST(Grid, RejectsBadSpec) {
  const WignerSource src = WignerSource::analytic(SystemParams{}, 1.0, Branch::Plus, Mode::CW);
  EXPECT_THROW(evaluate_grid(src, GridSpec{-1.0, 1.0, -1.0, 1.0, 1, 5}), std::invalid_argument);
  EXPECT_THROW(evaluate_grid(src, GridSpec{1.0, -1.0, -1.0, 1.0, 5, 5}), std::invalid_argument);
  EXPECT_THROW(evaluate_grid(src, GridSpec{-1.0, INFINITY, -1.0, 1.0, 5, 5}), std::invalid_argument);
  EXPECT_THROW(WignerSource::analytic(SystemParams{}, 0.0, Branch::Minus, Mode::CW), NullBranch);
}

TEST(Negativity, AnalyticCatTrough) {
  const SystemParams s;
  const double ts = cat_time(s);
  const WignerGrid g = evaluate_grid(WignerSource::analytic(s, ts, Branch::Plus, Mode::CW), GridSpec{});
  const Negativity n = negativity(g);
  EXPECT_LT(n.min_value, -0.1);
  EXPECT_GT(n.negative_volume, 0.0);
  double lowest = 0.0, neg = 0.0;
  for (int i = 0; i < g.grid.n_re; ++i) {
    for (int j = 0; j < g.grid.n_im; ++j) {
      const double v = g.at(i, j);
      lowest = std::min(lowest, v);
      neg += std::max(0.0, -v);
    }
  }
  EXPECT_EQ(n.min_value, lowest);
  EXPECT_NEAR(n.negative_volume, neg * 0.05 * 0.05, 1e-12);
}

TEST(Consistency, CounterClockwiseAnalyticVersusExact) {
  const SystemParams s;
  const double ts = cat_time(s);
  for (Branch b : {Branch::Plus, Branch::Minus}) {
    const BranchResult e = measure_branch(paper_run().exact_state(ts), b);
    const WignerGrid ga = evaluate_grid(WignerSource::analytic(s, ts, b, Mode::CCW), coarse());
    const WignerGrid ge = evaluate_grid(WignerSource::exact(e, Mode::CCW, ts), coarse());
    EXPECT_LE(max_abs(ga.values, ge.values), 0.05);
  }
}

TEST(Consistency, ClockwiseAnalyticVersusExactShareStructure) {
  const SystemParams s;
  const double ts = cat_time(s);
  const BranchResult e = measure_branch(paper_run().exact_state(ts), Branch::Plus);
  const WignerGrid ga = evaluate_grid(WignerSource::analytic(s, ts, Branch::Plus, Mode::CW), coarse());
  const WignerGrid ge = evaluate_grid(WignerSource::exact(e, Mode::CW, ts), coarse());
  EXPECT_LT(ga.min(), -0.1);
  EXPECT_LT(ge.min(), -0.1);
  // The two grids differ mainly at the central fringe; see the notes in README.
  const double dev = max_abs(ga.values, ge.values);
  EXPECT_GT(dev, 0.15);
  EXPECT_LT(dev, 0.25);
}

TEST(Chirality, NoRotationMeansIdenticalModes) {
  SystemParams s;
  s.delta_sag = 0.0;
  const double t = 40.0;
  for (Branch b : {Branch::Plus, Branch::Minus}) {
    const WignerGrid a_cw = evaluate_grid(WignerSource::analytic(s, t, b, Mode::CW), coarse());
    const WignerGrid a_ccw = evaluate_grid(WignerSource::analytic(s, t, b, Mode::CCW), coarse());
    EXPECT_LE(max_abs(a_cw.values, a_ccw.values), 1e-8);
  }
  const BranchResult e = measure_branch(ClosedSimulation(s).exact_state(t), Branch::Plus);
  const WignerGrid e_cw = evaluate_grid(WignerSource::exact(e, Mode::CW, t), coarse());
  const WignerGrid e_ccw = evaluate_grid(WignerSource::exact(e, Mode::CCW, t), coarse());
  EXPECT_LE(max_abs(e_cw.values, e_ccw.values), 1e-8);
}
