#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "chiralcat/analytic.hpp"
#include "chiralcat/closed_dynamics.hpp"
#include "chiralcat/hilbert.hpp"
#include "chiralcat/model.hpp"
#include "chiralcat/open_dynamics.hpp"

namespace chiralcat {

/// <n|D(chi)|l> for the single-mode displacement D(chi) = exp(chi a^dag - chi* a).
cplx displacement_element(int n, int l, cplx chi);

/// Matrix of <n|D(chi)|l> for 0 <= n, l < levels.
CMatrix displacement_matrix(int levels, cplx chi);

/// (2/pi) tr[rho D(2 chi) (-1)^{a^dag a}], complex before discarding the
/// imaginary residue. The sum is over the support of rho only, so it is exact
/// for a density matrix that vanishes beyond its Fock cutoff.
cplx wigner_trace(const CMatrix& rho, cplx chi);

double wigner_from_density(const CMatrix& rho, cplx chi);

/// (2/pi) sum_{l < cutoff} (-1)^l <l| D(chi)^dag rho D(chi) |l>, the displaced
/// parity expansion cut at a finite number of terms.
cplx wigner_parity_sum(const CMatrix& rho, cplx chi, int cutoff);

double wigner_exact_branch(const BranchResult& branch, Mode mode, cplx chi);
double wigner_open_branch(const BranchDensity& bd, Mode mode, cplx chi);

enum class WignerSourceKind { Analytic, Exact, Open };
std::string_view to_string(WignerSourceKind k);

struct WignerMetadata {
  Mode mode = Mode::CW;
  Branch branch = Branch::Plus;
  double time = 0.0;
  WignerSourceKind source = WignerSourceKind::Analytic;
};

/// A single-mode Wigner function ready for evaluation: either the closed form
/// of the dispersive model or a reduced density matrix.
class WignerSource {
 public:
  static WignerSource analytic(const SystemParams& s, double t, Branch sign, Mode mode);
  static WignerSource exact(const BranchResult& branch, Mode mode, double t);
  static WignerSource open(const BranchDensity& bd, Mode mode, double t);
  /// Any single-mode density matrix, tagged with caller-supplied metadata.
  static WignerSource density(CMatrix rho, WignerMetadata meta);

  const WignerMetadata& metadata() const { return meta_; }
  /// Reduced density matrix; empty for the analytic source.
  const std::optional<CMatrix>& reduced() const { return rho_; }

  cplx evaluate_complex(cplx chi) const;
  double evaluate(cplx chi) const { return evaluate_complex(chi).real(); }

 private:
  WignerMetadata meta_;
  std::optional<SystemParams> params_;
  std::optional<CMatrix> rho_;
};

struct GridSpec {
  double re_min = -4.0;
  double re_max = 4.0;
  double im_min = -4.0;
  double im_max = 4.0;
  int n_re = 161;
  int n_im = 161;

  void validate() const;
  double re(int i) const { return re_min + (re_max - re_min) * i / (n_re - 1); }
  double im(int j) const { return im_min + (im_max - im_min) * j / (n_im - 1); }
  double cell_area() const {
    return (re_max - re_min) / (n_re - 1) * (im_max - im_min) / (n_im - 1);
  }

  static GridSpec square(double half_width, double spacing);
};

struct WignerGrid {
  GridSpec grid;
  WignerMetadata meta;
  std::vector<double> values;  // values[i * n_im + j] at re(i) + i im(j)
  double max_imag_residue = 0.0;

  double at(int i, int j) const { return values[std::size_t(i) * grid.n_im + j]; }
  cplx point(int i, int j) const { return {grid.re(i), grid.im(j)}; }
  /// Riemann sum of W over the grid cells.
  double integral() const;
  double min() const;
  double max() const;
  /// Grid point with the largest value.
  cplx argmax() const;
};

/// Evaluates the source on every grid point, split across threads
/// (0 means hardware concurrency).
WignerGrid evaluate_grid(const WignerSource& source, const GridSpec& grid, unsigned threads = 0);

struct Negativity {
  double min_value = 0.0;
  double negative_volume = 0.0;
};

Negativity negativity(const WignerGrid& grid);

}  // namespace chiralcat
