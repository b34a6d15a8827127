#pragma once

#include <string_view>
#include <vector>

#include "chiralcat/errors.hpp"
#include "chiralcat/types.hpp"

namespace chiralcat {

enum class Mode { CW, CCW };

constexpr Mode complement(Mode m) { return m == Mode::CW ? Mode::CCW : Mode::CW; }

constexpr std::string_view to_string(Mode m) { return m == Mode::CW ? "cw" : "ccw"; }

enum class Atom { Excited = 0, Ground = 1 };

/// Fock cutoffs of the two traveling modes. Levels run 0..n-1.
///
/// The composite basis |w>|m>_CW|k>_CCW is laid out row-major with the atom
/// outermost: index = (w * n_cw + m) * n_ccw + k, excited block first.
class Truncation {
 public:
  struct Triple {
    Atom atom;
    int m;
    int k;
  };

  Truncation() = default;
  Truncation(int n_cw, int n_ccw);

  int n_cw() const { return n_cw_; }
  int n_ccw() const { return n_ccw_; }
  int levels(Mode m) const { return m == Mode::CW ? n_cw_ : n_ccw_; }
  int field_dim() const { return n_cw_ * n_ccw_; }
  int dim() const { return 2 * field_dim(); }

  int index(Atom w, int m, int k) const {
    return (static_cast<int>(w) * n_cw_ + m) * n_ccw_ + k;
  }
  int field_index(int m, int k) const { return m * n_ccw_ + k; }
  Triple deindex(int i) const;

  friend bool operator==(const Truncation&, const Truncation&) = default;

 private:
  int n_cw_ = 13;
  int n_ccw_ = 13;
};

void require_same_truncation(const Truncation& a, const Truncation& b);

/// State of atom + both modes: amplitudes A[m,k] on |e>|m>|k> and B[m,k] on
/// |g>|m>|k>, stored as one composite vector.
class PureState {
 public:
  using BlockMap = Eigen::Map<RowMajorCMatrix>;
  using ConstBlockMap = Eigen::Map<const RowMajorCMatrix>;

  explicit PureState(Truncation trunc);
  PureState(Truncation trunc, CVector amplitudes);

  const Truncation& truncation() const { return trunc_; }
  const CVector& amplitudes() const { return amps_; }
  CVector& amplitudes() { return amps_; }

  ConstBlockMap excited() const { return block(Atom::Excited); }
  ConstBlockMap ground() const { return block(Atom::Ground); }
  BlockMap excited() { return block(Atom::Excited); }
  BlockMap ground() { return block(Atom::Ground); }

  double norm() const { return amps_.norm(); }
  void normalize();

 private:
  ConstBlockMap block(Atom w) const;
  BlockMap block(Atom w);

  Truncation trunc_;
  CVector amps_;
};

/// Pure state of the two field modes alone; coeffs(m, k) multiplies |m>_CW|k>_CCW.
class FieldState {
 public:
  FieldState(Truncation trunc, CMatrix coeffs);

  const Truncation& truncation() const { return trunc_; }
  const CMatrix& coeffs() const { return coeffs_; }

  double norm() const { return coeffs_.norm(); }
  /// Single-mode reduced density matrix, the other mode traced out.
  CMatrix reduced(Mode keep) const;

 private:
  Truncation trunc_;
  CMatrix coeffs_;
};

/// Fock expansion e^{-|a|^2/2} a^m / sqrt(m!) for m < n, not renormalized.
CVector coherent_amplitudes(cplx alpha, int n);

/// Probability of |alpha> lying at or beyond Fock level n.
double coherent_tail(cplx alpha, int n);

/// 1 - <psi|psi> of the truncated product |alpha>|alpha> before renormalization.
double truncation_deficit(cplx alpha, const Truncation& trunc);

/// Throws TruncationTooSmall when either mode's tail reaches the threshold.
void check_truncation(cplx alpha, const Truncation& trunc, double tail_threshold);

/// (|g> + |e>)/sqrt2 (x) |alpha> (x) |alpha>, renormalized after truncation.
PureState initial_state(cplx alpha, const Truncation& trunc,
                        double tail_threshold = 1e-4);

cplx inner(const PureState& lhs, const PureState& rhs);

PureState apply_number(const PureState& state, Mode mode);
PureState apply_annihilate(const PureState& state, Mode mode);
PureState apply_create(const PureState& state, Mode mode);

/// Reduced density matrix of one mode from a two-mode density matrix indexed
/// by field_index(m, k).
CMatrix partial_trace(const CMatrix& field_rho, const Truncation& trunc, Mode keep);

/// Composite-space operator with at most one nonzero per row:
/// (O x)_i = coeff_i * x_{source_i}. Annihilators, creators and the atomic
/// ladder operators all have this shape, which lets master-equation terms be
/// applied column by column without materializing sparse matrices.
class LadderOperator {
 public:
  static LadderOperator annihilate(const Truncation& trunc, Mode mode);
  static LadderOperator lower_atom(const Truncation& trunc);
  /// a_mode sigma_+ : |e,m,k> <- sqrt(m+1) |g,m+1,k> (resp. k+1 for CCW).
  static LadderOperator absorb(const Truncation& trunc, Mode mode);
  /// a_mode sigma_+ + a_mode^dag sigma_- ; the two parts fill disjoint rows.
  static LadderOperator hopping(const Truncation& trunc, Mode mode);

  LadderOperator adjoint() const;

  int dim() const { return static_cast<int>(source_.size()); }
  const std::vector<int>& source() const { return source_; }
  const std::vector<double>& coeff() const { return coeff_; }

  CVector apply(const CVector& x) const;
  /// out += scale * O * rho
  void add_left(const CMatrix& rho, double scale, CMatrix& out) const;
  /// out += scale * rho * O
  void add_right(const CMatrix& rho, double scale, CMatrix& out) const;
  /// out += scale * O * rho * O^dagger
  void add_sandwich(const CMatrix& rho, double scale, CMatrix& out) const;

  CMatrix to_dense() const;

 private:
  LadderOperator(std::vector<int> source, std::vector<double> coeff);

  std::vector<int> source_;  // -1 marks an empty row
  std::vector<double> coeff_;
};

}  // namespace chiralcat
