#include "chiralcat/hilbert.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace chiralcat {

Truncation::Truncation(int n_cw, int n_ccw) : n_cw_(n_cw), n_ccw_(n_ccw) {
  if (n_cw < 1 || n_ccw < 1) {
    throw std::invalid_argument("Fock truncation must be at least 1 per mode");
  }
}

Truncation::Triple Truncation::deindex(int i) const {
  const int k = i % n_ccw_;
  const int rest = i / n_ccw_;
  return {static_cast<Atom>(rest / n_cw_), rest % n_cw_, k};
}

void require_same_truncation(const Truncation& a, const Truncation& b) {
  if (!(a == b)) {
    std::ostringstream msg;
    msg << "truncation mismatch: " << a.n_cw() << "x" << a.n_ccw() << " vs "
        << b.n_cw() << "x" << b.n_ccw();
    throw DimensionMismatch(msg.str());
  }
}

// ---------------------------------------------------------------------------

PureState::PureState(Truncation trunc)
    : trunc_(trunc), amps_(CVector::Zero(trunc.dim())) {}

PureState::PureState(Truncation trunc, CVector amplitudes)
    : trunc_(trunc), amps_(std::move(amplitudes)) {
  if (amps_.size() != trunc_.dim()) {
    throw DimensionMismatch("amplitude vector does not match truncation");
  }
}

void PureState::normalize() {
  const double n = amps_.norm();
  if (n == 0.0) throw std::domain_error("cannot normalize the zero state");
  amps_ /= n;
}

PureState::ConstBlockMap PureState::block(Atom w) const {
  const int offset = static_cast<int>(w) * trunc_.field_dim();
  return ConstBlockMap(amps_.data() + offset, trunc_.n_cw(), trunc_.n_ccw());
}

PureState::BlockMap PureState::block(Atom w) {
  const int offset = static_cast<int>(w) * trunc_.field_dim();
  return BlockMap(amps_.data() + offset, trunc_.n_cw(), trunc_.n_ccw());
}

FieldState::FieldState(Truncation trunc, CMatrix coeffs)
    : trunc_(trunc), coeffs_(std::move(coeffs)) {
  if (coeffs_.rows() != trunc_.n_cw() || coeffs_.cols() != trunc_.n_ccw()) {
    throw DimensionMismatch("field coefficients do not match truncation");
  }
}

CMatrix FieldState::reduced(Mode keep) const {
  if (keep == Mode::CW) return coeffs_ * coeffs_.adjoint();
  return coeffs_.transpose() * coeffs_.conjugate();
}

// ---------------------------------------------------------------------------

CVector coherent_amplitudes(cplx alpha, int n) {
  if (n < 1) throw std::invalid_argument("coherent_amplitudes needs n >= 1");
  CVector c(n);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int m = 1; m < n; ++m) c(m) = c(m - 1) * alpha / std::sqrt(double(m));
  return c;
}

double coherent_tail(cplx alpha, int n) {
  const double kept = coherent_amplitudes(alpha, n).squaredNorm();
  return std::max(0.0, 1.0 - kept);
}

double truncation_deficit(cplx alpha, const Truncation& trunc) {
  const double cw = coherent_amplitudes(alpha, trunc.n_cw()).squaredNorm();
  const double ccw = coherent_amplitudes(alpha, trunc.n_ccw()).squaredNorm();
  return 1.0 - cw * ccw;
}

void check_truncation(cplx alpha, const Truncation& trunc, double tail_threshold) {
  for (Mode m : {Mode::CW, Mode::CCW}) {
    const double tail = coherent_tail(alpha, trunc.levels(m));
    if (tail >= tail_threshold) {
      std::ostringstream msg;
      msg << "truncation " << trunc.levels(m) << " of mode " << to_string(m)
          << " leaves Poisson tail " << tail << " >= " << tail_threshold
          << " for |alpha| = " << std::abs(alpha);
      throw TruncationTooSmall(msg.str());
    }
  }
}

PureState initial_state(cplx alpha, const Truncation& trunc, double tail_threshold) {
  check_truncation(alpha, trunc, tail_threshold);
  const CVector cw = coherent_amplitudes(alpha, trunc.n_cw());
  const CVector ccw = coherent_amplitudes(alpha, trunc.n_ccw());
  const RowMajorCMatrix field = cw * ccw.transpose() / std::sqrt(2.0);
  PureState s(trunc);
  s.excited() = field;
  s.ground() = field;
  s.normalize();
  return s;
}

cplx inner(const PureState& lhs, const PureState& rhs) {
  require_same_truncation(lhs.truncation(), rhs.truncation());
  return lhs.amplitudes().dot(rhs.amplitudes());
}

namespace {

// Applies f(level) * shift along one mode axis of both atomic blocks.
// shift = -1 lowers (reads level+1), +1 raises (reads level-1), 0 is diagonal.
PureState apply_mode_op(const PureState& state, Mode mode, int shift) {
  const Truncation& t = state.truncation();
  PureState out(t);
  const int n = t.levels(mode);
  for (Atom w : {Atom::Excited, Atom::Ground}) {
    for (int m = 0; m < t.n_cw(); ++m) {
      for (int k = 0; k < t.n_ccw(); ++k) {
        const int level = mode == Mode::CW ? m : k;
        const int src_level = level - shift;
        if (src_level < 0 || src_level >= n) continue;
        double coeff = 0.0;
        if (shift == 0) coeff = level;
        else if (shift < 0) coeff = std::sqrt(double(level + 1));
        else coeff = std::sqrt(double(level));
        const int sm = mode == Mode::CW ? src_level : m;
        const int sk = mode == Mode::CW ? k : src_level;
        out.amplitudes()(t.index(w, m, k)) = coeff * state.amplitudes()(t.index(w, sm, sk));
      }
    }
  }
  return out;
}

}  // namespace

PureState apply_number(const PureState& state, Mode mode) {
  return apply_mode_op(state, mode, 0);
}

PureState apply_annihilate(const PureState& state, Mode mode) {
  return apply_mode_op(state, mode, -1);
}

PureState apply_create(const PureState& state, Mode mode) {
  return apply_mode_op(state, mode, +1);
}

CMatrix partial_trace(const CMatrix& field_rho, const Truncation& trunc, Mode keep) {
  if (field_rho.rows() != trunc.field_dim() || field_rho.cols() != trunc.field_dim()) {
    throw DimensionMismatch("two-mode density matrix does not match truncation");
  }
  const int n = trunc.levels(keep);
  const int traced = trunc.levels(complement(keep));
  CMatrix out = CMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      cplx acc = 0.0;
      for (int s = 0; s < traced; ++s) {
        acc += keep == Mode::CW
                   ? field_rho(trunc.field_index(a, s), trunc.field_index(b, s))
                   : field_rho(trunc.field_index(s, a), trunc.field_index(s, b));
      }
      out(a, b) = acc;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

LadderOperator::LadderOperator(std::vector<int> source, std::vector<double> coeff)
    : source_(std::move(source)), coeff_(std::move(coeff)) {}

LadderOperator LadderOperator::annihilate(const Truncation& t, Mode mode) {
  std::vector<int> src(t.dim(), -1);
  std::vector<double> c(t.dim(), 0.0);
  for (Atom w : {Atom::Excited, Atom::Ground}) {
    for (int m = 0; m < t.n_cw(); ++m) {
      for (int k = 0; k < t.n_ccw(); ++k) {
        const int i = t.index(w, m, k);
        if (mode == Mode::CW && m + 1 < t.n_cw()) {
          src[i] = t.index(w, m + 1, k);
          c[i] = std::sqrt(double(m + 1));
        } else if (mode == Mode::CCW && k + 1 < t.n_ccw()) {
          src[i] = t.index(w, m, k + 1);
          c[i] = std::sqrt(double(k + 1));
        }
      }
    }
  }
  return {std::move(src), std::move(c)};
}

LadderOperator LadderOperator::lower_atom(const Truncation& t) {
  std::vector<int> src(t.dim(), -1);
  std::vector<double> c(t.dim(), 0.0);
  for (int m = 0; m < t.n_cw(); ++m) {
    for (int k = 0; k < t.n_ccw(); ++k) {
      src[t.index(Atom::Ground, m, k)] = t.index(Atom::Excited, m, k);
      c[t.index(Atom::Ground, m, k)] = 1.0;
    }
  }
  return {std::move(src), std::move(c)};
}

LadderOperator LadderOperator::absorb(const Truncation& t, Mode mode) {
  std::vector<int> src(t.dim(), -1);
  std::vector<double> c(t.dim(), 0.0);
  for (int m = 0; m < t.n_cw(); ++m) {
    for (int k = 0; k < t.n_ccw(); ++k) {
      const int i = t.index(Atom::Excited, m, k);
      if (mode == Mode::CW && m + 1 < t.n_cw()) {
        src[i] = t.index(Atom::Ground, m + 1, k);
        c[i] = std::sqrt(double(m + 1));
      } else if (mode == Mode::CCW && k + 1 < t.n_ccw()) {
        src[i] = t.index(Atom::Ground, m, k + 1);
        c[i] = std::sqrt(double(k + 1));
      }
    }
  }
  return {std::move(src), std::move(c)};
}

LadderOperator LadderOperator::hopping(const Truncation& t, Mode mode) {
  const LadderOperator up = absorb(t, mode);
  LadderOperator out = up.adjoint();
  for (int i = 0; i < out.dim(); ++i) {
    if (up.source_[i] >= 0) {
      out.source_[i] = up.source_[i];
      out.coeff_[i] = up.coeff_[i];
    }
  }
  return out;
}

LadderOperator LadderOperator::adjoint() const {
  std::vector<int> src(source_.size(), -1);
  std::vector<double> c(source_.size(), 0.0);
  for (std::size_t i = 0; i < source_.size(); ++i) {
    const int s = source_[i];
    if (s < 0) continue;
    if (src[s] >= 0) {
      throw std::logic_error("ladder operator has two entries in one column");
    }
    src[s] = static_cast<int>(i);
    c[s] = coeff_[i];
  }
  return {std::move(src), std::move(c)};
}

CVector LadderOperator::apply(const CVector& x) const {
  if (x.size() != dim()) throw DimensionMismatch("ladder operator vs vector");
  CVector out = CVector::Zero(dim());
  for (int i = 0; i < dim(); ++i) {
    if (source_[i] >= 0) out(i) = coeff_[i] * x(source_[i]);
  }
  return out;
}

void LadderOperator::add_left(const CMatrix& rho, double scale, CMatrix& out) const {
  const Eigen::Index d = dim();
  std::vector<double> c(coeff_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = scale * coeff_[i];
  for (Eigen::Index j = 0; j < rho.cols(); ++j) {
    const cplx* col = rho.data() + j * d;
    cplx* dst = out.data() + j * d;
    for (Eigen::Index i = 0; i < d; ++i) {
      const int s = source_[i];
      if (s >= 0) dst[i] += c[i] * col[s];
    }
  }
}

void LadderOperator::add_right(const CMatrix& rho, double scale, CMatrix& out) const {
  // (rho O)(:, source_l) += coeff_l * rho(:, l)
  for (int l = 0; l < dim(); ++l) {
    const int s = source_[l];
    if (s >= 0) out.col(s) += (scale * coeff_[l]) * rho.col(l);
  }
}

void LadderOperator::add_sandwich(const CMatrix& rho, double scale, CMatrix& out) const {
  const Eigen::Index d = dim();
  for (Eigen::Index j = 0; j < d; ++j) {
    const int sj = source_[j];
    if (sj < 0) continue;
    const cplx* col = rho.data() + sj * d;
    cplx* dst = out.data() + j * d;
    const double cj = scale * coeff_[j];
    for (Eigen::Index i = 0; i < d; ++i) {
      const int si = source_[i];
      if (si >= 0) dst[i] += (cj * coeff_[i]) * col[si];
    }
  }
}

CMatrix LadderOperator::to_dense() const {
  CMatrix out = CMatrix::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i) {
    if (source_[i] >= 0) out(i, source_[i]) = coeff_[i];
  }
  return out;
}

}  // namespace chiralcat
