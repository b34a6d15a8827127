#include "chiralcat/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace chiralcat {

namespace {

// <n|D(beta)|l> for n >= l, up to the (-conj beta)/beta swap used when n < l:
// sqrt(l!/n!) beta^(n-l) exp(-|beta|^2/2) L_l^(n-l)(|beta|^2).
// Fills one diagonal band (fixed n - l = a) of the displacement matrix.
void fill_band(int levels, int a, cplx beta, double x, CMatrix& out, bool upper) {
  const double r = std::abs(beta);
  const cplx phase = r > 0.0 ? beta / r : cplx(1.0);
  const cplx unit = upper ? -std::conj(phase) : phase;
  cplx unit_pow = std::pow(unit, a);
  double lag_prev = 0.0;
  double lag = 1.0;
  for (int l = 0; l + a < levels; ++l) {
    if (l == 1) {
      lag_prev = 1.0;
      lag = 1.0 + a - x;
    } else if (l > 1) {
      const double next = ((2.0 * (l - 1) + 1.0 + a - x) * lag - (l - 1 + a) * lag_prev) / l;
      lag_prev = lag;
      lag = next;
    }
    double log_mag = -0.5 * x + 0.5 * (std::lgamma(l + 1.0) - std::lgamma(l + a + 1.0));
    double value;
    if (a == 0) {
      value = std::exp(log_mag) * lag;
    } else if (r == 0.0) {
      value = 0.0;
    } else {
      value = std::exp(log_mag + a * std::log(r)) * lag;
    }
    if (upper) {
      out(l, l + a) = unit_pow * value;
    } else {
      out(l + a, l) = unit_pow * value;
    }
  }
}

}  // namespace

CMatrix displacement_matrix(int levels, cplx chi) {
  if (levels < 1) throw std::invalid_argument("displacement_matrix needs levels >= 1");
  CMatrix d(levels, levels);
  const double x = std::norm(chi);
  for (int a = 0; a < levels; ++a) {
    fill_band(levels, a, chi, x, d, false);
    if (a > 0) fill_band(levels, a, chi, x, d, true);
  }
  return d;
}

cplx displacement_element(int n, int l, cplx chi) {
  if (n < 0 || l < 0) throw std::invalid_argument("Fock indices must be non-negative");
  const int lo = std::min(n, l);
  const int a = std::abs(n - l);
  const double x = std::norm(chi);
  double lag_prev = 0.0;
  double lag = 1.0;
  for (int q = 1; q <= lo; ++q) {
    const double next = q == 1 ? 1.0 + a - x
                               : ((2.0 * (q - 1) + 1.0 + a - x) * lag - (q - 1 + a) * lag_prev) / q;
    lag_prev = lag;
    lag = next;
  }
  const double r = std::abs(chi);
  if (a > 0 && r == 0.0) return 0.0;
  const double log_mag = -0.5 * x + 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + a + 1.0)) +
                         (a > 0 ? a * std::log(r) : 0.0);
  const cplx phase = r > 0.0 ? chi / r : cplx(1.0);
  const cplx unit = n >= l ? phase : -std::conj(phase);
  return std::pow(unit, a) * (std::exp(log_mag) * lag);
}

cplx wigner_trace(const CMatrix& rho, cplx chi) {
  const Eigen::Index n = rho.rows();
  if (rho.cols() != n) throw DimensionMismatch("single-mode density matrix must be square");
  const CMatrix d = displacement_matrix(int(n), 2.0 * chi);
  // tr[rho D P] = sum_jk rho_jk <k|D|j> (-1)^j
  cplx acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx col = rho.row(j).transpose().cwiseProduct(d.col(j)).sum();
    acc += (j % 2 == 0) ? col : -col;
  }
  return (2.0 / kPi) * acc;
}

double wigner_from_density(const CMatrix& rho, cplx chi) {
  return wigner_trace(rho, chi).real();
}

cplx wigner_parity_sum(const CMatrix& rho, cplx chi, int cutoff) {
  const int n = int(rho.rows());
  if (rho.cols() != n) throw DimensionMismatch("single-mode density matrix must be square");
  if (cutoff < 1) throw std::invalid_argument("parity cutoff must be positive");
  const int levels = std::max(n, cutoff);
  const CMatrix d = displacement_matrix(levels, chi).topRows(n);
  cplx acc = 0.0;
  for (int l = 0; l < cutoff; ++l) {
    const cplx term = d.col(l).dot(rho * d.col(l));
    acc += (l % 2 == 0) ? term : -term;
  }
  return (2.0 / kPi) * acc;
}

double wigner_exact_branch(const BranchResult& branch, Mode mode, cplx chi) {
  return wigner_from_density(branch.state.reduced(mode), chi);
}

double wigner_open_branch(const BranchDensity& bd, Mode mode, cplx chi) {
  return wigner_from_density(bd.reduced(mode), chi);
}

// ---------------------------------------------------------------------------

std::string_view to_string(WignerSourceKind k) {
  switch (k) {
    case WignerSourceKind::Analytic: return "analytic";
    case WignerSourceKind::Exact: return "exact";
    case WignerSourceKind::Open: return "open";
  }
  return "?";
}

WignerSource WignerSource::analytic(const SystemParams& s, double t, Branch sign, Mode mode) {
  if (!normalizations_and_probabilities(s, t).normalization(sign)) {
    throw NullBranch("analytic branch " + std::string(to_string(sign)) + " is empty");
  }
  WignerSource w;
  w.meta_ = {mode, sign, t, WignerSourceKind::Analytic};
  w.params_ = s;
  return w;
}

WignerSource WignerSource::exact(const BranchResult& branch, Mode mode, double t) {
  WignerSource w;
  w.meta_ = {mode, branch.sign, t, WignerSourceKind::Exact};
  w.rho_ = branch.state.reduced(mode);
  return w;
}

WignerSource WignerSource::open(const BranchDensity& bd, Mode mode, double t) {
  WignerSource w;
  w.meta_ = {mode, bd.sign, t, WignerSourceKind::Open};
  w.rho_ = bd.reduced(mode);
  return w;
}

WignerSource WignerSource::density(CMatrix rho, WignerMetadata meta) {
  WignerSource w;
  w.meta_ = meta;
  w.rho_ = std::move(rho);
  return w;
}

cplx WignerSource::evaluate_complex(cplx chi) const {
  if (params_) {
    return analytic_wigner_complex(*params_, meta_.time, meta_.branch, meta_.mode, chi);
  }
  return wigner_trace(*rho_, chi);
}

// ---------------------------------------------------------------------------

void GridSpec::validate() const {
  if (!std::isfinite(re_min) || !std::isfinite(re_max) || !std::isfinite(im_min) ||
      !std::isfinite(im_max)) {
    throw std::invalid_argument("grid bounds must be finite");
  }
  if (!(re_max > re_min) || !(im_max > im_min)) {
    throw std::invalid_argument("grid bounds must be increasing");
  }
  if (n_re < 2 || n_im < 2) throw std::invalid_argument("grid sizes must be >= 2");
}

GridSpec GridSpec::square(double half_width, double spacing) {
  const int n = int(std::ceil(2.0 * half_width / spacing - 1e-9)) + 1;
  const double half = 0.5 * spacing * (n - 1);
  return {-half, half, -half, half, n, n};
}

double WignerGrid::integral() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * grid.cell_area();
}

double WignerGrid::min() const { return *std::min_element(values.begin(), values.end()); }
double WignerGrid::max() const { return *std::max_element(values.begin(), values.end()); }

cplx WignerGrid::argmax() const {
  const auto idx = std::size_t(std::max_element(values.begin(), values.end()) - values.begin());
  return point(int(idx / grid.n_im), int(idx % grid.n_im));
}

WignerGrid evaluate_grid(const WignerSource& source, const GridSpec& grid, unsigned threads) {
  grid.validate();
  WignerGrid out;
  out.grid = grid;
  out.meta = source.metadata();
  out.values.assign(std::size_t(grid.n_re) * grid.n_im, 0.0);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, unsigned(grid.n_re));
  std::vector<double> residue(threads, 0.0);

  auto work = [&](unsigned w) {
    for (int i = int(w); i < grid.n_re; i += int(threads)) {
      for (int j = 0; j < grid.n_im; ++j) {
        const cplx v = source.evaluate_complex({grid.re(i), grid.im(j)});
        out.values[std::size_t(i) * grid.n_im + j] = v.real();
        residue[w] = std::max(residue[w], std::abs(v.imag()));
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  out.max_imag_residue = *std::max_element(residue.begin(), residue.end());
  return out;
}

Negativity negativity(const WignerGrid& grid) {
  Negativity n;
  n.min_value = grid.min();
  double neg = 0.0;
  for (double v : grid.values) neg += std::max(0.0, -v);
  n.negative_volume = neg * grid.grid.cell_area();
  return n;
}

}  // namespace chiralcat
