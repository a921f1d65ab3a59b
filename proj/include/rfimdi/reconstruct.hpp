#pragma once

// Rebuilds the transfer-rate vector q from the sixteen observed actual-state
// yields, and evaluates virtual yields, error rates and the quantity C.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <utility>

#include "rfimdi/channel.hpp"
#include "rfimdi/source.hpp"

namespace rfimdi::reconstruct {

using channel::TransferRates;
using channel::YieldTable;
using source::Basis;
using source::PreparedEnsemble;
using source::StateLabel;

// Frozen row order of the sixteen-equation system: the four ZZ pairs, then
// Z against 0X, Z against 0Y, then 0X and 0Y rows in the same pattern.
inline constexpr std::array<std::pair<StateLabel, StateLabel>, 16> kSystemOrder{{
    {StateLabel::Z0, StateLabel::Z0}, {StateLabel::Z0, StateLabel::Z1},
    {StateLabel::Z1, StateLabel::Z0}, {StateLabel::Z1, StateLabel::Z1},
    {StateLabel::Z0, StateLabel::X0}, {StateLabel::Z1, StateLabel::X0},
    {StateLabel::Z0, StateLabel::Y0}, {StateLabel::Z1, StateLabel::Y0},
    {StateLabel::X0, StateLabel::Z0}, {StateLabel::X0, StateLabel::Z1},
    {StateLabel::X0, StateLabel::X0}, {StateLabel::X0, StateLabel::Y0},
    {StateLabel::Y0, StateLabel::Z0}, {StateLabel::Y0, StateLabel::Z1},
    {StateLabel::Y0, StateLabel::X0}, {StateLabel::Y0, StateLabel::Y0},
}};

struct ReconstructionSystem {
  std::array<std::array<double, 16>, 16> matrix{};
  std::array<double, 16> rhs{};
  double condition_estimate = 0.0;  // max/min pivot ratio from elimination
};

namespace detail {

// Partial-pivot elimination; returns {max pivot, min pivot} magnitudes.
inline std::pair<double, double> eliminate(std::array<std::array<double, 17>, 16>& a) {
  double pmax = 0.0, pmin = 0.0;
  for (int col = 0; col < 16; ++col) {
    int piv = col;
    for (int r = col + 1; r < 16; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    const double p = std::abs(a[col][col]);
    pmax = std::max(pmax, p);
    pmin = (col == 0) ? p : std::min(pmin, p);
    if (p == 0.0) return {pmax, 0.0};
    for (int r = col + 1; r < 16; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < 17; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return {pmax, pmin};
}

}  // namespace detail

inline ReconstructionSystem build_system(const PreparedEnsemble& ea,
                                         const PreparedEnsemble& eb,
                                         const YieldTable& yields) {
  ReconstructionSystem sys;
  for (int i = 0; i < 16; ++i) {
    const auto [la, lb] = kSystemOrder[i];
    const auto row = source::pauli_row(ea.actual_state(la), eb.actual_state(lb));
    const double p = ea.emission_prob(la) * eb.emission_prob(lb);
    for (int c = 0; c < 16; ++c) sys.matrix[i][c] = p * row[c];
    sys.rhs[i] = yields(la, lb);
  }
  std::array<std::array<double, 17>, 16> work{};
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) work[r][c] = sys.matrix[r][c];
    work[r][16] = sys.rhs[r];
  }
  const auto [pmax, pmin] = detail::eliminate(work);
  sys.condition_estimate =
      (pmin > 0.0) ? pmax / pmin : std::numeric_limits<double>::infinity();
  return sys;
}

inline TransferRates solve_q(const ReconstructionSystem& sys) {
  std::array<std::array<double, 17>, 16> work{};
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) work[r][c] = sys.matrix[r][c];
    work[r][16] = sys.rhs[r];
  }
  const auto [pmax, pmin] = detail::eliminate(work);
  const double cond =
      (pmin > 0.0) ? pmax / pmin : std::numeric_limits<double>::infinity();
  if (!(cond < 1e12)) {
    throw SingularPreparationError(
        "solve_q: singular or ill-conditioned preparation system", cond);
  }
  TransferRates q;
  for (int r = 15; r >= 0; --r) {
    double s = work[r][16];
    for (int c = r + 1; c < 16; ++c) s -= work[r][c] * q.q[c];
    q.q[r] = s / work[r][r];
  }
  double rhs_max = 0.0, res_max = 0.0;
  for (int r = 0; r < 16; ++r) {
    rhs_max = std::max(rhs_max, std::abs(sys.rhs[r]));
    double res = -sys.rhs[r];
    for (int c = 0; c < 16; ++c) res += sys.matrix[r][c] * q.q[c];
    res_max = std::max(res_max, std::abs(res));
  }
  if (res_max > 1e-9 * std::max(rhs_max, 1.0)) {
    throw NumericalFailureError("solve_q: residual too large");
  }
  return q;
}

// Y^vir for Alice outcome (j, alpha) and Bob outcome (s, chi).
inline double virtual_yield(const TransferRates& q, const PreparedEnsemble& ea,
                            const PreparedEnsemble& eb, int j, Basis alpha,
                            int s, Basis chi) {
  const auto& va = ea.virtual_entry(j, alpha);
  const auto& vb = eb.virtual_entry(s, chi);
  const double v =
      va.prob * vb.prob * channel::dot(source::pauli_row(va.state, vb.state), q);
  if (v < -1e-12) {
    throw InconsistentModelError("virtual_yield: negative virtual yield");
  }
  return std::max(v, 0.0);
}

inline double error_rate(const TransferRates& q, const PreparedEnsemble& ea,
                         const PreparedEnsemble& eb, Basis alpha, Basis chi) {
  const double y00 = virtual_yield(q, ea, eb, 0, alpha, 0, chi);
  const double y01 = virtual_yield(q, ea, eb, 0, alpha, 1, chi);
  const double y10 = virtual_yield(q, ea, eb, 1, alpha, 0, chi);
  const double y11 = virtual_yield(q, ea, eb, 1, alpha, 1, chi);
  const double denom = y00 + y01 + y10 + y11;
  if (denom <= 0.0) {
    throw NoSignalError("error_rate: all virtual yields vanish");
  }
  return std::clamp((y00 + y11) / denom, 0.0, 1.0);
}

// C = sum over the four X/Y basis pairs of (1 - 2e)^2.
inline double quantity_C(double e_xx, double e_xy, double e_yx, double e_yy) {
  auto term = [](double e) { return (1.0 - 2.0 * e) * (1.0 - 2.0 * e); };
  return term(e_xx) + term(e_xy) + term(e_yx) + term(e_yy);
}

// Debug dump: 16 rows, 17 columns (coefficients then rhs).
inline void write_system_csv(std::ostream& os, const ReconstructionSystem& sys) {
  char buf[32];
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 17; ++c) {
      const double v = (c < 16) ? sys.matrix[r][c] : sys.rhs[r];
      std::snprintf(buf, sizeof(buf), "%.12g", v);
      os << buf << (c == 16 ? '\n' : ',');
    }
  }
}

}  // namespace rfimdi::reconstruct
