#pragma once

// 3-intensity decoy-state estimation: LP intervals on single-photon-pair
// yields, interval constraints on the transfer-rate vector q, LP bounds on
// virtual error rates, and the Z-basis quantities feeding the key rate.
//
// Yield quantities here use the conditional convention: probabilities per
// emitted pulse pair given the named state choice, i.e. the 1/16 state-choice
// factor carried by GainTable entries is divided out.

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "rfimdi/channel.hpp"
#include "rfimdi/lpcore.hpp"
#include "rfimdi/reconstruct.hpp"
#include "rfimdi/source.hpp"

namespace rfimdi::decoy {

using channel::GainTable;
using channel::Intensity;
using source::Basis;
using source::PreparedEnsemble;
using source::StateLabel;

struct DecoySettings {
  double mu = 0.3;   // signal intensity
  double nu = 0.05;  // decoy intensity; the third intensity is vacuum
  int n_cut = 8;
  std::array<double, 3> intensity_prior{1.0 / 3, 1.0 / 3, 1.0 / 3};

  void validate() const {
    if (!(mu > nu && nu > 0.0)) {
      throw Error("DecoySettings: require mu > nu > 0");
    }
    if (n_cut < 2) throw Error("DecoySettings: n_cut < 2");
    const double s = intensity_prior[0] + intensity_prior[1] + intensity_prior[2];
    if (std::abs(s - 1.0) > 1e-9) {
      throw Error("DecoySettings: priors do not sum to 1");
    }
  }
};

struct YieldInterval {
  double lo = 0.0;
  double hi = 1.0;
};

struct ErrorInterval {
  double lo = 0.0;
  double hi = 1.0;
};

struct SecuritySummary {
  double C_low = 0.0;
  double e_zz_up = 0.0;
  double Y11_zz_low = 0.0;
  double P11 = 0.0;        // joint single-photon probability at signal-signal
  double Q_zz_mumu = 0.0;  // conditional ZZ gain at signal intensities
  double E_zz_mumu = 0.0;  // ZZ QBER at signal intensities
};

namespace detail {

// Decoy LP over {Y_nm} for one table of 9 conditional gains: min and max of
// Y_11 subject to Q - tail <= sum Pois_n Pois_m Y_nm <= Q per intensity pair.
// Rows are rescaled so the feasibility tolerance acts relative to each gain.
inline YieldInterval bound_conditional_yield(
    const std::array<std::array<double, 3>, 3>& q_cond, const DecoySettings& s) {
  s.validate();
  const int cut = s.n_cut;
  const int nv = (cut + 1) * (cut + 1);
  auto idx = [cut](int n, int m) { return n * (cut + 1) + m; };

  const std::array<double, 3> lam{s.mu, s.nu, 0.0};
  std::array<std::vector<double>, 3> pois;
  std::array<double, 3> head{};  // truncated Poisson mass
  for (int k = 0; k < 3; ++k) {
    pois[k].resize(cut + 1);
    head[k] = 0.0;
    for (int n = 0; n <= cut; ++n) {
      pois[k][n] = channel::poisson_pmf(n, lam[k]);
      head[k] += pois[k][n];
    }
  }

  lp::LinearProgram p;
  p.objective.assign(nv, 0.0);
  p.objective[idx(1, 1)] = 1.0;
  p.lower.assign(nv, 0.0);
  p.upper.assign(nv, 1.0);
  for (int ia = 0; ia < 3; ++ia) {
    for (int ib = 0; ib < 3; ++ib) {
      const double q = q_cond[ia][ib];
      const double tail = 1.0 - head[ia] * head[ib];
      if (q < -1e-12) {
        throw DataInconsistencyError("decoy: negative conditional gain");
      }
      const double scale = 1.0 / std::max({q, tail, 1e-9});
      lp::Constraint up, lo;
      up.row.assign(nv, 0.0);
      for (int n = 0; n <= cut; ++n) {
        for (int m = 0; m <= cut; ++m) {
          up.row[idx(n, m)] = scale * pois[ia][n] * pois[ib][m];
        }
      }
      lo.row = up.row;
      up.rel = lp::Relation::LessEq;
      up.rhs = scale * q;
      lo.rel = lp::Relation::GreaterEq;
      lo.rhs = scale * (q - tail);
      p.constraints.push_back(std::move(up));
      p.constraints.push_back(std::move(lo));
    }
  }

  p.sense = lp::Sense::Minimize;
  const lp::Solution smin = lp::solve_lp(p);
  if (smin.status != lp::Status::Optimal) {
    throw DataInconsistencyError("decoy: yield LP infeasible");
  }
  p.sense = lp::Sense::Maximize;
  const lp::Solution smax = lp::solve_lp(p);
  if (smax.status != lp::Status::Optimal) {
    throw DataInconsistencyError("decoy: yield LP infeasible");
  }
  YieldInterval out;
  out.lo = std::clamp(smin.objective_value, 0.0, 1.0);
  out.hi = std::clamp(smax.objective_value, 0.0, 1.0);
  if (out.lo > out.hi) out.lo = out.hi;
  return out;
}

}  // namespace detail

// Interval on the conditional single-photon-pair yield of one state pair.
inline YieldInterval bound_pair_yield(const GainTable& g, StateLabel a,
                                      StateLabel b, const DecoySettings& s,
                                      double state_prob = 1.0 / 16.0) {
  std::array<std::array<double, 3>, 3> q_cond{};
  for (int ia = 0; ia < 3; ++ia) {
    for (int ib = 0; ib < 3; ++ib) {
      q_cond[ia][ib] =
          g(a, b, static_cast<Intensity>(ia), static_cast<Intensity>(ib)) /
          state_prob;
    }
  }
  return detail::bound_conditional_yield(q_cond, s);
}

// Interval constraints on q: one pauli_row per state pair (in the frozen
// system order) bracketed by the pair's yield interval, plus physicality.
struct QConstraintSet {
  std::array<std::array<double, 16>, 16> rows{};
  std::array<YieldInterval, 16> bounds{};
};

inline QConstraintSet q_constraints(
    const std::array<std::array<YieldInterval, 4>, 4>& intervals,
    const PreparedEnsemble& ea, const PreparedEnsemble& eb) {
  QConstraintSet out;
  for (int i = 0; i < 16; ++i) {
    const auto [la, lb] = reconstruct::kSystemOrder[i];
    out.rows[i] = source::pauli_row(ea.actual_state(la), eb.actual_state(lb));
    out.bounds[i] = intervals[static_cast<int>(la)][static_cast<int>(lb)];
  }
  return out;
}

namespace detail {

// Feasible-q LP in rescaled variables q' = q / scale so that constraint and
// bound magnitudes stay O(1) even at long distances.
inline lp::LinearProgram q_feasible_program(const QConstraintSet& cons,
                                            double scale) {
  lp::LinearProgram p;
  p.objective.assign(16, 0.0);
  p.lower.assign(16, -1.0 / scale);
  p.upper.assign(16, 1.0 / scale);
  p.lower[0] = 0.0;  // q_II >= 0
  for (int i = 0; i < 16; ++i) {
    lp::Constraint up, lo;
    up.row.assign(cons.rows[i].begin(), cons.rows[i].end());
    lo.row = up.row;
    up.rel = lp::Relation::LessEq;
    up.rhs = cons.bounds[i].hi / scale;
    lo.rel = lp::Relation::GreaterEq;
    lo.rhs = cons.bounds[i].lo / scale;
    p.constraints.push_back(std::move(up));
    p.constraints.push_back(std::move(lo));
  }
  // |q_k| <= q_II for the 15 non-identity entries.
  for (int k = 1; k < 16; ++k) {
    lp::Constraint c1, c2;
    c1.row.assign(16, 0.0);
    c1.row[k] = 1.0;
    c1.row[0] = -1.0;
    c1.rel = lp::Relation::LessEq;
    c1.rhs = 0.0;
    c2.row.assign(16, 0.0);
    c2.row[k] = -1.0;
    c2.row[0] = -1.0;
    c2.rel = lp::Relation::LessEq;
    c2.rhs = 0.0;
    p.constraints.push_back(std::move(c1));
    p.constraints.push_back(std::move(c2));
  }
  return p;
}

inline double optimize_over_q(lp::LinearProgram& p,
                              const std::array<double, 16>& objective,
                              lp::Sense sense) {
  p.objective.assign(objective.begin(), objective.end());
  p.sense = sense;
  const lp::Solution sol = lp::solve_lp(p);
  if (sol.status != lp::Status::Optimal) {
    throw DataInconsistencyError("decoy: q-space LP infeasible");
  }
  return sol.objective_value;
}

}  // namespace detail

// (e_low, e_up) for basis pair (alpha, chi) via the fractional LP bound:
// e_up pairs the maximized error-event sum with the minimized no-error sum.
inline std::pair<double, double> bound_error_rate_lp(const QConstraintSet& cons,
                                                     const PreparedEnsemble& ea,
                                                     const PreparedEnsemble& eb,
                                                     Basis alpha, Basis chi) {
  double scale = 0.0;
  for (int i = 0; i < 16; ++i) scale = std::max(scale, cons.bounds[i].hi);
  if (scale <= 0.0) return {0.0, 1.0};  // no signal anywhere

  // Objective rows for the symmetric (error) and antisymmetric sums; the
  // variable rescaling cancels in the final ratios.
  std::array<double, 16> sym{}, asym{};
  for (int j = 0; j < 2; ++j) {
    for (int s = 0; s < 2; ++s) {
      const auto& va = ea.virtual_entry(j, alpha);
      const auto& vb = eb.virtual_entry(s, chi);
      const auto row = source::pauli_row(va.state, vb.state);
      const double w = va.prob * vb.prob;
      auto& target = (j == s) ? sym : asym;
      for (int k = 0; k < 16; ++k) target[k] += w * row[k];
    }
  }

  lp::LinearProgram p = detail::q_feasible_program(cons, scale);
  const double sym_hi = std::max(0.0, detail::optimize_over_q(p, sym, lp::Sense::Maximize));
  const double sym_lo = std::max(0.0, detail::optimize_over_q(p, sym, lp::Sense::Minimize));
  const double asym_hi = std::max(0.0, detail::optimize_over_q(p, asym, lp::Sense::Maximize));
  const double asym_lo = std::max(0.0, detail::optimize_over_q(p, asym, lp::Sense::Minimize));

  const double e_up =
      (sym_hi + asym_lo > 0.0) ? sym_hi / (sym_hi + asym_lo) : 1.0;
  const double e_low =
      (sym_lo + asym_hi > 0.0) ? sym_lo / (sym_lo + asym_hi) : 0.0;
  return {std::clamp(std::min(e_low, e_up), 0.0, 1.0),
          std::clamp(e_up, 0.0, 1.0)};
}

// C_low from the four error intervals; a pair straddling 1/2 contributes 0.
inline double worst_case_C(const std::array<ErrorInterval, 4>& e) {
  double c = 0.0;
  for (const auto& iv : e) {
    if (iv.lo <= 0.5 && iv.hi >= 0.5) continue;
    const double a = (1.0 - 2.0 * iv.lo) * (1.0 - 2.0 * iv.lo);
    const double b = (1.0 - 2.0 * iv.hi) * (1.0 - 2.0 * iv.hi);
    c += std::min(a, b);
  }
  return c;
}

struct ZzBounds {
  double y11_low = 0.0;   // lower bound on the bit-summed conditional Y11
  double e_up = 0.0;      // upper bound on the single-photon ZZ error rate
  double q_mumu = 0.0;    // conditional ZZ gain at (mu, mu)
  double e_mumu = 0.0;    // ZZ QBER at (mu, mu)
};

// Z-basis decoy bounds on bit-summed gains. Error events are the j = s pairs
// (the singlet announcement anti-correlates Z bits).
inline ZzBounds bound_zz(const GainTable& g, const DecoySettings& s,
                         double state_prob = 1.0 / 16.0) {
  std::array<std::array<double, 3>, 3> tot{}, err{}, corr{};
  for (int ia = 0; ia < 3; ++ia) {
    for (int ib = 0; ib < 3; ++ib) {
      const auto iia = static_cast<Intensity>(ia);
      const auto iib = static_cast<Intensity>(ib);
      const double g00 = g(StateLabel::Z0, StateLabel::Z0, iia, iib) / state_prob;
      const double g01 = g(StateLabel::Z0, StateLabel::Z1, iia, iib) / state_prob;
      const double g10 = g(StateLabel::Z1, StateLabel::Z0, iia, iib) / state_prob;
      const double g11 = g(StateLabel::Z1, StateLabel::Z1, iia, iib) / state_prob;
      err[ia][ib] = 0.25 * (g00 + g11);
      corr[ia][ib] = 0.25 * (g01 + g10);
      tot[ia][ib] = err[ia][ib] + corr[ia][ib];
    }
  }
  if (tot[0][0] <= 0.0) {
    throw NoSignalError("bound_zz: zero total ZZ gain at signal intensities");
  }
  ZzBounds out;
  out.y11_low = detail::bound_conditional_yield(tot, s).lo;
  const double err_up = detail::bound_conditional_yield(err, s).hi;
  const double corr_lo = detail::bound_conditional_yield(corr, s).lo;
  out.e_up = (err_up + corr_lo > 0.0) ? err_up / (err_up + corr_lo) : 1.0;
  out.q_mumu = tot[0][0];
  out.e_mumu = err[0][0] / tot[0][0];
  return out;
}

}  // namespace rfimdi::decoy
