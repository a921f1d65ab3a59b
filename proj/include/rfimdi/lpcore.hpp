#pragma once

// Self-contained bounded-variable primal simplex for small dense linear
// programs. Two phases with artificial variables; the basis is refactored
// from scratch each iteration, which keeps the state drift-free at the
// problem sizes used here (tens of variables and constraints).
//
// Pricing is Dantzig's rule with Bland's rule as anti-cycling fallback after
// 500 pivots. Identical inputs produce bit-identical solutions.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "rfimdi/errors.hpp"

namespace rfimdi::lp {

inline constexpr double kInfinity = 1e30;   // bound sentinel
inline constexpr double kFeasTol = 1e-8;    // constraint feasibility
inline constexpr double kBoundTol = 1e-10;  // variable bound feasibility
inline constexpr double kPivotTol = 1e-10;  // smallest usable pivot
inline constexpr double kDualTol = 1e-9;    // reduced-cost optimality
inline constexpr int kMaxPivots = 10000;
inline constexpr int kDantzigPivots = 500;

enum class Sense { Minimize, Maximize };
enum class Relation { LessEq, Equal, GreaterEq };
enum class Status { Optimal, Infeasible, Unbounded };

struct Constraint {
  std::vector<double> row;
  Relation rel = Relation::LessEq;
  double rhs = 0.0;
};

struct LinearProgram {
  Sense sense = Sense::Minimize;
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  // Per-variable bounds; if left empty they default to [0, +inf).
  std::vector<double> lower;
  std::vector<double> upper;
};

struct Solution {
  Status status = Status::Optimal;
  std::vector<double> x;
  double objective_value = 0.0;
};

class SimplexSolver {
 public:
  Solution solve(const LinearProgram& p) {
    validate(p);
    setup(p);

    // Phase 1: minimize the artificial total.
    phase_costs_.assign(total_, 0.0);
    for (int k = art_begin_; k < total_; ++k) phase_costs_[k] = 1.0;
    const Status s1 = iterate(/*phase1=*/true);
    if (s1 != Status::Optimal) {
      throw NumericalFailureError("simplex: phase 1 did not converge");
    }
    if (phase_objective() > kFeasTol) {
      return Solution{Status::Infeasible, {}, 0.0};
    }
    // Pin artificials at zero for phase 2.
    for (int k = art_begin_; k < total_; ++k) {
      lower_[k] = 0.0;
      upper_[k] = 0.0;
      if (!is_basic_[k]) value_[k] = 0.0;
    }

    phase_costs_.assign(total_, 0.0);
    const double dir = (p.sense == Sense::Maximize) ? -1.0 : 1.0;
    for (int j = 0; j < n_; ++j) phase_costs_[j] = dir * p.objective[j];
    const Status s2 = iterate(/*phase1=*/false);
    if (s2 == Status::Unbounded) {
      return Solution{Status::Unbounded, {}, 0.0};
    }

    Solution sol;
    sol.status = Status::Optimal;
    sol.x.assign(value_.begin(), value_.begin() + n_);
    sol.objective_value = 0.0;
    for (int j = 0; j < n_; ++j) sol.objective_value += p.objective[j] * sol.x[j];
    check_solution(p, sol.x);
    return sol;
  }

 private:
  int n_ = 0;          // structural variables
  int m_ = 0;          // constraints
  int art_begin_ = 0;  // first artificial column
  int total_ = 0;      // structural + slack + artificial
  int pivots_ = 0;

  std::vector<std::vector<double>> cols_;  // column-major constraint matrix
  std::vector<double> b_;
  std::vector<double> lower_, upper_;
  std::vector<double> value_;
  std::vector<char> is_basic_;
  std::vector<char> at_upper_;  // nonbasic position flag
  std::vector<int> basis_;
  std::vector<double> phase_costs_;

  // Dense LU scratch.
  std::vector<double> lu_;
  std::vector<int> perm_;
  std::vector<double> xb_, duals_, dirw_, scratch_;

  static void validate(const LinearProgram& p) {
    const std::size_t n = p.objective.size();
    if (n == 0) throw MalformedProgramError("simplex: empty objective");
    for (const auto& c : p.constraints) {
      if (c.row.size() != n) {
        throw MalformedProgramError("simplex: constraint dimension mismatch");
      }
    }
    if (!p.lower.empty() && p.lower.size() != n) {
      throw MalformedProgramError("simplex: lower-bound dimension mismatch");
    }
    if (!p.upper.empty() && p.upper.size() != n) {
      throw MalformedProgramError("simplex: upper-bound dimension mismatch");
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = p.lower.empty() ? 0.0 : p.lower[j];
      const double hi = p.upper.empty() ? kInfinity : p.upper[j];
      if (lo > hi) throw MalformedProgramError("simplex: lower > upper");
    }
  }

  void setup(const LinearProgram& p) {
    n_ = static_cast<int>(p.objective.size());
    m_ = static_cast<int>(p.constraints.size());
    art_begin_ = n_ + m_;
    total_ = n_ + 2 * m_;
    pivots_ = 0;

    cols_.assign(total_, std::vector<double>(m_, 0.0));
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) cols_[j][i] = p.constraints[i].row[j];
      cols_[n_ + i][i] = 1.0;  // slack
    }
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) b_[i] = p.constraints[i].rhs;

    lower_.assign(total_, 0.0);
    upper_.assign(total_, kInfinity);
    for (int j = 0; j < n_; ++j) {
      lower_[j] = p.lower.empty() ? 0.0 : std::max(p.lower[j], -kInfinity);
      upper_[j] = p.upper.empty() ? kInfinity : std::min(p.upper[j], kInfinity);
    }
    for (int i = 0; i < m_; ++i) {
      switch (p.constraints[i].rel) {
        case Relation::LessEq:
          lower_[n_ + i] = 0.0;
          upper_[n_ + i] = kInfinity;
          break;
        case Relation::GreaterEq:
          lower_[n_ + i] = -kInfinity;
          upper_[n_ + i] = 0.0;
          break;
        case Relation::Equal:
          lower_[n_ + i] = 0.0;
          upper_[n_ + i] = 0.0;
          break;
      }
    }

    value_.assign(total_, 0.0);
    is_basic_.assign(total_, 0);
    at_upper_.assign(total_, 0);
    for (int j = 0; j < n_ + m_; ++j) {
      value_[j] = start_value(j);
      at_upper_[j] = (value_[j] == upper_[j] && upper_[j] < kInfinity) ? 1 : 0;
    }

    // Artificial columns: sign chosen so the initial basic value is >= 0.
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      double r = b_[i];
      for (int j = 0; j < n_ + m_; ++j) r -= cols_[j][i] * value_[j];
      const int a = art_begin_ + i;
      cols_[a][i] = (r >= 0.0) ? 1.0 : -1.0;
      value_[a] = std::abs(r);
      is_basic_[a] = 1;
      basis_[i] = a;
    }

    lu_.resize(static_cast<std::size_t>(m_) * m_);
    perm_.resize(m_);
    xb_.resize(m_);
    duals_.resize(m_);
    dirw_.resize(m_);
    scratch_.resize(m_);
  }

  double start_value(int j) const {
    const double lo = lower_[j], hi = upper_[j];
    if (lo > -kInfinity) {
      if (hi < kInfinity && std::abs(hi) < std::abs(lo)) return hi;
      return lo;
    }
    if (hi < kInfinity) return std::min(0.0, hi);
    return 0.0;
  }

  double phase_objective() const {
    double s = 0.0;
    for (int k = art_begin_; k < total_; ++k) s += value_[k];
    return s;
  }

  // LU with partial pivoting of the current basis matrix.
  void factor_basis() {
    for (int i = 0; i < m_; ++i) {
      const auto& col = cols_[basis_[i]];
      for (int r = 0; r < m_; ++r) lu_[static_cast<std::size_t>(r) * m_ + i] = col[r];
    }
    for (int i = 0; i < m_; ++i) perm_[i] = i;
    for (int c = 0; c < m_; ++c) {
      int piv = c;
      for (int r = c + 1; r < m_; ++r) {
        if (std::abs(lu_[static_cast<std::size_t>(r) * m_ + c]) >
            std::abs(lu_[static_cast<std::size_t>(piv) * m_ + c])) {
          piv = r;
        }
      }
      if (piv != c) {
        for (int k = 0; k < m_; ++k) {
          std::swap(lu_[static_cast<std::size_t>(c) * m_ + k],
                    lu_[static_cast<std::size_t>(piv) * m_ + k]);
        }
        std::swap(perm_[c], perm_[piv]);
      }
      const double d = lu_[static_cast<std::size_t>(c) * m_ + c];
      if (std::abs(d) < 1e-13) {
        throw NumericalFailureError("simplex: singular basis");
      }
      for (int r = c + 1; r < m_; ++r) {
        const double f = lu_[static_cast<std::size_t>(r) * m_ + c] / d;
        lu_[static_cast<std::size_t>(r) * m_ + c] = f;
        if (f == 0.0) continue;
        for (int k = c + 1; k < m_; ++k) {
          lu_[static_cast<std::size_t>(r) * m_ + k] -=
              f * lu_[static_cast<std::size_t>(c) * m_ + k];
        }
      }
    }
  }

  // Solve B x = rhs using the factorization.
  void solve_forward(const std::vector<double>& rhs, std::vector<double>& x) {
    for (int i = 0; i < m_; ++i) scratch_[i] = rhs[perm_[i]];
    for (int r = 1; r < m_; ++r) {
      double s = scratch_[r];
      for (int c = 0; c < r; ++c) s -= lu_[static_cast<std::size_t>(r) * m_ + c] * scratch_[c];
      scratch_[r] = s;
    }
    for (int r = m_ - 1; r >= 0; --r) {
      double s = scratch_[r];
      for (int c = r + 1; c < m_; ++c) s -= lu_[static_cast<std::size_t>(r) * m_ + c] * x[c];
      x[r] = s / lu_[static_cast<std::size_t>(r) * m_ + r];
    }
  }

  // Solve B^T y = rhs using the factorization of B.
  void solve_transpose(const std::vector<double>& rhs, std::vector<double>& y) {
    // B = P^T L U  =>  B^T = U^T L^T P. Solve U^T z = rhs, L^T w = z, y = P^T w.
    for (int r = 0; r < m_; ++r) {
      double s = rhs[r];
      for (int c = 0; c < r; ++c) s -= lu_[static_cast<std::size_t>(c) * m_ + r] * scratch_[c];
      scratch_[r] = s / lu_[static_cast<std::size_t>(r) * m_ + r];
    }
    for (int r = m_ - 1; r >= 0; --r) {
      double s = scratch_[r];
      for (int c = r + 1; c < m_; ++c) s -= lu_[static_cast<std::size_t>(c) * m_ + r] * scratch_[c];
      scratch_[r] = s;
    }
    for (int i = 0; i < m_; ++i) y[perm_[i]] = scratch_[i];
  }

  void recompute_basics() {
    std::vector<double> r = b_;
    for (int j = 0; j < total_; ++j) {
      if (is_basic_[j] || value_[j] == 0.0) continue;
      for (int i = 0; i < m_; ++i) r[i] -= cols_[j][i] * value_[j];
    }
    solve_forward(r, xb_);
    for (int i = 0; i < m_; ++i) value_[basis_[i]] = xb_[i];
  }

  Status iterate(bool phase1) {
    std::vector<double> cb(m_);
    while (true) {
      if (++pivots_ > kMaxPivots) {
        throw NumericalFailureError("simplex: pivot cap exceeded");
      }
      factor_basis();
      recompute_basics();

      for (int i = 0; i < m_; ++i) cb[i] = phase_costs_[basis_[i]];
      solve_transpose(cb, duals_);

      // Entering variable.
      const bool bland = pivots_ > kDantzigPivots;
      int enter = -1;
      double best = kDualTol;
      int sign = 0;
      const int scan_end = phase1 ? total_ : art_begin_;
      for (int j = 0; j < scan_end; ++j) {
        if (is_basic_[j]) continue;
        if (lower_[j] == upper_[j]) continue;  // fixed
        double d = phase_costs_[j];
        for (int i = 0; i < m_; ++i) d -= duals_[i] * cols_[j][i];
        int s = 0;
        if (d < -kDualTol && value_[j] < upper_[j]) s = 1;        // increase
        else if (d > kDualTol && value_[j] > lower_[j]) s = -1;   // decrease
        if (s == 0) continue;
        if (bland) {
          enter = j;
          sign = s;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          enter = j;
          sign = s;
        }
      }
      if (enter < 0) return Status::Optimal;

      solve_forward(cols_[enter], dirw_);

      // Ratio test: entering moves by delta * sign, basics by -delta*sign*w.
      double delta = kInfinity;
      int leave = -1;       // index into basis_, -1 => bound flip
      double leave_to = 0;  // bound the leaving variable reaches
      const double span = upper_[enter] - lower_[enter];
      if (span < delta) delta = span;
      for (int i = 0; i < m_; ++i) {
        const double g = sign * dirw_[i];
        const int bj = basis_[i];
        double lim = kInfinity;
        double to = 0.0;
        if (g > kPivotTol) {
          if (lower_[bj] > -kInfinity) {
            lim = (value_[bj] - lower_[bj]) / g;
            to = lower_[bj];
          }
        } else if (g < -kPivotTol) {
          if (upper_[bj] < kInfinity) {
            lim = (upper_[bj] - value_[bj]) / (-g);
            to = upper_[bj];
          }
        }
        if (lim < -0.0) lim = 0.0;
        if (lim < delta - 1e-15 ||
            (lim < delta + 1e-15 && leave >= 0 && bj < basis_[leave])) {
          delta = std::max(lim, 0.0);
          leave = i;
          leave_to = to;
        }
      }

      if (delta >= kInfinity) {
        // A phase-1 ray is a numerical anomaly: the objective is bounded by 0.
        if (phase1) throw NumericalFailureError("simplex: phase-1 ray");
        return Status::Unbounded;
      }

      // Apply the step.
      for (int i = 0; i < m_; ++i) {
        value_[basis_[i]] -= delta * sign * dirw_[i];
      }
      value_[enter] += delta * sign;

      if (leave < 0) {
        // Bound flip: entering stays nonbasic at its other bound.
        value_[enter] = (sign > 0) ? upper_[enter] : lower_[enter];
        at_upper_[enter] = (sign > 0) ? 1 : 0;
        continue;
      }

      const int out = basis_[leave];
      is_basic_[out] = 0;
      value_[out] = leave_to;
      at_upper_[out] = (leave_to == upper_[out]) ? 1 : 0;
      is_basic_[enter] = 1;
      basis_[leave] = enter;
    }
  }

  void check_solution(const LinearProgram& p, const std::vector<double>& x) const {
    for (int j = 0; j < n_; ++j) {
      if (x[j] < lower_[j] - 1e-7 || x[j] > upper_[j] + 1e-7) {
        throw NumericalFailureError("simplex: bound violated in solution");
      }
    }
    for (const auto& c : p.constraints) {
      double v = -c.rhs;
      double scale = 1.0;
      for (std::size_t j = 0; j < c.row.size(); ++j) {
        v += c.row[j] * x[j];
        scale = std::max(scale, std::abs(c.row[j] * x[j]));
      }
      const double tol = kFeasTol * scale;
      const bool ok = (c.rel == Relation::LessEq && v <= tol) ||
                      (c.rel == Relation::GreaterEq && v >= -tol) ||
                      (c.rel == Relation::Equal && std::abs(v) <= tol);
      if (!ok) {
        throw NumericalFailureError("simplex: constraint violated in solution");
      }
    }
  }
};

inline Solution solve_lp(const LinearProgram& p) {
  SimplexSolver solver;
  return solver.solve(p);
}

// Human-readable dump for bug reports.
inline std::string dump(const LinearProgram& p) {
  std::string out = (p.sense == Sense::Minimize) ? "min" : "max";
  char buf[32];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
  };
  for (double c : p.objective) out += " " + num(c);
  out += "\n";
  for (const auto& c : p.constraints) {
    for (double v : c.row) out += num(v) + " ";
    out += (c.rel == Relation::LessEq) ? "<=" : (c.rel == Relation::Equal) ? "=" : ">=";
    out += " " + num(c.rhs) + "\n";
  }
  for (std::size_t j = 0; j < p.objective.size(); ++j) {
    const double lo = p.lower.empty() ? 0.0 : p.lower[j];
    const double hi = p.upper.empty() ? kInfinity : p.upper[j];
    out += "x" + std::to_string(j) + " in [" + num(lo) + ", " + num(hi) + "]\n";
  }
  return out;
}

}  // namespace rfimdi::lp
