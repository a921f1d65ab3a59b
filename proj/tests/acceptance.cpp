// End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
// exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "rfimdi/scenario.hpp"

using namespace rfimdi;
using scenario::Scenario;
using source::Basis;
using source::FlawParams;
using source::StateLabel;

namespace {

int g_failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s  %s  %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  if (!ok) ++g_failures;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const auto t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

qalg::HermOp4 random_psd(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<qalg::cplx, 16> g{}, d{};
  for (auto& v : g) v = qalg::cplx{u(rng), u(rng)};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      for (int i = 0; i < 4; ++i) d[4 * r + c] += g[4 * r + i] * std::conj(g[4 * c + i]);
  double tr = 0.0;
  for (int i = 0; i < 4; ++i) tr += d[5 * i].real();
  for (auto& v : d) v /= 4.0 * tr;
  return qalg::HermOp4::from_entries(d);
}

FlawParams random_flaws(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
  return FlawParams{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), ang(rng)};
}

void check_roundtrip() {
  const double start = now_seconds();
  std::mt19937_64 rng(1001);
  double max_err = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = random_psd(rng);
    const auto q_true = channel::transfer_rates(d);
    const auto ea = source::prepare_ensemble(random_flaws(rng));
    const auto eb = source::prepare_ensemble(random_flaws(rng));
    const auto yields = channel::sps_yields(ea, eb, q_true);
    const auto q = reconstruct::solve_q(reconstruct::build_system(ea, eb, yields));
    for (int k = 0; k < 16; ++k) {
      max_err = std::max(max_err, std::abs(q.q[k] - q_true.q[k]));
    }
  }
  const double elapsed = now_seconds() - start;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max_error=%.3g elapsed=%.2fs", max_err, elapsed);
  report("roundtrip-reconstruction", max_err < 1e-9 && elapsed < 5.0, buf);
}

void check_ideal_fixed_point() {
  const auto e = source::prepare_ensemble(FlawParams{});
  const auto q = channel::transfer_rates(qalg::singlet_projector());
  const double e_xx = reconstruct::error_rate(q, e, e, Basis::X, Basis::X);
  const double e_xy = reconstruct::error_rate(q, e, e, Basis::X, Basis::Y);
  const double e_yx = reconstruct::error_rate(q, e, e, Basis::Y, Basis::X);
  const double e_yy = reconstruct::error_rate(q, e, e, Basis::Y, Basis::Y);
  const double c = reconstruct::quantity_C(e_xx, e_xy, e_yx, e_yy);
  const auto yields = channel::sps_yields(e, e, q);
  const double q_zz = yields(StateLabel::Z0, StateLabel::Z0) +
                      yields(StateLabel::Z0, StateLabel::Z1) +
                      yields(StateLabel::Z1, StateLabel::Z0) +
                      yields(StateLabel::Z1, StateLabel::Z1);
  const double e_zz = (yields(StateLabel::Z0, StateLabel::Z0) +
                       yields(StateLabel::Z1, StateLabel::Z1)) /
                      q_zz;
  const auto rr = rate::rate_sps({q_zz, e_zz, c, 1.16});
  double err = std::abs(e_xx) + std::abs(e_yy) + std::abs(e_xy - 0.5) +
               std::abs(e_yx - 0.5) + std::abs(c - 2.0) + std::abs(e_zz) +
               std::abs(rr.i_e) + std::abs(rr.r_raw - q_zz);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "total_deviation=%.3g", err);
  report("ideal-fixed-point", err < 1e-10, buf);
}

void check_beta_invariance() {
  const auto q = channel::transfer_rates(qalg::singlet_projector());
  double max_err = 0.0;
  for (int i = 0; i < 13; ++i) {
    for (int j = 0; j < 13; ++j) {
      FlawParams pa, pb;
      pa.beta = 6.283185307179586 * i / 13;
      pb.beta = 6.283185307179586 * j / 13;
      const auto ea = source::prepare_ensemble(pa);
      const auto eb = source::prepare_ensemble(pb);
      const double c = reconstruct::quantity_C(
          reconstruct::error_rate(q, ea, eb, Basis::X, Basis::X),
          reconstruct::error_rate(q, ea, eb, Basis::X, Basis::Y),
          reconstruct::error_rate(q, ea, eb, Basis::Y, Basis::X),
          reconstruct::error_rate(q, ea, eb, Basis::Y, Basis::Y));
      max_err = std::max(max_err, std::abs(c - 2.0));
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max|C-2|=%.3g over 13x13 grid", max_err);
  report("beta-invariance", max_err < 1e-9, buf);
}

void check_decoy_bracketing() {
  const double start = now_seconds();
  decoy::DecoySettings s;
  bool ok = true;
  double worst = 0.0;
  for (double dist : {0.0, 50.0, 100.0, 150.0}) {
    for (double delta : {0.0, 0.063, 0.126}) {
      FlawParams p;
      p.delta1 = p.delta2 = p.delta3 = p.delta4 = delta;
      const auto ea = source::prepare_ensemble(p);
      const auto eb = source::prepare_ensemble(p);
      channel::MeasurementModel m;
      m.dist_a = m.dist_b = dist / 2;
      const auto q_true = channel::transfer_rates(channel::effective_operator(m));
      const auto gains = channel::wcs_gains(ea, eb, m, s.mu, s.nu, s.n_cut);
      std::array<std::array<decoy::YieldInterval, 4>, 4> iv{};
      for (StateLabel la : source::kStateLabels) {
        for (StateLabel lb : source::kStateLabels) {
          const auto i = decoy::bound_pair_yield(gains, la, lb, s);
          iv[static_cast<int>(la)][static_cast<int>(lb)] = i;
          const double truth = channel::dot(
              source::pauli_row(ea.actual_state(la), eb.actual_state(lb)), q_true);
          const double viol = std::max(i.lo - truth, truth - i.hi);
          worst = std::max(worst, viol);
          ok = ok && viol <= 1e-12;
        }
      }
      const auto cons = decoy::q_constraints(iv, ea, eb);
      for (Basis a : {Basis::X, Basis::Y}) {
        for (Basis c : {Basis::X, Basis::Y}) {
          const auto [lo, hi] = decoy::bound_error_rate_lp(cons, ea, eb, a, c);
          const double exact = reconstruct::error_rate(q_true, ea, eb, a, c);
          const double viol = std::max(lo - exact, exact - hi);
          worst = std::max(worst, viol);
          ok = ok && viol <= 1e-9;
        }
      }
    }
  }
  const double elapsed = now_seconds() - start;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "worst_violation=%.3g elapsed=%.1fs", worst, elapsed);
  report("decoy-bracketing", ok && elapsed < 120.0, buf);
}

// Max positive-rate distance at fixed intensities, by 2 km stepping.
double wcs_max_distance(Scenario sc) {
  double last_positive = 0.0;
  for (double d = 100.0; d <= 300.0; d += 2.0) {
    sc.distance_km = d;
    try {
      if (scenario::evaluate_wcs(sc).r_raw > 0.0) last_positive = d;
    } catch (const Error&) {
      break;
    }
  }
  return last_positive;
}

void check_flaw_robustness() {
  // SPS curves for the three flaw presets stay within 5% of each other
  std::vector<std::vector<double>> curves;
  const std::vector<double> dists{0, 40, 80, 120, 160, 200, 240};
  for (double delta : {0.0, 0.063, 0.126}) {
    std::vector<double> rates;
    for (double d : dists) {
      Scenario sc;
      sc.mode = "sps";
      sc.distance_km = d;
      scenario::apply_variable(sc, "delta_all", delta);
      rates.push_back(scenario::evaluate_sps(sc).r_raw);
    }
    curves.push_back(rates);
  }
  double worst_rel = 0.0;
  for (std::size_t k = 0; k < dists.size(); ++k) {
    const double a = curves[0][k], b = curves[1][k], c = curves[2][k];
    if (a <= 0.0 || b <= 0.0 || c <= 0.0) continue;
    const double hi = std::max({a, b, c}), lo = std::min({a, b, c});
    worst_rel = std::max(worst_rel, (hi - lo) / hi);
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "max_sps_spread=%.3f", worst_rel);
  report("sps-curve-overlap", worst_rel < 0.05, buf);

  // WCS reach: optimize intensities at 200 km per flaw preset, then step.
  Scenario base;
  base.mode = "wcs";
  base.decoy.n_cut = 10;
  double reach[2];
  double r200[2];
  int idx = 0;
  for (double delta : {0.0, 0.126}) {
    Scenario sc = base;
    scenario::apply_variable(sc, "delta_all", delta);
    sc.distance_km = 200.0;
    const auto best = scenario::optimize_intensities(sc);
    sc.decoy.mu = best.mu;
    sc.decoy.nu = best.nu;
    r200[idx] = scenario::evaluate_wcs(sc).r_raw;
    reach[idx] = wcs_max_distance(sc);
    ++idx;
  }
  std::snprintf(buf, sizeof(buf), "R(200km)=%.3g reach0=%.0fkm reach126=%.0fkm",
                r200[0], reach[0], reach[1]);
  const bool reach_ok =
      reach[0] >= 200.0 && r200[0] > 0.0 &&
      std::abs(reach[1] - reach[0]) <= 0.10 * reach[0];
  report("wcs-reach", reach_ok, buf);
}

void check_basis_asymmetry() {
  Scenario sc;
  sc.mode = "wcs";
  sc.distance_km = 100.0;
  sc.decoy.nu = 0.01;
  const int steps = 6;
  std::vector<double> r_xy, e_xy, r_z, e_z;
  for (int i = 0; i < steps; ++i) {
    const double delta = 0.126 * i / (steps - 1);
    Scenario a = sc;
    scenario::apply_variable(a, "delta_xy", delta);
    const auto pa = scenario::evaluate_wcs(a);
    r_xy.push_back(pa.r_raw);
    e_xy.push_back(pa.e_zz_mumu);
    Scenario b = sc;
    scenario::apply_variable(b, "delta_z", delta);
    const auto pb = scenario::evaluate_wcs(b);
    r_z.push_back(pb.r_raw);
    e_z.push_back(pb.e_zz_mumu);
  }
  double r_change = 0.0, e_change = 0.0;
  for (int i = 1; i < steps; ++i) {
    r_change = std::max(r_change, std::abs(r_xy[i] - r_xy[0]) / r_xy[0]);
    e_change = std::max(e_change, std::abs(e_xy[i] - e_xy[0]) / e_xy[0]);
  }
  bool z_monotone = true;
  for (int i = 1; i < steps; ++i) {
    z_monotone = z_monotone && r_z[i] < r_z[i - 1] && e_z[i] > e_z[i - 1];
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "xy: dR=%.4f dE=%.4f; z strictly monotone=%d", r_change,
                e_change, z_monotone ? 1 : 0);
  report("basis-asymmetry", r_change < 0.02 && e_change < 0.01 && z_monotone, buf);
}

void check_lp_oracle() {
  // mirrors the verification suite but at the full acceptance size
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_int_distribution<int> nvars(2, 5);
  double max_err = 0.0;
  int solved = 0;
  for (int trial = 0; trial < 200 && solved < 50; ++trial) {
    const int n = nvars(rng);
    lp::LinearProgram p;
    p.sense = trial % 2 ? lp::Sense::Minimize : lp::Sense::Maximize;
    p.objective.resize(n);
    for (auto& c : p.objective) c = coeff(rng);
    p.lower.assign(n, 0.0);
    p.upper.assign(n, 1.0);
    for (int k = 0; k < 3; ++k) {
      lp::Constraint con;
      con.row.resize(n);
      double mid = 0.0;
      for (int j = 0; j < n; ++j) {
        con.row[j] = coeff(rng);
        mid += 0.5 * con.row[j];
      }
      con.rel = lp::Relation::LessEq;
      con.rhs = mid + 0.25;
      p.constraints.push_back(con);
    }
    const auto sol = lp::solve_lp(p);
    if (sol.status != lp::Status::Optimal) continue;

    // exhaustive vertex enumeration over active-plane subsets
    std::vector<std::vector<double>> planes;
    std::vector<double> rhs;
    for (const auto& c : p.constraints) {
      planes.push_back(c.row);
      rhs.push_back(c.rhs);
    }
    for (int j = 0; j < n; ++j) {
      std::vector<double> b0(n, 0.0), b1(n, 0.0);
      b0[j] = b1[j] = 1.0;
      planes.push_back(b0);
      rhs.push_back(0.0);
      planes.push_back(b1);
      rhs.push_back(1.0);
    }
    const int np = static_cast<int>(planes.size());
    std::vector<int> idx(n);
    for (int j = 0; j < n; ++j) idx[j] = j;
    bool have = false;
    double best = 0.0;
    while (true) {
      std::vector<std::vector<double>> mm(n, std::vector<double>(n + 1));
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) mm[r][c] = planes[idx[r]][c];
        mm[r][n] = rhs[idx[r]];
      }
      bool singular = false;
      for (int col = 0; col < n && !singular; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
          if (std::abs(mm[r][col]) > std::abs(mm[piv][col])) piv = r;
        std::swap(mm[col], mm[piv]);
        if (std::abs(mm[col][col]) < 1e-9) {
          singular = true;
          break;
        }
        for (int r = 0; r < n; ++r) {
          if (r == col) continue;
          const double f = mm[r][col] / mm[col][col];
          for (int c = col; c <= n; ++c) mm[r][c] -= f * mm[col][c];
        }
      }
      if (!singular) {
        std::vector<double> x(n);
        for (int j = 0; j < n; ++j) x[j] = mm[j][n] / mm[j][j];
        bool feas = true;
        for (int j = 0; j < n && feas; ++j)
          feas = x[j] >= -1e-9 && x[j] <= 1.0 + 1e-9;
        for (const auto& con : p.constraints) {
          if (!feas) break;
          double v = -con.rhs;
          for (int j = 0; j < n; ++j) v += con.row[j] * x[j];
          feas = v <= 1e-9;
        }
        if (feas) {
          double obj = 0.0;
          for (int j = 0; j < n; ++j) obj += p.objective[j] * x[j];
          if (!have ||
              (p.sense == lp::Sense::Maximize ? obj > best : obj < best)) {
            have = true;
            best = obj;
          }
        }
      }
      int k = n - 1;
      while (k >= 0 && idx[k] == np - n + k) --k;
      if (k < 0) break;
      ++idx[k];
      for (int j = k + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
    }
    if (!have) continue;
    max_err = std::max(max_err, std::abs(sol.objective_value - best));
    ++solved;
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "programs=%d max_error=%.3g", solved, max_err);
  report("lp-vertex-oracle", solved == 50 && max_err < 1e-9, buf);
}

void check_heatmap_symmetry() {
  Scenario sc;
  sc.mode = "wcs";
  sc.distance_km = 100.0;
  sc.decoy.nu = 0.01;
  sc.sweep = {"delta_z_alice", 0.0, 0.126, 5};
  sc.sweep2 = {"delta_z_bob", 0.0, 0.126, 5};
  sc.jobs = 4;
  const auto grid = scenario::heatmap(sc);
  double asym = 0.0;
  bool all_ok = true;
  double max_rate = -1.0;
  int max_at = -1;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const auto& a = grid[5 * i + j];
      const auto& b = grid[5 * j + i];
      all_ok = all_ok && a.ok;
      if (!a.ok || !b.ok) continue;
      asym = std::max(asym, std::abs(a.result.r_raw - b.result.r_raw));
      if (a.result.r_raw > max_rate) {
        max_rate = a.result.r_raw;
        max_at = 5 * i + j;
      }
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max_transpose_diff=%.3g argmax_cell=%d", asym,
                max_at);
  report("heatmap-symmetry", all_ok && asym < 1e-9 && max_at == 0, buf);
}

}  // namespace

int main() {
  check_roundtrip();
  check_ideal_fixed_point();
  check_beta_invariance();
  check_decoy_bracketing();
  check_flaw_robustness();
  check_basis_asymmetry();
  check_lp_oracle();
  check_heatmap_symmetry();
  std::printf("%d failure(s)\n", g_failures);
  return g_failures;
}
