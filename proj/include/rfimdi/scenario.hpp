#pragma once

// Scenario runner: config parsing, the SPS and WCS analysis pipelines,
// one- and two-variable sweeps, intensity optimization, CSV output and the
// self-verification suite.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rfimdi/channel.hpp"
#include "rfimdi/decoy.hpp"
#include "rfimdi/lpcore.hpp"
#include "rfimdi/rate.hpp"
#include "rfimdi/reconstruct.hpp"
#include "rfimdi/source.hpp"

namespace rfimdi::scenario {

using channel::MeasurementModel;
using decoy::DecoySettings;
using source::Basis;
using source::FlawParams;

struct SweepSpec {
  std::string variable;
  double from = 0.0;
  double to = 0.0;
  int steps = 0;

  bool enabled() const { return steps > 0; }
  void validate() const {
    if (steps < 2) throw Error("sweep: steps must be >= 2");
    if (!(from < to)) throw Error("sweep: require from < to");
  }
  double at(int i) const { return from + (to - from) * i / (steps - 1); }
};

struct Scenario {
  std::string mode = "wcs";  // "sps" or "wcs"
  FlawParams alice, bob;
  MeasurementModel model;    // dist_a/dist_b derived from distance_km
  double distance_km = 0.0;  // total Alice-Bob distance; node in the middle
  DecoySettings decoy;
  double f_ec = rate::kDefaultFEc;
  bool optimize_intensities = false;  // re-optimize (mu, nu) per grid point
  SweepSpec sweep;
  SweepSpec sweep2;  // second axis for heatmaps
  int jobs = 1;
};

struct PointResult {
  double r_raw = 0.0;
  double r_clamped = 0.0;
  double i_e = 0.0;
  double c_low = 0.0;
  double e_zz_up = 0.0;
  double e_zz_mumu = 0.0;
  double q_zz_mumu = 0.0;
};

struct RunRecord {
  double value = 0.0;
  double value2 = 0.0;
  bool has_value2 = false;
  bool ok = false;
  PointResult result{};
  double mu_opt = 0.0;
  double nu_opt = 0.0;
  bool has_opt = false;
  std::string error;
};

// ---------------------------------------------------------------------------
// Config: flat "key = value" lines with dotted section keys; '#' comments.

inline std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return (b == std::string::npos) ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    }
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

inline void apply_config_entry(Scenario& sc, const std::string& key,
                               const std::string& value) {
  auto num = [&]() {
    try {
      std::size_t pos = 0;
      const double v = std::stod(value, &pos);
      if (pos != value.size()) throw Error("");
      return v;
    } catch (...) {
      throw Error("config: bad numeric value for " + key);
    }
  };
  auto flaw = [&](FlawParams& p, const std::string& field) -> bool {
    if (field == "delta1") p.delta1 = num();
    else if (field == "delta2") p.delta2 = num();
    else if (field == "delta3") p.delta3 = num();
    else if (field == "delta4") p.delta4 = num();
    else if (field == "theta1") p.theta1 = num();
    else if (field == "theta2") p.theta2 = num();
    else if (field == "beta") p.beta = num();
    else return false;
    return true;
  };
  const auto dot = key.find('.');
  const std::string section = (dot == std::string::npos) ? "" : key.substr(0, dot);
  const std::string field = (dot == std::string::npos) ? key : key.substr(dot + 1);

  if (section == "alice" && flaw(sc.alice, field)) return;
  if (section == "bob" && flaw(sc.bob, field)) return;
  if (section == "channel") {
    if (field == "eta_det") { sc.model.eta_det = num(); return; }
    if (field == "dark") { sc.model.dark = num(); return; }
    if (field == "loss_coeff") { sc.model.loss_coeff = num(); return; }
  }
  if (section == "decoy") {
    if (field == "mu") { sc.decoy.mu = num(); return; }
    if (field == "nu") { sc.decoy.nu = num(); return; }
    if (field == "n_cut") { sc.decoy.n_cut = static_cast<int>(num()); return; }
  }
  if (section == "rate" && field == "f_ec") { sc.f_ec = num(); return; }
  if (section == "sweep" || section == "sweep2") {
    SweepSpec& sw = (section == "sweep") ? sc.sweep : sc.sweep2;
    if (field == "variable") { sw.variable = value; return; }
    if (field == "from") { sw.from = num(); return; }
    if (field == "to") { sw.to = num(); return; }
    if (field == "steps") { sw.steps = static_cast<int>(num()); return; }
  }
  if (key == "mode") {
    if (value != "sps" && value != "wcs") throw Error("config: mode must be sps or wcs");
    sc.mode = value;
    return;
  }
  if (key == "distance") { sc.distance_km = num(); return; }
  if (key == "optimize") {
    if (value == "true") sc.optimize_intensities = true;
    else if (value == "false") sc.optimize_intensities = false;
    else throw Error("config: optimize must be true or false");
    return;
  }
  throw Error("config: unknown key '" + key + "'");
}

inline Scenario parse_config(std::istream& in) {
  Scenario sc;
  for (const auto& [k, v] : parse_key_values(in)) apply_config_entry(sc, k, v);
  return sc;
}

inline Scenario load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  return parse_config(in);
}

// Sweep variables.
inline void apply_variable(Scenario& sc, const std::string& name, double v) {
  auto set_z = [v](FlawParams& p) { p.delta1 = v; p.delta2 = v; };
  auto set_xy = [v](FlawParams& p) { p.delta3 = v; p.delta4 = v; };
  if (name == "distance") { sc.distance_km = v; return; }
  if (name == "delta_z") { set_z(sc.alice); set_z(sc.bob); return; }
  if (name == "delta_xy") { set_xy(sc.alice); set_xy(sc.bob); return; }
  if (name == "delta_all") {
    set_z(sc.alice); set_xy(sc.alice);
    set_z(sc.bob); set_xy(sc.bob);
    return;
  }
  if (name == "delta_z_alice") { set_z(sc.alice); return; }
  if (name == "delta_z_bob") { set_z(sc.bob); return; }
  if (name == "beta_alice") { sc.alice.beta = v; return; }
  if (name == "beta_bob") { sc.bob.beta = v; return; }
  if (name == "mu") { sc.decoy.mu = v; return; }
  if (name == "nu") { sc.decoy.nu = v; return; }
  throw Error("unknown sweep variable '" + name + "'");
}

// ---------------------------------------------------------------------------
// Pipelines.

inline MeasurementModel concrete_model(const Scenario& sc) {
  MeasurementModel m = sc.model;
  m.dist_a = sc.distance_km / 2.0;
  m.dist_b = sc.distance_km / 2.0;
  return m;
}

inline PointResult evaluate_sps(const Scenario& sc) {
  const auto ea = source::prepare_ensemble(sc.alice);
  const auto eb = source::prepare_ensemble(sc.bob);
  const auto d = channel::effective_operator(concrete_model(sc));
  const auto yields = channel::sps_yields(ea, eb, channel::transfer_rates(d));

  // Reconstruction path: recover q from the sixteen observed yields.
  const auto q = reconstruct::solve_q(reconstruct::build_system(ea, eb, yields));

  const double e_xx = reconstruct::error_rate(q, ea, eb, Basis::X, Basis::X);
  const double e_xy = reconstruct::error_rate(q, ea, eb, Basis::X, Basis::Y);
  const double e_yx = reconstruct::error_rate(q, ea, eb, Basis::Y, Basis::X);
  const double e_yy = reconstruct::error_rate(q, ea, eb, Basis::Y, Basis::Y);
  const double c = reconstruct::quantity_C(e_xx, e_xy, e_yx, e_yy);

  using source::StateLabel;
  const double y00 = yields(StateLabel::Z0, StateLabel::Z0);
  const double y01 = yields(StateLabel::Z0, StateLabel::Z1);
  const double y10 = yields(StateLabel::Z1, StateLabel::Z0);
  const double y11 = yields(StateLabel::Z1, StateLabel::Z1);
  const double q_zz = y00 + y01 + y10 + y11;
  if (q_zz <= 0.0) throw NoSignalError("sps pipeline: zero ZZ gain");
  const double e_zz = (y00 + y11) / q_zz;

  const auto rr = rate::rate_sps({q_zz, e_zz, c, sc.f_ec});
  return PointResult{rr.r_raw, rr.r_clamped, rr.i_e, c, e_zz, e_zz, q_zz};
}

inline PointResult evaluate_wcs(const Scenario& sc) {
  sc.decoy.validate();
  const auto ea = source::prepare_ensemble(sc.alice);
  const auto eb = source::prepare_ensemble(sc.bob);
  const MeasurementModel m = concrete_model(sc);
  const auto gains =
      channel::wcs_gains(ea, eb, m, sc.decoy.mu, sc.decoy.nu, sc.decoy.n_cut);

  std::array<std::array<decoy::YieldInterval, 4>, 4> intervals{};
  for (source::StateLabel la : source::kStateLabels) {
    for (source::StateLabel lb : source::kStateLabels) {
      intervals[static_cast<int>(la)][static_cast<int>(lb)] =
          decoy::bound_pair_yield(gains, la, lb, sc.decoy);
    }
  }
  const auto cons = decoy::q_constraints(intervals, ea, eb);

  std::array<decoy::ErrorInterval, 4> e_iv{};
  const std::array<std::pair<Basis, Basis>, 4> pairs{
      {{Basis::X, Basis::X}, {Basis::X, Basis::Y},
       {Basis::Y, Basis::X}, {Basis::Y, Basis::Y}}};
  for (int k = 0; k < 4; ++k) {
    const auto [lo, hi] =
        decoy::bound_error_rate_lp(cons, ea, eb, pairs[k].first, pairs[k].second);
    e_iv[k] = decoy::ErrorInterval{lo, hi};
  }
  const double c_low = decoy::worst_case_C(e_iv);

  const auto zz = decoy::bound_zz(gains, sc.decoy);
  const double p1 = sc.decoy.mu * std::exp(-sc.decoy.mu);
  const auto rr = rate::rate_wcs({p1 * p1, zz.y11_low, c_low, zz.e_up,
                                  zz.q_mumu, zz.e_mumu, sc.f_ec});
  return PointResult{rr.r_raw, rr.r_clamped, rr.i_e,
                     c_low,    zz.e_up,      zz.e_mumu, zz.q_mumu};
}

inline PointResult evaluate_point(const Scenario& sc) {
  return sc.mode == "sps" ? evaluate_sps(sc) : evaluate_wcs(sc);
}

// ---------------------------------------------------------------------------
// Intensity optimization: shrinking-grid descent over (mu, nu).

struct OptimizedIntensities {
  double mu = 0.0;
  double nu = 0.0;
  double r_raw = 0.0;
  bool positive = false;  // false => best value still has no positive key
};

inline OptimizedIntensities optimize_intensities(const Scenario& sc) {
  if (sc.mode != "wcs") throw Error("optimize_intensities: wcs mode only");
  double mu_lo = 0.05, mu_hi = 0.8;
  double nu_lo = 0.01, nu_hi = 0.8;
  OptimizedIntensities best;
  bool have = false;
  constexpr int kRounds = 3, kGrid = 10;
  for (int round = 0; round < kRounds; ++round) {
    for (int i = 0; i < kGrid; ++i) {
      const double mu = mu_lo + (mu_hi - mu_lo) * i / (kGrid - 1);
      const double nu_top = std::min(nu_hi, 0.9 * mu);
      if (nu_top <= nu_lo) continue;
      for (int j = 0; j < kGrid; ++j) {
        const double nu = nu_lo + (nu_top - nu_lo) * j / (kGrid - 1);
        Scenario trial = sc;
        trial.decoy.mu = mu;
        trial.decoy.nu = nu;
        double r;
        try {
          r = evaluate_wcs(trial).r_raw;
        } catch (const Error&) {
          continue;
        }
        if (!have || r > best.r_raw) {
          have = true;
          best.mu = mu;
          best.nu = nu;
          best.r_raw = r;
        }
      }
    }
    if (!have) break;
    // Shrink the box around the incumbent.
    const double mu_span = (mu_hi - mu_lo) / (kGrid - 1);
    const double nu_span = (nu_hi - nu_lo) / (kGrid - 1);
    mu_lo = std::max(0.05, best.mu - mu_span);
    mu_hi = std::min(0.8, best.mu + mu_span);
    nu_lo = std::max(0.01, best.nu - nu_span);
    nu_hi = std::min(0.8, best.nu + nu_span);
  }
  if (!have) throw Error("optimize_intensities: no feasible grid point");
  best.positive = best.r_raw > 0.0;
  return best;
}

// ---------------------------------------------------------------------------
// Sweeps.

namespace detail {

// Evaluates fn(i) for i in [0, n) over `jobs` threads; exceptions propagate.
inline void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline RunRecord evaluate_record(const Scenario& sc) {
  RunRecord rec;
  try {
    if (sc.mode == "wcs" && sc.optimize_intensities) {
      const auto opt = optimize_intensities(sc);
      Scenario at_opt = sc;
      at_opt.decoy.mu = opt.mu;
      at_opt.decoy.nu = opt.nu;
      rec.result = evaluate_wcs(at_opt);
      rec.mu_opt = opt.mu;
      rec.nu_opt = opt.nu;
      rec.has_opt = true;
    } else {
      rec.result = evaluate_point(sc);
    }
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

}  // namespace detail

// One-variable sweep; per-point errors are recorded and the run continues.
inline std::vector<RunRecord> run_scenario(const Scenario& sc) {
  sc.sweep.validate();
  std::vector<RunRecord> out(sc.sweep.steps);
  detail::parallel_for(sc.sweep.steps, sc.jobs, [&](int i) {
    const double v = sc.sweep.at(i);
    Scenario point = sc;
    apply_variable(point, sc.sweep.variable, v);
    out[i] = detail::evaluate_record(point);
    out[i].value = v;
  });
  return out;
}

// Two-variable grid, row-major in (sweep, sweep2).
inline std::vector<RunRecord> heatmap(const Scenario& sc) {
  sc.sweep.validate();
  sc.sweep2.validate();
  const int n1 = sc.sweep.steps, n2 = sc.sweep2.steps;
  std::vector<RunRecord> out(static_cast<std::size_t>(n1) * n2);
  detail::parallel_for(n1 * n2, sc.jobs, [&](int k) {
    const int i = k / n2, j = k % n2;
    const double v1 = sc.sweep.at(i);
    const double v2 = sc.sweep2.at(j);
    Scenario point = sc;
    apply_variable(point, sc.sweep.variable, v1);
    apply_variable(point, sc.sweep2.variable, v2);
    out[k] = detail::evaluate_record(point);
    out[k].value = v1;
    out[k].value2 = v2;
    out[k].has_value2 = true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// CSV output: fixed header, 12-significant-digit floats, byte-stable.

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline void write_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  os << "value,value2,R_raw,R_clamped,I_E,C_low,e_zz_up,E_zz_mumu,Q_zz_mumu,"
        "mu_opt,nu_opt,error\n";
  for (const auto& r : records) {
    os << format_double(r.value) << ',';
    os << (r.has_value2 ? format_double(r.value2) : "") << ',';
    if (r.ok) {
      const auto& p = r.result;
      os << format_double(p.r_raw) << ',' << format_double(p.r_clamped) << ','
         << format_double(p.i_e) << ',' << format_double(p.c_low) << ','
         << format_double(p.e_zz_up) << ',' << format_double(p.e_zz_mumu) << ','
         << format_double(p.q_zz_mumu) << ',';
    } else {
      os << ",,,,,,,";
    }
    os << (r.has_opt ? format_double(r.mu_opt) : "") << ','
       << (r.has_opt ? format_double(r.nu_opt) : "") << ',';
    std::string msg = r.error;
    std::replace(msg.begin(), msg.end(), ',', ';');
    os << msg << '\n';
  }
}

inline std::string csv_string(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  write_csv(os, records);
  return os.str();
}

// ---------------------------------------------------------------------------
// Self-verification: cross-module oracle checks with per-check max error.
// `corrupt_roundtrip` is a test hook that scrambles the recovered q ordering
// so the negative control in the test suite can observe a failure.

inline bool verify(std::ostream& os, bool corrupt_roundtrip = false) {
  bool all_ok = true;
  auto report = [&](const char* name, double err, double tol) {
    const bool ok = err < tol;
    all_ok = all_ok && ok;
    os << (ok ? "PASS" : "FAIL") << "  " << name << "  max_error="
       << format_double(err) << "  tolerance=" << format_double(tol) << "\n";
  };

  // Bloch round-trip on random Hermitian operators.
  {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double err = 0.0;
    for (int k = 0; k < 500; ++k) {
      const qalg::cplx off{u(rng), u(rng)};
      const auto op = qalg::HermOp2::from_entries(u(rng) + 1.5, off,
                                                  std::conj(off), u(rng) + 1.5);
      err = std::max(err, qalg::bloch_compose(qalg::bloch_decompose(op))
                              .max_abs_diff(op));
    }
    report("bloch-roundtrip", err, 1e-12);
  }

  // Transfer-rate reconstruction round-trip through random PSD channels.
  {
    std::mt19937_64 rng(67890);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    double err = 0.0;
    for (int k = 0; k < 50; ++k) {
      std::array<qalg::cplx, 16> g{};
      for (auto& v : g) v = qalg::cplx{u(rng), u(rng)};
      std::array<qalg::cplx, 16> d{};
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
          for (int i = 0; i < 4; ++i)
            d[4 * r + c] += g[4 * r + i] * std::conj(g[4 * c + i]);
      double tr = 0.0;
      for (int i = 0; i < 4; ++i) tr += d[5 * i].real();
      for (auto& v : d) v /= 4.0 * tr;
      const auto op = qalg::HermOp4::from_entries(d);
      const auto q_true = channel::transfer_rates(op);

      FlawParams pa{0.2 * u(rng), 0.2 * u(rng), 0.2 * u(rng), 0.2 * u(rng),
                    0.2 * u(rng), 0.2 * u(rng), angle(rng)};
      FlawParams pb{0.2 * u(rng), 0.2 * u(rng), 0.2 * u(rng), 0.2 * u(rng),
                    0.2 * u(rng), 0.2 * u(rng), angle(rng)};
      const auto ea = source::prepare_ensemble(pa);
      const auto eb = source::prepare_ensemble(pb);
      const auto yields = channel::sps_yields(ea, eb, q_true);
      auto q_rec = reconstruct::solve_q(reconstruct::build_system(ea, eb, yields));
      if (corrupt_roundtrip) std::swap(q_rec.q[1], q_rec.q[4]);
      for (int i = 0; i < 16; ++i) {
        err = std::max(err, std::abs(q_rec.q[i] - q_true.q[i]));
      }
    }
    report("reconstruction-roundtrip", err, 1e-9);
  }

  // Reference-frame invariance of C for the pure singlet channel.
  {
    const auto q = channel::transfer_rates(qalg::singlet_projector());
    double err = 0.0;
    for (int i = 0; i < 7; ++i) {
      for (int j = 0; j < 7; ++j) {
        FlawParams pa, pb;
        pa.beta = 6.283185307179586 * i / 7;
        pb.beta = 6.283185307179586 * j / 7;
        const auto ea = source::prepare_ensemble(pa);
        const auto eb = source::prepare_ensemble(pb);
        const double c = reconstruct::quantity_C(
            reconstruct::error_rate(q, ea, eb, Basis::X, Basis::X),
            reconstruct::error_rate(q, ea, eb, Basis::X, Basis::Y),
            reconstruct::error_rate(q, ea, eb, Basis::Y, Basis::X),
            reconstruct::error_rate(q, ea, eb, Basis::Y, Basis::Y));
        err = std::max(err, std::abs(c - 2.0));
      }
    }
    report("beta-invariance", err, 1e-9);
  }

  // LP solver versus exhaustive vertex enumeration on tiny box programs.
  {
    std::mt19937_64 rng(24680);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    double err = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 3;
      lp::LinearProgram p;
      p.sense = (trial % 2 == 0) ? lp::Sense::Maximize : lp::Sense::Minimize;
      p.objective.resize(n);
      for (auto& c : p.objective) c = coeff(rng);
      p.lower.assign(n, 0.0);
      p.upper.assign(n, 1.0);
      for (int c = 0; c < 3; ++c) {
        lp::Constraint con;
        con.row.resize(n);
        double mid = 0.0;
        for (int j = 0; j < n; ++j) {
          con.row[j] = coeff(rng);
          mid += 0.5 * con.row[j];
        }
        con.rel = lp::Relation::LessEq;
        con.rhs = mid + 0.3;  // keep the box midpoint feasible
        p.constraints.push_back(con);
      }
      const auto sol = lp::solve_lp(p);
      // Enumerate all intersections of n active planes drawn from the
      // constraint rows and bound planes.
      std::vector<lp::Constraint> planes = p.constraints;
      for (int j = 0; j < n; ++j) {
        lp::Constraint b0, b1;
        b0.row.assign(n, 0.0);
        b0.row[j] = 1.0;
        b0.rhs = 0.0;
        b1.row.assign(n, 0.0);
        b1.row[j] = 1.0;
        b1.rhs = 1.0;
        planes.push_back(b0);
        planes.push_back(b1);
      }
      const int np = static_cast<int>(planes.size());
      double best = 0.0;
      bool have = false;
      for (int a = 0; a < np; ++a) {
        for (int b = a + 1; b < np; ++b) {
          for (int c = b + 1; c < np; ++c) {
            double m3[3][4];
            const int sel[3] = {a, b, c};
            for (int r = 0; r < 3; ++r) {
              for (int j = 0; j < 3; ++j) m3[r][j] = planes[sel[r]].row[j];
              m3[r][3] = planes[sel[r]].rhs;
            }
            bool singular = false;
            for (int col = 0; col < 3 && !singular; ++col) {
              int piv = col;
              for (int r = col + 1; r < 3; ++r) {
                if (std::abs(m3[r][col]) > std::abs(m3[piv][col])) piv = r;
              }
              for (int j = 0; j < 4; ++j) std::swap(m3[col][j], m3[piv][j]);
              if (std::abs(m3[col][col]) < 1e-9) { singular = true; break; }
              for (int r = 0; r < 3; ++r) {
                if (r == col) continue;
                const double f = m3[r][col] / m3[col][col];
                for (int j = 0; j < 4; ++j) m3[r][j] -= f * m3[col][j];
              }
            }
            if (singular) continue;
            double x[3];
            for (int j = 0; j < 3; ++j) x[j] = m3[j][3] / m3[j][j];
            bool feas = true;
            for (int j = 0; j < 3 && feas; ++j) {
              feas = x[j] >= -1e-9 && x[j] <= 1.0 + 1e-9;
            }
            for (const auto& con : p.constraints) {
              if (!feas) break;
              double v = -con.rhs;
              for (int j = 0; j < 3; ++j) v += con.row[j] * x[j];
              feas = v <= 1e-9;
            }
            if (!feas) continue;
            double obj = 0.0;
            for (int j = 0; j < 3; ++j) obj += p.objective[j] * x[j];
            if (!have || (p.sense == lp::Sense::Maximize ? obj > best : obj < best)) {
              best = obj;
              have = true;
            }
          }
        }
      }
      if (have && sol.status == lp::Status::Optimal) {
        err = std::max(err, std::abs(sol.objective_value - best));
      } else {
        err = std::max(err, 1.0);  // disagreement about feasibility
      }
    }
    report("lp-vertex-oracle", err, 1e-9);
  }

  // Decoy bracketing against channel ground truth at one realistic setting.
  {
    Scenario sc;
    sc.distance_km = 50.0;
    apply_variable(sc, "delta_all", 0.063);
    const MeasurementModel m = concrete_model(sc);
    const auto ea = source::prepare_ensemble(sc.alice);
    const auto eb = source::prepare_ensemble(sc.bob);
    const auto q_true = channel::transfer_rates(channel::effective_operator(m));
    const auto gains =
        channel::wcs_gains(ea, eb, m, sc.decoy.mu, sc.decoy.nu, sc.decoy.n_cut);
    double err = 0.0;
    for (source::StateLabel la : source::kStateLabels) {
      for (source::StateLabel lb : source::kStateLabels) {
        const auto iv = decoy::bound_pair_yield(gains, la, lb, sc.decoy);
        const double truth = channel::dot(
            source::pauli_row(ea.actual_state(la), eb.actual_state(lb)), q_true);
        err = std::max(err, std::max(iv.lo - truth, truth - iv.hi));
      }
    }
    report("decoy-bracketing", err, 1e-10);
  }

  os << (all_ok ? "verification passed\n" : "verification FAILED\n");
  return all_ok;
}

}  // namespace rfimdi::scenario
