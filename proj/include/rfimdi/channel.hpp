#pragma once

// Ground-truth model of the announcement channel: the effective singlet
// operator with losses and background, its Pauli transfer rates, exact
// single-photon-pair yields, and weak-coherent decoy gains.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "rfimdi/qalg.hpp"
#include "rfimdi/source.hpp"

namespace rfimdi::channel {

using qalg::HermOp4;
using source::PreparedEnsemble;
using source::StateLabel;

struct MeasurementModel {
  double eta_det = 0.145;     // detector efficiency
  double dark = 6.02e-6;      // dark-count probability per detector per gate
  double loss_coeff = 0.2;    // fiber loss, dB/km
  double dist_a = 0.0;        // km, Alice to the measurement node
  double dist_b = 0.0;        // km, Bob to the measurement node

  double transmittance_a() const {
    return eta_det * std::pow(10.0, -loss_coeff * dist_a / 10.0);
  }
  double transmittance_b() const {
    return eta_det * std::pow(10.0, -loss_coeff * dist_b / 10.0);
  }

  // Accidental announcement probability per photon pair: a surviving photon
  // on one arm paired with a dark count in the complementary detector of the
  // coincidence pattern, or two dark counts.
  double background() const {
    const double ta = transmittance_a();
    const double tb = transmittance_b();
    return dark * (ta + tb) + 2.0 * dark * dark;
  }

  void validate() const {
    if (eta_det < 0.0 || eta_det > 1.0 || dark < 0.0 || dist_a < 0.0 ||
        dist_b < 0.0) {
      throw Error("MeasurementModel: parameter out of range");
    }
  }
};

// D = t_a t_b P(Psi-) + y0 I. Losses commute with the qubit encoding and the
// background is isotropic, so the announcement stays linear in rho_a (x) rho_b.
inline HermOp4 effective_operator(const MeasurementModel& m) {
  m.validate();
  const double tt = m.transmittance_a() * m.transmittance_b();
  return tt * qalg::singlet_projector() + m.background() * HermOp4::identity();
}

// q ordered as [I*I, I*X, I*Y, I*Z, X*I, ..., Z*Z].
struct TransferRates {
  std::array<double, 16> q{};

  double operator[](std::size_t k) const { return q[k]; }
};

inline double dot(const std::array<double, 16>& row, const TransferRates& q) {
  double s = 0.0;
  for (int k = 0; k < 16; ++k) s += row[k] * q.q[k];
  return s;
}

// q_{l,l'} = (1/4) Tr[D sigma_l (x) sigma_l'].
inline TransferRates transfer_rates(const HermOp4& d) {
  if (qalg::min_eigenvalue(d) < -1e-9) {
    throw InvalidChannelError("transfer_rates: operator is not PSD");
  }
  TransferRates out;
  for (int l = 0; l < 4; ++l) {
    for (int lp = 0; lp < 4; ++lp) {
      out.q[4 * l + lp] =
          0.25 * qalg::trace_product(
                     d, qalg::tensor(qalg::HermOp2::sigma(l),
                                     qalg::HermOp2::sigma(lp)));
    }
  }
  return out;
}

// Joint announcement rates per emitted pair, including the state-choice
// probabilities (1/16 by default).
struct YieldTable {
  std::array<std::array<double, 4>, 4> y{};  // [alice label][bob label]

  double operator()(StateLabel a, StateLabel b) const {
    return y[static_cast<int>(a)][static_cast<int>(b)];
  }
  double& at(StateLabel a, StateLabel b) {
    return y[static_cast<int>(a)][static_cast<int>(b)];
  }
};

inline YieldTable sps_yields(const PreparedEnsemble& ea,
                             const PreparedEnsemble& eb,
                             const TransferRates& q) {
  YieldTable out;
  for (StateLabel la : source::kStateLabels) {
    for (StateLabel lb : source::kStateLabels) {
      double v = ea.emission_prob(la) * eb.emission_prob(lb) *
                 dot(source::pauli_row(ea.actual_state(la), eb.actual_state(lb)), q);
      if (v < -1e-12) {
        throw InconsistentModelError("sps_yields: negative yield");
      }
      out.at(la, lb) = std::max(v, 0.0);
    }
  }
  return out;
}

enum class Intensity : int { Signal = 0, Decoy = 1, Vacuum = 2 };

// Gains keyed by (alice state, bob state, alice intensity, bob intensity).
struct GainTable {
  // [alice label][bob label][alice intensity][bob intensity]
  double g[4][4][3][3] = {};
  std::array<double, 3> intensity_value{};  // {mu, nu, 0}

  double operator()(StateLabel a, StateLabel b, Intensity ia, Intensity ib) const {
    return g[static_cast<int>(a)][static_cast<int>(b)][static_cast<int>(ia)]
            [static_cast<int>(ib)];
  }
};

inline double poisson_pmf(int n, double lambda) {
  if (lambda <= 0.0) return n == 0 ? 1.0 : 0.0;
  double p = std::exp(-lambda);
  for (int k = 1; k <= n; ++k) p *= lambda / k;
  return p;
}

// Conditional announcement probability for the photon-number pair (n, m),
// used for every (n, m) != (1, 1). Each of the n*m cross photon pairings can
// trigger the anti-symmetric coincidence independently with the same
// per-pair rate as a single-photon pair; identical states thus stay dark at
// any photon number, as interference demands. Accidentals need a click on
// each side: a surviving photon against a dark count, or two dark counts.
inline double multiphoton_yield(int n, int m, double t_a, double t_b,
                                double dark, double r_pair) {
  const double pa = 1.0 - std::pow(1.0 - t_a, n);
  const double pb = 1.0 - std::pow(1.0 - t_b, m);
  const double y0 = dark * (pa + pb) + 2.0 * dark * dark;
  r_pair = std::clamp(r_pair, 0.0, 1.0);
  return 1.0 - (1.0 - y0) * std::pow(1.0 - r_pair, double(n) * double(m));
}

// Decoy-mode gains: Poisson mixture over photon numbers up to n_cut, with the
// exact Bloch-model yield for the (1,1) component.
inline GainTable wcs_gains(const PreparedEnsemble& ea, const PreparedEnsemble& eb,
                           const MeasurementModel& m, double mu, double nu,
                           int n_cut) {
  if (!(mu > nu) || nu < 0.0 || n_cut < 2) {
    throw Error("wcs_gains: invalid intensities");
  }
  const double ta = m.transmittance_a();
  const double tb = m.transmittance_b();
  const TransferRates q = transfer_rates(effective_operator(m));
  // Signal-only transfer rates, used for the per-photon-pair click rate.
  const TransferRates q_sig = transfer_rates(ta * tb * qalg::singlet_projector());

  const std::array<double, 3> lam{mu, nu, 0.0};
  std::array<std::vector<double>, 3> pois;
  for (int k = 0; k < 3; ++k) {
    pois[k].resize(n_cut + 1);
    for (int n = 0; n <= n_cut; ++n) pois[k][n] = poisson_pmf(n, lam[k]);
  }

  GainTable out;
  out.intensity_value = lam;
  for (StateLabel la : source::kStateLabels) {
    for (StateLabel lb : source::kStateLabels) {
      // Conditional single-photon-pair yield from the exact Bloch model.
      const auto row = source::pauli_row(ea.actual_state(la), eb.actual_state(lb));
      const double y11 = dot(row, q);
      const double r_pair = std::max(dot(row, q_sig), 0.0);
      const double pstate = ea.emission_prob(la) * eb.emission_prob(lb);
      for (int ia = 0; ia < 3; ++ia) {
        for (int ib = 0; ib < 3; ++ib) {
          double acc = 0.0;
          for (int n = 0; n <= n_cut; ++n) {
            for (int mm = 0; mm <= n_cut; ++mm) {
              const double ynm = (n == 1 && mm == 1)
                                     ? y11
                                     : multiphoton_yield(n, mm, ta, tb, m.dark, r_pair);
              acc += pois[ia][n] * pois[ib][mm] * ynm;
            }
          }
          const double gain = pstate * acc;
          if (gain < -1e-12 || gain > 1.0 + 1e-12) {
            throw InconsistentModelError("wcs_gains: gain outside [0,1]");
          }
          out.g[static_cast<int>(la)][static_cast<int>(lb)][ia][ib] =
              std::clamp(gain, 0.0, 1.0);
        }
      }
    }
  }
  return out;
}

}  // namespace rfimdi::channel
