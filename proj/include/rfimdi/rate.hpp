#pragma once

// Eve-information bound and secret key rates for single-photon and
// weak-coherent sources.

#include <algorithm>
#include <cmath>

#include "rfimdi/errors.hpp"

namespace rfimdi::rate {

inline constexpr double kDefaultFEc = 1.16;

inline double binary_entropy(double x) {
  if (x < -1e-12 || x > 1.0 + 1e-12) {
    throw Error("binary_entropy: argument outside [0,1]");
  }
  x = std::clamp(x, 0.0, 1.0);
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

struct EveInfo {
  double i_e = 0.0;
  double u = 0.0;
  double v = 0.0;
};

// I_E = (1-e)H((1+u)/2) + eH((1+v)/2) with
// u = min(sqrt(C/2)/(1-e), 1), v = sqrt(C/2 - (1-e)^2 u^2)/e.
// e > 1/2 is abort-grade and maps to I_E = 1; u and v are clamped to [0,1]
// so the entropies stay defined for unphysical (C, e) combinations.
inline EveInfo eve_info(double c, double e_zz) {
  c = std::clamp(c, 0.0, 4.0);
  e_zz = std::max(e_zz, 0.0);
  if (e_zz > 0.5) return EveInfo{1.0, 0.0, 0.0};

  const double half_c = c / 2.0;
  const double u = std::min(std::sqrt(half_c) / (1.0 - e_zz), 1.0);
  double v = 0.0;
  if (e_zz > 0.0) {
    const double rad = std::max(half_c - (1.0 - e_zz) * (1.0 - e_zz) * u * u, 0.0);
    v = std::min(std::sqrt(rad) / e_zz, 1.0);
  }
  const double i_e = (1.0 - e_zz) * binary_entropy((1.0 + u) / 2.0) +
                     e_zz * binary_entropy((1.0 + v) / 2.0);
  return EveInfo{std::clamp(i_e, 0.0, 1.0), u, v};
}

struct RateResult {
  double r_raw = 0.0;
  double r_clamped = 0.0;
  double i_e = 0.0;
  double u = 0.0;
  double v = 0.0;
  double gain_term = 0.0;
  double ec_term = 0.0;
};

struct SpsInputs {
  double q11_zz = 0.0;  // gain of single-photon pairs in ZZ
  double e11_zz = 0.0;
  double c = 0.0;
  double f_ec = kDefaultFEc;
};

// R = Q11_ZZ (1 - I_E) - Q11_ZZ f H(e11_ZZ).
inline RateResult rate_sps(const SpsInputs& in) {
  const EveInfo ev = eve_info(in.c, in.e11_zz);
  RateResult out;
  out.i_e = ev.i_e;
  out.u = ev.u;
  out.v = ev.v;
  out.gain_term = in.q11_zz * (1.0 - ev.i_e);
  out.ec_term = in.q11_zz * in.f_ec * binary_entropy(std::min(in.e11_zz, 0.5));
  out.r_raw = out.gain_term - out.ec_term;
  out.r_clamped = std::max(out.r_raw, 0.0);
  return out;
}

struct WcsInputs {
  double p11 = 0.0;         // joint signal-signal single-photon probability
  double y11_zz_low = 0.0;
  double c_low = 0.0;
  double e_zz_up = 0.0;
  double q_zz_mumu = 0.0;
  double e_zz_mumu = 0.0;
  double f_ec = kDefaultFEc;
};

// R = P11 Y11_ZZ^L (1 - I_E(C_low, e_up)) - Q_ZZ^mumu f H(E_ZZ^mumu).
inline RateResult rate_wcs(const WcsInputs& in) {
  const EveInfo ev = eve_info(in.c_low, in.e_zz_up);
  RateResult out;
  out.i_e = ev.i_e;
  out.u = ev.u;
  out.v = ev.v;
  out.gain_term = in.p11 * in.y11_zz_low * (1.0 - ev.i_e);
  out.ec_term =
      in.q_zz_mumu * in.f_ec * binary_entropy(std::clamp(in.e_zz_mumu, 0.0, 1.0));
  out.r_raw = out.gain_term - out.ec_term;
  out.r_clamped = std::max(out.r_raw, 0.0);
  return out;
}

}  // namespace rfimdi::rate
