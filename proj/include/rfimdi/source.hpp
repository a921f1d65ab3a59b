#pragma once

// Flawed four-state preparation and the virtual X/Y states obtained from the
// entanglement-based picture of the Z emission.

#include <array>
#include <cmath>

#include "rfimdi/qalg.hpp"

namespace rfimdi::source {

using qalg::BlochState;
using qalg::cplx;
using qalg::HermOp2;

enum class StateLabel : int { Z0 = 0, Z1 = 1, X0 = 2, Y0 = 3 };

inline constexpr std::array<StateLabel, 4> kStateLabels{
    StateLabel::Z0, StateLabel::Z1, StateLabel::X0, StateLabel::Y0};

inline const char* label_name(StateLabel l) {
  switch (l) {
    case StateLabel::Z0: return "0Z";
    case StateLabel::Z1: return "1Z";
    case StateLabel::X0: return "0X";
    case StateLabel::Y0: return "0Y";
  }
  return "?";
}

enum class Basis : int { X = 0, Y = 1 };

// Preparation-flaw angles, all in radians. delta1/delta2 tilt the Z states,
// delta3/delta4 tilt the X/Y states, theta1/theta2 are phase-modulator
// offsets and beta is the slow reference-frame rotation.
struct FlawParams {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  double delta4 = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double beta = 0.0;
};

// Pure-state amplitudes (<0|phi>, <1|phi>) of the four prepared states.
inline std::array<cplx, 2> state_amplitudes(const FlawParams& p, StateLabel label) {
  const double quarter_pi = std::atan(1.0);
  const cplx i{0.0, 1.0};
  switch (label) {
    case StateLabel::Z0:
      return {std::cos(p.delta1 / 2), std::sin(p.delta1 / 2)};
    case StateLabel::Z1:
      return {std::sin(p.delta2 / 2), std::cos(p.delta2 / 2)};
    case StateLabel::X0: {
      const double a = quarter_pi + p.delta3 / 2;
      return {std::sin(a), std::cos(a) * std::exp(i * (p.theta1 + p.beta))};
    }
    case StateLabel::Y0: {
      const double a = quarter_pi + p.delta4 / 2;
      return {std::sin(a),
              std::cos(a) * std::exp(i * (2 * quarter_pi + p.theta2 + p.beta))};
    }
  }
  throw Error("prepare_actual: unknown state label");
}

inline BlochState prepare_actual(const FlawParams& p, StateLabel label) {
  const auto a = state_amplitudes(p, label);
  return qalg::bloch_decompose(HermOp2::pure(a[0], a[1]));
}

struct VirtualEntry {
  double prob = 0.0;        // P^vir, the emission probability of this outcome
  BlochState state{};       // normalized virtual state (weight 1)
};

// Index into the virtual array: {0X, 1X, 0Y, 1Y}.
inline int virt_index(int j, Basis b) { return 2 * static_cast<int>(b) + j; }

// The four virtual entries obtained by projecting register A of
// |Psi_Z> = (|0_Z>|phi_0Z> + |1_Z>|phi_1Z>)/sqrt(2) onto the X/Y outcomes.
// The preparations are pure, so the purification registers are trivial.
inline std::array<VirtualEntry, 4> virtual_states(const FlawParams& p) {
  const auto a = state_amplitudes(p, StateLabel::Z0);
  const auto b = state_amplitudes(p, StateLabel::Z1);
  const double overlap =
      std::abs(std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1]);
  if (overlap > 1.0 - 1e-12) {
    throw DegenerateSourceError(
        "virtual_states: Z-basis preparations coincide up to a phase");
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::array<VirtualEntry, 4> out{};
  for (int bi = 0; bi < 2; ++bi) {
    for (int j = 0; j < 2; ++j) {
      const cplx c0 = inv_sqrt2;
      const cplx c1 = (bi == 0) ? cplx{j == 0 ? 1.0 : -1.0, 0.0} * inv_sqrt2
                                : cplx{0.0, j == 0 ? 1.0 : -1.0} * inv_sqrt2;
      const cplx r0 = inv_sqrt2 * (c0 * a[0] + c1 * b[0]);
      const cplx r1 = inv_sqrt2 * (c0 * a[1] + c1 * b[1]);
      BlochState s = qalg::bloch_decompose(HermOp2::pure(r0, r1));
      const double prob = s.weight;
      s.weight = 1.0;
      out[virt_index(j, static_cast<Basis>(bi))] = VirtualEntry{prob, s};
    }
  }
  return out;
}

// A party's four actual states, emission probabilities and virtual entries.
struct PreparedEnsemble {
  std::array<BlochState, 4> actual{};                     // by StateLabel
  std::array<double, 4> emit_prob{0.25, 0.25, 0.25, 0.25};
  std::array<VirtualEntry, 4> virt{};                     // {0X,1X,0Y,1Y}

  const BlochState& actual_state(StateLabel l) const {
    return actual[static_cast<int>(l)];
  }
  double emission_prob(StateLabel l) const {
    return emit_prob[static_cast<int>(l)];
  }
  const VirtualEntry& virtual_entry(int j, Basis b) const {
    return virt[virt_index(j, b)];
  }
};

inline PreparedEnsemble prepare_ensemble(const FlawParams& p) {
  PreparedEnsemble e;
  for (StateLabel l : kStateLabels) {
    e.actual[static_cast<int>(l)] = prepare_actual(p, l);
  }
  e.virt = virtual_states(p);
  return e;
}

// The 16-component row multiplying the transfer-rate vector q, in the fixed
// component order [I*I, I*X, I*Y, I*Z, X*I, X*X, ..., Z*Z] (Alice first slot).
inline std::array<double, 16> pauli_row(const BlochState& a, const BlochState& b) {
  const std::array<double, 4> pa{1.0, a.px, a.py, a.pz};
  const std::array<double, 4> pb{1.0, b.px, b.py, b.pz};
  std::array<double, 16> row{};
  for (int l = 0; l < 4; ++l)
    for (int lp = 0; lp < 4; ++lp) row[4 * l + lp] = pa[l] * pb[lp];
  return row;
}

}  // namespace rfimdi::source
