#include <cmath>

#include "doctest.h"
#include "rfimdi/decoy.hpp"

using namespace rfimdi::decoy;
using rfimdi::NoSignalError;
using rfimdi::channel::MeasurementModel;
using rfimdi::channel::wcs_gains;
using rfimdi::source::Basis;
using rfimdi::source::FlawParams;
using rfimdi::source::prepare_ensemble;
using rfimdi::source::StateLabel;

namespace {

struct Setup {
  rfimdi::source::PreparedEnsemble ea, eb;
  MeasurementModel model;
  rfimdi::channel::GainTable gains;
  rfimdi::channel::TransferRates q_true;
};

Setup make_setup(double dist, double delta, const DecoySettings& s) {
  FlawParams p;
  p.delta1 = p.delta2 = p.delta3 = p.delta4 = delta;
  Setup out;
  out.ea = prepare_ensemble(p);
  out.eb = prepare_ensemble(p);
  out.model.dist_a = dist / 2;
  out.model.dist_b = dist / 2;
  out.q_true =
      rfimdi::channel::transfer_rates(rfimdi::channel::effective_operator(out.model));
  out.gains = wcs_gains(out.ea, out.eb, out.model, s.mu, s.nu, s.n_cut);
  return out;
}

}  // namespace

TEST_CASE("settings validation") {
  DecoySettings s;
  CHECK_NOTHROW(s.validate());
  s.nu = 0.4;
  CHECK_THROWS_AS(s.validate(), rfimdi::Error);
  s = DecoySettings{};
  s.n_cut = 1;
  CHECK_THROWS_AS(s.validate(), rfimdi::Error);
  s = DecoySettings{};
  s.intensity_prior = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(s.validate(), rfimdi::Error);
}

TEST_CASE("yield intervals bracket the ground truth at a mid-range setting") {
  DecoySettings s;
  const auto su = make_setup(50.0, 0.063, s);
  for (StateLabel la : rfimdi::source::kStateLabels) {
    for (StateLabel lb : rfimdi::source::kStateLabels) {
      const auto iv = bound_pair_yield(su.gains, la, lb, s);
      const double truth = rfimdi::channel::dot(
          rfimdi::source::pauli_row(su.ea.actual_state(la), su.eb.actual_state(lb)),
          su.q_true);
      CHECK(iv.lo <= truth + 1e-12);
      CHECK(iv.hi >= truth - 1e-12);
      CHECK(iv.lo <= iv.hi);
      CHECK(iv.lo >= 0.0);
      CHECK(iv.hi <= 1.0);
    }
  }
}

TEST_CASE("error-rate LP bounds bracket the exact reconstruction values") {
  DecoySettings s;
  s.nu = 0.01;
  const auto su = make_setup(50.0, 0.063, s);
  std::array<std::array<YieldInterval, 4>, 4> iv{};
  for (StateLabel la : rfimdi::source::kStateLabels)
    for (StateLabel lb : rfimdi::source::kStateLabels)
      iv[static_cast<int>(la)][static_cast<int>(lb)] =
          bound_pair_yield(su.gains, la, lb, s);
  const auto cons = q_constraints(iv, su.ea, su.eb);
  for (Basis a : {Basis::X, Basis::Y}) {
    for (Basis c : {Basis::X, Basis::Y}) {
      const auto [lo, hi] = bound_error_rate_lp(cons, su.ea, su.eb, a, c);
      const double exact = rfimdi::reconstruct::error_rate(su.q_true, su.ea, su.eb, a, c);
      CHECK(lo <= exact + 1e-9);
      CHECK(hi >= exact - 1e-9);
    }
  }
}

TEST_CASE("point intervals collapse the error bounds onto the exact values") {
  // feeding exact yields as zero-width intervals must pin the LP down to the
  // reconstruction answer within LP tolerance
  DecoySettings s;
  const auto su = make_setup(30.0, 0.1, s);
  std::array<std::array<YieldInterval, 4>, 4> iv{};
  for (StateLabel la : rfimdi::source::kStateLabels) {
    for (StateLabel lb : rfimdi::source::kStateLabels) {
      const double truth = rfimdi::channel::dot(
          rfimdi::source::pauli_row(su.ea.actual_state(la), su.eb.actual_state(lb)),
          su.q_true);
      iv[static_cast<int>(la)][static_cast<int>(lb)] = YieldInterval{truth, truth};
    }
  }
  const auto cons = q_constraints(iv, su.ea, su.eb);
  for (Basis a : {Basis::X, Basis::Y}) {
    for (Basis c : {Basis::X, Basis::Y}) {
      const auto [lo, hi] = bound_error_rate_lp(cons, su.ea, su.eb, a, c);
      const double exact = rfimdi::reconstruct::error_rate(su.q_true, su.ea, su.eb, a, c);
      CHECK(lo == doctest::Approx(exact).epsilon(1e-7));
      CHECK(hi == doctest::Approx(exact).epsilon(1e-7));
    }
  }
}

TEST_CASE("worst-case C from interval endpoints") {
  std::array<ErrorInterval, 4> e{};
  e[0] = {0.0, 0.0};
  e[1] = {0.5, 0.5};
  e[2] = {0.5, 0.5};
  e[3] = {0.0, 0.0};
  CHECK(worst_case_C(e) == doctest::Approx(2.0));
  e[0] = {0.4, 0.6};  // straddles one half -> contributes nothing
  CHECK(worst_case_C(e) == doctest::Approx(1.0));
  for (auto& iv : e) iv = {0.0, 0.1};
  CHECK(worst_case_C(e) == doctest::Approx(4.0 * 0.64));
  for (auto& iv : e) iv = {0.6, 0.9};
  CHECK(worst_case_C(e) == doctest::Approx(4.0 * 0.04));
}

TEST_CASE("zz bounds behave at distance zero") {
  DecoySettings s;
  s.nu = 0.01;
  const auto su = make_setup(0.0, 0.0, s);
  const auto zz = bound_zz(su.gains, s);
  // opposite-bit conditional yield is eta^2/2 each; bit-summed with the 1/4
  // pair weight gives eta^2/4 plus background corrections
  const double eta2 = 0.145 * 0.145;
  CHECK(zz.y11_low <= eta2 / 4 * 1.001);
  CHECK(zz.y11_low > eta2 / 4 * 0.9);
  CHECK(zz.e_up < 0.01);
  CHECK(zz.e_mumu < 0.01);
  CHECK(zz.q_mumu > 0.0);
  // q_mumu oracle: conditional ZZ gain from the gain table itself
  double direct = 0.0;
  using I = rfimdi::channel::Intensity;
  direct += su.gains(StateLabel::Z0, StateLabel::Z0, I::Signal, I::Signal);
  direct += su.gains(StateLabel::Z0, StateLabel::Z1, I::Signal, I::Signal);
  direct += su.gains(StateLabel::Z1, StateLabel::Z0, I::Signal, I::Signal);
  direct += su.gains(StateLabel::Z1, StateLabel::Z1, I::Signal, I::Signal);
  CHECK(zz.q_mumu == doctest::Approx(0.25 * direct * 16.0));
}

TEST_CASE("dark-count-dominated channel drives the zz error toward one half") {
  DecoySettings s;
  FlawParams p;
  MeasurementModel m;
  m.eta_det = 0.0;  // only dark counts click
  m.dark = 1e-4;
  const auto e = prepare_ensemble(p);
  const auto g = wcs_gains(e, e, m, s.mu, s.nu, s.n_cut);
  const auto zz = bound_zz(g, s);
  CHECK(zz.e_mumu == doctest::Approx(0.5));
}

TEST_CASE("zero gains raise a no-signal error") {
  DecoySettings s;
  FlawParams p;
  MeasurementModel m;
  m.eta_det = 0.0;
  m.dark = 0.0;
  const auto e = prepare_ensemble(p);
  const auto g = wcs_gains(e, e, m, s.mu, s.nu, s.n_cut);
  CHECK_THROWS_AS(bound_zz(g, s), NoSignalError);
}

TEST_CASE("intervals stay valid for nearly degenerate intensities") {
  DecoySettings s;
  s.mu = 0.3;
  s.nu = 0.29;
  const auto su = make_setup(20.0, 0.0, s);
  const auto iv = bound_pair_yield(su.gains, StateLabel::Z0, StateLabel::Z1, s);
  CHECK(iv.lo <= iv.hi);
  const double truth = rfimdi::channel::dot(
      rfimdi::source::pauli_row(su.ea.actual_state(StateLabel::Z0),
                                su.eb.actual_state(StateLabel::Z1)),
      su.q_true);
  CHECK(iv.lo <= truth + 1e-12);
  CHECK(iv.hi >= truth - 1e-12);
}

TEST_CASE("smaller decoy intensity gives tighter error upper bounds") {
  auto e_xx_hi = [](double nu) {
    DecoySettings s;
    s.nu = nu;
    const auto su = make_setup(50.0, 0.0, s);
    std::array<std::array<YieldInterval, 4>, 4> iv{};
    for (StateLabel la : rfimdi::source::kStateLabels)
      for (StateLabel lb : rfimdi::source::kStateLabels)
        iv[static_cast<int>(la)][static_cast<int>(lb)] =
            bound_pair_yield(su.gains, la, lb, s);
    const auto cons = q_constraints(iv, su.ea, su.eb);
    return bound_error_rate_lp(cons, su.ea, su.eb, Basis::X, Basis::X).second;
  };
  CHECK(e_xx_hi(0.01) < e_xx_hi(0.1));
}
