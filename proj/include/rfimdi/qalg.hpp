#pragma once

// Minimal complex-Hermitian algebra for one- and two-qubit operators plus
// Bloch-vector conversions. Everything is a value type; all functions are pure.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

#include "rfimdi/errors.hpp"

namespace rfimdi::qalg {

using cplx = std::complex<double>;

inline constexpr double kHermTol = 1e-9;

// Weight (trace) plus Bloch coefficients of the normalized operator.
struct BlochState {
  double weight = 0.0;
  double px = 0.0;
  double py = 0.0;
  double pz = 0.0;

  double norm() const { return std::sqrt(px * px + py * py + pz * pz); }
};

class HermOp2 {
 public:
  HermOp2() = default;

  // Validates conjugate symmetry within kHermTol.
  static HermOp2 from_entries(cplx e00, cplx e01, cplx e10, cplx e11) {
    if (std::abs(e01 - std::conj(e10)) > kHermTol ||
        std::abs(e00.imag()) > kHermTol || std::abs(e11.imag()) > kHermTol) {
      throw InvalidOperatorError("2x2 operator is not Hermitian");
    }
    return HermOp2({e00, e01, e10, e11});
  }

  // |a><a| for the unnormalized amplitude vector (a0, a1).
  static HermOp2 pure(cplx a0, cplx a1) {
    return HermOp2({a0 * std::conj(a0), a0 * std::conj(a1),
                    a1 * std::conj(a0), a1 * std::conj(a1)});
  }

  // k: 0=I, 1=X, 2=Y, 3=Z.
  static HermOp2 sigma(int k) {
    const cplx i{0.0, 1.0};
    switch (k) {
      case 0: return HermOp2({1, 0, 0, 1});
      case 1: return HermOp2({0, 1, 1, 0});
      case 2: return HermOp2({0, -i, i, 0});
      case 3: return HermOp2({1, 0, 0, -1});
      default: throw Error("sigma index out of range");
    }
  }

  cplx operator()(int r, int c) const { return e_[2 * r + c]; }

  double trace() const { return (e_[0] + e_[3]).real(); }

  bool is_hermitian(double tol = kHermTol) const {
    return std::abs(e_[1] - std::conj(e_[2])) <= tol &&
           std::abs(e_[0].imag()) <= tol && std::abs(e_[3].imag()) <= tol;
  }

  friend HermOp2 operator+(const HermOp2& a, const HermOp2& b) {
    std::array<cplx, 4> r;
    for (int k = 0; k < 4; ++k) r[k] = a.e_[k] + b.e_[k];
    return HermOp2(r);
  }
  friend HermOp2 operator-(const HermOp2& a, const HermOp2& b) {
    std::array<cplx, 4> r;
    for (int k = 0; k < 4; ++k) r[k] = a.e_[k] - b.e_[k];
    return HermOp2(r);
  }
  friend HermOp2 operator*(double s, const HermOp2& a) {
    std::array<cplx, 4> r;
    for (int k = 0; k < 4; ++k) r[k] = s * a.e_[k];
    return HermOp2(r);
  }

  double max_abs_diff(const HermOp2& o) const {
    double m = 0.0;
    for (int k = 0; k < 4; ++k) m = std::max(m, std::abs(e_[k] - o.e_[k]));
    return m;
  }

 private:
  explicit HermOp2(std::array<cplx, 4> e) : e_(e) {}
  std::array<cplx, 4> e_{};
};

class HermOp4 {
 public:
  HermOp4() = default;

  // Row-major 4x4 entries; validates conjugate symmetry within kHermTol.
  static HermOp4 from_entries(const std::array<cplx, 16>& e) {
    for (int r = 0; r < 4; ++r) {
      for (int c = r; c < 4; ++c) {
        if (std::abs(e[4 * r + c] - std::conj(e[4 * c + r])) > kHermTol) {
          throw InvalidOperatorError("4x4 operator is not Hermitian");
        }
      }
    }
    return HermOp4(e);
  }

  static HermOp4 identity() {
    std::array<cplx, 16> e{};
    for (int k = 0; k < 4; ++k) e[5 * k] = 1.0;
    return HermOp4(e);
  }

  cplx operator()(int r, int c) const { return e_[4 * r + c]; }

  double trace() const {
    cplx t = 0.0;
    for (int k = 0; k < 4; ++k) t += e_[5 * k];
    return t.real();
  }

  friend HermOp4 operator+(const HermOp4& a, const HermOp4& b) {
    std::array<cplx, 16> r;
    for (int k = 0; k < 16; ++k) r[k] = a.e_[k] + b.e_[k];
    return HermOp4(r);
  }
  friend HermOp4 operator*(double s, const HermOp4& a) {
    std::array<cplx, 16> r;
    for (int k = 0; k < 16; ++k) r[k] = s * a.e_[k];
    return HermOp4(r);
  }

  double max_abs_diff(const HermOp4& o) const {
    double m = 0.0;
    for (int k = 0; k < 16; ++k) m = std::max(m, std::abs(e_[k] - o.e_[k]));
    return m;
  }

  friend HermOp4 tensor_unchecked(const std::array<cplx, 16>& e);

 private:
  explicit HermOp4(const std::array<cplx, 16>& e) : e_(e) {}
  std::array<cplx, 16> e_{};
};

inline HermOp4 tensor_unchecked(const std::array<cplx, 16>& e) {
  return HermOp4(e);
}

// Kronecker product a (x) b.
inline HermOp4 tensor(const HermOp2& a, const HermOp2& b) {
  std::array<cplx, 16> e{};
  for (int ra = 0; ra < 2; ++ra)
    for (int ca = 0; ca < 2; ++ca)
      for (int rb = 0; rb < 2; ++rb)
        for (int cb = 0; cb < 2; ++cb)
          e[4 * (2 * ra + rb) + (2 * ca + cb)] = a(ra, ca) * b(rb, cb);
  return tensor_unchecked(e);
}

// Re Tr[a b]; for Hermitian a, b the imaginary part vanishes.
inline double trace_product(const HermOp4& a, const HermOp4& b) {
  cplx t = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) t += a(r, c) * b(c, r);
  return t.real();
}

// Rank-1 projector onto |Psi-> = (|01> - |10>)/sqrt(2).
inline HermOp4 singlet_projector() {
  std::array<cplx, 16> e{};
  e[4 * 1 + 1] = 0.5;
  e[4 * 1 + 2] = -0.5;
  e[4 * 2 + 1] = -0.5;
  e[4 * 2 + 2] = 0.5;
  return tensor_unchecked(e);
}

// Eigenvalues of a Hermitian 4x4 via cyclic Jacobi on the real symmetric
// 8x8 embedding [[X, -Y], [Y, X]] (each eigenvalue appears twice).
inline std::array<double, 4> eigenvalues(const HermOp4& h) {
  double m[8][8];
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const cplx v = h(r, c);
      m[r][c] = v.real();
      m[r + 4][c + 4] = v.real();
      m[r][c + 4] = -v.imag();
      m[r + 4][c] = v.imag();
    }
  }
  const int n = 8;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += m[p][q] * m[p][q];
    if (off < 1e-28) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(m[p][q]) < 1e-300) continue;
        const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = m[k][p], mkq = m[k][q];
          m[k][p] = c * mkp - s * mkq;
          m[k][q] = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m[p][k], mqk = m[q][k];
          m[p][k] = c * mpk - s * mqk;
          m[q][k] = s * mpk + c * mqk;
        }
      }
    }
  }
  std::array<double, 8> ev;
  for (int k = 0; k < n; ++k) ev[k] = m[k][k];
  std::sort(ev.begin(), ev.end());
  // Duplicated spectrum: take every other entry of the sorted list.
  return {ev[0], ev[2], ev[4], ev[6]};
}

inline double min_eigenvalue(const HermOp4& h) { return eigenvalues(h)[0]; }

// weight = trace(op), Bloch coefficients of op/trace(op).
inline BlochState bloch_decompose(const HermOp2& op) {
  if (!op.is_hermitian()) {
    throw InvalidOperatorError("bloch_decompose: operator is not Hermitian");
  }
  const double w = op.trace();
  if (std::abs(w) < 1e-15) return BlochState{w, 0.0, 0.0, 0.0};
  const double px = 2.0 * op(0, 1).real() / w;
  const double py = -2.0 * op(0, 1).imag() / w;
  const double pz = (op(0, 0) - op(1, 1)).real() / w;
  return BlochState{w, px, py, pz};
}

// (weight/2)(I + px X + py Y + pz Z).
inline HermOp2 bloch_compose(const BlochState& b) {
  const double h = 0.5 * b.weight;
  return HermOp2::from_entries(h * (1.0 + b.pz), h * cplx{b.px, -b.py},
                               h * cplx{b.px, b.py}, h * (1.0 - b.pz));
}

}  // namespace rfimdi::qalg
