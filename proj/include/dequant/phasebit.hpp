#pragma once

// Classical bits embedded in complex numbers over the basis {1, i}.
// All arithmetic is integer-exact: a value is (re + im*i) * 2^(scale/2),
// so the 1/2 and 1/sqrt(2) normalisations of the de-quantised pipeline
// are scale shifts, never floats.

#include <complex>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dequant/circuit.hpp"

namespace dequant {

class PhasePair {
 public:
  PhasePair(std::int64_t re, std::int64_t im, int scale = 0)
      : re_(re), im_(im), scale_(scale) {
    if (re_ == 0 && im_ == 0) throw std::invalid_argument("phase pair must be nonzero");
    canonicalize();
  }

  std::int64_t re() const { return re_; }
  std::int64_t im() const { return im_; }
  int scale() const { return scale_; }

  PhasePair operator*(const PhasePair& rhs) const {
    return PhasePair(re_ * rhs.re_ - im_ * rhs.im_, re_ * rhs.im_ + im_ * rhs.re_,
                     scale_ + rhs.scale_);
  }

  PhasePair operator-() const { return PhasePair(-re_, -im_, scale_); }

  // Value times 1/2.
  PhasePair halved() const { return PhasePair(re_, im_, scale_ - 2); }

  std::complex<double> to_complex() const {
    double factor = std::pow(2.0, 0.5 * static_cast<double>(scale_));
    return {static_cast<double>(re_) * factor, static_cast<double>(im_) * factor};
  }

  bool operator==(const PhasePair&) const = default;

 private:
  // Canonical form: powers of two live in the scale, so re and im are
  // never both even.
  void canonicalize() {
    while (re_ % 2 == 0 && im_ % 2 == 0) {
      re_ /= 2;
      im_ /= 2;
      scale_ += 2;
    }
  }

  std::int64_t re_, im_;
  int scale_;
};

using PhaseRegister = std::vector<PhasePair>;

// Register of m copies of 1 + i, the classical analogue of the equal
// superposition input.
inline PhaseRegister equal_superposition(std::size_t m) {
  if (m == 0) throw std::invalid_argument("register size must be >= 1");
  return PhaseRegister(m, PhasePair(1, 1));
}

// Separability of the 2-input oracle output: f(00)+f(11) = f(01)+f(10) mod 2.
inline bool dj_separable_condition(const TruthTable& f) {
  if (f.n_inputs != 2) throw std::invalid_argument("separability condition needs n_inputs = 2");
  return (f.value(0) ^ f.value(3)) == (f.value(1) ^ f.value(2));
}

// The classical black-box C_f on two phase bits:
//   C_f(z1, z2) = (-1)^f(00) * (a1 + (-1)^{f(00)^f(10)} b1 i,
//                               a2 + (-1)^{f(10)^f(11)} b2 i).
// Only defined when the separability condition holds.
inline PhaseRegister apply_cf(const PhaseRegister& reg, const TruthTable& f) {
  if (reg.size() != 2) throw std::invalid_argument("apply_cf needs a register of size 2");
  if (f.n_inputs != 2) throw std::invalid_argument("apply_cf needs a 2-input truth table");
  if (!dj_separable_condition(f)) {
    throw std::invalid_argument(
        "invalid function: separability condition f(00)^f(11) = f(01)^f(10) fails");
  }
  int e1 = f.value(0b00) ^ f.value(0b10);
  int e2 = f.value(0b10) ^ f.value(0b11);
  int sign = f.value(0b00);

  PhaseRegister out;
  out.reserve(2);
  PhasePair z1(reg[0].re(), e1 ? -reg[0].im() : reg[0].im(), reg[0].scale());
  PhasePair z2(reg[1].re(), e2 ? -reg[1].im() : reg[1].im(), reg[1].scale());
  out.push_back(sign ? -z1 : z1);
  out.push_back(sign ? -z2 : z2);
  return out;
}

// Hadamard analogue: multiply each black-box output by its input, then
// normalise by 1/2.
inline PhaseRegister hadamard_analogue(const PhaseRegister& outputs,
                                       const PhaseRegister& inputs) {
  if (outputs.size() != inputs.size() || outputs.empty()) {
    throw std::invalid_argument("register sizes must match and be nonempty");
  }
  PhaseRegister result;
  result.reserve(outputs.size());
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    result.push_back((outputs[i] * inputs[i]).halved());
  }
  return result;
}

enum class Axis { Real, Imaginary, Mixed };

struct AxisReading {
  Axis axis = Axis::Mixed;
  int sign = 0;  // +1 or -1 for the nonzero component; 0 when mixed

  bool operator==(const AxisReading&) const = default;
};

inline AxisReading measure_axis(const PhasePair& p) {
  if (p.re() == 0) return {Axis::Imaginary, p.im() > 0 ? 1 : -1};
  if (p.im() == 0) return {Axis::Real, p.re() > 0 ? 1 : -1};
  return {Axis::Mixed, 0};
}

struct SignFactorisation {
  int overall_sign = 1;
  std::vector<int> qubit_signs;  // factor for qubit q is (1, qubit_signs[q])
};

// Rank-1 factorisation of a +-1 phase vector of length 2^n by recursive
// leftmost-qubit peeling: the two half-vectors must be equal or opposite.
// Returns std::nullopt when the vector is not a tensor product.
inline std::optional<SignFactorisation> phase_vector_separable(const std::vector<int>& signs) {
  std::size_t len = signs.size();
  if (len == 0 || (len & (len - 1)) != 0) {
    throw std::invalid_argument("phase vector length must be a power of two");
  }
  for (int s : signs) {
    if (s != 1 && s != -1) throw std::invalid_argument("phase vector entries must be +-1");
  }

  SignFactorisation factors;
  std::vector<int> current = signs;
  while (current.size() > 1) {
    std::size_t half = current.size() / 2;
    int ratio = current[half] == current[0] ? 1 : -1;
    for (std::size_t i = 0; i < half; ++i) {
      if (current[half + i] != ratio * current[i]) return std::nullopt;
    }
    factors.qubit_signs.push_back(ratio);
    current.resize(half);
  }
  factors.overall_sign = current[0];
  return factors;
}

}  // namespace dequant
