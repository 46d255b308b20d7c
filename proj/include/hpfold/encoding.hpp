#pragma once

#include <cstdint>
#include <vector>

#include "hpfold/lattice.hpp"
#include "hpfold/types.hpp"

namespace hpfold {

// Movement codes, column order of the one-hot block.
inline constexpr std::uint8_t kMoveNone = 0;     // fixed prefix or not yet placed
inline constexpr std::uint8_t kMoveLeft = 1;
inline constexpr std::uint8_t kMoveForward = 2;
inline constexpr std::uint8_t kMoveRight = 3;

// Fixed-size sequence representation of a walk state: one row per monomer,
// 6 binary features per row. Columns 0-3 one-hot the movement status
// {-, L, F, R}; columns 4-5 one-hot the monomer type {H, P}. Stored in
// compact categorical form; expanded to a dense matrix on demand.
struct EncodedState {
  std::vector<std::uint8_t> movement;  // kMove* codes, size N
  std::vector<std::uint8_t> monomer;   // 0 = H, 1 = P, size N

  friend bool operator==(const EncodedState& a, const EncodedState& b) = default;

  int rows() const { return static_cast<int>(movement.size()); }

  // N x 6 one-hot matrix.
  template <typename Scalar>
  Mat<Scalar> oneHot() const {
    Mat<Scalar> m = Mat<Scalar>::Zero(rows(), 6);
    for (int i = 0; i < rows(); ++i) {
      m(i, movement[static_cast<std::size_t>(i)]) = Scalar(1);
      m(i, 4 + monomer[static_cast<std::size_t>(i)]) = Scalar(1);
    }
    return m;
  }

  // Row-major flattening of the one-hot matrix, as used by the serialized
  // replay-dump and checkpoint formats.
  std::vector<std::uint8_t> flatBits() const {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(rows()) * 6, 0);
    for (int i = 0; i < rows(); ++i) {
      bits[static_cast<std::size_t>(i) * 6 + movement[static_cast<std::size_t>(i)]] = 1;
      bits[static_cast<std::size_t>(i) * 6 + 4 + monomer[static_cast<std::size_t>(i)]] = 1;
    }
    return bits;
  }
};

// Action that placed monomer i (i >= 2), recovered from the geometry.
Action actionOfStep(const WalkState& state, int i);

// Row i carries the movement that placed monomer i, '-' for the fixed prefix
// and for monomers not yet placed, plus the monomer type. Shape is always
// N x 6 regardless of progress.
EncodedState encode(const WalkState& state, const HPSequence& seq);

}  // namespace hpfold
