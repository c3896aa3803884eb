#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tbsim/hilbert.hpp"

namespace tbsim {

using Rng = std::mt19937_64;

/// Avalanche mix of (master seed, stream index) into an independent 64-bit
/// seed. Used wherever work is split across samples so that every sample's
/// randomness depends only on its index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

inline Rng rng_for(std::uint64_t master, std::uint64_t index) { return Rng(derive_seed(master, index)); }

/// Uniform on [0, 1) with 53 random bits; independent of the standard
/// library's distribution implementation.
double uniform01(Rng& rng);

/// Box-Muller standard normal built on uniform01.
double standard_normal(Rng& rng);

/// Haar-random pure state: normalized vector of i.i.d. complex Gaussians.
StateVector random_state(int n_qubits, Rng& rng);

/// Haar-random unitary on the given targets (QR of a Ginibre matrix with the
/// diagonal phase fix).
UnitaryOp random_unitary(std::vector<int> targets, Rng& rng);

}  // namespace tbsim
