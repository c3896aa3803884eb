#pragma once

// Measurement as unitary entanglement with witness qubits.
//
// A decision on a system qubit is recorded by copying the outcome of a binary
// projective family into a fresh witness qubit: |k>_w tags the branch P_k psi.
// Nothing collapses; the branches become orthogonal because their witnesses
// differ.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tbsim/hilbert.hpp"
#include "tbsim/two_boundary.hpp"

namespace tbsim {

inline constexpr int kMaxDecisionDepth = 24;

struct WitnessLayout {
    std::vector<int> system;
    std::vector<int> witnesses;
    std::map<int, int> assignments;  // decision index -> witness qubit

    /// Witnesses pairwise distinct, disjoint from the system, and every
    /// assignment points at a listed witness.
    void validate() const;
};

/// Unitary P0 (x) I_w + P1 (x) X_w on the family's targets plus w.
UnitaryOp recording_unitary(const ProjectiveFamily& basis, int witness);

/// Records the decision into `witness`, which must be in |0> (WitnessNotReady
/// otherwise).
StateVector record_decision(const StateVector& psi, const ProjectiveFamily& basis, int witness);

struct Splitter {
    UnitaryOp unitary;
    ProjectiveFamily basis;
    int witness;
};

class DecisionTree {
public:
    DecisionTree(StateVector initial, StateVector evolved, std::vector<int> witnesses);

    int depth() const noexcept { return static_cast<int>(witnesses_.size()); }
    std::uint64_t leaf_count() const noexcept { return std::uint64_t{1} << witnesses_.size(); }
    const StateVector& initial() const noexcept { return initial_; }
    /// Fully witnessed state; the sum of all leaves.
    const StateVector& evolved() const noexcept { return evolved_; }
    const std::vector<int>& witnesses() const noexcept { return witnesses_; }

    /// Bitstring with character k holding the outcome of decision k.
    std::string label(std::uint64_t leaf) const;
    /// Branch component with witness register equal to the leaf's outcomes.
    StateVector leaf(std::uint64_t leaf) const;
    /// |leaf|^2 for every leaf, in one pass over the state.
    std::vector<double> leaf_weights() const;

private:
    std::uint64_t leaf_of(std::size_t basis_index) const;

    StateVector initial_;
    StateVector evolved_;
    std::vector<int> witnesses_;
};

DecisionTree build_decision_tree(const StateVector& initial, const std::vector<Splitter>& splitters);

/// The tree's dynamics as a two-boundary schedule: each splitter contributes
/// its unitary, the recording unitary, then an Event on its witness qubit.
Schedule decision_schedule(const std::vector<Splitter>& splitters);

struct OverlapDecayReport {
    int depth = 0;
    double bias = 0.5;
    std::uint64_t seed = 0;
    /// Per leaf: |<evolved|leaf/|leaf|>|^2 and its square root.
    std::vector<double> squared_overlaps;
    std::vector<double> overlaps;
    /// Leaf where every decision took the branch of weight `bias`.
    std::uint64_t majority_leaf = 0;
};

/// Builds a depth-d tree on one system qubit whose every decision takes the
/// "stay" branch with probability `bias`, then measures the overlap between
/// the evolved state and each normalized leaf. The seed draws a phase for each
/// splitter; it cannot change any weight.
OverlapDecayReport overlap_decay(int depth, double bias, std::uint64_t seed);

}  // namespace tbsim
