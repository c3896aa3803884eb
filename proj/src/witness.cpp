#include "tbsim/witness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "tbsim/error.hpp"
#include "tbsim/gates.hpp"
#include "tbsim/random.hpp"

namespace tbsim {

void WitnessLayout::validate() const
{
    std::set<int> seen;
    for (int w : witnesses) {
        if (w < 0 || !seen.insert(w).second) {
            fail(ErrorKind::InvalidArgument, "witness qubit " + std::to_string(w) + " repeated or negative");
        }
    }
    for (int s : system) {
        if (seen.count(s) != 0) {
            fail(ErrorKind::InvalidArgument, "qubit " + std::to_string(s) + " is both system and witness");
        }
    }
    for (const auto& [decision, w] : assignments) {
        if (seen.count(w) == 0) {
            fail(ErrorKind::InvalidArgument, "decision " + std::to_string(decision) + " assigned to unknown witness");
        }
    }
    std::set<int> used;
    for (const auto& [decision, w] : assignments) {
        if (!used.insert(w).second) {
            fail(ErrorKind::InvalidArgument, "witness " + std::to_string(w) + " reused");
        }
    }
}

UnitaryOp recording_unitary(const ProjectiveFamily& basis, int witness)
{
    if (basis.size() != 2) {
        fail(ErrorKind::InvalidFamily, "decisions are binary; family has " + std::to_string(basis.size()) + " members");
    }
    std::vector<int> targets = basis.targets();
    if (std::find(targets.begin(), targets.end(), witness) != targets.end()) {
        fail(ErrorKind::InvalidArgument, "witness overlaps the measured qubits");
    }
    const Eigen::Index d = Eigen::Index{1} << targets.size();
    const Matrix& p0 = basis.members()[0].matrix();
    const Matrix& p1 = basis.members()[1].matrix();
    // Witness is the most significant local qubit: [[P0, P1], [P1, P0]].
    Matrix m(2 * d, 2 * d);
    m.topLeftCorner(d, d) = p0;
    m.topRightCorner(d, d) = p1;
    m.bottomLeftCorner(d, d) = p1;
    m.bottomRightCorner(d, d) = p0;
    targets.push_back(witness);
    return UnitaryOp(std::move(m), std::move(targets));
}

StateVector record_decision(const StateVector& psi, const ProjectiveFamily& basis, int witness)
{
    if (witness < 0 || witness >= psi.n_qubits()) {
        fail(ErrorKind::TargetOutOfRange, "witness qubit " + std::to_string(witness));
    }
    const std::size_t bit = std::size_t{1} << witness;
    double excited = 0.0;
    auto amps = psi.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & bit) {
            excited += std::norm(amps[i]);
        }
    }
    if (excited > kValidationTol) {
        fail(ErrorKind::WitnessNotReady, "witness qubit " + std::to_string(witness) + " is not in |0>");
    }
    return apply_unitary(recording_unitary(basis, witness), psi);
}

// ---------------------------------------------------------------------------
// DecisionTree

DecisionTree::DecisionTree(StateVector initial, StateVector evolved, std::vector<int> witnesses)
    : initial_(std::move(initial)), evolved_(std::move(evolved)), witnesses_(std::move(witnesses))
{
}

std::uint64_t DecisionTree::leaf_of(std::size_t basis_index) const
{
    std::uint64_t leaf = 0;
    for (std::size_t k = 0; k < witnesses_.size(); ++k) {
        leaf |= static_cast<std::uint64_t>((basis_index >> witnesses_[k]) & 1u) << k;
    }
    return leaf;
}

std::string DecisionTree::label(std::uint64_t leaf) const
{
    std::string s(witnesses_.size(), '0');
    for (std::size_t k = 0; k < witnesses_.size(); ++k) {
        if ((leaf >> k) & 1u) {
            s[k] = '1';
        }
    }
    return s;
}

StateVector DecisionTree::leaf(std::uint64_t leaf) const
{
    if (leaf >= leaf_count()) {
        fail(ErrorKind::InvalidArgument, "leaf index out of range");
    }
    StateBuilder b(evolved_.n_qubits());
    auto& out = b.amplitudes();
    auto in = evolved_.amplitudes();
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (leaf_of(i) == leaf) {
            out[i] = in[i];
        }
    }
    return std::move(b).build(false);
}

std::vector<double> DecisionTree::leaf_weights() const
{
    std::vector<double> w(leaf_count(), 0.0);
    auto in = evolved_.amplitudes();
    for (std::size_t i = 0; i < in.size(); ++i) {
        w[leaf_of(i)] += std::norm(in[i]);
    }
    return w;
}

DecisionTree build_decision_tree(const StateVector& initial, const std::vector<Splitter>& splitters)
{
    if (splitters.size() > static_cast<std::size_t>(kMaxDecisionDepth)) {
        fail(ErrorKind::DepthLimit, "decision depth " + std::to_string(splitters.size()) + " exceeds "
                                        + std::to_string(kMaxDecisionDepth));
    }
    std::vector<int> witnesses;
    StateVector psi = initial;
    for (const auto& s : splitters) {
        if (std::find(witnesses.begin(), witnesses.end(), s.witness) != witnesses.end()) {
            fail(ErrorKind::WitnessNotReady, "witness " + std::to_string(s.witness) + " already used");
        }
        psi = apply_unitary(s.unitary, psi);
        psi = record_decision(psi, s.basis, s.witness);
        witnesses.push_back(s.witness);
    }
    return DecisionTree(initial, std::move(psi), std::move(witnesses));
}

Schedule decision_schedule(const std::vector<Splitter>& splitters)
{
    Schedule s;
    for (const auto& sp : splitters) {
        s.forward(sp.unitary);
        s.forward(recording_unitary(sp.basis, sp.witness));
        s.event(ProjectiveFamily::computational({sp.witness}));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Overlap decay

OverlapDecayReport overlap_decay(int depth, double bias, std::uint64_t seed)
{
    if (depth < 0 || depth > kMaxDecisionDepth) {
        fail(ErrorKind::DepthLimit, "depth must lie in [0, " + std::to_string(kMaxDecisionDepth) + "]");
    }
    if (!(bias >= 0.0 && bias <= 1.0)) {
        fail(ErrorKind::InvalidArgument, "bias must be a probability");
    }

    // ry(theta) keeps the current system value with probability cos^2(theta/2).
    const double theta = 2.0 * std::acos(std::sqrt(bias));
    std::vector<Splitter> splitters;
    splitters.reserve(static_cast<std::size_t>(depth));
    for (int k = 0; k < depth; ++k) {
        Rng rng = rng_for(seed, static_cast<std::uint64_t>(k));
        const double phase = 2.0 * std::numbers::pi * uniform01(rng);
        splitters.push_back(
            {gates::compose(gates::ry(0, theta), gates::rz(0, phase)), ProjectiveFamily::computational({0}), k + 1});
    }

    const DecisionTree tree = build_decision_tree(StateVector(depth + 1), splitters);

    // <evolved|leaf> accumulated per leaf in one sweep; leaves have disjoint
    // supports so each basis index feeds exactly one of them.
    const std::uint64_t leaves = tree.leaf_count();
    std::vector<Complex> dots(leaves);
    std::vector<double> norms(leaves, 0.0);
    auto amps = tree.evolved().amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const std::uint64_t leaf = i >> 1;  // witnesses occupy qubits 1..depth in order
        dots[leaf] += std::conj(amps[i]) * amps[i];
        norms[leaf] += std::norm(amps[i]);
    }

    OverlapDecayReport r;
    r.depth = depth;
    r.bias = bias;
    r.seed = seed;
    r.majority_leaf = 0;
    r.squared_overlaps.resize(leaves);
    r.overlaps.resize(leaves);
    for (std::uint64_t l = 0; l < leaves; ++l) {
        const double n = std::sqrt(norms[l]);
        const double amp = n > 0.0 ? std::abs(dots[l]) / n : 0.0;
        r.overlaps[l] = amp;
        r.squared_overlaps[l] = amp * amp;
    }
    return r;
}

}  // namespace tbsim
