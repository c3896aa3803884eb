#pragma once

// Random final boundaries and the dominance toy model.
//
// The toy register is one spin qubit (qubit 0: up = |0>, down = |1>) followed
// by w witness qubits. The "up" branch is recorded as all witnesses in |1>,
// the "down" branch as all witnesses in |0>. A random final state picks the
// winning branch by comparing the two matched components.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tbsim/hilbert.hpp"

namespace tbsim {

enum class EnsembleKind { Haar, PhaseRandomProduct };

std::string_view ensemble_name(EnsembleKind kind) noexcept;
/// "haar" or "phase-random-product"; anything else is a Config error.
EnsembleKind parse_ensemble(std::string_view name);

struct FinalEnsemble {
    EnsembleKind kind = EnsembleKind::Haar;
    int n_qubits = 1;
    std::uint64_t seed = 0;
};

/// One factor per qubit of a phase-random-product sample, qubit 0 first.
using QubitFactors = std::vector<std::array<Complex, 2>>;

/// Per-qubit factors of sample `index`. Only meaningful for the product
/// ensemble; the kind field is ignored.
QubitFactors product_factors(const FinalEnsemble& e, std::uint64_t index);

/// Deterministic in (seed, index).
StateVector sample_final(const FinalEnsemble& e, std::uint64_t index);

struct CrunchToyConfig {
    double theta = 0.0;
    int w = 1;
    std::uint64_t n_samples = 1;
    EnsembleKind ensemble = EnsembleKind::Haar;
    std::uint64_t seed = 0;

    /// theta in [0, pi], 1 <= w <= max_qubits()-1, n_samples >= 1. w = 0 is
    /// rejected: without witnesses both readouts differ only in the spin.
    void validate() const;
    FinalEnsemble final_ensemble() const { return {ensemble, w + 1, seed}; }
};

struct BranchAmplitudes {
    Complex up;
    Complex down;
};

/// A_up = cos(theta/2) <up,1...1|final>, A_down = sin(theta/2) <down,0...0|final>.
BranchAmplitudes branch_amplitudes(const CrunchToyConfig& c, const StateVector& final_state);
/// Same quantities from the factors of a product state, without building it.
BranchAmplitudes branch_amplitudes(const CrunchToyConfig& c, const QubitFactors& factors);

enum class Branch { Up, Down };

std::string_view branch_name(Branch b) noexcept;

inline constexpr double kTieThreshold = 1e-15;

struct Selection {
    Branch winner = Branch::Up;
    bool tie = false;
};

/// Larger magnitude wins; a difference under 1e-15 is a tie and goes to up.
/// BothZero when both magnitudes are under 1e-15.
Selection select_dominant(Complex up, Complex down);

struct SampleRecord {
    double log10_up = 0.0;
    double log10_down = 0.0;
    bool excluded = false;  // both amplitudes vanished
    Selection selection;
};

struct DominanceReport {
    std::uint64_t n_samples = 0;
    std::uint64_t up_count = 0;
    std::uint64_t down_count = 0;
    std::uint64_t tie_count = 0;
    std::uint64_t both_zero_count = 0;  // up + down + both_zero = n_samples
    /// Samples with exactly one vanishing amplitude, whose log gap is infinite.
    std::uint64_t one_sided_count = 0;
    double freq_up = 0.0;  // up / (up + down)
    /// log10|A_up/A_down| for the two-sided samples, in sample order.
    std::vector<double> log10_gaps;
    double mean_gap = 0.0;
    double spread = 0.0;  // sample standard deviation of log10_gaps
    std::vector<SampleRecord> samples;
};

DominanceReport born_emergence(const CrunchToyConfig& c);

/// Product ensemble only, w >= 2.
DominanceReport dominance_gap_stats(const CrunchToyConfig& c);

/// Least-squares slope of log(y) against log(x).
double fit_power_exponent(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace tbsim
