#pragma once

// Histories pinned between an initial and a final boundary state.
//
// Orientation: a schedule [M1, M2, ..., Mk] has amplitude
//     <initial| M1 M2 ... Mk |final>
// i.e. the items are written in bra form and act on <initial| in time order.
// Numerically the engine propagates |phi> = Mk^dagger ... M1^dagger |initial>
// and returns <phi|final>. A forward (ket) propagator U therefore enters the
// schedule as U^dagger; Schedule::forward does that conversion.

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "tbsim/hilbert.hpp"

namespace tbsim {

inline constexpr double kZeroDenominator = 1e-28;
inline constexpr std::uint64_t kMaxChains = std::uint64_t{1} << 24;
inline constexpr double kNullProjectionNorm = 1e-14;

class BoundaryPair {
public:
    /// Both states must have equal qubit counts and unit norm (1e-10).
    BoundaryPair(StateVector initial, StateVector final_state);

    const StateVector& initial() const noexcept { return initial_; }
    const StateVector& final_state() const noexcept { return final_; }
    int n_qubits() const noexcept { return initial_.n_qubits(); }

    /// <initial|final>
    Complex overlap() const;

    BoundaryPair swapped() const { return BoundaryPair(final_, initial_); }

private:
    StateVector initial_;
    StateVector final_;
};

struct Segment {
    UnitaryOp op;
};

struct Event {
    ProjectiveFamily family;
};

struct FixedProjection {
    Projector op;
};

using ScheduleItem = std::variant<Segment, Event, FixedProjection>;

class Schedule {
public:
    Schedule() = default;
    explicit Schedule(std::vector<ScheduleItem> items) : items_(std::move(items)) {}

    /// Appends an operator exactly as written between the boundaries.
    Schedule& segment(UnitaryOp u);
    /// Appends a forward ket propagator, stored as its adjoint.
    Schedule& forward(const UnitaryOp& u);
    Schedule& event(ProjectiveFamily family);
    Schedule& project(Projector p);
    Schedule& append(const Schedule& other);

    const std::vector<ScheduleItem>& items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }

    std::size_t event_count() const;
    bool only_segments() const;
    bool resolved() const { return event_count() == 0; }

    /// Replaces the i-th Event by its outcomes[i]-th member.
    Schedule resolve(const std::vector<std::size_t>& outcomes) const;

    /// Order reversed and every item conjugate-transposed.
    Schedule reversed_adjoint() const;

    /// Throws TargetOutOfRange if an item does not fit n qubits.
    void check_fits(int n_qubits) const;

private:
    std::vector<ScheduleItem> items_;
};

struct Choice {
    std::size_t event = 0;    // ordinal among the schedule's events
    std::size_t outcome = 0;  // member index within the family
    std::string label;
};

struct HistoryChain {
    std::vector<Choice> choices;
    Complex amplitude;
};

struct ChainProbability {
    HistoryChain chain;
    double probability = 0.0;
};

struct OutcomeProbability {
    std::string label;
    double probability = 0.0;
    Complex amplitude;
};

/// <initial| items |final> for a fully resolved schedule.
Complex two_boundary_amplitude(const BoundaryPair& b, const Schedule& s);

/// Conditional outcome distribution of one projective event placed between
/// two unitary-only schedules. Throws ZeroDenominator when every outcome
/// amplitude vanishes.
std::vector<OutcomeProbability> abl_distribution(const BoundaryPair& b, const Schedule& before,
                                                 const ProjectiveFamily& family, const Schedule& after);

/// Exhaustive enumeration of outcome chains, in lexicographic order with the
/// first event most significant.
std::vector<ChainProbability> chain_distribution(const BoundaryPair& b, const Schedule& s);

/// P' = U^dagger P U on the union of both operators' targets, so that
/// U1 P U2 = U1 U2 P'.
Projector defer_projection(const Projector& p, const UnitaryOp& u2);

/// Largest operator width defer_projection will build densely.
inline constexpr int kMaxDeferArity = 10;

/// P psi / |P psi|; NullProjection when |P psi| < 1e-14.
StateVector quantum_jump(const StateVector& psi, const Projector& p);

}  // namespace tbsim
