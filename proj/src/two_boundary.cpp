#include "tbsim/two_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tbsim/error.hpp"

namespace tbsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const std::vector<int>& item_targets(const ScheduleItem& item)
{
    return std::visit(overloaded{[](const Segment& s) -> const std::vector<int>& { return s.op.targets(); },
                                 [](const Event& e) -> const std::vector<int>& { return e.family.targets(); },
                                 [](const FixedProjection& p) -> const std::vector<int>& { return p.op.targets(); }},
                      item);
}

void require_normalized(const StateVector& s, const char* which)
{
    if (std::abs(s.norm_squared() - 1.0) > kValidationTol) {
        fail(ErrorKind::InvalidArgument, std::string(which) + " boundary is not normalized");
    }
}

// One step of bra propagation: the ket carrying <phi| M is M^dagger |phi>.
struct BraStep {
    Matrix adjoint;
    std::vector<int> targets;
};

}  // namespace

// ---------------------------------------------------------------------------
// BoundaryPair

BoundaryPair::BoundaryPair(StateVector initial, StateVector final_state)
    : initial_(std::move(initial)), final_(std::move(final_state))
{
    if (initial_.n_qubits() != final_.n_qubits()) {
        fail(ErrorKind::DimensionMismatch, "boundaries have different qubit counts");
    }
    require_normalized(initial_, "initial");
    require_normalized(final_, "final");
}

Complex BoundaryPair::overlap() const { return inner(initial_, final_); }

// ---------------------------------------------------------------------------
// Schedule

Schedule& Schedule::segment(UnitaryOp u)
{
    items_.emplace_back(Segment{std::move(u)});
    return *this;
}

Schedule& Schedule::forward(const UnitaryOp& u)
{
    items_.emplace_back(Segment{u.adjoint()});
    return *this;
}

Schedule& Schedule::event(ProjectiveFamily family)
{
    items_.emplace_back(Event{std::move(family)});
    return *this;
}

Schedule& Schedule::project(Projector p)
{
    items_.emplace_back(FixedProjection{std::move(p)});
    return *this;
}

Schedule& Schedule::append(const Schedule& other)
{
    items_.insert(items_.end(), other.items_.begin(), other.items_.end());
    return *this;
}

std::size_t Schedule::event_count() const
{
    return static_cast<std::size_t>(
        std::count_if(items_.begin(), items_.end(), [](const auto& i) { return std::holds_alternative<Event>(i); }));
}

bool Schedule::only_segments() const
{
    return std::all_of(items_.begin(), items_.end(), [](const auto& i) { return std::holds_alternative<Segment>(i); });
}

Schedule Schedule::resolve(const std::vector<std::size_t>& outcomes) const
{
    if (outcomes.size() != event_count()) {
        fail(ErrorKind::InvalidArgument, "need one outcome per event");
    }
    std::vector<ScheduleItem> out;
    out.reserve(items_.size());
    std::size_t k = 0;
    for (const auto& item : items_) {
        if (const auto* e = std::get_if<Event>(&item)) {
            const std::size_t o = outcomes[k++];
            if (o >= e->family.size()) {
                fail(ErrorKind::InvalidArgument, "outcome index out of range");
            }
            out.emplace_back(FixedProjection{e->family.members()[o]});
        } else {
            out.push_back(item);
        }
    }
    return Schedule(std::move(out));
}

Schedule Schedule::reversed_adjoint() const
{
    std::vector<ScheduleItem> out;
    out.reserve(items_.size());
    for (auto it = items_.rbegin(); it != items_.rend(); ++it) {
        std::visit(overloaded{[&](const Segment& s) { out.emplace_back(Segment{s.op.adjoint()}); },
                              [&](const Event& e) {
                                  std::vector<Projector> members;
                                  for (const auto& p : e.family.members()) {
                                      members.emplace_back(p.matrix().adjoint(), p.targets());
                                  }
                                  out.emplace_back(Event{ProjectiveFamily(std::move(members), e.family.labels())});
                              },
                              [&](const FixedProjection& p) {
                                  out.emplace_back(FixedProjection{Projector(p.op.matrix().adjoint(), p.op.targets())});
                              }},
                   *it);
    }
    return Schedule(std::move(out));
}

void Schedule::check_fits(int n_qubits) const
{
    for (const auto& item : items_) {
        for (int t : item_targets(item)) {
            if (t >= n_qubits) {
                fail(ErrorKind::TargetOutOfRange, "schedule item targets qubit " + std::to_string(t) + " of a "
                                                      + std::to_string(n_qubits) + "-qubit boundary pair");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Amplitudes

Complex two_boundary_amplitude(const BoundaryPair& b, const Schedule& s)
{
    if (!s.resolved()) {
        fail(ErrorKind::InvalidArgument, "schedule still contains unresolved events");
    }
    s.check_fits(b.n_qubits());
    StateVector phi = b.initial();
    for (const auto& item : s.items()) {
        if (const auto* seg = std::get_if<Segment>(&item)) {
            phi = apply_local(seg->op.matrix().adjoint(), seg->op.targets(), phi);
        } else {
            const auto& p = std::get<FixedProjection>(item).op;
            phi = apply_local(p.matrix().adjoint(), p.targets(), phi);
        }
    }
    return inner(phi, b.final_state());
}

std::vector<OutcomeProbability> abl_distribution(const BoundaryPair& b, const Schedule& before,
                                                 const ProjectiveFamily& family, const Schedule& after)
{
    if (!before.only_segments() || !after.only_segments()) {
        fail(ErrorKind::InvalidArgument, "before/after schedules may only hold unitary segments");
    }
    before.check_fits(b.n_qubits());
    after.check_fits(b.n_qubits());
    for (int t : family.targets()) {
        if (t >= b.n_qubits()) {
            fail(ErrorKind::TargetOutOfRange, "event targets qubit " + std::to_string(t));
        }
    }

    // <initial| B  ->  ket B^dagger |initial>
    StateVector phi = b.initial();
    for (const auto& item : before.items()) {
        const auto& u = std::get<Segment>(item).op;
        phi = apply_local(u.matrix().adjoint(), u.targets(), phi);
    }
    // A |final> with A = A1 A2 ... Am: Am acts first.
    StateVector chi = b.final_state();
    for (auto it = after.items().rbegin(); it != after.items().rend(); ++it) {
        const auto& u = std::get<Segment>(*it).op;
        chi = apply_local(u.matrix(), u.targets(), chi);
    }

    std::vector<OutcomeProbability> out;
    out.reserve(family.size());
    double total = 0.0;
    for (std::size_t k = 0; k < family.size(); ++k) {
        const auto& p = family.members()[k];
        const Complex amp = inner(phi, apply_local(p.matrix(), p.targets(), chi));
        total += std::norm(amp);
        out.push_back({family.labels()[k], std::norm(amp), amp});
    }
    if (total < kZeroDenominator) {
        fail(ErrorKind::ZeroDenominator, "every outcome amplitude vanishes for these boundaries");
    }
    for (auto& o : out) {
        o.probability /= total;
    }
    return out;
}

std::vector<ChainProbability> chain_distribution(const BoundaryPair& b, const Schedule& s)
{
    s.check_fits(b.n_qubits());

    // A single event between unitaries is the ABL case; reuse it so both
    // entry points agree bit for bit.
    if (s.event_count() == 1 && std::none_of(s.items().begin(), s.items().end(), [](const ScheduleItem& it) {
            return std::holds_alternative<FixedProjection>(it);
        })) {
        Schedule before, after;
        const ProjectiveFamily* family = nullptr;
        for (const auto& item : s.items()) {
            if (const auto* e = std::get_if<Event>(&item)) {
                family = &e->family;
            } else {
                (family ? after : before).segment(std::get<Segment>(item).op);
            }
        }
        std::vector<ChainProbability> out;
        for (auto& o : abl_distribution(b, before, *family, after)) {
            const std::size_t k = out.size();
            out.push_back({HistoryChain{{Choice{0, k, o.label}}, o.amplitude}, o.probability});
        }
        return out;
    }

    // Flatten into runs of fixed steps separated by branch points.
    struct Level {
        std::vector<BraStep> fixed;    // applied before the branch
        std::vector<BraStep> members;  // empty for the trailing level
        const ProjectiveFamily* family = nullptr;
    };
    std::vector<Level> levels(1);
    std::uint64_t chains = 1;
    for (const auto& item : s.items()) {
        std::visit(overloaded{[&](const Segment& seg) {
                                  levels.back().fixed.push_back({seg.op.matrix().adjoint(), seg.op.targets()});
                              },
                              [&](const FixedProjection& p) {
                                  levels.back().fixed.push_back({p.op.matrix().adjoint(), p.op.targets()});
                              },
                              [&](const Event& e) {
                                  Level& lv = levels.back();
                                  lv.family = &e.family;
                                  for (const auto& m : e.family.members()) {
                                      lv.members.push_back({m.matrix().adjoint(), m.targets()});
                                  }
                                  if (chains > kMaxChains / e.family.size()) {
                                      fail(ErrorKind::CombinatorialLimit, "more than 2^24 outcome chains");
                                  }
                                  chains *= e.family.size();
                                  levels.emplace_back();
                              }},
                   item);
    }

    std::vector<ChainProbability> out;
    out.reserve(chains);
    std::vector<Choice> path;

    std::function<void(std::size_t, StateVector)> walk = [&](std::size_t depth, StateVector phi) {
        const Level& lv = levels[depth];
        for (const auto& step : lv.fixed) {
            phi = apply_local(step.adjoint, step.targets, phi);
        }
        if (lv.family == nullptr) {
            out.push_back({HistoryChain{path, inner(phi, b.final_state())}, 0.0});
            return;
        }
        for (std::size_t k = 0; k < lv.members.size(); ++k) {
            path.push_back({depth, k, lv.family->labels()[k]});
            walk(depth + 1, apply_local(lv.members[k].adjoint, lv.members[k].targets, phi));
            path.pop_back();
        }
    };
    walk(0, b.initial());

    double total = 0.0;
    for (const auto& c : out) {
        total += std::norm(c.chain.amplitude);
    }
    if (total < kZeroDenominator) {
        fail(ErrorKind::ZeroDenominator, "every outcome chain amplitude vanishes for these boundaries");
    }
    for (auto& c : out) {
        c.probability = std::norm(c.chain.amplitude) / total;
    }
    return out;
}

Projector defer_projection(const Projector& p, const UnitaryOp& u2)
{
    std::vector<int> all = p.targets();
    for (int t : u2.targets()) {
        if (std::find(all.begin(), all.end(), t) == all.end()) {
            all.push_back(t);
        }
    }
    if (static_cast<int>(all.size()) > kMaxDeferArity) {
        fail(ErrorKind::DimensionMismatch, "deferred projector would span " + std::to_string(all.size())
                                               + " qubits (limit " + std::to_string(kMaxDeferArity) + ")");
    }
    const Matrix pm = embed(p.matrix(), p.targets(), all);
    const Matrix um = embed(u2.matrix(), u2.targets(), all);
    Matrix deferred = um.adjoint() * pm * um;
    // Symmetrize away rounding so the result is Hermitian to the last bit.
    deferred = 0.5 * (deferred + deferred.adjoint()).eval();
    return Projector(std::move(deferred), std::move(all));
}

StateVector quantum_jump(const StateVector& psi, const Projector& p)
{
    if (std::abs(psi.norm_squared() - 1.0) > kValidationTol) {
        fail(ErrorKind::InvalidArgument, "quantum_jump expects a normalized state");
    }
    const StateVector projected = apply_projector(p, psi);
    if (projected.norm() < kNullProjectionNorm) {
        fail(ErrorKind::NullProjection, "outcome has zero probability for this state");
    }
    return projected.normalized();
}

}  // namespace tbsim
