#include "tbsim/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>

#include "tbsim/error.hpp"
#include "tbsim/gates.hpp"
#include "tbsim/macro_rules.hpp"
#include "tbsim/parallel.hpp"
#include "tbsim/random.hpp"
#include "tbsim/sampling.hpp"
#include "tbsim/two_boundary.hpp"
#include "tbsim/witness.hpp"

namespace tbsim::verify {

namespace {

std::atomic<Mutation> g_mutation{Mutation::None};

constexpr double kPi = std::numbers::pi;

int pick(Rng& rng, int lo, int hi)  // inclusive
{
    return lo + static_cast<int>(uniform01(rng) * (hi - lo + 1));
}

std::vector<int> random_targets(int n, int k, Rng& rng)
{
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        all[static_cast<std::size_t>(i)] = i;
    }
    for (int i = 0; i < k; ++i) {
        const int j = pick(rng, i, n - 1);
        std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
    }
    all.resize(static_cast<std::size_t>(k));
    return all;
}

Projector random_projector(std::vector<int> targets, Rng& rng)
{
    const UnitaryOp v = random_unitary(targets, rng);
    const Eigen::Index dim = v.matrix().rows();
    const Eigen::Index rank = pick(rng, 0, static_cast<int>(dim));
    Matrix d = Matrix::Zero(dim, dim);
    for (Eigen::Index k = 0; k < rank; ++k) {
        d(k, k) = 1.0;
    }
    Matrix p = v.matrix() * d * v.matrix().adjoint();
    p = 0.5 * (p + p.adjoint()).eval();
    return Projector(std::move(p), std::move(targets));
}

ProjectiveFamily rotated_family(std::vector<int> targets, Rng& rng)
{
    const UnitaryOp v = random_unitary(targets, rng);
    const ProjectiveFamily base = ProjectiveFamily::computational(targets);
    std::vector<Projector> members;
    for (const auto& m : base.members()) {
        Matrix p = v.matrix() * m.matrix() * v.matrix().adjoint();
        p = 0.5 * (p + p.adjoint()).eval();
        members.emplace_back(std::move(p), targets);
    }
    return ProjectiveFamily(std::move(members), base.labels());
}

/// Full 2^n x 2^n matrix of a local operator, built entry by entry.
Matrix kron_full(const Matrix& local, const std::vector<int>& targets, int n)
{
    const Eigen::Index dim = Eigen::Index{1} << n;
    std::uint64_t mask = 0;
    for (int t : targets) {
        mask |= std::uint64_t{1} << t;
    }
    auto local_index = [&](std::uint64_t i) {
        Eigen::Index l = 0;
        for (std::size_t k = 0; k < targets.size(); ++k) {
            l |= static_cast<Eigen::Index>((i >> targets[k]) & 1u) << k;
        }
        return l;
    };
    Matrix full = Matrix::Zero(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            if ((static_cast<std::uint64_t>(r) & ~mask) == (static_cast<std::uint64_t>(c) & ~mask)) {
                full(r, c) = local(local_index(static_cast<std::uint64_t>(r)), local_index(static_cast<std::uint64_t>(c)));
            }
        }
    }
    return full;
}

Eigen::VectorXcd as_vector(const StateVector& s)
{
    Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dim()));
    for (std::size_t i = 0; i < s.dim(); ++i) {
        v(static_cast<Eigen::Index>(i)) = s[i];
    }
    return v;
}

std::string fmt(const char* f, double a, double b = 0.0)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

struct Check {
    const char* name;
    bool full_only;
    std::function<std::pair<bool, std::string>()> body;
};

// ---------------------------------------------------------------------------
// hilbert-core

std::pair<bool, std::string> check_unitarity()
{
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        Rng rng = rng_for(11, i);
        const int n = pick(rng, 1, 10);
        const StateVector psi = random_state(n, rng);
        const UnitaryOp u = random_unitary(random_targets(n, pick(rng, 1, std::min(3, n)), rng), rng);
        worst = std::max(worst, std::abs(apply_unitary(u, psi).norm() - psi.norm()));
    }
    return {worst <= 1e-12, fmt("max | |U psi| - |psi| | = %.3g over 1000 instances", worst)};
}

std::pair<bool, std::string> check_completeness()
{
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 300; ++i) {
        Rng rng = rng_for(12, i);
        const int n = pick(rng, 1, 8);
        const auto targets = random_targets(n, pick(rng, 1, std::min(3, n)), rng);
        const ProjectiveFamily fam = (i % 2 == 0) ? ProjectiveFamily::computational(targets)
                                                  : rotated_family(targets, rng);
        const StateVector psi = random_state(n, rng).scaled(0.5 + uniform01(rng));
        double total = 0.0;
        for (const auto& p : fam.members()) {
            total += apply_projector(p, psi).norm_squared();
        }
        worst = std::max(worst, std::abs(total - psi.norm_squared()));
    }
    return {worst <= 1e-10, fmt("max |sum |P_k psi|^2 - |psi|^2| = %.3g", worst)};
}

std::pair<bool, std::string> check_kronecker()
{
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        Rng rng = rng_for(13, i);
        const int n = pick(rng, 2, 6);
        const auto targets = random_targets(n, 2, rng);
        const UnitaryOp u = random_unitary(targets, rng);
        const StateVector psi = random_state(n, rng);
        const Eigen::VectorXcd want = kron_full(u.matrix(), targets, n) * as_vector(psi);
        const StateVector got = apply_unitary(u, psi);
        for (std::size_t k = 0; k < got.dim(); ++k) {
            worst = std::max(worst, std::abs(got[k] - want(static_cast<Eigen::Index>(k))));
        }
    }
    return {worst <= 1e-12, fmt("max elementwise difference to the full Kronecker matrix = %.3g", worst)};
}

std::pair<bool, std::string> check_inner_symmetry()
{
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        Rng rng = rng_for(14, i);
        const int n = pick(rng, 1, 10);
        const StateVector a = random_state(n, rng);
        const StateVector b = random_state(n, rng);
        const Complex d = inner(a, b) - std::conj(inner(b, a));
        worst = std::max({worst, std::abs(d.real()), std::abs(d.imag())});
    }
    return {worst <= 1e-15, fmt("max component of <a|b> - conj(<b|a>) = %.3g", worst)};
}

// ---------------------------------------------------------------------------
// two-boundary-engine

std::pair<bool, std::string> check_abl_normalization()
{
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 300; ++i) {
        Rng rng = rng_for(21, i);
        const int n = pick(rng, 1, 6);
        const BoundaryPair b(random_state(n, rng), random_state(n, rng));
        Schedule before;
        Schedule after;
        before.segment(random_unitary(random_targets(n, pick(rng, 1, std::min(2, n)), rng), rng));
        after.segment(random_unitary(random_targets(n, pick(rng, 1, std::min(2, n)), rng), rng));
        const auto fam = rotated_family(random_targets(n, pick(rng, 1, std::min(2, n)), rng), rng);
        double s = 0.0;
        for (const auto& o : abl_distribution(b, before, fam, after)) {
            s += o.probability;
        }
        worst = std::max(worst, std::abs(s - 1.0));

        Schedule chain = before;
        chain.event(fam).append(after).event(ProjectiveFamily::computational(random_targets(n, 1, rng)));
        double c = 0.0;
        for (const auto& o : chain_distribution(b, chain)) {
            c += o.probability;
        }
        worst = std::max(worst, std::abs(c - 1.0));
    }
    return {worst <= 1e-12, fmt("max |sum P - 1| = %.3g over ABL and chain distributions", worst)};
}

std::pair<bool, std::string> check_chain_bruteforce()
{
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        Rng rng = rng_for(22, i);
        const int n = pick(rng, 1, 4);
        const BoundaryPair b(random_state(n, rng), random_state(n, rng));
        const UnitaryOp u1 = random_unitary(random_targets(n, pick(rng, 1, n), rng), rng);
        const auto f1 = rotated_family(random_targets(n, 1, rng), rng);
        const UnitaryOp u2 = random_unitary(random_targets(n, pick(rng, 1, n), rng), rng);
        const auto f2 = ProjectiveFamily::computational(random_targets(n, pick(rng, 1, std::min(2, n)), rng));
        Schedule s;
        s.segment(u1).event(f1).segment(u2).event(f2);
        const auto got = chain_distribution(b, s);

        const Eigen::VectorXcd vi = as_vector(b.initial());
        const Eigen::VectorXcd vf = as_vector(b.final_state());
        const Matrix m1 = kron_full(u1.matrix(), u1.targets(), n);
        const Matrix m2 = kron_full(u2.matrix(), u2.targets(), n);
        std::vector<double> w;
        double total = 0.0;
        for (const auto& p : f1.members()) {
            for (const auto& q : f2.members()) {
                const Complex a = vi.dot(m1 * kron_full(p.matrix(), p.targets(), n) * m2
                                         * kron_full(q.matrix(), q.targets(), n) * vf);
                w.push_back(std::norm(a));
                total += std::norm(a);
            }
        }
        if (got.size() != w.size()) {
            return {false, "chain count differs from the product of family sizes"};
        }
        for (std::size_t k = 0; k < w.size(); ++k) {
            worst = std::max(worst, std::abs(got[k].probability - w[k] / total));
        }
    }
    return {worst <= 1e-12, fmt("max |P_engine - P_bruteforce| = %.3g (n <= 4, two events)", worst)};
}

std::pair<bool, std::string> check_deferral()
{
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        worst = std::max(worst, deferral_error(23, i, 8));
    }
    return {worst <= 1e-12, fmt("max |amp(U1 P U2) - amp(U1 U2 P')| = %.3g over 1000 instances", worst)};
}

std::pair<bool, std::string> check_time_symmetry()
{
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 300; ++i) {
        Rng rng = rng_for(24, i);
        const int n = pick(rng, 1, 6);
        const BoundaryPair b(random_state(n, rng), random_state(n, rng));
        Schedule s;
        for (int k = 0, m = pick(rng, 1, 5); k < m; ++k) {
            if (uniform01(rng) < 0.3) {
                s.project(random_projector(random_targets(n, pick(rng, 1, std::min(2, n)), rng), rng));
            } else {
                s.segment(random_unitary(random_targets(n, pick(rng, 1, std::min(3, n)), rng), rng));
            }
        }
        const double a = std::abs(two_boundary_amplitude(b, s));
        const double r = std::abs(two_boundary_amplitude(b.swapped(), s.reversed_adjoint()));
        worst = std::max(worst, std::abs(a - r));
    }
    return {worst <= 1e-12, fmt("max ||amp| - |amp reversed|| = %.3g", worst)};
}

std::pair<bool, std::string> check_jump_consistency()
{
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        Rng rng = rng_for(25, i);
        const int n = pick(rng, 1, 5);
        const StateVector psi = random_state(n, rng);
        const UnitaryOp ub = random_unitary(random_targets(n, pick(rng, 1, n), rng), rng);
        const UnitaryOp ua = random_unitary(random_targets(n, pick(rng, 1, n), rng), rng);
        const auto fam = rotated_family(random_targets(n, 1, rng), rng);
        const StateVector pre = apply_unitary(ub, psi);
        const std::size_t k = static_cast<std::size_t>(pick(rng, 0, static_cast<int>(fam.size()) - 1));
        const StateVector fin = apply_unitary(ua, quantum_jump(pre, fam.members()[k]));

        // Forward picture: Born weight of each outcome times the chance that
        // its evolved jump state is then found as `fin`.
        std::vector<double> fwd;
        double total = 0.0;
        for (const auto& p : fam.members()) {
            const double born = apply_projector(p, pre).norm_squared();
            const double reach = born > 0.0 ? std::norm(inner(fin, apply_unitary(ua, quantum_jump(pre, p)))) : 0.0;
            fwd.push_back(born * reach);
            total += born * reach;
        }
        Schedule s;
        s.forward(ub).event(fam).forward(ua);
        const auto chains = chain_distribution(BoundaryPair(psi, fin), s);
        worst = std::max(worst, std::abs(chains[k].probability - 1.0));
        for (std::size_t j = 0; j < fwd.size(); ++j) {
            worst = std::max(worst, std::abs(chains[j].probability - fwd[j] / total));
        }
    }
    return {worst <= 1e-12, fmt("max |P_chain - P_jump| = %.3g; realized outcome has probability 1", worst)};
}

// ---------------------------------------------------------------------------
// witness-dynamics

std::vector<Splitter> random_splitters(int d, Rng& rng)
{
    std::vector<Splitter> s;
    for (int k = 0; k < d; ++k) {
        s.push_back({random_unitary({0}, rng), ProjectiveFamily::computational({0}), k + 1});
    }
    return s;
}

std::pair<bool, std::string> check_witness_unitarity()
{
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        Rng rng = rng_for(31, i);
        const int n = pick(rng, 1, 6);
        const StateVector psi = tensor(random_state(n, rng), StateVector(1));
        const auto fam = rotated_family({pick(rng, 0, n - 1)}, rng);
        worst = std::max(worst, std::abs(record_decision(psi, fam, n).norm() - 1.0));
    }
    return {worst <= 1e-12, fmt("max | |record(psi)| - 1 | = %.3g over 1000 inputs", worst)};
}

std::pair<bool, std::string> check_leaf_orthogonality()
{
    double worst_overlap = 0.0;
    double worst_sum = 0.0;
    for (std::uint64_t i = 0; i < 30; ++i) {
        Rng rng = rng_for(32, i);
        const int d = pick(rng, 1, 6);
        const DecisionTree tree = build_decision_tree(StateVector(d + 1), random_splitters(d, rng));
        std::vector<StateVector> leaves;
        double sum = 0.0;
        for (std::uint64_t l = 0; l < tree.leaf_count(); ++l) {
            leaves.push_back(tree.leaf(l));
            sum += leaves.back().norm_squared();
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        for (std::size_t a = 0; a < leaves.size(); ++a) {
            for (std::size_t b = a + 1; b < leaves.size(); ++b) {
                worst_overlap = std::max(worst_overlap, std::abs(inner(leaves[a], leaves[b])));
            }
        }
    }
    return {worst_overlap < 1e-10 && worst_sum <= 1e-10,
            fmt("max |<leaf_i|leaf_j>| = %.3g, max |sum |leaf|^2 - 1| = %.3g", worst_overlap, worst_sum)};
}

std::pair<bool, std::string> check_overlap_decay(int max_depth)
{
    double worst = 0.0;
    for (int d = 1; d <= max_depth; ++d) {
        const OverlapDecayReport r = overlap_decay(d, 0.5, derive_seed(33, static_cast<std::uint64_t>(d)));
        const double want = std::ldexp(1.0, -d);
        for (double v : r.squared_overlaps) {
            worst = std::max(worst, std::abs(v - want));
        }
    }
    const OverlapDecayReport b = overlap_decay(4, 0.9, 33);
    const double biased = std::abs(b.squared_overlaps[b.majority_leaf] - 0.6561);
    return {worst <= 1e-9 && biased <= 1e-9,
            fmt(("max |overlap^2 - 0.5^d| = %.3g for d <= " + std::to_string(max_depth)
                 + ", |majority(d=4, p=0.9) - 0.6561| = %.3g")
                    .c_str(),
                worst, biased)};
}

std::pair<bool, std::string> check_witness_deferral()
{
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        Rng rng = rng_for(34, i);
        const int d = pick(rng, 1, 6);
        const auto splitters = random_splitters(d, rng);
        const DecisionTree tree = build_decision_tree(StateVector(d + 1), splitters);
        const auto weights = tree.leaf_weights();
        std::uint64_t leaf = 0;
        for (std::uint64_t l = 1; l < weights.size(); ++l) {
            if (weights[l] > weights[leaf]) {
                leaf = l;
            }
        }
        const int collapse_at = pick(rng, 0, d - 1);

        StateVector psi(d + 1);
        for (int k = 0; k < d; ++k) {
            psi = apply_unitary(splitters[static_cast<std::size_t>(k)].unitary, psi);
            psi = record_decision(psi, splitters[static_cast<std::size_t>(k)].basis, k + 1);
            if (k == collapse_at) {
                psi = quantum_jump(psi, Projector::basis({0}, (leaf >> k) & 1u));
            }
        }
        // Post-select the same leaf on the witness register.
        const StateVector late = apply_projector(Projector::basis(tree.witnesses(), leaf), psi).normalized();
        const StateVector direct = tree.leaf(leaf).normalized();
        const Complex phase = inner(direct, late);
        worst = std::max(worst, std::abs(std::abs(phase) - 1.0));
        for (std::size_t j = 0; j < late.dim(); ++j) {
            worst = std::max(worst, std::abs(late[j] - direct[j]));
        }
    }
    return {worst <= 1e-12, fmt("max difference between early collapse and late post-selection = %.3g", worst)};
}

std::pair<bool, std::string> check_path_uniqueness()
{
    for (std::uint64_t i = 0; i < 40; ++i) {
        Rng rng = rng_for(35, i);
        const int d = pick(rng, 1, 4);
        const auto splitters = random_splitters(d, rng);
        const DecisionTree tree = build_decision_tree(StateVector(d + 1), splitters);
        const auto w = tree.leaf_weights();
        std::uint64_t leaf = static_cast<std::uint64_t>(pick(rng, 0, static_cast<int>(w.size()) - 1));
        while (w[leaf] < 1e-6) {
            leaf = (leaf + 1) % w.size();
        }
        const auto chains =
            chain_distribution(BoundaryPair(tree.initial(), tree.leaf(leaf).normalized()), decision_schedule(splitters));
        int ones = 0;
        for (std::size_t c = 0; c < chains.size(); ++c) {
            if (std::abs(chains[c].probability - 1.0) <= 1e-12) {
                ++ones;
                std::string labels;
                for (const auto& ch : chains[c].chain.choices) {
                    labels += ch.label;
                }
                if (labels != tree.label(leaf)) {
                    return {false, "the certain chain is not the post-selected leaf"};
                }
            } else if (chains[c].probability > 1e-12) {
                return {false, "a second chain carries probability"};
            }
        }
        if (ones != 1) {
            return {false, "no chain reaches probability 1"};
        }
    }
    return {true, "exactly one chain has probability 1 in 40 random trees"};
}

// ---------------------------------------------------------------------------
// boundary-sampling

std::pair<bool, std::string> born_at(double theta, std::uint64_t n, std::uint64_t seed)
{
    CrunchToyConfig c;
    c.theta = theta;
    c.w = 3;
    c.n_samples = n;
    c.seed = seed;
    const DominanceReport r = born_emergence(c);
    const double p = std::cos(theta / 2) * std::cos(theta / 2);
    const double tol = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(r.up_count + r.down_count));
    const double dev = std::abs(r.freq_up - p);
    return {dev <= tol, fmt("theta=%.4f: |freq_up - cos^2(theta/2)| = ", theta) + fmt("%.3g (3 sigma %.3g)", dev, tol)};
}

std::pair<bool, std::string> check_born_quick() { return born_at(kPi / 3, 20000, 41); }

std::pair<bool, std::string> check_born_grid()
{
    const double grid[] = {0.0, kPi / 6, kPi / 4, kPi / 3, kPi / 2, 2 * kPi / 3, kPi};
    std::string detail;
    bool ok = true;
    std::uint64_t k = 0;
    for (double t : grid) {
        auto [pass, d] = born_at(t, 100000, derive_seed(42, k++));
        ok = ok && pass;
        detail += (detail.empty() ? "" : "; ") + d;
    }
    return {ok, detail};
}

std::pair<bool, std::string> check_dominance_gap()
{
    std::vector<double> ws{4, 8, 16};
    std::vector<double> spreads;
    for (double w : ws) {
        CrunchToyConfig c;
        c.theta = kPi / 2;
        c.w = static_cast<int>(w);
        c.n_samples = 10000;
        c.ensemble = EnsembleKind::PhaseRandomProduct;
        c.seed = 43;
        spreads.push_back(dominance_gap_stats(c).spread);
    }
    const double slope = fit_power_exponent(ws, spreads);
    return {slope >= 0.35 && slope <= 0.65, fmt("spread fit exponent over w = 4, 8, 16 is %.4f", slope)};
}

std::pair<bool, std::string> check_determinism()
{
    CrunchToyConfig c;
    c.theta = 1.0;
    c.w = 3;
    c.n_samples = 20000;
    c.seed = 44;
    const unsigned saved = parallel::thread_count();
    parallel::set_thread_count(1);
    const DominanceReport a = born_emergence(c);
    parallel::set_thread_count(4);
    const DominanceReport b = born_emergence(c);
    parallel::set_thread_count(saved);
    bool same = a.up_count == b.up_count && a.down_count == b.down_count && a.tie_count == b.tie_count
                && a.log10_gaps == b.log10_gaps && a.spread == b.spread;
    return {same, same ? "1 and 4 workers give identical tallies and gaps" : "results depend on the worker count"};
}

// ---------------------------------------------------------------------------
// macro-rules

std::pair<bool, std::string> check_rule1()
{
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const Rule1Trial t = rule1_trial(51, i);
        worst = std::max({worst, std::abs(t.emission_base - t.emission_modified), std::abs(t.total_base - 1.0),
                          std::abs(t.total_modified - 1.0), std::abs(t.sink_probability - t.blocked_weight)});
    }
    return {worst <= 1e-12, fmt("max emission shift / total / sink mismatch over 200 networks = %.3g", worst)};
}

std::pair<bool, std::string> check_rule2()
{
    std::vector<double> es{0.05, 0.1, 0.2};
    std::vector<double> dev;
    for (double e : es) {
        dev.push_back(antenna_point(e, e, 0.0).ratio - 1.0);
    }
    if (!std::all_of(dev.begin(), dev.end(), [](double d) { return d > 0.0; })) {
        return {false, "no enhancement at phi = 0"};
    }
    const double slope = fit_power_exponent(es, dev);

    AntennaConfig cfg;
    cfg.phase_mode = PhaseMode::Averaged;
    cfg.samples = 10000;
    cfg.seed = 52;
    const double avg = std::abs(antenna_experiment(cfg).ratio.mean - 1.0);

    double flat = 0.0;
    const double r0 = antenna_point(0.1, 0.0, 0.0).ratio;
    for (int k = 1; k < 16; ++k) {
        flat = std::max(flat, std::abs(antenna_point(0.1, 0.0, 2 * kPi * k / 16).ratio - r0));
    }
    const bool ok = slope >= 1.8 && slope <= 2.2 && avg < 1e-3 && flat <= 1e-12;
    return {ok, fmt("eps exponent %.4f, |averaged ratio - 1| = %.3g", slope, avg) + fmt(", single-antenna spread %.3g", flat)};
}

std::pair<bool, std::string> check_performance()
{
    Rng rng = rng_for(53, 0);
    const int n = 20;
    Schedule s;
    for (int k = 0; k < 100; ++k) {
        s.segment(random_unitary({pick(rng, 0, n - 1)}, rng));
    }
    const BoundaryPair b{StateVector(n), StateVector(n)};
    const auto t0 = std::chrono::steady_clock::now();
    const Complex a = two_boundary_amplitude(b, s);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {secs <= 5.0 && std::isfinite(a.real()), fmt("20 qubits, 100 gates: %.3f s", secs)};
}

std::vector<Check> all_checks()
{
    return {
        {"unitarity", false, check_unitarity},
        {"projective_completeness", false, check_completeness},
        {"kronecker_apply", false, check_kronecker},
        {"inner_conjugate_symmetry", false, check_inner_symmetry},
        {"abl_normalization", false, check_abl_normalization},
        {"chain_bruteforce", false, check_chain_bruteforce},
        {"deferral_identity", false, check_deferral},
        {"time_symmetry", false, check_time_symmetry},
        {"jump_consistency", false, check_jump_consistency},
        {"witness_unitarity", false, check_witness_unitarity},
        {"leaf_orthogonality", false, check_leaf_orthogonality},
        {"overlap_decay", false, [] { return check_overlap_decay(12); }},
        {"overlap_decay_deep", true, [] { return check_overlap_decay(20); }},
        {"witness_deferral", false, check_witness_deferral},
        {"path_uniqueness", false, check_path_uniqueness},
        {"born_emergence", false, check_born_quick},
        {"born_theta_grid", true, check_born_grid},
        {"dominance_gap_scaling", false, check_dominance_gap},
        {"thread_determinism", false, check_determinism},
        {"rule1_emission_invariance", false, check_rule1},
        {"rule2_second_order", false, check_rule2},
        {"performance_20q", true, check_performance},
    };
}

}  // namespace

void set_mutation(Mutation m) { g_mutation.store(m); }
Mutation mutation() { return g_mutation.load(); }

double deferral_error(std::uint64_t seed, std::uint64_t index, int max_qubits)
{
    Rng rng = rng_for(seed, index);
    const int n = pick(rng, 1, max_qubits);
    const BoundaryPair b(random_state(n, rng), random_state(n, rng));
    const UnitaryOp u1 = random_unitary(random_targets(n, pick(rng, 1, std::min(3, n)), rng), rng);
    const Projector p = random_projector(random_targets(n, pick(rng, 1, std::min(2, n)), rng), rng);
    const UnitaryOp u2 = random_unitary(random_targets(n, pick(rng, 1, std::min(3, n)), rng), rng);

    const Projector deferred = mutation() == Mutation::Deferral ? p : defer_projection(p, u2);
    Schedule lhs;
    lhs.segment(u1).project(p).segment(u2);
    Schedule rhs;
    rhs.segment(u1).segment(u2).project(deferred);
    return std::abs(two_boundary_amplitude(b, lhs) - two_boundary_amplitude(b, rhs));
}

std::vector<CheckResult> run_checks(Level level, std::ostream* progress)
{
    std::vector<CheckResult> out;
    for (const auto& c : all_checks()) {
        if (c.full_only && level != Level::Full) {
            continue;
        }
        CheckResult r;
        r.name = c.name;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            auto [ok, detail] = c.body();
            r.passed = ok;
            r.detail = std::move(detail);
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (progress != nullptr) {
            *progress << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n" << std::flush;
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace tbsim::verify
