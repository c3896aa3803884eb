// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tbsim/experiments.hpp"
#include "tbsim/gates.hpp"
#include "tbsim/macro_rules.hpp"
#include "tbsim/parallel.hpp"
#include "tbsim/random.hpp"
#include "tbsim/sampling.hpp"
#include "tbsim/two_boundary.hpp"
#include "tbsim/witness.hpp"

using namespace tbsim;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

int pick(Rng& rng, int lo, int hi) { return lo + static_cast<int>(uniform01(rng) * (hi - lo + 1)); }

std::vector<int> distinct(int n, int k, Rng& rng)
{
    std::vector<int> all;
    for (int i = 0; i < n; ++i) {
        all.push_back(i);
    }
    for (int i = 0; i < k; ++i) {
        std::swap(all[i], all[i + static_cast<std::size_t>(uniform01(rng) * (n - i))]);
    }
    all.resize(k);
    return all;
}

double slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(x.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

oracle::Vec apply_right(const oracle::Vec& v, const Matrix& m, const std::vector<int>& targets)
{
    return oracle::apply_gate(v, m, targets);
}

// ---------------------------------------------------------------------------

Outcome born_rule()
{
    const double thetas[] = {0, pi / 6, pi / 4, pi / 3, pi / 2, 2 * pi / 3, pi};
    const std::uint64_t n = 100000;
    bool ok = true;
    double worst = 0.0;
    for (std::size_t k = 0; k < 7; ++k) {
        CrunchToyConfig c;
        c.theta = thetas[k];
        c.w = 3;
        c.n_samples = n;
        c.ensemble = EnsembleKind::Haar;
        c.seed = derive_seed(2024, k);
        const DominanceReport r = born_emergence(c);
        const double p = std::pow(std::cos(c.theta / 2), 2);
        const double tol = 3.0 * std::sqrt(p * (1 - p) / static_cast<double>(n));
        const double dev = std::abs(r.freq_up - p);
        ok = ok && dev <= tol && r.up_count + r.down_count + r.both_zero_count == n;
        worst = std::max(worst, tol > 0 ? dev / tol : (dev > 0 ? 1e9 : 0.0));
    }
    return {ok, fmt("7 angles, N=1e5, worst |freq-cos^2| = %.3f of the 3-sigma band", worst)};
}

Outcome deferral()
{
    double worst = 0.0;
    double oracle_gap = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        Rng rng = rng_for(7001, i);
        const int n = pick(rng, 1, 8);
        const BoundaryPair b(random_state(n, rng), random_state(n, rng));
        const UnitaryOp u1 = random_unitary(distinct(n, pick(rng, 1, std::min(3, n)), rng), rng);
        const UnitaryOp u2 = random_unitary(distinct(n, pick(rng, 1, std::min(3, n)), rng), rng);
        const auto pt = distinct(n, pick(rng, 1, std::min(2, n)), rng);
        Projector p = Projector::onto(random_state(static_cast<int>(pt.size()), rng), pt);
        if (uniform01(rng) < 0.5) {
            p = p.complement();
        }
        Schedule lhs, rhs;
        lhs.segment(u1).project(p).segment(u2);
        rhs.segment(u1).segment(u2).project(defer_projection(p, u2));
        const Complex a = two_boundary_amplitude(b, lhs);
        worst = std::max(worst, std::abs(a - two_boundary_amplitude(b, rhs)));

        // independent evaluation of the left side
        oracle::Vec v = oracle::vec(b.final_state());
        v = apply_right(v, u2.matrix(), u2.targets());
        v = apply_right(v, p.matrix(), p.targets());
        v = apply_right(v, u1.matrix(), u1.targets());
        oracle_gap = std::max(oracle_gap, std::abs(a - oracle::vec(b.initial()).dot(v)));
    }
    return {worst <= 1e-12 && oracle_gap <= 1e-12,
            fmt("1000 instances, max identity error %.2e, max error vs direct evaluation %.2e", worst, oracle_gap)};
}

Outcome overlap()
{
    double worst = 0.0;
    for (int d = 1; d <= 20; ++d) {
        const OverlapDecayReport r = overlap_decay(d, 0.5, 900 + static_cast<std::uint64_t>(d));
        const double want = std::ldexp(1.0, -d);
        if (r.squared_overlaps.size() != (std::size_t{1} << d)) {
            return {false, "wrong leaf count"};
        }
        for (double v : r.squared_overlaps) {
            worst = std::max(worst, std::abs(v - want));
        }
    }
    return {worst <= 1e-9, fmt("d = 1..20, every leaf, max |overlap^2 - 0.5^d| = %.2e", worst)};
}

ProjectiveFamily random_family(int n, Rng& rng)
{
    const int q = pick(rng, 0, n - 1);
    if (uniform01(rng) < 0.5) {
        return ProjectiveFamily::computational({q});
    }
    return ProjectiveFamily::binary(Projector::onto(random_state(1, rng), {q}), "a", "b");
}

Outcome abl_consistency()
{
    double norm_err = 0.0;
    double brute_err = 0.0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        Rng rng = rng_for(7004, i);
        const int n = pick(rng, 1, 4);
        const BoundaryPair b(random_state(n, rng), random_state(n, rng));
        const UnitaryOp ua = random_unitary(distinct(n, pick(rng, 1, n), rng), rng);
        const UnitaryOp ub = random_unitary(distinct(n, pick(rng, 1, n), rng), rng);
        const UnitaryOp uc = random_unitary(distinct(n, pick(rng, 1, n), rng), rng);
        const ProjectiveFamily f1 = random_family(n, rng);
        const ProjectiveFamily f2 = random_family(n, rng);

        Schedule before, after;
        before.segment(ua);
        after.segment(ub);
        double s = 0.0;
        for (const auto& o : abl_distribution(b, before, f1, after)) {
            s += o.probability;
        }
        norm_err = std::max(norm_err, std::abs(s - 1.0));

        Schedule two;
        two.segment(ua).event(f1).segment(ub).event(f2).segment(uc);
        const auto chains = chain_distribution(b, two);
        s = 0.0;
        for (const auto& c : chains) {
            s += c.probability;
        }
        norm_err = std::max(norm_err, std::abs(s - 1.0));

        // every chain from dense matrices
        const oracle::Dense ma = oracle::full_matrix(ua.matrix(), ua.targets(), n);
        const oracle::Dense mb = oracle::full_matrix(ub.matrix(), ub.targets(), n);
        const oracle::Dense mc = oracle::full_matrix(uc.matrix(), uc.targets(), n);
        std::vector<double> w;
        double z = 0.0;
        for (const auto& p1 : f1.members()) {
            for (const auto& p2 : f2.members()) {
                const oracle::Dense m = ma * oracle::full_matrix(p1.matrix(), p1.targets(), n) * mb *
                                        oracle::full_matrix(p2.matrix(), p2.targets(), n) * mc;
                w.push_back(std::norm(oracle::sandwich(oracle::vec(b.initial()), m, oracle::vec(b.final_state()))));
                z += w.back();
            }
        }
        if (chains.size() != w.size()) {
            return {false, "chain count differs from the enumeration"};
        }
        for (std::size_t k = 0; k < w.size(); ++k) {
            brute_err = std::max(brute_err, std::abs(chains[k].probability - w[k] / z));
        }
    }
    return {norm_err <= 1e-12 && brute_err <= 1e-12,
            fmt("500 instances, max |sum - 1| = %.2e, max chain error vs enumeration %.2e", norm_err, brute_err)};
}

Outcome rule1()
{
    double emission_gap = 0.0;
    double total_gap = 0.0;
    double oracle_gap = 0.0;
    double diverted_gap = 0.0;
    int diverting = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const Rule1Networks r = rule1_networks(7005, i);
        std::vector<Complex> in = r.input;
        in.resize(static_cast<std::size_t>(r.modified.n_modes()), 0.0);
        const auto base = oracle::network_on_register(r.base, in);
        const auto mod = oracle::network_on_register(r.modified, in);
        emission_gap = std::max(emission_gap, std::abs(base[0] - mod[0]));
        double tb = 0.0, tm = 0.0, sink = 0.0;
        for (double x : base) {
            tb += x;
        }
        for (double x : mod) {
            tm += x;
        }
        for (int s : r.modified.sinks()) {
            sink += mod[static_cast<std::size_t>(s)];
        }
        total_gap = std::max({total_gap, std::abs(tb - 1.0), std::abs(tm - 1.0)});
        diverting += sink > 1e-9 ? 1 : 0;

        const Rule1Trial t = rule1_trial(7005, i);
        oracle_gap = std::max({oracle_gap, std::abs(t.emission_base - (1.0 - base[0])),
                               std::abs(t.emission_modified - (1.0 - mod[0])), std::abs(t.sink_probability - sink)});
        // the sinks hold exactly what sat in the blocked modes
        diverted_gap = std::max(diverted_gap, std::abs(t.blocked_weight - sink));
    }
    return {emission_gap <= 1e-12 && total_gap <= 1e-12 && oracle_gap <= 1e-12 && diverted_gap <= 1e-12 &&
                diverting > 100,
            fmt("200 networks, emission shift %.2e, |total - 1| %.2e, library vs register %.2e", emission_gap,
                total_gap, oracle_gap) +
                fmt(", sink vs blocked weight %.2e, %.0f networks divert weight", diverted_gap, diverting)};
}

Outcome rule2()
{
    std::vector<double> eps{0.05, 0.1, 0.2};
    std::vector<double> dev;
    for (double e : eps) {
        dev.push_back(std::abs(antenna_point(e, e, 0.0).ratio - 1.0));
    }
    const double k = slope(eps, dev);

    AntennaConfig cfg;
    cfg.phase_mode = PhaseMode::Averaged;
    cfg.samples = 10000;
    cfg.seed = 7006;
    const double avg = std::abs(antenna_experiment(cfg).ratio.mean - 1.0);

    double gap = 0.0;
    for (double e1 : {0.05, 0.1, 0.2}) {
        for (double e2 : {0.0, 0.05, 0.1, 0.2}) {
            for (int j = 0; j < 16; ++j) {
                const double phi = 2 * pi * j / 16;
                const AntennaPoint a = antenna_point(e1, e2, phi);
                const auto o = oracle::antenna::evaluate(e1, e2, phi);
                gap = std::max({gap, std::abs(a.ratio - o.ratio), std::abs(a.p_conditioned - o.p_conditioned),
                                std::abs(a.p_unconditioned - o.p_unconditioned)});
            }
        }
    }
    return {k >= 1.8 && k <= 2.2 && avg < 1e-3 && gap <= 1e-12,
            fmt("eps exponent %.4f, averaged |ratio - 1| = %.2e, max error vs path sum %.2e", k, avg, gap)};
}

Outcome dominance()
{
    std::vector<double> ws{4, 8, 16};
    std::vector<double> spreads;
    for (double w : ws) {
        CrunchToyConfig c;
        c.theta = pi / 2;
        c.w = static_cast<int>(w);
        c.n_samples = 10000;
        c.ensemble = EnsembleKind::PhaseRandomProduct;
        c.seed = 7007;
        const DominanceReport r = dominance_gap_stats(c);
        // spread recomputed from the reported gaps
        double m = 0.0;
        for (double g : r.log10_gaps) {
            m += g;
        }
        m /= static_cast<double>(r.log10_gaps.size());
        double v = 0.0;
        for (double g : r.log10_gaps) {
            v += (g - m) * (g - m);
        }
        spreads.push_back(std::sqrt(v / static_cast<double>(r.log10_gaps.size() - 1)));
    }
    const double k = slope(ws, spreads);
    return {k >= 0.35 && k <= 0.65,
            fmt("spreads %.4f, %.4f, %.4f", spreads[0], spreads[1], spreads[2]) + fmt(", fit exponent %.4f", k)};
}

Outcome determinism_and_speed()
{
    using namespace tbsim::experiments;
    const std::vector<Json> docs{
        {{"experiment", "born_emergence"}, {"N", 50000}, {"theta", 1.0}, {"seed", 11}},
        {{"experiment", "dominance_gap"}, {"N", 5000}, {"seed", 11}},
        {{"experiment", "antenna_experiment"}, {"phase_mode", "averaged"}, {"M", 5000}, {"seed", 11}},
        {{"experiment", "rule1_networks"}, {"trials", 100}, {"seed", 11}},
    };
    bool same = true;
    for (const auto& doc : docs) {
        std::string first;
        Json first_results;
        for (int t : {1, 2, 4}) {
            Json d = doc;
            d["threads"] = t;
            const RunReport r = execute(ExperimentConfig::from_json(d));
            std::ostringstream os;
            for (const auto& tb : r.tables) {
                write_csv(os, tb);
            }
            if (t == 1) {
                first = os.str();
                first_results = r.report.at("results");
            } else {
                same = same && os.str() == first && r.report.at("results") == first_results;
            }
        }
    }

    Rng rng = rng_for(7008, 0);
    const BoundaryPair b(random_state(20, rng), random_state(20, rng));
    Schedule s;
    for (int g = 0; g < 100; ++g) {
        s.segment(random_unitary({pick(rng, 0, 19)}, rng));
    }
    parallel::set_thread_count(0);
    const auto t0 = std::chrono::steady_clock::now();
    const Complex a = two_boundary_amplitude(b, s);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {same && secs <= 5.0 && std::isfinite(std::abs(a)),
            std::string(same ? "CSV and tallies identical at 1, 2, 4 threads" : "outputs differ across threads") +
                fmt("; 20 qubits x 100 gates in %.2f s", secs)};
}

}  // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"Born-rule emergence over the angle grid", born_rule},
        {"deferred projection identity", deferral},
        {"overlap decay 0.5^d", overlap},
        {"ABL normalization and chain enumeration", abl_consistency},
        {"rule 1 emission invariance", rule1},
        {"rule 2 second-order interference", rule2},
        {"dominance-gap scaling", dominance},
        {"determinism and performance", determinism_and_speed},
    };
    const double limits[] = {60.0, 10.0, 0, 0, 0, 0, 0, 0};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (limits[i] > 0 && secs > limits[i]) {
            o.pass = false;
            o.detail += fmt(" [over the %.0f s budget]", limits[i]);
        }
        failed += o.pass ? 0 : 1;
        std::printf("criterion %zu %s  %s: %s (%.2f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
