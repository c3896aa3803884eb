#include "tbsim/sampling.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "tbsim/error.hpp"
#include "tbsim/parallel.hpp"
#include "tbsim/random.hpp"

namespace tbsim {

std::string_view ensemble_name(EnsembleKind kind) noexcept
{
    switch (kind) {
    case EnsembleKind::Haar:
        return "haar";
    case EnsembleKind::PhaseRandomProduct:
        return "phase-random-product";
    }
    return "?";
}

EnsembleKind parse_ensemble(std::string_view name)
{
    if (name == "haar") {
        return EnsembleKind::Haar;
    }
    if (name == "phase-random-product") {
        return EnsembleKind::PhaseRandomProduct;
    }
    fail(ErrorKind::Config, "unknown ensemble '" + std::string(name) + "' (haar, phase-random-product)");
}

QubitFactors product_factors(const FinalEnsemble& e, std::uint64_t index)
{
    Rng rng = rng_for(e.seed, index);
    QubitFactors f(static_cast<std::size_t>(e.n_qubits));
    const double two_pi = 2.0 * std::numbers::pi;
    for (auto& q : f) {
        // Haar direction on the Bloch sphere: |<0|q>|^2 is uniform on [0, 1].
        const double u = uniform01(rng);
        const double rel = two_pi * uniform01(rng);
        const double glob = two_pi * uniform01(rng);
        q[0] = std::polar(std::sqrt(u), glob);
        q[1] = std::polar(std::sqrt(1.0 - u), glob + rel);
    }
    return f;
}

StateVector sample_final(const FinalEnsemble& e, std::uint64_t index)
{
    if (e.n_qubits < 1 || e.n_qubits > max_qubits()) {
        fail(ErrorKind::Capacity, "ensemble dimension of " + std::to_string(e.n_qubits) + " qubits");
    }
    if (e.kind == EnsembleKind::Haar) {
        Rng rng = rng_for(e.seed, index);
        return random_state(e.n_qubits, rng);
    }
    const QubitFactors f = product_factors(e, index);
    StateBuilder b(e.n_qubits);
    auto& amps = b.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        Complex a = 1.0;
        for (std::size_t q = 0; q < f.size(); ++q) {
            a *= f[q][(i >> q) & 1u];
        }
        amps[i] = a;
    }
    return std::move(b).build(true);
}

// ---------------------------------------------------------------------------
// Toy model

void CrunchToyConfig::validate() const
{
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
        fail(ErrorKind::InvalidArgument, "theta must lie in [0, pi]");
    }
    if (w < 1) {
        fail(ErrorKind::InvalidArgument, "at least one witness is required (w >= 1)");
    }
    if (w + 1 > max_qubits()) {
        fail(ErrorKind::Capacity, "w = " + std::to_string(w) + " exceeds the register limit");
    }
    if (n_samples < 1) {
        fail(ErrorKind::InvalidArgument, "need at least one sample");
    }
}

namespace {

std::size_t up_index(int w) { return ((std::size_t{1} << w) - 1) << 1; }
constexpr std::size_t kDownIndex = 1;

}  // namespace

BranchAmplitudes branch_amplitudes(const CrunchToyConfig& c, const StateVector& final_state)
{
    if (final_state.n_qubits() != c.w + 1) {
        fail(ErrorKind::DimensionMismatch, "final state has " + std::to_string(final_state.n_qubits())
                                               + " qubits, toy model needs " + std::to_string(c.w + 1));
    }
    return {std::cos(c.theta / 2) * final_state[up_index(c.w)], std::sin(c.theta / 2) * final_state[kDownIndex]};
}

BranchAmplitudes branch_amplitudes(const CrunchToyConfig& c, const QubitFactors& f)
{
    if (f.size() != static_cast<std::size_t>(c.w + 1)) {
        fail(ErrorKind::DimensionMismatch, "factor count does not match 1 + w");
    }
    Complex up = f[0][0];
    Complex down = f[0][1];
    for (std::size_t q = 1; q < f.size(); ++q) {
        up *= f[q][1];
        down *= f[q][0];
    }
    return {std::cos(c.theta / 2) * up, std::sin(c.theta / 2) * down};
}

std::string_view branch_name(Branch b) noexcept { return b == Branch::Up ? "up" : "down"; }

Selection select_dominant(Complex up, Complex down)
{
    const double a = std::abs(up);
    const double b = std::abs(down);
    if (a < kTieThreshold && b < kTieThreshold) {
        fail(ErrorKind::BothZero, "both branch amplitudes vanish");
    }
    if (std::abs(a - b) < kTieThreshold) {
        return {Branch::Up, true};
    }
    return {a > b ? Branch::Up : Branch::Down, false};
}

namespace {

SampleRecord classify(const BranchAmplitudes& amp)
{
    SampleRecord r;
    r.log10_up = std::log10(std::abs(amp.up));
    r.log10_down = std::log10(std::abs(amp.down));
    try {
        r.selection = select_dominant(amp.up, amp.down);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::BothZero) {
            throw;
        }
        r.excluded = true;
    }
    return r;
}

DominanceReport run_samples(const CrunchToyConfig& c)
{
    c.validate();
    const FinalEnsemble e = c.final_ensemble();
    DominanceReport rep;
    rep.n_samples = c.n_samples;
    rep.samples.resize(c.n_samples);
    parallel::for_chunks(
        c.n_samples,
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const BranchAmplitudes amp = e.kind == EnsembleKind::Haar
                                                 ? branch_amplitudes(c, sample_final(e, i))
                                                 : branch_amplitudes(c, product_factors(e, i));
                rep.samples[i] = classify(amp);
            }
        },
        256);

    double sum = 0.0;
    for (const auto& s : rep.samples) {
        if (s.excluded) {
            ++rep.both_zero_count;
            continue;
        }
        if (s.selection.winner == Branch::Up) {
            ++rep.up_count;
        } else {
            ++rep.down_count;
        }
        if (s.selection.tie) {
            ++rep.tie_count;
        }
        if (std::isfinite(s.log10_up) && std::isfinite(s.log10_down)) {
            rep.log10_gaps.push_back(s.log10_up - s.log10_down);
            sum += rep.log10_gaps.back();
        } else {
            ++rep.one_sided_count;
        }
    }
    const std::uint64_t decided = rep.up_count + rep.down_count;
    rep.freq_up = decided > 0 ? static_cast<double>(rep.up_count) / static_cast<double>(decided)
                              : std::numeric_limits<double>::quiet_NaN();
    const std::size_t m = rep.log10_gaps.size();
    if (m > 0) {
        rep.mean_gap = sum / static_cast<double>(m);
    }
    if (m > 1) {
        double ss = 0.0;
        for (double g : rep.log10_gaps) {
            ss += (g - rep.mean_gap) * (g - rep.mean_gap);
        }
        rep.spread = std::sqrt(ss / static_cast<double>(m - 1));
    }
    return rep;
}

}  // namespace

DominanceReport born_emergence(const CrunchToyConfig& c) { return run_samples(c); }

DominanceReport dominance_gap_stats(const CrunchToyConfig& c)
{
    if (c.ensemble != EnsembleKind::PhaseRandomProduct) {
        fail(ErrorKind::InvalidArgument, "dominance gap statistics use the phase-random-product ensemble");
    }
    if (c.w < 2) {
        fail(ErrorKind::InvalidArgument, "dominance gap statistics need w >= 2");
    }
    return run_samples(c);
}

double fit_power_exponent(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) {
        fail(ErrorKind::InvalidArgument, "power fit needs at least two (x, y) pairs");
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            fail(ErrorKind::InvalidArgument, "power fit needs positive data");
        }
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) {
        fail(ErrorKind::InvalidArgument, "power fit needs distinct x values");
    }
    return sxy / sxx;
}

}  // namespace tbsim
