#include "tbsim/macro_rules.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "tbsim/error.hpp"
#include "tbsim/gates.hpp"
#include "tbsim/parallel.hpp"
#include "tbsim/random.hpp"

namespace tbsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void apply_element(const NetworkElement& e, std::vector<Complex>& v)
{
    std::visit(overloaded{[&](const BeamSplitter& bs) {
                              const double c = std::cos(bs.angle);
                              const double s = std::sin(bs.angle);
                              const Complex a = v[bs.a];
                              const Complex b = v[bs.b];
                              v[bs.a] = c * a - s * b;
                              v[bs.b] = s * a + c * b;
                          },
                          [&](const PhaseShift& p) { v[p.mode] *= std::polar(1.0, p.phi); },
                          [&](const Block& b) { std::swap(v[b.mode], v[b.sink]); },
                          [&](const CustomElement& c) {
                              const std::size_t k = c.modes.size();
                              std::vector<Complex> in(k);
                              for (std::size_t i = 0; i < k; ++i) {
                                  in[i] = v[c.modes[i]];
                              }
                              for (std::size_t r = 0; r < k; ++r) {
                                  Complex acc = 0.0;
                                  for (std::size_t j = 0; j < k; ++j) {
                                      acc += c.u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) * in[j];
                                  }
                                  v[c.modes[r]] = acc;
                              }
                          }},
               e);
}

}  // namespace

// ---------------------------------------------------------------------------
// ModeNetwork

ModeNetwork::ModeNetwork(int n_modes) : n_modes_(n_modes)
{
    if (n_modes < 1) {
        fail(ErrorKind::InvalidArgument, "a network needs at least one mode");
    }
}

int ModeNetwork::add_sink()
{
    sinks_.push_back(n_modes_);
    return n_modes_++;
}

void ModeNetwork::check_mode(int m) const
{
    if (m < 0 || m >= n_modes_) {
        fail(ErrorKind::TargetOutOfRange, "mode " + std::to_string(m) + " of a " + std::to_string(n_modes_)
                                              + "-mode network");
    }
}

bool ModeNetwork::is_sink(int m) const { return std::find(sinks_.begin(), sinks_.end(), m) != sinks_.end(); }

bool ModeNetwork::sink_used(int sink) const
{
    return std::any_of(elements_.begin(), elements_.end(), [&](const NetworkElement& e) {
        const auto* b = std::get_if<Block>(&e);
        return b != nullptr && b->sink == sink;
    });
}

ModeNetwork& ModeNetwork::add(NetworkElement e)
{
    auto regular = [&](int m) {
        check_mode(m);
        if (is_sink(m)) {
            fail(ErrorKind::InvalidArgument, "mode " + std::to_string(m) + " is a sink");
        }
    };
    std::visit(overloaded{[&](const BeamSplitter& bs) {
                              regular(bs.a);
                              regular(bs.b);
                              if (bs.a == bs.b) {
                                  fail(ErrorKind::InvalidArgument, "beam splitter needs two distinct modes");
                              }
                          },
                          [&](const PhaseShift& p) { regular(p.mode); },
                          [&](const Block& b) {
                              regular(b.mode);
                              check_mode(b.sink);
                              if (!is_sink(b.sink)) {
                                  fail(ErrorKind::InvalidArgument, "block target " + std::to_string(b.sink)
                                                                       + " is not a sink mode");
                              }
                              if (sink_used(b.sink)) {
                                  fail(ErrorKind::InvalidArgument, "sink " + std::to_string(b.sink) + " already used");
                              }
                          },
                          [&](const CustomElement& c) {
                              std::set<int> seen;
                              for (int m : c.modes) {
                                  regular(m);
                                  if (!seen.insert(m).second) {
                                      fail(ErrorKind::InvalidArgument, "repeated mode in custom element");
                                  }
                              }
                              const auto k = static_cast<Eigen::Index>(c.modes.size());
                              if (c.u.rows() != k || c.u.cols() != k) {
                                  fail(ErrorKind::DimensionMismatch, "custom element matrix does not match its modes");
                              }
                              const Matrix err = c.u.adjoint() * c.u - Matrix::Identity(k, k);
                              if (k > 0 && err.cwiseAbs().maxCoeff() > kValidationTol) {
                                  fail(ErrorKind::NotUnitary, "custom network element is not unitary");
                              }
                          }},
               e);
    elements_.push_back(std::move(e));
    return *this;
}

ModeNetwork& ModeNetwork::append(const ModeNetwork& downstream)
{
    if (downstream.n_modes_ != n_modes_ || downstream.sinks_ != sinks_) {
        fail(ErrorKind::DimensionMismatch, "appended network has a different mode layout");
    }
    for (const auto& e : downstream.elements_) {
        add(e);
    }
    return *this;
}

Matrix ModeNetwork::transfer() const
{
    Matrix t(n_modes_, n_modes_);
    std::vector<Complex> col(static_cast<std::size_t>(n_modes_));
    for (int j = 0; j < n_modes_; ++j) {
        std::fill(col.begin(), col.end(), Complex(0.0));
        col[static_cast<std::size_t>(j)] = 1.0;
        for (const auto& e : elements_) {
            apply_element(e, col);
        }
        for (int i = 0; i < n_modes_; ++i) {
            t(i, j) = col[static_cast<std::size_t>(i)];
        }
    }
    return t;
}

StateVector single_excitation(const std::vector<Complex>& amps)
{
    if (amps.empty() || static_cast<int>(amps.size()) > max_qubits()) {
        fail(ErrorKind::Capacity, "single-excitation state over " + std::to_string(amps.size()) + " modes");
    }
    StateBuilder b(static_cast<int>(amps.size()));
    auto& out = b.amplitudes();
    for (std::size_t m = 0; m < amps.size(); ++m) {
        out[std::size_t{1} << m] = amps[m];
    }
    return std::move(b).build(false).normalized();
}

std::vector<Complex> propagate(const ModeNetwork& net, const std::vector<Complex>& input)
{
    if (static_cast<int>(input.size()) != net.n_modes()) {
        fail(ErrorKind::DimensionMismatch, "input has " + std::to_string(input.size()) + " modes, network "
                                               + std::to_string(net.n_modes()));
    }
    std::vector<Complex> v = input;
    for (const auto& e : net.elements()) {
        apply_element(e, v);
    }
    return v;
}

std::vector<double> run_network(const ModeNetwork& net, const StateVector& input)
{
    if (input.n_qubits() != net.n_modes()) {
        fail(ErrorKind::DimensionMismatch, "input register does not match the network's modes");
    }
    if (std::abs(input.norm_squared() - 1.0) > kValidationTol) {
        fail(ErrorKind::InvalidArgument, "network input is not normalized");
    }
    std::vector<Complex> modes(static_cast<std::size_t>(net.n_modes()));
    double inside = 0.0;
    for (int m = 0; m < net.n_modes(); ++m) {
        modes[static_cast<std::size_t>(m)] = input[std::size_t{1} << m];
        inside += std::norm(modes[static_cast<std::size_t>(m)]);
    }
    if (std::abs(inside - 1.0) > kValidationTol) {
        fail(ErrorKind::InvalidArgument, "network input leaves the single-excitation sector");
    }
    const std::vector<Complex> out = propagate(net, modes);
    std::vector<double> p(out.size());
    std::transform(out.begin(), out.end(), p.begin(), [](Complex a) { return std::norm(a); });
    return p;
}

ModeNetwork mach_zehnder(double phi, MzBlock block)
{
    const double quarter = std::numbers::pi / 4;
    ModeNetwork net(2);
    const int sink = net.add_sink();
    net.add(BeamSplitter{0, 1, quarter});
    net.add(PhaseShift{0, phi});
    if (block == MzBlock::Arm) {
        net.add(Block{0, sink});
    }
    net.add(BeamSplitter{0, 1, -quarter});
    if (block == MzBlock::ForwardPort) {
        net.add(Block{0, sink});
    }
    return net;
}

double emission_probability(const ModeNetwork& net, const StateVector& input, int emitter)
{
    if (emitter < 0 || emitter >= net.n_modes()) {
        fail(ErrorKind::TargetOutOfRange, "emitter mode " + std::to_string(emitter));
    }
    return 1.0 - run_network(net, input)[static_cast<std::size_t>(emitter)];
}

// ---------------------------------------------------------------------------
// Random rule-1 instances

namespace {

int uniform_int(Rng& rng, int lo, int hi)  // inclusive
{
    return lo + static_cast<int>(uniform01(rng) * (hi - lo + 1));
}

NetworkElement random_element(Rng& rng, int first, int last)
{
    const double two_pi = 2.0 * std::numbers::pi;
    const int kind = uniform_int(rng, 0, 2);
    const int a = uniform_int(rng, first, last);
    int b = uniform_int(rng, first, last - 1);
    if (b >= a) {
        ++b;
    }
    if (kind == 0) {
        return BeamSplitter{a, b, two_pi * uniform01(rng)};
    }
    if (kind == 1) {
        return PhaseShift{a, two_pi * uniform01(rng)};
    }
    const UnitaryOp u = random_unitary({0}, rng);  // 2x2, acting on the mode pair
    return CustomElement{u.matrix(), {a, b}};
}

}  // namespace

Rule1Networks rule1_networks(std::uint64_t seed, std::uint64_t index)
{
    Rng rng = rng_for(seed, index);
    const int regular = uniform_int(rng, 3, 8);
    const int n_blocks = uniform_int(rng, 1, regular - 2);

    ModeNetwork base(regular);
    std::vector<int> sinks;
    for (int k = 0; k < n_blocks; ++k) {
        sinks.push_back(base.add_sink());
    }
    // Emitter (mode 0) hands its excitation to the fibre (mode 1) with a
    // random coupling; nothing downstream touches the emitter again.
    base.add(BeamSplitter{0, 1, 0.1 + (std::numbers::pi / 2 - 0.2) * uniform01(rng)});
    const int n_elements = uniform_int(rng, 2, 12);
    for (int k = 0; k < n_elements; ++k) {
        base.add(random_element(rng, 1, regular - 1));
    }

    ModeNetwork modified = base;
    for (int m = 1; m < regular; ++m) {
        modified.add(PhaseShift{m, 2.0 * std::numbers::pi * uniform01(rng)});
    }
    std::vector<int> candidates;
    for (int m = 1; m < regular; ++m) {
        candidates.push_back(m);
    }
    for (int k = 0; k < n_blocks; ++k) {
        const int pick = uniform_int(rng, 0, static_cast<int>(candidates.size()) - 1);
        modified.add(Block{candidates[static_cast<std::size_t>(pick)], sinks[static_cast<std::size_t>(k)]});
        candidates.erase(candidates.begin() + pick);
    }
    const int n_after = uniform_int(rng, 0, 6);
    for (int k = 0; k < n_after; ++k) {
        modified.add(random_element(rng, 1, regular - 1));
    }

    std::vector<Complex> input(static_cast<std::size_t>(base.n_modes()));
    input[0] = 1.0;
    return {std::move(base), std::move(modified), std::move(input)};
}

Rule1Trial rule1_trial(std::uint64_t seed, std::uint64_t index)
{
    const Rule1Networks nets = rule1_networks(seed, index);
    const StateVector in = single_excitation(nets.input);
    const std::vector<double> pb = run_network(nets.base, in);
    const std::vector<double> pm = run_network(nets.modified, in);

    Rule1Trial t;
    t.n_modes = nets.base.n_modes();
    t.emission_base = 1.0 - pb[0];
    t.emission_modified = 1.0 - pm[0];
    for (double p : pb) {
        t.total_base += p;
    }
    for (double p : pm) {
        t.total_modified += p;
    }
    for (int s : nets.modified.sinks()) {
        t.sink_probability += pm[static_cast<std::size_t>(s)];
    }
    // Phase shifts between the base network and the blocks leave every mode
    // probability unchanged, so the base output is the pre-block occupancy.
    for (const auto& e : nets.modified.elements()) {
        if (const auto* b = std::get_if<Block>(&e)) {
            t.blocked_weight += pb[static_cast<std::size_t>(b->mode)];
            ++t.blocked_modes;
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Antennas

void AntennaConfig::validate() const
{
    if (!(eps1 > 0.0 && eps1 <= 0.5)) {
        fail(ErrorKind::InvalidArgument, "eps1 must lie in (0, 0.5]");
    }
    if (!(eps2 >= 0.0 && eps2 <= 0.5)) {
        fail(ErrorKind::InvalidArgument, "eps2 must lie in [0, 0.5]");
    }
    if (!std::isfinite(phi)) {
        fail(ErrorKind::InvalidArgument, "phi must be finite");
    }
    if (phase_mode == PhaseMode::Averaged && samples < 2) {
        fail(ErrorKind::InvalidArgument, "phase averaging needs at least two samples");
    }
}

UnitaryOp mirror_coupling()
{
    using namespace antenna_qubits;
    const double h = 1.0 / std::sqrt(2.0);
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 1.0;
    m(1, 1) = h;
    m(2, 1) = h;
    m(1, 2) = h;
    m(2, 2) = -h;
    m(3, 3) = 1.0;
    return UnitaryOp(std::move(m), {kPoint, kComplement});
}

AntennaModel antenna_model(double eps1, double eps2, double phi)
{
    using namespace antenna_qubits;
    const Complex x1[2] = {std::sqrt(1.0 - eps1 * eps1), eps1};
    const Complex x2[2] = {std::sqrt(1.0 - eps2 * eps2), std::polar(eps2, phi)};
    // Receivers: qubit 0 takes what antenna 2 sent, qubit 1 what antenna 1
    // sent. The two receivers are phase-opposed.
    const Complex y1[2] = {std::sqrt(1.0 - eps2 * eps2), -eps2};
    const Complex y2[2] = {std::sqrt(1.0 - eps1 * eps1), eps1};

    std::vector<Complex> init(16);
    std::vector<Complex> fin(16);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            init[static_cast<std::size_t>(a | (b << 1))] = x1[a] * x2[b];
            fin[static_cast<std::size_t>(a | (b << 1))] = y1[a] * y2[b];
        }
    }

    const UnitaryOp mirror = mirror_coupling();
    UnitaryOp emission = gates::compose(mirror, gates::compose(gates::swap(kA2, kComplement), gates::swap(kA1, kPoint)));
    UnitaryOp absorption =
        gates::compose(gates::swap(kPoint, kA2), gates::compose(gates::swap(kComplement, kA1), mirror.adjoint()));

    return AntennaModel{
        BoundaryPair(StateVector::from_amplitudes(std::move(init), true),
                     StateVector::from_amplitudes(std::move(fin), true)),
        std::move(emission),
        std::move(absorption),
        ProjectiveFamily::binary(Projector::basis({kA1}, 1), "emit", "idle"),
        ProjectiveFamily::binary(Projector::basis({kPoint}, 0), "dark", "lit"),
    };
}

AntennaPoint antenna_point(double eps1, double eps2, double phi, Conditioning cond)
{
    const AntennaModel m = antenna_model(eps1, eps2, phi);

    Schedule after;
    after.forward(m.emission).forward(m.absorption);
    const auto abl = abl_distribution(m.boundaries, Schedule{}, m.emitted, after);

    AntennaPoint p;
    p.p_unconditioned = abl[0].probability;
    if (cond == Conditioning::None) {
        p.p_conditioned = p.p_unconditioned;
        p.ratio = 1.0;
        return p;
    }

    Schedule s;
    s.event(m.emitted).forward(m.emission).event(m.dark).forward(m.absorption);
    double emit_dark = 0.0;
    double dark = 0.0;
    for (const auto& c : chain_distribution(m.boundaries, s)) {
        if (c.chain.choices[1].outcome != 0) {
            continue;
        }
        dark += c.probability;
        if (c.chain.choices[0].outcome == 0) {
            emit_dark += c.probability;
        }
    }
    if (dark < kZeroDenominator) {
        fail(ErrorKind::ZeroDenominator, "the point mode is never dark for these boundaries");
    }
    p.p_conditioned = emit_dark / dark;
    p.ratio = p.p_conditioned / p.p_unconditioned;
    return p;
}

double averaging_phase(std::uint64_t seed, std::uint64_t index)
{
    Rng rng = rng_for(seed, index);
    return 2.0 * std::numbers::pi * uniform01(rng);
}

namespace {

PhaseAverage summarize(const std::vector<double>& v)
{
    PhaseAverage a;
    a.samples = v.size();
    double sum = 0.0;
    for (double x : v) {
        sum += x;
    }
    a.mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) {
        ss += (x - a.mean) * (x - a.mean);
    }
    a.std_error = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    return a;
}

}  // namespace

PhaseAverage phase_average(const std::function<double(double)>& f, std::uint64_t m, std::uint64_t seed)
{
    if (m < 2) {
        fail(ErrorKind::InvalidArgument, "phase averaging needs M >= 2");
    }
    std::vector<double> v(m);
    parallel::for_chunks(
        m,
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                v[i] = f(averaging_phase(seed, i));
            }
        },
        64);
    return summarize(v);
}

AntennaReport antenna_experiment(const AntennaConfig& cfg)
{
    cfg.validate();
    AntennaReport r;
    if (cfg.phase_mode == PhaseMode::Fixed) {
        r.point = antenna_point(cfg.eps1, cfg.eps2, cfg.phi, cfg.conditioning);
        r.ratio = {r.point.ratio, 0.0, 1};
        return r;
    }

    std::vector<AntennaPoint> pts(cfg.samples);
    parallel::for_chunks(
        cfg.samples,
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                pts[i] = antenna_point(cfg.eps1, cfg.eps2, averaging_phase(cfg.seed, i), cfg.conditioning);
            }
        },
        64);
    std::vector<double> col(pts.size());
    auto mean_of = [&](double AntennaPoint::*field) {
        std::transform(pts.begin(), pts.end(), col.begin(), [&](const AntennaPoint& p) { return p.*field; });
        return summarize(col);
    };
    r.point.p_unconditioned = mean_of(&AntennaPoint::p_unconditioned).mean;
    r.point.p_conditioned = mean_of(&AntennaPoint::p_conditioned).mean;
    r.ratio = mean_of(&AntennaPoint::ratio);
    r.point.ratio = r.ratio.mean;
    return r;
}

}  // namespace tbsim
