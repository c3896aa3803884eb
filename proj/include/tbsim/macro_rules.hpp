#pragma once

// Optical toy experiments for the two macroscopic transition rules.
//
// Rule 1 lives in the single-excitation sector of a linear mode network: one
// excitation spread over n modes is described by n amplitudes, and every
// element is a unitary on those amplitudes. Rule 2 is the two-antenna setup,
// evaluated with the two-boundary engine on a 4-qubit register.

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "tbsim/hilbert.hpp"
#include "tbsim/two_boundary.hpp"

namespace tbsim {

// ---------------------------------------------------------------------------
// Rule 1: mode networks

/// Real rotation [[c, -s], [s, c]] with c = cos(angle) on modes (a, b).
struct BeamSplitter {
    int a;
    int b;
    double angle;
};

struct PhaseShift {
    int mode;
    double phi;
};

/// Swaps the excitation of `mode` into `sink`; nothing is deleted.
struct Block {
    int mode;
    int sink;
};

/// Any unitary on a list of modes; checked at construction.
struct CustomElement {
    Matrix u;
    std::vector<int> modes;
};

using NetworkElement = std::variant<BeamSplitter, PhaseShift, Block, CustomElement>;

class ModeNetwork {
public:
    /// `n_modes` regular modes; sinks are appended with add_sink.
    explicit ModeNetwork(int n_modes);

    /// Regular modes plus sinks.
    int n_modes() const noexcept { return n_modes_; }
    const std::vector<int>& sinks() const noexcept { return sinks_; }
    const std::vector<NetworkElement>& elements() const noexcept { return elements_; }

    /// Adds a dedicated sink mode and returns its index. Only Block elements
    /// may touch a sink, and each sink takes at most one Block.
    int add_sink();

    ModeNetwork& add(NetworkElement e);
    /// Appends the elements of a network with the same modes and sinks.
    ModeNetwork& append(const ModeNetwork& downstream);

    /// Full n_modes x n_modes transfer matrix, last element leftmost.
    Matrix transfer() const;

private:
    void check_mode(int m) const;
    bool is_sink(int m) const;
    bool sink_used(int sink) const;

    int n_modes_;
    std::vector<int> sinks_;
    std::vector<NetworkElement> elements_;
};

/// Normalized single-excitation state: amplitude amps[m] on the basis vector
/// with only bit m set.
StateVector single_excitation(const std::vector<Complex>& amps);

/// Output mode amplitudes for input mode amplitudes.
std::vector<Complex> propagate(const ModeNetwork& net, const std::vector<Complex>& input);

/// Output probability per mode. The input must be a normalized state on
/// n_modes qubits supported on the single-excitation sector.
std::vector<double> run_network(const ModeNetwork& net, const StateVector& input);

enum class MzBlock { None, ForwardPort, Arm };

/// Balanced interferometer on modes 0 and 1 with phase phi on arm 0 and one
/// sink (mode 2). Mode 0 is the forward port.
ModeNetwork mach_zehnder(double phi, MzBlock block = MzBlock::None);

/// Probability that the excitation left `emitter`: 1 - p_out[emitter].
double emission_probability(const ModeNetwork& net, const StateVector& input, int emitter);

struct Rule1Trial {
    int n_modes = 0;
    double emission_base = 0.0;
    double emission_modified = 0.0;
    double total_base = 0.0;
    double total_modified = 0.0;
    double sink_probability = 0.0;
    /// Probability held by the blocked modes just before the blocks.
    double blocked_weight = 0.0;
    int blocked_modes = 0;
};

/// Random emitter-plus-network instance `index`: mode 0 is an emitter coupled
/// to mode 1, a random downstream network follows, and the modified copy adds
/// random phases and blocks into fresh sinks after it.
Rule1Trial rule1_trial(std::uint64_t seed, std::uint64_t index);
/// The same instance as networks, for external checking.
struct Rule1Networks {
    ModeNetwork base;
    ModeNetwork modified;
    std::vector<Complex> input;
};
Rule1Networks rule1_networks(std::uint64_t seed, std::uint64_t index);

// ---------------------------------------------------------------------------
// Rule 2: two antennas facing an ellipsoid mirror

/// Register: qubit 0 antenna 1, qubit 1 antenna 2, qubit 2 the mirror's
/// positive-interference point mode, qubit 3 its complement.
namespace antenna_qubits {
inline constexpr int kA1 = 0;
inline constexpr int kA2 = 1;
inline constexpr int kPoint = 2;
inline constexpr int kComplement = 3;
}  // namespace antenna_qubits

enum class PhaseMode { Fixed, Averaged };
enum class Conditioning { None, DarkAtPoint };

struct AntennaConfig {
    double eps1 = 0.1;
    double eps2 = 0.1;
    PhaseMode phase_mode = PhaseMode::Fixed;
    double phi = 0.0;
    std::uint64_t samples = 10000;
    std::uint64_t seed = 0;
    Conditioning conditioning = Conditioning::DarkAtPoint;

    /// 0 <= eps <= 0.5 for both antennas, samples >= 2 when averaging.
    void validate() const;
};

struct AntennaModel {
    BoundaryPair boundaries;
    UnitaryOp emission;    // forward: antennas -> mirror modes
    UnitaryOp absorption;  // forward: mirror modes -> absorbing antennas
    ProjectiveFamily emitted;  // {"emit", "idle"} on antenna 1
    ProjectiveFamily dark;     // {"dark", "lit"} on the point mode
};

/// Two-port mirror coupling on (kPoint, kComplement): the field emitted by
/// antenna 1 goes to (P + C)/sqrt2, the field of antenna 2 to (P - C)/sqrt2.
UnitaryOp mirror_coupling();

AntennaModel antenna_model(double eps1, double eps2, double phi);

struct AntennaPoint {
    double p_unconditioned = 0.0;
    double p_conditioned = 0.0;
    double ratio = 1.0;
};

/// P(antenna 1 emitted) without and with the dark-point condition at fixed phi.
AntennaPoint antenna_point(double eps1, double eps2, double phi, Conditioning cond = Conditioning::DarkAtPoint);

struct PhaseAverage {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

struct AntennaReport {
    AntennaPoint point;  // fixed mode: the value; averaged: means of each field
    PhaseAverage ratio;  // averaged mode only (fixed mode: mean = ratio, stderr 0)
};

AntennaReport antenna_experiment(const AntennaConfig& cfg);

/// Mean and standard error of f over M phases drawn uniformly from [0, 2pi).
/// f may be called concurrently.
PhaseAverage phase_average(const std::function<double(double)>& f, std::uint64_t m, std::uint64_t seed);

/// The phases phase_average uses, in order.
double averaging_phase(std::uint64_t seed, std::uint64_t index);

}  // namespace tbsim
