#pragma once

// Dense statevector algebra over an n-qubit computational basis.
//
// Qubit ordering is little-endian: qubit q is bit q of the basis index. An
// operator acting on targets (t0, t1, ...) sees local index
// bit(t0) + 2*bit(t1) + ..., so targets[0] is its least-significant qubit.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tbsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr int kDefaultMaxQubits = 26;
inline constexpr double kValidationTol = 1e-10;

/// Process-wide cap on register size. Anything larger raises CapacityError.
void set_max_qubits(int n);
int max_qubits();

class StateVector {
public:
    /// |0...0> on n qubits.
    explicit StateVector(int n_qubits);

    static StateVector basis(int n_qubits, std::uint64_t index);

    /// Takes ownership of amplitudes whose length must be a power of two. When
    /// `normalized` is set the norm is checked against kValidationTol.
    static StateVector from_amplitudes(std::vector<Complex> amps, bool normalized = false);

    int n_qubits() const noexcept { return n_qubits_; }
    std::size_t dim() const noexcept { return amps_.size(); }
    std::span<const Complex> amplitudes() const noexcept { return amps_; }
    Complex operator[](std::size_t i) const { return amps_[i]; }

    /// True only when the vector carries the normalized flag.
    bool is_normalized() const noexcept { return normalized_; }

    double norm_squared() const;
    double norm() const;

    /// Explicit normalization; a zero vector raises NullProjection.
    StateVector normalized() const;
    StateVector scaled(Complex factor) const;

    /// Bit-exact equality of amplitudes.
    friend bool operator==(const StateVector& a, const StateVector& b)
    {
        return a.n_qubits_ == b.n_qubits_ && a.amps_ == b.amps_;
    }

private:
    StateVector(int n_qubits, std::vector<Complex> amps, bool normalized);

    int n_qubits_ = 0;
    std::vector<Complex> amps_;
    bool normalized_ = false;

    friend class StateBuilder;
};

/// Mutable staging buffer used by kernels; `build` freezes it into a StateVector.
class StateBuilder {
public:
    explicit StateBuilder(int n_qubits);
    explicit StateBuilder(const StateVector& from);

    std::vector<Complex>& amplitudes() noexcept { return amps_; }
    StateVector build(bool normalized = false) &&;

private:
    int n_qubits_;
    std::vector<Complex> amps_;
};

/// Shared layout of UnitaryOp and Projector: a 2^k x 2^k matrix on k targets.
class LocalOperator {
public:
    LocalOperator(Matrix matrix, std::vector<int> targets);

    int arity() const noexcept { return static_cast<int>(targets_.size()); }
    const Matrix& matrix() const noexcept { return matrix_; }
    const std::vector<int>& targets() const noexcept { return targets_; }

    /// Throws TargetOutOfRange unless every target is < n_qubits.
    void check_targets(int n_qubits) const;

protected:
    Matrix matrix_;
    std::vector<int> targets_;
};

class UnitaryOp : public LocalOperator {
public:
    /// Validates U^dagger U = I elementwise within kValidationTol.
    UnitaryOp(Matrix matrix, std::vector<int> targets);

    UnitaryOp adjoint() const;
};

class Projector : public LocalOperator {
public:
    /// Validates P^2 = P and P = P^dagger within kValidationTol.
    Projector(Matrix matrix, std::vector<int> targets);

    /// |s><s| for a normalized local state on the given targets.
    static Projector onto(const StateVector& local, std::vector<int> targets);
    /// |k><k| in the computational basis of the targets.
    static Projector basis(std::vector<int> targets, std::uint64_t local_index);
    static Projector identity(std::vector<int> targets);

    Projector complement() const;
};

class ProjectiveFamily {
public:
    /// Members must share targets, be pairwise orthogonal and sum to identity.
    ProjectiveFamily(std::vector<Projector> members, std::vector<std::string> labels);

    /// {|0><0|, |1><1|, ...} labelled by the binary index string.
    static ProjectiveFamily computational(std::vector<int> targets);
    /// {P, I - P} with the two given labels.
    static ProjectiveFamily binary(const Projector& p, std::string label, std::string complement_label);

    std::size_t size() const noexcept { return members_.size(); }
    const std::vector<Projector>& members() const noexcept { return members_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::vector<int>& targets() const noexcept { return members_.front().targets(); }

private:
    std::vector<Projector> members_;
    std::vector<std::string> labels_;
};

StateVector tensor(const StateVector& a, const StateVector& b);

/// <a|b>, conjugate-linear in a.
Complex inner(const StateVector& a, const StateVector& b);

StateVector apply_unitary(const UnitaryOp& u, const StateVector& psi);

/// Unnormalized projection; the result never carries the normalized flag.
StateVector apply_projector(const Projector& p, const StateVector& psi);

/// Applies an arbitrary local matrix without validation. Internal kernel,
/// exposed for operators built on the fly (adjoints, embeddings). The caller
/// vouches for `keep_normalized`.
StateVector apply_local(const Matrix& m, std::span<const int> targets, const StateVector& psi,
                        bool keep_normalized = false);

/// Rewrites an operator on `targets` as one on `onto`, which must contain every
/// entry of `targets`; identity on the extra qubits.
Matrix embed(const Matrix& m, std::span<const int> targets, std::span<const int> onto);

}  // namespace tbsim
