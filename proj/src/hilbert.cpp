#include "tbsim/hilbert.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "tbsim/error.hpp"
#include "tbsim/parallel.hpp"

namespace tbsim {

namespace {

std::atomic<int> g_max_qubits{kDefaultMaxQubits};

void check_capacity(int n)
{
    if (n < 0) {
        fail(ErrorKind::InvalidArgument, "negative qubit count");
    }
    if (n > max_qubits()) {
        fail(ErrorKind::Capacity, std::to_string(n) + " qubits exceeds the configured maximum of "
                                      + std::to_string(max_qubits()));
    }
}

int log2_exact(std::size_t dim)
{
    if (dim == 0 || (dim & (dim - 1)) != 0) {
        fail(ErrorKind::DimensionMismatch, "length " + std::to_string(dim) + " is not a power of two");
    }
    int n = 0;
    while ((std::size_t{1} << n) < dim) {
        ++n;
    }
    return n;
}

void check_distinct(const std::vector<int>& targets)
{
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] < 0) {
            fail(ErrorKind::TargetOutOfRange, "negative target index");
        }
        for (std::size_t j = i + 1; j < targets.size(); ++j) {
            if (targets[i] == targets[j]) {
                fail(ErrorKind::InvalidArgument, "duplicate target " + std::to_string(targets[i]));
            }
        }
    }
}

double max_abs_diff(const Matrix& a, const Matrix& b)
{
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

void set_max_qubits(int n)
{
    if (n < 1 || n > 62) {
        fail(ErrorKind::InvalidArgument, "max qubits must lie in [1, 62]");
    }
    g_max_qubits.store(n);
}

int max_qubits() { return g_max_qubits.load(); }

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits)
{
    check_capacity(n_qubits);
    amps_.assign(std::size_t{1} << n_qubits, Complex{});
    amps_[0] = 1.0;
    normalized_ = true;
}

StateVector::StateVector(int n_qubits, std::vector<Complex> amps, bool normalized)
    : n_qubits_(n_qubits), amps_(std::move(amps)), normalized_(normalized)
{
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index)
{
    StateVector s(n_qubits);
    if (index >= s.dim()) {
        fail(ErrorKind::InvalidArgument, "basis index out of range");
    }
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amps, bool normalized)
{
    int n = log2_exact(amps.size());
    check_capacity(n);
    StateVector s(n, std::move(amps), false);
    if (normalized) {
        if (std::abs(s.norm_squared() - 1.0) > kValidationTol) {
            fail(ErrorKind::InvalidArgument, "vector flagged normalized has norm^2 "
                                                 + std::to_string(s.norm_squared()));
        }
        s.normalized_ = true;
    }
    return s;
}

double StateVector::norm_squared() const
{
    double acc = 0.0;
    for (const auto& a : amps_) {
        acc += std::norm(a);
    }
    return acc;
}

double StateVector::norm() const { return std::sqrt(norm_squared()); }

StateVector StateVector::normalized() const
{
    double n = norm();
    if (n == 0.0) {
        fail(ErrorKind::NullProjection, "cannot normalize the zero vector");
    }
    std::vector<Complex> out(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        out[i] = amps_[i] / n;
    }
    return StateVector(n_qubits_, std::move(out), true);
}

StateVector StateVector::scaled(Complex factor) const
{
    std::vector<Complex> out(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        out[i] = amps_[i] * factor;
    }
    bool keeps_norm = normalized_ && std::abs(std::abs(factor) - 1.0) <= 1e-15;
    return StateVector(n_qubits_, std::move(out), keeps_norm);
}

StateBuilder::StateBuilder(int n_qubits) : n_qubits_(n_qubits)
{
    check_capacity(n_qubits);
    amps_.assign(std::size_t{1} << n_qubits, Complex{});
}

StateBuilder::StateBuilder(const StateVector& from)
    : n_qubits_(from.n_qubits()), amps_(from.amplitudes().begin(), from.amplitudes().end())
{
}

StateVector StateBuilder::build(bool normalized) &&
{
    return StateVector(n_qubits_, std::move(amps_), normalized);
}

// ---------------------------------------------------------------------------
// Operators

LocalOperator::LocalOperator(Matrix matrix, std::vector<int> targets)
    : matrix_(std::move(matrix)), targets_(std::move(targets))
{
    if (targets_.empty()) {
        fail(ErrorKind::InvalidArgument, "operator needs at least one target");
    }
    check_distinct(targets_);
    const Eigen::Index dim = Eigen::Index{1} << targets_.size();
    if (matrix_.rows() != dim || matrix_.cols() != dim) {
        fail(ErrorKind::DimensionMismatch, "matrix is " + std::to_string(matrix_.rows()) + "x"
                                               + std::to_string(matrix_.cols()) + " for "
                                               + std::to_string(targets_.size()) + " targets");
    }
}

void LocalOperator::check_targets(int n_qubits) const
{
    for (int t : targets_) {
        if (t >= n_qubits) {
            fail(ErrorKind::TargetOutOfRange,
                 "target " + std::to_string(t) + " on a " + std::to_string(n_qubits) + "-qubit state");
        }
    }
}

UnitaryOp::UnitaryOp(Matrix matrix, std::vector<int> targets)
    : LocalOperator(std::move(matrix), std::move(targets))
{
    const Matrix id = Matrix::Identity(matrix_.rows(), matrix_.cols());
    if (max_abs_diff(matrix_.adjoint() * matrix_, id) > kValidationTol) {
        fail(ErrorKind::NotUnitary, "U^dagger U deviates from identity");
    }
}

UnitaryOp UnitaryOp::adjoint() const { return UnitaryOp(matrix_.adjoint(), targets_); }

Projector::Projector(Matrix matrix, std::vector<int> targets)
    : LocalOperator(std::move(matrix), std::move(targets))
{
    if (max_abs_diff(matrix_, matrix_.adjoint()) > kValidationTol) {
        fail(ErrorKind::NotProjector, "P is not Hermitian");
    }
    if (max_abs_diff(matrix_ * matrix_, matrix_) > kValidationTol) {
        fail(ErrorKind::NotProjector, "P^2 differs from P");
    }
}

Projector Projector::onto(const StateVector& local, std::vector<int> targets)
{
    if (local.n_qubits() != static_cast<int>(targets.size())) {
        fail(ErrorKind::DimensionMismatch, "local state size does not match target count");
    }
    Eigen::VectorXcd v(static_cast<Eigen::Index>(local.dim()));
    for (std::size_t i = 0; i < local.dim(); ++i) {
        v[static_cast<Eigen::Index>(i)] = local[i];
    }
    return Projector(v * v.adjoint(), std::move(targets));
}

Projector Projector::basis(std::vector<int> targets, std::uint64_t local_index)
{
    const Eigen::Index dim = Eigen::Index{1} << targets.size();
    if (static_cast<Eigen::Index>(local_index) >= dim) {
        fail(ErrorKind::InvalidArgument, "basis index out of range");
    }
    Matrix m = Matrix::Zero(dim, dim);
    m(static_cast<Eigen::Index>(local_index), static_cast<Eigen::Index>(local_index)) = 1.0;
    return Projector(std::move(m), std::move(targets));
}

Projector Projector::identity(std::vector<int> targets)
{
    const Eigen::Index dim = Eigen::Index{1} << targets.size();
    return Projector(Matrix::Identity(dim, dim), std::move(targets));
}

Projector Projector::complement() const
{
    return Projector(Matrix::Identity(matrix_.rows(), matrix_.cols()) - matrix_, targets_);
}

ProjectiveFamily::ProjectiveFamily(std::vector<Projector> members, std::vector<std::string> labels)
    : members_(std::move(members)), labels_(std::move(labels))
{
    if (members_.empty()) {
        fail(ErrorKind::InvalidFamily, "empty family");
    }
    if (labels_.size() != members_.size()) {
        fail(ErrorKind::InvalidFamily, "label count differs from member count");
    }
    const auto& targets = members_.front().targets();
    const Matrix& first = members_.front().matrix();
    Matrix sum = Matrix::Zero(first.rows(), first.cols());
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (members_[i].targets() != targets) {
            fail(ErrorKind::InvalidFamily, "members act on different targets");
        }
        sum += members_[i].matrix();
        for (std::size_t j = i + 1; j < members_.size(); ++j) {
            if ((members_[i].matrix() * members_[j].matrix()).cwiseAbs().maxCoeff() > kValidationTol) {
                fail(ErrorKind::InvalidFamily, "members " + labels_[i] + " and " + labels_[j]
                                                   + " are not orthogonal");
            }
        }
    }
    if (max_abs_diff(sum, Matrix::Identity(sum.rows(), sum.cols())) > kValidationTol) {
        fail(ErrorKind::InvalidFamily, "members do not sum to identity");
    }
}

ProjectiveFamily ProjectiveFamily::computational(std::vector<int> targets)
{
    const std::uint64_t dim = std::uint64_t{1} << targets.size();
    std::vector<Projector> members;
    std::vector<std::string> labels;
    for (std::uint64_t k = 0; k < dim; ++k) {
        members.push_back(Projector::basis(targets, k));
        std::string label;
        for (std::size_t j = 0; j < targets.size(); ++j) {
            label.push_back(((k >> j) & 1u) ? '1' : '0');
        }
        labels.push_back(std::move(label));
    }
    return ProjectiveFamily(std::move(members), std::move(labels));
}

ProjectiveFamily ProjectiveFamily::binary(const Projector& p, std::string label, std::string complement_label)
{
    return ProjectiveFamily({p, p.complement()}, {std::move(label), std::move(complement_label)});
}

// ---------------------------------------------------------------------------
// Algebra

StateVector tensor(const StateVector& a, const StateVector& b)
{
    const int n = a.n_qubits() + b.n_qubits();
    check_capacity(n);
    StateBuilder out(n);
    auto& amps = out.amplitudes();
    const std::size_t da = a.dim();
    for (std::size_t j = 0; j < b.dim(); ++j) {
        for (std::size_t i = 0; i < da; ++i) {
            amps[j * da + i] = a[i] * b[j];
        }
    }
    return std::move(out).build(a.is_normalized() && b.is_normalized());
}

Complex inner(const StateVector& a, const StateVector& b)
{
    if (a.n_qubits() != b.n_qubits()) {
        fail(ErrorKind::DimensionMismatch, "inner product of " + std::to_string(a.n_qubits()) + " and "
                                               + std::to_string(b.n_qubits()) + " qubit states");
    }
    double re = 0.0;
    double im = 0.0;
    auto x = a.amplitudes();
    auto y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        // conj(x) * y
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {re, im};
}

StateVector apply_local(const Matrix& m, std::span<const int> targets, const StateVector& psi,
                        bool keep_normalized)
{
    const int n = psi.n_qubits();
    const std::size_t k = targets.size();
    for (int t : targets) {
        if (t < 0 || t >= n) {
            fail(ErrorKind::TargetOutOfRange,
                 "target " + std::to_string(t) + " on a " + std::to_string(n) + "-qubit state");
        }
    }
    const std::size_t local_dim = std::size_t{1} << k;
    if (static_cast<std::size_t>(m.rows()) != local_dim || static_cast<std::size_t>(m.cols()) != local_dim) {
        fail(ErrorKind::DimensionMismatch, "operator size does not match target count");
    }

    std::vector<std::size_t> offsets(local_dim, 0);
    for (std::size_t l = 0; l < local_dim; ++l) {
        for (std::size_t j = 0; j < k; ++j) {
            if ((l >> j) & 1u) {
                offsets[l] |= std::size_t{1} << targets[j];
            }
        }
    }
    std::vector<int> sorted(targets.begin(), targets.end());
    std::sort(sorted.begin(), sorted.end());

    // Row-major copy split into planes for a branch-free inner loop.
    std::vector<double> mre(local_dim * local_dim);
    std::vector<double> mim(local_dim * local_dim);
    for (std::size_t r = 0; r < local_dim; ++r) {
        for (std::size_t c = 0; c < local_dim; ++c) {
            const Complex v = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            mre[r * local_dim + c] = v.real();
            mim[r * local_dim + c] = v.imag();
        }
    }

    const std::size_t groups = psi.dim() >> k;
    auto in = psi.amplitudes();
    StateBuilder out(n);
    Complex* dst = out.amplitudes().data();

    parallel::for_chunks(
        groups,
        [&](std::size_t begin, std::size_t end) {
            std::vector<Complex> gathered(local_dim);
            for (std::size_t g = begin; g < end; ++g) {
                // Spread g over the non-target bit positions.
                std::size_t base = g;
                for (int t : sorted) {
                    const std::size_t low = base & ((std::size_t{1} << t) - 1);
                    base = ((base >> t) << (t + 1)) | low;
                }
                for (std::size_t l = 0; l < local_dim; ++l) {
                    gathered[l] = in[base + offsets[l]];
                }
                for (std::size_t r = 0; r < local_dim; ++r) {
                    double re = 0.0;
                    double im = 0.0;
                    const double* rr = &mre[r * local_dim];
                    const double* ri = &mim[r * local_dim];
                    for (std::size_t c = 0; c < local_dim; ++c) {
                        re += rr[c] * gathered[c].real() - ri[c] * gathered[c].imag();
                        im += rr[c] * gathered[c].imag() + ri[c] * gathered[c].real();
                    }
                    dst[base + offsets[r]] = Complex(re, im);
                }
            }
        },
        4096);

    return std::move(out).build(keep_normalized);
}

StateVector apply_unitary(const UnitaryOp& u, const StateVector& psi)
{
    u.check_targets(psi.n_qubits());
    return apply_local(u.matrix(), u.targets(), psi, psi.is_normalized());
}

StateVector apply_projector(const Projector& p, const StateVector& psi)
{
    p.check_targets(psi.n_qubits());
    return apply_local(p.matrix(), p.targets(), psi);
}

Matrix embed(const Matrix& m, std::span<const int> targets, std::span<const int> onto)
{
    std::vector<int> pos(targets.size());
    std::size_t covered = 0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
        auto it = std::find(onto.begin(), onto.end(), targets[j]);
        if (it == onto.end()) {
            fail(ErrorKind::DimensionMismatch, "target " + std::to_string(targets[j]) + " missing from embedding");
        }
        pos[j] = static_cast<int>(it - onto.begin());
        covered |= std::size_t{1} << pos[j];
    }
    const Eigen::Index dim = Eigen::Index{1} << onto.size();
    Matrix out = Matrix::Zero(dim, dim);
    auto local = [&](Eigen::Index x) {
        Eigen::Index l = 0;
        for (std::size_t j = 0; j < pos.size(); ++j) {
            l |= ((x >> pos[j]) & 1) << j;
        }
        return l;
    };
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            if ((static_cast<std::size_t>(r) & ~covered) != (static_cast<std::size_t>(c) & ~covered)) {
                continue;
            }
            out(r, c) = m(local(r), local(c));
        }
    }
    return out;
}

}  // namespace tbsim
