#include "tbsim/random.hpp"

#include <cmath>
#include <numbers>

namespace tbsim {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept
{
    // splitmix64 finalizer over a golden-ratio stride, applied twice so that
    // neighbouring (master, index) pairs land far apart.
    auto mix = [](std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(master + 0x9e3779b97f4a7c15ULL) + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double standard_normal(Rng& rng)
{
    double u1 = uniform01(rng);
    while (u1 <= 0.0) {
        u1 = uniform01(rng);
    }
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

StateVector random_state(int n_qubits, Rng& rng)
{
    StateBuilder b(n_qubits);
    for (auto& a : b.amplitudes()) {
        const double re = standard_normal(rng);
        const double im = standard_normal(rng);
        a = Complex(re, im);
    }
    return std::move(b).build(false).normalized();
}

UnitaryOp random_unitary(std::vector<int> targets, Rng& rng)
{
    const Eigen::Index dim = Eigen::Index{1} << targets.size();
    Matrix z(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) {
            const double re = standard_normal(rng);
            const double im = standard_normal(rng);
            z(r, c) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < dim; ++k) {
        const Complex d = r(k, k);
        const double mag = std::abs(d);
        q.col(k) *= (mag > 0.0) ? d / mag : Complex(1.0);
    }
    return UnitaryOp(std::move(q), std::move(targets));
}

}  // namespace tbsim
