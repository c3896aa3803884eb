#pragma once

// Independent reference implementations used only by the tests. None of them
// call the kernels they check: operators become full matrices built entry by
// entry, and amplitudes are summed path by path.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tbsim/hilbert.hpp"
#include "tbsim/macro_rules.hpp"

namespace oracle {

using Complex = std::complex<double>;
using Dense = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Operator on `targets` lifted to n qubits, entry by entry.
inline Dense full_matrix(const Dense& local, const std::vector<int>& targets, int n)
{
    const Eigen::Index dim = Eigen::Index{1} << n;
    std::uint64_t mask = 0;
    for (int t : targets) {
        mask |= std::uint64_t{1} << t;
    }
    auto li = [&](std::uint64_t i) {
        Eigen::Index l = 0;
        for (std::size_t k = 0; k < targets.size(); ++k) {
            l |= static_cast<Eigen::Index>((i >> targets[k]) & 1u) << k;
        }
        return l;
    };
    Dense m = Dense::Zero(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            const auto ur = static_cast<std::uint64_t>(r);
            const auto uc = static_cast<std::uint64_t>(c);
            if ((ur & ~mask) == (uc & ~mask)) {
                m(r, c) = local(li(ur), li(uc));
            }
        }
    }
    return m;
}

inline Vec vec(const tbsim::StateVector& s)
{
    Vec v(static_cast<Eigen::Index>(s.dim()));
    for (std::size_t i = 0; i < s.dim(); ++i) {
        v(static_cast<Eigen::Index>(i)) = s[i];
    }
    return v;
}

/// <a| M |b> as an explicit double sum over basis indices.
inline Complex sandwich(const Vec& a, const Dense& m, const Vec& b)
{
    Complex s = 0.0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            s += std::conj(a(r)) * m(r, c) * b(c);
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Antenna model, rebuilt from the physical description.

namespace antenna {

constexpr int kDim = 16;

inline int idx(int a1, int a2, int p, int c) { return a1 | (a2 << 1) | (p << 2) | (c << 3); }

/// Permutation swapping bits q1 and q2.
inline Dense bit_swap(int q1, int q2)
{
    Dense u = Dense::Zero(kDim, kDim);
    for (int b = 0; b < kDim; ++b) {
        const int x1 = (b >> q1) & 1;
        const int x2 = (b >> q2) & 1;
        const int c = (b & ~(1 << q1) & ~(1 << q2)) | (x2 << q1) | (x1 << q2);
        u(c, b) = 1.0;
    }
    return u;
}

/// Field of antenna 1 (bit 2) -> (P + C)/sqrt2, field of antenna 2 (bit 3)
/// -> (P - C)/sqrt2, on the full register.
inline Dense mirror()
{
    const double s = 1.0 / std::sqrt(2.0);
    Dense u = Dense::Zero(kDim, kDim);
    for (int b = 0; b < kDim; ++b) {
        const int p = (b >> 2) & 1;
        const int c = (b >> 3) & 1;
        const int rest = b & 3;
        if (p == c) {
            u(b, b) = 1.0;
        } else if (p == 1) {
            u(rest | 4, b) += s;
            u(rest | 8, b) += s;
        } else {
            u(rest | 4, b) += s;
            u(rest | 8, b) -= s;
        }
    }
    return u;
}

struct Point {
    double p_unconditioned;
    double p_conditioned;
    double ratio;
};

/// Probabilities from explicit path sums over every basis-state sequence
/// b0 -> b1 -> b2: emit-projection on b0, emission to b1, dark-projection on
/// b1, absorption to b2.
inline Point evaluate(double e1, double e2, double phi)
{
    const Complex x1[2] = {std::sqrt(1 - e1 * e1), e1};
    const Complex x2[2] = {std::sqrt(1 - e2 * e2), std::polar(e2, phi)};
    const Complex y1[2] = {std::sqrt(1 - e2 * e2), -e2};
    const Complex y2[2] = {std::sqrt(1 - e1 * e1), e1};
    Vec init = Vec::Zero(kDim);
    Vec fin = Vec::Zero(kDim);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            init(idx(a, b, 0, 0)) = x1[a] * x2[b];
            fin(idx(a, b, 0, 0)) = y1[a] * y2[b];
        }
    }
    const Dense ue = mirror() * bit_swap(1, 3) * bit_swap(0, 2);
    const Dense ua = bit_swap(2, 1) * bit_swap(3, 0) * mirror().adjoint();
    Dense emit = Dense::Zero(kDim, kDim);
    Dense dark = Dense::Zero(kDim, kDim);
    for (int b = 0; b < kDim; ++b) {
        emit(b, b) = (b & 1) ? 1.0 : 0.0;
        dark(b, b) = ((b >> 2) & 1) ? 0.0 : 1.0;
    }
    const Dense id = Dense::Identity(kDim, kDim);
    const Dense idle = id - emit;

    // <f| Ua . D . Ue . E |i>, one basis path at a time.
    auto path_sum = [&](const Dense& e, const Dense& d) {
        Complex total = 0.0;
        for (int b0 = 0; b0 < kDim; ++b0) {
            if (init(b0) == 0.0 || e(b0, b0) == 0.0) {
                continue;
            }
            for (int b1 = 0; b1 < kDim; ++b1) {
                if (ue(b1, b0) == 0.0 || d(b1, b1) == 0.0) {
                    continue;
                }
                for (int b2 = 0; b2 < kDim; ++b2) {
                    total += std::conj(fin(b2)) * ua(b2, b1) * d(b1, b1) * ue(b1, b0) * e(b0, b0) * init(b0);
                }
            }
        }
        return total;
    };
    const double emit_any = std::norm(path_sum(emit, id));
    const double idle_any = std::norm(path_sum(idle, id));
    const double emit_dark = std::norm(path_sum(emit, dark));
    const double idle_dark = std::norm(path_sum(idle, dark));
    Point pt{};
    pt.p_unconditioned = emit_any / (emit_any + idle_any);
    pt.p_conditioned = emit_dark / (emit_dark + idle_dark);
    pt.ratio = pt.p_conditioned / pt.p_unconditioned;
    return pt;
}

}  // namespace antenna

// ---------------------------------------------------------------------------
// Mode networks replayed as qubit gates on the single-excitation register.

/// out[i] = sum_j local(l(i), l(j)) psi[j] over j that agree with i off the
/// targets.
inline Vec apply_gate(const Vec& psi, const Dense& local, const std::vector<int>& targets)
{
    std::uint64_t mask = 0;
    for (int t : targets) {
        mask |= std::uint64_t{1} << t;
    }
    auto li = [&](std::uint64_t i) {
        Eigen::Index l = 0;
        for (std::size_t k = 0; k < targets.size(); ++k) {
            l |= static_cast<Eigen::Index>((i >> targets[k]) & 1u) << k;
        }
        return l;
    };
    auto spread = [&](std::uint64_t base, Eigen::Index l) {
        std::uint64_t i = base & ~mask;
        for (std::size_t k = 0; k < targets.size(); ++k) {
            i |= static_cast<std::uint64_t>((l >> k) & 1) << targets[k];
        }
        return i;
    };
    Vec out = Vec::Zero(psi.size());
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        const auto ui = static_cast<std::uint64_t>(i);
        for (Eigen::Index l = 0; l < local.cols(); ++l) {
            out(i) += local(li(ui), l) * psi(static_cast<Eigen::Index>(spread(ui, l)));
        }
    }
    return out;
}

inline Dense excitation_gate(const Dense& u2)
{
    // Two modes (a, b) as qubits with local index bit(a) + 2 bit(b).
    Dense g = Dense::Zero(4, 4);
    g(0, 0) = 1.0;
    g(3, 3) = 1.0;
    g(1, 1) = u2(0, 0);
    g(2, 1) = u2(1, 0);
    g(1, 2) = u2(0, 1);
    g(2, 2) = u2(1, 1);
    return g;
}

/// Output mode probabilities of `net` computed on the 2^n register.
inline std::vector<double> network_on_register(const tbsim::ModeNetwork& net, const std::vector<Complex>& input)
{
    const int n = net.n_modes();
    Vec psi = Vec::Zero(Eigen::Index{1} << n);
    for (int m = 0; m < n; ++m) {
        psi(Eigen::Index{1} << m) = input[static_cast<std::size_t>(m)];
    }
    for (const auto& e : net.elements()) {
        Dense two(2, 2);
        std::vector<int> modes;
        if (const auto* bs = std::get_if<tbsim::BeamSplitter>(&e)) {
            two << std::cos(bs->angle), -std::sin(bs->angle), std::sin(bs->angle), std::cos(bs->angle);
            modes = {bs->a, bs->b};
        } else if (const auto* ph = std::get_if<tbsim::PhaseShift>(&e)) {
            Dense one(2, 2);
            one << 1.0, 0.0, 0.0, std::polar(1.0, ph->phi);
            psi = apply_gate(psi, one, {ph->mode});
            continue;
        } else if (const auto* bl = std::get_if<tbsim::Block>(&e)) {
            two << 0.0, 1.0, 1.0, 0.0;
            modes = {bl->mode, bl->sink};
        } else {
            const auto& c = std::get<tbsim::CustomElement>(e);
            two = c.u;
            modes = c.modes;
        }
        psi = apply_gate(psi, excitation_gate(two), modes);
    }
    std::vector<double> p(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        p[static_cast<std::size_t>(m)] = std::norm(psi(Eigen::Index{1} << m));
    }
    return p;
}

// ---------------------------------------------------------------------------
// Second Born sampler: two matched components of a Haar vector are i.i.d.
// complex Gaussians before normalization, and the comparison is scale-free.

inline double born_frequency_reference(double theta, std::uint64_t n, std::uint64_t seed)
{
    std::mt19937 gen(static_cast<std::uint32_t>(seed));
    std::normal_distribution<double> g;
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    std::uint64_t up = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double xu = g(gen), yu = g(gen), xd = g(gen), yd = g(gen);
        if (c * c * (xu * xu + yu * yu) >= s * s * (xd * xd + yd * yd)) {
            ++up;
        }
    }
    return static_cast<double>(up) / static_cast<double>(n);
}

}  // namespace oracle
