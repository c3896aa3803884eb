#include "tbsim/gates.hpp"

#include <algorithm>
#include <cmath>

namespace tbsim::gates {

namespace {

Matrix m2(Complex a, Complex b, Complex c, Complex d)
{
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

UnitaryOp identity(std::vector<int> targets)
{
    const Eigen::Index dim = Eigen::Index{1} << targets.size();
    return UnitaryOp(Matrix::Identity(dim, dim), std::move(targets));
}

UnitaryOp hadamard(int q)
{
    const double s = 1.0 / std::sqrt(2.0);
    return UnitaryOp(m2(s, s, s, -s), {q});
}

UnitaryOp pauli_x(int q) { return UnitaryOp(m2(0, 1, 1, 0), {q}); }

UnitaryOp pauli_z(int q) { return UnitaryOp(m2(1, 0, 0, -1), {q}); }

UnitaryOp phase(int q, double phi) { return UnitaryOp(m2(1, 0, 0, std::polar(1.0, phi)), {q}); }

UnitaryOp rx(int q, double theta)
{
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    return UnitaryOp(m2(c, Complex(0, -s), Complex(0, -s), c), {q});
}

UnitaryOp ry(int q, double theta)
{
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    return UnitaryOp(m2(c, -s, s, c), {q});
}

UnitaryOp rz(int q, double theta)
{
    return UnitaryOp(m2(std::polar(1.0, -theta / 2), 0, 0, std::polar(1.0, theta / 2)), {q});
}

UnitaryOp cnot(int control, int target)
{
    // Local index = bit(control) + 2*bit(target).
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 1;
    m(3, 1) = 1;
    m(2, 2) = 1;
    m(1, 3) = 1;
    return UnitaryOp(std::move(m), {control, target});
}

UnitaryOp swap(int a, int b)
{
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 1;
    m(2, 1) = 1;
    m(1, 2) = 1;
    m(3, 3) = 1;
    return UnitaryOp(std::move(m), {a, b});
}

UnitaryOp compose(const UnitaryOp& a, const UnitaryOp& b)
{
    std::vector<int> all = a.targets();
    for (int t : b.targets()) {
        if (std::find(all.begin(), all.end(), t) == all.end()) {
            all.push_back(t);
        }
    }
    Matrix ma = embed(a.matrix(), a.targets(), all);
    Matrix mb = embed(b.matrix(), b.targets(), all);
    return UnitaryOp(ma * mb, std::move(all));
}

}  // namespace tbsim::gates
