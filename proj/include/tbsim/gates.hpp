#pragma once

#include <vector>

#include "tbsim/hilbert.hpp"

namespace tbsim::gates {

UnitaryOp identity(std::vector<int> targets);
UnitaryOp hadamard(int q);
UnitaryOp pauli_x(int q);
UnitaryOp pauli_z(int q);
/// diag(1, e^{i phi})
UnitaryOp phase(int q, double phi);
UnitaryOp rx(int q, double theta);
/// [[cos t/2, -sin t/2], [sin t/2, cos t/2]]
UnitaryOp ry(int q, double theta);
UnitaryOp rz(int q, double theta);
UnitaryOp cnot(int control, int target);
UnitaryOp swap(int a, int b);

/// Product a*b of two operators (b acts first) on the union of their targets,
/// ordered as a's targets followed by b's extras.
UnitaryOp compose(const UnitaryOp& a, const UnitaryOp& b);

}  // namespace tbsim::gates
