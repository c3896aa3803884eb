#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tbsim/hilbert.hpp"

namespace tbsim::verify {

enum class Level { Quick, Full };

/// Deliberate faults for checking that the suite catches them.
enum class Mutation { None, Deferral };

void set_mutation(Mutation m);
Mutation mutation();

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

std::vector<CheckResult> run_checks(Level level, std::ostream* progress = nullptr);

/// |amp(U1 P U2) - amp(U1 U2 P')| for seeded random instance `index` with at
/// most `max_qubits` qubits.
double deferral_error(std::uint64_t seed, std::uint64_t index, int max_qubits);

}  // namespace tbsim::verify
