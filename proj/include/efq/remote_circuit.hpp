#pragma once

#include "efq/gates.hpp"

namespace efq {

// Bob's classical gate selections standing in for the two control qubits.
struct ClassicalControls {
    bool b1 = false;
    bool b2 = false;
};

// Principal square root of a 2x2 unitary via its eigendecomposition; V*V = u.
// Throws std::invalid_argument for non-unitary input.
Op2 sqrt_unitary(const Op2& u);

// Controlled-controlled-U network (controlled-V, CNOT, controlled-V^dagger,
// CNOT, controlled-V with V^2 = U) evaluated with classical control bits
// substituted for the controls; the target evolves by U^(b1*b2).
PolState apply_network(const PolState& target, const ClassicalControls& controls, const Op2& u);

// Two-qubit helper used to cross-check the classical-control network against
// genuine controlled gates on product states.
struct TwoQubitState {
    // amplitudes over {|00>, |01>, |10>, |11>}, first qubit = control
    std::array<cplx, 4> amp{};

    static TwoQubitState product(bool control, const PolState& target);
    double norm2() const;
    void check() const;  // unit norm
    PolState target_given_control(bool control) const;
};

// Applies u to the target qubit conditioned on the control qubit.
TwoQubitState apply_controlled(const Op2& u, const TwoQubitState& s);

}  // namespace efq
