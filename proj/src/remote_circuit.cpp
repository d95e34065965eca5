#include "efq/remote_circuit.hpp"

#include <cmath>
#include <stdexcept>

namespace efq {

Op2 sqrt_unitary(const Op2& u) {
    if (!u.is_unitary(1e-10)) {
        throw std::invalid_argument("sqrt_unitary: matrix is not unitary");
    }
    const cplx tr = u.trace();
    const cplx dt = u.det();
    const cplx disc = std::sqrt(tr * tr - 4.0 * dt);
    const cplx l1 = 0.5 * (tr + disc);
    const cplx l2 = 0.5 * (tr - disc);
    if (std::abs(l1 - l2) < 1e-12) {
        // normal matrix with a repeated eigenvalue is a scalar multiple of I
        return std::sqrt(l1) * Op2::identity();
    }
    // Lagrange interpolation of the principal square root over the spectrum.
    const cplx s1 = std::sqrt(l1);
    const cplx s2 = std::sqrt(l2);
    const Op2 id = Op2::identity();
    const Op2 a = (1.0 / (l1 - l2)) * (u - l2 * id);
    const Op2 b = (1.0 / (l2 - l1)) * (u - l1 * id);
    return s1 * a + s2 * b;
}

PolState apply_network(const PolState& target, const ClassicalControls& controls, const Op2& u) {
    const Op2 v = sqrt_unitary(u);
    const Op2 vdag = v.dagger();
    PolState st = target;
    if (controls.b2) st = apply(v, st);
    const bool mid = controls.b1 != controls.b2;  // CNOT acting on the classical bits
    if (mid) st = apply(vdag, st);
    if (controls.b1) st = apply(v, st);
    return st;
}

TwoQubitState TwoQubitState::product(bool control, const PolState& target) {
    TwoQubitState s;
    const std::size_t base = control ? 2 : 0;
    s.amp[base] = target.amp_h;
    s.amp[base + 1] = target.amp_v;
    return s;
}

double TwoQubitState::norm2() const {
    double n = 0.0;
    for (const auto& z : amp) n += std::norm(z);
    return n;
}

void TwoQubitState::check() const {
    if (std::abs(norm2() - 1.0) > kTol) {
        throw std::logic_error("TwoQubitState: state is not normalized");
    }
}

PolState TwoQubitState::target_given_control(bool control) const {
    const std::size_t base = control ? 2 : 0;
    return {amp[base], amp[base + 1], 0.0, 0.0};
}

TwoQubitState apply_controlled(const Op2& u, const TwoQubitState& s) {
    TwoQubitState r = s;
    r.amp[2] = u.at(0, 0) * s.amp[2] + u.at(0, 1) * s.amp[3];
    r.amp[3] = u.at(1, 0) * s.amp[2] + u.at(1, 1) * s.amp[3];
    return r;
}

}  // namespace efq
