#pragma once

#include <array>
#include <complex>

namespace efq {

using cplx = std::complex<double>;

// Default absolute tolerance for amplitude-level comparisons.
inline constexpr double kTol = 1e-12;

// 2x2 complex operator over the fixed (H, V) polarisation basis.
struct Op2 {
    // Row-major entries; (r, c) = m[2*r + c].
    std::array<cplx, 4> m{};

    static Op2 identity();
    static Op2 zero();

    cplx& at(int r, int c) { return m[static_cast<std::size_t>(2 * r + c)]; }
    const cplx& at(int r, int c) const { return m[static_cast<std::size_t>(2 * r + c)]; }

    Op2 operator*(const Op2& rhs) const;
    Op2 operator+(const Op2& rhs) const;
    Op2 operator-(const Op2& rhs) const;
    Op2 dagger() const;
    cplx det() const;
    cplx trace() const;
    double frobenius_norm() const;
    bool is_unitary(double tol = 1e-10) const;
};

Op2 operator*(const cplx& s, const Op2& op);

// Bloch rotations, half-angle convention R_a(theta) = exp(-i theta sigma_a / 2),
// poles |H> and |V>. Throws std::invalid_argument for a non-finite angle; the
// constructed matrix is verified unitary to 1e-12.
Op2 rx(double theta);
Op2 ry(double theta);
Op2 rz(double theta);

// Quarter wave plate aligned at -pi/4, and its adjoint: rx(-pi/2) and rx(pi/2).
Op2 qwp();
Op2 qwp_dagger();

// min over real phi of ||u - e^{i phi} v||_F; zero iff u and v are equal up to
// global phase.
double dist_up_to_global_phase(const Op2& u, const Op2& v);

// Single-photon polarisation state. amp_h/amp_v are the (H, V) amplitudes.
// tag_h/tag_v are the sub-amplitudes that have ever occupied the channel mode
// on Bob's side; they evolve under the same linear optics as the full
// amplitudes, so the tagged weight can be read off any surviving state.
struct PolState {
    cplx amp_h{};
    cplx amp_v{};
    cplx tag_h{};
    cplx tag_v{};

    static PolState h_photon() { return {1.0, 0.0, 0.0, 0.0}; }
    static PolState v_photon() { return {0.0, 1.0, 0.0, 0.0}; }

    double norm2() const;
    double tag_norm2() const;
    PolState normalized() const;     // unit norm, phase preserved
    PolState canonicalized() const;  // first nonzero amplitude rotated real >= 0
    void check() const;              // norm <= 1 and tag-subset invariants
};

PolState apply(const Op2& op, const PolState& s);
double dist_up_to_global_phase(const PolState& a, const PolState& b);

}  // namespace efq
