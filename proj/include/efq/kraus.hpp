#pragma once

#include <string>
#include <vector>

#include "efq/interferometer.hpp"

namespace efq {

// Small dense complex matrix for the labeled occupation-mode spaces.
class CMat {
  public:
    CMat() = default;
    explicit CMat(int n) : n_(n), a_(static_cast<std::size_t>(n) * n) {}
    static CMat identity(int n);

    int dim() const { return n_; }
    cplx& at(int r, int c) { return a_[static_cast<std::size_t>(r) * n_ + c]; }
    const cplx& at(int r, int c) const { return a_[static_cast<std::size_t>(r) * n_ + c]; }

    CMat operator*(const CMat& rhs) const;
    CMat operator+(const CMat& rhs) const;
    CMat operator-(const CMat& rhs) const;
    CMat dagger() const;
    CMat scaled(const cplx& s) const;
    cplx trace() const;
    double frob2() const;  // squared Frobenius norm
    double max_abs_diff(const CMat& rhs) const;

  private:
    int n_ = 0;
    std::vector<cplx> a_;
};

// Eigenvalue bounds (min, max) of a Hermitian matrix, via a Jacobi sweep on
// its real symmetric embedding.
std::pair<double, double> hermitian_eig_bounds(const CMat& h);

// Quantum channel as a finite Kraus set over a labeled mode-occupation basis.
// Sets may be trace-decreasing; sum X^dagger X <= I is checked on demand.
struct KrausChannel {
    std::vector<std::string> basis;
    std::vector<CMat> ops;

    int dim() const { return static_cast<int>(basis.size()); }
    CMat op_sum() const;  // sum over X^dagger X
    void check_contractive(double tol = 1e-10) const;
    // max eigenvalue deviation of op_sum() from the identity
    double completeness_defect() const;
};

struct DensityOp {
    std::vector<std::string> basis;
    CMat mat;

    static DensityOp pure(std::vector<std::string> basis, std::span<const cplx> amps);
    // Hermiticity, trace <= 1, and positive semidefiniteness (to the floor).
    void check(double herm_tol = 1e-12, double psd_floor = 1e-10) const;
};

DensityOp apply(const KrausChannel& ch, const DensityOp& rho);

// Kraus set {X_i Y_j} of the composition x after y. Numerically null products
// (norm < 1e-14) are pruned; the total pruned mass must stay below 1e-12.
KrausChannel compose(const KrausChannel& x, const KrausChannel& y);
KrausChannel power(const KrausChannel& x, int n);

// Bob's displayed action on his channel mode b, basis {|0_b>, |1_b>}.
KrausChannel bob_block_channel();  // absorb: {|0><1|, |0><0|}
KrausChannel bob_pass_channel();   // occupation dephasing: {|1><1|, |0><0|}
KrausChannel identity_channel(std::vector<std::string> basis);

// One inner cycle on the joint (a1, b) occupation space restricted to at most
// one photon, basis {|0_a1 0_b>, |1_a1 0_b>, |0_a1 1_b>}: the plate coupling
// rotates a1 toward b by pi/N, then Bob either absorbs the b component or
// leaves the passage coherent (not blocking performs no operation, so the
// joint evolution stays unitary).
KrausChannel inner_cycle_channel(int inner_cycles, bool blocked);

struct InnerChannels {
    KrausChannel blocked;  // channel on a1 when Bob blocks every cycle
    KrausChannel passed;   // channel on a1 when Bob never blocks
};

// N-fold inner composition with a vacuum ancilla on b, traced out at the end.
// The construction self-checks against the closed forms: the blocked channel's
// no-click op carries entries 1 (vacuum) and cos(pi/2N)^N (retention) and the
// set contains the last-cycle absorption cos(pi/2N)^{N-1} sin(pi/2N) |0><1|;
// the passed channel is exactly {|0><1|, |0><0|}.
InnerChannels build_inner_channels(int inner_cycles);

struct OuterChannels {
    KrausChannel blocked;
    KrausChannel passed;
};

// M-fold outer composition on the (a2, a1) occupation space, basis
// {|0_a2 0_a1>, |1_a2 0_a1>, |0_a2 1_a1>}, coupling a2 toward a1 by pi/M per
// cycle with the inner channel acting on a1.
OuterChannels build_outer_channels(int outer_cycles, int inner_cycles);

// Magnitudes of the blocked outer channel's no-click block T:
// c1 = |T_HH| (H retention), c2 = |T_HV| (V->H transfer),
// c3 = |T_VH| (H->V transfer), c4 = |T_VV| (V retention).
struct OuterCoefficients {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
};

OuterCoefficients outer_coefficients(int outer_cycles, int inner_cycles);

// Density-matrix evolution of one outer run derived from the pure-state step
// simulator with ledger-traced loss, over the same (vacuum, H, V) basis.
CMat simulator_channel_action(const CycleConfig& cfg, Policy policy, const CMat& rho);

struct ChannelVerification {
    bool ok = false;
    double max_inner_closed_form_dev = 0.0;  // blocked + passed inner sets vs closed forms
    double max_simulator_dev = 0.0;          // outer channels vs step simulator, basis inputs
    double max_completeness_defect = 0.0;    // trace preservation of the constructions
    OuterCoefficients coefficients;
};

// Cross-checks the constructed channels at the given geometry (tolerance 1e-10).
ChannelVerification verify_channels(int outer_cycles, int inner_cycles);

}  // namespace efq
