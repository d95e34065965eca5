#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "efq/protocol.hpp"
#include "oracles.hpp"

using namespace efq;
using std::numbers::pi;

namespace {

CycleConfig make_cycle(int m, int n) {
    CycleConfig cfg;
    cfg.outer_cycles = m;
    cfg.inner_cycles = n;
    return cfg;
}

// Columns of the map the protocol enacts; the simulation is linear and keeps
// phases relative to the input, so basis runs recover the matrix.
Op2 enacted_map(const BobProgram& prog, const CycleConfig& cycle) {
    const auto h = run_protocol(PolState::h_photon(), prog, cycle);
    const auto v = run_protocol(PolState::v_photon(), prog, cycle);
    Op2 u;
    u.at(0, 0) = h.out_state.amp_h;
    u.at(1, 0) = h.out_state.amp_v;
    u.at(0, 1) = v.out_state.amp_h;
    u.at(1, 1) = v.out_state.amp_v;
    return u;
}

const Op2 kHadamard = [] {
    Op2 h;
    const double r = std::numbers::sqrt2 / 2.0;
    h.m = {cplx(r), cplx(r), cplx(r), cplx(-r)};
    return h;
}();

}  // namespace

TEST_CASE("rz rotator: identity at k = 0") {
    const StagePair pair{make_cycle(5, 5), 12};
    const PolState in = {cplx(0.6, 0.0), cplx(0.0, 0.8), 0.0, 0.0};
    const auto out = rz_rotator(in, 0, pair);
    CHECK(dist_up_to_global_phase(out.state.normalized(), in) <= kTol);
    CHECK(out.stage.exit_bin == 0);
}

TEST_CASE("rz rotator: k = L/2 flips the relative sign") {
    const StagePair pair{make_cycle(6, 6), 10};
    const double r = std::numbers::sqrt2 / 2.0;
    const PolState in{cplx(r), cplx(r), 0.0, 0.0};
    const auto out = rz_rotator(in, 5, pair);
    const cplx ratio = (out.state.amp_v / out.state.amp_h) / (in.amp_v / in.amp_h);
    CHECK(std::abs(ratio - cplx(-1.0)) <= 1e-11);  // relative phase pi
}

TEST_CASE("rz rotator matches the rz matrix for random k and inputs") {
    std::mt19937 rng(7201);
    const StagePair pair{make_cycle(7, 9), 24};
    std::uniform_int_distribution<int> pick_k(0, 24);
    for (int i = 0; i < 20; ++i) {
        const int k = pick_k(rng);
        const PolState in = test::random_state(rng);
        const auto out = rz_rotator(in, k, pair);
        const PolState expect = apply(rz(2.0 * k * pi / 24.0), in);
        CHECK(dist_up_to_global_phase(out.state.normalized(), expect) <= kTol);
    }
}

TEST_CASE("ry rotator matches the ry matrix") {
    const StagePair pair{make_cycle(5, 8), 16};
    {
        const auto out = ry_rotator(PolState::h_photon(), 0, pair);
        CHECK(dist_up_to_global_phase(out.state.normalized(), PolState::h_photon()) <= kTol);
    }
    {
        // 2 k pi / L = pi
        const auto out = ry_rotator(PolState::h_photon(), 8, pair);
        CHECK(dist_up_to_global_phase(out.state.normalized(), PolState::v_photon()) <= kTol);
    }
    std::mt19937 rng(7202);
    std::uniform_int_distribution<int> pick_k(0, 16);
    for (int i = 0; i < 20; ++i) {
        const int k = pick_k(rng);
        const PolState in = test::random_state(rng);
        const auto out = ry_rotator(in, k, pair);
        const PolState expect = apply(ry(2.0 * k * pi / 16.0), in);
        CHECK(dist_up_to_global_phase(out.state.normalized(), expect) <= kTol);
    }
}

TEST_CASE("zyz decomposition: identity and Hadamard") {
    const auto id = zyz_decompose(Op2::identity());
    CHECK(id.beta == doctest::Approx(0.0));
    CHECK(id.gamma == doctest::Approx(0.0));
    CHECK(id.delta == doctest::Approx(0.0));

    const auto h = zyz_decompose(kHadamard);
    CHECK(h.alpha == doctest::Approx(pi / 2.0).epsilon(1e-12));
    CHECK(h.beta == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(h.gamma == doctest::Approx(pi / 2.0).epsilon(1e-12));
    CHECK(h.delta == doctest::Approx(pi).epsilon(1e-12));
}

TEST_CASE("zyz decomposition reconstructs Haar unitaries exactly") {
    std::mt19937 rng(7203);
    for (int i = 0; i < 100; ++i) {
        const Op2 u = test::haar_unitary(rng);
        const Op2 re = zyz_compose(zyz_decompose(u));
        CHECK(dist_up_to_global_phase(re, u) <= 1e-10);
        double entry_dev = 0.0;
        for (std::size_t j = 0; j < 4; ++j) entry_dev = std::max(entry_dev, std::abs(re.m[j] - u.m[j]));
        CHECK(entry_dev <= 1e-10);  // phase-exact, not just up to phase
    }
    CHECK_THROWS_AS(zyz_decompose(cplx(2.0) * Op2::identity()), std::invalid_argument);
}

TEST_CASE("compilation pins the documented programs") {
    {
        const auto prog = compile_program(Op2::identity(), 64);
        CHECK(prog.beta == 0);
        CHECK(prog.gamma == 0);
        CHECK(prog.delta == 0);
    }
    {
        const int res = 64;
        const auto prog = compile_program(rz(2.0 * pi * 7.0 / res), res);
        CHECK(prog.beta == 7);
        CHECK(prog.gamma == 0);
        CHECK(prog.delta == 0);
        const Op2 rebuilt = rz(2.0 * pi * prog.beta / res);
        CHECK(dist_up_to_global_phase(rebuilt, rz(2.0 * pi * 7.0 / res)) <= kTol);
    }
    {
        // tie angle exactly half way between counts rounds down
        const int res = 8;
        const auto prog = compile_program(rz(2.0 * pi * 2.5 / res), res);
        CHECK(prog.beta == 2);
    }
}

TEST_CASE("trivial program is the identity and equalizes to 3L") {
    BobProgram prog;
    prog.resolution = 10;
    prog.equalize = true;
    const auto res = run_protocol(PolState::h_photon(), prog, make_cycle(4, 4));
    CHECK(dist_up_to_global_phase(res.out_state, PolState::h_photon()) <= kTol);
    CHECK(res.exit_bin_total == 30);
    CHECK(res.per_stage.size() == 4);
}

TEST_CASE("compiled Hadamard rotates |H> to the diagonal state") {
    const int res = 256;
    const auto prog = compile_program(kHadamard, res);
    const auto out = run_protocol(PolState::h_photon(), prog, make_cycle(4, 5));
    const PolState expect = apply(kHadamard, PolState::h_photon());
    CHECK(dist_up_to_global_phase(out.out_state, expect) <= 3.0 * pi / res);
    CHECK(bob_tag_weight(out.out_state) <= kTol);
}

TEST_CASE("stage survivals multiply into the total") {
    BobProgram prog;
    prog.beta = 5;
    prog.gamma = 10;
    prog.delta = 3;
    prog.resolution = 20;
    const auto res = run_protocol(PolState::h_photon(), prog, make_cycle(20, 20));
    REQUIRE(res.per_stage.size() == 3);
    double product = 1.0;
    for (const auto& st : res.per_stage) product *= st.survival;
    CHECK(std::abs(res.total_survival - product) <= kTol);
    // independent per-stage oracle
    const double expect = test::phase_unit_survival_oracle(20, 20, 3) *
                          test::phase_unit_survival_oracle(20, 20, 10) *
                          test::phase_unit_survival_oracle(20, 20, 5);
    CHECK(res.total_survival == doctest::Approx(expect).epsilon(1e-12));
    CHECK(res.exit_bin_total == 3 + 10 + 5);
}

TEST_CASE("enacted map equals the programmed zyz product") {
    std::mt19937 rng(7204);
    std::uniform_int_distribution<int> pick(0, 16);
    for (int i = 0; i < 10; ++i) {
        BobProgram prog;
        prog.beta = pick(rng);
        prog.gamma = pick(rng);
        prog.delta = pick(rng);
        prog.resolution = 16;
        const Op2 map = enacted_map(prog, make_cycle(4, 6));
        const double u = 2.0 * pi / prog.resolution;
        const Op2 expect = rz(u * prog.beta) * ry(u * prog.gamma) * rz(u * prog.delta);
        CHECK(dist_up_to_global_phase(map, expect) <= kTol);
    }
}

TEST_CASE("post-selected output does not depend on the cycle counts") {
    BobProgram prog;
    prog.beta = 3;
    prog.gamma = 7;
    prog.delta = 11;
    prog.resolution = 12;
    const auto small = run_protocol(PolState::h_photon(), prog, make_cycle(2, 3));
    const auto large = run_protocol(PolState::h_photon(), prog, make_cycle(21, 17));
    CHECK(std::abs(small.out_state.amp_h - large.out_state.amp_h) <= kTol);
    CHECK(std::abs(small.out_state.amp_v - large.out_state.amp_v) <= kTol);
    CHECK(small.total_survival < large.total_survival);
}

TEST_CASE("equalizer pins the total exit bin for random programs") {
    std::mt19937 rng(7205);
    std::uniform_int_distribution<int> pick(0, 12);
    for (int i = 0; i < 10; ++i) {
        BobProgram prog;
        prog.beta = pick(rng);
        prog.gamma = pick(rng);
        prog.delta = pick(rng);
        prog.resolution = 12;
        prog.equalize = true;
        const auto res = run_protocol(test::random_state(rng), prog, make_cycle(3, 4));
        CHECK(res.exit_bin_total == 36);
        REQUIRE(res.per_stage.size() == 4);
        CHECK(res.per_stage[0].exit_bin == prog.delta);
        CHECK(res.per_stage[1].exit_bin == prog.gamma);
        CHECK(res.per_stage[2].exit_bin == prog.beta);
        double product = 1.0;
        for (const auto& st : res.per_stage) product *= st.survival;
        CHECK(std::abs(res.total_survival - product) <= kTol);
    }
}

TEST_CASE("program validation") {
    BobProgram prog;
    prog.resolution = 8;
    prog.beta = 9;
    CHECK_THROWS_AS(prog.validate(), std::invalid_argument);
    prog.beta = -1;
    CHECK_THROWS_AS(prog.validate(), std::invalid_argument);
    prog.beta = 0;
    prog.resolution = 0;
    CHECK_THROWS_AS(prog.validate(), std::invalid_argument);
    CHECK_THROWS_AS(compile_program(Op2::identity(), 0), std::invalid_argument);
    CHECK_THROWS_AS(run_protocol(PolState{}, BobProgram{}, make_cycle(2, 2)),
                    std::invalid_argument);
}
