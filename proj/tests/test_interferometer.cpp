#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "efq/interferometer.hpp"
#include "oracles.hpp"

using namespace efq;
using std::numbers::pi;

namespace {

CycleConfig make_cfg(int m, int n) {
    CycleConfig cfg;
    cfg.outer_cycles = m;
    cfg.inner_cycles = n;
    return cfg;
}

}  // namespace

TEST_CASE("blocked chain before the exit PBS matches the closed-form ket") {
    // N = 4: cos(pi/8)^4 |V> + cos(pi/8)^3 sin(pi/8) |H>
    const CycleConfig cfg = make_cfg(1, 4);
    LossLedger led;
    const auto sched = BlockSchedule::block_all(cfg);
    const PolState out = inner_cycles(PolState::v_photon(), cfg, sched.inner_slice(0), led);
    const double c = std::cos(pi / 8.0), s = std::sin(pi / 8.0);
    CHECK(std::abs(out.amp_v - cplx(c * c * c * c)) <= kTol);
    CHECK(std::abs(out.amp_h - cplx(c * c * c * s)) <= kTol);
}

TEST_CASE("blocked chain reproduces the closed form for every N") {
    for (int n = 1; n <= 40; ++n) {
        const CycleConfig cfg = make_cfg(1, n);
        LossLedger led;
        const auto sched = BlockSchedule::block_all(cfg);
        const PolState out = inner_cycles(PolState::v_photon(), cfg, sched.inner_slice(0), led);
        const double c = std::cos(pi / (2.0 * n)), s = std::sin(pi / (2.0 * n));
        CHECK(std::abs(out.amp_v - cplx(std::pow(c, n))) <= kTol);
        CHECK(std::abs(out.amp_h - cplx(std::pow(c, n - 1) * s)) <= kTol);
    }
}

TEST_CASE("open chain sends everything to the exit detector") {
    for (int n : {1, 2, 5, 16}) {
        const CycleConfig cfg = make_cfg(1, n);
        LossLedger led;
        const auto sched = BlockSchedule::block_none(cfg);
        const PolState out = inner_chain(PolState::v_photon(), cfg, sched.inner_slice(0), led);
        CHECK(out.norm2() <= kTol);
        double da = 0.0;
        for (const auto& e : led.lost_da) da += std::norm(e.amp);
        CHECK(std::abs(da - 1.0) <= kTol);
        CHECK(led.lost_db.empty());
    }
}

TEST_CASE("two-cycle blocked chain survival is 1/4") {
    const CycleConfig cfg = make_cfg(1, 2);
    LossLedger led;
    const auto sched = BlockSchedule::block_all(cfg);
    const PolState out = inner_chain(PolState::v_photon(), cfg, sched.inner_slice(0), led);
    CHECK(out.norm2() == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(std::abs(out.amp_v.real() * out.amp_v.real() - 0.25) <= kTol);
}

TEST_CASE("open outer run keeps cos(pi/2M)^M of an H photon") {
    {
        LossLedger led;
        const PolState out = outer_run(PolState::h_photon(), make_cfg(2, 3), Policy::BlockNone, led);
        CHECK(std::abs(out.amp_h - cplx(0.5)) <= kTol);  // cos(pi/4)^2 exactly
        CHECK(std::abs(out.amp_v) <= kTol);
    }
    for (int m : {1, 2, 5, 20, 50}) {
        for (int n : {1, 7, 30}) {
            LossLedger led;
            const PolState out =
                outer_run(PolState::h_photon(), make_cfg(m, n), Policy::BlockNone, led);
            const double expect = std::pow(std::cos(pi / (2.0 * m)), m);
            CHECK(std::abs(out.amp_h - cplx(expect)) <= kTol);
            CHECK(std::abs(out.amp_v) <= kTol);
        }
    }
}

TEST_CASE("blocked outer run approaches a V photon with survival near one") {
    // The ideal-switch limit takes the inner count to infinity first.
    LossLedger led;
    const PolState out =
        outer_run(PolState::h_photon(), make_cfg(40, 8000), Policy::BlockAll, led);
    CHECK(out.norm2() >= 0.97);
    CHECK(std::norm(out.amp_v) / out.norm2() >= 0.999);
}

TEST_CASE("blocked outer run matches the matrix-power oracle") {
    for (auto [m, n] : {std::pair{5, 10}, {2, 2}, {13, 4}, {20, 20}}) {
        LossLedger led;
        const PolState out = outer_run(PolState::h_photon(), make_cfg(m, n), Policy::BlockAll, led);
        const auto t = test::blocked_run_matrix(m, n);
        const auto expect = test::mat_vec(t, {cplx(1.0), cplx(0.0)});
        CHECK(std::abs(out.amp_h - expect[0]) <= kTol);
        CHECK(std::abs(out.amp_v - expect[1]) <= kTol);
    }
}

TEST_CASE("visited-channel weight of surviving outputs is zero") {
    for (Policy policy : {Policy::BlockAll, Policy::BlockNone}) {
        LossLedger led;
        const PolState out = outer_run(PolState::h_photon(), make_cfg(7, 9), policy, led);
        CHECK(bob_tag_weight(out) <= kTol);
    }
}

TEST_CASE("mid-chain state carries visited-channel weight under passing") {
    const CycleConfig cfg = make_cfg(1, 4);
    LossLedger led;
    const auto sched = BlockSchedule::block_none(cfg);
    const PolState mid = inner_cycles(PolState::v_photon(), cfg, sched.inner_slice(0), led);
    CHECK(bob_tag_weight(mid) > 0.1);
}

TEST_CASE("norm is conserved between state and ledger") {
    std::mt19937 rng(7101);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * pi);
    for (int m : {1, 2, 3, 7, 20, 50}) {
        for (int n : {1, 2, 5, 17, 50}) {
            const CycleConfig cfg = make_cfg(m, n);
            for (Policy policy : {Policy::BlockAll, Policy::BlockNone}) {
                LossLedger led;
                const double a = ang(rng);
                PolState in{std::polar(1.0, ang(rng)) * std::cos(a),
                            std::polar(1.0, ang(rng)) * std::sin(a), 0.0, 0.0};
                const PolState out = outer_run(in, cfg, policy, led);
                CHECK(std::abs(out.norm2() + led.total_lost_prob() - 1.0) <= kTol);
                out.check();
            }
        }
    }
}

TEST_CASE("norm is conserved for random schedules") {
    std::mt19937 rng(7102);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 50; ++trial) {
        const CycleConfig cfg = make_cfg(1 + trial % 9, 1 + (trial * 7) % 11);
        std::vector<char> flags(static_cast<std::size_t>(cfg.outer_cycles) * cfg.inner_steps());
        for (auto& f : flags) f = coin(rng) ? 1 : 0;
        const auto sched = BlockSchedule::from_flags(cfg, std::move(flags));
        LossLedger led;
        const PolState out = outer_run(PolState::h_photon(), cfg, sched, led);
        CHECK(std::abs(out.norm2() + led.total_lost_prob() - 1.0) <= kTol);
        out.check();
    }
}

TEST_CASE("midblock pass geometry removes the inner arm like plain passing") {
    CycleConfig cfg = make_cfg(1, 6);
    cfg.midblock_pass = true;
    LossLedger led;
    const auto sched = BlockSchedule::pass_midblock(cfg);
    const PolState out = inner_chain(PolState::v_photon(), cfg, sched.inner_slice(0), led);
    CHECK(out.norm2() <= kTol);
    // the removal happens at Bob's block, not at the exit detector
    double db = 0.0;
    for (const auto& e : led.lost_db) db += std::norm(e.amp);
    CHECK(std::abs(db - 1.0) <= kTol);
}

TEST_CASE("midblock pass suppresses plate-offset leakage to second order") {
    const double offset = 0.01;
    auto residual = [&](bool midblock) {
        CycleConfig cfg = make_cfg(1, 10);
        cfg.inner_plate_offset = offset;
        cfg.midblock_pass = midblock;
        LossLedger led;
        const auto sched =
            midblock ? BlockSchedule::pass_midblock(cfg) : BlockSchedule::block_none(cfg);
        const PolState out =
            inner_chain(PolState::v_photon(), cfg, sched.inner_slice(0), led);
        return std::sqrt(out.norm2());
    };
    const double plain = residual(false);
    const double guarded = residual(true);
    CHECK(plain > 1e-2);              // first order in the accumulated offset
    CHECK(guarded < plain * plain * 4.0);  // second order
    CHECK(guarded < plain / 10.0);
}

TEST_CASE("schedule misuse is rejected") {
    const CycleConfig cfg = make_cfg(2, 3);
    LossLedger led;
    const auto sched = BlockSchedule::block_all(cfg);
    CHECK_THROWS_AS(inner_cycles(PolState::v_photon(), cfg, sched.inner_slice(0).subspan(1), led),
                    std::invalid_argument);
    CHECK_THROWS_AS(inner_cycles(PolState::h_photon(), cfg, sched.inner_slice(0), led),
                    std::invalid_argument);
    CHECK_THROWS_AS(BlockSchedule::pass_midblock(cfg), std::invalid_argument);
    const CycleConfig other = make_cfg(3, 3);
    CHECK_THROWS_AS(outer_run(PolState::h_photon(), other, sched, led), std::invalid_argument);
    CHECK_THROWS_AS(make_cfg(0, 1).validate(), std::invalid_argument);
}
