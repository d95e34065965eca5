#include "efq/gates.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace efq {

Op2 Op2::identity() {
    Op2 r;
    r.m = {cplx(1.0), cplx(0.0), cplx(0.0), cplx(1.0)};
    return r;
}

Op2 Op2::zero() { return Op2{}; }

Op2 Op2::operator*(const Op2& rhs) const {
    Op2 r;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            r.at(i, j) = at(i, 0) * rhs.at(0, j) + at(i, 1) * rhs.at(1, j);
        }
    }
    return r;
}

Op2 Op2::operator+(const Op2& rhs) const {
    Op2 r;
    for (std::size_t i = 0; i < 4; ++i) r.m[i] = m[i] + rhs.m[i];
    return r;
}

Op2 Op2::operator-(const Op2& rhs) const {
    Op2 r;
    for (std::size_t i = 0; i < 4; ++i) r.m[i] = m[i] - rhs.m[i];
    return r;
}

Op2 Op2::dagger() const {
    Op2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.at(i, j) = std::conj(at(j, i));
    return r;
}

cplx Op2::det() const { return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0); }

cplx Op2::trace() const { return at(0, 0) + at(1, 1); }

double Op2::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : m) s += std::norm(z);
    return std::sqrt(s);
}

bool Op2::is_unitary(double tol) const {
    return (dagger() * (*this) - identity()).frobenius_norm() <= tol;
}

Op2 operator*(const cplx& s, const Op2& op) {
    Op2 r;
    for (std::size_t i = 0; i < 4; ++i) r.m[i] = s * op.m[i];
    return r;
}

namespace {

void require_finite_angle(double theta, const char* who) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument(std::string(who) + ": angle must be finite");
    }
}

Op2 checked_unitary(Op2 op, const char* who) {
    if (!op.is_unitary(kTol)) {
        throw std::logic_error(std::string(who) + ": constructed matrix is not unitary");
    }
    return op;
}

}  // namespace

Op2 rx(double theta) {
    require_finite_angle(theta, "rx");
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    Op2 r;
    r.m = {cplx(c, 0.0), cplx(0.0, -s), cplx(0.0, -s), cplx(c, 0.0)};
    return checked_unitary(r, "rx");
}

Op2 ry(double theta) {
    require_finite_angle(theta, "ry");
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    Op2 r;
    r.m = {cplx(c), cplx(-s), cplx(s), cplx(c)};
    return checked_unitary(r, "ry");
}

Op2 rz(double theta) {
    require_finite_angle(theta, "rz");
    Op2 r;
    r.m = {std::polar(1.0, -theta / 2.0), cplx(0.0), cplx(0.0), std::polar(1.0, theta / 2.0)};
    return checked_unitary(r, "rz");
}

Op2 qwp() { return rx(-std::numbers::pi / 2.0); }

Op2 qwp_dagger() { return rx(std::numbers::pi / 2.0); }

double dist_up_to_global_phase(const Op2& u, const Op2& v) {
    cplx ip = 0.0;  // tr(u^dagger v)
    for (std::size_t i = 0; i < 4; ++i) {
        if (!std::isfinite(u.m[i].real()) || !std::isfinite(u.m[i].imag()) ||
            !std::isfinite(v.m[i].real()) || !std::isfinite(v.m[i].imag())) {
            throw std::invalid_argument("dist_up_to_global_phase: non-finite entry");
        }
        ip += std::conj(u.m[i]) * v.m[i];
    }
    // Rotate v by the optimal phase and subtract entry-wise; the closed form
    // sqrt(|u|^2 + |v|^2 - 2|ip|) loses half the digits near zero.
    const cplx phase = std::abs(ip) == 0.0 ? cplx(1.0) : std::conj(ip) / std::abs(ip);
    double d2 = 0.0;
    for (std::size_t i = 0; i < 4; ++i) d2 += std::norm(u.m[i] - phase * v.m[i]);
    return std::sqrt(d2);
}

double PolState::norm2() const { return std::norm(amp_h) + std::norm(amp_v); }

double PolState::tag_norm2() const { return std::norm(tag_h) + std::norm(tag_v); }

PolState PolState::normalized() const {
    const double n = std::sqrt(norm2());
    if (n == 0.0) return *this;
    return {amp_h / n, amp_v / n, tag_h / n, tag_v / n};
}

PolState PolState::canonicalized() const {
    cplx lead = amp_h;
    if (std::abs(lead) == 0.0) lead = amp_v;
    if (std::abs(lead) == 0.0) return *this;
    const cplx phase = std::conj(lead / std::abs(lead));
    return {phase * amp_h, phase * amp_v, phase * tag_h, phase * tag_v};
}

void PolState::check() const {
    if (norm2() > 1.0 + kTol) {
        throw std::logic_error("PolState: norm exceeds 1");
    }
    if (tag_norm2() > norm2() + kTol) {
        throw std::logic_error("PolState: tagged weight exceeds total weight");
    }
}

PolState apply(const Op2& op, const PolState& s) {
    PolState r;
    r.amp_h = op.at(0, 0) * s.amp_h + op.at(0, 1) * s.amp_v;
    r.amp_v = op.at(1, 0) * s.amp_h + op.at(1, 1) * s.amp_v;
    r.tag_h = op.at(0, 0) * s.tag_h + op.at(0, 1) * s.tag_v;
    r.tag_v = op.at(1, 0) * s.tag_h + op.at(1, 1) * s.tag_v;
    return r;
}

double dist_up_to_global_phase(const PolState& a, const PolState& b) {
    const cplx ip = std::conj(a.amp_h) * b.amp_h + std::conj(a.amp_v) * b.amp_v;
    const cplx phase = std::abs(ip) == 0.0 ? cplx(1.0) : std::conj(ip) / std::abs(ip);
    return std::sqrt(std::norm(a.amp_h - phase * b.amp_h) +
                     std::norm(a.amp_v - phase * b.amp_v));
}

}  // namespace efq
