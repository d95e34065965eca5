#include "efq/report.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace efq {

using nlohmann::json;

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

json complex_json(const cplx& z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json state_json(const PolState& s) {
    return json{{"H", complex_json(s.amp_h)}, {"V", complex_json(s.amp_v)}};
}

json program_json(const BobProgram& prog) {
    return json{{"beta", prog.beta},
                {"gamma", prog.gamma},
                {"delta", prog.delta},
                {"L", prog.resolution},
                {"equalize", prog.equalize}};
}

BobProgram program_from_json(const json& j) {
    BobProgram prog;
    prog.beta = j.at("beta").get<int>();
    prog.gamma = j.at("gamma").get<int>();
    prog.delta = j.at("delta").get<int>();
    prog.resolution = j.at("L").get<int>();
    prog.equalize = j.value("equalize", false);
    prog.validate();
    return prog;
}

json op2_json(const Op2& u) {
    json rows = json::array();
    for (int r = 0; r < 2; ++r) {
        json row = json::array();
        for (int c = 0; c < 2; ++c) row.push_back(complex_json(u.at(r, c)));
        rows.push_back(row);
    }
    return rows;
}

Op2 op2_from_flat(std::span<const double> reals) {
    if (reals.size() != 8) {
        throw std::invalid_argument("op2_from_flat: expected 8 reals (row-major re/im pairs)");
    }
    Op2 u;
    for (int i = 0; i < 4; ++i) u.m[static_cast<std::size_t>(i)] = cplx(reals[2 * i], reals[2 * i + 1]);
    return u;
}

json channel_json(const KrausChannel& ch) {
    json ops = json::array();
    for (const auto& x : ch.ops) {
        json rows = json::array();
        for (int r = 0; r < x.dim(); ++r) {
            json row = json::array();
            for (int c = 0; c < x.dim(); ++c) row.push_back(complex_json(x.at(r, c)));
            rows.push_back(row);
        }
        ops.push_back(rows);
    }
    return json{{"basis", ch.basis}, {"ops", ops}};
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
    os << "M,N,k,survival\n";
    for (const auto& r : rows) {
        os << r.outer_cycles << ',' << r.inner_cycles << ',' << r.k << ','
           << format_double(r.survival) << '\n';
    }
}

}  // namespace efq
