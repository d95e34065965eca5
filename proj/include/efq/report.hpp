#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "efq/gates.hpp"
#include "efq/kraus.hpp"
#include "efq/protocol.hpp"

namespace efq {

// Fixed full-precision formatting so identical inputs produce identical bytes.
std::string format_double(double x);

nlohmann::json complex_json(const cplx& z);  // {"re": ..., "im": ...}
nlohmann::json state_json(const PolState& s);

// Wire format for Bob programs: {"beta", "gamma", "delta", "L", "equalize"}.
nlohmann::json program_json(const BobProgram& prog);
BobProgram program_from_json(const nlohmann::json& j);

nlohmann::json op2_json(const Op2& u);
Op2 op2_from_flat(std::span<const double> reals);  // 8 reals, row-major re/im pairs

nlohmann::json channel_json(const KrausChannel& ch);

struct SweepRow {
    int outer_cycles = 0;
    int inner_cycles = 0;
    int k = 0;
    double survival = 0.0;
};

// Stable schema: header "M,N,k,survival", full double precision.
void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);

}  // namespace efq
