// Command-line front end for the exchange-free qubit protocol simulator.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "efq/kraus.hpp"
#include "efq/phase_unit.hpp"
#include "efq/protocol.hpp"
#include "efq/remote_circuit.hpp"
#include "efq/report.hpp"
#include "efq/ry_direct.hpp"

namespace {

using efq::cplx;
using nlohmann::json;

// Exit codes: 0 ok, 1 validation failure, 2 internal invariant violation.
constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kInternal = 2;

void emit(const json& report, const std::string& out_path) {
    const std::string text = report.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(out_path, std::ios::binary);
        if (!os) throw std::invalid_argument("cannot open output path: " + out_path);
        os << text;
    }
}

std::vector<int> parse_grid(const std::string& spec) {
    // "start:stop:step" or a comma-separated list
    std::vector<int> out;
    if (spec.find(':') != std::string::npos) {
        int start = 0, stop = 0, step = 1;
        char c1 = 0, c2 = 0;
        std::istringstream is(spec);
        if (!(is >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0) {
            throw std::invalid_argument("grid must be start:stop:step or a comma list: " + spec);
        }
        for (int v = start; v <= stop; v += step) out.push_back(v);
    } else {
        std::istringstream is(spec);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            if (!tok.empty()) out.push_back(std::stoi(tok));
        }
    }
    if (out.empty()) throw std::invalid_argument("empty grid: " + spec);
    return out;
}

efq::PhaseUnitMode parse_mode(const std::string& mode) {
    if (mode == "phase") return efq::PhaseUnitMode::Phase;
    if (mode == "dit") return efq::PhaseUnitMode::Dit;
    if (mode == "delay") return efq::PhaseUnitMode::DelayOnly;
    throw std::invalid_argument("mode must be phase, dit or delay: " + mode);
}

efq::Op2 op2_from_params(const json& params) {
    const auto flat = params.at("u").get<std::vector<double>>();
    return efq::op2_from_flat(flat);
}

efq::PolState state_from_params(const json& params) {
    if (!params.contains("state")) return efq::PolState::h_photon();
    const auto flat = params.at("state").get<std::vector<double>>();
    if (flat.size() != 4) {
        throw std::invalid_argument("state must be 4 reals: reH imH reV imV");
    }
    efq::PolState s{cplx(flat[0], flat[1]), cplx(flat[2], flat[3]), 0.0, 0.0};
    if (s.norm2() <= 0.0) throw std::invalid_argument("state must be nonzero");
    return s.normalized();
}

int cmd_phase_unit(const json& params) {
    efq::PhaseUnitConfig cfg;
    cfg.cycle.outer_cycles = params.at("M").get<int>();
    cfg.cycle.inner_cycles = params.at("N").get<int>();
    cfg.runs_max = params.at("L").get<int>();
    cfg.k = params.at("k").get<int>();
    cfg.mode = parse_mode(params.value("mode", "phase"));
    cfg.input_pol = params.value("input", "H") == "V" ? efq::InputPol::V : efq::InputPol::H;
    const auto res = efq::run_phase_unit(cfg);
    const cplx phase = res.survival_prob > 0.0
                           ? res.transmission / std::abs(res.transmission)
                           : cplx(0.0);
    emit(json{{"ok", true},
              {"survival", res.survival_prob},
              {"exit_bin", res.exit_bin},
              {"phase", efq::complex_json(phase)},
              {"out_state", efq::state_json(res.out_state)},
              {"lost_prob", res.ledger.total_lost_prob()}},
         params.value("out", ""));
    return kOk;
}

int cmd_sweep(const json& params) {
    const auto ms = parse_grid(params.at("m_grid").get<std::string>());
    const auto ns = parse_grid(params.at("n_grid").get<std::string>());
    const int k = params.at("k").get<int>();
    const int L = params.value("L", 0) > 0 ? params.at("L").get<int>() : k + 8;

    std::vector<efq::SweepRow> rows;
    rows.reserve(ms.size() * ns.size());
    for (int m : ms) {
        for (int n : ns) {
            efq::PhaseUnitConfig cfg;
            cfg.cycle.outer_cycles = m;
            cfg.cycle.inner_cycles = n;
            cfg.runs_max = L;
            cfg.k = k;
            rows.push_back({m, n, k, efq::run_phase_unit(cfg).survival_prob});
        }
    }
    const std::string out_path = params.value("out", "");
    if (out_path.empty()) {
        efq::write_sweep_csv(std::cout, rows);
    } else {
        std::ofstream os(out_path, std::ios::binary);
        if (!os) throw std::invalid_argument("cannot open output path: " + out_path);
        efq::write_sweep_csv(os, rows);
    }
    return kOk;
}

int cmd_decompose(const json& params) {
    const efq::Op2 u = op2_from_params(params);
    const int resolution = params.at("L").get<int>();
    const efq::BobProgram prog = efq::compile_program(u, resolution);
    const std::string prog_path = params.value("program_out", "");
    if (!prog_path.empty()) {
        std::ofstream os(prog_path, std::ios::binary);
        if (!os) throw std::invalid_argument("cannot open output path: " + prog_path);
        os << efq::program_json(prog).dump(2) << "\n";
    }
    emit(json{{"ok", true},
              {"program", efq::program_json(prog)},
              {"alpha", prog.alpha_global}},
         params.value("out", ""));
    return kOk;
}

int cmd_run_unitary(const json& params) {
    efq::BobProgram prog;
    if (params.contains("program_file")) {
        std::ifstream is(params.at("program_file").get<std::string>());
        if (!is) throw std::invalid_argument("cannot open program file");
        json j;
        is >> j;
        prog = efq::program_from_json(j);
    } else if (params.contains("program")) {
        prog = efq::program_from_json(params.at("program"));
    } else {
        throw std::invalid_argument("run-unitary needs --program or inline program");
    }
    if (params.contains("equalize")) prog.equalize = params.at("equalize").get<bool>();

    efq::CycleConfig cycle;
    cycle.outer_cycles = params.value("M", 10);
    cycle.inner_cycles = params.value("N", 10);
    const efq::PolState in = state_from_params(params);
    const auto res = efq::run_protocol(in, prog, cycle);

    json bins = json::array();
    for (const auto& st : res.per_stage) bins.push_back(st.exit_bin);
    emit(json{{"ok", true},
              {"out_state", efq::state_json(res.out_state)},
              {"survival", res.total_survival},
              {"exit_bin_total", res.exit_bin_total},
              {"stage_bins", bins}},
         params.value("out", ""));
    return kOk;
}

int cmd_kraus_verify(const json& params) {
    const int m = params.at("M").get<int>();
    const int n = params.at("N").get<int>();
    const auto rep = efq::verify_channels(m, n);
    if (params.contains("dump")) {
        const auto outer = efq::build_outer_channels(m, n);
        const auto inner = efq::build_inner_channels(n);
        json dump{{"inner_blocked", efq::channel_json(inner.blocked)},
                  {"inner_passed", efq::channel_json(inner.passed)},
                  {"outer_blocked", efq::channel_json(outer.blocked)},
                  {"outer_passed", efq::channel_json(outer.passed)}};
        std::ofstream os(params.at("dump").get<std::string>(), std::ios::binary);
        if (!os) throw std::invalid_argument("cannot open dump path");
        os << dump.dump(2) << "\n";
    }
    emit(json{{"ok", rep.ok},
              {"max_inner_closed_form_dev", rep.max_inner_closed_form_dev},
              {"max_simulator_dev", rep.max_simulator_dev},
              {"max_completeness_defect", rep.max_completeness_defect},
              {"c", {{"c1", rep.coefficients.c1},
                     {"c2", rep.coefficients.c2},
                     {"c3", rep.coefficients.c3},
                     {"c4", rep.coefficients.c4}}}},
         params.value("out", ""));
    return rep.ok ? kOk : kInternal;
}

int cmd_ry_simple(const json& params) {
    efq::RyDirectConfig cfg;
    cfg.cycle.outer_cycles = params.at("M").get<int>();
    cfg.cycle.inner_cycles = params.at("N").get<int>();
    cfg.k = params.at("k").get<int>();
    const auto res = efq::run_ry_direct(cfg);
    emit(json{{"ok", true},
              {"out_state", efq::state_json(res.out_state)},
              {"survival", res.survival_prob}},
         params.value("out", ""));
    return kOk;
}

int cmd_dit(const json& params) {
    efq::PhaseUnitConfig cfg;
    cfg.cycle.outer_cycles = params.value("M", 10);
    cfg.cycle.inner_cycles = params.value("N", 10);
    cfg.runs_max = params.at("L").get<int>();
    cfg.k = params.at("k").get<int>();
    cfg.mode = efq::PhaseUnitMode::Dit;
    emit(json{{"ok", true}, {"bin", efq::send_dit(cfg)}}, params.value("out", ""));
    return kOk;
}

int cmd_ccu(const json& params) {
    const efq::Op2 u = op2_from_params(params);
    json table = json::array();
    bool all_match = true;
    for (int b1 = 0; b1 < 2; ++b1) {
        for (int b2 = 0; b2 < 2; ++b2) {
            for (int t = 0; t < 2; ++t) {
                const efq::PolState in = t == 0 ? efq::PolState::h_photon()
                                                : efq::PolState::v_photon();
                const efq::PolState out =
                    efq::apply_network(in, {b1 != 0, b2 != 0}, u);
                const efq::PolState expect =
                    (b1 != 0 && b2 != 0) ? efq::apply(u, in) : in;
                const double dev = efq::dist_up_to_global_phase(out, expect);
                const bool match = dev <= efq::kTol;
                all_match = all_match && match;
                table.push_back(json{{"b1", b1},
                                     {"b2", b2},
                                     {"target", t == 0 ? "H" : "V"},
                                     {"out", efq::state_json(out)},
                                     {"deviation", dev},
                                     {"match", match}});
            }
        }
    }
    emit(json{{"ok", all_match}, {"table", table}}, params.value("out", ""));
    return all_match ? kOk : kInternal;
}

int dispatch(const std::string& command, const json& params) {
    if (command == "phase-unit") return cmd_phase_unit(params);
    if (command == "sweep") return cmd_sweep(params);
    if (command == "decompose") return cmd_decompose(params);
    if (command == "run-unitary") return cmd_run_unitary(params);
    if (command == "kraus-verify") return cmd_kraus_verify(params);
    if (command == "ry-simple") return cmd_ry_simple(params);
    if (command == "dit") return cmd_dit(params);
    if (command == "ccu") return cmd_ccu(params);
    throw std::invalid_argument("unknown command: " + command);
}

int run_descriptors(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open runs descriptor: " + path);
    json doc;
    is >> doc;
    const json runs = doc.is_array() ? doc : json::array({doc});
    for (const auto& run : runs) {
        json params = run.value("params", json::object());
        if (run.contains("output")) params["out"] = run.at("output");
        const int rc = dispatch(run.at("command").get<std::string>(), params);
        if (rc != kOk) return rc;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exchange-free qubit protocol simulator"};
    app.require_subcommand(0, 1);

    std::string runs_descriptor;
    app.add_option("--runs-descriptor", runs_descriptor,
                   "JSON file describing a batch of runs");

    json params;
    std::string command;
    auto bind_int = [&params](CLI::App* sub, const std::string& flag, const std::string& key,
                              bool required = true) {
        auto* opt = sub->add_option_function<int>(
            flag, [&params, key](const int& v) { params[key] = v; });
        if (required) opt->required();
        return opt;
    };
    auto bind_str = [&params](CLI::App* sub, const std::string& flag, const std::string& key,
                              bool required = true) {
        auto* opt = sub->add_option_function<std::string>(
            flag, [&params, key](const std::string& v) { params[key] = v; });
        if (required) opt->required();
        return opt;
    };
    auto bind_reals = [&params](CLI::App* sub, const std::string& flag, const std::string& key,
                                int count) {
        sub->add_option_function<std::vector<double>>(
               flag, [&params, key](const std::vector<double>& v) { params[key] = v; })
            ->expected(count)
            ->required();
    };
    auto named = [&](const char* name, const char* desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->callback([&command, name] { command = name; });
        return sub;
    };

    {
        auto* sub = named("phase-unit", "run one Phase Unit and report survival, bin and phase");
        bind_int(sub, "--M", "M");
        bind_int(sub, "--N", "N");
        bind_int(sub, "--L", "L");
        bind_int(sub, "--k", "k");
        bind_str(sub, "--mode", "mode", false);
        bind_str(sub, "--input", "input", false);
        bind_str(sub, "--out", "out", false);
    }
    {
        auto* sub = named("sweep", "survival surface over an (M, N) grid, CSV output");
        bind_str(sub, "--m-grid", "m_grid");
        bind_str(sub, "--n-grid", "n_grid");
        bind_int(sub, "--k", "k");
        bind_int(sub, "--L", "L", false);
        bind_str(sub, "--out", "out", false);
    }
    {
        auto* sub = named("decompose", "compile a 2x2 unitary into a Bob program");
        bind_reals(sub, "--u", "u", 8);
        bind_int(sub, "--L", "L");
        bind_str(sub, "--program-out", "program_out", false);
        bind_str(sub, "--out", "out", false);
    }
    {
        auto* sub = named("run-unitary", "execute a Bob program on an input state");
        bind_str(sub, "--program", "program_file");
        bind_int(sub, "--M", "M", false);
        bind_int(sub, "--N", "N", false);
        sub->add_option_function<std::vector<double>>(
               "--state",
               [&params](const std::vector<double>& v) { params["state"] = v; })
            ->expected(4);
        sub->add_flag_function("--equalize",
                               [&params](std::int64_t) { params["equalize"] = true; });
        bind_str(sub, "--out", "out", false);
    }
    {
        auto* sub = named("kraus-verify", "verify channel constructions against the simulator");
        bind_int(sub, "--M", "M");
        bind_int(sub, "--N", "N");
        bind_str(sub, "--dump", "dump", false);
        bind_str(sub, "--out", "out", false);
    }
    {
        auto* sub = named("ry-simple", "single-shot ry rotation without the phase module");
        bind_int(sub, "--M", "M");
        bind_int(sub, "--N", "N");
        bind_int(sub, "--k", "k");
        bind_str(sub, "--out", "out", false);
    }
    {
        auto* sub = named("dit", "send a base-L symbol through exit-time binning");
        bind_int(sub, "--L", "L");
        bind_int(sub, "--k", "k");
        bind_int(sub, "--M", "M", false);
        bind_int(sub, "--N", "N", false);
        bind_str(sub, "--out", "out", false);
    }
    {
        auto* sub = named("ccu", "verification table for the classically controlled-controlled U");
        bind_reals(sub, "--u", "u", 8);
        bind_str(sub, "--out", "out", false);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        if (!runs_descriptor.empty()) return run_descriptors(runs_descriptor);
        if (command.empty()) {
            std::cerr << app.help();
            return kValidation;
        }
        return dispatch(command, params);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}
