// qgap: classical, tensor, and sequential bounds for correlation operators.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qgap/qgap.hpp"

namespace {

using namespace qgap;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qgap::ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw qgap::Error("cannot write " + path);
    out << text;
}

// stdout by default, file when --out was given
void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
}

struct Target {
    CorrelationOperator op;
    std::string family;  // "sn", "t", or "custom"
    int n = 0;
    bool builtin = false;
};

// Builtin names sn:<n> and t:<n>; anything else is read as an operator file.
Target parse_target(const std::string& s) {
    Target t;
    auto index_of = [&](const std::string& prefix) -> int {
        std::size_t pos = prefix.size();
        if (s.size() <= pos) throw qgap::DomainError("target " + s + ": missing index");
        std::size_t used = 0;
        int n = 0;
        try {
            n = std::stoi(s.substr(pos), &used);
        } catch (const std::exception&) {
            throw qgap::DomainError("target " + s + ": bad index");
        }
        if (used != s.size() - pos || n < 2)
            throw qgap::DomainError("target " + s + ": index must be an integer >= 2");
        return n;
    };
    if (s.rfind("sn:", 0) == 0) {
        t.n = index_of("sn:");
        t.op = build_sn(t.n);
        t.family = "sn";
        t.builtin = true;
        return t;
    }
    if (s.rfind("t:", 0) == 0) {
        t.n = index_of("t:");
        t.op = build_t(t.n);
        t.family = "t";
        t.builtin = true;
        return t;
    }
    t.op = parse_operator(read_file(s));
    if (t.op.name.empty()) t.op.name = s;
    t.family = "custom";
    t.builtin = false;
    return t;
}

// Flags shared across engine-running subcommands. Zero means module default.
struct EngineFlags {
    int level = 2;
    std::size_t local_dim = 2;
    int restarts = 24;
    std::uint64_t seed = 1;
    double tol = 0.0;
    std::uint64_t budget = 0;
};

Config make_config(const EngineFlags& f) {
    Config cfg = Config::defaults();
    if (f.budget > 0) cfg.enumeration_budget = f.budget;
    return cfg;
}

// Tolerance flags tighten and never loosen.
double sdp_tol_of(const EngineFlags& f) {
    double d = Config::defaults().sdp_tol;
    return f.tol > 0.0 ? std::min(f.tol, d) : d;
}

double seesaw_tol_of(const EngineFlags& f) {
    double d = Config::defaults().seesaw_improve_tol;
    return f.tol > 0.0 ? std::min(f.tol, d) : d;
}

struct EngineSelection {
    bool classical = false, seesaw = false, npa = false, theta = false, sequential = false;
};

void run_engines(const Target& t, const EngineSelection& sel, const EngineFlags& flags,
                 BoundReport& r) {
    const Config cfg = make_config(flags);
    r.operator_id = t.op.name;
    r.algebraic_max = algebraic_max(t.op);
    auto note_failure = [&](const std::string& engine, const std::exception& e) {
        r.incomplete = true;
        if (!r.incomplete_reason.empty()) r.incomplete_reason += "; ";
        r.incomplete_reason += engine + ": " + e.what();
    };
    if (sel.classical) {
        try {
            ClassicalResult c = classical_max(t.op, cfg);
            ClassicalEntry e;
            e.value = c.value;
            e.integer_arithmetic = c.integer_arithmetic;
            e.budget = cfg.enumeration_budget;
            r.classical = e;
        } catch (const qgap::ResourceError& e) {
            note_failure("classical", e);
        }
    }
    if (sel.seesaw) {
        try {
            SeesawReport s =
                seesaw(t.op, flags.local_dim, flags.restarts, flags.seed, seesaw_tol_of(flags), cfg);
            SeesawEntry e;
            e.value = s.value;
            e.local_dim = flags.local_dim;
            e.restarts = flags.restarts;
            e.seed = flags.seed;
            e.tol = seesaw_tol_of(flags);
            e.converged = s.converged;
            r.seesaw = e;
        } catch (const qgap::ResourceError& e) {
            note_failure("seesaw", e);
        }
    }
    if (sel.npa) {
        try {
            NpaResult nr = npa_upper_bound(t.op, flags.level, sdp_tol_of(flags),
                                           Config::defaults().sdp_max_iters, flags.seed, cfg);
            NpaEntry e;
            e.value = nr.value;
            e.error_bar = nr.error_bar;
            e.level = nr.level;
            e.tol = sdp_tol_of(flags);
            e.status = nr.sdp_status;
            r.npa = e;
        } catch (const qgap::ResourceError& e) {
            note_failure("npa", e);
        }
    }
    if (sel.theta) {
        try {
            ThetaResult th = lovasz_theta_full(compatibility_graph(t.op), sdp_tol_of(flags), cfg);
            ThetaEntry e;
            e.value = th.value;
            e.error_bar = th.error_bar;
            r.theta = e;
        } catch (const qgap::ResourceError& e) {
            note_failure("theta", e);
        }
    }
    if (sel.sequential) {
        try {
            Certificate cert = t.family == "sn" ? certify_sn_sequential(t.n, cfg)
                                                : certify_t_sequential(t.n, cfg);
            if (!cert.pass)
                throw qgap::ContractError("sequential certificate failed for " + t.op.name);
            SequentialEntry e;
            e.value = cert.value;
            e.commutation_max = cert.commutation_max;
            e.model_hash = cert.model_hash;
            r.sequential = e;
        } catch (const qgap::ResourceError& e) {
            note_failure("sequential", e);
        }
    }
    compute_gap_flags(r);
    validate_report(r);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

const char* kCsvHeader =
    "family,n,algebraic_max,classical,seesaw,npa,npa_error,theta,sequential,ratio,status\n";

std::string csv_row(const BoundReport& r, const std::string& family, int n,
                    const std::string& status) {
    std::ostringstream row;
    row << family << "," << n << "," << fmt(r.algebraic_max) << ",";
    row << (r.classical ? fmt(r.classical->value) : "") << ",";
    row << (r.seesaw ? fmt(r.seesaw->value) : "") << ",";
    row << (r.npa ? fmt(r.npa->value) : "") << ",";
    row << (r.npa ? fmt(r.npa->error_bar) : "") << ",";
    row << (r.theta ? fmt(r.theta->value) : "") << ",";
    row << (r.sequential ? fmt(r.sequential->value) : "") << ",";
    if (r.sequential && r.seesaw && r.seesaw->value > 0.0)
        row << fmt(r.sequential->value / r.seesaw->value);
    row << "," << status << "\n";
    return row.str();
}

int cmd_bounds(const std::string& target, const EngineSelection& requested, bool all_flag,
               const EngineFlags& flags, const std::string& out_path, const std::string& format) {
    Target t = parse_target(target);
    bool any = requested.classical || requested.seesaw || requested.npa || requested.theta ||
               requested.sequential;
    bool all = all_flag || !any;
    EngineSelection sel = requested;
    if (all) {
        sel.classical = sel.seesaw = true;
        // family defaults: moment relaxation for the chained family, graph
        // bound for the exclusivity family, both for custom operators
        sel.npa = sel.npa || t.family != "t";
        sel.theta = sel.theta || t.family != "sn";
        sel.sequential = sel.sequential || t.builtin;
    }
    if (sel.sequential && !t.builtin)
        throw qgap::DomainError("sequential engine needs a builtin target (sn:<n> or t:<n>)");

    BoundReport r;
    run_engines(t, sel, flags, r);
    if (format == "csv")
        emit(out_path, std::string(kCsvHeader) +
                           csv_row(r, t.family, t.n, r.incomplete ? "incomplete" : "ok"));
    else
        emit(out_path, serialize_report(r));
    return r.incomplete ? 3 : 0;
}

int cmd_sweep(const std::string& family, const std::string& range, bool with_npa, bool with_theta,
              const EngineFlags& flags, const std::string& out_path, const std::string& format) {
    if (family != "sn" && family != "t")
        throw qgap::DomainError("sweep family must be sn or t");
    std::size_t dots = range.find("..");
    if (dots == std::string::npos)
        throw qgap::DomainError("sweep range must look like a..b");
    int lo = 0, hi = 0;
    try {
        lo = std::stoi(range.substr(0, dots));
        hi = std::stoi(range.substr(dots + 2));
    } catch (const std::exception&) {
        throw qgap::DomainError("sweep range must look like a..b");
    }
    if (lo < 2 || hi < lo) throw qgap::DomainError("sweep range must satisfy 2 <= a <= b");

    EngineSelection sel;
    sel.classical = sel.seesaw = sel.sequential = true;
    sel.npa = with_npa;
    sel.theta = with_theta || family == "t";

    std::size_t rows = std::size_t(hi - lo + 1);
    std::vector<BoundReport> reports(rows);
    std::vector<std::string> status(rows, "ok");
    parallel_for(rows, [&](std::size_t i) {
        int n = lo + int(i);
        Target t;
        try {
            t = parse_target(family + ":" + std::to_string(n));
            run_engines(t, sel, flags, reports[i]);
            if (reports[i].incomplete) status[i] = "incomplete";
        } catch (const std::exception& e) {
            reports[i].operator_id = family + ":" + std::to_string(n);
            std::string what = e.what();
            for (char& c : what)
                if (c == ',' || c == '\n') c = ' ';
            status[i] = "error: " + what;
        }
    });

    std::ostringstream out;
    if (format == "report") {
        nlohmann::json arr = nlohmann::json::array();
        for (std::size_t i = 0; i < rows; ++i) {
            nlohmann::json j = report_to_json(reports[i]);
            j["status"] = status[i];
            arr.push_back(std::move(j));
        }
        out << arr.dump(2) << "\n";
    } else {
        out << kCsvHeader;
        for (std::size_t i = 0; i < rows; ++i)
            out << csv_row(reports[i], family, lo + int(i), status[i]);
    }
    emit(out_path, out.str());
    return 0;
}

int cmd_verify(const std::string& fixture, bool tamper, const EngineFlags& flags,
               const std::string& out_path) {
    const Config cfg = make_config(flags);
    if (tamper && fixture.find("sequential") == std::string::npos)
        throw qgap::DomainError("--tamper applies to sequential fixtures only");
    auto index_of = [&](const std::string& prefix) {
        int n = 0;
        try {
            n = std::stoi(fixture.substr(prefix.size()));
        } catch (const std::exception&) {
            throw qgap::DomainError("fixture " + fixture + ": bad index");
        }
        if (n < 2) throw qgap::DomainError("fixture " + fixture + ": index must be >= 2");
        return n;
    };
    Certificate cert;
    if (fixture == "chsh") {
        cert = certify_chsh(cfg);
    } else if (fixture == "s3-tensor") {
        cert = certify_s3_tensor(cfg);
    } else if (fixture == "t5-tensor") {
        cert = certify_t5_tensor(cfg);
    } else if (fixture.rfind("sn-sequential:", 0) == 0) {
        int n = index_of("sn-sequential:");
        if (tamper) {
            CorrelationOperator op = build_sn(n);
            SequentialModel m = build_sn_sequential(n, cfg);
            inject_noncommuting(op, m);
            SequentialCheck chk = check_sequential_value(op, m, cfg);
            cert.fixture = op.name + ":tampered";
            cert.model_hash = sequential_model_hash(m);
            cert.value = chk.value;
            cert.target = n == 2 ? 2.0 * std::sqrt(2.0) : 2.0 * n;
            cert.commutation_max = chk.commutation_max;
            cert.pass = chk.commutation_ok && std::fabs(cert.value - cert.target) <= 1e-10;
        } else {
            cert = certify_sn_sequential(n, cfg);
        }
    } else if (fixture.rfind("t-sequential:", 0) == 0) {
        int n = index_of("t-sequential:");
        if (tamper) {
            CorrelationOperator op = build_t(n);
            OrthonormalRepresentation rep =
                theta_representation(compatibility_graph(op), cfg.sdp_tol, cfg);
            SequentialModel m = build_t_sequential(n, rep, cfg);
            inject_noncommuting(op, m);
            SequentialCheck chk = check_sequential_value(op, m, cfg);
            cert.fixture = op.name + ":tampered";
            cert.model_hash = sequential_model_hash(m);
            cert.value = chk.value;
            cert.target = 2.0 * n + 1.0;
            cert.commutation_max = chk.commutation_max;
            cert.pass = chk.commutation_ok && std::fabs(cert.value - cert.target) <= 1e-2;
        } else {
            cert = certify_t_sequential(n, cfg);
        }
    } else {
        throw qgap::DomainError(
            "unknown fixture " + fixture +
            " (expected chsh, s3-tensor, t5-tensor, sn-sequential:<n>, t-sequential:<n>)");
    }
    nlohmann::json j = certificate_to_json(cert);
    std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out_path.empty()) write_file(out_path, text);
    return cert.pass ? 0 : 1;
}

int cmd_theta(const std::string& target, const std::string& graph_in, const EngineFlags& flags,
              const std::string& out_path, const std::string& graph_out,
              const std::string& rep_out) {
    const Config cfg = make_config(flags);
    CompatibilityGraph g;
    std::string id;
    if (!graph_in.empty()) {
        g = parse_graph(read_file(graph_in));
        id = graph_in;
    } else if (!target.empty()) {
        Target t = parse_target(target);
        g = compatibility_graph(t.op);
        id = t.op.name;
    } else {
        throw qgap::DomainError("theta needs a target or --graph-in");
    }
    ThetaResult th = lovasz_theta_full(g, sdp_tol_of(flags), cfg);
    if (!graph_out.empty()) write_file(graph_out, serialize_graph(g));
    if (!rep_out.empty()) {
        OrthonormalRepresentation rep = recover_representation(g, th.solution, cfg);
        write_file(rep_out, serialize_representation(rep));
    }
    nlohmann::json j{{"graph", id},
                     {"vertices", g.vertices.size()},
                     {"edges", g.edges.size()},
                     {"value", th.value},
                     {"error_bar", th.error_bar}};
    emit(out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_classical(const std::string& target, const EngineFlags& flags,
                  const std::string& out_path, const std::string& witness_out) {
    Target t = parse_target(target);
    const Config cfg = make_config(flags);
    ClassicalResult c = classical_max(t.op, cfg);
    nlohmann::json w = nlohmann::json::array();
    for (const auto& [f, v] : c.witness) w.push_back({f.party, f.setting, v});
    nlohmann::json j{{"operator_id", t.op.name},
                     {"value", c.value},
                     {"integer_arithmetic", c.integer_arithmetic},
                     {"enumerated", c.enumerated},
                     {"witness", w}};
    emit(out_path, j.dump(2) + "\n");
    if (!witness_out.empty())
        write_file(witness_out, nlohmann::json{{"operator_id", t.op.name}, {"witness", w}}.dump(2) + "\n");
    return 0;
}

int cmd_npa(const std::string& target, const EngineFlags& flags, const std::string& out_path,
            const std::string& dump_path, const std::string& basis_out) {
    Target t = parse_target(target);
    const Config cfg = make_config(flags);
    if (!dump_path.empty()) write_file(dump_path, dump_sdp(build_relaxation(t.op, flags.level)));
    if (!basis_out.empty()) write_file(basis_out, basis_sidecar(npa_basis(t.op, flags.level)));
    NpaResult nr = npa_upper_bound(t.op, flags.level, sdp_tol_of(flags),
                                   Config::defaults().sdp_max_iters, flags.seed, cfg);
    nlohmann::json j{{"operator_id", t.op.name}, {"value", nr.value},
                     {"error_bar", nr.error_bar}, {"level", nr.level},
                     {"basis_size", nr.basis_size}, {"iterations", nr.iterations},
                     {"status", nr.sdp_status}};
    emit(out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_seesaw(const std::string& target, const EngineFlags& flags, const std::string& out_path,
               const std::string& model_out) {
    Target t = parse_target(target);
    const Config cfg = make_config(flags);
    SeesawReport s =
        seesaw(t.op, flags.local_dim, flags.restarts, flags.seed, seesaw_tol_of(flags), cfg);
    if (!model_out.empty()) write_file(model_out, serialize_model(s.model));
    nlohmann::json j{{"operator_id", t.op.name}, {"value", s.value},
                     {"local_dim", flags.local_dim}, {"restarts", flags.restarts},
                     {"restarts_used", s.restarts_used}, {"seed", flags.seed},
                     {"iterations", s.iterations}, {"converged", s.converged}};
    emit(out_path, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classical, tensor, and sequential bounds for correlation operators"};
    app.require_subcommand(1);

    EngineFlags flags;
    std::string target, out_path, format = "report";
    int exit_code = 0;

    auto add_engine_flags = [&](CLI::App* c, bool with_level, bool with_seesaw) {
        if (with_level) c->add_option("--level", flags.level, "moment relaxation level");
        if (with_seesaw) {
            c->add_option("--local-dim", flags.local_dim, "local Hilbert space dimension");
            c->add_option("--restarts", flags.restarts, "random restarts");
        }
        c->add_option("--seed", flags.seed, "random seed");
        c->add_option("--tol", flags.tol, "tolerance (tightens module defaults)");
        c->add_option("--budget", flags.budget, "enumeration budget");
        c->add_option("--out", out_path, "write output to this path");
    };

    // bounds
    EngineSelection req;
    bool all_flag = false;
    auto* b = app.add_subcommand("bounds", "run engines and emit a bound report");
    b->add_option("target", target, "sn:<n>, t:<n>, or operator file")->required();
    b->add_flag("--all", all_flag, "run the full engine set for the family");
    b->add_flag("--classical", req.classical, "exact classical bound");
    b->add_flag("--seesaw", req.seesaw, "tensor lower bound");
    b->add_flag("--npa", req.npa, "tensor upper bound");
    b->add_flag("--theta", req.theta, "graph bound");
    b->add_flag("--sequential", req.sequential, "sequential construction value");
    add_engine_flags(b, true, true);
    b->add_option("--format", format, "report or csv")
        ->check(CLI::IsMember({"report", "csv"}));
    b->callback([&]() { exit_code = cmd_bounds(target, req, all_flag, flags, out_path, format); });

    // verify
    bool tamper = false;
    auto* v = app.add_subcommand("verify", "run a certificate fixture");
    v->add_option("fixture", target,
                  "chsh, s3-tensor, t5-tensor, sn-sequential:<n>, t-sequential:<n>")
        ->required();
    v->add_flag("--tamper", tamper, "inject a non-commuting observable first");
    add_engine_flags(v, false, false);
    v->callback([&]() { exit_code = cmd_verify(target, tamper, flags, out_path); });

    // sweep
    std::string family, range, sweep_format = "csv";
    bool sweep_npa = false, sweep_theta = false;
    auto* w = app.add_subcommand("sweep", "tabulate bounds over a family range");
    w->add_option("family", family, "sn or t")->required();
    w->add_option("range", range, "a..b")->required();
    w->add_flag("--npa", sweep_npa, "include the moment relaxation per row");
    w->add_flag("--theta", sweep_theta, "include the graph bound per row");
    add_engine_flags(w, true, true);
    w->add_option("--format", sweep_format, "csv or report")
        ->check(CLI::IsMember({"report", "csv"}));
    w->callback([&]() {
        exit_code = cmd_sweep(family, range, sweep_npa, sweep_theta, flags, out_path, sweep_format);
    });

    // theta
    std::string graph_in, graph_out, rep_out;
    auto* th = app.add_subcommand("theta", "Lovasz number of a compatibility graph");
    th->add_option("target", target, "sn:<n>, t:<n>, or operator file");
    th->add_option("--graph-in", graph_in, "read the graph from this file instead");
    th->add_option("--graph-out", graph_out, "export the graph");
    th->add_option("--rep-out", rep_out, "export the orthonormal representation");
    add_engine_flags(th, false, false);
    th->callback(
        [&]() { exit_code = cmd_theta(target, graph_in, flags, out_path, graph_out, rep_out); });

    // classical
    std::string witness_out;
    auto* cl = app.add_subcommand("classical", "exact classical bound");
    cl->add_option("target", target, "sn:<n>, t:<n>, or operator file")->required();
    cl->add_option("--witness-out", witness_out, "export the optimal assignment");
    add_engine_flags(cl, false, false);
    cl->callback([&]() { exit_code = cmd_classical(target, flags, out_path, witness_out); });

    // npa
    std::string dump_path, basis_out;
    auto* np = app.add_subcommand("npa", "tensor upper bound via moment relaxation");
    np->add_option("target", target, "sn:<n>, t:<n>, or operator file")->required();
    np->add_option("--dump", dump_path, "export the relaxation in solver text form");
    np->add_option("--basis-out", basis_out, "export the monomial basis");
    add_engine_flags(np, true, false);
    np->callback([&]() { exit_code = cmd_npa(target, flags, out_path, dump_path, basis_out); });

    // seesaw
    std::string model_out;
    auto* se = app.add_subcommand("seesaw", "tensor lower bound via alternating optimization");
    se->add_option("target", target, "sn:<n>, t:<n>, or operator file")->required();
    se->add_option("--model-out", model_out, "export the best model found");
    add_engine_flags(se, false, true);
    se->callback([&]() { exit_code = cmd_seesaw(target, flags, out_path, model_out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const qgap::ResourceError& e) {
        std::cerr << "resource: " << e.what() << "\n";
        return 3;
    } catch (const qgap::ParseError& e) {
        std::cerr << "input: " << e.what() << "\n";
        return 2;
    } catch (const qgap::DomainError& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
