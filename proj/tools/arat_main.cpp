#include "arat/advf.hpp"
#include "arat/config.hpp"
#include "arat/parser.hpp"
#include "arat/rfi.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace arat;

namespace {

struct CliError {
    std::string code;
    std::string message;
};

[[noreturn]] void fail(const std::string& code, const std::string& msg) {
    throw CliError{code, msg};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("E_IO", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) fail("E_IO", "read failed on " + path);
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("E_IO", "cannot create " + path);
    out << text;
    out.flush();
    if (!out) fail("E_IO", "write failed on " + path);
}

std::string stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

Program load_program(const std::string& path) {
    std::string text = slurp(path);
    Program p;
    try {
        p = parse_program(text);
    } catch (const ParseError& e) {
        fail("E_PARSE", path + ": " + e.what());
    }
    std::vector<Diagnostic> diags = validate(p);
    if (!diags.empty()) {
        std::ostringstream ss;
        ss << path << ": " << diags.size() << " diagnostic(s); first: " << diags[0].code << " at line "
           << diags[0].line << ": " << diags[0].message;
        fail("E_VALIDATE", ss.str());
    }
    return p;
}

Bindings load_bindings(const Program& p, const std::string& inputs_path) {
    Bindings b = default_bindings(p);
    if (inputs_path.empty()) return b;
    std::string text = slurp(inputs_path);
    try {
        for (auto& [name, vals] : parse_inputs(text, p)) b[name] = std::move(vals);
    } catch (const std::exception& e) {
        fail("E_PARSE", inputs_path + ": " + std::string(e.what()));
    }
    return b;
}

Trace load_trace(const std::string& path, const Program& p) {
    std::string text = slurp(path);
    if (text.rfind("ARAT-TRACE", 0) != 0)
        fail("E_VERSION", path + ": not a trace file");
    std::string head = text.substr(0, text.find('\n'));
    if (head.find(" v1 ") == std::string::npos)
        fail("E_VERSION", path + ": unsupported trace version: " + head);
    Trace t;
    try {
        std::istringstream in(text);
        t = read_trace(in);
    } catch (const std::exception& e) {
        fail("E_IO", path + ": " + std::string(e.what()));
    }
    if (t.program_hash != program_hash(p))
        fail("E_VERSION", path + ": trace was recorded from a different program");
    resolve_object_refs(t, p);
    return t;
}

// analysis settings shared by analyze, finalize, inject and rfi. a --config
// file is applied first, explicit flags override it.
struct CfgFlags {
    std::string config_path;
    std::uint32_t k = 10;
    std::string pattern;
    std::string accept;
    std::uint32_t jobs = 1;
    std::uint64_t seed = 1;
    bool no_deduce = false;
    bool verify_deduction = false;
    std::uint64_t step_limit = 10'000'000;

    CLI::Option* k_opt = nullptr;
    CLI::Option* pattern_opt = nullptr;
    CLI::Option* accept_opt = nullptr;
    CLI::Option* jobs_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* step_opt = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "analysis config file (flat key value lines)");
        k_opt = cmd->add_option("-k", k, "propagation step budget (1..50)");
        pattern_opt = cmd->add_option("--pattern", pattern, "fault pattern: single | multi:<w>");
        accept_opt =
            cmd->add_option("--accept", accept, "acceptance: exact | rel:<eps>[:names] | conv:<name>:<tau>");
        jobs_opt = cmd->add_option("--jobs", jobs, "parallel injection workers");
        seed_opt = cmd->add_option("--seed", seed, "campaign seed");
        cmd->add_flag("--no-deduce", no_deduce, "disable higher-order-bit deduction");
        cmd->add_flag("--verify-deduction", verify_deduction,
                      "re-execute every 10th inferred point and report contradictions");
        step_opt = cmd->add_option("--step-limit", step_limit, "interpreter step limit");
    }

    AnalysisConfig build() const {
        AnalysisConfig cfg;
        if (!config_path.empty()) {
            std::string text = slurp(config_path);
            try {
                cfg = parse_config(text);
            } catch (const std::exception& e) {
                fail("E_PARSE", config_path + ": " + std::string(e.what()));
            }
        }
        try {
            if (k_opt->count()) cfg.k = k;
            if (pattern_opt->count()) apply_config_line(cfg, "pattern " + pattern, 0);
            if (accept_opt->count()) cfg.accept = AcceptanceSpec::parse(accept);
            if (jobs_opt->count()) cfg.jobs = jobs;
            if (seed_opt->count()) cfg.seed = seed;
            if (step_opt->count()) cfg.step_limit = step_limit;
        } catch (const std::exception& e) {
            fail("E_ARGS", e.what());
        }
        if (no_deduce) cfg.deduce = false;
        if (verify_deduction) cfg.verify_deduction = true;
        if (cfg.k < 1 || cfg.k > 50) fail("E_ARGS", "k out of range 1..50");
        return cfg;
    }
};

int cmd_trace(const std::string& program_path, const std::string& inputs_path, std::string out_path,
              bool binary, std::uint64_t step_limit) {
    Program p = load_program(program_path);
    Bindings in = load_bindings(p, inputs_path);
    if (out_path.empty()) out_path = stem(program_path) + ".trace";

    RunOptions ro;
    ro.record_trace = true;
    ro.step_limit = step_limit;
    RunResult r = run(p, in, ro);
    if (r.outcome.kind != Outcome::Kind::Completed)
        fail("E_RUN", std::string("golden run did not complete: ") +
                          (r.outcome.kind == Outcome::Kind::Crash ? "crash" : "timeout"));
    resolve_object_refs(r.trace, p);

    std::ostringstream ts;
    write_trace(r.trace, ts, binary);
    spill(out_path, ts.str());

    std::ostringstream ms;
    write_object_map(r.trace.objects, ms);
    spill(out_path + ".map", ms.str());

    std::printf("TRACE %s records=%zu dyn=%llu\n", out_path.c_str(), r.trace.records.size(),
                static_cast<unsigned long long>(r.outcome.dynamic_length));
    return 0;
}

void print_advf_line(const ADVFReport& rep) {
    std::printf("ADVF %s %s %s points=%llu flips=%llu\n", rep.kernel.c_str(), rep.object.c_str(),
                rep.advf.to_decimal().c_str(), static_cast<unsigned long long>(rep.points),
                static_cast<unsigned long long>(rep.flips));
}

int cmd_analyze(const std::string& program_path, const std::string& trace_path,
                const std::string& object, const CfgFlags& flags, std::string report_path,
                std::string points_path) {
    Program p = load_program(program_path);
    Bindings in = load_bindings(p, "");
    Trace t = load_trace(trace_path, p);
    AnalysisConfig cfg = flags.build();
    if (t.objects.find(object) < 0) fail("E_ARGS", "unknown data object '" + object + "'");

    AdvfOutput out = compute_advf(p, in, t, object, cfg);
    if (out.pending) {
        if (points_path.empty()) points_path = trace_path + ".points";
        std::ostringstream ss;
        write_points(out.points, ss);
        spill(points_path, ss.str());
        std::printf("PENDING %zu %s\n", out.points.size(), points_path.c_str());
        return 3;
    }
    out.report.kernel = stem(program_path);
    if (report_path.empty()) report_path = trace_path + "." + object + ".report";
    spill(report_path, write_report(out.report));
    print_advf_line(out.report);
    return 0;
}

int cmd_inject(const std::string& program_path, const std::string& points_path,
               const std::string& inputs_path, const CfgFlags& flags, std::string out_path) {
    Program p = load_program(program_path);
    Bindings in = load_bindings(p, inputs_path);
    AnalysisConfig cfg = flags.build();

    std::vector<InjectionPoint> pts;
    try {
        std::istringstream ss(slurp(points_path));
        pts = read_points(ss);
    } catch (const CliError&) {
        throw;
    } catch (const std::exception& e) {
        fail("E_IO", points_path + ": " + std::string(e.what()));
    }

    CampaignOptions opt;
    opt.accept = cfg.accept;
    opt.jobs = cfg.jobs;
    opt.deduce = cfg.deduce;
    opt.verify_deduction = cfg.verify_deduction;
    opt.step_limit = cfg.step_limit;
    CampaignOutput res = run_campaign(p, in, pts, opt);

    if (out_path.empty()) out_path = points_path + ".results";
    std::ostringstream ss;
    write_results(res, ss);
    spill(out_path, ss.str());
    std::printf("RESULTS %s executed=%llu inferred=%llu contradictions=%llu\n", out_path.c_str(),
                static_cast<unsigned long long>(res.executed),
                static_cast<unsigned long long>(res.inferred),
                static_cast<unsigned long long>(res.contradictions));
    return 0;
}

int cmd_finalize(const std::string& program_path, const std::string& trace_path,
                 const std::string& object, const std::string& results_path, const CfgFlags& flags,
                 std::string report_path) {
    Program p = load_program(program_path);
    Bindings in = load_bindings(p, "");
    Trace t = load_trace(trace_path, p);
    AnalysisConfig cfg = flags.build();
    if (t.objects.find(object) < 0) fail("E_ARGS", "unknown data object '" + object + "'");

    CampaignOutput res;
    try {
        std::istringstream ss(slurp(results_path));
        res = read_results(ss);
    } catch (const CliError&) {
        throw;
    } catch (const std::exception& e) {
        fail("E_IO", results_path + ": " + std::string(e.what()));
    }

    AdvfOutput out = compute_advf(p, in, t, object, cfg, &res);
    if (out.pending)
        fail("E_RESULTS", results_path + " does not cover " + std::to_string(out.points.size()) +
                              " escalated point(s)");
    out.report.kernel = stem(program_path);
    if (report_path.empty()) report_path = trace_path + "." + object + ".report";
    spill(report_path, write_report(out.report));
    print_advf_line(out.report);
    return 0;
}

int cmd_rfi(const std::string& program_path, const std::string& inputs_path,
            const std::string& object, std::uint64_t n, bool without_replacement,
            const CfgFlags& flags) {
    Program p = load_program(program_path);
    Bindings in = load_bindings(p, inputs_path);
    AnalysisConfig cfg = flags.build();
    RfiResult r;
    try {
        r = rfi_campaign(p, in, object, n, cfg.seed, cfg, without_replacement);
    } catch (const std::exception& e) {
        fail("E_RUN", e.what());
    }
    std::printf("RFI %s %s n=%llu hits=%llu space=%llu rate=%.12g margin=%.12g seed=%llu\n",
                stem(program_path).c_str(), object.c_str(), static_cast<unsigned long long>(r.n),
                static_cast<unsigned long long>(r.hits), static_cast<unsigned long long>(r.space),
                r.success_rate, r.margin, static_cast<unsigned long long>(r.seed));
    return 0;
}

int cmd_report(const std::vector<std::string>& files, bool csv, const std::string& out_path) {
    std::vector<ADVFReport> reports;
    for (const std::string& f : files) {
        try {
            std::istringstream ss(slurp(f));
            reports.push_back(read_report(ss));
        } catch (const CliError&) {
            throw;
        } catch (const std::exception& e) {
            fail("E_IO", f + ": " + std::string(e.what()));
        }
    }
    std::string rendered = csv ? merge_reports_csv(reports) : merge_reports_text(reports);
    if (out_path.empty())
        std::fputs(rendered.c_str(), stdout);
    else
        spill(out_path, rendered);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"data-object fault resilience analysis"};
    app.require_subcommand(1);

    // trace
    auto* tr = app.add_subcommand("trace", "run a program and record its dynamic trace");
    std::string tr_program, tr_inputs, tr_out;
    bool tr_binary = false;
    std::uint64_t tr_steps = 10'000'000;
    tr->add_option("program", tr_program, "program file")->required();
    tr->add_option("--inputs", tr_inputs, "input bindings file");
    tr->add_option("-o", tr_out, "trace output path (default <program-stem>.trace)");
    tr->add_flag("--binary", tr_binary, "length-prefixed binary framing");
    tr->add_option("--step-limit", tr_steps, "interpreter step limit");

    // analyze
    auto* an = app.add_subcommand("analyze", "compute aDVF from a trace, or emit pending injection points");
    std::string an_program, an_trace, an_object, an_out, an_points;
    CfgFlags an_flags;
    an->add_option("program", an_program, "program file")->required();
    an->add_option("trace", an_trace, "trace file")->required();
    an->add_option("--object", an_object, "target data object")->required();
    an->add_option("-o", an_out, "report output path (default <trace>.<object>.report)");
    an->add_option("--points-out", an_points, "pending points path (default <trace>.points)");
    an_flags.attach(an);

    // inject
    auto* ij = app.add_subcommand("inject", "execute an injection campaign over a points file");
    std::string ij_program, ij_points, ij_inputs, ij_out;
    CfgFlags ij_flags;
    ij->add_option("program", ij_program, "program file")->required();
    ij->add_option("points", ij_points, "injection points file")->required();
    ij->add_option("--inputs", ij_inputs, "input bindings file");
    ij->add_option("-o", ij_out, "results output path (default <points>.results)");
    ij_flags.attach(ij);

    // finalize
    auto* fi = app.add_subcommand("finalize", "merge injection results into the final report");
    std::string fi_program, fi_trace, fi_object, fi_results, fi_out;
    CfgFlags fi_flags;
    fi->add_option("program", fi_program, "program file")->required();
    fi->add_option("trace", fi_trace, "trace file")->required();
    fi->add_option("--object", fi_object, "target data object")->required();
    fi->add_option("--results", fi_results, "injection results file")->required();
    fi->add_option("-o", fi_out, "report output path (default <trace>.<object>.report)");
    fi_flags.attach(fi);

    // rfi
    auto* rf = app.add_subcommand("rfi", "random fault injection baseline over one data object");
    std::string rf_program, rf_inputs, rf_object;
    std::uint64_t rf_n = 1000;
    bool rf_wo = false;
    CfgFlags rf_flags;
    rf->add_option("program", rf_program, "program file")->required();
    rf->add_option("--inputs", rf_inputs, "input bindings file");
    rf->add_option("--object", rf_object, "target data object")->required();
    rf->add_option("-n", rf_n, "number of injections");
    rf->add_flag("--without-replacement", rf_wo, "sample flips without replacement");
    rf_flags.attach(rf);

    // report
    auto* rp = app.add_subcommand("report", "render one or more reports as a comparison");
    std::vector<std::string> rp_files;
    bool rp_csv = false;
    std::string rp_out;
    rp->add_option("reports", rp_files, "report files")->required();
    rp->add_flag("--csv", rp_csv, "csv output");
    rp->add_option("-o", rp_out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "ERR E_ARGS %s\n", e.what());
        return 2;
    }

    try {
        if (tr->parsed()) return cmd_trace(tr_program, tr_inputs, tr_out, tr_binary, tr_steps);
        if (an->parsed()) return cmd_analyze(an_program, an_trace, an_object, an_flags, an_out, an_points);
        if (ij->parsed()) return cmd_inject(ij_program, ij_points, ij_inputs, ij_flags, ij_out);
        if (fi->parsed())
            return cmd_finalize(fi_program, fi_trace, fi_object, fi_results, fi_flags, fi_out);
        if (rf->parsed()) return cmd_rfi(rf_program, rf_inputs, rf_object, rf_n, rf_wo, rf_flags);
        if (rp->parsed()) return cmd_report(rp_files, rp_csv, rp_out);
    } catch (const CliError& e) {
        std::fprintf(stderr, "ERR %s %s\n", e.code.c_str(), e.message.c_str());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "ERR E_RUN %s\n", e.what());
        return 2;
    }
    return 0;
}
