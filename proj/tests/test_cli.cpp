#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int status = -1;
    std::string out;
    std::string err;
};

const char* kKernelDir = ARAT_KERNEL_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch() {
    static fs::path dir = [] {
        fs::path d = fs::current_path() / "cli_scratch";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

CliResult run_cli(const std::string& args) {
    const char* bin = std::getenv("ARAT_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "ARAT_BIN must point at the cli binary");
    fs::path outf = scratch() / "stdout.txt";
    fs::path errf = scratch() / "stderr.txt";
    std::string cmd = std::string(bin) + " " + args + " >" + outf.string() + " 2>" +
                      errf.string();
    int rc = std::system(cmd.c_str());
    CliResult r;
    r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(outf);
    r.err = slurp(errf);
    return r;
}

std::string kpath(const char* kernel_file) { return std::string(kKernelDir) + "/" + kernel_file; }

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("a kernel with no escalations walks trace then analyze at exit zero") {
    fs::path tr = scratch() / "chain_k.trace";
    CliResult t = run_cli("trace " + kpath("chain_k.arat-ir") + " -o " + tr.string());
    REQUIRE(t.status == 0);
    CHECK(contains(t.out, "TRACE "));
    CHECK(contains(t.out, "dyn=77"));
    CHECK(fs::exists(tr));
    // the trace ships with an object map sidecar matching the kernel's own
    CHECK(slurp(tr.string() + ".map") == slurp(kpath("chain_k.map")));

    CliResult a = run_cli("analyze " + kpath("chain_k.arat-ir") + " " + tr.string() +
                          " --object src --config " + kpath("chain_k.config"));
    REQUIRE(a.status == 0);
    CHECK(contains(a.out, "ADVF chain_k src 1 points=16 flips=1024"));
    fs::path report = tr;
    report += ".src.report";
    CHECK(slurp(report).rfind("ARAT-REPORT v1\n", 0) == 0);
}

TEST_CASE("escalations surface as exit three, then inject and finalize close the loop") {
    fs::path tr = scratch() / "l2norm.trace";
    REQUIRE(run_cli("trace " + kpath("l2norm.arat-ir") + " -o " + tr.string()).status == 0);

    std::string common = kpath("l2norm.arat-ir") + " " + tr.string() +
                         " --object sum --config " + kpath("l2norm.config");
    fs::path pts = scratch() / "sum.points";
    CliResult a = run_cli("analyze " + common + " --points-out " + pts.string());
    REQUIRE(a.status == 3);
    CHECK(contains(a.out, "PENDING 894 "));
    REQUIRE(fs::exists(pts));

    fs::path res = scratch() / "sum.results";
    CliResult i = run_cli("inject " + kpath("l2norm.arat-ir") + " " + pts.string() +
                          " --config " + kpath("l2norm.config") + " -o " + res.string());
    REQUIRE(i.status == 0);
    CHECK(contains(i.out, "RESULTS "));
    CHECK(contains(i.out, "executed="));

    fs::path rep = scratch() / "sum.report";
    CliResult f = run_cli("finalize " + common + " --results " + res.string() + " -o " +
                          rep.string());
    REQUIRE(f.status == 0);
    CHECK(contains(f.out, "ADVF l2norm sum 0.622466216216 points=37 flips=2368"));
    CHECK(contains(slurp(rep), "advf 737/1184 0.622466216216"));
}

TEST_CASE("the full pipeline reproduces itself byte for byte") {
    for (const char* tag : {"d1", "d2"}) {
        fs::path dir = scratch() / tag;
        fs::create_directories(dir);
        fs::path tr = dir / "l2.trace";
        REQUIRE(run_cli("trace " + kpath("l2norm.arat-ir") + " -o " + tr.string()).status == 0);
        fs::path pts = dir / "l2.points";
        run_cli("analyze " + kpath("l2norm.arat-ir") + " " + tr.string() +
                " --object sum --config " + kpath("l2norm.config") + " --points-out " +
                pts.string());
        fs::path res = dir / "l2.results";
        run_cli("inject " + kpath("l2norm.arat-ir") + " " + pts.string() + " --config " +
                kpath("l2norm.config") + " -o " + res.string());
        fs::path rep = dir / "l2.report";
        run_cli("finalize " + kpath("l2norm.arat-ir") + " " + tr.string() +
                " --object sum --config " + kpath("l2norm.config") + " --results " +
                res.string() + " -o " + rep.string());
    }
    CHECK(slurp(scratch() / "d1/l2.trace") == slurp(scratch() / "d2/l2.trace"));
    CHECK(slurp(scratch() / "d1/l2.points") == slurp(scratch() / "d2/l2.points"));
    CHECK(slurp(scratch() / "d1/l2.results") == slurp(scratch() / "d2/l2.results"));
    CHECK(slurp(scratch() / "d1/l2.report") == slurp(scratch() / "d2/l2.report"));
    CHECK(!slurp(scratch() / "d1/l2.report").empty());
}

TEST_CASE("parallel injection matches serial results") {
    fs::path pts = scratch() / "sum.points";
    REQUIRE(fs::exists(pts)); // written by the escalation case
    fs::path res4 = scratch() / "sum.jobs4.results";
    CliResult i = run_cli("inject " + kpath("l2norm.arat-ir") + " " + pts.string() +
                          " --config " + kpath("l2norm.config") + " --jobs 4 -o " +
                          res4.string());
    REQUIRE(i.status == 0);
    CHECK(slurp(res4) == slurp(scratch() / "sum.results"));
}

TEST_CASE("truncated results fail finalize with a coverage error") {
    fs::path res = scratch() / "sum.results";
    REQUIRE(fs::exists(res));
    std::string all = slurp(res);
    std::string cut = all.substr(0, all.rfind('\n', all.size() - 2));
    cut += '\n'; // drop the final line
    fs::path part = scratch() / "sum.partial.results";
    std::ofstream(part) << cut;

    CliResult f = run_cli("finalize " + kpath("l2norm.arat-ir") + " " +
                          (scratch() / "l2norm.trace").string() + " --object sum --config " +
                          kpath("l2norm.config") + " --results " + part.string());
    CHECK(f.status == 2);
    CHECK(contains(f.err, "ERR E_RESULTS"));
    CHECK(contains(f.err, "does not cover 1 escalated point"));
}

TEST_CASE("rfi campaigns are seed deterministic") {
    std::string base = "rfi " + kpath("l2norm.arat-ir") + " --object sum -n 40 --config " +
                       kpath("l2norm.config");
    CliResult a = run_cli(base + " --seed 3");
    REQUIRE(a.status == 0);
    CHECK(contains(a.out, "RFI l2norm sum n=40"));
    CHECK(contains(a.out, "space=2368"));
    CHECK(contains(a.out, "seed=3"));
    CliResult b = run_cli(base + " --seed 3");
    CHECK(a.out == b.out);
}

TEST_CASE("report merges rows and rejects duplicates") {
    fs::path chain_rep = scratch() / "chain_k.trace.src.report";
    fs::path sum_rep = scratch() / "sum.report";
    REQUIRE(fs::exists(chain_rep));
    REQUIRE(fs::exists(sum_rep));

    CliResult t = run_cli("report " + chain_rep.string() + " " + sum_rep.string());
    REQUIRE(t.status == 0);
    CHECK(contains(t.out, "kernel"));
    CHECK(contains(t.out, "advf"));
    // kernel names sort: chain_k row precedes l2norm
    CHECK(t.out.find("chain_k") < t.out.find("l2norm"));

    fs::path csvf = scratch() / "merged.csv";
    CliResult c = run_cli("report --csv " + chain_rep.string() + " " + sum_rep.string() +
                          " -o " + csvf.string());
    REQUIRE(c.status == 0);
    std::string csv = slurp(csvf);
    CHECK(csv.rfind("kernel,object,advf,points,flips", 0) == 0);
    CHECK(contains(csv, "l2norm,sum,0.622466216216,37,2368"));

    CliResult dup = run_cli("report " + chain_rep.string() + " " + chain_rep.string());
    CHECK(dup.status == 2);
    CHECK(contains(dup.err, "ERR "));
    CHECK(contains(dup.err, "duplicate"));
}

TEST_CASE("version and argument errors use their stderr codes") {
    // a trace recorded from one program cannot analyze another
    CliResult wrong = run_cli("analyze " + kpath("mmul.arat-ir") + " " +
                              (scratch() / "l2norm.trace").string() + " --object A");
    CHECK(wrong.status == 2);
    CHECK(contains(wrong.err, "ERR E_VERSION"));
    CHECK(contains(wrong.err, "different program"));

    fs::path junk = scratch() / "junk.trace";
    std::ofstream(junk) << "definitely not a trace\n";
    CliResult bad = run_cli("analyze " + kpath("l2norm.arat-ir") + " " + junk.string() +
                            " --object sum");
    CHECK(bad.status == 2);
    CHECK(contains(bad.err, "ERR E_VERSION"));

    CliResult obj = run_cli("analyze " + kpath("l2norm.arat-ir") + " " +
                            (scratch() / "l2norm.trace").string() + " --object nonesuch");
    CHECK(obj.status == 2);
    CHECK(contains(obj.err, "ERR E_ARGS"));

    CliResult krange = run_cli("analyze " + kpath("l2norm.arat-ir") + " " +
                               (scratch() / "l2norm.trace").string() + " --object sum -k 99");
    CHECK(krange.status == 2);
    CHECK(contains(krange.err, "ERR E_ARGS"));

    CliResult flag = run_cli("analyze --definitely-not-a-flag");
    CHECK(flag.status == 2);
    CHECK(contains(flag.err, "ERR E_ARGS"));
}

TEST_CASE("parse and io failures use their stderr codes") {
    fs::path bad_ir = scratch() / "broken.arat-ir";
    std::ofstream(bad_ir) << "alloc sum f64 1\n\nentry:\n  %x = frobnicate f64 1.0\n  ret %x\n";
    CliResult p = run_cli("trace " + bad_ir.string());
    CHECK(p.status == 2);
    CHECK(contains(p.err, "ERR E_PARSE"));

    CliResult missing = run_cli("trace " + (scratch() / "no_such_file.arat-ir").string());
    CHECK(missing.status == 2);
    CHECK(contains(missing.err, "ERR E_IO"));
}
