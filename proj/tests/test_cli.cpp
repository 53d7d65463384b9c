#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

const std::string kCli = NBSPEC_CLI_PATH;
const std::string kCorpus = NBSPEC_CORPUS_DIR;

struct RunResult {
    int exit_code = -1;
    std::string out;  // stdout + stderr
};

RunResult run(const std::string& args) {
    std::string tmp = std::string("/tmp/nbspec_cli_test_out.txt");
    std::string cmd = kCli + " " + args + " > " + tmp + " 2>&1";
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(tmp);
    std::ostringstream buf;
    buf << in.rdbuf();
    r.out = buf.str();
    return r;
}

std::string corpus(const std::string& name) { return kCorpus + "/" + name; }

std::string write_temp(const std::string& name, const std::string& text) {
    std::string path = "/tmp/" + name;
    std::ofstream out(path);
    out << text;
    return path;
}

}  // namespace

TEST_CASE("version prints a version line and exits 0") {
    auto r = run("version");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("nbspec ", 0) == 0);
}

TEST_CASE("infer lists the stop maneuver for scenario A under v1") {
    auto r = run("infer " + corpus("corpus_v1.nspec") + " " + corpus("scenario_a.nscen"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("maneuver KeepLane_Stop") != std::string::npos);
    CHECK(r.out.find("KeepLane_FollowDesiredSpeed") == std::string::npos);
}

TEST_CASE("infer lists follow-desired-speed for scenario B under v1") {
    auto r = run("infer " + corpus("corpus_v1.nspec") + " " + corpus("scenario_b.nscen"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("maneuver KeepLane_FollowDesiredSpeed") != std::string::npos);
}

TEST_CASE("check exits 1 with an expectation mismatch for B under v1") {
    auto r = run("check " + corpus("corpus_v1.nspec") + " " + corpus("scenario_b.nscen"));
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("ExpectationMismatch") != std::string::npos);
    CHECK(r.out.find("verdict: inconsistent") != std::string::npos);
}

TEST_CASE("check exits 0 for both scenarios under v2") {
    auto r = run("check " + corpus("corpus_v2.nspec") + " " + corpus("scenario_a.nscen") + " " +
                 corpus("scenario_b.nscen"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("verdict: consistent") != std::string::npos);
}

TEST_CASE("parse errors exit 2 and report file, line and column") {
    std::string bad = write_temp("bad_syntax.nspec", "rule R : => garbage\n");
    auto r = run("check " + bad);
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("bad_syntax.nspec:1:") != std::string::npos);
}

TEST_CASE("unknown identifiers exit 1 with resolution diagnostics") {
    std::string bad = write_temp("bad_ref.nspec", "rule R : applies(NoSuchFact) => maneuver(M)\n"
                                                  "maneuver M lateral = keep_lane longitudinal = stop\n");
    auto r = run("check " + bad);
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("unknown-identifier") != std::string::npos);
}

TEST_CASE("missing input file exits 2") {
    auto r = run("check /nonexistent/nope.nspec");
    CHECK(r.exit_code == 2);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run("").exit_code == 2);
    CHECK(run("frobnicate x").exit_code == 2);
    CHECK(run("check").exit_code == 2);
}

TEST_CASE("trace prints the derivation and both statute sources") {
    auto r = run("trace " + corpus("corpus_v1.nspec") + " " + corpus("scenario_a.nscen") +
                 " KeepLane_Stop");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("Rule4") != std::string::npos);
    CHECK(r.out.find("StVO_26") != std::string::npos);
    CHECK(r.out.find("VwV_StVO_26") != std::string::npos);
    CHECK(r.out.find("CrossingIntentionFromPosition") != std::string::npos);
}

TEST_CASE("trace on an underived maneuver exits 1") {
    auto r = run("trace " + corpus("corpus_v1.nspec") + " " + corpus("scenario_b.nscen") +
                 " KeepLane_Stop");
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("target-not-derived") != std::string::npos);
}

TEST_CASE("trace --max-trees 2 prints two derivations on a duplicate-head fixture") {
    std::string spec = write_temp(
        "dup_head.nspec",
        "fact A kind = capturing\n"
        "fact B kind = capturing\n"
        "maneuver Stop lateral = keep_lane longitudinal = stop\n"
        "rule Ra : applies(A) => maneuver(Stop)\n"
        "rule Rb : applies(B) => maneuver(Stop)\n");
    std::string scen = write_temp("dup_head.nscen",
                                  "scenario S {\n"
                                  "  assert applies(A)\n"
                                  "  assert applies(B)\n"
                                  "}\n");
    auto r = run("trace --max-trees 2 " + spec + " " + scen + " Stop");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("derivation 1:") != std::string::npos);
    CHECK(r.out.find("derivation 2:") != std::string::npos);
}

TEST_CASE("export writes deterministic bytes regardless of file order") {
    std::string out1 = "/tmp/nbspec_dot_1.dot";
    std::string out2 = "/tmp/nbspec_dot_2.dot";
    auto r1 = run("export --format dot " + corpus("corpus_v2.nspec") + " " +
                  corpus("scenario_a.nscen") + " " + corpus("scenario_b.nscen") + " --out " + out1);
    auto r2 = run("export --format dot " + corpus("scenario_b.nscen") + " " +
                  corpus("scenario_a.nscen") + " " + corpus("corpus_v2.nspec") + " --out " + out2);
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);
    std::ifstream a(out1), b(out2);
    std::ostringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().find("digraph causal_behavior") != std::string::npos);
}

TEST_CASE("export seq and doc formats succeed on scenario A") {
    auto seq = run("export --format seq " + corpus("corpus_v1.nspec") + " " +
                   corpus("scenario_a.nscen"));
    CHECK(seq.exit_code == 0);
    CHECK(seq.out.find("s293 -> ego : Sign293_captured") != std::string::npos);
    auto doc = run("export --format doc " + corpus("corpus_v1.nspec") + " " +
                   corpus("scenario_a.nscen"));
    CHECK(doc.exit_code == 0);
    CHECK(doc.out.find("\"scenario\"") != std::string::npos);
}

TEST_CASE("strict traceability flag turns a missing source link into a failure") {
    std::string spec = write_temp("no_source.nspec", "fact F kind = capturing\n");
    CHECK(run("check " + spec).exit_code == 0);
    auto strict = run("check --strict-traceability " + spec);
    CHECK(strict.exit_code == 1);
    CHECK(strict.out.find("missing-source-link") != std::string::npos);
}

TEST_CASE("--no-subclass-match disables taxonomy matching") {
    std::string spec = write_temp(
        "subclass.nspec",
        "class Base : L4_MovableObject\n"
        "class Derived : Base\n"
        "zone Z\n"
        "fact Seen kind = capturing\n"
        "mission Go\n"
        "rule R : Base(?x), in_zone(?x, Z) => applies(Seen)\n");
    std::string scen = write_temp("subclass.nscen", "scenario S { entity d : Derived in Z }\n");
    auto with = run("infer " + spec + " " + scen);
    CHECK(with.out.find("fact Seen") != std::string::npos);
    auto without = run("infer --no-subclass-match " + spec + " " + scen);
    CHECK(without.out.find("fact Seen") == std::string::npos);
}

TEST_CASE("fmt emits the canonical form and is idempotent") {
    std::string messy = write_temp("messy.nspec",
                                   "rule   R :applies( A ),applies(B)=>maneuver( M )\n"
                                   "fact A kind = capturing\nfact B kind = capturing\n"
                                   "maneuver M lateral = keep_lane longitudinal = stop\n");
    auto once = run("fmt " + messy);
    CHECK(once.exit_code == 0);
    std::string formatted = write_temp("messy_fmt.nspec", once.out);
    auto twice = run("fmt " + formatted);
    CHECK(twice.out == once.out);
}
