#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "nbspec/consistency.hpp"
#include "nbspec/parser.hpp"

using namespace nbspec;

static std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

static SpecModel model_from(const std::string& text) {
    auto p = parse_spec_text(text, "t");
    REQUIRE_FALSE(has_errors(p.diags));
    auto r = resolve(p.decls);
    REQUIRE(r.model.has_value());
    return *r.model;
}

static SpecModel corpus_model(const char* name) {
    return model_from(slurp(std::string(NBSPEC_CORPUS_DIR) + "/" + name));
}

static ast::ScenarioDecl scenario_from(const std::string& text) {
    auto p = parse_scenario_text(text, "t");
    REQUIRE_FALSE(has_errors(p.diags));
    return *p.scenario;
}

static ast::ScenarioDecl corpus_scenario(const char* name) {
    return scenario_from(slurp(std::string(NBSPEC_CORPUS_DIR) + "/" + name));
}

static ConsistencyReport run_check(const SpecModel& m, const ast::ScenarioDecl& s) {
    return check_scenario(m, infer(m, instantiate_scenario(m, s)), s);
}

static const Finding* find_kind(const ConsistencyReport& r, FindingKind k) {
    for (const auto& f : r.findings)
        if (f.kind == k) return &f;
    return nullptr;
}

TEST_CASE("scenario A under v1 is consistent") {
    auto report = run_check(corpus_model("corpus_v1.nspec"), corpus_scenario("scenario_a.nscen"));
    CHECK(report.verdict == Verdict::Consistent);
    CHECK(find_kind(report, FindingKind::ExpectationMismatch) == nullptr);
}

TEST_CASE("scenario B under v1 reports an expectation mismatch") {
    auto report = run_check(corpus_model("corpus_v1.nspec"), corpus_scenario("scenario_b.nscen"));
    CHECK(report.verdict == Verdict::Inconsistent);
    const auto* f = find_kind(report, FindingKind::ExpectationMismatch);
    REQUIRE(f != nullptr);
    CHECK(f->severity == Severity::Error);
    CHECK(f->message.find("KeepLane_Stop") != std::string::npos);
    CHECK(f->message.find("KeepLane_FollowDesiredSpeed") != std::string::npos);
}

TEST_CASE("both scenarios are consistent under v2") {
    auto m = corpus_model("corpus_v2.nspec");
    CHECK(run_check(m, corpus_scenario("scenario_a.nscen")).verdict == Verdict::Consistent);
    CHECK(run_check(m, corpus_scenario("scenario_b.nscen")).verdict == Verdict::Consistent);
}

TEST_CASE("conflicting maneuvers inside a declared group are an error") {
    auto m = model_from(
        "class C : L4_MovableObject\n"
        "zone Z\n"
        "maneuver Stop lateral = keep_lane longitudinal = stop\n"
        "maneuver Go lateral = keep_lane longitudinal = start\n"
        "conflict { Stop, Go }\n"
        "rule R1 : C(?x), in_zone(?x, Z) => maneuver(Stop)\n"
        "rule R2 : C(?x), in_zone(?x, Z) => maneuver(Go)\n");
    auto s = scenario_from("scenario S { entity a : C in Z }");
    auto report = run_check(m, s);
    const auto* f = find_kind(report, FindingKind::ConflictingManeuvers);
    REQUIRE(f != nullptr);
    CHECK(f->severity == Severity::Error);
    CHECK(f->ids == std::vector<std::string>{"Go", "Stop"});
    CHECK(report.verdict == Verdict::Inconsistent);
}

TEST_CASE("both maneuvers without a conflict group is not an error") {
    auto m = model_from(
        "class C : L4_MovableObject\n"
        "zone Z\n"
        "maneuver Stop lateral = keep_lane longitudinal = stop\n"
        "maneuver Go lateral = keep_lane longitudinal = start\n"
        "rule R1 : C(?x), in_zone(?x, Z) => maneuver(Stop)\n"
        "rule R2 : C(?x), in_zone(?x, Z) => maneuver(Go)\n");
    auto report = run_check(m, scenario_from("scenario S { entity a : C in Z }"));
    CHECK(find_kind(report, FindingKind::ConflictingManeuvers) == nullptr);
    CHECK(report.verdict == Verdict::Consistent);
}

TEST_CASE("a mission with no inferred maneuver is an error") {
    auto m = model_from(
        "class C : L4_MovableObject\n"
        "zone Z\n"
        "mission Go\n"
        "maneuver Stop lateral = keep_lane longitudinal = stop\n"
        "rule R : applies(F) => maneuver(Stop)\n"
        "fact F kind = capturing\n");
    auto report = run_check(m, scenario_from("scenario S { ego C mission Go in Z }"));
    const auto* f = find_kind(report, FindingKind::NoManeuverInferred);
    REQUIRE(f != nullptr);
    CHECK(f->severity == Severity::Error);
    CHECK(report.verdict == Verdict::Inconsistent);
}

TEST_CASE("no mission means no no-maneuver finding") {
    auto m = model_from(
        "class C : L4_MovableObject\n"
        "zone Z\n"
        "maneuver Stop lateral = keep_lane longitudinal = stop\n"
        "fact F kind = capturing\n"
        "rule R : applies(F) => maneuver(Stop)\n");
    auto report = run_check(m, scenario_from("scenario S { entity a : C in Z }"));
    CHECK(find_kind(report, FindingKind::NoManeuverInferred) == nullptr);
}

TEST_CASE("expectation checking is exact set equality in both directions") {
    auto m = model_from(
        "class C : L4_MovableObject\n"
        "zone Z\n"
        "maneuver Stop lateral = keep_lane longitudinal = stop\n"
        "maneuver Go lateral = keep_lane longitudinal = start\n"
        "rule R : C(?x), in_zone(?x, Z) => maneuver(Stop)\n");
    // Superset expected: Go is missing from the derived set.
    auto over = run_check(
        m, scenario_from("scenario S { entity a : C in Z expect maneuvers = { Stop, Go } }"));
    CHECK(find_kind(over, FindingKind::ExpectationMismatch) != nullptr);
    // Subset expected: Stop was derived but not expected.
    auto under =
        run_check(m, scenario_from("scenario S { entity a : C in Z expect maneuvers = { } }"));
    CHECK(find_kind(under, FindingKind::ExpectationMismatch) != nullptr);
    // Exact match passes.
    auto exact = run_check(
        m, scenario_from("scenario S { entity a : C in Z expect maneuvers = { Stop } }"));
    CHECK(find_kind(exact, FindingKind::ExpectationMismatch) == nullptr);
}

TEST_CASE("dead rules and underived facts warn per scenario") {
    auto m = corpus_model("corpus_v1.nspec");
    auto report = run_check(m, corpus_scenario("scenario_b.nscen"));
    bool saw_rule = false, saw_fact = false;
    for (const auto& f : report.findings) {
        if (f.kind == FindingKind::RuleNeverFired) {
            saw_rule = true;
            CHECK(f.severity == Severity::Warning);
        }
        if (f.kind == FindingKind::FactNeverDerived) saw_fact = true;
    }
    CHECK(saw_rule);
    CHECK(saw_fact);
}

TEST_CASE("suite check moves dead-rule warnings to the cross-scenario view") {
    auto m = corpus_model("corpus_v1.nspec");
    auto sa = corpus_scenario("scenario_a.nscen");
    auto sb = corpus_scenario("scenario_b.nscen");
    std::vector<std::pair<ast::ScenarioDecl, InferenceResult>> runs;
    runs.emplace_back(sa, infer(m, instantiate_scenario(m, sa)));
    runs.emplace_back(sb, infer(m, instantiate_scenario(m, sb)));
    auto suite = check_suite(m, runs);
    for (const auto& per : suite.per_scenario) {
        CHECK(find_kind(per, FindingKind::RuleNeverFired) == nullptr);
        CHECK(find_kind(per, FindingKind::FactNeverDerived) == nullptr);
    }
    // Every v1 rule fires in A or B, and every inferred fact is derived in A.
    CHECK(suite.cross_scenario.empty());
    // B's expectation mismatch still decides the suite verdict.
    CHECK(suite.verdict == Verdict::Inconsistent);
}

TEST_CASE("finding kind names are stable") {
    CHECK(finding_kind_name(FindingKind::ConflictingManeuvers) == "ConflictingManeuvers");
    CHECK(finding_kind_name(FindingKind::NoManeuverInferred) == "NoManeuverInferred");
    CHECK(finding_kind_name(FindingKind::ExpectationMismatch) == "ExpectationMismatch");
    CHECK(finding_kind_name(FindingKind::RuleNeverFired) == "RuleNeverFired");
    CHECK(finding_kind_name(FindingKind::FactNeverDerived) == "FactNeverDerived");
}
