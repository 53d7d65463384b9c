#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "nbspec/formatter.hpp"
#include "nbspec/parser.hpp"

using namespace nbspec;

static std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Structural round-trip oracle: the canonical form is a fixpoint of
// parse ∘ format, and formatting reads only structure (never spans).
static void check_roundtrip(const std::string& text, const std::string& label) {
    INFO(label);
    auto first = parse_spec_text(text, label);
    REQUIRE_FALSE(has_errors(first.diags));
    std::string canon = format_canonical(first.decls);
    auto second = parse_spec_text(canon, label + "#canon");
    REQUIRE_FALSE(has_errors(second.diags));
    CHECK(format_canonical(second.decls) == canon);
    REQUIRE(second.decls.size() == first.decls.size());
}

TEST_CASE("rule 1 parses into the expected atoms") {
    auto r = parse_spec_text(
        "rule Rule1 sources = [VwV_StVO_26] :\n"
        "  Sign293(?e), in_zone(?e, EgoFront2Straight)\n"
        "  => applies(Sign293_captured)\n");
    REQUIRE(r.diags.empty());
    REQUIRE(r.decls.size() == 1);
    const auto& rule = std::get<ast::RuleDecl>(r.decls[0]);
    CHECK(rule.id == "Rule1");
    CHECK(rule.sources == std::vector<std::string>{"VwV_StVO_26"});
    REQUIRE(rule.body.size() == 2);
    const auto& c = std::get<ast::ClassAtom>(rule.body[0]);
    CHECK(c.class_id == "Sign293");
    CHECK(c.term == ast::Term{true, "e"});
    const auto& z = std::get<ast::InZoneAtom>(rule.body[1]);
    CHECK(z.entity == ast::Term{true, "e"});
    CHECK(z.zone == ast::Term{false, "EgoFront2Straight"});
    CHECK(rule.head.kind == ast::RuleHead::Kind::FactApplies);
    CHECK(rule.head.target_id == "Sign293_captured");
}

TEST_CASE("caret is accepted as conjunction alias") {
    auto comma = parse_spec_text("rule R : applies(A), applies(B) => applies(C)");
    auto caret = parse_spec_text("rule R : applies(A) ^ applies(B) => applies(C)");
    REQUIRE(comma.diags.empty());
    REQUIRE(caret.diags.empty());
    CHECK(format_canonical(comma.decls) == format_canonical(caret.decls));
}

TEST_CASE("empty file parses to no declarations") {
    auto r = parse_spec_text("");
    CHECK(r.diags.empty());
    CHECK(r.decls.empty());
}

TEST_CASE("recovery: two rules with the second malformed") {
    auto r = parse_spec_text(
        "rule Good : applies(A) => applies(B)\n"
        "rule Bad : applies(A) => => nonsense\n");
    CHECK(r.decls.size() == 1);
    REQUIRE(r.diags.size() == 1);
    CHECK(r.diags[0].code == "parse-error");
    CHECK(r.diags[0].span.start_line == 2);
}

TEST_CASE("recovery resumes at the next declaration keyword") {
    auto r = parse_spec_text(
        "zone Z1 neighbors ( oops\n"
        "zone Z2\n"
        "fact F kind = capturing\n");
    CHECK(has_errors(r.diags));
    CHECK(r.decls.size() == 2);  // Z2 and F survive
}

TEST_CASE("head variables must occur in the body") {
    auto r = parse_spec_text("rule R : applies(A) => applies(B)");
    CHECK_FALSE(has_errors(r.diags));
    // Heads are identifiers only in this grammar, so range restriction is
    // enforced syntactically: a '?' in head position is a parse error.
    auto bad = parse_spec_text("rule R : applies(A) => applies(?x)");
    CHECK(has_errors(bad.diags));
}

TEST_CASE("invalid enum words are rejected at parse time") {
    CHECK(has_errors(parse_spec_text("fact F kind = quantum").diags));
    CHECK(has_errors(parse_spec_text("source S kind = blog citation = \"x\"").diags));
    CHECK(has_errors(
        parse_spec_text("maneuver M lateral = diagonal longitudinal = stop").diags));
    CHECK(has_errors(parse_spec_text("class C : L9_Nonsense_Layer {").diags));
}

TEST_CASE("scenario file parses placements, ego, assert, expect") {
    auto r = parse_scenario_text(
        "scenario S {\n"
        "  ego CarWithAgent mission FollowRoad in EgoZone\n"
        "  entity ped1 : Pedestrian in SidewalkRightOfCrossing\n"
        "  assert applies(Sign293_captured)\n"
        "  expect maneuvers = { KeepLane_Stop }\n"
        "}\n");
    REQUIRE(r.diags.empty());
    REQUIRE(r.scenario.has_value());
    CHECK(r.scenario->id == "S");
    CHECK(r.scenario->ego_class == "CarWithAgent");
    CHECK(r.scenario->ego_mission == "FollowRoad");
    CHECK(r.scenario->ego_zone == "EgoZone");
    REQUIRE(r.scenario->placements.size() == 1);
    CHECK(r.scenario->placements[0].entity_id == "ped1");
    CHECK(r.scenario->asserted_facts == std::vector<std::string>{"Sign293_captured"});
    REQUIRE(r.scenario->expected_maneuvers.has_value());
    CHECK(*r.scenario->expected_maneuvers == std::vector<std::string>{"KeepLane_Stop"});
}

TEST_CASE("scenario with zero entities is valid") {
    auto r = parse_scenario_text("scenario Empty { }");
    CHECK(r.diags.empty());
    REQUIRE(r.scenario.has_value());
    CHECK(r.scenario->placements.empty());
}

TEST_CASE("scenario files must contain exactly one scenario") {
    CHECK(has_errors(parse_scenario_text("").diags));
    CHECK(has_errors(
        parse_scenario_text("scenario A { }\nscenario B { }").diags));
}

TEST_CASE("round-trip on the full corpus") {
    for (const char* name : {"corpus_v1.nspec", "corpus_v2.nspec"}) {
        std::string path = std::string(NBSPEC_CORPUS_DIR) + "/" + name;
        check_roundtrip(slurp(path), name);
    }
    for (const char* name : {"scenario_a.nscen", "scenario_b.nscen"}) {
        std::string path = std::string(NBSPEC_CORPUS_DIR) + "/" + name;
        auto r = parse_scenario_text(slurp(path), name);
        REQUIRE_FALSE(has_errors(r.diags));
        std::vector<ast::RawDecl> decls{*r.scenario};
        std::string canon = format_canonical(decls);
        auto again = parse_scenario_text(canon, name);
        REQUIRE_FALSE(has_errors(again.diags));
        CHECK(format_canonical({*again.scenario}) == canon);
    }
}

TEST_CASE("shuffled whitespace yields identical canonical output") {
    std::string tight = "rule R:applies(A),applies(B)=>maneuver(M)";
    std::string loose = "rule   R :\n   applies( A ) ,\n\n applies( B )\n   =>   maneuver( M )";
    auto a = parse_spec_text(tight);
    auto b = parse_spec_text(loose);
    REQUIRE(a.diags.empty());
    REQUIRE(b.diags.empty());
    CHECK(format_canonical(a.decls) == format_canonical(b.decls));
}

// Small random spec generator for the round-trip property.
namespace {

std::string gen_ident(std::mt19937& rng) {
    static const char* pool[] = {"Alpha", "Beta", "Gamma", "Delta", "Zone1", "Zone2",
                                 "FactA", "FactB", "RuleX", "M1",    "M2",    "Src"};
    std::uniform_int_distribution<size_t> pick(0, std::size(pool) - 1);
    std::uniform_int_distribution<int> suffix(0, 99);
    return std::string(pool[pick(rng)]) + std::to_string(suffix(rng));
}

std::string gen_spec(std::mt19937& rng) {
    std::ostringstream out;
    std::uniform_int_distribution<int> ndecl(1, 12);
    std::uniform_int_distribution<int> kind(0, 6);
    std::uniform_int_distribution<int> coin(0, 1);
    int n = ndecl(rng);
    for (int i = 0; i < n; ++i) {
        switch (kind(rng)) {
            case 0:
                out << "class " << gen_ident(rng) << " : L4_MovableObject\n";
                break;
            case 1:
                out << "zone " << gen_ident(rng);
                if (coin(rng)) out << " neighbors (front -> " << gen_ident(rng) << ")";
                out << "\n";
                break;
            case 2:
                out << "source " << gen_ident(rng)
                    << " kind = statute citation = \"cit \\\"q\\\" #notcomment\"\n";
                break;
            case 3:
                out << "fact " << gen_ident(rng) << " kind = inferred";
                if (coin(rng)) out << " sources = [" << gen_ident(rng) << "]";
                if (coin(rng)) out << " desc = \"line1\\nline2\"";
                out << "\n";
                break;
            case 4:
                out << "maneuver " << gen_ident(rng)
                    << " lateral = keep_lane longitudinal = stop\n";
                break;
            case 5:
                out << "mission " << gen_ident(rng) << "\n";
                break;
            default: {
                out << "rule " << gen_ident(rng) << " : ";
                out << gen_ident(rng) << "(?x)";
                if (coin(rng)) out << ", in_zone(?x, " << gen_ident(rng) << ")";
                if (coin(rng)) out << " ^ applies(" << gen_ident(rng) << ")";
                if (coin(rng)) out << ", mission_is(" << gen_ident(rng) << ")";
                out << " => " << (coin(rng) ? "applies" : "maneuver") << "("
                    << gen_ident(rng) << ")\n";
                break;
            }
        }
    }
    return out.str();
}

}  // namespace

TEST_CASE("round-trip property on 500 generated specs") {
    std::mt19937 rng(987654);
    for (int i = 0; i < 500; ++i) check_roundtrip(gen_spec(rng), "gen#" + std::to_string(i));
}

TEST_CASE("every diagnostic span lies within input bounds") {
    std::mt19937 rng(13579);
    std::uniform_int_distribution<int> byte(32, 126);
    for (int round = 0; round < 200; ++round) {
        std::string text;
        std::uniform_int_distribution<int> len(0, 400);
        int n = len(rng);
        for (int i = 0; i < n; ++i) {
            int c = byte(rng);
            text += static_cast<char>(c == 96 ? '\n' : c);
        }
        auto r = parse_spec_text(text, "fuzz");
        int lines = 1;
        for (char c : text)
            if (c == '\n') ++lines;
        for (const auto& d : r.diags) {
            CHECK(d.span.start_line >= 1);
            CHECK(d.span.start_line <= lines + 1);
            CHECK(d.span.start_col >= 1);
        }
    }
}
