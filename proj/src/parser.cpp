#include "nbspec/parser.hpp"

#include <array>
#include <cstdlib>
#include <set>
#include <string>

namespace nbspec {

using namespace ast;

namespace {

const std::set<std::string> kDeclKeywords = {
    "class", "characteristic", "zone",     "source",     "fact",     "maneuver",
    "mission", "rule",         "conflict", "assumption", "analysis", "scenario"};

const std::set<std::string> kLayerTags = {"L1_RoadLevel", "L2_TrafficInfrastructure",
                                          "L3_TemporaryManipulation", "L4_MovableObject",
                                          "L5_Environment"};

const std::set<std::string> kSourceKinds = {"statute",         "administrative_guideline",
                                            "court_case",      "ethics_guideline",
                                            "expert_assumption", "other"};

const std::set<std::string> kFactKinds = {"capturing", "inferred", "maneuver_fact"};

const std::set<std::string> kLateral = {"keep_lane", "change_lane", "pass"};
const std::set<std::string> kLongitudinal = {"start", "stop", "follow_desired_speed",
                                             "follow_target_vehicle"};

struct Parser {
    const std::vector<Token>& toks;
    size_t pos = 0;
    std::vector<RawDecl> decls;
    std::vector<Diagnostic> diags;

    explicit Parser(const std::vector<Token>& t) : toks(t) {}

    // Newlines and semicolons act as statement separators; declarations are
    // keyword-led, so the parser can skip them freely.
    void skip_separators() {
        while (toks[pos].kind == TokKind::Newline || toks[pos].kind == TokKind::Semicolon) ++pos;
    }

    const Token& peek() {
        skip_separators();
        return toks[pos];
    }

    const Token& next() {
        skip_separators();
        return toks[pos++];
    }

    bool at_kw(const std::string& kw) {
        const Token& t = peek();
        return t.kind == TokKind::Ident && t.text == kw;
    }

    bool eat_kw(const std::string& kw) {
        if (at_kw(kw)) {
            ++pos;
            return true;
        }
        return false;
    }

    bool at(TokKind k) { return peek().kind == k; }

    [[nodiscard]] bool expect(TokKind k, const std::string& what) {
        const Token& t = peek();
        if (t.kind == k) {
            ++pos;
            return true;
        }
        error("expected " + what + ", found '" + describe(t) + "'", t.span);
        return false;
    }

    static std::string describe(const Token& t) {
        switch (t.kind) {
            case TokKind::Eof: return "end of input";
            case TokKind::String: return "string";
            case TokKind::Newline: return "end of line";
            default: return t.text;
        }
    }

    void error(const std::string& msg, Span sp) {
        diags.push_back({Severity::Error, "parse-error", msg, sp});
    }

    // Recovery: skip to the next declaration keyword.
    void sync() {
        while (toks[pos].kind != TokKind::Eof) {
            const Token& t = toks[pos];
            if (t.kind == TokKind::Ident && kDeclKeywords.count(t.text)) return;
            ++pos;
        }
    }

    std::optional<std::string> ident(const std::string& what) {
        const Token& t = peek();
        if (t.kind == TokKind::Ident) {
            if (kDeclKeywords.count(t.text)) {
                error("expected " + what + ", found keyword '" + t.text + "'", t.span);
                return std::nullopt;
            }
            ++pos;
            return t.text;
        }
        error("expected " + what + ", found '" + describe(t) + "'", t.span);
        return std::nullopt;
    }

    std::optional<std::string> string_lit(const std::string& what) {
        const Token& t = peek();
        if (t.kind == TokKind::String) {
            ++pos;
            return t.text;
        }
        error("expected " + what + " string, found '" + describe(t) + "'", t.span);
        return std::nullopt;
    }

    std::optional<std::vector<std::string>> ident_list() {
        if (!expect(TokKind::LBracket, "'['")) return std::nullopt;
        std::vector<std::string> out;
        if (!at(TokKind::RBracket)) {
            do {
                auto id = ident("identifier");
                if (!id) return std::nullopt;
                out.push_back(*id);
            } while (eat_comma());
        }
        if (!expect(TokKind::RBracket, "']'")) return std::nullopt;
        return out;
    }

    bool eat_comma() {
        if (at(TokKind::Comma)) {
            ++pos;
            return true;
        }
        return false;
    }

    std::optional<Term> term() {
        if (at(TokKind::Question)) {
            ++pos;
            auto id = ident("variable name");
            if (!id) return std::nullopt;
            return Term{true, *id};
        }
        auto id = ident("constant or variable");
        if (!id) return std::nullopt;
        return Term{false, *id};
    }

    std::optional<Atom> atom() {
        const Token& t = peek();
        if (t.kind != TokKind::Ident) {
            error("expected atom, found '" + describe(t) + "'", t.span);
            return std::nullopt;
        }
        std::string name = t.text;
        ++pos;
        if (!expect(TokKind::LParen, "'('")) return std::nullopt;
        std::optional<Atom> result;
        if (name == "in_zone") {
            auto e = term();
            if (!e || !expect(TokKind::Comma, "','")) return std::nullopt;
            auto z = term();
            if (!z) return std::nullopt;
            result = InZoneAtom{*e, *z};
        } else if (name == "applies") {
            auto f = ident("fact identifier");
            if (!f) return std::nullopt;
            result = AppliesAtom{*f};
        } else if (name == "mission_is") {
            auto m = ident("mission identifier");
            if (!m) return std::nullopt;
            result = MissionAtom{*m};
        } else {
            auto tm = term();
            if (!tm) return std::nullopt;
            result = ClassAtom{name, *tm};
        }
        if (!expect(TokKind::RParen, "')'")) return std::nullopt;
        return result;
    }

    bool enum_word(const std::string& word, const std::set<std::string>& allowed,
                   const std::string& what, Span sp) {
        if (allowed.count(word)) return true;
        std::string opts;
        for (const auto& w : allowed) opts += (opts.empty() ? "" : ", ") + w;
        error("invalid " + what + " '" + word + "' (expected one of: " + opts + ")", sp);
        return false;
    }

    std::optional<CharacteristicDecl> characteristic_decl() {
        Span sp = peek().span;
        if (!eat_kw("characteristic")) return std::nullopt;
        CharacteristicDecl c;
        c.span = sp;
        auto id = ident("characteristic name");
        if (!id) return std::nullopt;
        c.id = *id;
        if (at(TokKind::Colon)) {
            ++pos;
            auto parent = ident("parent characteristic");
            if (!parent) return std::nullopt;
            c.parent = *parent;
        }
        while (at_kw("param")) {
            Span psp = peek().span;
            ++pos;
            ParameterDecl p;
            p.span = psp;
            auto pid = ident("parameter name");
            if (!pid) return std::nullopt;
            p.id = *pid;
            if (!eat_kw("unit") || !expect(TokKind::Equals, "'='")) return std::nullopt;
            auto unit = string_lit("unit");
            if (!unit) return std::nullopt;
            p.unit = *unit;
            if (eat_kw("range")) {
                if (!expect(TokKind::Equals, "'='") || !expect(TokKind::LBracket, "'['"))
                    return std::nullopt;
                const Token& lo = peek();
                if (!expect(TokKind::Number, "number")) return std::nullopt;
                if (!expect(TokKind::Comma, "','")) return std::nullopt;
                const Token& hi = peek();
                if (!expect(TokKind::Number, "number")) return std::nullopt;
                if (!expect(TokKind::RBracket, "']'")) return std::nullopt;
                p.range = {std::strtod(lo.text.c_str(), nullptr),
                           std::strtod(hi.text.c_str(), nullptr)};
            }
            c.parameters.push_back(std::move(p));
        }
        return c;
    }

    bool parse_class() {
        Span sp = next().span;  // "class"
        ClassDecl d;
        d.span = sp;
        auto id = ident("class name");
        if (!id) return false;
        d.id = *id;
        if (at(TokKind::Colon)) {
            ++pos;
            const Token& t = peek();
            if (t.kind != TokKind::Ident) {
                error("expected layer tag or parent class, found '" + describe(t) + "'", t.span);
                return false;
            }
            ++pos;
            if (kLayerTags.count(t.text))
                d.layer = t.text;
            else
                d.parent = t.text;
        }
        if (at(TokKind::LBrace)) {
            ++pos;
            while (!at(TokKind::RBrace) && !at(TokKind::Eof)) {
                auto c = characteristic_decl();
                if (!c) return false;
                d.characteristics.push_back(std::move(*c));
            }
            if (!expect(TokKind::RBrace, "'}'")) return false;
        }
        decls.emplace_back(std::move(d));
        return true;
    }

    bool parse_zone() {
        Span sp = next().span;
        ZoneDecl d;
        d.span = sp;
        auto id = ident("zone name");
        if (!id) return false;
        d.id = *id;
        if (eat_kw("neighbors")) {
            if (!expect(TokKind::LParen, "'('")) return false;
            while (!at(TokKind::RParen)) {
                auto dir = ident("direction");
                if (!dir || !expect(TokKind::MapsTo, "'->'")) return false;
                auto z = ident("zone identifier");
                if (!z) return false;
                d.neighbors.emplace_back(*dir, *z);
                if (!eat_comma()) break;
            }
            if (!expect(TokKind::RParen, "')'")) return false;
        }
        decls.emplace_back(std::move(d));
        return true;
    }

    bool parse_source() {
        Span sp = next().span;
        SourceDecl d;
        d.span = sp;
        auto id = ident("source name");
        if (!id) return false;
        d.id = *id;
        if (!eat_kw("kind")) {
            error("expected 'kind' after source name", peek().span);
            return false;
        }
        if (!expect(TokKind::Equals, "'='")) return false;
        Span ksp = peek().span;
        auto kind = ident("source kind");
        if (!kind || !enum_word(*kind, kSourceKinds, "source kind", ksp)) return false;
        d.kind = *kind;
        if (!eat_kw("citation")) {
            error("expected 'citation' in source declaration", peek().span);
            return false;
        }
        if (!expect(TokKind::Equals, "'='")) return false;
        auto cit = string_lit("citation");
        if (!cit) return false;
        d.citation = *cit;
        if (eat_kw("excerpt")) {
            if (!expect(TokKind::Equals, "'='")) return false;
            auto ex = string_lit("excerpt");
            if (!ex) return false;
            d.excerpt = *ex;
        }
        decls.emplace_back(std::move(d));
        return true;
    }

    bool parse_fact() {
        Span sp = next().span;
        FactDecl d;
        d.span = sp;
        auto id = ident("fact name");
        if (!id) return false;
        d.id = *id;
        if (!eat_kw("kind")) {
            error("expected 'kind' after fact name", peek().span);
            return false;
        }
        if (!expect(TokKind::Equals, "'='")) return false;
        Span ksp = peek().span;
        auto kind = ident("fact kind");
        if (!kind || !enum_word(*kind, kFactKinds, "fact kind", ksp)) return false;
        d.kind = *kind;
        if (eat_kw("sources")) {
            if (!expect(TokKind::Equals, "'='")) return false;
            auto list = ident_list();
            if (!list) return false;
            d.sources = std::move(*list);
        }
        if (eat_kw("desc")) {
            if (!expect(TokKind::Equals, "'='")) return false;
            auto desc = string_lit("description");
            if (!desc) return false;
            d.description = *desc;
        }
        decls.emplace_back(std::move(d));
        return true;
    }

    bool parse_maneuver() {
        Span sp = next().span;
        ManeuverDecl d;
        d.span = sp;
        auto id = ident("maneuver name");
        if (!id) return false;
        d.id = *id;
        if (!eat_kw("lateral") || !expect(TokKind::Equals, "'='")) {
            error("expected 'lateral =' in maneuver declaration", peek().span);
            return false;
        }
        Span lsp = peek().span;
        auto lat = ident("lateral maneuver");
        if (!lat || !enum_word(*lat, kLateral, "lateral maneuver", lsp)) return false;
        d.lateral = *lat;
        if (!eat_kw("longitudinal") || !expect(TokKind::Equals, "'='")) {
            error("expected 'longitudinal =' in maneuver declaration", peek().span);
            return false;
        }
        Span osp = peek().span;
        auto lon = ident("longitudinal maneuver");
        if (!lon || !enum_word(*lon, kLongitudinal, "longitudinal maneuver", osp)) return false;
        d.longitudinal = *lon;
        decls.emplace_back(std::move(d));
        return true;
    }

    bool parse_mission() {
        Span sp = next().span;
        MissionDecl d;
        d.span = sp;
        auto id = ident("mission name");
        if (!id) return false;
        d.id = *id;
        if (eat_kw("desc")) {
            if (!expect(TokKind::Equals, "'='")) return false;
            auto desc = string_lit("description");
            if (!desc) return false;
            d.description = *desc;
        }
        decls.emplace_back(std::move(d));
        return true;
    }

    bool parse_rule() {
        Span sp = next().span;
        RuleDecl d;
        d.span = sp;
        auto id = ident("rule name");
        if (!id) return false;
        d.id = *id;
        if (eat_kw("sources")) {
            if (!expect(TokKind::Equals, "'='")) return false;
            auto list = ident_list();
            if (!list) return false;
            d.sources = std::move(*list);
        }
        if (eat_kw("assumes")) {
            if (!expect(TokKind::Equals, "'='")) return false;
            auto list = ident_list();
            if (!list) return false;
            d.assumes = std::move(*list);
        }
        if (!expect(TokKind::Colon, "':'")) return false;
        do {
            auto a = atom();
            if (!a) return false;
            d.body.push_back(std::move(*a));
        } while (eat_comma() || (at(TokKind::Caret) && ++pos));
        if (!expect(TokKind::Arrow, "'=>'")) return false;
        const Token& ht = peek();
        if (ht.kind == TokKind::Ident && ht.text == "applies") {
            d.head.kind = RuleHead::Kind::FactApplies;
        } else if (ht.kind == TokKind::Ident && ht.text == "maneuver") {
            d.head.kind = RuleHead::Kind::Maneuver;
        } else {
            error("expected rule head 'applies(...)' or 'maneuver(...)', found '" + describe(ht) +
                      "'",
                  ht.span);
            return false;
        }
        ++pos;
        if (!expect(TokKind::LParen, "'('")) return false;
        auto target = ident("head identifier");
        if (!target) return false;
        d.head.target_id = *target;
        if (!expect(TokKind::RParen, "')'")) return false;
        decls.emplace_back(std::move(d));
        return true;
    }

    bool parse_conflict() {
        Span sp = next().span;
        ConflictDecl d;
        d.span = sp;
        if (!expect(TokKind::LBrace, "'{'")) return false;
        do {
            auto id = ident("maneuver identifier");
            if (!id) return false;
            d.members.push_back(*id);
        } while (eat_comma());
        if (!expect(TokKind::RBrace, "'}'")) return false;
        decls.emplace_back(std::move(d));
        return true;
    }

    bool parse_assumption() {
        Span sp = next().span;
        AssumptionDecl d;
        d.span = sp;
        auto id = ident("assumption name");
        if (!id) return false;
        d.id = *id;
        if (!expect(TokKind::Equals, "'='")) return false;
        auto stmt = string_lit("assumption statement");
        if (!stmt) return false;
        d.statement = *stmt;
        if (eat_kw("attached")) {
            if (!expect(TokKind::Equals, "'='")) return false;
            auto list = ident_list();
            if (!list) return false;
            d.attached_to = std::move(*list);
        }
        decls.emplace_back(std::move(d));
        return true;
    }

    bool parse_analysis() {
        Span sp = next().span;
        AnalysisDecl d;
        d.span = sp;
        auto id = ident("analysis name");
        if (!id) return false;
        d.id = *id;
        if (!expect(TokKind::LBrace, "'{'")) return false;
        while (!at(TokKind::RBrace) && !at(TokKind::Eof)) {
            if (eat_kw("premise")) {
                if (!expect(TokKind::Equals, "'='")) return false;
                auto s = string_lit("premise");
                if (!s) return false;
                d.premise = *s;
            } else if (eat_kw("definition")) {
                if (!expect(TokKind::Equals, "'='")) return false;
                auto s = string_lit("definition");
                if (!s) return false;
                if (!eat_kw("source") || !expect(TokKind::Equals, "'='")) {
                    error("expected 'source =' after definition text", peek().span);
                    return false;
                }
                auto src = ident("source identifier");
                if (!src) return false;
                d.definitions.emplace_back(*s, *src);
            } else if (eat_kw("subsumption")) {
                if (!expect(TokKind::Equals, "'='")) return false;
                auto s = string_lit("subsumption");
                if (!s) return false;
                std::vector<std::string> refs;
                if (eat_kw("refs")) {
                    if (!expect(TokKind::Equals, "'='")) return false;
                    auto list = ident_list();
                    if (!list) return false;
                    refs = std::move(*list);
                }
                d.subsumptions.emplace_back(*s, std::move(refs));
            } else if (eat_kw("result")) {
                if (!expect(TokKind::Equals, "'='")) return false;
                auto s = string_lit("result");
                if (!s) return false;
                d.result = *s;
            } else if (eat_kw("assumes")) {
                if (!expect(TokKind::Equals, "'='")) return false;
                auto list = ident_list();
                if (!list) return false;
                d.assumptions = std::move(*list);
            } else {
                error("unexpected token '" + describe(peek()) + "' in analysis block",
                      peek().span);
                return false;
            }
        }
        if (!expect(TokKind::RBrace, "'}'")) return false;
        decls.emplace_back(std::move(d));
        return true;
    }

    bool parse_scenario_decl() {
        Span sp = next().span;
        ScenarioDecl d;
        d.span = sp;
        auto id = ident("scenario name");
        if (!id) return false;
        d.id = *id;
        if (!expect(TokKind::LBrace, "'{'")) return false;
        while (!at(TokKind::RBrace) && !at(TokKind::Eof)) {
            if (at_kw("entity")) {
                Span psp = peek().span;
                ++pos;
                Placement p;
                p.span = psp;
                auto eid = ident("entity name");
                if (!eid || !expect(TokKind::Colon, "':'")) return false;
                p.entity_id = *eid;
                auto cid = ident("class identifier");
                if (!cid) return false;
                p.class_id = *cid;
                if (!eat_kw("in")) {
                    error("expected 'in' after entity class", peek().span);
                    return false;
                }
                auto zid = ident("zone identifier");
                if (!zid) return false;
                p.zone_id = *zid;
                d.placements.push_back(std::move(p));
            } else if (eat_kw("ego")) {
                auto cid = ident("ego class");
                if (!cid) return false;
                d.ego_class = *cid;
                if (!eat_kw("mission")) {
                    error("expected 'mission' after ego class", peek().span);
                    return false;
                }
                auto mid = ident("mission identifier");
                if (!mid) return false;
                d.ego_mission = *mid;
                if (!eat_kw("in")) {
                    error("expected 'in' after ego mission", peek().span);
                    return false;
                }
                auto zid = ident("zone identifier");
                if (!zid) return false;
                d.ego_zone = *zid;
            } else if (eat_kw("assert")) {
                if (!eat_kw("applies") || !expect(TokKind::LParen, "'('")) {
                    error("expected 'applies(FactId)' after assert", peek().span);
                    return false;
                }
                auto fid = ident("fact identifier");
                if (!fid || !expect(TokKind::RParen, "')'")) return false;
                d.asserted_facts.push_back(*fid);
            } else if (eat_kw("expect")) {
                if (!eat_kw("maneuvers") || !expect(TokKind::Equals, "'='") ||
                    !expect(TokKind::LBrace, "'{'")) {
                    error("expected 'maneuvers = { ... }' after expect", peek().span);
                    return false;
                }
                std::vector<std::string> expected;
                if (!at(TokKind::RBrace)) {
                    do {
                        auto m = ident("maneuver identifier");
                        if (!m) return false;
                        expected.push_back(*m);
                    } while (eat_comma());
                }
                if (!expect(TokKind::RBrace, "'}'")) return false;
                d.expected_maneuvers = std::move(expected);
            } else {
                error("unexpected token '" + describe(peek()) + "' in scenario block",
                      peek().span);
                return false;
            }
        }
        if (!expect(TokKind::RBrace, "'}'")) return false;
        decls.emplace_back(std::move(d));
        return true;
    }

    void run() {
        while (!at(TokKind::Eof)) {
            const Token& t = peek();
            bool ok = false;
            if (t.kind != TokKind::Ident) {
                error("expected declaration, found '" + describe(t) + "'", t.span);
                ++pos;
                sync();
                continue;
            }
            if (t.text == "class") ok = parse_class();
            else if (t.text == "characteristic") {
                auto c = characteristic_decl();
                if (c) {
                    decls.emplace_back(std::move(*c));
                    ok = true;
                }
            } else if (t.text == "zone") ok = parse_zone();
            else if (t.text == "source") ok = parse_source();
            else if (t.text == "fact") ok = parse_fact();
            else if (t.text == "maneuver") ok = parse_maneuver();
            else if (t.text == "mission") ok = parse_mission();
            else if (t.text == "rule") ok = parse_rule();
            else if (t.text == "conflict") ok = parse_conflict();
            else if (t.text == "assumption") ok = parse_assumption();
            else if (t.text == "analysis") ok = parse_analysis();
            else if (t.text == "scenario") ok = parse_scenario_decl();
            else {
                error("unknown declaration '" + t.text + "'", t.span);
                ++pos;
            }
            if (!ok) sync();
        }
    }
};

}  // namespace

bool is_layer_tag(const std::string& name) { return kLayerTags.count(name) > 0; }

ParseResult parse_spec(const std::vector<Token>& tokens) {
    Parser p(tokens);
    p.run();
    return {std::move(p.decls), std::move(p.diags)};
}

ScenarioParseResult parse_scenario(const std::vector<Token>& tokens) {
    ParseResult r = parse_spec(tokens);
    ScenarioParseResult out;
    out.diags = std::move(r.diags);
    for (auto& d : r.decls) {
        if (auto* s = std::get_if<ScenarioDecl>(&d)) {
            if (out.scenario) {
                out.diags.push_back({Severity::Error, "parse-error",
                                     "multiple scenario declarations in one scenario file",
                                     s->span});
            } else {
                out.scenario = std::move(*s);
            }
        } else {
            out.diags.push_back({Severity::Error, "parse-error",
                                 "only scenario declarations are allowed in a scenario file",
                                 decl_span(d)});
        }
    }
    if (!out.scenario && !has_errors(out.diags))
        out.diags.push_back({Severity::Error, "parse-error",
                             "scenario file contains no scenario declaration", Span{}});
    return out;
}

ParseResult parse_spec_text(std::string_view text, const std::string& file) {
    LexResult lr = tokenize(text, file);
    ParseResult pr = parse_spec(lr.tokens);
    pr.diags.insert(pr.diags.begin(), lr.diags.begin(), lr.diags.end());
    return pr;
}

ScenarioParseResult parse_scenario_text(std::string_view text, const std::string& file) {
    LexResult lr = tokenize(text, file);
    ScenarioParseResult pr = parse_scenario(lr.tokens);
    pr.diags.insert(pr.diags.begin(), lr.diags.begin(), lr.diags.end());
    return pr;
}

}  // namespace nbspec
