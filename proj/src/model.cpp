#include "nbspec/model.hpp"

#include <algorithm>
#include <functional>

namespace nbspec {

using namespace ast;

std::string layer_name(Layer l) {
    switch (l) {
        case Layer::L1_RoadLevel: return "L1_RoadLevel";
        case Layer::L2_TrafficInfrastructure: return "L2_TrafficInfrastructure";
        case Layer::L3_TemporaryManipulation: return "L3_TemporaryManipulation";
        case Layer::L4_MovableObject: return "L4_MovableObject";
        case Layer::L5_Environment: return "L5_Environment";
    }
    return "?";
}

std::optional<Layer> layer_from_name(const std::string& name) {
    if (name == "L1_RoadLevel") return Layer::L1_RoadLevel;
    if (name == "L2_TrafficInfrastructure") return Layer::L2_TrafficInfrastructure;
    if (name == "L3_TemporaryManipulation") return Layer::L3_TemporaryManipulation;
    if (name == "L4_MovableObject") return Layer::L4_MovableObject;
    if (name == "L5_Environment") return Layer::L5_Environment;
    return std::nullopt;
}

std::string fact_kind_name(FactKind k) {
    switch (k) {
        case FactKind::Capturing: return "capturing";
        case FactKind::Inferred: return "inferred";
        case FactKind::ManeuverFact: return "maneuver_fact";
    }
    return "?";
}

std::string source_kind_name(SourceKind k) {
    switch (k) {
        case SourceKind::Statute: return "statute";
        case SourceKind::AdministrativeGuideline: return "administrative_guideline";
        case SourceKind::CourtCase: return "court_case";
        case SourceKind::EthicsGuideline: return "ethics_guideline";
        case SourceKind::ExpertAssumption: return "expert_assumption";
        case SourceKind::Other: return "other";
    }
    return "?";
}

namespace {

SourceKind source_kind_from(const std::string& s) {
    if (s == "statute") return SourceKind::Statute;
    if (s == "administrative_guideline") return SourceKind::AdministrativeGuideline;
    if (s == "court_case") return SourceKind::CourtCase;
    if (s == "ethics_guideline") return SourceKind::EthicsGuideline;
    if (s == "expert_assumption") return SourceKind::ExpertAssumption;
    return SourceKind::Other;
}

FactKind fact_kind_from(const std::string& s) {
    if (s == "capturing") return FactKind::Capturing;
    if (s == "inferred") return FactKind::Inferred;
    return FactKind::ManeuverFact;
}

struct Resolver {
    SpecModel model;
    std::vector<Diagnostic> diags;

    void error(const std::string& code, const std::string& msg, const Span& sp) {
        diags.push_back({Severity::Error, code, msg, sp});
    }

    template <typename M, typename V>
    void declare(M& map, const std::string& ns, V value) {
        auto [it, inserted] = map.emplace(value.id, value);
        if (!inserted)
            error("duplicate-identifier",
                  "duplicate " + ns + " identifier '" + value.id + "' (first declared at line " +
                      std::to_string(it->second.span.start_line) + ")",
                  value.span);
    }

    void collect(const std::vector<RawDecl>& decls) {
        for (const auto& d : decls) std::visit(*this, d);
    }

    void operator()(const ClassDecl& d) {
        SceneEntityClass c;
        c.id = d.id;
        c.parent = d.parent;
        if (d.layer) c.layer = *layer_from_name(*d.layer);
        for (const auto& ch : d.characteristics) c.characteristics.push_back(ch.id);
        c.span = d.span;
        declare(model.classes, "class", c);
        // Track whether the layer was declared explicitly (roots only).
        if (d.layer) declared_layers.insert(d.id);
        for (const auto& ch : d.characteristics) (*this)(ch);
    }

    void operator()(const CharacteristicDecl& d) {
        Characteristic c{d.id, d.parent, d.parameters, d.span};
        declare(model.characteristics, "characteristic", c);
        for (const auto& p : d.parameters) {
            if (p.range && p.range->first > p.range->second)
                error("invalid-range",
                      "parameter '" + p.id + "' has range lower bound greater than upper bound",
                      p.span);
        }
    }

    void operator()(const ZoneDecl& d) {
        declare(model.zones, "zone", Zone{d.id, "default", d.neighbors, d.span});
    }

    void operator()(const SourceDecl& d) {
        if (d.citation.empty())
            error("empty-citation", "knowledge source '" + d.id + "' has an empty citation",
                  d.span);
        declare(model.sources, "source",
                KnowledgeSource{d.id, source_kind_from(d.kind), d.citation, d.excerpt, d.span});
    }

    void operator()(const FactDecl& d) {
        declare(model.facts, "fact",
                Fact{d.id, fact_kind_from(d.kind), d.sources, d.description.value_or(""), d.span});
    }

    void operator()(const ManeuverDecl& d) {
        declare(model.maneuvers, "maneuver",
                ManeuverOption{d.id, d.lateral, d.longitudinal, d.span});
    }

    void operator()(const MissionDecl& d) {
        declare(model.missions, "mission", Mission{d.id, d.description.value_or(""), d.span});
    }

    void operator()(const RuleDecl& d) {
        declare(model.rules, "rule", Rule{d.id, d.sources, d.assumes, d.body, d.head, d.span});
    }

    void operator()(const ConflictDecl& d) {
        ConflictGroup g;
        g.span = d.span;
        for (const auto& m : d.members) {
            if (!g.members.insert(m).second)
                error("duplicate-member", "conflict group lists '" + m + "' twice", d.span);
        }
        if (g.members.size() < 2)
            error("conflict-too-small", "a conflict group needs at least two maneuvers", d.span);
        model.conflict_groups.push_back(std::move(g));
    }

    void operator()(const AssumptionDecl& d) {
        declare(model.assumptions, "assumption",
                Assumption{d.id, d.statement, d.attached_to, d.span});
    }

    void operator()(const AnalysisDecl& d) {
        declare(model.analyses, "analysis",
                AnalysisRecord{d.id, d.premise, d.definitions, d.subsumptions, d.result,
                               d.assumptions, d.span});
    }

    void operator()(const ScenarioDecl& d) {
        auto [it, inserted] = model.scenarios.emplace(d.id, d);
        if (!inserted)
            error("duplicate-identifier", "duplicate scenario identifier '" + d.id + "'", d.span);
    }

    std::set<std::string> declared_layers;

    void check_unknown(bool known, const std::string& kind, const std::string& id,
                       const Span& sp) {
        if (!known)
            error("unknown-identifier", "unknown " + kind + " '" + id + "'", sp);
    }

    // DFS over parent edges; reports each cycle once.
    template <typename M>
    void check_cycles(const M& map, const std::string& what) {
        std::set<std::string> done;
        for (const auto& [id, node] : map) {
            if (done.count(id)) continue;
            std::vector<std::string> path;
            std::set<std::string> on_path;
            std::string cur = id;
            while (true) {
                if (on_path.count(cur)) {
                    std::string cycle;
                    auto start = std::find(path.begin(), path.end(), cur);
                    for (auto it2 = start; it2 != path.end(); ++it2) cycle += *it2 + " -> ";
                    cycle += cur;
                    error("cyclic-taxonomy", "cyclic " + what + " hierarchy: " + cycle,
                          map.at(cur).span);
                    break;
                }
                if (done.count(cur)) break;
                on_path.insert(cur);
                path.push_back(cur);
                auto it2 = map.find(cur);
                if (it2 == map.end() || !it2->second.parent) break;
                const std::string& p = *it2->second.parent;
                if (!map.count(p)) break;  // dangling parent reported elsewhere
                cur = p;
            }
            for (const auto& n : path) done.insert(n);
        }
    }

    void cross_check() {
        // Classes: parents, layer placement.
        for (const auto& [id, c] : model.classes) {
            if (c.parent) {
                check_unknown(model.classes.count(*c.parent) > 0, "class", *c.parent, c.span);
            } else if (!declared_layers.count(id)) {
                error("missing-layer",
                      "root class '" + id + "' must declare one of the five layer tags", c.span);
            }
            for (const auto& ch : c.characteristics)
                check_unknown(model.characteristics.count(ch) > 0, "characteristic", ch, c.span);
        }
        check_cycles(model.classes, "class");
        check_cycles(model.characteristics, "characteristic");

        for (const auto& [id, c] : model.characteristics)
            if (c.parent)
                check_unknown(model.characteristics.count(*c.parent) > 0, "characteristic",
                              *c.parent, c.span);

        // Propagate root layers down the (acyclic) hierarchy.
        if (!has_errors(diags)) {
            std::function<Layer(const std::string&)> root_layer = [&](const std::string& id) {
                const auto& c = model.classes.at(id);
                return c.parent ? root_layer(*c.parent) : c.layer;
            };
            for (auto& [id, c] : model.classes) c.layer = root_layer(id);
        }

        for (const auto& [id, z] : model.zones)
            for (const auto& [dir, n] : z.neighbors)
                check_unknown(model.zones.count(n) > 0, "zone", n, z.span);

        for (const auto& [id, f] : model.facts)
            for (const auto& s : f.sources)
                check_unknown(model.sources.count(s) > 0, "source", s, f.span);

        // Maneuver combinations must be unique across ids.
        std::map<std::pair<std::string, std::string>, std::string> combos;
        for (const auto& [id, m] : model.maneuvers) {
            auto [it, inserted] = combos.emplace(std::make_pair(m.lateral, m.longitudinal), id);
            if (!inserted)
                error("duplicate-maneuver",
                      "maneuver '" + id + "' repeats the combination of '" + it->second + "'",
                      m.span);
        }

        for (const auto& [id, r] : model.rules) check_rule(r);

        for (const auto& g : model.conflict_groups)
            for (const auto& m : g.members)
                check_unknown(model.maneuvers.count(m) > 0, "maneuver", m, g.span);

        for (const auto& [id, a] : model.assumptions)
            for (const auto& t : a.attached_to)
                check_unknown(model.facts.count(t) + model.rules.count(t) > 0, "fact or rule", t,
                              a.span);

        for (const auto& [id, a] : model.analyses) {
            for (const auto& [text, src] : a.definitions)
                check_unknown(model.sources.count(src) > 0, "source", src, a.span);
            for (const auto& [text, refs] : a.subsumptions)
                for (const auto& r : refs)
                    check_unknown(model.facts.count(r) + model.rules.count(r) > 0, "fact or rule",
                                  r, a.span);
            for (const auto& as : a.assumptions)
                check_unknown(model.assumptions.count(as) > 0, "assumption", as, a.span);
        }

        for (const auto& [id, s] : model.scenarios) check_scenario_refs(s);
    }

    void check_rule(const Rule& r) {
        std::set<std::string> body_vars;
        for (const auto& atom : r.body) {
            std::visit(
                [&](const auto& a) {
                    using T = std::decay_t<decltype(a)>;
                    if constexpr (std::is_same_v<T, ClassAtom>) {
                        check_unknown(model.classes.count(a.class_id) > 0, "class", a.class_id,
                                      r.span);
                        if (a.term.is_variable) body_vars.insert(a.term.name);
                    } else if constexpr (std::is_same_v<T, InZoneAtom>) {
                        if (a.entity.is_variable) body_vars.insert(a.entity.name);
                        if (a.zone.is_variable)
                            body_vars.insert(a.zone.name);
                        else
                            check_unknown(model.zones.count(a.zone.name) > 0, "zone", a.zone.name,
                                          r.span);
                    } else if constexpr (std::is_same_v<T, AppliesAtom>) {
                        check_unknown(model.facts.count(a.fact_id) > 0, "fact", a.fact_id, r.span);
                    } else {
                        check_unknown(model.missions.count(a.mission_id) > 0, "mission",
                                      a.mission_id, r.span);
                    }
                },
                atom);
        }
        if (r.head.kind == RuleHead::Kind::FactApplies)
            check_unknown(model.facts.count(r.head.target_id) > 0, "fact", r.head.target_id,
                          r.span);
        else
            check_unknown(model.maneuvers.count(r.head.target_id) > 0, "maneuver",
                          r.head.target_id, r.span);
        for (const auto& s : r.sources)
            check_unknown(model.sources.count(s) > 0, "source", s, r.span);
        for (const auto& a : r.assumes)
            check_unknown(model.assumptions.count(a) > 0, "assumption", a, r.span);
        // Range restriction holds by grammar (heads carry constants only);
        // re-checked here in case the AST was built programmatically.
        (void)body_vars;
    }

    void check_scenario_refs(const ScenarioDecl& s) {
        std::set<std::string> entity_ids;
        if (s.ego_class) {
            check_unknown(model.classes.count(*s.ego_class) > 0, "class", *s.ego_class, s.span);
            entity_ids.insert("ego");
        }
        if (s.ego_mission)
            check_unknown(model.missions.count(*s.ego_mission) > 0, "mission", *s.ego_mission,
                          s.span);
        if (s.ego_zone)
            check_unknown(model.zones.count(*s.ego_zone) > 0, "zone", *s.ego_zone, s.span);
        for (const auto& p : s.placements) {
            check_unknown(model.classes.count(p.class_id) > 0, "class", p.class_id, p.span);
            check_unknown(model.zones.count(p.zone_id) > 0, "zone", p.zone_id, p.span);
            entity_ids.insert(p.entity_id);
        }
        for (const auto& f : s.asserted_facts)
            check_unknown(model.facts.count(f) > 0, "fact", f, s.span);
        if (s.expected_maneuvers)
            for (const auto& m : *s.expected_maneuvers)
                check_unknown(model.maneuvers.count(m) > 0, "maneuver", m, s.span);
    }
};

}  // namespace

ResolveResult resolve(const std::vector<RawDecl>& decls) {
    Resolver r;
    r.collect(decls);
    r.cross_check();
    std::stable_sort(r.diags.begin(), r.diags.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                         return span_before(a.span, b.span);
                     });
    ResolveResult out;
    out.diags = std::move(r.diags);
    if (!has_errors(out.diags)) out.model = std::move(r.model);
    return out;
}

bool is_subclass(const SpecModel& model, const std::string& sub, const std::string& sup) {
    std::string cur = sub;
    // The resolved taxonomy is acyclic; bound the walk defensively anyway.
    for (size_t steps = 0; steps <= model.classes.size(); ++steps) {
        if (cur == sup) return true;
        auto it = model.classes.find(cur);
        if (it == model.classes.end() || !it->second.parent) return false;
        cur = *it->second.parent;
    }
    return false;
}

std::vector<Diagnostic> validate_model(const SpecModel& model, bool strict_traceability) {
    std::vector<Diagnostic> diags;
    auto add = [&](Severity sev, const std::string& code, const std::string& msg,
                   const Span& sp) { diags.push_back({sev, code, msg, sp}); };

    // Defensive re-checks (resolve already rejects these).
    for (const auto& [id, c] : model.classes)
        if (c.parent && !model.classes.count(*c.parent))
            add(Severity::Error, "unknown-identifier",
                "class '" + id + "' has dangling parent '" + *c.parent + "'", c.span);

    std::set<std::string> derivable_facts;
    std::set<std::string> used_maneuvers;
    std::set<std::string> used_sources;
    for (const auto& [id, r] : model.rules) {
        if (r.head.kind == ast::RuleHead::Kind::FactApplies)
            derivable_facts.insert(r.head.target_id);
        else
            used_maneuvers.insert(r.head.target_id);
        for (const auto& s : r.sources) used_sources.insert(s);
    }
    for (const auto& [id, f] : model.facts)
        for (const auto& s : f.sources) used_sources.insert(s);
    for (const auto& [id, a] : model.analyses)
        for (const auto& [text, src] : a.definitions) used_sources.insert(src);

    for (const auto& [id, f] : model.facts) {
        if (f.kind == FactKind::Inferred && !derivable_facts.count(id))
            add(Severity::Warning, "underivable-fact",
                "fact '" + id + "' is declared inferred but no rule derives it", f.span);
        if (strict_traceability && f.sources.empty())
            add(Severity::Error, "missing-source-link",
                "fact '" + id + "' has no knowledge-source link (strict traceability)", f.span);
    }
    for (const auto& [id, s] : model.sources)
        if (!used_sources.count(id))
            add(Severity::Warning, "unused-source",
                "knowledge source '" + id + "' is never referenced", s.span);
    for (const auto& [id, m] : model.maneuvers)
        if (!used_maneuvers.count(id))
            add(Severity::Warning, "unused-maneuver",
                "maneuver '" + id + "' never appears in a rule head", m.span);

    // Lint: same name reused across namespaces (legal but confusing).
    for (const auto& [id, f] : model.facts)
        if (model.classes.count(id))
            add(Severity::Warning, "cross-namespace-name",
                "fact '" + id + "' shares its name with a class", f.span);

    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return span_before(a.span, b.span);
    });
    return diags;
}

}  // namespace nbspec
