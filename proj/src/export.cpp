#include "nbspec/export.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

namespace nbspec {

namespace {

using nlohmann::json;

std::string node_id_for(const GroundAssertion& g) {
    switch (g.kind) {
        case GroundAssertion::Kind::EntityIn: return g.a;
        case GroundAssertion::Kind::MissionIs: return "mission:" + g.a;
        default: return g.a;
    }
}

std::string node_kind_for(const GroundAssertion& g) {
    switch (g.kind) {
        case GroundAssertion::Kind::FactApplies: return "fact";
        case GroundAssertion::Kind::ManeuverApplies: return "maneuver";
        default: return "entity";
    }
}

std::string node_label_for(const SpecModel& model, const GroundAssertion& g) {
    if (g.kind == GroundAssertion::Kind::EntityIn) return g.a + " : " + g.b + " @ " + g.c;
    return g.a;
}

void normalize(CausalBehaviorGraph& graph) {
    std::sort(graph.nodes.begin(), graph.nodes.end());
    graph.nodes.erase(std::unique(graph.nodes.begin(), graph.nodes.end()), graph.nodes.end());
    std::sort(graph.edges.begin(), graph.edges.end());
    graph.edges.erase(std::unique(graph.edges.begin(), graph.edges.end()), graph.edges.end());
}

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += "\"";
    return out;
}

// The first recorded step per conclusion, in derivation order.
std::vector<const DerivationStep*> first_steps(const InferenceResult& result) {
    std::vector<const DerivationStep*> out;
    std::set<GroundAssertion> seen;
    for (const auto& s : result.steps)
        if (seen.insert(s.conclusion).second) out.push_back(&s);
    return out;
}

}  // namespace

CausalBehaviorGraph build_cbg(const SpecModel& model, const InferenceResult& result,
                              const CbgOptions& opts) {
    CausalBehaviorGraph graph;
    auto add_node = [&](const GroundAssertion& g) -> bool {
        std::string kind = node_kind_for(g);
        if (!opts.include_entities && kind == "entity") return false;
        graph.nodes.push_back({node_id_for(g), node_label_for(model, g), kind});
        return true;
    };
    // Every derived (or base asserted) fact/maneuver is a node; base entity
    // assertions appear only when they contribute to some step.
    for (const auto& g : result.derived)
        if (g.kind == GroundAssertion::Kind::FactApplies ||
            g.kind == GroundAssertion::Kind::ManeuverApplies)
            add_node(g);
    // Edges come from first-derivation steps only: a step at the conclusion's
    // minimal iteration has premises from strictly earlier passes, so levels
    // increase along every edge and the graph stays acyclic even when later
    // passes rederive known assertions through other rules.
    std::map<GroundAssertion, int> min_iteration;
    for (const auto& step : result.steps) {
        auto [it, inserted] = min_iteration.emplace(step.conclusion, step.iteration);
        if (!inserted && step.iteration < it->second) it->second = step.iteration;
    }
    for (const auto& step : result.steps) {
        // Base assertions are roots: rederiving one must not give it in-edges.
        if (result.base.count(step.conclusion)) continue;
        if (step.iteration != min_iteration.at(step.conclusion)) continue;
        for (const auto& premise : step.premises) {
            bool included = true;
            if (premise.kind == GroundAssertion::Kind::EntityIn ||
                premise.kind == GroundAssertion::Kind::MissionIs)
                included = add_node(premise);
            if (included)
                graph.edges.push_back(
                    {node_id_for(premise), node_id_for(step.conclusion), step.rule_id});
        }
    }
    normalize(graph);
    return graph;
}

CausalBehaviorGraph cbg_union(const std::vector<CausalBehaviorGraph>& graphs) {
    CausalBehaviorGraph out;
    for (const auto& g : graphs) {
        out.nodes.insert(out.nodes.end(), g.nodes.begin(), g.nodes.end());
        out.edges.insert(out.edges.end(), g.edges.begin(), g.edges.end());
    }
    normalize(out);
    return out;
}

bool cbg_is_acyclic(const CausalBehaviorGraph& graph) {
    std::map<std::string, std::vector<std::string>> adj;
    std::map<std::string, int> indegree;
    for (const auto& n : graph.nodes) indegree[n.id] = 0;
    for (const auto& e : graph.edges) {
        adj[e.from].push_back(e.to);
        ++indegree[e.to];
    }
    std::vector<std::string> queue;
    for (const auto& [id, deg] : indegree)
        if (deg == 0) queue.push_back(id);
    size_t visited = 0;
    while (!queue.empty()) {
        std::string cur = queue.back();
        queue.pop_back();
        ++visited;
        for (const auto& next : adj[cur])
            if (--indegree[next] == 0) queue.push_back(next);
    }
    return visited == indegree.size();
}

std::string emit_dot(const CausalBehaviorGraph& graph) {
    std::ostringstream os;
    os << "digraph causal_behavior {\n";
    os << "  rankdir=LR;\n";
    for (const auto& n : graph.nodes) {
        std::string shape = n.kind == "fact"       ? "ellipse"
                            : n.kind == "maneuver" ? "box"
                                                   : "plaintext";
        os << "  " << dot_quote(n.id) << " [label=" << dot_quote(n.label)
           << " shape=" << shape << "];\n";
    }
    for (const auto& e : graph.edges)
        os << "  " << dot_quote(e.from) << " -> " << dot_quote(e.to)
           << " [label=" << dot_quote(e.rule_id) << "];\n";
    os << "}\n";
    return os.str();
}

SequenceResult emit_sequence(const SpecModel& model, const InferenceResult& result) {
    SequenceResult out;
    std::vector<std::string> lifelines;
    bool has_ego = false;
    for (const auto& g : result.base) {
        if (g.kind != GroundAssertion::Kind::EntityIn) continue;
        if (g.a == "ego") has_ego = true;
        else lifelines.push_back(g.a);
    }
    if (!has_ego) {
        out.error = "no-ego";
        return out;
    }
    std::sort(lifelines.begin(), lifelines.end());

    std::ostringstream os;
    os << "participant ego\n";
    for (const auto& l : lifelines) os << "participant " << l << "\n";

    for (const DerivationStep* step : first_steps(result)) {
        const GroundAssertion& g = step->conclusion;
        if (g.kind == GroundAssertion::Kind::ManeuverApplies) {
            os << "ego -> ego : " << g.a << "\n";
            continue;
        }
        if (g.kind != GroundAssertion::Kind::FactApplies) continue;
        auto fit = model.facts.find(g.a);
        FactKind kind = fit != model.facts.end() ? fit->second.kind : FactKind::Inferred;
        if (kind != FactKind::Capturing) {
            os << "ego -> ego : " << g.a << "\n";
            continue;
        }
        // Capturing fact: the salient entity is the non-ego entity bound by a
        // class atom in the derivation. Several candidates pick the
        // lexicographically first and note it.
        auto rit = model.rules.find(step->rule_id);
        std::set<std::string> candidates;
        if (rit != model.rules.end()) {
            const auto& body = rit->second.body;
            for (size_t i = 0; i < step->premises.size() && i < body.size(); ++i) {
                if (!std::holds_alternative<ast::ClassAtom>(body[i])) continue;
                const auto& p = step->premises[i];
                if (p.kind == GroundAssertion::Kind::EntityIn && p.a != "ego")
                    candidates.insert(p.a);
            }
        }
        if (candidates.empty()) continue;  // ego-anchored capture; no message
        os << *candidates.begin() << " -> ego : " << g.a << "\n";
        if (candidates.size() > 1)
            os << "# note: " << g.a << " involves several entities; picked "
               << *candidates.begin() << "\n";
    }
    out.text = os.str();
    return out;
}

namespace {

json assertion_to_json(const GroundAssertion& g) {
    json j;
    switch (g.kind) {
        case GroundAssertion::Kind::EntityIn:
            j["type"] = "entity_in";
            j["entity"] = g.a;
            j["class"] = g.b;
            j["zone"] = g.c;
            break;
        case GroundAssertion::Kind::FactApplies:
            j["type"] = "fact_applies";
            j["id"] = g.a;
            break;
        case GroundAssertion::Kind::ManeuverApplies:
            j["type"] = "maneuver_applies";
            j["id"] = g.a;
            break;
        case GroundAssertion::Kind::MissionIs:
            j["type"] = "mission_is";
            j["id"] = g.a;
            break;
    }
    return j;
}

std::optional<GroundAssertion> assertion_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type")) return std::nullopt;
    std::string type = j["type"];
    if (type == "entity_in")
        return GroundAssertion::entity_in(j.value("entity", ""), j.value("class", ""),
                                          j.value("zone", ""));
    if (type == "fact_applies") return GroundAssertion::fact_applies(j.value("id", ""));
    if (type == "maneuver_applies") return GroundAssertion::maneuver_applies(j.value("id", ""));
    if (type == "mission_is") return GroundAssertion::mission_is(j.value("id", ""));
    return std::nullopt;
}

}  // namespace

std::string emit_result_doc(const SpecModel& model, const InferenceResult& result,
                            const ConsistencyReport& report) {
    json doc;
    doc["scenario"] = result.scenario_id;

    json base = json::array();
    for (const auto& g : result.base) base.push_back(assertion_to_json(g));
    doc["base"] = std::move(base);

    // First-derivation iteration per assertion, for the (iteration, id) order.
    std::map<GroundAssertion, int> first_iter;
    for (const auto& s : result.steps)
        if (!first_iter.count(s.conclusion)) first_iter[s.conclusion] = s.iteration;

    std::vector<GroundAssertion> derived;
    for (const auto& g : result.derived)
        if (!result.base.count(g)) derived.push_back(g);
    std::sort(derived.begin(), derived.end(),
              [&](const GroundAssertion& a, const GroundAssertion& b) {
                  int ia = first_iter.count(a) ? first_iter.at(a) : 0;
                  int ib = first_iter.count(b) ? first_iter.at(b) : 0;
                  if (ia != ib) return ia < ib;
                  return a < b;
              });
    json jd = json::array();
    for (const auto& g : derived) {
        json item = assertion_to_json(g);
        item["iteration"] = first_iter.count(g) ? first_iter.at(g) : 0;
        jd.push_back(std::move(item));
    }
    doc["derived"] = std::move(jd);

    std::vector<const DerivationStep*> steps;
    for (const auto& s : result.steps) steps.push_back(&s);
    std::stable_sort(steps.begin(), steps.end(),
                     [](const DerivationStep* a, const DerivationStep* b) {
                         if (a->iteration != b->iteration) return a->iteration < b->iteration;
                         if (a->conclusion != b->conclusion) return a->conclusion < b->conclusion;
                         return a->rule_id < b->rule_id;
                     });
    json js = json::array();
    for (const DerivationStep* s : steps) {
        json step;
        step["conclusion"] = assertion_to_json(s->conclusion);
        step["rule"] = s->rule_id;
        step["binding"] = json::object();
        for (const auto& [var, val] : s->binding) step["binding"][var] = val;
        json prem = json::array();
        for (const auto& p : s->premises) prem.push_back(assertion_to_json(p));
        step["premises"] = std::move(prem);
        step["iteration"] = s->iteration;
        js.push_back(std::move(step));
    }
    doc["steps"] = std::move(js);

    json jf = json::array();
    for (const auto& f : report.findings) {
        json finding;
        finding["severity"] = f.severity == Severity::Error ? "error" : "warning";
        finding["kind"] = finding_kind_name(f.kind);
        finding["ids"] = f.ids;
        finding["message"] = f.message;
        jf.push_back(std::move(finding));
    }
    doc["findings"] = std::move(jf);

    // Source links contributed by fired rules and derived facts.
    std::set<std::string> source_ids;
    for (const auto& rid : result.fired_rules) {
        auto it = model.rules.find(rid);
        if (it != model.rules.end())
            source_ids.insert(it->second.sources.begin(), it->second.sources.end());
    }
    for (const auto& fid : derived_fact_ids(result)) {
        auto it = model.facts.find(fid);
        if (it != model.facts.end())
            source_ids.insert(it->second.sources.begin(), it->second.sources.end());
    }
    json jsrc = json::array();
    for (const auto& sid : source_ids) {
        json src;
        src["id"] = sid;
        auto it = model.sources.find(sid);
        if (it != model.sources.end()) {
            src["kind"] = source_kind_name(it->second.kind);
            src["citation"] = it->second.citation;
        }
        jsrc.push_back(std::move(src));
    }
    doc["sources"] = std::move(jsrc);

    return doc.dump(2) + "\n";
}

std::optional<std::set<GroundAssertion>> parse_result_doc(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
    std::set<GroundAssertion> out;
    for (const char* key : {"base", "derived"}) {
        if (!doc.contains(key) || !doc[key].is_array()) return std::nullopt;
        for (const auto& item : doc[key]) {
            auto g = assertion_from_json(item);
            if (!g) return std::nullopt;
            out.insert(*g);
        }
    }
    return out;
}

}  // namespace nbspec
