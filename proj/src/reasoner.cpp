#include "nbspec/reasoner.hpp"

#include <algorithm>
#include <cassert>

namespace nbspec {

using namespace ast;

std::string GroundAssertion::to_string() const {
    switch (kind) {
        case Kind::EntityIn: return "entity_in(" + a + ", " + b + ", " + c + ")";
        case Kind::FactApplies: return "applies(" + a + ")";
        case Kind::ManeuverApplies: return "maneuver(" + a + ")";
        case Kind::MissionIs: return "mission_is(" + a + ")";
    }
    return "?";
}

WorkingMemory instantiate_scenario(const SpecModel& model, const ScenarioDecl& scen) {
    WorkingMemory wm;
    wm.scenario_id = scen.id;
    if (scen.ego_class) {
        wm.assertions.insert(
            GroundAssertion::entity_in("ego", *scen.ego_class, scen.ego_zone.value_or("")));
        if (scen.ego_mission)
            wm.assertions.insert(GroundAssertion::mission_is(*scen.ego_mission));
    }
    for (const auto& p : scen.placements)
        wm.assertions.insert(GroundAssertion::entity_in(p.entity_id, p.class_id, p.zone_id));
    for (const auto& f : scen.asserted_facts)
        wm.assertions.insert(GroundAssertion::fact_applies(f));
    (void)model;
    return wm;
}

GroundAssertion head_assertion(const RuleHead& head) {
    return head.kind == RuleHead::Kind::FactApplies
               ? GroundAssertion::fact_applies(head.target_id)
               : GroundAssertion::maneuver_applies(head.target_id);
}

namespace {

// Resolves a term against the binding; unbound variables yield nullopt.
std::optional<std::string> lookup(const Term& t, const Binding& b) {
    if (!t.is_variable) return t.name;
    auto it = b.find(t.name);
    if (it == b.end()) return std::nullopt;
    return it->second;
}

bool bind(const Term& t, const std::string& value, Binding& b) {
    if (!t.is_variable) return t.name == value;
    auto [it, inserted] = b.emplace(t.name, value);
    return inserted || it->second == value;
}

struct Matcher {
    const SpecModel& model;
    const ReasonerOptions& opts;
    const std::set<GroundAssertion>& full;
    const std::set<GroundAssertion>* delta = nullptr;  // semi-naive: atom at delta_pos joins delta
    size_t delta_pos = 0;
    const Rule& rule;
    std::vector<RuleMatch> out;

    bool class_ok(const std::string& instance_class, const std::string& atom_class) const {
        if (opts.subclass_match) return is_subclass(model, instance_class, atom_class);
        return instance_class == atom_class;
    }

    const std::set<GroundAssertion>& pool(size_t atom_idx) const {
        return (delta && atom_idx == delta_pos) ? *delta : full;
    }

    void search(size_t idx, Binding& binding, std::vector<GroundAssertion>& premises) {
        if (idx == rule.body.size()) {
            out.push_back({binding, premises});
            return;
        }
        const auto& src = pool(idx);
        const Atom& atom = rule.body[idx];
        if (const auto* ca = std::get_if<ClassAtom>(&atom)) {
            for (const auto& g : src) {
                if (g.kind != GroundAssertion::Kind::EntityIn) continue;
                if (!class_ok(g.b, ca->class_id)) continue;
                Binding saved = binding;
                if (bind(ca->term, g.a, binding)) {
                    premises.push_back(g);
                    search(idx + 1, binding, premises);
                    premises.pop_back();
                }
                binding = std::move(saved);
            }
        } else if (const auto* za = std::get_if<InZoneAtom>(&atom)) {
            for (const auto& g : src) {
                if (g.kind != GroundAssertion::Kind::EntityIn) continue;
                Binding saved = binding;
                if (bind(za->entity, g.a, binding) && bind(za->zone, g.c, binding)) {
                    premises.push_back(g);
                    search(idx + 1, binding, premises);
                    premises.pop_back();
                }
                binding = std::move(saved);
            }
        } else if (const auto* fa = std::get_if<AppliesAtom>(&atom)) {
            GroundAssertion want = GroundAssertion::fact_applies(fa->fact_id);
            if (src.count(want)) {
                premises.push_back(want);
                search(idx + 1, binding, premises);
                premises.pop_back();
            }
        } else {
            const auto& ma = std::get<MissionAtom>(atom);
            GroundAssertion want = GroundAssertion::mission_is(ma.mission_id);
            if (src.count(want)) {
                premises.push_back(want);
                search(idx + 1, binding, premises);
                premises.pop_back();
            }
        }
    }

    std::vector<RuleMatch> run() {
        Binding binding;
        std::vector<GroundAssertion> premises;
        search(0, binding, premises);
        // Deterministic order: by binding contents, then premises.
        std::sort(out.begin(), out.end(), [](const RuleMatch& a, const RuleMatch& b) {
            if (a.binding != b.binding) return a.binding < b.binding;
            return a.premises < b.premises;
        });
        out.erase(std::unique(out.begin(), out.end(),
                              [](const RuleMatch& a, const RuleMatch& b) {
                                  return a.binding == b.binding && a.premises == b.premises;
                              }),
                  out.end());
        return std::move(out);
    }
};

struct StepKey {
    GroundAssertion conclusion;
    std::string rule_id;
    Binding binding;
    auto operator<=>(const StepKey&) const = default;
};

struct Engine {
    const SpecModel& model;
    const ReasonerOptions& opts;
    InferenceResult result;
    std::set<StepKey> seen_steps;

    // Records a derivation, deduplicated per (conclusion, rule, binding).
    bool record(const Rule& rule, const RuleMatch& m, int iteration) {
        GroundAssertion conclusion = head_assertion(rule.head);
        StepKey key{conclusion, rule.id, m.binding};
        bool is_new_assertion = !result.derived.count(conclusion);
        if (seen_steps.insert(std::move(key)).second) {
            result.steps.push_back({conclusion, rule.id, m.binding, m.premises, iteration});
            result.fired_rules.insert(rule.id);
        }
        result.derived.insert(conclusion);
        return is_new_assertion;
    }
};

}  // namespace

std::vector<RuleMatch> match_rule(const SpecModel& model, const WorkingMemory& wm,
                                  const Rule& rule, const ReasonerOptions& opts) {
    Matcher m{model, opts, wm.assertions, nullptr, 0, rule};
    return m.run();
}

InferenceResult infer_naive(const SpecModel& model, const WorkingMemory& wm,
                            const ReasonerOptions& opts) {
    Engine eng{model, opts, {}, {}};
    eng.result.scenario_id = wm.scenario_id;
    eng.result.base = wm.assertions;
    eng.result.derived = wm.assertions;

    int iteration = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        ++iteration;
        WorkingMemory snapshot{wm.scenario_id, eng.result.derived};
        for (const auto& [id, rule] : model.rules) {
            for (const auto& m : match_rule(model, snapshot, rule, opts))
                changed |= eng.record(rule, m, iteration);
        }
        if (!changed) --iteration;  // the last pass added nothing
    }
    eng.result.iterations = iteration;
    return std::move(eng.result);
}

InferenceResult infer(const SpecModel& model, const WorkingMemory& wm,
                      const ReasonerOptions& opts) {
    Engine eng{model, opts, {}, {}};
    eng.result.scenario_id = wm.scenario_id;
    eng.result.base = wm.assertions;
    eng.result.derived = wm.assertions;

    std::set<GroundAssertion> delta = wm.assertions;
    int pass = 0;
    int productive_passes = 0;
    while (!delta.empty()) {
        ++pass;
        std::set<GroundAssertion> next_delta;
        // Match against the pass-start snapshot so a step's premises always
        // come from strictly earlier passes (trees need that monotonicity).
        const std::set<GroundAssertion> snapshot = eng.result.derived;
        for (const auto& [id, rule] : model.rules) {
            // Standard semi-naive split: each pass requires at least one body
            // atom to join against the previous iteration's delta.
            std::set<StepKey> local;
            for (size_t dpos = 0; dpos < rule.body.size(); ++dpos) {
                Matcher m{model, opts, snapshot, &delta, dpos, rule};
                for (const auto& match : m.run()) {
                    GroundAssertion conclusion = head_assertion(rule.head);
                    if (!local.insert({conclusion, rule.id, match.binding}).second) continue;
                    bool fresh = !eng.result.derived.count(conclusion);
                    eng.record(rule, match, pass);
                    if (fresh) next_delta.insert(conclusion);
                }
            }
        }
        if (!next_delta.empty()) productive_passes = pass;
        delta = std::move(next_delta);
    }
    eng.result.iterations = productive_passes;
    return std::move(eng.result);
}

std::set<std::string> applicable_maneuvers(const InferenceResult& result) {
    std::set<std::string> out;
    for (const auto& g : result.derived)
        if (g.kind == GroundAssertion::Kind::ManeuverApplies) out.insert(g.a);
    return out;
}

std::set<std::string> derived_fact_ids(const InferenceResult& result) {
    std::set<std::string> out;
    for (const auto& g : result.derived)
        if (g.kind == GroundAssertion::Kind::FactApplies) out.insert(g.a);
    return out;
}

bool replay_step(const SpecModel& model, const DerivationStep& step,
                 const ReasonerOptions& opts) {
    auto it = model.rules.find(step.rule_id);
    if (it == model.rules.end()) return false;
    WorkingMemory wm;
    for (const auto& p : step.premises) wm.assertions.insert(p);
    for (const auto& m : match_rule(model, wm, it->second, opts)) {
        if (m.binding == step.binding &&
            head_assertion(it->second.head) == step.conclusion)
            return true;
    }
    return false;
}

}  // namespace nbspec
