#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "nbspec/model.hpp"

namespace nbspec {

struct GroundAssertion {
    enum class Kind { EntityIn, FactApplies, ManeuverApplies, MissionIs };
    Kind kind = Kind::FactApplies;
    // EntityIn: a=entity, b=class, c=zone. Others use a only.
    std::string a, b, c;

    static GroundAssertion entity_in(std::string entity, std::string cls, std::string zone) {
        return {Kind::EntityIn, std::move(entity), std::move(cls), std::move(zone)};
    }
    static GroundAssertion fact_applies(std::string fact) {
        return {Kind::FactApplies, std::move(fact), {}, {}};
    }
    static GroundAssertion maneuver_applies(std::string m) {
        return {Kind::ManeuverApplies, std::move(m), {}, {}};
    }
    static GroundAssertion mission_is(std::string m) {
        return {Kind::MissionIs, std::move(m), {}, {}};
    }

    auto operator<=>(const GroundAssertion&) const = default;
    std::string to_string() const;
};

struct WorkingMemory {
    std::string scenario_id;
    std::set<GroundAssertion> assertions;
};

using Binding = std::map<std::string, std::string>;

struct DerivationStep {
    GroundAssertion conclusion;
    std::string rule_id;
    Binding binding;
    std::vector<GroundAssertion> premises;
    int iteration = 0;  // premises live strictly earlier; base assertions are iteration 0
};

struct InferenceResult {
    std::string scenario_id;
    std::set<GroundAssertion> base;
    std::set<GroundAssertion> derived;  // includes base
    std::vector<DerivationStep> steps;
    std::set<std::string> fired_rules;
    int iterations = 0;
};

struct ReasonerOptions {
    bool subclass_match = true;  // class atoms accept subclass instances
};

// Grounds a scenario start scene into base assertions.
WorkingMemory instantiate_scenario(const SpecModel& model, const ast::ScenarioDecl& scen);

struct RuleMatch {
    Binding binding;
    std::vector<GroundAssertion> premises;  // one per body atom, in atom order
};

// Every binding under which all body atoms hold in wm.
std::vector<RuleMatch> match_rule(const SpecModel& model, const WorkingMemory& wm,
                                  const Rule& rule, const ReasonerOptions& opts = {});

// Reference fixpoint: full passes over every rule until nothing new appears.
InferenceResult infer_naive(const SpecModel& model, const WorkingMemory& wm,
                            const ReasonerOptions& opts = {});

// Semi-naive fixpoint; derives exactly the same set as infer_naive.
InferenceResult infer(const SpecModel& model, const WorkingMemory& wm,
                      const ReasonerOptions& opts = {});

std::set<std::string> applicable_maneuvers(const InferenceResult& result);
std::set<std::string> derived_fact_ids(const InferenceResult& result);

// Re-runs one recorded step: true iff applying its rule under its binding to
// exactly its premises reproduces its conclusion.
bool replay_step(const SpecModel& model, const DerivationStep& step,
                 const ReasonerOptions& opts = {});

GroundAssertion head_assertion(const ast::RuleHead& head);

}  // namespace nbspec
