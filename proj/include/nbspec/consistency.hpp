#pragma once

#include <string>
#include <vector>

#include "nbspec/reasoner.hpp"

namespace nbspec {

enum class FindingKind {
    ConflictingManeuvers,
    NoManeuverInferred,
    ExpectationMismatch,
    RuleNeverFired,
    FactNeverDerived,
};

std::string finding_kind_name(FindingKind k);

struct Finding {
    Severity severity = Severity::Error;
    FindingKind kind = FindingKind::ExpectationMismatch;
    std::vector<std::string> ids;  // involved maneuver/rule/fact ids, sorted
    std::string message;

    bool operator==(const Finding&) const = default;
};

enum class Verdict { Consistent, Inconsistent };

struct ConsistencyReport {
    std::string scenario_id;
    std::vector<Finding> findings;  // ordered by kind, then ids
    Verdict verdict = Verdict::Consistent;
};

struct SuiteReport {
    std::vector<ConsistencyReport> per_scenario;
    std::vector<Finding> cross_scenario;  // rules/facts dead in every scenario
    Verdict verdict = Verdict::Consistent;
};

ConsistencyReport check_scenario(const SpecModel& model, const InferenceResult& result,
                                 const ast::ScenarioDecl& scen);

SuiteReport check_suite(const SpecModel& model,
                        const std::vector<std::pair<ast::ScenarioDecl, InferenceResult>>& runs);

}  // namespace nbspec
