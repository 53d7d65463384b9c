#include "nbspec/consistency.hpp"

#include <algorithm>

namespace nbspec {

std::string finding_kind_name(FindingKind k) {
    switch (k) {
        case FindingKind::ConflictingManeuvers: return "ConflictingManeuvers";
        case FindingKind::NoManeuverInferred: return "NoManeuverInferred";
        case FindingKind::ExpectationMismatch: return "ExpectationMismatch";
        case FindingKind::RuleNeverFired: return "RuleNeverFired";
        case FindingKind::FactNeverDerived: return "FactNeverDerived";
    }
    return "?";
}

namespace {

std::string join(const std::set<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
    return out.empty() ? "(none)" : out;
}

void sort_findings(std::vector<Finding>& findings) {
    std::stable_sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
        if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
        return a.ids < b.ids;
    });
}

Verdict verdict_of(const std::vector<Finding>& findings) {
    for (const auto& f : findings)
        if (f.severity == Severity::Error) return Verdict::Inconsistent;
    return Verdict::Consistent;
}

}  // namespace

ConsistencyReport check_scenario(const SpecModel& model, const InferenceResult& result,
                                 const ast::ScenarioDecl& scen) {
    ConsistencyReport report;
    report.scenario_id = scen.id;
    std::set<std::string> maneuvers = applicable_maneuvers(result);

    for (const auto& group : model.conflict_groups) {
        std::vector<std::string> hit;
        for (const auto& m : group.members)
            if (maneuvers.count(m)) hit.push_back(m);
        if (hit.size() >= 2)
            report.findings.push_back({Severity::Error, FindingKind::ConflictingManeuvers, hit,
                                       "conflicting maneuvers derived together: " +
                                           join({hit.begin(), hit.end()})});
    }

    bool has_mission = scen.ego_mission.has_value();
    if (has_mission && maneuvers.empty())
        report.findings.push_back({Severity::Error, FindingKind::NoManeuverInferred, {},
                                   "mission '" + *scen.ego_mission +
                                       "' is set but no maneuver option was inferred"});

    if (scen.expected_maneuvers) {
        std::set<std::string> expected(scen.expected_maneuvers->begin(),
                                       scen.expected_maneuvers->end());
        if (expected != maneuvers) {
            std::vector<std::string> ids(expected.begin(), expected.end());
            ids.insert(ids.end(), maneuvers.begin(), maneuvers.end());
            std::sort(ids.begin(), ids.end());
            ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
            report.findings.push_back({Severity::Error, FindingKind::ExpectationMismatch, ids,
                                       "expected maneuvers {" + join(expected) +
                                           "} but derived {" + join(maneuvers) + "}"});
        }
    }

    for (const auto& [id, rule] : model.rules)
        if (!result.fired_rules.count(id))
            report.findings.push_back({Severity::Warning, FindingKind::RuleNeverFired, {id},
                                       "rule '" + id + "' never fired in this scenario"});

    std::set<std::string> derived = derived_fact_ids(result);
    for (const auto& [id, fact] : model.facts)
        if (fact.kind == FactKind::Inferred && !derived.count(id))
            report.findings.push_back({Severity::Warning, FindingKind::FactNeverDerived, {id},
                                       "inferred fact '" + id +
                                           "' was not derived in this scenario"});

    sort_findings(report.findings);
    report.verdict = verdict_of(report.findings);
    return report;
}

SuiteReport check_suite(const SpecModel& model,
                        const std::vector<std::pair<ast::ScenarioDecl, InferenceResult>>& runs) {
    SuiteReport suite;
    std::set<std::string> fired_anywhere;
    std::set<std::string> derived_anywhere;
    for (const auto& [scen, result] : runs) {
        ConsistencyReport r = check_scenario(model, result, scen);
        // Per-scenario dead-rule/fact warnings move to the aggregate view;
        // they only matter if dead across every scenario.
        r.findings.erase(std::remove_if(r.findings.begin(), r.findings.end(),
                                        [&](const Finding& f) {
                                            return runs.size() > 1 &&
                                                   (f.kind == FindingKind::RuleNeverFired ||
                                                    f.kind == FindingKind::FactNeverDerived);
                                        }),
                         r.findings.end());
        r.verdict = verdict_of(r.findings);
        suite.per_scenario.push_back(std::move(r));
        fired_anywhere.insert(result.fired_rules.begin(), result.fired_rules.end());
        for (const auto& f : derived_fact_ids(result)) derived_anywhere.insert(f);
    }
    if (runs.size() > 1) {
        for (const auto& [id, rule] : model.rules)
            if (!fired_anywhere.count(id))
                suite.cross_scenario.push_back({Severity::Warning, FindingKind::RuleNeverFired,
                                                {id},
                                                "rule '" + id + "' never fired in any scenario"});
        for (const auto& [id, fact] : model.facts)
            if (fact.kind == FactKind::Inferred && !derived_anywhere.count(id))
                suite.cross_scenario.push_back({Severity::Warning, FindingKind::FactNeverDerived,
                                                {id},
                                                "inferred fact '" + id +
                                                    "' was never derived in any scenario"});
    }
    sort_findings(suite.cross_scenario);
    suite.verdict = Verdict::Consistent;
    for (const auto& r : suite.per_scenario)
        if (r.verdict == Verdict::Inconsistent) suite.verdict = Verdict::Inconsistent;
    if (verdict_of(suite.cross_scenario) == Verdict::Inconsistent)
        suite.verdict = Verdict::Inconsistent;
    return suite;
}

}  // namespace nbspec
