#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nbspec/reasoner.hpp"

namespace nbspec {

// One reconstructed derivation: leaves are scenario base assertions, inner
// nodes carry the rule application that produced their assertion.
struct DerivationTree {
    GroundAssertion root;
    bool is_leaf = true;
    std::string rule_id;
    Binding binding;
    std::vector<DerivationTree> children;
};

struct TraceError {
    std::string code;  // "target-not-derived"
    std::string message;
};

struct TraceResult {
    std::vector<DerivationTree> trees;
    std::optional<TraceError> error;
};

// Up to max_trees distinct derivations of target, enumerated in lexicographic
// (rule id, binding) order at every node.
TraceResult derivation_trees(const InferenceResult& result, const GroundAssertion& target,
                             int max_trees);

struct TraceReport {
    std::string target;  // maneuver id
    std::vector<DerivationTree> trees;
    std::set<std::string> rules;        // rule ids appearing in the trees
    std::set<std::string> facts;        // fact ids appearing in the trees
    std::set<std::string> sources;      // union over those rules and facts
    std::set<std::string> assumptions;  // via rule `assumes` and `attached` links
    std::set<std::string> analyses;     // analyses whose subsumptions reference them
    bool missing_sources = false;       // some contributing rule/fact has no source link
};

struct TraceReportResult {
    std::optional<TraceReport> report;
    std::optional<TraceError> error;
};

TraceReportResult trace_report(const SpecModel& model, const InferenceResult& result,
                               const std::string& maneuver_id, int max_trees = 32);

// Soundness helper: replays every inner node as a rule application.
bool tree_replays(const SpecModel& model, const DerivationTree& tree,
                  const ReasonerOptions& opts = {});

std::string render_tree(const DerivationTree& tree, int indent = 0);

}  // namespace nbspec
