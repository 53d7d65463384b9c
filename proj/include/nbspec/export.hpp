#pragma once

#include <string>
#include <vector>

#include "nbspec/consistency.hpp"
#include "nbspec/reasoner.hpp"

namespace nbspec {

struct CbgNode {
    std::string id;
    std::string label;
    std::string kind;  // "fact" | "maneuver" | "entity"

    auto operator<=>(const CbgNode&) const = default;
};

struct CbgEdge {
    std::string from;
    std::string to;
    std::string rule_id;

    auto operator<=>(const CbgEdge&) const = default;
};

struct CausalBehaviorGraph {
    std::vector<CbgNode> nodes;  // sorted by id
    std::vector<CbgEdge> edges;  // sorted by (from, to, rule)
};

struct CbgOptions {
    bool include_entities = true;
};

CausalBehaviorGraph build_cbg(const SpecModel& model, const InferenceResult& result,
                              const CbgOptions& opts = {});

// Node-wise and edge-wise union; shared nodes merge by id.
CausalBehaviorGraph cbg_union(const std::vector<CausalBehaviorGraph>& graphs);

bool cbg_is_acyclic(const CausalBehaviorGraph& graph);

// Deterministic Graphviz text: nodes sorted by id, stable quoting.
std::string emit_dot(const CausalBehaviorGraph& graph);

struct SequenceResult {
    std::string text;
    std::optional<std::string> error;  // "no-ego" when the scenario lacks an ego entity
};

SequenceResult emit_sequence(const SpecModel& model, const InferenceResult& result);

std::string emit_result_doc(const SpecModel& model, const InferenceResult& result,
                            const ConsistencyReport& report);

// Parse-back for the result document; returns the derived assertion set.
std::optional<std::set<GroundAssertion>> parse_result_doc(const std::string& text);

}  // namespace nbspec
