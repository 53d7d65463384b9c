#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nbspec/diagnostics.hpp"

namespace nbspec::ast {

// A rule term: either a variable (?name) or a bare constant identifier.
struct Term {
    bool is_variable = false;
    std::string name;

    bool operator==(const Term&) const = default;
};

struct ClassAtom {       // ClassName(term)
    std::string class_id;
    Term term;
    bool operator==(const ClassAtom&) const = default;
};
struct InZoneAtom {      // in_zone(entity, zone)
    Term entity;
    Term zone;
    bool operator==(const InZoneAtom&) const = default;
};
struct AppliesAtom {     // applies(FactId)
    std::string fact_id;
    bool operator==(const AppliesAtom&) const = default;
};
struct MissionAtom {     // mission_is(MissionId)
    std::string mission_id;
    bool operator==(const MissionAtom&) const = default;
};

using Atom = std::variant<ClassAtom, InZoneAtom, AppliesAtom, MissionAtom>;

struct RuleHead {
    enum class Kind { FactApplies, Maneuver } kind = Kind::FactApplies;
    std::string target_id;
    bool operator==(const RuleHead&) const = default;
};

struct ParameterDecl {
    std::string id;
    std::string unit;
    std::optional<std::pair<double, double>> range;
    Span span;
    bool operator==(const ParameterDecl&) const = default;
};

struct CharacteristicDecl {
    std::string id;
    std::optional<std::string> parent;
    std::vector<ParameterDecl> parameters;
    Span span;
    bool operator==(const CharacteristicDecl&) const = default;
};

struct ClassDecl {
    std::string id;
    std::optional<std::string> layer;   // set when the ':' names a layer tag
    std::optional<std::string> parent;  // set when it names another class
    std::vector<CharacteristicDecl> characteristics;
    Span span;
    bool operator==(const ClassDecl&) const = default;
};

struct ZoneDecl {
    std::string id;
    std::vector<std::pair<std::string, std::string>> neighbors;  // (direction, zone)
    Span span;
    bool operator==(const ZoneDecl&) const = default;
};

struct SourceDecl {
    std::string id;
    std::string kind;
    std::string citation;
    std::optional<std::string> excerpt;
    Span span;
    bool operator==(const SourceDecl&) const = default;
};

struct FactDecl {
    std::string id;
    std::string kind;  // capturing | inferred | maneuver_fact
    std::vector<std::string> sources;
    std::optional<std::string> description;
    Span span;
    bool operator==(const FactDecl&) const = default;
};

struct ManeuverDecl {
    std::string id;
    std::string lateral;
    std::string longitudinal;
    Span span;
    bool operator==(const ManeuverDecl&) const = default;
};

struct MissionDecl {
    std::string id;
    std::optional<std::string> description;
    Span span;
    bool operator==(const MissionDecl&) const = default;
};

struct RuleDecl {
    std::string id;
    std::vector<std::string> sources;
    std::vector<std::string> assumes;
    std::vector<Atom> body;
    RuleHead head;
    Span span;
    bool operator==(const RuleDecl&) const = default;
};

struct ConflictDecl {
    std::vector<std::string> members;
    Span span;
    bool operator==(const ConflictDecl&) const = default;
};

struct AssumptionDecl {
    std::string id;
    std::string statement;
    std::vector<std::string> attached_to;
    Span span;
    bool operator==(const AssumptionDecl&) const = default;
};

struct AnalysisDecl {
    std::string id;
    std::string premise;
    std::vector<std::pair<std::string, std::string>> definitions;  // (text, source)
    std::vector<std::pair<std::string, std::vector<std::string>>> subsumptions;  // (text, refs)
    std::string result;
    std::vector<std::string> assumptions;
    Span span;
    bool operator==(const AnalysisDecl&) const = default;
};

struct Placement {
    std::string entity_id;
    std::string class_id;
    std::string zone_id;
    Span span;
    bool operator==(const Placement&) const = default;
};

struct ScenarioDecl {
    std::string id;
    // The ego line places an entity named "ego" and sets the mission.
    std::optional<std::string> ego_class;
    std::optional<std::string> ego_mission;
    std::optional<std::string> ego_zone;
    std::vector<Placement> placements;
    std::vector<std::string> asserted_facts;
    std::optional<std::vector<std::string>> expected_maneuvers;
    Span span;
    bool operator==(const ScenarioDecl&) const = default;
};

using RawDecl = std::variant<ClassDecl, CharacteristicDecl, ZoneDecl, SourceDecl, FactDecl,
                             ManeuverDecl, MissionDecl, RuleDecl, ConflictDecl, AssumptionDecl,
                             AnalysisDecl, ScenarioDecl>;

inline const Span& decl_span(const RawDecl& d) {
    return std::visit([](const auto& x) -> const Span& { return x.span; }, d);
}

}  // namespace nbspec::ast
