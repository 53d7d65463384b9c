#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nbspec/ast.hpp"
#include "nbspec/diagnostics.hpp"

namespace nbspec {

enum class Layer {
    L1_RoadLevel,
    L2_TrafficInfrastructure,
    L3_TemporaryManipulation,
    L4_MovableObject,
    L5_Environment,
};

std::string layer_name(Layer l);
std::optional<Layer> layer_from_name(const std::string& name);

enum class FactKind { Capturing, Inferred, ManeuverFact };
std::string fact_kind_name(FactKind k);

enum class SourceKind {
    Statute,
    AdministrativeGuideline,
    CourtCase,
    EthicsGuideline,
    ExpertAssumption,
    Other,
};
std::string source_kind_name(SourceKind k);

struct SceneEntityClass {
    std::string id;
    Layer layer = Layer::L1_RoadLevel;  // inherited from the root ancestor
    std::optional<std::string> parent;
    std::vector<std::string> characteristics;
    Span span;
};

struct Characteristic {
    std::string id;
    std::optional<std::string> parent;
    std::vector<ast::ParameterDecl> parameters;
    Span span;
};

struct Zone {
    std::string id;
    std::string grid;  // single implicit grid per model
    std::vector<std::pair<std::string, std::string>> neighbors;
    Span span;
};

struct KnowledgeSource {
    std::string id;
    SourceKind kind = SourceKind::Other;
    std::string citation;
    std::optional<std::string> excerpt;
    Span span;
};

struct Fact {
    std::string id;
    FactKind kind = FactKind::Capturing;
    std::vector<std::string> sources;
    std::string description;
    Span span;
};

struct ManeuverOption {
    std::string id;
    std::string lateral;
    std::string longitudinal;
    Span span;
};

struct Mission {
    std::string id;
    std::string description;
    Span span;
};

struct Rule {
    std::string id;
    std::vector<std::string> sources;
    std::vector<std::string> assumes;
    std::vector<ast::Atom> body;
    ast::RuleHead head;
    Span span;
};

struct ConflictGroup {
    std::set<std::string> members;
    Span span;
};

struct Assumption {
    std::string id;
    std::string statement;
    std::vector<std::string> attached_to;
    Span span;
};

struct AnalysisRecord {
    std::string id;
    std::string premise;
    std::vector<std::pair<std::string, std::string>> definitions;
    std::vector<std::pair<std::string, std::vector<std::string>>> subsumptions;
    std::string result;
    std::vector<std::string> assumptions;
    Span span;
};

// Immutable after resolve; safe to share read-only across threads.
struct SpecModel {
    std::map<std::string, SceneEntityClass> classes;
    std::map<std::string, Characteristic> characteristics;
    std::map<std::string, Zone> zones;
    std::map<std::string, KnowledgeSource> sources;
    std::map<std::string, Fact> facts;
    std::map<std::string, ManeuverOption> maneuvers;
    std::map<std::string, Mission> missions;
    std::map<std::string, Rule> rules;
    std::vector<ConflictGroup> conflict_groups;
    std::map<std::string, Assumption> assumptions;
    std::map<std::string, AnalysisRecord> analyses;
    std::map<std::string, ast::ScenarioDecl> scenarios;
};

struct ResolveResult {
    std::optional<SpecModel> model;  // set iff diags carry no errors
    std::vector<Diagnostic> diags;
};

// Cross-reference resolution. Returns the full list of resolution errors,
// never just the first one.
ResolveResult resolve(const std::vector<ast::RawDecl>& decls);

// Reflexive-transitive subclass test over parent links.
bool is_subclass(const SpecModel& model, const std::string& sub, const std::string& sup);

// Static consistency diagnostics; errors and lint warnings ordered by span.
std::vector<Diagnostic> validate_model(const SpecModel& model, bool strict_traceability);

}  // namespace nbspec
