#include "nbspec/formatter.hpp"

#include <sstream>

namespace nbspec {

using namespace ast;

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += "\"";
    return out;
}

std::string number(double v) {
    std::ostringstream os;
    os << v;
    std::string s = os.str();
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".0";
    return s;
}

std::string id_list(const std::vector<std::string>& ids) {
    std::string out = "[";
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ", ";
        out += ids[i];
    }
    out += "]";
    return out;
}

std::string term_text(const Term& t) { return t.is_variable ? "?" + t.name : t.name; }

std::string atom_text(const Atom& a) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ClassAtom>)
                return x.class_id + "(" + term_text(x.term) + ")";
            else if constexpr (std::is_same_v<T, InZoneAtom>)
                return "in_zone(" + term_text(x.entity) + ", " + term_text(x.zone) + ")";
            else if constexpr (std::is_same_v<T, AppliesAtom>)
                return "applies(" + x.fact_id + ")";
            else
                return "mission_is(" + x.mission_id + ")";
        },
        a);
}

struct Printer {
    std::ostringstream os;

    void characteristic(const CharacteristicDecl& c, const std::string& indent) {
        os << indent << "characteristic " << c.id;
        if (c.parent) os << " : " << *c.parent;
        for (const auto& p : c.parameters) {
            os << " param " << p.id << " unit = " << quote(p.unit);
            if (p.range)
                os << " range = [" << number(p.range->first) << ", " << number(p.range->second)
                   << "]";
        }
        os << "\n";
    }

    void operator()(const ClassDecl& d) {
        os << "class " << d.id;
        if (d.layer) os << " : " << *d.layer;
        else if (d.parent) os << " : " << *d.parent;
        if (!d.characteristics.empty()) {
            os << " {\n";
            for (const auto& c : d.characteristics) characteristic(c, "  ");
            os << "}";
        }
        os << "\n";
    }

    void operator()(const CharacteristicDecl& d) { characteristic(d, ""); }

    void operator()(const ZoneDecl& d) {
        os << "zone " << d.id;
        if (!d.neighbors.empty()) {
            os << " neighbors(";
            for (size_t i = 0; i < d.neighbors.size(); ++i) {
                if (i) os << ", ";
                os << d.neighbors[i].first << " -> " << d.neighbors[i].second;
            }
            os << ")";
        }
        os << "\n";
    }

    void operator()(const SourceDecl& d) {
        os << "source " << d.id << " kind = " << d.kind << " citation = " << quote(d.citation);
        if (d.excerpt) os << " excerpt = " << quote(*d.excerpt);
        os << "\n";
    }

    void operator()(const FactDecl& d) {
        os << "fact " << d.id << " kind = " << d.kind;
        if (!d.sources.empty()) os << " sources = " << id_list(d.sources);
        if (d.description) os << " desc = " << quote(*d.description);
        os << "\n";
    }

    void operator()(const ManeuverDecl& d) {
        os << "maneuver " << d.id << " lateral = " << d.lateral
           << " longitudinal = " << d.longitudinal << "\n";
    }

    void operator()(const MissionDecl& d) {
        os << "mission " << d.id;
        if (d.description) os << " desc = " << quote(*d.description);
        os << "\n";
    }

    void operator()(const RuleDecl& d) {
        os << "rule " << d.id;
        if (!d.sources.empty()) os << " sources = " << id_list(d.sources);
        if (!d.assumes.empty()) os << " assumes = " << id_list(d.assumes);
        os << " :\n";
        for (size_t i = 0; i < d.body.size(); ++i) {
            os << "  " << atom_text(d.body[i]);
            if (i + 1 < d.body.size()) os << ",";
            os << "\n";
        }
        os << "  => "
           << (d.head.kind == RuleHead::Kind::FactApplies ? "applies(" : "maneuver(")
           << d.head.target_id << ")\n";
    }

    void operator()(const ConflictDecl& d) {
        os << "conflict {";
        for (size_t i = 0; i < d.members.size(); ++i) {
            if (i) os << ", ";
            os << d.members[i];
        }
        os << "}\n";
    }

    void operator()(const AssumptionDecl& d) {
        os << "assumption " << d.id << " = " << quote(d.statement);
        if (!d.attached_to.empty()) os << " attached = " << id_list(d.attached_to);
        os << "\n";
    }

    void operator()(const AnalysisDecl& d) {
        os << "analysis " << d.id << " {\n";
        if (!d.premise.empty()) os << "  premise = " << quote(d.premise) << "\n";
        for (const auto& [text, src] : d.definitions)
            os << "  definition = " << quote(text) << " source = " << src << "\n";
        for (const auto& [text, refs] : d.subsumptions) {
            os << "  subsumption = " << quote(text);
            if (!refs.empty()) os << " refs = " << id_list(refs);
            os << "\n";
        }
        if (!d.result.empty()) os << "  result = " << quote(d.result) << "\n";
        if (!d.assumptions.empty()) os << "  assumes = " << id_list(d.assumptions) << "\n";
        os << "}\n";
    }

    void operator()(const ScenarioDecl& d) {
        os << "scenario " << d.id << " {\n";
        if (d.ego_class)
            os << "  ego " << *d.ego_class << " mission " << d.ego_mission.value_or("")
               << " in " << d.ego_zone.value_or("") << "\n";
        for (const auto& p : d.placements)
            os << "  entity " << p.entity_id << " : " << p.class_id << " in " << p.zone_id
               << "\n";
        for (const auto& f : d.asserted_facts) os << "  assert applies(" << f << ")\n";
        if (d.expected_maneuvers) {
            os << "  expect maneuvers = {";
            for (size_t i = 0; i < d.expected_maneuvers->size(); ++i) {
                if (i) os << ", ";
                os << (*d.expected_maneuvers)[i];
            }
            os << "}\n";
        }
        os << "}\n";
    }
};

}  // namespace

std::string format_canonical(const std::vector<RawDecl>& decls) {
    Printer p;
    for (const auto& d : decls) std::visit(p, d);
    return p.os.str();
}

}  // namespace nbspec
