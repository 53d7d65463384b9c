#include "nbspec/trace.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace nbspec {

namespace {

struct TreeBuilder {
    const InferenceResult& result;
    int max_trees;

    // Steps grouped per conclusion, in deterministic (rule, binding) order.
    std::map<GroundAssertion, std::vector<const DerivationStep*>> by_conclusion;

    explicit TreeBuilder(const InferenceResult& r, int cap) : result(r), max_trees(cap) {
        for (const auto& s : result.steps) by_conclusion[s.conclusion].push_back(&s);
        for (auto& [k, v] : by_conclusion)
            std::sort(v.begin(), v.end(), [](const DerivationStep* a, const DerivationStep* b) {
                if (a->rule_id != b->rule_id) return a->rule_id < b->rule_id;
                return a->binding < b->binding;
            });
    }

    // All derivations of `target` using steps below `max_iteration`.
    // Iterations strictly decrease toward the leaves, so recursion terminates.
    std::vector<DerivationTree> build(const GroundAssertion& target, int max_iteration,
                                      int budget) {
        std::vector<DerivationTree> out;
        if (budget <= 0) return out;
        if (result.base.count(target)) {
            out.push_back(DerivationTree{target, true, {}, {}, {}});
            return out;
        }
        auto it = by_conclusion.find(target);
        if (it == by_conclusion.end()) return out;
        for (const DerivationStep* step : it->second) {
            if (step->iteration >= max_iteration) continue;
            // Cartesian product of the premises' alternative subtrees.
            std::vector<std::vector<DerivationTree>> options;
            bool dead = false;
            for (const auto& premise : step->premises) {
                auto subs = build(premise, step->iteration, budget);
                if (subs.empty()) {
                    dead = true;
                    break;
                }
                options.push_back(std::move(subs));
            }
            if (dead) continue;
            std::vector<size_t> idx(options.size(), 0);
            while (true) {
                DerivationTree t{target, false, step->rule_id, step->binding, {}};
                for (size_t k = 0; k < options.size(); ++k)
                    t.children.push_back(options[k][idx[k]]);
                out.push_back(std::move(t));
                if (static_cast<int>(out.size()) >= budget) return out;
                size_t k = 0;
                for (; k < idx.size(); ++k) {
                    if (++idx[k] < options[k].size()) break;
                    idx[k] = 0;
                }
                if (k == idx.size()) break;
            }
        }
        return out;
    }
};

void collect_ids(const DerivationTree& t, std::set<std::string>& rules,
                 std::set<std::string>& facts) {
    if (t.root.kind == GroundAssertion::Kind::FactApplies) facts.insert(t.root.a);
    if (!t.is_leaf) rules.insert(t.rule_id);
    for (const auto& c : t.children) collect_ids(c, rules, facts);
}

}  // namespace

TraceResult derivation_trees(const InferenceResult& result, const GroundAssertion& target,
                             int max_trees) {
    TraceResult out;
    if (!result.derived.count(target)) {
        out.error = TraceError{"target-not-derived",
                               "assertion " + target.to_string() + " was not derived"};
        return out;
    }
    TreeBuilder builder(result, max_trees);
    out.trees = builder.build(target, std::numeric_limits<int>::max(), max_trees);
    return out;
}

TraceReportResult trace_report(const SpecModel& model, const InferenceResult& result,
                               const std::string& maneuver_id, int max_trees) {
    TraceReportResult out;
    GroundAssertion target = GroundAssertion::maneuver_applies(maneuver_id);
    TraceResult trees = derivation_trees(result, target, max_trees);
    if (trees.error) {
        out.error = trees.error;
        return out;
    }
    TraceReport report;
    report.target = maneuver_id;
    report.trees = std::move(trees.trees);
    for (const auto& t : report.trees) collect_ids(t, report.rules, report.facts);

    for (const auto& rid : report.rules) {
        const Rule& rule = model.rules.at(rid);
        if (rule.sources.empty()) report.missing_sources = true;
        report.sources.insert(rule.sources.begin(), rule.sources.end());
        report.assumptions.insert(rule.assumes.begin(), rule.assumes.end());
    }
    for (const auto& fid : report.facts) {
        const Fact& fact = model.facts.at(fid);
        if (fact.sources.empty()) report.missing_sources = true;
        report.sources.insert(fact.sources.begin(), fact.sources.end());
    }
    for (const auto& [aid, assumption] : model.assumptions) {
        for (const auto& attached : assumption.attached_to)
            if (report.rules.count(attached) || report.facts.count(attached))
                report.assumptions.insert(aid);
    }
    for (const auto& [aid, analysis] : model.analyses) {
        for (const auto& [text, refs] : analysis.subsumptions)
            for (const auto& ref : refs)
                if (report.rules.count(ref) || report.facts.count(ref))
                    report.analyses.insert(aid);
    }
    out.report = std::move(report);
    return out;
}

bool tree_replays(const SpecModel& model, const DerivationTree& tree,
                  const ReasonerOptions& opts) {
    if (tree.is_leaf) return true;
    DerivationStep step;
    step.conclusion = tree.root;
    step.rule_id = tree.rule_id;
    step.binding = tree.binding;
    for (const auto& c : tree.children) step.premises.push_back(c.root);
    if (!replay_step(model, step, opts)) return false;
    for (const auto& c : tree.children)
        if (!tree_replays(model, c, opts)) return false;
    return true;
}

std::string render_tree(const DerivationTree& tree, int indent) {
    std::string pad(static_cast<size_t>(indent) * 2, ' ');
    std::string out = pad + tree.root.to_string();
    if (tree.is_leaf) {
        out += "  [base]\n";
        return out;
    }
    out += "  <= rule " + tree.rule_id;
    if (!tree.binding.empty()) {
        out += " {";
        bool first = true;
        for (const auto& [var, val] : tree.binding) {
            if (!first) out += ", ";
            out += "?" + var + " -> " + val;
            first = false;
        }
        out += "}";
    }
    out += "\n";
    for (const auto& c : tree.children) out += render_tree(c, indent + 1);
    return out;
}

}  // namespace nbspec
