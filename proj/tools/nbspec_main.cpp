#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nbspec/consistency.hpp"
#include "nbspec/export.hpp"
#include "nbspec/formatter.hpp"
#include "nbspec/model.hpp"
#include "nbspec/parser.hpp"
#include "nbspec/reasoner.hpp"
#include "nbspec/trace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSemantic = 1;
constexpr int kExitUsage = 2;

constexpr const char* kVersion = "0.3.0";

struct LoadedInputs {
    std::vector<nbspec::ast::RawDecl> decls;           // spec + scenario declarations
    std::vector<nbspec::ast::ScenarioDecl> scenarios;  // in argument order
    std::vector<nbspec::Diagnostic> parse_diags;
    bool io_error = false;
};

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

LoadedInputs load_inputs(const std::vector<std::string>& paths) {
    LoadedInputs out;
    for (const auto& path : paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            std::cerr << "error: cannot read '" << path << "'\n";
            out.io_error = true;
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string text = buf.str();
        if (ends_with(path, ".nscen")) {
            auto r = nbspec::parse_scenario_text(text, path);
            out.parse_diags.insert(out.parse_diags.end(), r.diags.begin(), r.diags.end());
            if (r.scenario) {
                out.scenarios.push_back(*r.scenario);
                out.decls.emplace_back(std::move(*r.scenario));
            }
        } else {
            auto r = nbspec::parse_spec_text(text, path);
            out.parse_diags.insert(out.parse_diags.end(), r.diags.begin(), r.diags.end());
            for (auto& d : r.decls) {
                if (auto* s = std::get_if<nbspec::ast::ScenarioDecl>(&d))
                    out.scenarios.push_back(*s);
                out.decls.push_back(std::move(d));
            }
        }
    }
    return out;
}

void print_diags(const std::vector<nbspec::Diagnostic>& diags) {
    for (const auto& d : diags) std::cerr << nbspec::format_diagnostic(d) << "\n";
}

bool write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return true;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return false;
    }
    out << text;
    return true;
}

struct CommonOpts {
    std::vector<std::string> files;
    bool strict = false;
    bool no_subclass = false;
    std::string format = "text";
    std::string out_path;
    int max_trees = 1;
};

// Parse + resolve; on failure prints diagnostics and sets exit code.
std::optional<nbspec::SpecModel> build_model(const CommonOpts& opts, LoadedInputs& inputs,
                                             int& exit_code) {
    inputs = load_inputs(opts.files);
    print_diags(inputs.parse_diags);
    if (inputs.io_error || nbspec::has_errors(inputs.parse_diags)) {
        exit_code = kExitUsage;
        return std::nullopt;
    }
    auto resolved = nbspec::resolve(inputs.decls);
    print_diags(resolved.diags);
    if (!resolved.model) {
        exit_code = kExitSemantic;
        return std::nullopt;
    }
    return std::move(resolved.model);
}

nbspec::ReasonerOptions reasoner_opts(const CommonOpts& opts) {
    nbspec::ReasonerOptions r;
    r.subclass_match = !opts.no_subclass;
    return r;
}

void print_finding(const std::string& scenario, const nbspec::Finding& f) {
    std::cout << scenario << ": " << (f.severity == nbspec::Severity::Error ? "error" : "warning")
              << " " << finding_kind_name(f.kind) << ": " << f.message << "\n";
}

int cmd_check(const CommonOpts& opts) {
    int exit_code = kExitOk;
    LoadedInputs inputs;
    auto model = build_model(opts, inputs, exit_code);
    if (!model) return exit_code;

    auto diags = nbspec::validate_model(*model, opts.strict);
    print_diags(diags);
    bool failed = nbspec::has_errors(diags);

    if (!inputs.scenarios.empty()) {
        std::vector<std::pair<nbspec::ast::ScenarioDecl, nbspec::InferenceResult>> runs;
        for (const auto& scen : inputs.scenarios) {
            auto wm = nbspec::instantiate_scenario(*model, scen);
            runs.emplace_back(scen, nbspec::infer(*model, wm, reasoner_opts(opts)));
        }
        auto suite = nbspec::check_suite(*model, runs);
        for (const auto& report : suite.per_scenario)
            for (const auto& f : report.findings) print_finding(report.scenario_id, f);
        for (const auto& f : suite.cross_scenario) print_finding("suite", f);
        if (suite.verdict == nbspec::Verdict::Inconsistent) failed = true;
        std::cout << "verdict: "
                  << (suite.verdict == nbspec::Verdict::Consistent ? "consistent"
                                                                   : "inconsistent")
                  << "\n";
    }
    return failed ? kExitSemantic : kExitOk;
}

int cmd_infer(const CommonOpts& opts) {
    int exit_code = kExitOk;
    LoadedInputs inputs;
    auto model = build_model(opts, inputs, exit_code);
    if (!model) return exit_code;

    std::string doc_out;
    for (const auto& scen : inputs.scenarios) {
        auto wm = nbspec::instantiate_scenario(*model, scen);
        auto result = nbspec::infer(*model, wm, reasoner_opts(opts));
        if (opts.format == "doc") {
            auto report = nbspec::check_scenario(*model, result, scen);
            doc_out += nbspec::emit_result_doc(*model, result, report);
            continue;
        }
        std::cout << "scenario " << scen.id << "\n";
        for (const auto& f : nbspec::derived_fact_ids(result)) std::cout << "  fact " << f << "\n";
        for (const auto& m : nbspec::applicable_maneuvers(result))
            std::cout << "  maneuver " << m << "\n";
    }
    if (opts.format == "doc") {
        if (inputs.scenarios.empty()) {
            nbspec::InferenceResult empty;
            doc_out = nbspec::emit_result_doc(*model, empty, {});
        }
        if (!write_output(opts.out_path, doc_out)) return kExitUsage;
    }
    return kExitOk;
}

int cmd_trace(CommonOpts opts) {
    // Last positional is the maneuver id: `trace spec.nspec scen.nscen KeepLane_Stop`.
    if (opts.files.size() < 2) {
        std::cerr << "usage: nbspec trace <files...> <maneuver>\n";
        return kExitUsage;
    }
    std::string maneuver_id = opts.files.back();
    opts.files.pop_back();
    int exit_code = kExitOk;
    LoadedInputs inputs;
    auto model = build_model(opts, inputs, exit_code);
    if (!model) return exit_code;
    if (inputs.scenarios.empty()) {
        std::cerr << "error: trace requires a scenario file\n";
        return kExitUsage;
    }
    bool any_failed = false;
    for (const auto& scen : inputs.scenarios) {
        auto wm = nbspec::instantiate_scenario(*model, scen);
        auto result = nbspec::infer(*model, wm, reasoner_opts(opts));
        auto traced = nbspec::trace_report(*model, result, maneuver_id, opts.max_trees);
        if (traced.error) {
            std::cout << scen.id << ": " << traced.error->code << ": " << traced.error->message
                      << "\n";
            any_failed = true;
            continue;
        }
        const auto& report = *traced.report;
        std::cout << "scenario " << scen.id << ": trace for maneuver " << maneuver_id << "\n";
        for (size_t i = 0; i < report.trees.size(); ++i) {
            std::cout << "derivation " << (i + 1) << ":\n";
            std::cout << nbspec::render_tree(report.trees[i], 1);
        }
        std::cout << "sources:";
        for (const auto& s : report.sources) {
            std::cout << " " << s;
        }
        std::cout << "\n";
        for (const auto& s : report.sources) {
            const auto& src = model->sources.at(s);
            std::cout << "  source " << s << " [" << nbspec::source_kind_name(src.kind)
                      << "] " << src.citation << "\n";
        }
        std::cout << "assumptions:";
        for (const auto& a : report.assumptions) std::cout << " " << a;
        std::cout << "\n";
        for (const auto& a : report.assumptions)
            std::cout << "  assumption " << a << ": " << model->assumptions.at(a).statement
                      << "\n";
        std::cout << "analyses:";
        for (const auto& a : report.analyses) std::cout << " " << a;
        std::cout << "\n";
        if (report.missing_sources)
            std::cout << "warning: some contributing rules or facts carry no source link\n";
    }
    return any_failed ? kExitSemantic : kExitOk;
}

int cmd_export(const CommonOpts& opts) {
    int exit_code = kExitOk;
    LoadedInputs inputs;
    auto model = build_model(opts, inputs, exit_code);
    if (!model) return exit_code;

    auto ropts = reasoner_opts(opts);
    if (opts.format == "dot") {
        std::vector<nbspec::CausalBehaviorGraph> graphs;
        for (const auto& scen : inputs.scenarios) {
            auto wm = nbspec::instantiate_scenario(*model, scen);
            auto result = nbspec::infer(*model, wm, ropts);
            graphs.push_back(nbspec::build_cbg(*model, result));
        }
        auto graph = nbspec::cbg_union(graphs);
        return write_output(opts.out_path, nbspec::emit_dot(graph)) ? kExitOk : kExitUsage;
    }
    if (opts.format == "seq") {
        std::string text;
        for (const auto& scen : inputs.scenarios) {
            auto wm = nbspec::instantiate_scenario(*model, scen);
            auto result = nbspec::infer(*model, wm, ropts);
            auto seq = nbspec::emit_sequence(*model, result);
            if (seq.error) {
                std::cerr << "error: scenario " << scen.id << ": " << *seq.error << "\n";
                return kExitSemantic;
            }
            text += seq.text;
        }
        return write_output(opts.out_path, text) ? kExitOk : kExitUsage;
    }
    if (opts.format == "doc" || opts.format == "text") {
        std::string text;
        for (const auto& scen : inputs.scenarios) {
            auto wm = nbspec::instantiate_scenario(*model, scen);
            auto result = nbspec::infer(*model, wm, ropts);
            auto report = nbspec::check_scenario(*model, result, scen);
            text += nbspec::emit_result_doc(*model, result, report);
        }
        if (inputs.scenarios.empty()) {
            nbspec::InferenceResult empty;
            text = nbspec::emit_result_doc(*model, empty, {});
        }
        return write_output(opts.out_path, text) ? kExitOk : kExitUsage;
    }
    std::cerr << "error: unknown export format '" << opts.format << "'\n";
    return kExitUsage;
}

int cmd_fmt(const CommonOpts& opts) {
    LoadedInputs inputs = load_inputs(opts.files);
    print_diags(inputs.parse_diags);
    if (inputs.io_error || nbspec::has_errors(inputs.parse_diags)) return kExitUsage;
    return write_output(opts.out_path, nbspec::format_canonical(inputs.decls)) ? kExitOk
                                                                               : kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nbspec - executable behavior specifications for automated driving"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto add_common = [&](CLI::App* cmd, bool needs_files) {
        auto* files = cmd->add_option("files", opts.files, "spec (.nspec) and scenario (.nscen) files");
        if (needs_files) files->required();
        cmd->add_flag("--strict-traceability", opts.strict,
                      "require a knowledge-source link on every fact");
        cmd->add_flag("--no-subclass-match", opts.no_subclass,
                      "class atoms match declared classes literally");
        cmd->add_option("--format", opts.format, "output format: text|doc|dot|seq");
        cmd->add_option("--out", opts.out_path, "write output to PATH instead of stdout");
        cmd->add_option("--max-trees", opts.max_trees, "derivation trees per target");
    };

    auto* check = app.add_subcommand("check", "resolve, validate and verify scenarios");
    add_common(check, true);
    auto* infer = app.add_subcommand("infer", "derive facts and maneuver options");
    add_common(infer, true);
    auto* trace = app.add_subcommand("trace", "trace a maneuver back to knowledge sources");
    add_common(trace, true);
    auto* exportc = app.add_subcommand("export", "emit dot/seq/doc artifacts");
    add_common(exportc, true);
    auto* fmt = app.add_subcommand("fmt", "canonical formatter");
    add_common(fmt, true);
    auto* version = app.add_subcommand("version", "print version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (version->parsed()) {
        std::cout << "nbspec " << kVersion << "\n";
        return kExitOk;
    }
    if (check->parsed()) return cmd_check(opts);
    if (infer->parsed()) return cmd_infer(opts);
    if (trace->parsed()) return cmd_trace(opts);
    if (exportc->parsed()) return cmd_export(opts);
    if (fmt->parsed()) return cmd_fmt(opts);
    return kExitUsage;
}
