#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fol/henkin.hpp"
#include "fol/io.hpp"

namespace {

std::ifstream open_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fol::FormatError("cannot open " + path);
    return in;
}

fol::FormalStructure load_sig(const std::string& path) {
    auto in = open_file(path);
    return fol::load_signature(in);
}

fol::FormulaSet load_formula_set(const std::string& path, const fol::FormalStructure& sig) {
    auto in = open_file(path);
    auto list = fol::load_formulas(in, sig);
    return fol::FormulaSet(list.begin(), list.end());
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty() || !out.empty()) out.push_back(cur);
    return out;
}

// A rule set given either as a decimal mask or as comma-separated rule names.
fol::RuleSet parse_rules(const std::string& spec) {
    if (spec.find_first_not_of("0123456789") == std::string::npos && !spec.empty()) {
        unsigned long v = std::stoul(spec);
        fol::mask_decode(static_cast<unsigned>(v));  // range check
        return fol::RuleSet{static_cast<unsigned>(v)};
    }
    std::set<fol::Rule> rules;
    for (const auto& name : split(spec, ',')) rules.insert(fol::rule_from_name(name));
    return fol::RuleSet{fol::mask_encode(rules)};
}

fol::SearchBudget make_budget(const fol::FormalStructure& sig, std::size_t steps,
                              int term_depth) {
    fol::SearchBudget budget;
    budget.max_steps = steps;
    budget.candidate_terms = fol::generate_terms(sig, term_depth);
    return budget;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toolkit for a ten-rule sequent calculus over polish-notation formulas"};
    app.require_subcommand(1);

    std::string sig_path, file_path, model_path, proof_path, seed_path, goal_text;
    std::string rules_spec = "1023", names_spec, probes_path;
    std::vector<std::string> formula_texts;
    unsigned decode_value = 0;
    std::size_t steps = 64;
    int term_depth = 1, formula_depth = 2, carrier_depth = 1;
    std::size_t universe_cap = 4000;
    bool print_proof = false, minus = false;

    auto* parse_cmd = app.add_subcommand("parse", "parse formulas and print them canonically");
    parse_cmd->add_option("--sig", sig_path, "signature file")->required();
    parse_cmd->add_option("--file", file_path, "formula file");
    parse_cmd->add_option("formulas", formula_texts, "formulas given inline");

    auto* mask_cmd = app.add_subcommand("mask", "convert between rule names and mask values");
    auto* names_opt = mask_cmd->add_option("--names", names_spec, "comma-separated rule names");
    auto* decode_opt = mask_cmd->add_option("--decode", decode_value, "mask value to spell out");
    names_opt->excludes(decode_opt);

    auto* check_cmd = app.add_subcommand("check-proof", "check a proof script");
    check_cmd->add_option("--sig", sig_path, "signature file")->required();
    check_cmd->add_option("--proof", proof_path, "proof script")->required();
    check_cmd->add_option("--rules", rules_spec, "admitted rules (mask or names)");

    auto* derive_cmd = app.add_subcommand("derive", "search for a proof of a goal");
    derive_cmd->add_option("--sig", sig_path, "signature file")->required();
    derive_cmd->add_option("--members", file_path, "antecedent formula file");
    derive_cmd->add_option("--goal", goal_text, "goal formula")->required();
    derive_cmd->add_option("--rules", rules_spec, "admitted rules (mask or names)");
    derive_cmd->add_option("--steps", steps, "longest proof to report");
    derive_cmd->add_option("--term-depth", term_depth, "candidate term depth");
    derive_cmd->add_flag("--print-proof", print_proof, "print the proof script on success");

    auto* cons_cmd = app.add_subcommand("consistent", "look for a contradiction");
    cons_cmd->add_option("--sig", sig_path, "signature file")->required();
    cons_cmd->add_option("--members", file_path, "formula file")->required();
    cons_cmd->add_option("--rules", rules_spec, "admitted rules (mask or names)");
    cons_cmd->add_option("--probes", probes_path, "extra probe formulas");
    cons_cmd->add_option("--term-depth", term_depth, "candidate term depth");

    auto* henkin_cmd = app.add_subcommand("henkin-run", "run the model-construction pipeline");
    henkin_cmd->add_option("--sig", sig_path, "signature file")->required();
    henkin_cmd->add_option("--seed", seed_path, "seed formula file")->required();
    henkin_cmd->add_option("--rules", rules_spec, "admitted rules (mask or names)")
        ->default_val("511");
    henkin_cmd->add_option("--formula-depth", formula_depth, "universe formula depth");
    henkin_cmd->add_option("--term-depth", term_depth, "universe term depth");
    henkin_cmd->add_option("--carrier-depth", carrier_depth, "carrier term depth");
    henkin_cmd->add_option("--universe-cap", universe_cap, "largest universe to sweep");
    henkin_cmd->add_option("--steps", steps, "longest proof to report");
    henkin_cmd->add_flag("--minus", minus, "maximize negatively");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate formulas in a finite model");
    eval_cmd->add_option("--sig", sig_path, "signature file")->required();
    eval_cmd->add_option("--model", model_path, "model file")->required();
    eval_cmd->add_option("--file", file_path, "formula file");
    eval_cmd->add_option("formulas", formula_texts, "formulas given inline");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (parse_cmd->parsed()) {
            auto sig = load_sig(sig_path);
            std::vector<fol::Formula> formulas;
            if (!file_path.empty()) {
                auto in = open_file(file_path);
                formulas = fol::load_formulas(in, sig);
            }
            for (const auto& text : formula_texts)
                formulas.push_back(fol::parse_formula(sig, text));
            for (const auto& f : formulas) std::cout << fol::to_string(f) << '\n';
            return 0;
        }

        if (mask_cmd->parsed()) {
            if (*names_opt) {
                std::cout << parse_rules(names_spec).mask << '\n';
            } else if (*decode_opt) {
                bool first = true;
                for (fol::Rule r : fol::mask_decode(decode_value)) {
                    if (!first) std::cout << ',';
                    std::cout << fol::rule_name(r);
                    first = false;
                }
                std::cout << '\n';
            } else {
                std::cerr << "mask: give --names or --decode\n";
                return 2;
            }
            return 0;
        }

        if (check_cmd->parsed()) {
            auto sig = load_sig(sig_path);
            auto in = open_file(proof_path);
            fol::Proof proof = fol::load_proof(in, sig);
            fol::RuleSet allowed = parse_rules(rules_spec);
            try {
                fol::CheckedProof checked = fol::check_proof(sig, proof);
                if (!checked.used.subset_of(allowed)) {
                    std::cout << "FAIL step=- proof uses rules outside mask "
                              << allowed.mask << " (used " << checked.used.mask << ")\n";
                    return 1;
                }
                std::cout << fol::report_ok(checked) << '\n';
                return 0;
            } catch (const fol::Error& e) {
                std::cout << fol::report_fail(e) << '\n';
                return 1;
            }
        }

        if (derive_cmd->parsed()) {
            auto sig = load_sig(sig_path);
            fol::FormulaSet members;
            if (!file_path.empty()) members = load_formula_set(file_path, sig);
            fol::Formula goal = fol::parse_formula(sig, goal_text);
            fol::Verdict v = fol::derives(sig, members, goal, parse_rules(rules_spec),
                                          make_budget(sig, steps, term_depth));
            if (!v.proved()) {
                std::cout << "UNKNOWN\n";
                return 1;
            }
            fol::CheckedProof checked = fol::check_proof(sig, *v.proof);
            std::cout << "PROVED final=" << fol::to_string(checked.final)
                      << " mask=" << checked.used.mask << " steps=" << v.proof->steps.size()
                      << '\n';
            if (print_proof) fol::save_proof(std::cout, *v.proof);
            return 0;
        }

        if (cons_cmd->parsed()) {
            auto sig = load_sig(sig_path);
            fol::FormulaSet members = load_formula_set(file_path, sig);
            fol::FormulaSet probes = members;
            if (!probes_path.empty()) {
                auto extra = load_formula_set(probes_path, sig);
                probes.insert(extra.begin(), extra.end());
            }
            fol::ConsistencyVerdict v =
                fol::is_consistent(sig, members, parse_rules(rules_spec),
                                   make_budget(sig, steps, term_depth), probes);
            if (v.inconsistent()) {
                fol::CheckedProof pos = fol::check_proof(sig, v.contradiction->first);
                std::cout << "INCONSISTENT witness=" << fol::to_string(pos.final.succedent)
                          << '\n';
                return 1;
            }
            std::cout << "NO-CONTRADICTION-FOUND\n";
            return 0;
        }

        if (henkin_cmd->parsed()) {
            auto sig = load_sig(sig_path);
            fol::FormulaSet seed = load_formula_set(seed_path, sig);
            fol::PipelineParams params;
            params.rules = parse_rules(rules_spec);
            params.budget.max_steps = steps;
            params.universe_formula_depth = formula_depth;
            params.universe_term_depth = term_depth;
            params.carrier_term_depth = carrier_depth;
            params.universe_cap = universe_cap;
            params.maximize_negatively = minus;
            try {
                fol::PipelineResult res = fol::satisfiability_pipeline(sig, seed, params);
                std::cout << "universe " << res.universe.size() << " formulas\n";
                for (const auto& w : res.witnesses.steps)
                    std::cout << "witness " << w.variable << " for "
                              << fol::to_string(w.existential) << ": " << w.note << '\n';
                std::cout << "members " << res.maximal.result.size() << '\n';
                std::cout << "classes " << res.model.equivalence.relation.class_count()
                          << '\n';
                std::cout << "model universe:";
                for (const auto& name : res.model.interpretation.universe)
                    std::cout << ' ' << name;
                std::cout << "\nSATISFIED\n";
                return 0;
            } catch (const fol::Error& e) {
                std::cout << "FAIL " << e.what() << '\n';
                return 1;
            }
        }

        if (eval_cmd->parsed()) {
            auto sig = load_sig(sig_path);
            auto model_in = open_file(model_path);
            fol::Interpretation m = fol::load_model(model_in, sig);
            std::vector<fol::Formula> formulas;
            if (!file_path.empty()) {
                auto in = open_file(file_path);
                formulas = fol::load_formulas(in, sig);
            }
            for (const auto& text : formula_texts)
                formulas.push_back(fol::parse_formula(sig, text));
            for (const auto& f : formulas)
                std::cout << (fol::eval_formula(m, f) ? "⊤" : "⊥") << '\n';
            return 0;
        }
    } catch (const fol::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
