#include "fol/io.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace fol {

namespace {

std::string clean_line(const std::string& raw) {
    std::string line = raw;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = line.find_last_not_of(" \t\r");
    return line.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream ss(s);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
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
    out.push_back(cur);
    return out;
}

[[noreturn]] void bad_line(std::size_t lineno, const std::string& what) {
    throw FormatError("line " + std::to_string(lineno) + ": " + what);
}

int parse_int(const std::string& s, std::size_t lineno) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        bad_line(lineno, "not a number: " + s);
    }
    if (pos != s.size()) bad_line(lineno, "not a number: " + s);
    return v;
}

// Reads cleaned, non-empty lines with their one-based numbers.
std::vector<std::pair<std::size_t, std::string>> content_lines(std::istream& in) {
    std::vector<std::pair<std::size_t, std::string>> out;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = clean_line(raw);
        if (!line.empty()) out.emplace_back(lineno, line);
    }
    return out;
}

}  // namespace

FormalStructure load_signature(std::istream& in) {
    std::map<std::string, int> symbols;
    int pool = 0;
    bool pool_seen = false;
    for (const auto& [lineno, line] : content_lines(in)) {
        auto toks = split_ws(line);
        if (toks[0] == "symbol") {
            if (toks.size() != 3) bad_line(lineno, "expected `symbol <name> <arity>`");
            if (!symbols.emplace(toks[1], parse_int(toks[2], lineno)).second)
                bad_line(lineno, "duplicate symbol " + toks[1]);
        } else if (toks[0] == "pool") {
            if (toks.size() != 2) bad_line(lineno, "expected `pool <count>`");
            if (pool_seen) bad_line(lineno, "duplicate pool line");
            pool = parse_int(toks[1], lineno);
            pool_seen = true;
        } else {
            bad_line(lineno, "unknown directive " + toks[0]);
        }
    }
    return FormalStructure::make(symbols, pool);
}

void save_signature(std::ostream& out, const FormalStructure& sig) {
    for (const auto& [name, arity] : sig.symbols)
        out << "symbol " << name << ' ' << arity << '\n';
    out << "pool " << sig.variable_pool_size << '\n';
}

std::vector<Formula> load_formulas(std::istream& in, const FormalStructure& sig) {
    std::vector<Formula> out;
    for (const auto& [lineno, line] : content_lines(in)) {
        try {
            out.push_back(parse_formula(sig, line));
        } catch (const Error& e) {
            bad_line(lineno, e.what());
        }
    }
    return out;
}

void save_formulas(std::ostream& out, const FormulaSet& phi) {
    for (const auto& f : phi) out << to_string(f) << '\n';
}

namespace {

std::size_t model_element(const Interpretation& m, const std::string& name,
                          std::size_t lineno) {
    for (std::size_t i = 0; i < m.universe.size(); ++i)
        if (m.universe[i] == name) return i;
    bad_line(lineno, "unknown universe element " + name);
}

}  // namespace

Interpretation load_model(std::istream& in, const FormalStructure& sig) {
    Interpretation m;
    m.structure = sig;
    bool have_universe = false;
    for (const auto& [lineno, line] : content_lines(in)) {
        auto toks = split_ws(line);
        if (toks[0] == "universe") {
            if (have_universe) bad_line(lineno, "duplicate universe line");
            if (toks.size() < 2) bad_line(lineno, "empty universe");
            for (std::size_t i = 1; i < toks.size(); ++i) {
                for (std::size_t j = 1; j < i; ++j)
                    if (toks[j] == toks[i]) bad_line(lineno, "repeated element " + toks[i]);
                m.universe.push_back(toks[i]);
            }
            have_universe = true;
            continue;
        }
        if (!have_universe) bad_line(lineno, "universe line must come first");
        if (toks[0] == "const") {
            if (toks.size() != 3) bad_line(lineno, "expected `const <symbol> <element>`");
            if (sig.symbols.count(toks[1]) == 0 || sig.arity(toks[1]) != 0)
                bad_line(lineno, toks[1] + " is not a constant");
            if (!m.constants.emplace(toks[1], model_element(m, toks[2], lineno)).second)
                bad_line(lineno, "duplicate constant entry " + toks[1]);
        } else if (toks[0] == "fun" || toks[0] == "rel") {
            bool is_fun = toks[0] == "fun";
            if (toks.size() < 2 || sig.symbols.count(toks[1]) == 0)
                bad_line(lineno, "unknown symbol");
            int arity = sig.arity(toks[1]);
            if (is_fun ? arity <= 0 : arity >= 0)
                bad_line(lineno, toks[1] + (is_fun ? " is not a function" : " is not a relation"));
            std::size_t n = static_cast<std::size_t>(is_fun ? arity : -arity);
            if (toks.size() != n + 3) bad_line(lineno, "wrong entry width for " + toks[1]);
            std::vector<std::size_t> tuple;
            for (std::size_t i = 0; i < n; ++i)
                tuple.push_back(model_element(m, toks[2 + i], lineno));
            if (is_fun) {
                std::size_t value = model_element(m, toks.back(), lineno);
                if (!m.functions[toks[1]].emplace(std::move(tuple), value).second)
                    bad_line(lineno, "duplicate function entry");
            } else {
                if (toks.back() != "T" && toks.back() != "F")
                    bad_line(lineno, "relation value must be T or F");
                if (!m.relations[toks[1]].emplace(std::move(tuple), toks.back() == "T").second)
                    bad_line(lineno, "duplicate relation entry");
            }
        } else if (toks[0] == "var") {
            if (toks.size() != 3) bad_line(lineno, "expected `var <variable> <element>`");
            if (!sig.in_pool(toks[1])) bad_line(lineno, toks[1] + " is not a pool variable");
            if (!m.assignment.emplace(toks[1], model_element(m, toks[2], lineno)).second)
                bad_line(lineno, "duplicate assignment for " + toks[1]);
        } else {
            bad_line(lineno, "unknown directive " + toks[0]);
        }
    }
    if (!have_universe) throw FormatError("model file has no universe line");

    // Totality: every symbol fully tabulated, every pool variable assigned.
    for (const auto& [name, arity] : sig.symbols) {
        if (arity == 0) {
            if (m.constants.count(name) == 0)
                throw FormatError("constant " + name + " has no entry");
            continue;
        }
        std::size_t n = static_cast<std::size_t>(arity > 0 ? arity : -arity);
        std::size_t expected = 1;
        for (std::size_t i = 0; i < n; ++i) expected *= m.universe.size();
        std::size_t got = arity > 0 ? m.functions[name].size() : m.relations[name].size();
        if (got != expected)
            throw FormatError("table for " + name + " is partial (" + std::to_string(got) +
                              " of " + std::to_string(expected) + " entries)");
    }
    for (const auto& v : sig.pool_variables())
        if (m.assignment.count(v) == 0)
            throw FormatError("pool variable " + v + " is unassigned");
    return m;
}

void save_model(std::ostream& out, const Interpretation& m) {
    out << "universe";
    for (const auto& name : m.universe) out << ' ' << name;
    out << '\n';
    for (const auto& [name, value] : m.constants)
        out << "const " << name << ' ' << m.universe[value] << '\n';
    for (const auto& [name, table] : m.functions)
        for (const auto& [tuple, value] : table) {
            out << "fun " << name;
            for (std::size_t i : tuple) out << ' ' << m.universe[i];
            out << ' ' << m.universe[value] << '\n';
        }
    for (const auto& [name, table] : m.relations)
        for (const auto& [tuple, value] : table) {
            out << "rel " << name;
            for (std::size_t i : tuple) out << ' ' << m.universe[i];
            out << ' ' << (value ? 'T' : 'F') << '\n';
        }
    for (const auto& [var, value] : m.assignment)
        out << "var " << var << ' ' << m.universe[value] << '\n';
}

namespace {

Formula parse_formula_at(const FormalStructure& sig, const std::string& text,
                         std::size_t lineno) {
    try {
        return parse_formula(sig, text);
    } catch (const Error& e) {
        bad_line(lineno, e.what());
    }
}

Term parse_term_at(const FormalStructure& sig, const std::string& text, std::size_t lineno) {
    try {
        return parse_term(sig, text);
    } catch (const Error& e) {
        bad_line(lineno, e.what());
    }
}

}  // namespace

Proof load_proof(std::istream& in, const FormalStructure& sig) {
    Proof proof;
    for (const auto& [lineno, line] : content_lines(in)) {
        auto p_prem = line.find(" premises=");
        auto p_params = p_prem == std::string::npos ? p_prem : line.find(" params=", p_prem);
        auto p_ante = p_params == std::string::npos ? p_params : line.find(" ante=", p_params);
        auto p_succ = p_ante == std::string::npos ? p_ante : line.find(" succ=", p_ante);
        if (p_succ == std::string::npos)
            bad_line(lineno, "expected `step <n>: <rule> premises= params= ante= succ=`");
        auto head = split_ws(line.substr(0, p_prem));
        if (head.size() != 3 || head[0] != "step" || head[1].empty() ||
            head[1].back() != ':')
            bad_line(lineno, "malformed step header");
        head[1].pop_back();
        if (static_cast<std::size_t>(parse_int(head[1], lineno)) != proof.steps.size())
            bad_line(lineno, "steps must be numbered consecutively from 0");

        RuleApplication app;
        app.rule = head[2];
        std::string prem_s = line.substr(p_prem + 10, p_params - (p_prem + 10));
        std::string params_s = line.substr(p_params + 8, p_ante - (p_params + 8));
        std::string ante_s = line.substr(p_ante + 6, p_succ - (p_ante + 6));
        std::string succ_s = line.substr(p_succ + 6);

        if (!prem_s.empty())
            for (const auto& tok : split_on(prem_s, ','))
                app.premises.push_back(static_cast<std::size_t>(parse_int(tok, lineno)));
        if (!params_s.empty()) {
            for (const auto& kv : split_on(params_s, ';')) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) bad_line(lineno, "malformed parameter " + kv);
                std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
                if (key == "phi")
                    app.phi = parse_formula_at(sig, value, lineno);
                else if (key == "psi")
                    app.psi = parse_formula_at(sig, value, lineno);
                else if (key == "x")
                    app.x = value;
                else if (key == "x2")
                    app.x2 = value;
                else if (key == "t")
                    app.t = parse_term_at(sig, value, lineno);
                else if (key == "t2")
                    app.t2 = parse_term_at(sig, value, lineno);
                else if (key == "route")
                    app.route = value;
                else
                    bad_line(lineno, "unknown parameter " + key);
            }
        }
        FormulaSet ante;
        if (!ante_s.empty())
            for (const auto& f : split_on(ante_s, '|'))
                ante.insert(parse_formula_at(sig, f, lineno));
        if (succ_s.empty()) bad_line(lineno, "missing succedent");
        Formula succ = parse_formula_at(sig, succ_s, lineno);

        // Recover the remaining parameters from the declared sequent.
        const std::string& rule = app.rule;
        if (!is_derived_rule(rule)) {
            try {
                rule_from_name(rule);
            } catch (const Error& e) {
                bad_line(lineno, e.what());
            }
        }
        if (rule == "ass") {
            app.gamma = ante;
            app.phi = succ;
        } else if (rule == "ant") {
            app.gamma = ante;
        } else if (rule == "refl") {
            if (!app.t) {
                if (kind(succ) != FormulaKind::Atom || succ.tokens[0] != tok_eq)
                    bad_line(lineno, "refl succedent is not an equation");
                app.t = atom_args(sig, succ)[0];
            }
        } else if (rule == "subst") {
            if (!app.phi || !app.x || !app.t || !app.t2)
                bad_line(lineno, "subst needs explicit phi, x, t and t2");
        } else if (rule == "ex-succ") {
            if (!app.t) bad_line(lineno, "ex-succ needs an explicit t");
            if (kind(succ) != FormulaKind::Exists)
                bad_line(lineno, "ex-succ succedent is not existential");
            auto [x, body] = exists_parts(succ);
            app.x = x;
            app.phi = body;
        } else if (rule == "ex-ante") {
            if (!app.phi || !app.x || !app.x2)
                bad_line(lineno, "ex-ante needs explicit phi, x and x2");
            app.psi = succ;
            app.gamma = ante;
            app.gamma.erase(make_exists(*app.x, *app.phi));
        } else if (rule == "ctr-pos") {
            if (!is_not(succ)) bad_line(lineno, "ctr-pos succedent is not a self-denial");
            app.phi = not_body(succ);
            app.gamma = ante;
        } else if (rule == "ctr-neg") {
            app.phi = succ;
            app.gamma = ante;
        }
        proof.steps.push_back(ProofStep{std::move(app), Sequent{std::move(ante), std::move(succ)}});
    }
    return proof;
}

void save_proof(std::ostream& out, const Proof& proof) {
    // TODO: reject symbol names containing ';', '|' or '=', which this
    // format cannot quote.
    for (std::size_t i = 0; i < proof.steps.size(); ++i) {
        const ProofStep& step = proof.steps[i];
        const RuleApplication& app = step.app;
        out << "step " << i << ": " << app.rule << " premises=";
        for (std::size_t j = 0; j < app.premises.size(); ++j) {
            if (j) out << ',';
            out << app.premises[j];
        }
        out << " params=";
        std::vector<std::string> params;
        if (app.rule == "subst") {
            params.push_back("phi=" + to_string(*app.phi));
            params.push_back("x=" + *app.x);
            params.push_back("t=" + to_string(*app.t));
            params.push_back("t2=" + to_string(*app.t2));
        } else if (app.rule == "ex-succ") {
            params.push_back("t=" + to_string(*app.t));
        } else if (app.rule == "ex-ante") {
            params.push_back("phi=" + to_string(*app.phi));
            params.push_back("x=" + *app.x);
            params.push_back("x2=" + *app.x2);
        }
        if (app.route) params.push_back("route=" + *app.route);
        for (std::size_t j = 0; j < params.size(); ++j) {
            if (j) out << ';';
            out << params[j];
        }
        out << " ante=";
        bool first = true;
        for (const auto& f : step.sequent.antecedent) {
            if (!first) out << '|';
            out << to_string(f);
            first = false;
        }
        out << " succ=" << to_string(step.sequent.succedent) << '\n';
    }
}

std::string report_ok(const CheckedProof& checked) {
    return "OK final=" + to_string(checked.final) +
           " mask=" + std::to_string(checked.used.mask);
}

std::string report_fail(const Error& e) {
    std::string step = e.step_index == Error::no_step ? std::string("-")
                                                      : std::to_string(e.step_index);
    return "FAIL step=" + step + " " + e.what();
}

}  // namespace fol
