#include "fol/syntax.hpp"

#include <algorithm>
#include <sstream>

namespace fol {

SymbolString tokenize(const std::string& text) {
    SymbolString out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

namespace {

std::string join(const SymbolString& toks) {
    std::string out;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i) out += ' ';
        out += toks[i];
    }
    return out;
}

// Recursive-descent walker over a token span.  Both parse entry points and
// the structural accessors below share it.
struct Cursor {
    const FormalStructure& sig;
    const SymbolString& toks;
    std::size_t pos = 0;

    const std::string& peek() const {
        if (pos >= toks.size())
            throw ArityUnderflow("input ends in the middle of an expression");
        return toks[pos];
    }
    const std::string& next() {
        const std::string& t = peek();
        ++pos;
        return t;
    }
};

int parse_term_span(Cursor& c) {
    const std::string& tok = c.next();
    if (FormalStructure::is_variable_token(tok)) {
        if (!c.sig.in_pool(tok))
            throw UnknownToken("variable outside the pool: " + tok);
        return 0;
    }
    if (tok == tok_nor || tok == tok_eq || tok == tok_ex)
        throw UnknownToken("logical token heads a term: " + tok);
    if (!c.sig.has_symbol(tok)) throw UnknownToken("unknown symbol: " + tok);
    int arity = c.sig.arity(tok);
    if (arity < 0) throw UnknownToken("relation symbol heads a term: " + tok);
    int depth = 0;
    for (int i = 0; i < arity; ++i) depth = std::max(depth, parse_term_span(c) + 1);
    return depth;
}

int parse_formula_span(Cursor& c) {
    const std::string& tok = c.next();
    if (tok == tok_nor) {
        int a = parse_formula_span(c);
        int b = parse_formula_span(c);
        return std::max(a, b) + 1;
    }
    if (tok == tok_ex) {
        if (c.pos >= c.toks.size())
            throw MalformedQuantifier("existential without a bound variable");
        const std::string& var = c.next();
        if (!FormalStructure::is_variable_token(var) || !c.sig.in_pool(var))
            throw MalformedQuantifier("existential binds a non-variable: " + var);
        return parse_formula_span(c) + 1;
    }
    if (tok == tok_eq) {
        parse_term_span(c);
        parse_term_span(c);
        return 0;
    }
    if (c.sig.has_symbol(tok) && c.sig.arity(tok) < 0) {
        int n = -c.sig.arity(tok);
        for (int i = 0; i < n; ++i) parse_term_span(c);
        return 0;
    }
    if (FormalStructure::is_variable_token(tok) ||
        (c.sig.has_symbol(tok) && c.sig.arity(tok) >= 0))
        throw NotAFormula("term where a formula is expected: " + tok);
    throw UnknownToken("unknown symbol: " + tok);
}

// Span [begin, end) of the term/formula starting at `begin`; assumes the
// tokens were already validated once, so errors here mean internal misuse.
std::size_t term_span_end(const FormalStructure& sig, const SymbolString& toks,
                          std::size_t begin) {
    Cursor c{sig, toks, begin};
    parse_term_span(c);
    return c.pos;
}

std::size_t formula_span_end(const FormalStructure& sig, const SymbolString& toks,
                             std::size_t begin) {
    Cursor c{sig, toks, begin};
    parse_formula_span(c);
    return c.pos;
}

SymbolString slice(const SymbolString& toks, std::size_t b, std::size_t e) {
    return SymbolString(toks.begin() + static_cast<std::ptrdiff_t>(b),
                        toks.begin() + static_cast<std::ptrdiff_t>(e));
}

}  // namespace

std::string to_string(const Term& t) { return join(t.tokens); }
std::string to_string(const Formula& f) { return join(f.tokens); }

Term parse_term(const FormalStructure& sig, const SymbolString& tokens) {
    Cursor c{sig, tokens, 0};
    int depth = parse_term_span(c);
    if (c.pos != tokens.size())
        throw TrailingTokens("tokens left over after a complete term: " +
                             join(slice(tokens, c.pos, tokens.size())));
    return Term{tokens, depth};
}

Term parse_term(const FormalStructure& sig, const std::string& text) {
    return parse_term(sig, tokenize(text));
}

Formula parse_formula(const FormalStructure& sig, const SymbolString& tokens) {
    Cursor c{sig, tokens, 0};
    int depth = parse_formula_span(c);
    if (c.pos != tokens.size())
        throw TrailingTokens("tokens left over after a complete formula: " +
                             join(slice(tokens, c.pos, tokens.size())));
    return Formula{tokens, depth};
}

Formula parse_formula(const FormalStructure& sig, const std::string& text) {
    return parse_formula(sig, tokenize(text));
}

FormulaKind kind(const Formula& f) {
    if (f.tokens.empty()) throw NotAFormula("empty formula");
    if (f.tokens[0] == tok_nor) return FormulaKind::Nor;
    if (f.tokens[0] == tok_ex) return FormulaKind::Exists;
    return FormulaKind::Atom;
}

Term make_variable(const std::string& var_token) {
    if (!FormalStructure::is_variable_token(var_token))
        throw UnknownToken("not a variable token: " + var_token);
    return Term{{var_token}, 0};
}

Term make_application(const FormalStructure& sig, const std::string& symbol,
                      const std::vector<Term>& args) {
    int arity = sig.arity(symbol);
    if (arity < 0 || static_cast<std::size_t>(arity) != args.size())
        throw ArityUnderflow("symbol " + symbol + " applied to " +
                             std::to_string(args.size()) + " arguments");
    SymbolString toks{symbol};
    int depth = 0;
    for (const auto& a : args) {
        toks.insert(toks.end(), a.tokens.begin(), a.tokens.end());
        depth = std::max(depth, a.depth + 1);
    }
    return Term{std::move(toks), depth};
}

Formula make_eq(const Term& lhs, const Term& rhs) {
    SymbolString toks{tok_eq};
    toks.insert(toks.end(), lhs.tokens.begin(), lhs.tokens.end());
    toks.insert(toks.end(), rhs.tokens.begin(), rhs.tokens.end());
    return Formula{std::move(toks), 0};
}

Formula make_relation(const FormalStructure& sig, const std::string& symbol,
                      const std::vector<Term>& args) {
    int arity = sig.arity(symbol);
    if (arity >= 0 || static_cast<std::size_t>(-arity) != args.size())
        throw ArityUnderflow("relation " + symbol + " applied to " +
                             std::to_string(args.size()) + " arguments");
    SymbolString toks{symbol};
    for (const auto& a : args) toks.insert(toks.end(), a.tokens.begin(), a.tokens.end());
    return Formula{std::move(toks), 0};
}

Formula make_nor(const Formula& a, const Formula& b) {
    SymbolString toks{tok_nor};
    toks.insert(toks.end(), a.tokens.begin(), a.tokens.end());
    toks.insert(toks.end(), b.tokens.begin(), b.tokens.end());
    return Formula{std::move(toks), std::max(a.depth, b.depth) + 1};
}

Formula make_not(const Formula& a) { return make_nor(a, a); }

Formula make_exists(const std::string& var_token, const Formula& body) {
    if (!FormalStructure::is_variable_token(var_token))
        throw MalformedQuantifier("existential binds a non-variable: " + var_token);
    SymbolString toks{tok_ex, var_token};
    toks.insert(toks.end(), body.tokens.begin(), body.tokens.end());
    return Formula{std::move(toks), body.depth + 1};
}

bool is_not(const Formula& f) {
    if (f.tokens.empty() || f.tokens[0] != tok_nor) return false;
    // nor a b with a == b: the two halves split the remainder evenly.
    std::size_t rest = f.tokens.size() - 1;
    if (rest % 2 != 0) return false;
    std::size_t half = rest / 2;
    return std::equal(f.tokens.begin() + 1, f.tokens.begin() + 1 + static_cast<std::ptrdiff_t>(half),
                      f.tokens.begin() + 1 + static_cast<std::ptrdiff_t>(half));
}

namespace {

// Depth of a formula slice without re-classifying every token: the slice came
// out of a validated formula, so a light recursion suffices.
Formula formula_from_span(const FormalStructure& sig, const SymbolString& toks,
                          std::size_t b, std::size_t e) {
    return parse_formula(sig, slice(toks, b, e));
}

Term term_from_span(const FormalStructure& sig, const SymbolString& toks, std::size_t b,
                    std::size_t e) {
    return parse_term(sig, slice(toks, b, e));
}

}  // namespace

Formula not_body(const Formula& f) {
    if (!is_not(f)) throw NotAFormula("not a denial of a single formula: " + to_string(f));
    std::size_t half = (f.tokens.size() - 1) / 2;
    SymbolString body = slice(f.tokens, 1, 1 + half);
    // Depth of the half: one less than the denial unless the other half was
    // deeper, but the halves are equal here, so it is exactly depth - 1.
    return Formula{std::move(body), f.depth - 1};
}

std::pair<Formula, Formula> nor_parts(const FormalStructure& sig, const Formula& f) {
    if (f.tokens.empty() || f.tokens[0] != tok_nor)
        throw NotAFormula("not a joint denial: " + to_string(f));
    std::size_t mid = formula_span_end(sig, f.tokens, 1);
    return {formula_from_span(sig, f.tokens, 1, mid),
            formula_from_span(sig, f.tokens, mid, f.tokens.size())};
}

std::pair<std::string, Formula> exists_parts(const Formula& f) {
    if (f.tokens.size() < 3 || f.tokens[0] != tok_ex)
        throw NotAFormula("not an existential: " + to_string(f));
    SymbolString body = slice(f.tokens, 2, f.tokens.size());
    return {f.tokens[1], Formula{std::move(body), f.depth - 1}};
}

std::vector<Term> atom_args(const FormalStructure& sig, const Formula& f) {
    if (kind(f) != FormulaKind::Atom) throw NotAFormula("not atomic: " + to_string(f));
    std::vector<Term> out;
    std::size_t pos = 1;
    int n = f.tokens[0] == tok_eq ? 2 : -sig.arity(f.tokens[0]);
    for (int i = 0; i < n; ++i) {
        std::size_t end = term_span_end(sig, f.tokens, pos);
        out.push_back(term_from_span(sig, f.tokens, pos, end));
        pos = end;
    }
    return out;
}

std::vector<std::variant<Term, Formula>> children(const FormalStructure& sig, const Term& t) {
    std::vector<std::variant<Term, Formula>> out;
    if (t.tokens.size() == 1) {
        out.emplace_back(t);  // atomic term: its own sole constituent
        return out;
    }
    int arity = sig.arity(t.tokens[0]);
    std::size_t pos = 1;
    for (int i = 0; i < arity; ++i) {
        std::size_t end = term_span_end(sig, t.tokens, pos);
        out.emplace_back(term_from_span(sig, t.tokens, pos, end));
        pos = end;
    }
    return out;
}

std::vector<std::variant<Term, Formula>> children(const FormalStructure& sig,
                                                  const Formula& f) {
    std::vector<std::variant<Term, Formula>> out;
    switch (kind(f)) {
        case FormulaKind::Atom:
            for (auto& t : atom_args(sig, f)) out.emplace_back(std::move(t));
            return out;
        case FormulaKind::Nor: {
            std::size_t mid = formula_span_end(sig, f.tokens, 1);
            out.emplace_back(formula_from_span(sig, f.tokens, 1, mid));
            out.emplace_back(formula_from_span(sig, f.tokens, mid, f.tokens.size()));
            return out;
        }
        case FormulaKind::Exists: {
            auto [var, body] = exists_parts(f);
            out.emplace_back(make_variable(var));
            out.emplace_back(std::move(body));
            return out;
        }
    }
    throw NotAFormula("unreachable formula kind");
}

std::set<std::string> term_vars(const Term& t) {
    std::set<std::string> out;
    for (const auto& tok : t.tokens)
        if (FormalStructure::is_variable_token(tok)) out.insert(tok);
    return out;
}

namespace {

void free_vars_span(const FormalStructure& sig, const SymbolString& toks, std::size_t b,
                    std::size_t e, std::vector<std::string>& bound,
                    std::set<std::string>& out, bool formula_mode) {
    if (b >= e) return;
    const std::string& tok = toks[b];
    if (formula_mode && tok == tok_nor) {
        std::size_t mid = formula_span_end(sig, toks, b + 1);
        free_vars_span(sig, toks, b + 1, mid, bound, out, true);
        free_vars_span(sig, toks, mid, e, bound, out, true);
        return;
    }
    if (formula_mode && tok == tok_ex) {
        bound.push_back(toks[b + 1]);
        free_vars_span(sig, toks, b + 2, e, bound, out, true);
        bound.pop_back();
        return;
    }
    // Atomic formula or term: every variable token in the span is an
    // occurrence, and none of them is binder-shadowed below this point.
    for (std::size_t i = b; i < e; ++i)
        if (FormalStructure::is_variable_token(toks[i]) &&
            std::find(bound.begin(), bound.end(), toks[i]) == bound.end())
            out.insert(toks[i]);
}

}  // namespace

std::set<std::string> free_vars(const FormalStructure& sig, const Formula& f) {
    std::set<std::string> out;
    std::vector<std::string> bound;
    free_vars_span(sig, f.tokens, 0, f.tokens.size(), bound, out, true);
    return out;
}

std::set<std::string> free_vars(const FormalStructure& sig, const FormulaSet& phi) {
    std::set<std::string> out;
    for (const auto& f : phi) {
        auto fv = free_vars(sig, f);
        out.insert(fv.begin(), fv.end());
    }
    return out;
}

bool is_free_in(const FormalStructure& sig, const Formula& f, const std::string& var) {
    auto fv = free_vars(sig, f);
    return fv.count(var) != 0;
}

Term substitute(const FormalStructure& sig, const Term& t, const std::string& var,
                const Term& replacement) {
    SymbolString out;
    for (const auto& tok : t.tokens) {
        if (tok == var)
            out.insert(out.end(), replacement.tokens.begin(), replacement.tokens.end());
        else
            out.push_back(tok);
    }
    return parse_term(sig, out);
}

namespace {

void substitute_span(const FormalStructure& sig, const SymbolString& toks, std::size_t b,
                     std::size_t e, const std::string& var, const Term& replacement,
                     const std::set<std::string>& repl_vars, SymbolString& out) {
    const std::string& tok = toks[b];
    if (tok == tok_nor) {
        out.push_back(tok);
        std::size_t mid = formula_span_end(sig, toks, b + 1);
        substitute_span(sig, toks, b + 1, mid, var, replacement, repl_vars, out);
        substitute_span(sig, toks, mid, e, var, replacement, repl_vars, out);
        return;
    }
    if (tok == tok_ex) {
        const std::string& binder = toks[b + 1];
        Formula body{slice(toks, b + 2, e), 0};
        if (binder == var || !is_free_in(sig, body, var)) {
            // No free occurrence below: copy verbatim.
            out.insert(out.end(), toks.begin() + static_cast<std::ptrdiff_t>(b),
                       toks.begin() + static_cast<std::ptrdiff_t>(e));
            return;
        }
        if (repl_vars.count(binder) != 0)
            throw VariableCapture("substituting " + to_string(replacement) + " for " + var +
                                  " under a binder of " + binder);
        out.push_back(tok);
        out.push_back(binder);
        substitute_span(sig, toks, b + 2, e, var, replacement, repl_vars, out);
        return;
    }
    // Atomic span: plain token replacement.
    for (std::size_t i = b; i < e; ++i) {
        if (toks[i] == var)
            out.insert(out.end(), replacement.tokens.begin(), replacement.tokens.end());
        else
            out.push_back(toks[i]);
    }
}

}  // namespace

Formula substitute(const FormalStructure& sig, const Formula& f, const std::string& var,
                   const Term& replacement) {
    SymbolString out;
    substitute_span(sig, f.tokens, 0, f.tokens.size(), var, replacement,
                    term_vars(replacement), out);
    return parse_formula(sig, out);
}

TermSet generate_terms(const FormalStructure& sig, int max_depth) {
    TermSet terms;
    for (const auto& [name, arity] : sig.symbols)
        if (arity == 0) terms.insert(Term{{name}, 0});
    for (const auto& v : sig.pool_variables()) terms.insert(Term{{v}, 0});
    for (int d = 1; d <= max_depth; ++d) {
        std::vector<Term> pool(terms.begin(), terms.end());
        TermSet next = terms;
        for (const auto& [name, arity] : sig.symbols) {
            if (arity <= 0 || pool.empty()) continue;
            std::vector<std::size_t> idx(static_cast<std::size_t>(arity), 0);
            while (true) {
                std::vector<Term> args;
                args.reserve(idx.size());
                for (auto i : idx) args.push_back(pool[i]);
                Term t = make_application(sig, name, args);
                if (t.depth <= max_depth) next.insert(std::move(t));
                // Odometer over argument tuples.
                std::size_t k = idx.size();
                while (k > 0 && ++idx[k - 1] == pool.size()) idx[--k] = 0;
                if (k == 0) break;
            }
        }
        if (next == terms) break;
        terms = std::move(next);
    }
    return terms;
}

FormulaSet generate_formulas(const FormalStructure& sig, int formula_depth, int term_depth) {
    std::vector<Term> terms;
    for (auto& t : generate_terms(sig, term_depth)) terms.push_back(t);

    FormulaSet formulas;
    for (const auto& a : terms)
        for (const auto& b : terms) formulas.insert(make_eq(a, b));
    for (const auto& [name, arity] : sig.symbols) {
        if (arity >= 0) continue;
        std::size_t n = static_cast<std::size_t>(-arity);
        std::vector<std::size_t> idx(n, 0);
        if (terms.empty()) continue;
        while (true) {
            std::vector<Term> args;
            args.reserve(n);
            for (auto i : idx) args.push_back(terms[i]);
            formulas.insert(make_relation(sig, name, args));
            std::size_t k = idx.size();
            while (k > 0 && ++idx[k - 1] == terms.size()) idx[--k] = 0;
            if (k == 0) break;
        }
    }
    for (int d = 1; d <= formula_depth; ++d) {
        std::vector<Formula> layer(formulas.begin(), formulas.end());
        FormulaSet next = formulas;
        for (const auto& a : layer)
            for (const auto& b : layer) {
                Formula f = make_nor(a, b);
                if (f.depth <= formula_depth) next.insert(std::move(f));
            }
        for (const auto& v : sig.pool_variables())
            for (const auto& a : layer) {
                Formula f = make_exists(v, a);
                if (f.depth <= formula_depth) next.insert(std::move(f));
            }
        if (next == formulas) break;
        formulas = std::move(next);
    }
    return formulas;
}

bool is_covering(const FormulaSet& phi, const FormulaSet& universe) {
    for (const auto& u : universe)
        if (phi.count(u) == 0 && phi.count(make_not(u)) == 0) return false;
    return true;
}

bool is_patently_inconsistent(const FormulaSet& phi) {
    for (const auto& f : phi)
        if (phi.count(make_not(f)) != 0) return true;
    return false;
}

bool is_minimal_covering(const FormulaSet& phi, const FormulaSet& universe) {
    if (!is_covering(phi, universe)) return false;
    for (const auto& u : universe)
        if (phi.count(u) != 0 && phi.count(make_not(u)) != 0) return false;
    return true;
}

}  // namespace fol
