#include "fol/semantics.hpp"

#include <algorithm>
#include <iterator>
#include <optional>

namespace fol {

namespace {

std::string element_name(const Term& t) {
    std::string out;
    for (std::size_t i = 0; i < t.tokens.size(); ++i) {
        if (i) out += '_';
        out += t.tokens[i];
    }
    return out;
}

// Span evaluators sharing one mutable assignment so the existential search
// does not copy the interpretation per element.
std::size_t eval_term_span(const Interpretation& m,
                           std::map<std::string, std::size_t>& assignment,
                           const SymbolString& toks, std::size_t& pos) {
    const std::string& tok = toks[pos++];
    if (FormalStructure::is_variable_token(tok)) {
        auto it = assignment.find(tok);
        if (it == assignment.end()) throw OutOfRange("unassigned variable: " + tok);
        return it->second;
    }
    int arity = m.structure.arity(tok);
    if (arity == 0) {
        auto it = m.constants.find(tok);
        if (it == m.constants.end())
            throw DepthExceeded("constant denotes no element of the carrier: " + tok);
        return it->second;
    }
    std::vector<std::size_t> args;
    args.reserve(static_cast<std::size_t>(arity));
    for (int i = 0; i < arity; ++i) args.push_back(eval_term_span(m, assignment, toks, pos));
    auto table = m.functions.find(tok);
    if (table != m.functions.end()) {
        auto it = table->second.find(args);
        if (it != table->second.end()) return it->second;
    }
    throw DepthExceeded("application of " + tok + " leaves the carrier");
}

std::size_t formula_end(const Interpretation& m, const SymbolString& toks, std::size_t pos);

std::size_t term_end(const Interpretation& m, const SymbolString& toks, std::size_t pos) {
    const std::string& tok = toks[pos++];
    if (FormalStructure::is_variable_token(tok)) return pos;
    int arity = m.structure.arity(tok);
    for (int i = 0; i < arity; ++i) pos = term_end(m, toks, pos);
    return pos;
}

std::size_t formula_end(const Interpretation& m, const SymbolString& toks, std::size_t pos) {
    const std::string& tok = toks[pos++];
    if (tok == tok_nor) {
        pos = formula_end(m, toks, pos);
        return formula_end(m, toks, pos);
    }
    if (tok == tok_ex) return formula_end(m, toks, pos + 1);
    if (tok == tok_eq) {
        pos = term_end(m, toks, pos);
        return term_end(m, toks, pos);
    }
    int n = -m.structure.arity(tok);
    for (int i = 0; i < n; ++i) pos = term_end(m, toks, pos);
    return pos;
}

bool eval_formula_span(const Interpretation& m, std::map<std::string, std::size_t>& assignment,
                       const SymbolString& toks, std::size_t& pos) {
    const std::string& tok = toks[pos++];
    if (tok == tok_nor) {
        bool a = eval_formula_span(m, assignment, toks, pos);
        bool b = eval_formula_span(m, assignment, toks, pos);
        return !a && !b;
    }
    if (tok == tok_ex) {
        const std::string& var = toks[pos++];
        std::size_t body_begin = pos;
        std::size_t body_end = formula_end(m, toks, body_begin);
        auto saved = assignment.find(var) != assignment.end()
                         ? std::optional<std::size_t>(assignment[var])
                         : std::nullopt;
        bool found = false;
        for (std::size_t e = 0; e < m.universe.size() && !found; ++e) {
            assignment[var] = e;
            std::size_t p = body_begin;
            found = eval_formula_span(m, assignment, toks, p);
        }
        if (saved)
            assignment[var] = *saved;
        else
            assignment.erase(var);
        pos = body_end;
        return found;
    }
    if (tok == tok_eq) {
        std::size_t a = eval_term_span(m, assignment, toks, pos);
        std::size_t b = eval_term_span(m, assignment, toks, pos);
        return a == b;
    }
    int n = -m.structure.arity(tok);
    std::vector<std::size_t> args;
    args.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) args.push_back(eval_term_span(m, assignment, toks, pos));
    auto table = m.relations.find(tok);
    if (table != m.relations.end()) {
        auto it = table->second.find(args);
        if (it != table->second.end()) return it->second;
    }
    throw DepthExceeded("relation table missing a tuple for " + tok);
}

}  // namespace

std::size_t Interpretation::element_index(const std::string& name) const {
    auto it = std::find(universe.begin(), universe.end(), name);
    if (it == universe.end()) throw OutOfRange("no such element: " + name);
    return static_cast<std::size_t>(it - universe.begin());
}

bool TermEquivalenceRelation::related(const Term& a, const Term& b) const {
    return classes[index_of(a)] == classes[index_of(b)];
}

std::size_t TermEquivalenceRelation::class_count() const {
    std::size_t n = 0;
    for (auto c : classes) n = std::max(n, c + 1);
    return n;
}

std::size_t TermEquivalenceRelation::index_of(const Term& t) const {
    auto it = std::find(carrier.begin(), carrier.end(), t);
    if (it == carrier.end()) throw OutOfRange("term outside the carrier: " + to_string(t));
    return static_cast<std::size_t>(it - carrier.begin());
}

std::size_t eval_term(const Interpretation& m, const Term& t) {
    auto assignment = m.assignment;
    std::size_t pos = 0;
    return eval_term_span(m, assignment, t.tokens, pos);
}

bool eval_formula(const Interpretation& m, const Formula& f) {
    auto assignment = m.assignment;
    std::size_t pos = 0;
    return eval_formula_span(m, assignment, f.tokens, pos);
}

bool satisfies(const Interpretation& m, const FormulaSet& phi) {
    for (const auto& f : phi)
        if (!eval_formula(m, f)) return false;
    return true;
}

Interpretation mutate_assignment(const Interpretation& m,
                                 const std::map<std::string, std::size_t>& changes) {
    Interpretation out = m;
    for (const auto& [var, elem] : changes) {
        if (!m.structure.in_pool(var)) throw OutOfRange("not a pool variable: " + var);
        if (elem >= m.universe.size())
            throw OutOfRange("element index " + std::to_string(elem) + " outside the universe");
        out.assignment[var] = elem;
    }
    return out;
}

Interpretation free_interpretation(const FormalStructure& sig, const TermSet& term_universe) {
    if (term_universe.empty()) throw OutOfRange("free interpretation over an empty universe");
    std::vector<Term> terms(term_universe.begin(), term_universe.end());

    // Closure under constituents, so every subterm denotes.
    for (const auto& t : terms)
        if (t.tokens.size() > 1)
            for (const auto& child : children(sig, t))
                if (term_universe.count(std::get<Term>(child)) == 0)
                    throw OutOfRange("universe not closed under subterms: missing " +
                                     to_string(std::get<Term>(child)));

    Interpretation m;
    m.structure = sig;
    for (const auto& t : terms) m.universe.push_back(element_name(t));

    auto index_of = [&](const Term& t) -> std::optional<std::size_t> {
        auto it = term_universe.find(t);
        if (it == term_universe.end()) return std::nullopt;
        return static_cast<std::size_t>(std::distance(term_universe.begin(), it));
    };

    for (const auto& [name, arity] : sig.symbols) {
        if (arity == 0) {
            if (auto i = index_of(Term{{name}, 0})) m.constants[name] = *i;
        } else if (arity > 0) {
            auto& table = m.functions[name];
            std::vector<std::size_t> idx(static_cast<std::size_t>(arity), 0);
            while (true) {
                std::vector<Term> args;
                for (auto i : idx) args.push_back(terms[i]);
                if (auto r = index_of(make_application(sig, name, args)))
                    table[std::vector<std::size_t>(idx.begin(), idx.end())] = *r;
                std::size_t k = idx.size();
                while (k > 0 && ++idx[k - 1] == terms.size()) idx[--k] = 0;
                if (k == 0) break;
            }
        } else {
            auto& table = m.relations[name];
            std::size_t n = static_cast<std::size_t>(-arity);
            std::vector<std::size_t> idx(n, 0);
            while (true) {
                table[std::vector<std::size_t>(idx.begin(), idx.end())] = false;
                std::size_t k = idx.size();
                while (k > 0 && ++idx[k - 1] == terms.size()) idx[--k] = 0;
                if (k == 0) break;
            }
        }
    }
    for (const auto& v : sig.pool_variables()) {
        auto i = index_of(Term{{v}, 0});
        m.assignment[v] = i ? *i : 0;
    }
    return m;
}

std::vector<Term> universe_terms(const Interpretation& m) {
    std::vector<Term> out;
    out.reserve(m.universe.size());
    for (const auto& name : m.universe) {
        SymbolString toks;
        std::string cur;
        for (char c : name) {
            if (c == '_') {
                toks.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        toks.push_back(cur);
        out.push_back(parse_term(m.structure, toks));
    }
    return out;
}

Interpretation extend_with_relations(const Interpretation& free_model,
                                     const FormulaSet& atomic_truths) {
    Interpretation m = free_model;
    std::vector<Term> terms = universe_terms(m);
    for (const auto& [name, arity] : m.structure.symbols) {
        if (arity >= 0) continue;
        auto& table = m.relations[name];
        std::size_t n = static_cast<std::size_t>(-arity);
        std::vector<std::size_t> idx(n, 0);
        if (terms.empty()) continue;
        while (true) {
            std::vector<Term> args;
            for (auto i : idx) args.push_back(terms[i]);
            table[std::vector<std::size_t>(idx.begin(), idx.end())] =
                atomic_truths.count(make_relation(m.structure, name, args)) != 0;
            std::size_t k = idx.size();
            while (k > 0 && ++idx[k - 1] == terms.size()) idx[--k] = 0;
            if (k == 0) break;
        }
    }
    return m;
}

namespace {

// Class of each universe element under `eq`, resolved through element names.
std::vector<std::size_t> element_classes(const Interpretation& m,
                                         const TermEquivalenceRelation& eq) {
    if (eq.carrier.size() != m.universe.size())
        throw OutOfRange("equivalence carrier does not enumerate the universe");
    std::vector<std::size_t> out(m.universe.size());
    for (std::size_t i = 0; i < eq.carrier.size(); ++i) {
        std::size_t e = m.element_index(element_name(eq.carrier[i]));
        out[e] = eq.classes[i];
    }
    return out;
}

}  // namespace

bool check_preserved(const Interpretation& m, const TermEquivalenceRelation& eq) {
    std::vector<std::size_t> cls = element_classes(m, eq);
    for (const auto& [name, table] : m.functions) {
        (void)name;
        std::map<std::vector<std::size_t>, std::size_t> seen;
        for (const auto& [args, res] : table) {
            std::vector<std::size_t> key;
            key.reserve(args.size());
            for (auto a : args) key.push_back(cls[a]);
            auto [it, inserted] = seen.emplace(std::move(key), cls[res]);
            if (!inserted && it->second != cls[res]) return false;
        }
    }
    for (const auto& [name, table] : m.relations) {
        (void)name;
        std::map<std::vector<std::size_t>, bool> seen;
        for (const auto& [args, value] : table) {
            std::vector<std::size_t> key;
            key.reserve(args.size());
            for (auto a : args) key.push_back(cls[a]);
            auto [it, inserted] = seen.emplace(std::move(key), value);
            if (!inserted && it->second != value) return false;
        }
    }
    return true;
}

Interpretation quotient(const Interpretation& m, const TermEquivalenceRelation& eq) {
    if (!check_preserved(m, eq))
        throw NotPreserved("tables do not respect the equivalence; no quotient exists");
    std::vector<std::size_t> cls = element_classes(m, eq);

    // Renumber classes by first appearance along the universe order and name
    // each class after its first (canonically smallest) member.
    std::map<std::size_t, std::size_t> renumber;
    std::vector<std::string> names;
    for (std::size_t e = 0; e < m.universe.size(); ++e)
        if (renumber.emplace(cls[e], renumber.size()).second) names.push_back(m.universe[e]);
    for (auto& c : cls) c = renumber.at(c);

    Interpretation q;
    q.structure = m.structure;
    q.universe = std::move(names);
    for (const auto& [name, e] : m.constants) q.constants[name] = cls[e];
    for (const auto& [name, table] : m.functions) {
        auto& qt = q.functions[name];
        for (const auto& [args, res] : table) {
            std::vector<std::size_t> key;
            key.reserve(args.size());
            for (auto a : args) key.push_back(cls[a]);
            qt[std::move(key)] = cls[res];
        }
    }
    for (const auto& [name, table] : m.relations) {
        auto& qt = q.relations[name];
        for (const auto& [args, value] : table) {
            std::vector<std::size_t> key;
            key.reserve(args.size());
            for (auto a : args) key.push_back(cls[a]);
            qt[std::move(key)] = value;
        }
    }
    for (const auto& [var, e] : m.assignment) q.assignment[var] = cls[e];
    return q;
}

}  // namespace fol
