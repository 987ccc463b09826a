#pragma once

#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fol/signature.hpp"
#include "fol/strings.hpp"

namespace fol {

// Terms and formulas are token strings in polish notation with a cached
// structural depth.  Equality is literal token equality; the ordering is the
// canonical one used everywhere for determinism: shorter strings first, then
// token-wise lexicographic.
struct Term {
    SymbolString tokens;
    int depth = 0;

    bool operator==(const Term& o) const { return tokens == o.tokens; }
    bool operator!=(const Term& o) const { return tokens != o.tokens; }
    bool operator<(const Term& o) const {
        if (tokens.size() != o.tokens.size()) return tokens.size() < o.tokens.size();
        return tokens < o.tokens;
    }
};

struct Formula {
    SymbolString tokens;
    int depth = 0;  // connective nesting; atomic formulas have depth 0

    bool operator==(const Formula& o) const { return tokens == o.tokens; }
    bool operator!=(const Formula& o) const { return tokens != o.tokens; }
    bool operator<(const Formula& o) const {
        if (tokens.size() != o.tokens.size()) return tokens.size() < o.tokens.size();
        return tokens < o.tokens;
    }
};

using TermSet = std::set<Term>;
using FormulaSet = std::set<Formula>;

// --- parsing and printing -------------------------------------------------

SymbolString tokenize(const std::string& text);  // split on whitespace
std::string to_string(const Term& t);
std::string to_string(const Formula& f);

Term parse_term(const FormalStructure& sig, const SymbolString& tokens);
Term parse_term(const FormalStructure& sig, const std::string& text);
Formula parse_formula(const FormalStructure& sig, const SymbolString& tokens);
Formula parse_formula(const FormalStructure& sig, const std::string& text);

// --- structure ------------------------------------------------------------

enum class FormulaKind { Atom, Nor, Exists };
FormulaKind kind(const Formula& f);

Term make_variable(const std::string& var_token);
Term make_application(const FormalStructure& sig, const std::string& symbol,
                      const std::vector<Term>& args);
Formula make_eq(const Term& lhs, const Term& rhs);
Formula make_relation(const FormalStructure& sig, const std::string& symbol,
                      const std::vector<Term>& args);
Formula make_nor(const Formula& a, const Formula& b);
Formula make_not(const Formula& a);  // joint denial of a with itself
Formula make_exists(const std::string& var_token, const Formula& body);

bool is_not(const Formula& f);          // nor with equal halves
Formula not_body(const Formula& f);     // throws NotAFormula unless is_not
std::pair<Formula, Formula> nor_parts(const FormalStructure& sig, const Formula& f);
std::pair<std::string, Formula> exists_parts(const Formula& f);
std::vector<Term> atom_args(const FormalStructure& sig, const Formula& f);

// Immediate constituents.  An atomic term yields itself; a composite term its
// arguments; an atomic formula its argument terms; a joint denial its two
// subformulas; an existential the bound variable (as a term) and the body.
std::vector<std::variant<Term, Formula>> children(const FormalStructure& sig, const Term& t);
std::vector<std::variant<Term, Formula>> children(const FormalStructure& sig, const Formula& f);

// --- variables and substitution ------------------------------------------

std::set<std::string> term_vars(const Term& t);
std::set<std::string> free_vars(const FormalStructure& sig, const Formula& f);
std::set<std::string> free_vars(const FormalStructure& sig, const FormulaSet& phi);
bool is_free_in(const FormalStructure& sig, const Formula& f, const std::string& var);

// Replaces free occurrences of `var` by `replacement`.  No renaming is done:
// if a replacement variable would be captured by a binder the substitution
// throws VariableCapture.
Term substitute(const FormalStructure& sig, const Term& t, const std::string& var,
                const Term& replacement);
Formula substitute(const FormalStructure& sig, const Formula& f, const std::string& var,
                   const Term& replacement);

// --- enumeration ----------------------------------------------------------

// All terms of depth <= max_depth over the structure's symbols and pool.
TermSet generate_terms(const FormalStructure& sig, int max_depth);

// All formulas of connective depth <= formula_depth whose atomic layer ranges
// over terms of depth <= term_depth.  Grows explosively; callers bound it.
FormulaSet generate_formulas(const FormalStructure& sig, int formula_depth, int term_depth);

// --- covering predicates --------------------------------------------------

bool is_covering(const FormulaSet& phi, const FormulaSet& universe);
bool is_patently_inconsistent(const FormulaSet& phi);
// Covering such that no universe formula appears together with its denial.
bool is_minimal_covering(const FormulaSet& phi, const FormulaSet& universe);

}  // namespace fol
