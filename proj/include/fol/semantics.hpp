#pragma once

#include <map>
#include <string>
#include <vector>

#include "fol/syntax.hpp"

namespace fol {

// A finite interpretation: universe elements are identified by name (index =
// position in `universe`), symbol tables are total in well-formed models, and
// the assignment covers the whole variable pool.  Free models built from term
// universes are the one sanctioned exception to totality: a function entry is
// absent exactly when the application escapes the carrier, and evaluation
// reports that as DepthExceeded.
struct Interpretation {
    FormalStructure structure;
    std::vector<std::string> universe;
    std::map<std::string, std::size_t> constants;
    std::map<std::string, std::map<std::vector<std::size_t>, std::size_t>> functions;
    std::map<std::string, std::map<std::vector<std::size_t>, bool>> relations;
    std::map<std::string, std::size_t> assignment;  // variable token -> element

    std::size_t element_index(const std::string& name) const;  // throws OutOfRange
};

// A partition of a finite set of terms: `classes[i]` is the class index of
// `carrier[i]`, with classes numbered by first appearance along the canonical
// carrier order.
struct TermEquivalenceRelation {
    std::vector<Term> carrier;        // canonical order, no duplicates
    std::vector<std::size_t> classes;

    bool related(const Term& a, const Term& b) const;
    std::size_t class_count() const;
    std::size_t index_of(const Term& t) const;  // throws OutOfRange
};

std::size_t eval_term(const Interpretation& m, const Term& t);
bool eval_formula(const Interpretation& m, const Formula& f);
bool satisfies(const Interpretation& m, const FormulaSet& phi);

// Copy of `m` with the given variables reassigned.
Interpretation mutate_assignment(const Interpretation& m,
                                 const std::map<std::string, std::size_t>& changes);

// The free interpretation over a term universe: elements are the terms
// themselves (named by joining their tokens with '_'), constants and
// functions denote term formation, relations are all-false, and each pool
// variable is assigned its own term when present (the first element
// otherwise).  The universe must be non-empty and closed under subterms.
Interpretation free_interpretation(const FormalStructure& sig, const TermSet& term_universe);

// The terms the free universe consists of, parallel to `universe`.
std::vector<Term> universe_terms(const Interpretation& free_model);

// Overrides every relation table of a free interpretation: the relation holds
// on a tuple of term-elements exactly when the corresponding atomic formula
// is in `atomic_truths`.  Equality is not a table and stays literal identity.
Interpretation extend_with_relations(const Interpretation& free_model,
                                     const FormulaSet& atomic_truths);

// True when every function maps related argument tuples to related results
// and every relation table agrees on related tuples.  Only entries present in
// the tables are consulted.  The relation's carrier must enumerate the
// universe.
bool check_preserved(const Interpretation& m, const TermEquivalenceRelation& eq);

// The quotient interpretation: elements are the equivalence classes, named by
// their canonically smallest member.  Throws NotPreserved when
// check_preserved fails.
Interpretation quotient(const Interpretation& m, const TermEquivalenceRelation& eq);

}  // namespace fol
