#pragma once

#include <map>

#include "fol/derive.hpp"
#include "fol/semantics.hpp"

namespace fol {

// One decision of a construction loop, kept for reporting: which universe
// formula was considered and whether it went in positively (`added`) or its
// denial/alternative did.
struct TraceStep {
    Formula formula;
    bool added = false;
    std::string note;
};

struct ConstructionTrace {
    std::vector<TraceStep> steps;
};

// Witness adjunction over the existential members of a seed set: each one
// gets its body instantiated at the least pool variable free for the whole
// current set, guarded by a bounded consistency probe.  A guard hit skips the
// instance and records why.  Throws PoolExhausted when no pool variable is
// left and lets VariableCapture propagate.
struct WitnessStep {
    Formula existential;
    std::string variable;
    Formula instance;
    bool adjoined = false;
    std::string note;
};

struct WitnessReport {
    FormulaSet result;
    std::vector<WitnessStep> steps;
};

WitnessReport adjoin_witnesses(const FormalStructure& sig, const FormulaSet& seed,
                               RuleSet rules, const SearchBudget& budget);

// Maximization sweeps the universe in canonical order.  The positive sweep
// adds each formula unless its denial is already derivable, in which case the
// denial goes in; the negative sweep adds denials, falling back to the double
// denial when the single one is underivable.
struct MaximizationResult {
    FormulaSet result;
    ConstructionTrace trace;
};

MaximizationResult maximize_plus(const FormalStructure& sig, const FormulaSet& start,
                                 const std::vector<Formula>& universe, RuleSet rules,
                                 const SearchBudget& budget);
MaximizationResult maximize_minus(const FormalStructure& sig, const FormulaSet& start,
                                  const std::vector<Formula>& universe, RuleSet rules,
                                  const SearchBudget& budget);

// True when every existential member has some instance of its body among the
// members, the instantiating term drawn from the members' subterms or the
// variable pool.
bool is_witness_furnished(const FormalStructure& sig, const FormulaSet& phi);

// Provable equality over a term carrier, with one checked proof per related
// ordered pair.  Throws NotEquivalence when the proved pairs fail to be
// reflexive, symmetric or transitive on the carrier — bounded derivability
// cannot always close the gap, and a partial relation must not be silently
// completed.
struct EqualityEdge {
    Term lhs, rhs;
    Proof proof;
};

struct TermEquivalence {
    TermEquivalenceRelation relation;
    std::vector<EqualityEdge> edges;
};

TermEquivalence term_equivalence(const FormalStructure& sig, const FormulaSet& phi,
                                 RuleSet rules, const SearchBudget& budget,
                                 const TermSet& carrier);

// The quotient of the free term model under provable equality, with relation
// tables read off the atomic members.  `source` is the pre-quotient
// interpretation over the carrier itself.
struct HenkinModel {
    Interpretation interpretation;
    Interpretation source;
    TermEquivalence equivalence;
};

// Requires `phi` to contain everything derivable from it within the universe
// (throws NotExpanded otherwise; pass check_expanded = false when the caller
// has already verified that).  Throws NotPreserved when the tables do not
// respect provable equality.
HenkinModel henkin_model(const FormalStructure& sig, const FormulaSet& phi, RuleSet rules,
                         const SearchBudget& budget, const TermSet& carrier,
                         const FormulaSet& universe, bool check_expanded = true);

// End-to-end model construction: enumerate a formula universe, adjoin
// witnesses, maximize, verify the result covers the universe without patent
// contradiction and is witness-furnished and expansion-closed, then build the
// quotient model and evaluate the seed in it.  Any failed check throws
// (PipelineCheckFailed / SeedNotSatisfied) rather than returning a model the
// construction cannot vouch for.
struct PipelineParams {
    RuleSet rules = RuleSet{(1u << 9) - 1};  // all rules except negative contradiction
    SearchBudget budget;
    int universe_formula_depth = 2;
    int universe_term_depth = 1;
    std::size_t universe_cap = 4000;
    int carrier_term_depth = 1;
    bool maximize_negatively = false;
};

struct PipelineResult {
    FormulaSet seed;
    std::vector<Formula> universe;
    WitnessReport witnesses;
    MaximizationResult maximal;
    HenkinModel model;
    bool seed_satisfied = false;
};

PipelineResult satisfiability_pipeline(const FormalStructure& sig, const FormulaSet& seed,
                                       const PipelineParams& params);

// Replaces every free variable across `phi` with a fresh constant (x<i> is
// cast to c<i>, with extra 'c's prepended on name clashes; NameClash after
// ten attempts).  `back_map` maps each new constant to the variable it
// replaced.
struct CastResult {
    FormalStructure signature;
    FormulaSet formulas;
    std::map<std::string, std::string> back_map;
};

CastResult cast_free_vars_to_constants(const FormalStructure& sig, const FormulaSet& phi);

// Reads a model of the cast formulas back as a model of the originals over
// the original signature: each replaced variable is assigned its constant's
// value and the cast constants are dropped.
Interpretation pull_back_cast(const FormalStructure& original, const Interpretation& model,
                              const std::map<std::string, std::string>& back_map);

}  // namespace fol
