#pragma once

#include <memory>

#include "fol/calculus.hpp"

namespace fol {

// Caps for the bounded search.  `max_steps` bounds the length of any proof
// the oracle reports; the candidate sets feed reflexivity seeds and
// existential-introduction targets.  The oracle is sound and deterministic
// but deliberately incomplete: anything past the caps is Unknown.
struct SearchBudget {
    std::size_t max_steps = 64;
    int max_formula_depth = 6;
    TermSet candidate_terms;
    FormulaSet candidate_formulas;
};

// Proved carries a checkable proof whose conclusion is Γ ⊢ goal with Γ a
// subset of the queried antecedent set; otherwise the verdict is Unknown.
struct Verdict {
    std::optional<Proof> proof;
    bool proved() const { return proof.has_value(); }
};

// Inconsistent carries proofs of some ψ and of its denial from the same set;
// absence means no contradiction was found within budget, not consistency.
struct ConsistencyVerdict {
    std::optional<std::pair<Proof, Proof>> contradiction;
    bool inconsistent() const { return contradiction.has_value(); }
};

Verdict derives(const FormalStructure& sig, const FormulaSet& phi, const Formula& goal,
                RuleSet rules, const SearchBudget& budget);

// All universe formulas the oracle can prove from phi within budget.
FormulaSet expansion(const FormalStructure& sig, const FormulaSet& phi, RuleSet rules,
                     const SearchBudget& budget, const FormulaSet& universe);

ConsistencyVerdict is_consistent(const FormalStructure& sig, const FormulaSet& phi,
                                 RuleSet rules, const SearchBudget& budget,
                                 const FormulaSet& probes);

// Incremental façade over the same search: the antecedent set only grows, and
// saturated facts are reused across queries.  The model-construction loops
// ask thousands of queries against slowly growing sets and need this.
class DerivationEngine {
  public:
    DerivationEngine(const FormalStructure& sig, RuleSet rules, SearchBudget budget);
    ~DerivationEngine();
    DerivationEngine(DerivationEngine&&) noexcept;
    DerivationEngine& operator=(DerivationEngine&&) noexcept;

    void add_member(const Formula& f);
    const FormulaSet& members() const;
    Verdict query(const Formula& goal);
    ConsistencyVerdict check_consistency(const FormulaSet& probes);

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace fol
