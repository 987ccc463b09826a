#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fol/syntax.hpp"

namespace fol {

// The ten inference rules, numbered as the bitmask encoding fixes them.
enum class Rule : int {
    Assumption = 0,
    Antecedent = 1,
    Reflexivity = 2,
    Substitution = 3,
    ExistsSuccedent = 4,
    ExistsAntecedent = 5,
    NorIntroduction = 6,
    NorSymmetry = 7,
    ContradictionPos = 8,
    ContradictionNeg = 9,
};

constexpr unsigned rule_count = 10;
constexpr unsigned full_rule_mask = (1u << rule_count) - 1;  // 1023

// A set of rules as a 10-bit mask: bit i set iff rule i is admitted.
struct RuleSet {
    unsigned mask = 0;

    static RuleSet all() { return RuleSet{full_rule_mask}; }
    static RuleSet of(std::initializer_list<Rule> rules) {
        RuleSet s;
        for (Rule r : rules) s.mask |= 1u << static_cast<unsigned>(r);
        return s;
    }
    bool contains(Rule r) const { return (mask >> static_cast<unsigned>(r)) & 1u; }
    bool subset_of(const RuleSet& o) const { return (mask & ~o.mask) == 0; }
    RuleSet with(Rule r) const { return RuleSet{mask | (1u << static_cast<unsigned>(r))}; }
    bool operator==(const RuleSet& o) const { return mask == o.mask; }
};

unsigned mask_encode(const std::set<Rule>& rules);
std::set<Rule> mask_decode(unsigned mask);  // throws OutOfRange when mask >= 1024

// Short names used in proof scripts and on the command line.
std::string rule_name(Rule r);
Rule rule_from_name(const std::string& name);  // throws UnsupportedDerivedRule

struct Sequent {
    FormulaSet antecedent;
    Formula succedent;

    bool operator==(const Sequent& o) const {
        return antecedent == o.antecedent && succedent == o.succedent;
    }
};

std::string to_string(const Sequent& s);  // "{a|b}⊢c" with canonical member order

// One rule application, fully instantiated: the checker never unifies, it
// recomputes the unique conclusion from the parameters and the premises.
// Which parameters are meaningful depends on the rule:
//   ass      gamma, phi
//   ant      gamma (the enlarged antecedent)
//   refl     t
//   subst    phi (pattern), x, t, t2
//   ex-succ  phi (body), x, t
//   ex-ante  gamma, phi (body), x, x2 (the fresh variable), psi
//   ctr-pos  gamma, phi (the hypothesis being denied)
//   ctr-neg  gamma, phi (the conclusion)
// nor-intro and nor-sym take no parameters.  `rule` may also name a derived
// rule (see expand_derived); `route` selects between its expansions.
struct RuleApplication {
    std::string rule;
    std::vector<std::size_t> premises;  // indices of earlier steps
    FormulaSet gamma;
    std::optional<Formula> phi, psi;
    std::optional<std::string> x, x2;
    std::optional<Term> t, t2;
    std::optional<std::string> route;
};

struct ProofStep {
    RuleApplication app;
    Sequent sequent;  // the claimed conclusion; check_proof verifies it
};

struct Proof {
    std::vector<ProofStep> steps;
};

// Checks one basic-rule application against already-established premise
// sequents and returns the unique conclusion.  Throws SideConditionViolated,
// PremiseMismatch, SubstitutionFailure, UnsupportedDerivedRule or OutOfRange.
Sequent check_step(const FormalStructure& sig, const std::vector<Sequent>& prior,
                   const RuleApplication& app);

struct CheckedProof {
    Sequent final;
    RuleSet used;  // exactly the basic rules applied, derived steps expanded
};

// Checks every step in order; derived steps are macro-expanded and their
// expansions checked.  On failure the first failing step's error is rethrown
// with its step index stamped.
CheckedProof check_proof(const FormalStructure& sig, const Proof& proof);

// Names of the supported derived rules: "not-intro-left", "not-intro-right",
// "notnot-remove", "notnot-intro".
bool is_derived_rule(const std::string& name);

// Expands a derived-rule application into basic applications.  Premise
// indices below `prior.size()` refer to the original proof; larger ones refer
// to earlier steps of the expansion itself, offset by prior.size().
std::vector<RuleApplication> expand_derived(const FormalStructure& sig,
                                            const std::vector<Sequent>& prior,
                                            const RuleApplication& app);

// Ready-made proofs of the equality laws.  The fresh pattern variable is the
// least pool variable not occurring in the given terms (NoFreshVariable when
// the pool has none).
Proof proof_eq_symmetry(const FormalStructure& sig, const Term& t1, const Term& t2);
Proof proof_eq_transitivity(const FormalStructure& sig, const Term& t1, const Term& t2,
                            const Term& t3);
Proof proof_exists_self_eq(const FormalStructure& sig);  // ∅ ⊢ ex x1 eq x1 x1
Proof proof_congruence(const FormalStructure& sig, const std::string& function_symbol,
                       const std::vector<Term>& args, const std::vector<Term>& args2);

}  // namespace fol
