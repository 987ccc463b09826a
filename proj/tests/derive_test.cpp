#include <string>

#include "doctest.h"
#include "fol/calculus.hpp"
#include "fol/derive.hpp"
#include "fol/errors.hpp"
#include "fol/syntax.hpp"

namespace {

fol::FormalStructure small_sig(int pool = 2) {
    return fol::FormalStructure::make({{"c", 0}, {"d", 0}, {"P", -1}}, pool);
}

fol::SearchBudget small_budget(const fol::FormalStructure& sig) {
    fol::SearchBudget b;
    b.candidate_terms = fol::generate_terms(sig, 1);
    return b;
}

fol::FormulaSet parse_all(const fol::FormalStructure& sig,
                          std::initializer_list<const char*> texts) {
    fol::FormulaSet phi;
    for (const char* t : texts) phi.insert(fol::parse_formula(sig, t));
    return phi;
}

// Every reported proof must satisfy the kernel, conclude the goal, stay
// within the allowed rules, and assume only members of the queried set.
void audit(const fol::FormalStructure& sig, const fol::Verdict& v,
           const fol::FormulaSet& phi, const std::string& goal, fol::RuleSet rules) {
    REQUIRE(v.proved());
    auto ok = fol::check_proof(sig, *v.proof);
    CHECK(fol::to_string(ok.final.succedent) == goal);
    CHECK(ok.used.subset_of(rules));
    for (const auto& a : ok.final.antecedent) CHECK(phi.count(a) == 1);
}

}  // namespace

TEST_CASE("members and reflexive equalities are immediate") {
    auto sig = small_sig();
    auto b = small_budget(sig);
    auto phi = parse_all(sig, {"P c"});

    auto direct = fol::derives(sig, phi, fol::parse_formula(sig, "P c"), fol::RuleSet{1u}, b);
    audit(sig, direct, phi, "P c", fol::RuleSet{1u});
    CHECK(direct.proof->steps.size() == 1);

    auto refl = fol::derives(sig, {}, fol::parse_formula(sig, "eq d d"),
                             fol::RuleSet::of({fol::Rule::Reflexivity}), b);
    audit(sig, refl, {}, "eq d d", fol::RuleSet{4u});

    CHECK_FALSE(fol::derives(sig, {}, fol::parse_formula(sig, "P c"),
                             fol::RuleSet::all(), b).proved());
}

TEST_CASE("a missing rule silences the corresponding verdicts") {
    auto sig = small_sig();
    auto b = small_budget(sig);
    auto no_refl = fol::RuleSet{fol::full_rule_mask & ~4u};
    CHECK_FALSE(fol::derives(sig, {}, fol::parse_formula(sig, "eq d d"), no_refl, b).proved());
}

TEST_CASE("equality members rewrite other members") {
    auto sig = small_sig();
    auto b = small_budget(sig);

    auto sym = parse_all(sig, {"eq c d"});
    audit(sig, fol::derives(sig, sym, fol::parse_formula(sig, "eq d c"),
                            fol::RuleSet{511u}, b), sym, "eq d c", fol::RuleSet{511u});

    auto trans = parse_all(sig, {"eq c d", "eq d x1"});
    audit(sig, fol::derives(sig, trans, fol::parse_formula(sig, "eq c x1"),
                            fol::RuleSet{511u}, b), trans, "eq c x1", fol::RuleSet{511u});

    auto carry = parse_all(sig, {"eq c d", "P c"});
    audit(sig, fol::derives(sig, carry, fol::parse_formula(sig, "P d"),
                            fol::RuleSet{511u}, b), carry, "P d", fol::RuleSet{511u});

    // With the equation unusable the goal goes honestly unknown.
    CHECK_FALSE(fol::derives(sig, sym, fol::parse_formula(sig, "eq c x1"),
                             fol::RuleSet{511u}, b).proved());
}

TEST_CASE("denial goals route through the contradiction rules") {
    auto sig = small_sig();
    auto b = small_budget(sig);

    // Removing a double denial requires the negative rule.
    auto nn = parse_all(sig, {"nor nor P c P c nor P c P c"});
    auto v = fol::derives(sig, nn, fol::parse_formula(sig, "P c"), fol::RuleSet::all(), b);
    audit(sig, v, nn, "P c", fol::RuleSet::all());
    CHECK(fol::check_proof(sig, *v.proof).used.mask == 513u);
    CHECK_FALSE(fol::derives(sig, nn, fol::parse_formula(sig, "P c"),
                             fol::RuleSet{511u}, b).proved());

    // Introducing one only needs the positive rule.
    auto pos = parse_all(sig, {"P c"});
    auto nnv = fol::derives(sig, pos, fol::parse_formula(sig, "nor nor P c P c nor P c P c"),
                            fol::RuleSet::all(), b);
    audit(sig, nnv, pos, "nor nor P c P c nor P c P c", fol::RuleSet{257u});
}

TEST_CASE("a joint denial is assembled from proofs of both denials") {
    auto sig = small_sig();
    auto b = small_budget(sig);
    auto phi = parse_all(sig, {"nor P c P c", "nor P d P d"});
    auto v = fol::derives(sig, phi, fol::parse_formula(sig, "nor P c P d"),
                          fol::RuleSet::all(), b);
    audit(sig, v, phi, "nor P c P d", fol::RuleSet{65u});
}

TEST_CASE("existential goals are introduced from any instance") {
    auto sig = small_sig();
    auto b = small_budget(sig);

    auto phi = parse_all(sig, {"P c"});
    audit(sig, fol::derives(sig, phi, fol::parse_formula(sig, "ex x1 P x1"),
                            fol::RuleSet{511u}, b), phi, "ex x1 P x1", fol::RuleSet{17u});

    auto self = fol::derives(sig, {}, fol::parse_formula(sig, "ex x1 eq x1 x1"),
                             fol::RuleSet{511u}, b);
    audit(sig, self, {}, "ex x1 eq x1 x1", fol::RuleSet{20u});
}

TEST_CASE("an existential member is opened with a fresh witness") {
    // The vacuous binder makes ex x2 P x1 interchangeable with P x1, so the
    // set {not P x1, ex x2 P x1} refutes itself once the witness is opened.
    auto sig = small_sig(4);
    auto b = small_budget(sig);
    auto phi = parse_all(sig, {"nor P x1 P x1"});
    auto goal = fol::make_not(fol::parse_formula(sig, "ex x2 P x1"));
    auto v = fol::derives(sig, phi, goal, fol::RuleSet{511u}, b);
    audit(sig, v, phi, fol::to_string(goal), fol::RuleSet{511u});
}

TEST_CASE("the engine reuses saturation across a growing member set") {
    auto sig = small_sig();
    fol::DerivationEngine engine(sig, fol::RuleSet{511u}, small_budget(sig));

    engine.add_member(fol::parse_formula(sig, "eq c d"));
    CHECK(engine.query(fol::parse_formula(sig, "eq d c")).proved());
    CHECK_FALSE(engine.query(fol::parse_formula(sig, "P d")).proved());

    engine.add_member(fol::parse_formula(sig, "P c"));
    CHECK(engine.query(fol::parse_formula(sig, "P d")).proved());
    CHECK(engine.members().size() == 2);
}

TEST_CASE("inconsistency reports come as checkable proof pairs") {
    auto sig = small_sig();
    auto b = small_budget(sig);

    auto direct = fol::is_consistent(sig, parse_all(sig, {"P c", "nor P c P c"}),
                                     fol::RuleSet::all(), b, {});
    REQUIRE(direct.inconsistent());
    auto pos = fol::check_proof(sig, direct.contradiction->first);
    auto neg = fol::check_proof(sig, direct.contradiction->second);
    CHECK(fol::to_string(neg.final.succedent) == "nor " + fol::to_string(pos.final.succedent)
                                                   + " " + fol::to_string(pos.final.succedent));

    // The clash can hide behind a rewrite.
    auto hidden = fol::is_consistent(sig, parse_all(sig, {"eq c d", "P c", "nor P d P d"}),
                                     fol::RuleSet::all(), b, {});
    CHECK(hidden.inconsistent());

    // A one-sided denial pair still strengthens into a contradiction.
    auto skew = fol::is_consistent(sig, parse_all(sig, {"P c", "nor P c eq c d"}),
                                   fol::RuleSet::all(), b, {});
    REQUIRE(skew.inconsistent());
    auto skew_neg = fol::check_proof(sig, skew.contradiction->second);
    CHECK(fol::is_not(skew_neg.final.succedent));

    auto fine = fol::is_consistent(sig, parse_all(sig, {"P c", "nor P d P d"}),
                                   fol::RuleSet::all(), b,
                                   parse_all(sig, {"P c", "eq c d"}));
    CHECK_FALSE(fine.inconsistent());
}

TEST_CASE("consistency scans survive later growth of the engine") {
    auto sig = small_sig(4);
    fol::DerivationEngine engine(sig, fol::RuleSet::all(), small_budget(sig));
    engine.add_member(fol::parse_formula(sig, "ex x2 P x1"));
    engine.add_member(fol::make_not(fol::parse_formula(sig, "P x1")));
    CHECK(engine.check_consistency({}).inconsistent());
    // Growing after a scan rebuilds the saturated store without dangling state.
    engine.add_member(fol::parse_formula(sig, "P c"));
    CHECK(engine.query(fol::parse_formula(sig, "P c")).proved());
    CHECK(engine.query(fol::parse_formula(sig, "ex x1 P x1")).proved());
}

TEST_CASE("the step budget keeps verdicts honest") {
    auto sig = small_sig();
    auto b = small_budget(sig);
    b.max_steps = 1;
    auto phi = parse_all(sig, {"eq c d"});
    CHECK_FALSE(fol::derives(sig, phi, fol::parse_formula(sig, "eq d c"),
                             fol::RuleSet{511u}, b).proved());
    b.max_steps = 8;
    CHECK(fol::derives(sig, phi, fol::parse_formula(sig, "eq d c"),
                       fol::RuleSet{511u}, b).proved());
}
