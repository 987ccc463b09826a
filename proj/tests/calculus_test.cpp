#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fol/calculus.hpp"
#include "fol/errors.hpp"
#include "fol/io.hpp"
#include "fol/syntax.hpp"

namespace {

fol::FormalStructure golden_sig() {
    return fol::FormalStructure::make(
        {{"c", 0}, {"d", 0}, {"f", 1}, {"g", 2}, {"P", -1}, {"Q", -2}}, 2);
}

fol::CheckedProof run(const std::string& script) {
    auto sig = golden_sig();
    std::istringstream in(script);
    return fol::check_proof(sig, fol::load_proof(in, sig));
}

}  // namespace

// --- one positive script per basic rule -----------------------------------

TEST_CASE("assumption concludes a member of the antecedent") {
    auto ok = run("step 0: ass premises= params= ante=P c succ=P c\n");
    CHECK(fol::to_string(ok.final) == "{P c}⊢P c");
    CHECK(ok.used.mask == 1u);
}

TEST_CASE("antecedent enlarges without changing the succedent") {
    auto ok = run(
        "step 0: ass premises= params= ante=P c succ=P c\n"
        "step 1: ant premises=0 params= ante=P c|Q c d succ=P c\n");
    CHECK(fol::to_string(ok.final) == "{P c|Q c d}⊢P c");
    CHECK(ok.used.mask == 3u);
}

TEST_CASE("reflexivity proves self-equality from nothing") {
    auto ok = run("step 0: refl premises= params= ante= succ=eq f c f c\n");
    CHECK(fol::to_string(ok.final) == "{}⊢eq f c f c");
    CHECK(ok.used.mask == 4u);
}

TEST_CASE("substitution replaces one marked occurrence along an equation") {
    auto ok = run(
        "step 0: refl premises= params= ante= succ=eq c c\n"
        "step 1: subst premises=0 params=phi=eq x1 c;x=x1;t=c;t2=d ante=eq c d succ=eq d c\n");
    CHECK(fol::to_string(ok.final) == "{eq c d}⊢eq d c");
    CHECK(ok.used.mask == 12u);
}

TEST_CASE("existential introduction generalizes a witness term") {
    auto ok = run(
        "step 0: ass premises= params= ante=P c succ=P c\n"
        "step 1: ex-succ premises=0 params=t=c ante=P c succ=ex x1 P x1\n");
    CHECK(fol::to_string(ok.final) == "{P c}⊢ex x1 P x1");
    CHECK(ok.used.mask == 17u);
}

TEST_CASE("existential elimination discharges a fresh instance") {
    auto ok = run(
        "step 0: ass premises= params= ante=P x2|Q c d succ=Q c d\n"
        "step 1: ex-ante premises=0 params=phi=P x1;x=x1;x2=x2 ante=ex x1 P x1|Q c d succ=Q c d\n");
    CHECK(fol::to_string(ok.final) == "{Q c d|ex x1 P x1}⊢Q c d");
    CHECK(ok.used.mask == 33u);
}

TEST_CASE("joint denial is introduced from the two denials") {
    auto ok = run(
        "step 0: ass premises= params= ante=nor P c P c|nor P d P d succ=nor P c P c\n"
        "step 1: ass premises= params= ante=nor P c P c|nor P d P d succ=nor P d P d\n"
        "step 2: nor-intro premises=0,1 params= ante=nor P c P c|nor P d P d succ=nor P c P d\n");
    CHECK(fol::to_string(ok.final) == "{nor P c P c|nor P d P d}⊢nor P c P d");
    CHECK(ok.used.mask == 65u);
}

TEST_CASE("joint denial commutes") {
    auto ok = run(
        "step 0: ass premises= params= ante=nor P c Q c d succ=nor P c Q c d\n"
        "step 1: nor-sym premises=0 params= ante=nor P c Q c d succ=nor Q c d P c\n");
    CHECK(fol::to_string(ok.final) == "{nor P c Q c d}⊢nor Q c d P c");
    CHECK(ok.used.mask == 129u);
}

TEST_CASE("a hypothesis entailing a clash is denied") {
    auto ok = run(
        "step 0: ass premises= params= ante=P d|Q c d|nor Q c d P c succ=Q c d\n"
        "step 1: ass premises= params= ante=P d|Q c d|nor Q c d P c succ=nor Q c d P c\n"
        "step 2: ctr-pos premises=0,1 params= ante=Q c d|nor Q c d P c succ=nor P d P d\n");
    CHECK(fol::to_string(ok.final) == "{Q c d|nor Q c d P c}⊢nor P d P d");
    CHECK(ok.used.mask == 257u);
}

TEST_CASE("a denial entailing a clash yields the formula itself") {
    auto ok = run(
        "step 0: ass premises= params= ante=nor P c P c|Q c d|nor Q c d P d succ=Q c d\n"
        "step 1: ass premises= params= ante=nor P c P c|Q c d|nor Q c d P d succ=nor Q c d P d\n"
        "step 2: ctr-neg premises=0,1 params= ante=Q c d|nor Q c d P d succ=P c\n");
    CHECK(fol::to_string(ok.final) == "{Q c d|nor Q c d P d}⊢P c");
    CHECK(ok.used.mask == 513u);
}

// --- at least two rejections per basic rule -------------------------------

TEST_CASE("assumption rejects a succedent outside the antecedent") {
    CHECK_THROWS_AS(run("step 0: ass premises= params= ante=P d succ=P c\n"),
                    fol::SideConditionViolated);
    CHECK_THROWS_AS(run("step 0: ass premises= params= ante= succ=P c\n"),
                    fol::SideConditionViolated);
}

TEST_CASE("antecedent rejects shrinking and missing premises") {
    CHECK_THROWS_AS(run(
        "step 0: ass premises= params= ante=P c|Q c d succ=P c\n"
        "step 1: ant premises=0 params= ante=P c succ=P c\n"),
        fol::SideConditionViolated);
    CHECK_THROWS_AS(run("step 0: ant premises=5 params= ante=P c succ=P c\n"),
                    fol::OutOfRange);
}

TEST_CASE("reflexivity rejects distinct sides and a nonempty antecedent") {
    CHECK_THROWS_AS(run("step 0: refl premises= params= ante= succ=eq c d\n"),
                    fol::PremiseMismatch);
    CHECK_THROWS_AS(run("step 0: refl premises= params= ante=P c succ=eq c c\n"),
                    fol::PremiseMismatch);
}

TEST_CASE("substitution rejects a pattern that misses the premise") {
    CHECK_THROWS_AS(run(
        "step 0: refl premises= params= ante= succ=eq c c\n"
        "step 1: subst premises=0 params=phi=eq x1 d;x=x1;t=c;t2=d ante=eq c d succ=eq d d\n"),
        fol::PremiseMismatch);
}

TEST_CASE("substitution rejects a replacement the binder would capture") {
    CHECK_THROWS_AS(run(
        "step 0: ass premises= params= ante=ex x2 Q c x2 succ=ex x2 Q c x2\n"
        "step 1: subst premises=0 params=phi=ex x2 Q x1 x2;x=x1;t=c;t2=x2"
        " ante=ex x2 Q c x2|eq c x2 succ=ex x2 Q x2 x2\n"),
        fol::SubstitutionFailure);
}

TEST_CASE("existential introduction rejects a witness that does not fit") {
    CHECK_THROWS_AS(run(
        "step 0: ass premises= params= ante=P c succ=P c\n"
        "step 1: ex-succ premises=0 params=t=d ante=P c succ=ex x1 P x1\n"),
        fol::PremiseMismatch);
    CHECK_THROWS_AS(run(
        "step 0: ass premises= params= ante=P c succ=P c\n"
        "step 1: ex-succ premises=0 params=t=c ante=P c succ=ex x1 P x2\n"),
        fol::PremiseMismatch);
}

TEST_CASE("existential elimination rejects a stale witness variable") {
    // x2 is free in the succedent carried across the elimination.
    CHECK_THROWS_AS(run(
        "step 0: ass premises= params= ante=P x2|Q c x2 succ=Q c x2\n"
        "step 1: ex-ante premises=0 params=phi=P x1;x=x1;x2=x2 ante=ex x1 P x1|Q c x2 succ=Q c x2\n"),
        fol::SideConditionViolated);
}

TEST_CASE("existential elimination rejects a premise without the instance") {
    CHECK_THROWS_AS(run(
        "step 0: ass premises= params= ante=P c succ=P c\n"
        "step 1: ex-ante premises=0 params=phi=P x1;x=x1;x2=x2 ante=ex x1 P x1 succ=P c\n"),
        fol::PremiseMismatch);
}

TEST_CASE("joint denial introduction rejects mismatched premises") {
    CHECK_THROWS_AS(run(
        "step 0: ass premises= params= ante=nor P c P c succ=nor P c P c\n"
        "step 1: ass premises= params= ante=nor P d P d succ=nor P d P d\n"
        "step 2: nor-intro premises=0,1 params= ante=nor P c P c|nor P d P d succ=nor P c P d\n"),
        fol::PremiseMismatch);
    CHECK_THROWS_AS(run(
        "step 0: ass premises= params= ante=nor P c Q c d succ=nor P c Q c d\n"
        "step 1: ass premises= params= ante=nor P c Q c d succ=nor P c Q c d\n"
        "step 2: nor-intro premises=0,1 params= ante=nor P c Q c d succ=nor P c Q c d\n"),
        fol::PremiseMismatch);
}

TEST_CASE("joint denial symmetry rejects non-denials and wrong conclusions") {
    CHECK_THROWS_AS(run(
        "step 0: ass premises= params= ante=P c succ=P c\n"
        "step 1: nor-sym premises=0 params= ante=P c succ=P c\n"),
        fol::PremiseMismatch);
    CHECK_THROWS_AS(run(
        "step 0: ass premises= params= ante=nor P c Q c d succ=nor P c Q c d\n"
        "step 1: nor-sym premises=0 params= ante=nor P c Q c d succ=nor P c Q c d\n"),
        fol::PremiseMismatch);
}

TEST_CASE("positive contradiction rejects a pair that does not clash") {
    CHECK_THROWS_AS(run(
        "step 0: ass premises= params= ante=P c|nor P d P c succ=P c\n"
        "step 1: ass premises= params= ante=P c|nor P d P c succ=nor P d P c\n"
        "step 2: ctr-pos premises=0,1 params= ante=nor P d P c succ=nor P c P c\n"),
        fol::PremiseMismatch);
    CHECK_THROWS_AS(run(
        "step 0: ass premises= params= ante=P c|nor P c Q c d succ=P c\n"
        "step 1: ass premises= params= ante=P c|nor P c Q c d succ=nor P c Q c d\n"
        "step 2: ctr-pos premises=0,1 params= ante=P c|nor P c Q c d succ=nor P d P d\n"),
        fol::PremiseMismatch);
}

TEST_CASE("negative contradiction rejects swaps and a missing hypothesis") {
    CHECK_THROWS_AS(run(
        "step 0: ass premises= params= ante=nor P c P c|nor Q c d P d|Q c d succ=nor Q c d P d\n"
        "step 1: ass premises= params= ante=nor P c P c|nor Q c d P d|Q c d succ=Q c d\n"
        "step 2: ctr-neg premises=0,1 params= ante=nor Q c d P d|Q c d succ=P c\n"),
        fol::PremiseMismatch);
    CHECK_THROWS_AS(run(
        "step 0: ass premises= params= ante=Q c d|nor Q c d P d succ=Q c d\n"
        "step 1: ass premises= params= ante=Q c d|nor Q c d P d succ=nor Q c d P d\n"
        "step 2: ctr-neg premises=0,1 params= ante=Q c d|nor Q c d P d succ=P c\n"),
        fol::PremiseMismatch);
}

TEST_CASE("failures are stamped with the failing step") {
    try {
        run("step 0: ass premises= params= ante=P c succ=P c\n"
            "step 1: ex-succ premises=0 params=t=d ante=P c succ=ex x1 P x1\n");
        FAIL("expected a rejection");
    } catch (const fol::Error& e) {
        CHECK(e.step_index == 1);
    }
}

// --- ready-made equality proofs -------------------------------------------

TEST_CASE("equality symmetry certifies with reflexivity and substitution") {
    auto sig = golden_sig();
    auto p = fol::proof_eq_symmetry(sig, fol::parse_term(sig, "c"), fol::parse_term(sig, "d"));
    auto ok = fol::check_proof(sig, p);
    CHECK(fol::to_string(ok.final) == "{eq c d}⊢eq d c");
    CHECK(ok.used.mask == 14u);
}

TEST_CASE("equality transitivity certifies by rewriting the first equation") {
    auto sig = golden_sig();
    auto p = fol::proof_eq_transitivity(sig, fol::parse_term(sig, "c"),
                                        fol::parse_term(sig, "d"),
                                        fol::parse_term(sig, "f c"));
    auto ok = fol::check_proof(sig, p);
    CHECK(fol::to_string(ok.final) == "{eq c d|eq d f c}⊢eq c f c");
    CHECK(ok.used.mask == 9u);
}

TEST_CASE("something equals itself, existentially") {
    auto sig = golden_sig();
    auto ok = fol::check_proof(sig, fol::proof_exists_self_eq(sig));
    CHECK(fol::to_string(ok.final) == "{}⊢ex x1 eq x1 x1");
    CHECK(ok.used.mask == 20u);
}

TEST_CASE("congruence certifies for constants, unary and binary symbols") {
    auto sig = golden_sig();
    auto c = fol::parse_term(sig, "c");
    auto d = fol::parse_term(sig, "d");

    auto constant = fol::check_proof(sig, fol::proof_congruence(sig, "c", {}, {}));
    CHECK(fol::to_string(constant.final) == "{}⊢eq c c");
    CHECK(constant.used.mask == 4u);

    auto unary = fol::check_proof(sig, fol::proof_congruence(sig, "f", {c}, {d}));
    CHECK(fol::to_string(unary.final) == "{eq c d}⊢eq f c f d");
    CHECK(unary.used.subset_of(fol::RuleSet{15u}));

    auto binary = fol::check_proof(sig, fol::proof_congruence(sig, "g", {c, d}, {d, c}));
    CHECK(fol::to_string(binary.final) == "{eq c d|eq d c}⊢eq g c d g d c");
    CHECK(binary.used.subset_of(fol::RuleSet{15u}));
}

TEST_CASE("the fresh pattern variable skips the terms at hand") {
    auto sig = golden_sig();
    auto p = fol::proof_eq_symmetry(sig, fol::parse_term(sig, "x1"),
                                    fol::parse_term(sig, "c"));
    auto ok = fol::check_proof(sig, p);
    CHECK(fol::to_string(ok.final) == "{eq x1 c}⊢eq c x1");
    auto none = fol::FormalStructure::make({{"c", 0}, {"d", 0}}, 1);
    CHECK_THROWS_AS(fol::proof_eq_symmetry(none, fol::parse_term(none, "x1"),
                                           fol::parse_term(none, "c")),
                    fol::NoFreshVariable);
}

// --- derived rules --------------------------------------------------------

TEST_CASE("denying the left half of a joint denial expands cleanly") {
    auto ok = run(
        "step 0: ass premises= params= ante=nor P c Q c d succ=nor P c Q c d\n"
        "step 1: not-intro-left premises=0 params= ante=nor P c Q c d succ=nor P c P c\n");
    CHECK(fol::to_string(ok.final) == "{nor P c Q c d}⊢nor P c P c");
    CHECK(ok.used.subset_of(fol::RuleSet{259u}));
}

TEST_CASE("denying the right half also swaps first") {
    auto ok = run(
        "step 0: ass premises= params= ante=nor P c Q c d succ=nor P c Q c d\n"
        "step 1: not-intro-right premises=0 params= ante=nor P c Q c d succ=nor Q c d Q c d\n");
    CHECK(fol::to_string(ok.final) == "{nor P c Q c d}⊢nor Q c d Q c d");
    CHECK(ok.used.subset_of(fol::RuleSet{387u}));
}

TEST_CASE("double denial removal expands through negative contradiction") {
    auto ok = run(
        "step 0: ass premises= params= ante=nor nor P c P c nor P c P c succ=nor nor P c P c nor P c P c\n"
        "step 1: notnot-remove premises=0 params= ante=nor nor P c P c nor P c P c succ=P c\n");
    CHECK(fol::to_string(ok.final) == "{nor nor P c P c nor P c P c}⊢P c");
    CHECK(ok.used.subset_of(fol::RuleSet{515u}));
}

TEST_CASE("double denial introduction offers both contradiction routes") {
    const std::string base =
        "step 0: ass premises= params= ante=P c succ=P c\n";
    auto by_neg = run(base +
        "step 1: notnot-intro premises=0 params= ante=P c succ=nor nor P c P c nor P c P c\n");
    CHECK(fol::to_string(by_neg.final) == "{P c}⊢nor nor P c P c nor P c P c");
    CHECK(by_neg.used.subset_of(fol::RuleSet{515u}));

    auto by_pos = run(base +
        "step 1: notnot-intro premises=0 params=route=259 ante=P c succ=nor nor P c P c nor P c P c\n");
    CHECK(fol::to_string(by_pos.final) == "{P c}⊢nor nor P c P c nor P c P c");
    CHECK(by_pos.used.subset_of(fol::RuleSet{259u}));

    CHECK_THROWS_AS(run(base +
        "step 1: notnot-intro premises=0 params=route=42 ante=P c succ=nor nor P c P c nor P c P c\n"),
        fol::UnsupportedDerivedRule);
}

TEST_CASE("derived names are recognized, basic names are not") {
    for (const char* name : {"not-intro-left", "not-intro-right", "notnot-remove",
                             "notnot-intro"}) {
        CHECK(fol::is_derived_rule(name));
    }
    CHECK_FALSE(fol::is_derived_rule("ass"));
    CHECK_FALSE(fol::is_derived_rule("modus-ponens"));
}

// --- rule sets and their mask encoding ------------------------------------

TEST_CASE("rule names round-trip") {
    for (unsigned i = 0; i < fol::rule_count; ++i) {
        auto r = static_cast<fol::Rule>(i);
        CHECK(fol::rule_from_name(fol::rule_name(r)) == r);
    }
    CHECK(fol::rule_name(fol::Rule::NorIntroduction) == "nor-intro");
    CHECK_THROWS_AS(fol::rule_from_name("frobnicate"), fol::UnsupportedDerivedRule);
}

TEST_CASE("mask encoding round-trips over the whole range") {
    for (unsigned m = 0; m < 1024; ++m) {
        CHECK(fol::mask_encode(fol::mask_decode(m)) == m);
    }
    CHECK_THROWS_AS(fol::mask_decode(1024), fol::OutOfRange);
}

TEST_CASE("named rule sets land on their frozen masks") {
    CHECK(fol::mask_encode({fol::Rule::Assumption, fol::Rule::Reflexivity,
                            fol::Rule::NorIntroduction}) == 69u);
    CHECK(fol::RuleSet::all().mask == 1023u);
    CHECK(fol::RuleSet::of({}).mask == 0u);

    auto s = fol::RuleSet::of({fol::Rule::Assumption, fol::Rule::Antecedent});
    CHECK(s.contains(fol::Rule::Assumption));
    CHECK_FALSE(s.contains(fol::Rule::Reflexivity));
    CHECK(s.subset_of(fol::RuleSet::all()));
    CHECK_FALSE(fol::RuleSet::all().subset_of(s));
    CHECK(s.with(fol::Rule::Reflexivity).mask == 7u);
}
