#include "fol/calculus.hpp"

#include <algorithm>
#include <array>

namespace fol {

namespace {

const std::array<std::string, rule_count> names = {
    "ass",     "ant",     "refl",      "subst",   "ex-succ",
    "ex-ante", "nor-intro", "nor-sym", "ctr-pos", "ctr-neg",
};

FormulaSet with(FormulaSet s, const Formula& f) {
    s.insert(f);
    return s;
}

bool subset(const FormulaSet& a, const FormulaSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

const Sequent& premise_at(const std::vector<Sequent>& prior,
                          const std::vector<std::size_t>& premises, std::size_t k) {
    if (k >= premises.size()) throw PremiseMismatch("missing premise " + std::to_string(k));
    if (premises[k] >= prior.size())
        throw OutOfRange("premise index " + std::to_string(premises[k]) +
                         " refers to no earlier step");
    return prior[premises[k]];
}

void need_premises(const RuleApplication& app, std::size_t n) {
    if (app.premises.size() != n)
        throw PremiseMismatch(app.rule + " takes " + std::to_string(n) + " premise(s), got " +
                              std::to_string(app.premises.size()));
}

template <class T>
const T& need(const std::optional<T>& p, const char* rule, const char* name) {
    if (!p) throw OutOfRange(std::string(rule) + " needs parameter " + name);
    return *p;
}

Formula apply_pattern(const FormalStructure& sig, const Formula& pattern, const std::string& x,
                      const Term& t) {
    try {
        return substitute(sig, pattern, x, t);
    } catch (const VariableCapture& e) {
        throw SubstitutionFailure(e.what());
    }
}

void need_pool_variable(const FormalStructure& sig, const std::string& x, const char* rule) {
    if (!sig.in_pool(x))
        throw SideConditionViolated(std::string(rule) + ": not a pool variable: " + x);
}

}  // namespace

unsigned mask_encode(const std::set<Rule>& rules) {
    unsigned mask = 0;
    for (Rule r : rules) mask |= 1u << static_cast<unsigned>(r);
    return mask;
}

std::set<Rule> mask_decode(unsigned mask) {
    if (mask > full_rule_mask)
        throw OutOfRange("rule mask " + std::to_string(mask) + " exceeds " +
                         std::to_string(full_rule_mask));
    std::set<Rule> out;
    for (unsigned i = 0; i < rule_count; ++i)
        if ((mask >> i) & 1u) out.insert(static_cast<Rule>(i));
    return out;
}

std::string rule_name(Rule r) { return names[static_cast<std::size_t>(r)]; }

Rule rule_from_name(const std::string& name) {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<Rule>(i);
    throw UnsupportedDerivedRule("unknown rule name: " + name);
}

std::string to_string(const Sequent& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& f : s.antecedent) {
        if (!first) out += '|';
        first = false;
        out += to_string(f);
    }
    out += "}⊢";
    out += to_string(s.succedent);
    return out;
}

Sequent check_step(const FormalStructure& sig, const std::vector<Sequent>& prior,
                   const RuleApplication& app) {
    if (is_derived_rule(app.rule))
        throw UnsupportedDerivedRule("derived rule in a basic checker: " + app.rule);
    Rule rule = rule_from_name(app.rule);
    switch (rule) {
        case Rule::Assumption: {
            need_premises(app, 0);
            const Formula& phi = need(app.phi, "ass", "phi");
            if (app.gamma.count(phi) == 0)
                throw SideConditionViolated("ass: succedent not among the assumptions: " +
                                            to_string(phi));
            return Sequent{app.gamma, phi};
        }
        case Rule::Antecedent: {
            need_premises(app, 1);
            const Sequent& p = premise_at(prior, app.premises, 0);
            if (!subset(p.antecedent, app.gamma))
                throw SideConditionViolated("ant: antecedent may only grow");
            return Sequent{app.gamma, p.succedent};
        }
        case Rule::Reflexivity: {
            need_premises(app, 0);
            const Term& t = need(app.t, "refl", "t");
            return Sequent{{}, make_eq(t, t)};
        }
        case Rule::Substitution: {
            need_premises(app, 1);
            const Sequent& p = premise_at(prior, app.premises, 0);
            const Formula& pattern = need(app.phi, "subst", "phi");
            const std::string& x = need(app.x, "subst", "x");
            const Term& t = need(app.t, "subst", "t");
            const Term& t2 = need(app.t2, "subst", "t2");
            need_pool_variable(sig, x, "subst");
            Formula before = apply_pattern(sig, pattern, x, t);
            Formula after = apply_pattern(sig, pattern, x, t2);
            if (p.succedent != before)
                throw PremiseMismatch("subst: premise proves " + to_string(p.succedent) +
                                      ", pattern instantiates to " + to_string(before));
            return Sequent{with(p.antecedent, make_eq(t, t2)), after};
        }
        case Rule::ExistsSuccedent: {
            need_premises(app, 1);
            const Sequent& p = premise_at(prior, app.premises, 0);
            const Formula& body = need(app.phi, "ex-succ", "phi");
            const std::string& x = need(app.x, "ex-succ", "x");
            const Term& t = need(app.t, "ex-succ", "t");
            need_pool_variable(sig, x, "ex-succ");
            Formula inst = apply_pattern(sig, body, x, t);
            if (p.succedent != inst)
                throw PremiseMismatch("ex-succ: premise proves " + to_string(p.succedent) +
                                      ", body instantiates to " + to_string(inst));
            return Sequent{p.antecedent, make_exists(x, body)};
        }
        case Rule::ExistsAntecedent: {
            need_premises(app, 1);
            const Sequent& p = premise_at(prior, app.premises, 0);
            const Formula& body = need(app.phi, "ex-ante", "phi");
            const std::string& x = need(app.x, "ex-ante", "x");
            const std::string& x2 = need(app.x2, "ex-ante", "x2");
            const Formula& psi = need(app.psi, "ex-ante", "psi");
            need_pool_variable(sig, x, "ex-ante");
            need_pool_variable(sig, x2, "ex-ante");
            Formula inst = apply_pattern(sig, body, x, make_variable(x2));
            Sequent expected{with(app.gamma, inst), psi};
            if (!(p == expected))
                throw PremiseMismatch("ex-ante: premise is " + to_string(p) + ", expected " +
                                      to_string(expected));
            Formula ex = make_exists(x, body);
            auto fv = free_vars(sig, app.gamma);
            auto fv_ex = free_vars(sig, ex);
            auto fv_psi = free_vars(sig, psi);
            if (fv.count(x2) || fv_ex.count(x2) || fv_psi.count(x2))
                throw SideConditionViolated("ex-ante: " + x2 +
                                            " occurs free in the conclusion context");
            return Sequent{with(app.gamma, ex), psi};
        }
        case Rule::NorIntroduction: {
            need_premises(app, 2);
            const Sequent& p1 = premise_at(prior, app.premises, 0);
            const Sequent& p2 = premise_at(prior, app.premises, 1);
            if (p1.antecedent != p2.antecedent)
                throw PremiseMismatch("nor-intro: premises have different antecedents");
            if (!is_not(p1.succedent) || !is_not(p2.succedent))
                throw PremiseMismatch("nor-intro: premises must deny single formulas");
            return Sequent{p1.antecedent,
                           make_nor(not_body(p1.succedent), not_body(p2.succedent))};
        }
        case Rule::NorSymmetry: {
            need_premises(app, 1);
            const Sequent& p = premise_at(prior, app.premises, 0);
            if (kind(p.succedent) != FormulaKind::Nor)
                throw PremiseMismatch("nor-sym: premise succedent is not a joint denial");
            auto [a, b] = nor_parts(sig, p.succedent);
            return Sequent{p.antecedent, make_nor(b, a)};
        }
        case Rule::ContradictionPos: {
            need_premises(app, 2);
            const Sequent& p1 = premise_at(prior, app.premises, 0);
            const Sequent& p2 = premise_at(prior, app.premises, 1);
            const Formula& phi = need(app.phi, "ctr-pos", "phi");
            FormulaSet expected = with(app.gamma, phi);
            if (p1.antecedent != expected || p2.antecedent != expected)
                throw PremiseMismatch("ctr-pos: premise antecedents differ from gamma + phi");
            if (kind(p2.succedent) != FormulaKind::Nor)
                throw PremiseMismatch("ctr-pos: second premise is not a joint denial");
            auto [psi, chi] = nor_parts(sig, p2.succedent);
            (void)chi;
            if (p1.succedent != psi)
                throw PremiseMismatch("ctr-pos: first premise proves " +
                                      to_string(p1.succedent) + ", denial starts with " +
                                      to_string(psi));
            return Sequent{app.gamma, make_not(phi)};
        }
        case Rule::ContradictionNeg: {
            need_premises(app, 2);
            const Sequent& p1 = premise_at(prior, app.premises, 0);
            const Sequent& p2 = premise_at(prior, app.premises, 1);
            const Formula& phi = need(app.phi, "ctr-neg", "phi");
            FormulaSet expected = with(app.gamma, make_not(phi));
            if (p1.antecedent != expected || p2.antecedent != expected)
                throw PremiseMismatch("ctr-neg: premise antecedents differ from gamma + not-phi");
            if (kind(p2.succedent) != FormulaKind::Nor)
                throw PremiseMismatch("ctr-neg: second premise is not a joint denial");
            auto [psi, chi] = nor_parts(sig, p2.succedent);
            (void)chi;
            if (p1.succedent != psi)
                throw PremiseMismatch("ctr-neg: first premise proves " +
                                      to_string(p1.succedent) + ", denial starts with " +
                                      to_string(psi));
            return Sequent{app.gamma, phi};
        }
    }
    throw UnsupportedDerivedRule("unknown rule: " + app.rule);
}

bool is_derived_rule(const std::string& name) {
    return name == "not-intro-left" || name == "not-intro-right" || name == "notnot-remove" ||
           name == "notnot-intro";
}

namespace {

RuleApplication app_ass(FormulaSet gamma, Formula phi) {
    RuleApplication a;
    a.rule = "ass";
    a.gamma = std::move(gamma);
    a.phi = std::move(phi);
    return a;
}

RuleApplication app_ant(FormulaSet gamma, std::size_t premise) {
    RuleApplication a;
    a.rule = "ant";
    a.gamma = std::move(gamma);
    a.premises = {premise};
    return a;
}

}  // namespace

std::vector<RuleApplication> expand_derived(const FormalStructure& sig,
                                            const std::vector<Sequent>& prior,
                                            const RuleApplication& app) {
    if (!is_derived_rule(app.rule))
        throw UnsupportedDerivedRule("not a derived rule: " + app.rule);
    const std::size_t base = prior.size();
    const Sequent& p = premise_at(prior, app.premises, 0);
    std::vector<RuleApplication> out;

    if (app.rule == "not-intro-left" || app.rule == "not-intro-right") {
        need_premises(app, 1);
        if (kind(p.succedent) != FormulaKind::Nor)
            throw PremiseMismatch(app.rule + ": premise succedent is not a joint denial");
        bool left = app.rule == "not-intro-left";
        auto [f1, f2] = nor_parts(sig, p.succedent);
        Formula target = left ? f1 : f2;
        std::size_t denial_step = app.premises[0];
        if (!left) {
            RuleApplication sym;
            sym.rule = "nor-sym";
            sym.premises = {app.premises[0]};
            out.push_back(sym);  // Γ ⊢ nor f2 f1
            denial_step = base + 0;
        }
        FormulaSet grown = with(p.antecedent, target);
        out.push_back(app_ant(grown, denial_step));
        out.push_back(app_ass(grown, target));
        RuleApplication ctr;
        ctr.rule = "ctr-pos";
        ctr.gamma = p.antecedent;
        ctr.phi = target;
        ctr.premises = {base + out.size() - 1, base + out.size() - 2};
        out.push_back(ctr);
        return out;
    }

    if (app.rule == "notnot-remove") {
        need_premises(app, 1);
        if (!is_not(p.succedent) || !is_not(not_body(p.succedent)))
            throw PremiseMismatch("notnot-remove: premise is not a double denial");
        Formula phi = not_body(not_body(p.succedent));
        FormulaSet grown = with(p.antecedent, make_not(phi));
        out.push_back(app_ant(grown, app.premises[0]));      // ⊢ ¬¬φ
        out.push_back(app_ass(grown, make_not(phi)));        // ⊢ ¬φ
        RuleApplication ctr;
        ctr.rule = "ctr-neg";
        ctr.gamma = p.antecedent;
        ctr.phi = phi;
        ctr.premises = {base + 1, base + 0};
        out.push_back(ctr);
        return out;
    }

    // notnot-intro: from Γ ⊢ φ to Γ ⊢ ¬¬φ.  The default route argues through
    // the triple denial with the negative contradiction rule; the "259" route
    // is shorter and uses the positive one.
    need_premises(app, 1);
    std::string route = app.route.value_or("515");
    const Formula& phi = p.succedent;
    Formula nphi = make_not(phi);
    if (route == "259") {
        FormulaSet grown = with(p.antecedent, nphi);
        out.push_back(app_ant(grown, app.premises[0]));  // ⊢ φ
        out.push_back(app_ass(grown, nphi));             // ⊢ ¬φ
        RuleApplication ctr;
        ctr.rule = "ctr-pos";
        ctr.gamma = p.antecedent;
        ctr.phi = nphi;
        ctr.premises = {base + 0, base + 1};
        out.push_back(ctr);  // Γ ⊢ ¬¬φ
        return out;
    }
    if (route != "515")
        throw UnsupportedDerivedRule("notnot-intro: unknown route " + route);
    Formula nnphi = make_not(nphi);
    Formula nnnphi = make_not(nnphi);
    FormulaSet g1 = with(p.antecedent, nnnphi);
    out.push_back(app_ass(g1, nnnphi));              // 0: ⊢ ¬¬¬φ
    out.push_back(app_ant(g1, app.premises[0]));     // 1: ⊢ φ
    FormulaSet g2 = with(g1, nnphi);
    out.push_back(app_ant(g2, base + 0));            // 2: ⊢ ¬¬¬φ
    out.push_back(app_ass(g2, nnphi));               // 3: ⊢ ¬¬φ
    RuleApplication inner;
    inner.rule = "ctr-neg";
    inner.gamma = g1;
    inner.phi = nphi;
    inner.premises = {base + 3, base + 2};
    out.push_back(inner);                            // 4: Γ∪{¬¬¬φ} ⊢ ¬φ
    RuleApplication outer;
    outer.rule = "ctr-neg";
    outer.gamma = p.antecedent;
    outer.phi = nnphi;
    outer.premises = {base + 1, base + 4};
    out.push_back(outer);                            // 5: Γ ⊢ ¬¬φ
    return out;
}

CheckedProof check_proof(const FormalStructure& sig, const Proof& proof) {
    std::vector<Sequent> established;
    RuleSet used;
    for (std::size_t i = 0; i < proof.steps.size(); ++i) {
        const ProofStep& step = proof.steps[i];
        try {
            if (!is_derived_rule(step.app.rule)) {
                Sequent conc = check_step(sig, established, step.app);
                if (!(conc == step.sequent))
                    throw PremiseMismatch("declared sequent " + to_string(step.sequent) +
                                          " differs from conclusion " + to_string(conc));
                used.mask |= 1u << static_cast<unsigned>(rule_from_name(step.app.rule));
            } else {
                std::vector<RuleApplication> expansion = expand_derived(sig, established, step.app);
                std::vector<Sequent> combined = established;
                for (const auto& sub : expansion) {
                    combined.push_back(check_step(sig, combined, sub));
                    used.mask |= 1u << static_cast<unsigned>(rule_from_name(sub.rule));
                }
                if (combined.empty() || !(combined.back() == step.sequent))
                    throw PremiseMismatch("declared sequent " + to_string(step.sequent) +
                                          " differs from the expansion's conclusion");
            }
        } catch (Error& e) {
            if (e.step_index == Error::no_step) e.step_index = i;
            throw;
        }
        established.push_back(step.sequent);
    }
    if (established.empty()) throw OutOfRange("empty proof");
    return CheckedProof{established.back(), used};
}

namespace {

// Appends an application, checking it immediately so the stored sequents are
// the kernel's own conclusions.
struct ProofBuilder {
    const FormalStructure& sig;
    Proof proof;
    std::vector<Sequent> established;

    std::size_t add(RuleApplication app) {
        Sequent conc = check_step(sig, established, app);
        established.push_back(conc);
        proof.steps.push_back(ProofStep{std::move(app), std::move(conc)});
        return established.size() - 1;
    }
};

std::string fresh_pool_variable(const FormalStructure& sig, const std::set<std::string>& avoid) {
    for (int i = 1; i <= sig.variable_pool_size; ++i) {
        std::string v = "x" + std::to_string(i);
        if (avoid.count(v) == 0) return v;
    }
    throw NoFreshVariable("no pool variable avoids the given terms");
}

std::set<std::string> vars_of_all(const std::vector<Term>& terms) {
    std::set<std::string> out;
    for (const auto& t : terms) {
        auto v = term_vars(t);
        out.insert(v.begin(), v.end());
    }
    return out;
}

}  // namespace

Proof proof_eq_symmetry(const FormalStructure& sig, const Term& t1, const Term& t2) {
    std::string xf = fresh_pool_variable(sig, vars_of_all({t1, t2}));
    ProofBuilder b{sig, {}, {}};
    RuleApplication refl;
    refl.rule = "refl";
    refl.t = t1;
    std::size_t s0 = b.add(std::move(refl));
    Formula hyp = make_eq(t1, t2);
    std::size_t s1 = b.add(app_ant({hyp}, s0));
    RuleApplication subst;
    subst.rule = "subst";
    subst.phi = make_eq(make_variable(xf), t1);
    subst.x = xf;
    subst.t = t1;
    subst.t2 = t2;
    subst.premises = {s1};
    b.add(std::move(subst));
    return std::move(b.proof);
}

Proof proof_eq_transitivity(const FormalStructure& sig, const Term& t1, const Term& t2,
                            const Term& t3) {
    std::string xf = fresh_pool_variable(sig, vars_of_all({t1, t2, t3}));
    ProofBuilder b{sig, {}, {}};
    FormulaSet gamma{make_eq(t1, t2), make_eq(t2, t3)};
    std::size_t s0 = b.add(app_ass(gamma, make_eq(t1, t2)));
    RuleApplication subst;
    subst.rule = "subst";
    subst.phi = make_eq(t1, make_variable(xf));
    subst.x = xf;
    subst.t = t2;
    subst.t2 = t3;
    subst.premises = {s0};
    b.add(std::move(subst));
    return std::move(b.proof);
}

Proof proof_exists_self_eq(const FormalStructure& sig) {
    if (sig.variable_pool_size < 1)
        throw NoFreshVariable("the pool is empty; nothing to quantify over");
    Term x1 = make_variable("x1");
    ProofBuilder b{sig, {}, {}};
    RuleApplication refl;
    refl.rule = "refl";
    refl.t = x1;
    std::size_t s0 = b.add(std::move(refl));
    RuleApplication ex;
    ex.rule = "ex-succ";
    ex.phi = make_eq(x1, x1);
    ex.x = "x1";
    ex.t = x1;
    ex.premises = {s0};
    b.add(std::move(ex));
    return std::move(b.proof);
}

Proof proof_congruence(const FormalStructure& sig, const std::string& function_symbol,
                       const std::vector<Term>& args, const std::vector<Term>& args2) {
    int arity = sig.arity(function_symbol);
    if (arity < 0 || args.size() != static_cast<std::size_t>(arity) ||
        args2.size() != args.size())
        throw OutOfRange("congruence: " + function_symbol + " wants " + std::to_string(arity) +
                         " argument pairs");
    ProofBuilder b{sig, {}, {}};
    Term lhs = make_application(sig, function_symbol, args);
    RuleApplication refl;
    refl.rule = "refl";
    refl.t = lhs;
    std::size_t last = b.add(std::move(refl));
    if (args.empty()) return std::move(b.proof);

    std::vector<Term> all = args;
    all.insert(all.end(), args2.begin(), args2.end());
    std::string xf = fresh_pool_variable(sig, vars_of_all(all));
    // Rewrite the right-hand copy argument by argument; each substitution
    // contributes its equation to the antecedent.
    std::vector<Term> mixed = args;
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::vector<Term> holed = mixed;
        holed[i] = make_variable(xf);
        RuleApplication subst;
        subst.rule = "subst";
        subst.phi = make_eq(lhs, make_application(sig, function_symbol, holed));
        subst.x = xf;
        subst.t = args[i];
        subst.t2 = args2[i];
        subst.premises = {last};
        last = b.add(std::move(subst));
        mixed[i] = args2[i];
    }
    return std::move(b.proof);
}

}  // namespace fol
