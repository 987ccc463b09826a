#include "fol/derive.hpp"

#include <algorithm>
#include <deque>
#include <tuple>
#include <unordered_map>

// The oracle is a bounded forward-chaining search.  For an antecedent set it
// saturates a set of *facts* — formulas known derivable from it, each with
// the exact sub-antecedent used — under single-premise moves (substitution
// rewriting along antecedent equations, denial symmetry, existential
// introduction).  Goals that are not reached directly are attacked through
// the contradiction rules: hypothesise the denied/denying formula in a child
// context layered over the parent, saturate it, and look for a refutation
// pair (a formula together with a denial starting with it).  Existential
// members open into further child contexts via the antecedent existential
// rule, with facts not mentioning the fresh variable lifted back.  Every
// positive answer is assembled into a rule-by-rule proof and re-checked by
// the kernel before it is reported, so the search can only err towards
// Unknown.

namespace fol {

namespace {

std::string key_of(const SymbolString& toks) {
    std::string out;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i) out += ' ';
        out += toks[i];
    }
    return out;
}
std::string key_of(const Formula& f) { return key_of(f.tokens); }

std::vector<Formula> ante_union(const std::vector<Formula>& a, const std::vector<Formula>& b) {
    std::vector<Formula> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<Formula> ante_with(const std::vector<Formula>& a, const Formula& f) {
    return ante_union(a, {f});
}

std::vector<Formula> ante_without(const std::vector<Formula>& a, const Formula& f) {
    std::vector<Formula> out;
    for (const auto& g : a)
        if (!(g == f)) out.push_back(g);
    return out;
}

bool ante_contains(const std::vector<Formula>& a, const Formula& f) {
    return std::binary_search(a.begin(), a.end(), f);
}

struct Prov {
    enum Kind { Member, Refl, Rewrite, NorSym, ExIntro, Lift, CtrPair } kind = Member;
    std::size_t src1 = 0, src2 = 0;  // fact ids within the owning chain
    Formula f1;                      // rewrite pattern / ex body / lifted existential / export
    std::string x, x2;
    Term t, t2;
    const void* child = nullptr;     // Lift: the child context the source lives in
};

struct Fact {
    Formula formula;
    std::vector<Formula> ante;  // sorted, unique, subset of the owning context
    Prov prov;
};

struct Context {
    Context* parent = nullptr;
    int depth = 0;
    std::size_t base = 0;  // chain ids below base resolve in the parent
    std::vector<Formula> local_members;
    std::size_t members_seeded = 0;
    std::vector<Fact> facts;
    std::unordered_map<std::string, std::size_t> index;  // formula key -> chain id
    std::unordered_map<std::string, std::vector<std::size_t>> by_first;
    std::vector<std::pair<Term, Term>> equations;  // local equation members, as written
    std::size_t equations_scanned = 0;
    std::optional<std::pair<std::size_t, std::size_t>> refutation;
    std::map<std::string, std::unique_ptr<Context>> children;  // keyed by hypothesis
    bool saturated = false;
    bool saturating = false;

    std::size_t total() const { return base + facts.size(); }

    const Fact& fact(std::size_t id) const {
        const Context* c = this;
        while (id < c->base) c = c->parent;
        return c->facts[id - c->base];
    }

    const Context* owner_of(std::size_t id) const {
        const Context* c = this;
        while (id < c->base) c = c->parent;
        return c;
    }

    std::optional<std::size_t> find(const std::string& key) const {
        for (const Context* c = this; c; c = c->parent) {
            auto it = c->index.find(key);
            if (it != c->index.end()) return it->second;
        }
        return std::nullopt;
    }

    std::optional<std::pair<std::size_t, std::size_t>> effective_refutation() const {
        for (const Context* c = this; c; c = c->parent)
            if (c->refutation) return c->refutation;
        return std::nullopt;
    }
};

// Raised internally when a proof cannot be assembled under the admitted
// rules; the surrounding route then falls through to Unknown.
struct AssembleFail {};

}  // namespace

struct DerivationEngine::Impl {
    FormalStructure sig;
    RuleSet rules;
    SearchBudget budget;
    FormulaSet member_set;
    std::unique_ptr<Context> root;
    bool cap_hit = false;

    static constexpr std::size_t fact_cap = 120000;
    static constexpr int max_chain_depth = 3;
    static constexpr std::size_t max_openings = 16;
    static constexpr std::size_t max_probe_queries = 64;

    TermSet refl_terms;
    std::set<std::string> refl_seeded;
    // Facts at the root may reference child contexts (consistency checks lift
    // refutations up); growing the root then forces a rebuild, as the
    // children are discarded.
    bool root_has_child_links = false;
    // instance key -> (existential, bound variable, witness term) entries
    std::unordered_map<std::string, std::vector<std::tuple<Formula, std::string, Term>>> ex_index;
    std::set<std::string> ex_registered;
    TermSet instance_terms;

    std::set<std::string> goals_in_progress;

    Impl(const FormalStructure& s, RuleSet r, SearchBudget b)
        : sig(s), rules(r), budget(std::move(b)) {
        root = std::make_unique<Context>();
        instance_terms = budget.candidate_terms;
        for (const auto& v : sig.pool_variables()) instance_terms.insert(make_variable(v));
        for (const auto& t : budget.candidate_terms) refl_terms.insert(t);
        for (const auto& v : sig.pool_variables()) refl_terms.insert(make_variable(v));
        for (const auto& f : budget.candidate_formulas) register_existentials(f);
    }

    // --- registration of existential-introduction targets ------------------

    void register_existentials(const Formula& f) {
        switch (kind(f)) {
            case FormulaKind::Atom:
                return;
            case FormulaKind::Nor: {
                auto [a, b] = nor_parts(sig, f);
                register_existentials(a);
                register_existentials(b);
                return;
            }
            case FormulaKind::Exists: {
                if (!ex_registered.insert(key_of(f)).second) return;
                auto [x, body] = exists_parts(f);
                for (const auto& t : instance_terms) {
                    Formula inst;
                    try {
                        inst = substitute(sig, body, x, t);
                    } catch (const VariableCapture&) {
                        continue;
                    }
                    ex_index[key_of(inst)].emplace_back(f, x, t);
                    // A fact equal to the instance may already exist.
                    if (auto id = root->find(key_of(inst))) pending_ex_hits.push_back(*id);
                }
                register_existentials(body);
                return;
            }
        }
    }

    std::vector<std::size_t> pending_ex_hits;

    // --- fact bookkeeping ---------------------------------------------------

    std::deque<std::size_t> queue;  // chain ids local to the context being saturated

    bool add_fact(Context& C, Formula f, std::vector<Formula> ante, Prov prov) {
        if (C.total() >= fact_cap) {
            cap_hit = true;
            return false;
        }
        if (prov.kind != Prov::Member && f.depth > budget.max_formula_depth) return false;
        std::string key = key_of(f);
        if (C.find(key)) return false;
        std::size_t id = C.total();
        C.index.emplace(key, id);
        bool is_denial = kind(f) == FormulaKind::Nor;
        Formula first_part;
        if (is_denial) first_part = nor_parts(sig, f).first;
        C.facts.push_back(Fact{std::move(f), std::move(ante), std::move(prov)});
        const Fact& added = C.facts.back();
        // Refutation pair: a fact together with a denial beginning with it.
        if (!C.effective_refutation()) {
            if (is_denial) {
                if (auto psi = C.find(key_of(first_part))) C.refutation = {{*psi, id}};
            }
            if (!C.refutation) {
                for (const Context* c = &C; c; c = c->parent) {
                    auto it = c->by_first.find(key_of(added.formula));
                    if (it != c->by_first.end() && !it->second.empty()) {
                        C.refutation = {{id, it->second.front()}};
                        break;
                    }
                }
            }
        }
        if (is_denial) C.by_first[key_of(first_part)].push_back(id);
        queue.push_back(id);
        return true;
    }

    // --- saturation ---------------------------------------------------------

    void seed_members(Context& C) {
        for (; C.members_seeded < C.local_members.size(); ++C.members_seeded) {
            const Formula& m = C.local_members[C.members_seeded];
            if (m.tokens[0] == tok_eq) {
                auto args = atom_args(sig, m);
                if (!(args[0] == args[1])) C.equations.emplace_back(args[0], args[1]);
            }
            if (rules.contains(Rule::Assumption)) add_fact(C, m, {m}, Prov{});
            if (&C == root.get() && rules.contains(Rule::Reflexivity))
                for (const auto& child : collect_subterms(m)) refl_terms.insert(child);
        }
    }

    std::vector<Term> collect_subterms(const Formula& f) {
        std::vector<Term> out;
        std::vector<std::variant<Term, Formula>> work = children(sig, f);
        while (!work.empty()) {
            auto item = std::move(work.back());
            work.pop_back();
            if (std::holds_alternative<Term>(item)) {
                Term t = std::get<Term>(item);
                if (t.tokens.size() > 1)
                    for (auto& sub : children(sig, t)) work.push_back(sub);
                out.push_back(std::move(t));
            } else {
                for (auto& sub : children(sig, std::get<Formula>(item))) work.push_back(sub);
            }
        }
        return out;
    }

    void seed_refl(Context& C) {
        if (&C != root.get() || !rules.contains(Rule::Reflexivity)) return;
        for (const auto& t : refl_terms) {
            std::string k = to_string(t);
            if (!refl_seeded.insert(k).second) continue;
            Prov p;
            p.kind = Prov::Refl;
            p.t = t;
            add_fact(C, make_eq(t, t), {}, std::move(p));
        }
    }

    // Occurrences of u (to be replaced by v) inside f, with capture checks.
    struct Occurrence {
        std::size_t begin;
        Formula pattern;  // f with the occurrence replaced by the fresh variable
    };

    std::vector<Occurrence> occurrences(const Formula& f, const Term& u, const Term& v) {
        std::vector<Occurrence> out;
        std::set<std::string> forbidden = term_vars(u);
        for (const auto& tv : term_vars(v)) forbidden.insert(tv);
        std::set<std::string> fvars;
        for (const auto& tok : f.tokens)
            if (FormalStructure::is_variable_token(tok)) fvars.insert(tok);
        for (const auto& tv : forbidden) fvars.insert(tv);
        std::string xf;
        for (int i = 1; i <= sig.variable_pool_size; ++i) {
            std::string cand = "x" + std::to_string(i);
            if (fvars.count(cand) == 0) {
                xf = cand;
                break;
            }
        }
        if (xf.empty()) return out;  // no pattern variable available

        // Walk the formula; inside atomic spans every position starts a
        // subterm, so a token match of u there is a genuine occurrence.
        std::vector<std::string> binders;
        walk_atomic_spans(f.tokens, 0, f.tokens.size(), binders, [&](std::size_t b,
                                                                     std::size_t e,
                                                                     const std::vector<std::string>& bound) {
            for (std::size_t p = b; p + u.tokens.size() <= e; ++p) {
                if (!std::equal(u.tokens.begin(), u.tokens.end(), f.tokens.begin() + p)) continue;
                bool captured = false;
                for (const auto& y : bound)
                    if (forbidden.count(y)) captured = true;
                if (captured) continue;
                SymbolString patt;
                patt.insert(patt.end(), f.tokens.begin(), f.tokens.begin() + p);
                patt.push_back(xf);
                patt.insert(patt.end(), f.tokens.begin() + p + u.tokens.size(), f.tokens.end());
                out.push_back(Occurrence{p, Formula{std::move(patt), f.depth}});
            }
        });
        for (auto& occ : out) {
            occ.pattern = parse_formula(sig, occ.pattern.tokens);  // recompute depth
        }
        return out;
    }

    template <class Fn>
    void walk_atomic_spans(const SymbolString& toks, std::size_t b, std::size_t e,
                           std::vector<std::string>& binders, const Fn& fn) {
        const std::string& tok = toks[b];
        if (tok == tok_nor) {
            std::size_t mid = formula_end_at(toks, b + 1);
            walk_atomic_spans(toks, b + 1, mid, binders, fn);
            walk_atomic_spans(toks, mid, e, binders, fn);
            return;
        }
        if (tok == tok_ex) {
            binders.push_back(toks[b + 1]);
            walk_atomic_spans(toks, b + 2, e, binders, fn);
            binders.pop_back();
            return;
        }
        fn(b + 1, e, binders);  // atomic: argument region follows the head
    }

    std::size_t formula_end_at(const SymbolString& toks, std::size_t pos) {
        const std::string& tok = toks[pos++];
        if (tok == tok_nor) {
            pos = formula_end_at(toks, pos);
            return formula_end_at(toks, pos);
        }
        if (tok == tok_ex) return formula_end_at(toks, pos + 1);
        if (tok == tok_eq) {
            pos = term_end_at(toks, pos);
            return term_end_at(toks, pos);
        }
        int n = -sig.arity(tok);
        for (int i = 0; i < n; ++i) pos = term_end_at(toks, pos);
        return pos;
    }

    std::size_t term_end_at(const SymbolString& toks, std::size_t pos) {
        const std::string& tok = toks[pos++];
        if (FormalStructure::is_variable_token(tok)) return pos;
        int arity = sig.arity(tok);
        for (int i = 0; i < arity; ++i) pos = term_end_at(toks, pos);
        return pos;
    }

    // Rewriting is restricted to atoms, self-denials and existentials.  An
    // asymmetric denial is always a finished product here (it only ever
    // feeds pair detection), and rewriting those too would blow the fact
    // store up with cross-variants of every denial in a large member set.
    static bool rewritable_shape(const Formula& f) {
        return kind(f) != FormulaKind::Nor || is_not(f);
    }

    void try_rewrites(Context& C, std::size_t fact_id, const Term& u, const Term& v) {
        if (!rules.contains(Rule::Substitution)) return;
        const Fact& src = C.fact(fact_id);
        if (!rewritable_shape(src.formula)) return;
        Formula formula = src.formula;        // copy: facts vector may reallocate
        std::vector<Formula> ante = src.ante;
        for (const auto& occ : occurrences(formula, u, v)) {
            SymbolString out;
            out.insert(out.end(), formula.tokens.begin(),
                       formula.tokens.begin() + static_cast<std::ptrdiff_t>(occ.begin));
            out.insert(out.end(), v.tokens.begin(), v.tokens.end());
            out.insert(out.end(),
                       formula.tokens.begin() + static_cast<std::ptrdiff_t>(occ.begin + u.tokens.size()),
                       formula.tokens.end());
            Formula rewritten = parse_formula(sig, out);
            Prov p;
            p.kind = Prov::Rewrite;
            p.src1 = fact_id;
            p.f1 = occ.pattern;
            p.x = occ.pattern.tokens[occ.begin];  // the fresh variable token
            p.t = u;
            p.t2 = v;
            add_fact(C, std::move(rewritten), ante_with(ante, make_eq(u, v)), std::move(p));
        }
    }

    void process_fact(Context& C, std::size_t id) {
        Formula f = C.fact(id).formula;
        std::vector<Formula> ante = C.fact(id).ante;

        for (const Context* c = &C; c; c = c->parent)
            for (const auto& [u, v] : c->equations) try_rewrites(C, id, u, v);

        if (rules.contains(Rule::NorSymmetry) && kind(f) == FormulaKind::Nor) {
            auto [a, b] = nor_parts(sig, f);
            Prov p;
            p.kind = Prov::NorSym;
            p.src1 = id;
            add_fact(C, make_nor(b, a), ante, std::move(p));
        }
        if (rules.contains(Rule::ExistsSuccedent)) {
            auto it = ex_index.find(key_of(f));
            if (it != ex_index.end())
                for (const auto& [exf, x, t] : it->second) {
                    Prov p;
                    p.kind = Prov::ExIntro;
                    p.src1 = id;
                    p.f1 = exists_parts(exf).second;
                    p.x = x;
                    p.t = t;
                    add_fact(C, exf, ante, std::move(p));
                }
        }
    }

    // Rescan facts below `upto` against equations this context added after
    // they were processed (child hypotheses and newly added root members).
    void rescan_equations(Context& C) {
        if (C.equations_scanned == C.equations.size()) return;
        std::size_t first_new = C.equations_scanned;
        C.equations_scanned = C.equations.size();
        std::size_t upto = C.total();
        for (std::size_t id = 0; id < upto; ++id)
            for (std::size_t e = first_new; e < C.equations.size(); ++e)
                try_rewrites(C, id, C.equations[e].first, C.equations[e].second);
    }

    void drain(Context& C) {
        while (!queue.empty()) {
            std::size_t id = queue.front();
            queue.pop_front();
            process_fact(C, id);
        }
    }

    enum class OpenPolicy { HypothesisOnly, AllMembers };

    void saturate(Context& C, OpenPolicy policy) {
        if (C.saturating) return;
        bool pending = &C == root.get() && !pending_ex_hits.empty();
        if (C.saturated && !pending && C.members_seeded == C.local_members.size() &&
            C.equations_scanned == C.equations.size())
            return;
        C.saturating = true;
        if (C.parent) saturate(*C.parent, OpenPolicy::HypothesisOnly);
        std::deque<std::size_t> saved;
        std::swap(saved, queue);
        seed_members(C);
        seed_refl(C);
        rescan_equations(C);
        // Catch up on existential-introduction targets registered late.
        if (&C == root.get()) {
            for (std::size_t id : pending_ex_hits)
                if (id < C.total()) queue.push_back(id);
            pending_ex_hits.clear();
        }
        drain(C);
        if (!C.saturated) open_existentials(C, policy);
        C.saturated = true;
        C.saturating = false;
        std::swap(saved, queue);
    }

    // --- existential opening ------------------------------------------------

    void open_existentials(Context& C, OpenPolicy policy) {
        if (C.depth >= max_chain_depth || !rules.contains(Rule::ExistsAntecedent)) return;
        std::vector<Formula> to_open;
        if (policy == OpenPolicy::AllMembers) {
            for (const Context* c = &C; c; c = c->parent)
                for (const auto& m : c->local_members)
                    if (kind(m) == FormulaKind::Exists) to_open.push_back(m);
            std::sort(to_open.begin(), to_open.end());
            to_open.erase(std::unique(to_open.begin(), to_open.end()), to_open.end());
        } else {
            // Base-set existentials are opened only on consistency checks;
            // ordinary queries open just the hypotheses they spawned.
            if (!C.parent) return;
            for (const auto& m : C.local_members)
                if (kind(m) == FormulaKind::Exists) to_open.push_back(m);
        }
        if (to_open.size() > max_openings) to_open.resize(max_openings);

        for (const auto& e : to_open) open_one(C, e);
        drain(C);
    }

    void open_one(Context& C, const Formula& e) {
        auto [x, body] = exists_parts(e);
        // Candidate fresh variables: one safe against the whole context, and
        // the least variable merely absent from the existential itself (facts
        // mentioning it simply fail the lift conditions later).
        std::vector<std::string> candidates;
        {
            std::set<std::string> avoid;
            for (const Context* c = &C; c; c = c->parent)
                for (const auto& m : c->local_members) {
                    auto fv = free_vars(sig, m);
                    avoid.insert(fv.begin(), fv.end());
                }
            for (const auto& tok : e.tokens) avoid.insert(tok);
            for (int i = 1; i <= sig.variable_pool_size; ++i) {
                std::string cand = "x" + std::to_string(i);
                if (avoid.count(cand) == 0) {
                    candidates.push_back(cand);
                    break;
                }
            }
        }
        for (int i = 1; i <= sig.variable_pool_size; ++i) {
            std::string cand = "x" + std::to_string(i);
            if (std::find(e.tokens.begin(), e.tokens.end(), cand) == e.tokens.end()) {
                if (std::find(candidates.begin(), candidates.end(), cand) == candidates.end())
                    candidates.push_back(cand);
                break;
            }
        }

        std::set<std::string> tried_instances;
        for (const auto& x2 : candidates) {
            Formula inst;
            try {
                inst = substitute(sig, body, x, make_variable(x2));
            } catch (const VariableCapture&) {
                continue;
            }
            if (!tried_instances.insert(key_of(inst)).second) continue;
            Context& child = spawn(C, inst);
            saturate(child, OpenPolicy::HypothesisOnly);
            export_refutation(child, x2);
            lift_facts(C, child, e, x, x2, inst);
        }
    }

    // From a refuted child context every denial follows; synthesise the one
    // the parent can use (a denial of a reflexive equation free of x2).
    void export_refutation(Context& child, const std::string& x2) {
        if (!child.refutation) return;  // only refutations found in the child itself
        if (!rules.contains(Rule::ContradictionPos) || !rules.contains(Rule::Antecedent)) return;
        auto [i, j] = *child.refutation;
        const Fact& f1 = child.fact(i);
        const Fact& f2 = child.fact(j);
        std::optional<Term> t0;
        for (const auto& t : refl_terms)
            if (term_vars(t).count(x2) == 0) {
                t0 = t;
                break;
            }
        if (!t0 || !rules.contains(Rule::Reflexivity)) return;
        Formula g = make_eq(*t0, *t0);
        Prov p;
        p.kind = Prov::CtrPair;
        p.src1 = i;
        p.src2 = j;
        p.f1 = g;
        std::deque<std::size_t> saved;
        std::swap(saved, queue);  // bypass normal processing of this synthetic fact
        add_fact(child, make_not(g), ante_union(f1.ante, f2.ante), std::move(p));
        queue.clear();
        std::swap(saved, queue);
    }

    void lift_facts(Context& C, Context& child, const Formula& e, const std::string& x,
                    const std::string& x2, const Formula& inst) {
        auto fv_e = free_vars(sig, e);
        if (fv_e.count(x2)) return;
        for (std::size_t id = child.base; id < child.total(); ++id) {
            const Fact g = child.fact(id);  // copy; both containers may grow
            if (!ante_contains(g.ante, inst)) continue;
            if (free_vars(sig, g.formula).count(x2)) continue;
            bool gamma_ok = true;
            for (const auto& a : g.ante)
                if (!(a == inst) && free_vars(sig, a).count(x2)) gamma_ok = false;
            if (!gamma_ok) continue;
            Prov p;
            p.kind = Prov::Lift;
            p.src1 = id;
            p.child = &child;
            p.f1 = e;
            p.x = x;
            p.x2 = x2;
            Formula formula = g.formula;
            if (!C.parent) root_has_child_links = true;
            add_fact(C, std::move(formula), ante_with(ante_without(g.ante, inst), e),
                     std::move(p));
        }
    }

    Context& spawn(Context& C, const Formula& hypothesis) {
        auto it = C.children.find(key_of(hypothesis));
        if (it != C.children.end()) return *it->second;
        auto child = std::make_unique<Context>();
        child->parent = &C;
        child->depth = C.depth + 1;
        child->base = C.total();
        child->local_members.push_back(hypothesis);
        Context& ref = *child;
        C.children.emplace(key_of(hypothesis), std::move(child));
        return ref;
    }

    // --- proof assembly -----------------------------------------------------

    struct Assembly {
        const FormalStructure& sig;
        RuleSet rules;
        Proof proof;
        std::vector<Sequent> established;
        std::map<std::pair<const void*, std::size_t>, std::size_t> memo;

        std::size_t add(RuleApplication app) {
            Sequent conc = check_step(sig, established, app);
            established.push_back(conc);
            proof.steps.push_back(ProofStep{std::move(app), established.back()});
            return established.size() - 1;
        }

        void need(Rule r) const {
            if (!rules.contains(r)) throw AssembleFail{};
        }
    };

    std::size_t emit(Assembly& A, const Context& C, std::size_t id) {
        const Context* owner = C.owner_of(id);
        auto memo_key = std::make_pair(static_cast<const void*>(owner), id);
        auto hit = A.memo.find(memo_key);
        if (hit != A.memo.end()) return hit->second;
        const Fact& f = C.fact(id);
        std::size_t step = 0;
        switch (f.prov.kind) {
            case Prov::Member: {
                A.need(Rule::Assumption);
                RuleApplication app;
                app.rule = "ass";
                app.gamma = FormulaSet{f.formula};
                app.phi = f.formula;
                step = A.add(std::move(app));
                break;
            }
            case Prov::Refl: {
                A.need(Rule::Reflexivity);
                RuleApplication app;
                app.rule = "refl";
                app.t = f.prov.t;
                step = A.add(std::move(app));
                break;
            }
            case Prov::Rewrite: {
                A.need(Rule::Substitution);
                std::size_t src = emit(A, C, f.prov.src1);
                RuleApplication app;
                app.rule = "subst";
                app.phi = f.prov.f1;
                app.x = f.prov.x;
                app.t = f.prov.t;
                app.t2 = f.prov.t2;
                app.premises = {src};
                step = A.add(std::move(app));
                break;
            }
            case Prov::NorSym: {
                A.need(Rule::NorSymmetry);
                std::size_t src = emit(A, C, f.prov.src1);
                RuleApplication app;
                app.rule = "nor-sym";
                app.premises = {src};
                step = A.add(std::move(app));
                break;
            }
            case Prov::ExIntro: {
                A.need(Rule::ExistsSuccedent);
                std::size_t src = emit(A, C, f.prov.src1);
                RuleApplication app;
                app.rule = "ex-succ";
                app.phi = f.prov.f1;
                app.x = f.prov.x;
                app.t = f.prov.t;
                app.premises = {src};
                step = A.add(std::move(app));
                break;
            }
            case Prov::Lift: {
                A.need(Rule::ExistsAntecedent);
                const Context* child = static_cast<const Context*>(f.prov.child);
                std::size_t src = emit(A, *child, f.prov.src1);
                auto [x, body] = exists_parts(f.prov.f1);
                Formula inst = substitute(sig, body, x, make_variable(f.prov.x2));
                // Gamma comes from the source antecedent, not the lifted one:
                // the existential may itself occur there.
                const Fact& src_fact = child->fact(f.prov.src1);
                RuleApplication app;
                app.rule = "ex-ante";
                app.gamma = FormulaSet(src_fact.ante.begin(), src_fact.ante.end());
                app.gamma.erase(inst);
                app.phi = body;
                app.x = x;
                app.x2 = f.prov.x2;
                app.psi = f.formula;
                app.premises = {src};
                step = A.add(std::move(app));
                break;
            }
            case Prov::CtrPair: {
                A.need(Rule::ContradictionPos);
                A.need(Rule::Antecedent);
                std::size_t s1 = emit(A, C, f.prov.src1);
                std::size_t s2 = emit(A, C, f.prov.src2);
                FormulaSet gamma(f.ante.begin(), f.ante.end());
                const Formula& g = f.prov.f1;
                FormulaSet grown = gamma;
                grown.insert(g);
                std::size_t a1 = align(A, s1, grown);
                std::size_t a2 = align(A, s2, grown);
                RuleApplication app;
                app.rule = "ctr-pos";
                app.gamma = gamma;
                app.phi = g;
                app.premises = {a1, a2};
                step = A.add(std::move(app));
                break;
            }
        }
        A.memo.emplace(memo_key, step);
        return step;
    }

    // Grow a step's antecedent to `target`.  Assumptions are re-issued with
    // the larger antecedent directly; anything else needs the antecedent rule.
    std::size_t align(Assembly& A, std::size_t step, const FormulaSet& target) {
        if (A.established[step].antecedent == target) return step;
        const RuleApplication& src = A.proof.steps[step].app;
        if (src.rule == "ass" && src.phi && target.count(*src.phi)) {
            RuleApplication app;
            app.rule = "ass";
            app.gamma = target;
            app.phi = *src.phi;
            return A.add(std::move(app));
        }
        A.need(Rule::Antecedent);
        RuleApplication app;
        app.rule = "ant";
        app.gamma = target;
        app.premises = {step};
        return A.add(std::move(app));
    }

    Verdict finish(Assembly& A, const Formula& goal) {
        if (A.proof.steps.empty()) return {};
        CheckedProof checked = check_proof(sig, A.proof);
        if (!(checked.final.succedent == goal)) return {};
        for (const auto& g : checked.final.antecedent)
            if (member_set.count(g) == 0) return {};
        if (!checked.used.subset_of(rules)) return {};
        if (A.proof.steps.size() > budget.max_steps) return {};
        return Verdict{std::move(A.proof)};
    }

    // --- queries ------------------------------------------------------------

    Verdict query(const Formula& goal) {
        std::string goal_key = key_of(goal);
        if (goals_in_progress.count(goal_key)) return {};
        if (goals_in_progress.size() >= 2) return {};  // recursion guard
        goals_in_progress.insert(goal_key);
        Verdict v = query_inner(goal);
        goals_in_progress.erase(goal_key);
        return v;
    }

    Verdict query_inner(const Formula& goal) {
        register_existentials(goal);
        saturate(*root, OpenPolicy::HypothesisOnly);

        // Direct: the goal is already a fact.
        if (auto id = root->find(key_of(goal))) {
            try {
                Assembly A{sig, rules, {}, {}, {}};
                emit(A, *root, *id);
                Verdict v = finish(A, goal);
                if (v.proved()) return v;
            } catch (const AssembleFail&) {
            }
        }

        if (kind(goal) == FormulaKind::Nor) {
            auto [a, b] = nor_parts(sig, goal);
            if (a == b && rules.contains(Rule::ContradictionPos)) {
                Verdict v = via_contradiction(goal, a, /*positive=*/true);
                if (v.proved()) return v;
            }
            if (!(a == b) && rules.contains(Rule::NorIntroduction)) {
                Verdict v = via_nor_intro(goal, a, b);
                if (v.proved()) return v;
            }
        }
        if (rules.contains(Rule::ContradictionNeg)) {
            Verdict v = via_contradiction(goal, goal, /*positive=*/false);
            if (v.proved()) return v;
        }
        return {};
    }

    // ctr-pos: hypothesis a, conclusion ↓aa; ctr-neg: hypothesis ¬goal.
    Verdict via_contradiction(const Formula& goal, const Formula& a, bool positive) {
        Formula hyp = positive ? a : make_not(a);
        Context& C = spawn(*root, hyp);
        saturate(C, OpenPolicy::HypothesisOnly);
        auto pair = C.effective_refutation();
        if (!pair) return {};
        try {
            Assembly A{sig, rules, {}, {}, {}};
            const Fact& f1 = C.fact(pair->first);
            const Fact& f2 = C.fact(pair->second);
            FormulaSet gamma;
            for (const auto& g : ante_union(f1.ante, f2.ante))
                if (!(g == hyp)) gamma.insert(g);
            FormulaSet grown = gamma;
            grown.insert(hyp);
            std::size_t s1 = emit(A, C, pair->first);
            std::size_t s2 = emit(A, C, pair->second);
            std::size_t a1 = align(A, s1, grown);
            std::size_t a2 = align(A, s2, grown);
            RuleApplication app;
            app.rule = positive ? "ctr-pos" : "ctr-neg";
            app.gamma = gamma;
            app.phi = positive ? a : goal;
            app.premises = {a1, a2};
            A.add(std::move(app));
            return finish(A, goal);
        } catch (const AssembleFail&) {
            return {};
        }
    }

    Verdict via_nor_intro(const Formula& goal, const Formula& a, const Formula& b) {
        Verdict va = query(make_not(a));
        if (!va.proved()) return {};
        Verdict vb = query(make_not(b));
        if (!vb.proved()) return {};
        try {
            Assembly A{sig, rules, {}, {}, {}};
            // Replay both subproofs into one step space.
            std::size_t last_a = 0, last_b = 0;
            for (const auto& st : va.proof->steps) last_a = A.add(st.app);
            std::size_t offset = A.established.size();
            for (const auto& st : vb.proof->steps) {
                RuleApplication app = st.app;
                for (auto& p : app.premises) p += offset;
                last_b = A.add(std::move(app));
            }
            FormulaSet joint = A.established[last_a].antecedent;
            for (const auto& g : A.established[last_b].antecedent) joint.insert(g);
            std::size_t a1 = align(A, last_a, joint);
            std::size_t a2 = align(A, last_b, joint);
            RuleApplication app;
            app.rule = "nor-intro";
            app.premises = {a1, a2};
            A.add(std::move(app));
            return finish(A, goal);
        } catch (const AssembleFail&) {
            return {};
        }
    }

    // --- consistency --------------------------------------------------------

    ConsistencyVerdict check_consistency(const FormulaSet& probes) {
        saturate(*root, OpenPolicy::HypothesisOnly);
        if (!root->refutation) {
            // Contradictions may hide behind existential members.
            std::deque<std::size_t> saved;
            std::swap(saved, queue);
            root->saturating = true;
            open_existentials(*root, OpenPolicy::AllMembers);
            root->saturating = false;
            std::swap(saved, queue);
        }
        if (root->refutation) {
            auto v = refutation_to_proofs(*root->refutation);
            if (v) return ConsistencyVerdict{std::move(v)};
        }
        std::size_t budget_left = max_probe_queries;
        for (const auto& psi : probes) {
            if (budget_left == 0) break;
            --budget_left;
            Verdict v1 = query(psi);
            if (!v1.proved()) continue;
            Verdict v2 = query(make_not(psi));
            if (v2.proved())
                return ConsistencyVerdict{std::make_pair(std::move(*v1.proof),
                                                         std::move(*v2.proof))};
        }
        return {};
    }

    // Turn the root refutation pair (ψ, ↓ψχ) into proofs of ψ and of ↓ψψ.
    std::optional<std::pair<Proof, Proof>> refutation_to_proofs(
        std::pair<std::size_t, std::size_t> pair) {
        try {
            Assembly A1{sig, rules, {}, {}, {}};
            emit(A1, *root, pair.first);
            Verdict v1 = finish(A1, root->fact(pair.first).formula);
            if (!v1.proved()) return std::nullopt;

            const Fact& f2 = root->fact(pair.second);
            auto [psi, chi] = nor_parts(sig, f2.formula);
            Assembly A2{sig, rules, {}, {}, {}};
            std::size_t s2 = emit(A2, *root, pair.second);
            if (!(psi == chi)) {
                // Strengthen ↓ψχ to ↓ψψ through the positive contradiction
                // rule; needs ass/ant alongside it.
                A2.need(Rule::ContradictionPos);
                A2.need(Rule::Antecedent);
                A2.need(Rule::Assumption);
                FormulaSet gamma = A2.established[s2].antecedent;
                FormulaSet grown = gamma;
                grown.insert(psi);
                std::size_t d = align(A2, s2, grown);
                RuleApplication ass;
                ass.rule = "ass";
                ass.gamma = grown;
                ass.phi = psi;
                std::size_t s_psi = A2.add(std::move(ass));
                RuleApplication ctr;
                ctr.rule = "ctr-pos";
                ctr.gamma = gamma;
                ctr.phi = psi;
                ctr.premises = {s_psi, d};
                A2.add(std::move(ctr));
            }
            Verdict v2 = finish(A2, make_not(psi));
            if (!v2.proved()) return std::nullopt;
            return std::make_pair(std::move(*v1.proof), std::move(*v2.proof));
        } catch (const AssembleFail&) {
            return std::nullopt;
        }
    }

    void add_member(const Formula& f) {
        if (!member_set.insert(f).second) return;
        if (root_has_child_links) {
            // Root facts point into child contexts about to be discarded;
            // rebuild the root from scratch instead of growing it.
            root = std::make_unique<Context>();
            refl_seeded.clear();
            pending_ex_hits.clear();
            root_has_child_links = false;
            for (const auto& m : member_set)
                if (!(m == f)) root->local_members.push_back(m);
        } else {
            root->children.clear();
        }
        root->local_members.push_back(f);
        root->saturated = false;
        register_existentials(f);
    }
};

DerivationEngine::DerivationEngine(const FormalStructure& sig, RuleSet rules, SearchBudget budget)
    : impl_(std::make_unique<Impl>(sig, rules, std::move(budget))) {}
DerivationEngine::~DerivationEngine() = default;
DerivationEngine::DerivationEngine(DerivationEngine&&) noexcept = default;
DerivationEngine& DerivationEngine::operator=(DerivationEngine&&) noexcept = default;

void DerivationEngine::add_member(const Formula& f) { impl_->add_member(f); }
const FormulaSet& DerivationEngine::members() const { return impl_->member_set; }
Verdict DerivationEngine::query(const Formula& goal) { return impl_->query(goal); }
ConsistencyVerdict DerivationEngine::check_consistency(const FormulaSet& probes) {
    return impl_->check_consistency(probes);
}

Verdict derives(const FormalStructure& sig, const FormulaSet& phi, const Formula& goal,
                RuleSet rules, const SearchBudget& budget) {
    DerivationEngine engine(sig, rules, budget);
    for (const auto& f : phi) engine.add_member(f);
    return engine.query(goal);
}

FormulaSet expansion(const FormalStructure& sig, const FormulaSet& phi, RuleSet rules,
                     const SearchBudget& budget, const FormulaSet& universe) {
    DerivationEngine engine(sig, rules, budget);
    for (const auto& f : phi) engine.add_member(f);
    FormulaSet out;
    for (const auto& goal : universe)
        if (engine.query(goal).proved()) out.insert(goal);
    return out;
}

ConsistencyVerdict is_consistent(const FormalStructure& sig, const FormulaSet& phi,
                                 RuleSet rules, const SearchBudget& budget,
                                 const FormulaSet& probes) {
    DerivationEngine engine(sig, rules, budget);
    for (const auto& f : phi) engine.add_member(f);
    return engine.check_consistency(probes);
}

}  // namespace fol
