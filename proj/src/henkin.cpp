#include "fol/henkin.hpp"

#include <algorithm>

#include "fol/errors.hpp"

namespace fol {

namespace {

std::vector<Formula> existential_members(const FormulaSet& phi) {
    std::vector<Formula> out;
    for (const auto& f : phi)
        if (kind(f) == FormulaKind::Exists) out.push_back(f);
    return out;
}

// Every term occurring in the members (at any depth) plus the pool variables.
TermSet occurring_terms(const FormalStructure& sig, const FormulaSet& phi) {
    TermSet out;
    for (const auto& v : sig.pool_variables()) out.insert(make_variable(v));
    std::vector<std::variant<Term, Formula>> work;
    for (const auto& f : phi) work.emplace_back(f);
    while (!work.empty()) {
        auto item = std::move(work.back());
        work.pop_back();
        if (std::holds_alternative<Term>(item)) {
            Term t = std::get<Term>(item);
            if (t.tokens.size() > 1)
                for (auto& sub : children(sig, t)) work.push_back(sub);
            out.insert(std::move(t));
        } else {
            for (auto& sub : children(sig, std::get<Formula>(item))) work.push_back(sub);
        }
    }
    return out;
}

}  // namespace

WitnessReport adjoin_witnesses(const FormalStructure& sig, const FormulaSet& seed,
                               RuleSet rules, const SearchBudget& budget) {
    WitnessReport report;
    report.result = seed;
    for (const Formula& e : existential_members(seed)) {
        auto [x, body] = exists_parts(e);
        auto fv = free_vars(sig, report.result);
        std::string var;
        for (int i = 1; i <= sig.variable_pool_size; ++i) {
            std::string cand = sig.variable(i);
            if (fv.count(cand) == 0) {
                var = cand;
                break;
            }
        }
        if (var.empty())
            throw PoolExhausted("no pool variable left to witness " + to_string(e));
        Formula inst = substitute(sig, body, x, make_variable(var));
        FormulaSet candidate = report.result;
        candidate.insert(inst);
        WitnessStep step;
        step.existential = e;
        step.variable = var;
        step.instance = inst;
        ConsistencyVerdict guard = is_consistent(sig, candidate, rules, budget, {});
        if (guard.inconsistent()) {
            step.note = "skipped: the consistency guard refuted the instance";
        } else {
            report.result = std::move(candidate);
            step.adjoined = true;
            step.note = "witnessed at " + var;
        }
        report.steps.push_back(std::move(step));
    }
    return report;
}

namespace {

MaximizationResult maximize(const FormalStructure& sig, const FormulaSet& start,
                            const std::vector<Formula>& universe, RuleSet rules,
                            const SearchBudget& budget, bool negatively) {
    DerivationEngine engine(sig, rules, budget);
    for (const auto& f : start) engine.add_member(f);
    MaximizationResult res;
    for (const auto& phi : universe) {
        Formula neg = make_not(phi);
        TraceStep step;
        step.formula = phi;
        if (engine.query(neg).proved()) {
            engine.add_member(neg);
            step.note = "denial already derivable";
        } else if (!negatively) {
            engine.add_member(phi);
            step.added = true;
            step.note = "adjoined";
        } else {
            engine.add_member(make_not(neg));
            step.added = true;
            step.note = "adjoined the double denial";
        }
        res.trace.steps.push_back(std::move(step));
    }
    res.result = engine.members();
    return res;
}

}  // namespace

MaximizationResult maximize_plus(const FormalStructure& sig, const FormulaSet& start,
                                 const std::vector<Formula>& universe, RuleSet rules,
                                 const SearchBudget& budget) {
    return maximize(sig, start, universe, rules, budget, false);
}

MaximizationResult maximize_minus(const FormalStructure& sig, const FormulaSet& start,
                                  const std::vector<Formula>& universe, RuleSet rules,
                                  const SearchBudget& budget) {
    return maximize(sig, start, universe, rules, budget, true);
}

bool is_witness_furnished(const FormalStructure& sig, const FormulaSet& phi) {
    TermSet candidates = occurring_terms(sig, phi);
    for (const auto& e : existential_members(phi)) {
        auto [x, body] = exists_parts(e);
        bool found = false;
        for (const auto& t : candidates) {
            Formula inst;
            try {
                inst = substitute(sig, body, x, t);
            } catch (const VariableCapture&) {
                continue;
            }
            if (phi.count(inst)) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

TermEquivalence term_equivalence(const FormalStructure& sig, const FormulaSet& phi,
                                 RuleSet rules, const SearchBudget& budget,
                                 const TermSet& carrier) {
    SearchBudget b = budget;
    for (const auto& t : carrier) b.candidate_terms.insert(t);
    DerivationEngine engine(sig, rules, b);
    for (const auto& f : phi) engine.add_member(f);

    std::vector<Term> terms(carrier.begin(), carrier.end());
    const std::size_t n = terms.size();
    std::vector<std::vector<bool>> proved(n, std::vector<bool>(n, false));
    TermEquivalence out;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Verdict v = engine.query(make_eq(terms[i], terms[j]));
            if (!v.proved()) continue;
            proved[i][j] = true;
            if (i != j)
                out.edges.push_back(EqualityEdge{terms[i], terms[j], std::move(*v.proof)});
        }

    for (std::size_t i = 0; i < n; ++i)
        if (!proved[i][i])
            throw NotEquivalence("equality is not provably reflexive at " +
                                 to_string(terms[i]));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (proved[i][j] && !proved[j][i])
                throw NotEquivalence("provable equality is not symmetric between " +
                                     to_string(terms[i]) + " and " + to_string(terms[j]));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (!proved[i][j]) continue;
            for (std::size_t k = 0; k < n; ++k)
                if (proved[j][k] && !proved[i][k])
                    throw NotEquivalence("provable equality is not transitive through " +
                                         to_string(terms[j]));
        }

    std::vector<std::size_t> classes(n, n);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (classes[i] == n) classes[i] = next++;
        for (std::size_t j = i + 1; j < n; ++j)
            if (proved[i][j] && classes[j] == n) classes[j] = classes[i];
    }
    out.relation.carrier = std::move(terms);
    out.relation.classes = std::move(classes);
    return out;
}

HenkinModel henkin_model(const FormalStructure& sig, const FormulaSet& phi, RuleSet rules,
                         const SearchBudget& budget, const TermSet& carrier,
                         const FormulaSet& universe, bool check_expanded) {
    if (check_expanded) {
        FormulaSet derivable = expansion(sig, phi, rules, budget, universe);
        for (const auto& f : derivable)
            if (phi.count(f) == 0)
                throw NotExpanded("derivable but not a member: " + to_string(f));
    }
    Interpretation free_model = free_interpretation(sig, carrier);
    Interpretation extended = extend_with_relations(free_model, phi);
    TermEquivalence eq = term_equivalence(sig, phi, rules, budget, carrier);
    if (!check_preserved(extended, eq.relation))
        throw NotPreserved("symbol tables do not respect provable equality");
    HenkinModel model;
    model.interpretation = quotient(extended, eq.relation);
    model.source = std::move(extended);
    model.equivalence = std::move(eq);
    return model;
}

PipelineResult satisfiability_pipeline(const FormalStructure& sig, const FormulaSet& seed,
                                       const PipelineParams& params) {
    TermSet carrier = generate_terms(sig, params.carrier_term_depth);
    FormulaSet universe_set =
        generate_formulas(sig, params.universe_formula_depth, params.universe_term_depth);
    std::vector<Formula> universe(universe_set.begin(), universe_set.end());
    if (universe.size() > params.universe_cap) {
        universe.resize(params.universe_cap);
        universe_set = FormulaSet(universe.begin(), universe.end());
    }

    SearchBudget budget = params.budget;
    budget.candidate_terms.insert(carrier.begin(), carrier.end());
    budget.candidate_formulas.insert(universe.begin(), universe.end());

    PipelineResult res;
    res.seed = seed;
    res.universe = universe;
    res.witnesses = adjoin_witnesses(sig, seed, params.rules, budget);
    res.maximal = params.maximize_negatively
                      ? maximize_minus(sig, res.witnesses.result, universe, params.rules, budget)
                      : maximize_plus(sig, res.witnesses.result, universe, params.rules, budget);
    const FormulaSet& maximal = res.maximal.result;

    if (!is_minimal_covering(maximal, universe_set))
        throw PipelineCheckFailed(
            "maximized set fails to cover the universe consistently");
    if (!is_witness_furnished(sig, maximal))
        throw PipelineCheckFailed("an existential member is left without a witness");
    FormulaSet derivable = expansion(sig, maximal, params.rules, budget, universe_set);
    for (const auto& f : derivable)
        if (maximal.count(f) == 0)
            throw PipelineCheckFailed("maximized set is not expansion-closed at " +
                                      to_string(f));

    res.model = henkin_model(sig, maximal, params.rules, budget, carrier, universe_set,
                             /*check_expanded=*/false);
    if (!satisfies(res.model.interpretation, seed))
        throw SeedNotSatisfied("the quotient model fails a seed member");
    res.seed_satisfied = true;
    return res;
}

CastResult cast_free_vars_to_constants(const FormalStructure& sig, const FormulaSet& phi) {
    CastResult out;
    std::map<std::string, int> symbols = sig.symbols;
    std::map<std::string, std::string> var_to_const;
    for (const auto& v : free_vars(sig, phi)) {
        std::string name = "c" + std::to_string(FormalStructure::variable_index(v));
        int attempts = 0;
        while (symbols.count(name)) {
            name = "c" + name;
            if (++attempts >= 10)
                throw NameClash("cannot find a constant name for " + v);
        }
        symbols.emplace(name, 0);
        var_to_const.emplace(v, name);
        out.back_map.emplace(name, v);
    }
    out.signature = FormalStructure::make(symbols, sig.variable_pool_size);
    for (const auto& f : phi) {
        Formula cast = f;
        for (const auto& [v, c] : var_to_const)
            cast = substitute(out.signature, cast, v, parse_term(out.signature, c));
        out.formulas.insert(std::move(cast));
    }
    return out;
}

Interpretation pull_back_cast(const FormalStructure& original, const Interpretation& model,
                              const std::map<std::string, std::string>& back_map) {
    Interpretation out = model;
    out.structure = original;
    for (const auto& [constant, variable] : back_map) {
        auto it = model.constants.find(constant);
        if (it == model.constants.end())
            throw OutOfRange("cast constant " + constant + " has no interpretation");
        out.assignment[variable] = it->second;
        out.constants.erase(constant);
    }
    return out;
}

}  // namespace fol
