#pragma once

#include <map>
#include <string>
#include <vector>

#include "fol/errors.hpp"

namespace fol {

// Reserved tokens of the logical core.  Everything else a structure declares
// is an extralogical symbol with a signed arity: n >= 0 for an n-ary function
// (0 = constant), -n for an n-ary relation.
inline const std::string tok_nor = "nor";  // joint denial, binds two formulas
inline const std::string tok_eq = "eq";    // equality, binds two terms
inline const std::string tok_ex = "ex";    // existential, binds a variable and a formula

// A formal structure: the extralogical symbols with their signed arities plus
// the size K of the variable pool x1..xK.  Symbol names, variable names and
// the reserved tokens must be pairwise distinct; `make` enforces that.
struct FormalStructure {
    std::map<std::string, int> symbols;
    int variable_pool_size = 0;

    // Validates and returns a structure.  Rejects reserved names, names
    // matching the variable pattern x<digits>, empty names, names containing
    // whitespace or '_' (element names in model files are token-joined with
    // '_'), and a negative pool size.
    static FormalStructure make(std::map<std::string, int> symbols, int pool_size);

    bool has_symbol(const std::string& name) const { return symbols.count(name) != 0; }
    int arity(const std::string& name) const;  // throws UnknownToken

    // Variable tokens are "x1".."xK".  index("x3") == 3; 0 for non-variables.
    static bool is_variable_token(const std::string& tok);
    static int variable_index(const std::string& tok);
    bool in_pool(const std::string& tok) const;
    std::string variable(int index) const;  // throws OutOfRange unless 1 <= index <= K
    std::vector<std::string> pool_variables() const;
};

}  // namespace fol
