#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fol/errors.hpp"

namespace fol {

// A symbol string is a finite, non-empty sequence of tokens.  Terms and
// formulas are symbol strings with extra structure; the operations here are
// the structure-free substrate they share.
using SymbolString = std::vector<std::string>;

// Concatenates left-to-right.  Throws EmptyTuple on an empty argument list;
// the empty string is not a symbol string.
SymbolString concat(const std::vector<SymbolString>& parts);

// True when every string over `alphabet` decomposes in at most one way into a
// tuple of members of `tuple_members`.  Used to justify reading polish
// notation back uniquely; checked by bounded search over concatenations up to
// the longest member pair.  Both sets empty is vacuously unambiguous.
bool is_unambiguous_tuple(const std::set<SymbolString>& tuple_members,
                          const std::set<std::string>& alphabet);

// Token-wise substitution: every token equal to a key of `replacement` is
// replaced by the image string, other tokens are kept.  This is the
// homomorphic extension of the token map.
SymbolString substitute_symbols(const SymbolString& s,
                                const std::map<std::string, SymbolString>& replacement);

}  // namespace fol
