#include "fol/strings.hpp"

#include <algorithm>

namespace fol {

SymbolString concat(const std::vector<SymbolString>& parts) {
    if (parts.empty())
        throw EmptyTuple("concat: empty tuple has no concatenation");
    SymbolString out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

namespace {

bool is_prefix(const SymbolString& p, const SymbolString& w) {
    return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

SymbolString drop_prefix(const SymbolString& w, std::size_t n) {
    return SymbolString(w.begin() + static_cast<std::ptrdiff_t>(n), w.end());
}

}  // namespace

bool is_unambiguous_tuple(const std::set<SymbolString>& tuple_members,
                          const std::set<std::string>& alphabet) {
    // Only members writable over the alphabet can occur inside a string over
    // the alphabet; the rest cannot take part in any decomposition.
    std::vector<SymbolString> code;
    for (const auto& m : tuple_members) {
        bool in_alphabet = std::all_of(m.begin(), m.end(), [&](const std::string& tok) {
            return alphabet.count(tok) != 0;
        });
        if (!in_alphabet) continue;
        if (m.empty()) return false;  // the empty string pads any decomposition
        code.push_back(m);
    }
    if (code.size() <= 1) return true;

    // Sardinas–Patterson: the code is uniquely decodable iff no iterated
    // dangling-suffix set contains the empty string.
    std::set<SymbolString> suffixes;
    for (const auto& u : code)
        for (const auto& v : code) {
            if (u == v || !is_prefix(u, v)) continue;
            SymbolString rest = drop_prefix(v, u.size());
            if (rest.empty()) return false;  // duplicate member, impossible with a set
            suffixes.insert(rest);
        }
    std::set<SymbolString> seen = suffixes;
    while (!suffixes.empty()) {
        std::set<SymbolString> next;
        for (const auto& w : suffixes)
            for (const auto& u : code) {
                const SymbolString* shorter = nullptr;
                const SymbolString* longer = nullptr;
                if (is_prefix(u, w)) { shorter = &u; longer = &w; }
                else if (is_prefix(w, u)) { shorter = &w; longer = &u; }
                else continue;
                SymbolString rest = drop_prefix(*longer, shorter->size());
                if (rest.empty()) return false;
                if (seen.insert(rest).second) next.insert(rest);
            }
        suffixes = std::move(next);
    }
    return true;
}

SymbolString substitute_symbols(const SymbolString& s,
                                const std::map<std::string, SymbolString>& replacement) {
    SymbolString out;
    for (const auto& tok : s) {
        auto it = replacement.find(tok);
        if (it == replacement.end()) out.push_back(tok);
        else out.insert(out.end(), it->second.begin(), it->second.end());
    }
    return out;
}

}  // namespace fol
