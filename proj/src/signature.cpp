#include "fol/signature.hpp"

#include <cctype>

namespace fol {

FormalStructure FormalStructure::make(std::map<std::string, int> symbols, int pool_size) {
    if (pool_size < 0)
        throw OutOfRange("variable pool size must be >= 0, got " + std::to_string(pool_size));
    for (const auto& [name, arity] : symbols) {
        (void)arity;
        if (name.empty())
            throw UnknownToken("empty symbol name");
        if (name == tok_nor || name == tok_eq || name == tok_ex)
            throw UnknownToken("symbol name collides with reserved token: " + name);
        if (is_variable_token(name))
            throw UnknownToken("symbol name collides with variable pattern: " + name);
        for (char c : name)
            if (std::isspace(static_cast<unsigned char>(c)) || c == '_')
                throw UnknownToken("symbol name contains forbidden character: " + name);
    }
    FormalStructure s;
    s.symbols = std::move(symbols);
    s.variable_pool_size = pool_size;
    return s;
}

int FormalStructure::arity(const std::string& name) const {
    auto it = symbols.find(name);
    if (it == symbols.end()) throw UnknownToken("unknown symbol: " + name);
    return it->second;
}

bool FormalStructure::is_variable_token(const std::string& tok) {
    return variable_index(tok) > 0;
}

int FormalStructure::variable_index(const std::string& tok) {
    if (tok.size() < 2 || tok[0] != 'x') return 0;
    if (tok[1] == '0') return 0;  // no leading zeros: x01 is not a variable
    int value = 0;
    for (std::size_t i = 1; i < tok.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return 0;
        if (value > 100000) return 0;  // pools are small; cap avoids overflow
        value = value * 10 + (tok[i] - '0');
    }
    return value;
}

bool FormalStructure::in_pool(const std::string& tok) const {
    int i = variable_index(tok);
    return i >= 1 && i <= variable_pool_size;
}

std::string FormalStructure::variable(int index) const {
    if (index < 1 || index > variable_pool_size)
        throw OutOfRange("variable index " + std::to_string(index) + " outside pool 1.." +
                         std::to_string(variable_pool_size));
    return "x" + std::to_string(index);
}

std::vector<std::string> FormalStructure::pool_variables() const {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(variable_pool_size));
    for (int i = 1; i <= variable_pool_size; ++i) out.push_back("x" + std::to_string(i));
    return out;
}

}  // namespace fol
