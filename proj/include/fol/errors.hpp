#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fol {

// Every failure the library reports deliberately is one of the types below, so
// callers can catch by category instead of matching message text.  The base
// class carries an optional step index: proof checking rethrows the failing
// step's error after stamping the index, so the CLI can print "FAIL step=N ...".
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    static constexpr std::size_t no_step = static_cast<std::size_t>(-1);
    std::size_t step_index = no_step;
};

// --- symbol strings -------------------------------------------------------
struct EmptyTuple : Error { using Error::Error; };

// --- parsing --------------------------------------------------------------
struct UnknownToken : Error { using Error::Error; };
struct ArityUnderflow : Error { using Error::Error; };
struct TrailingTokens : Error { using Error::Error; };
struct NotAFormula : Error { using Error::Error; };
struct MalformedQuantifier : Error { using Error::Error; };

// --- substitution ---------------------------------------------------------
struct VariableCapture : Error { using Error::Error; };

// --- semantics ------------------------------------------------------------
struct DepthExceeded : Error { using Error::Error; };
struct NotPreserved : Error { using Error::Error; };

// --- proof checking -------------------------------------------------------
struct SideConditionViolated : Error { using Error::Error; };
struct PremiseMismatch : Error { using Error::Error; };
struct SubstitutionFailure : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct UnsupportedDerivedRule : Error { using Error::Error; };
struct NoFreshVariable : Error { using Error::Error; };

// --- model construction ---------------------------------------------------
struct PoolExhausted : Error { using Error::Error; };
struct NotEquivalence : Error { using Error::Error; };
struct NotExpanded : Error { using Error::Error; };
struct SeedNotSatisfied : Error { using Error::Error; };
struct NameClash : Error { using Error::Error; };
struct PipelineCheckFailed : Error { using Error::Error; };

// --- file formats ---------------------------------------------------------
struct FormatError : Error { using Error::Error; };

}  // namespace fol
