#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fol/calculus.hpp"
#include "fol/errors.hpp"
#include "fol/semantics.hpp"

namespace fol {

// Signature files: `symbol <name> <signed-arity>` lines (negative arity marks
// a relation) plus at most one `pool <count>` line.  '#' starts a comment
// anywhere; blank lines are ignored.  The same comment and blank-line rules
// apply to every other format here.
FormalStructure load_signature(std::istream& in);
void save_signature(std::ostream& out, const FormalStructure& sig);

// Formula files: one formula per line, whitespace-separated polish notation.
// Parse problems are reported as FormatError with the line number.
std::vector<Formula> load_formulas(std::istream& in, const FormalStructure& sig);
void save_formulas(std::ostream& out, const FormulaSet& phi);

// Model files: a `universe <name>...` line first, then
//   const <symbol> <element>
//   fun <symbol> <arg>... <element>
//   rel <symbol> <arg>... <T|F>
//   var <variable> <element>
// Tables must be total and every pool variable assigned.
Interpretation load_model(std::istream& in, const FormalStructure& sig);
void save_model(std::ostream& out, const Interpretation& m);

// Proof scripts: one line per step,
//   step <n>: <rule> premises=<i,...> params=<k=v;...> ante=<f|...> succ=<f>
// declaring the sequent the kernel must confirm.  Most parameters are
// recovered from the declared sequent; subst (phi, x, t, t2), ex-succ (t),
// ex-ante (phi, x, x2) and derived-rule routes stay explicit.
Proof load_proof(std::istream& in, const FormalStructure& sig);
void save_proof(std::ostream& out, const Proof& proof);

// One-line verdicts for checked proofs, as printed by the command-line tool.
std::string report_ok(const CheckedProof& checked);
std::string report_fail(const Error& e);

}  // namespace fol
