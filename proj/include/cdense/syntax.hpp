#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdense/rational.hpp"

namespace cdense {

class ParseError : public InputError {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : InputError(msg + " at position " + std::to_string(pos)), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

class SymbolError : public InputError {
 public:
  using InputError::InputError;
};

class ArityError : public InputError {
 public:
  using InputError::InputError;
};

// Sparse map r -> delta, meaning: max-coordinate distance < delta implies
// output difference <= r. Entries are kept sorted by r.
struct ModulusTable {
  std::vector<std::pair<Rational, Rational>> entries;

  void set(const Rational& r, const Rational& delta);
  /// Delta at the largest key <= r (0 when no such key).
  Rational delta_at(const Rational& r) const;
  /// Smallest key r with delta(r) > x, or 1 when none qualifies.
  Rational inverse(const Rational& x) const;
  bool monotone() const;
  bool operator==(const ModulusTable&) const = default;
};

struct SymbolDecl {
  std::string name;
  int arity = 0;
  ModulusTable modulus;
  bool operator==(const SymbolDecl&) const = default;
};

struct Signature {
  std::vector<SymbolDecl> functions;
  std::vector<SymbolDecl> relations;

  int function_index(std::string_view name) const;  // -1 if absent
  int relation_index(std::string_view name) const;
  const SymbolDecl* function(std::string_view name) const;
  const SymbolDecl* relation(std::string_view name) const;
  /// Throws InputError on duplicate names, reserved words or non-monotone moduli.
  void validate() const;
  bool operator==(const Signature&) const = default;
};

struct Term {
  enum class Kind { Var, App };
  Kind kind = Kind::Var;
  std::string name;
  std::vector<Term> args;

  static Term var(std::string n) { return Term{Kind::Var, std::move(n), {}}; }
  static Term app(std::string f, std::vector<Term> a) { return Term{Kind::App, std::move(f), std::move(a)}; }
  bool is_var() const { return kind == Kind::Var; }
  bool operator==(const Term&) const = default;
};

enum class FKind { Zero, One, Half, Monus, Sup, Inf, Dist, Rel };

// name: bound variable for Sup/Inf, relation name for Rel.
// terms: two for Dist, arity-many for Rel. kids: one for Half/Sup/Inf, two for Monus.
struct Formula {
  FKind kind = FKind::Zero;
  std::string name;
  std::vector<Term> terms;
  std::vector<Formula> kids;

  static Formula zero() { return Formula{FKind::Zero, {}, {}, {}}; }
  static Formula one() { return Formula{FKind::One, {}, {}, {}}; }
  static Formula half(Formula f) { return Formula{FKind::Half, {}, {}, {std::move(f)}}; }
  static Formula monus(Formula a, Formula b) { return Formula{FKind::Monus, {}, {}, {std::move(a), std::move(b)}}; }
  static Formula sup(std::string v, Formula f) { return Formula{FKind::Sup, std::move(v), {}, {std::move(f)}}; }
  static Formula inf(std::string v, Formula f) { return Formula{FKind::Inf, std::move(v), {}, {std::move(f)}}; }
  static Formula dist(Term a, Term b) { return Formula{FKind::Dist, {}, {std::move(a), std::move(b)}, {}}; }
  static Formula rel(std::string r, std::vector<Term> ts) { return Formula{FKind::Rel, std::move(r), std::move(ts), {}}; }

  bool is_quantifier() const { return kind == FKind::Sup || kind == FKind::Inf; }
  bool operator==(const Formula&) const = default;
};

/// Parses and alpha-normalizes. Throws ParseError, SymbolError or ArityError.
Formula parse_formula(std::string_view text, const Signature& sig);
/// Parses without renaming bound variables.
Formula parse_formula_raw(std::string_view text, const Signature& sig);
Term parse_term(std::string_view text, const Signature& sig);

std::string print_term(const Term& t);
std::string print_formula(const Formula& f);

/// Bound variables become v0, v1, ... in pre-order, skipping names free in f.
Formula alpha_normalize(const Formula& f);
/// Free variables in order of first occurrence in the printed form.
std::vector<std::string> free_vars(const Formula& f);
std::vector<std::string> term_vars(const Term& t);
/// Structural size (node count), used to order bottom-up evaluation.
int formula_size(const Formula& f);
/// Checks symbols and arities against sig; throws SymbolError/ArityError.
void check_well_formed(const Formula& f, const Signature& sig);

struct Fragment {
  std::vector<Formula> formulas;  // alpha-normalized, sorted by printed form
  int grid_L = 2;
  int omega_N = 2;

  int index_of(const Formula& f) const;  // -1 if absent
  int index_of_key(const std::string& printed) const;
  std::vector<Rational> grid() const;
};

Fragment fragment_close(const std::vector<Formula>& seed, const Signature& sig, int grid_L, int omega_N);

/// Atoms over all symbols (d, relations, d(F(..), x)), constants, and the
/// monus formulas used by relation continuity, closed under half/sup/inf
/// (and monus at level 1) up to `depth` levels.
Fragment depth_closure(const Signature& sig, int depth, int grid_L, int omega_N);

/// Modulus of a term: bound on d(t(a), t(b)) given max_i d(a_i, b_i) <= eps.
Rational term_modulus(const Term& t, const Signature& sig, const Rational& eps);
/// w^f(eps) for arbitrary eps, capped at 1.
Rational modulus_at(const Formula& f, const Signature& sig, const Rational& eps);
/// Table over grid inputs eps = i/L.
ModulusTable formula_modulus(const Formula& f, const Signature& sig, int grid_L);

}  // namespace cdense
