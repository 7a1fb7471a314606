#include "cdense/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace cdense {

namespace {

const std::set<std::string, std::less<>> kReserved = {"sup", "inf", "half", "monus", "d"};

}  // namespace

// ---------------------------------------------------------------- moduli

void ModulusTable::set(const Rational& r, const Rational& delta) {
  auto it = std::lower_bound(entries.begin(), entries.end(), r,
                             [](const auto& e, const Rational& k) { return e.first < k; });
  if (it != entries.end() && it->first == r)
    it->second = delta;
  else
    entries.insert(it, {r, delta});
}

Rational ModulusTable::delta_at(const Rational& r) const {
  Rational out(0);
  for (const auto& [k, d] : entries) {
    if (k > r) break;
    out = d;
  }
  return out;
}

Rational ModulusTable::inverse(const Rational& x) const {
  for (const auto& [k, d] : entries)
    if (d > x) return k;
  return Rational(1);
}

bool ModulusTable::monotone() const {
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].second < entries[i - 1].second) return false;
  return true;
}

int Signature::function_index(std::string_view name) const {
  for (std::size_t i = 0; i < functions.size(); ++i)
    if (functions[i].name == name) return static_cast<int>(i);
  return -1;
}

int Signature::relation_index(std::string_view name) const {
  for (std::size_t i = 0; i < relations.size(); ++i)
    if (relations[i].name == name) return static_cast<int>(i);
  return -1;
}

const SymbolDecl* Signature::function(std::string_view name) const {
  int i = function_index(name);
  return i < 0 ? nullptr : &functions[i];
}

const SymbolDecl* Signature::relation(std::string_view name) const {
  int i = relation_index(name);
  return i < 0 ? nullptr : &relations[i];
}

static bool valid_identifier(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

void Signature::validate() const {
  std::set<std::string> seen;
  auto check = [&](const SymbolDecl& s) {
    if (!valid_identifier(s.name)) throw InputError("invalid symbol name \"" + s.name + "\"");
    if (kReserved.count(s.name)) throw InputError("symbol name \"" + s.name + "\" is reserved");
    if (!seen.insert(s.name).second) throw InputError("duplicate symbol name \"" + s.name + "\"");
    if (s.arity < 0) throw InputError("negative arity for " + s.name);
    if (!s.modulus.monotone()) throw InputError("modulus of " + s.name + " is not monotone");
    for (const auto& [r, d] : s.modulus.entries)
      if (r < Rational(0) || r > Rational(1) || d < Rational(0) || d > Rational(1))
        throw InputError("modulus entry of " + s.name + " outside [0,1]");
  };
  for (const auto& f : functions) check(f);
  for (const auto& r : relations) check(r);
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, const Signature& sig) : s_(text), sig_(sig) {}

  Formula formula_only() {
    Formula f = formula();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return f;
  }

  Term term_only() {
    Term t = term();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ >= s_.size() || !std::isalpha(static_cast<unsigned char>(s_[pos_]))) fail("expected identifier");
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  std::vector<Term> term_list() {
    std::vector<Term> out;
    expect('(');
    if (peek(')')) {
      ++pos_;
      return out;
    }
    out.push_back(term());
    while (peek(',')) {
      ++pos_;
      out.push_back(term());
    }
    expect(')');
    return out;
  }

  Term term() {
    skip_ws();
    std::size_t at = pos_;
    std::string name = ident();
    if (kReserved.count(name)) {
      pos_ = at;
      fail("reserved word \"" + name + "\" used as a term");
    }
    if (const SymbolDecl* f = sig_.function(name)) {
      std::vector<Term> args;
      if (peek('(')) args = term_list();
      if (static_cast<int>(args.size()) != f->arity)
        throw ArityError("function " + name + " expects " + std::to_string(f->arity) + " arguments, got " +
                         std::to_string(args.size()));
      return Term::app(name, std::move(args));
    }
    if (peek('(')) throw SymbolError("unknown function symbol \"" + name + "\"");
    if (sig_.relation(name)) throw SymbolError("relation symbol \"" + name + "\" used as a term");
    return Term::var(name);
  }

  Formula formula() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '0' || c == '1') {
      ++pos_;
      if (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) fail("unexpected character");
      return c == '0' ? Formula::zero() : Formula::one();
    }
    std::size_t at = pos_;
    std::string name = ident();
    if (name == "half") {
      expect('(');
      Formula f = formula();
      expect(')');
      return Formula::half(std::move(f));
    }
    if (name == "monus") {
      expect('(');
      Formula a = formula();
      expect(',');
      Formula b = formula();
      expect(')');
      return Formula::monus(std::move(a), std::move(b));
    }
    if (name == "sup" || name == "inf") {
      std::string v = ident();
      if (kReserved.count(v) || sig_.function(v) || sig_.relation(v)) fail("bad bound variable \"" + v + "\"");
      expect('.');
      Formula body = formula();
      return name == "sup" ? Formula::sup(v, std::move(body)) : Formula::inf(v, std::move(body));
    }
    if (name == "d") {
      expect('(');
      Term a = term();
      expect(',');
      Term b = term();
      expect(')');
      return Formula::dist(std::move(a), std::move(b));
    }
    const SymbolDecl* r = sig_.relation(name);
    if (!r) {
      pos_ = at;
      throw SymbolError("unknown relation symbol \"" + name + "\" at position " + std::to_string(at));
    }
    std::vector<Term> args;
    if (peek('(')) args = term_list();
    if (static_cast<int>(args.size()) != r->arity)
      throw ArityError("relation " + name + " expects " + std::to_string(r->arity) + " arguments, got " +
                       std::to_string(args.size()));
    return Formula::rel(name, std::move(args));
  }

  std::string_view s_;
  const Signature& sig_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula_raw(std::string_view text, const Signature& sig) {
  return Parser(text, sig).formula_only();
}

Formula parse_formula(std::string_view text, const Signature& sig) {
  return alpha_normalize(parse_formula_raw(text, sig));
}

Term parse_term(std::string_view text, const Signature& sig) { return Parser(text, sig).term_only(); }

// ---------------------------------------------------------------- printer

static void print_term_to(const Term& t, std::string& out) {
  out += t.name;
  if (t.kind == Term::Kind::App && !t.args.empty()) {
    out += '(';
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      if (i) out += ", ";
      print_term_to(t.args[i], out);
    }
    out += ')';
  }
}

static void print_to(const Formula& f, std::string& out) {
  switch (f.kind) {
    case FKind::Zero: out += '0'; return;
    case FKind::One: out += '1'; return;
    case FKind::Half:
      out += "half(";
      print_to(f.kids[0], out);
      out += ')';
      return;
    case FKind::Monus:
      out += "monus(";
      print_to(f.kids[0], out);
      out += ", ";
      print_to(f.kids[1], out);
      out += ')';
      return;
    case FKind::Sup:
    case FKind::Inf:
      out += f.kind == FKind::Sup ? "sup " : "inf ";
      out += f.name;
      out += ". ";
      print_to(f.kids[0], out);
      return;
    case FKind::Dist:
      out += "d(";
      print_term_to(f.terms[0], out);
      out += ", ";
      print_term_to(f.terms[1], out);
      out += ')';
      return;
    case FKind::Rel:
      out += f.name;
      out += '(';
      for (std::size_t i = 0; i < f.terms.size(); ++i) {
        if (i) out += ", ";
        print_term_to(f.terms[i], out);
      }
      out += ')';
      return;
  }
}

std::string print_term(const Term& t) {
  std::string s;
  print_term_to(t, s);
  return s;
}

std::string print_formula(const Formula& f) {
  std::string s;
  print_to(f, s);
  return s;
}

// ---------------------------------------------------------------- variables

static void term_vars_to(const Term& t, std::vector<std::string>& out) {
  if (t.is_var()) {
    if (std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
    return;
  }
  for (const auto& a : t.args) term_vars_to(a, out);
}

std::vector<std::string> term_vars(const Term& t) {
  std::vector<std::string> out;
  term_vars_to(t, out);
  return out;
}

static void free_vars_to(const Formula& f, std::vector<std::string>& bound, std::vector<std::string>& out) {
  auto add = [&](const std::string& v) {
    if (std::find(bound.begin(), bound.end(), v) != bound.end()) return;
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  switch (f.kind) {
    case FKind::Zero:
    case FKind::One: return;
    case FKind::Half: free_vars_to(f.kids[0], bound, out); return;
    case FKind::Monus:
      free_vars_to(f.kids[0], bound, out);
      free_vars_to(f.kids[1], bound, out);
      return;
    case FKind::Sup:
    case FKind::Inf:
      bound.push_back(f.name);
      free_vars_to(f.kids[0], bound, out);
      bound.pop_back();
      return;
    case FKind::Dist:
    case FKind::Rel:
      for (const auto& t : f.terms)
        for (const auto& v : term_vars(t)) add(v);
      return;
  }
}

std::vector<std::string> free_vars(const Formula& f) {
  std::vector<std::string> bound, out;
  free_vars_to(f, bound, out);
  return out;
}

int formula_size(const Formula& f) {
  int n = 1;
  for (const auto& k : f.kids) n += formula_size(k);
  return n;
}

namespace {

Term rename_term(const Term& t, const std::vector<std::pair<std::string, std::string>>& env) {
  if (t.is_var()) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == t.name) return Term::var(it->second);
    return t;
  }
  Term out = t;
  for (auto& a : out.args) a = rename_term(a, env);
  return out;
}

struct Renamer {
  const std::unordered_set<std::string>& avoid;
  int counter = 0;
  std::vector<std::pair<std::string, std::string>> env;

  std::string fresh() {
    for (;; ++counter) {
      std::string v = "v" + std::to_string(counter);
      if (!avoid.count(v)) {
        ++counter;
        return v;
      }
    }
  }

  Formula go(const Formula& f) {
    switch (f.kind) {
      case FKind::Zero:
      case FKind::One: return f;
      case FKind::Half: return Formula::half(go(f.kids[0]));
      case FKind::Monus: {
        Formula a = go(f.kids[0]);
        Formula b = go(f.kids[1]);
        return Formula::monus(std::move(a), std::move(b));
      }
      case FKind::Sup:
      case FKind::Inf: {
        std::string nv = fresh();
        env.emplace_back(f.name, nv);
        Formula body = go(f.kids[0]);
        env.pop_back();
        return f.kind == FKind::Sup ? Formula::sup(nv, std::move(body)) : Formula::inf(nv, std::move(body));
      }
      case FKind::Dist:
      case FKind::Rel: {
        Formula out = f;
        for (auto& t : out.terms) t = rename_term(t, env);
        return out;
      }
    }
    return f;
  }
};

}  // namespace

Formula alpha_normalize(const Formula& f) {
  auto fv = free_vars(f);
  std::unordered_set<std::string> avoid(fv.begin(), fv.end());
  Renamer r{avoid, 0, {}};
  return r.go(f);
}

static void check_term(const Term& t, const Signature& sig) {
  if (t.is_var()) {
    if (sig.function(t.name)) throw SymbolError("function symbol \"" + t.name + "\" used as a variable");
    return;
  }
  const SymbolDecl* f = sig.function(t.name);
  if (!f) throw SymbolError("unknown function symbol \"" + t.name + "\"");
  if (static_cast<int>(t.args.size()) != f->arity) throw ArityError("arity mismatch for " + t.name);
  for (const auto& a : t.args) check_term(a, sig);
}

void check_well_formed(const Formula& f, const Signature& sig) {
  switch (f.kind) {
    case FKind::Zero:
    case FKind::One: return;
    case FKind::Half:
    case FKind::Sup:
    case FKind::Inf:
      if (f.kids.size() != 1) throw InputError("malformed formula node");
      check_well_formed(f.kids[0], sig);
      return;
    case FKind::Monus:
      if (f.kids.size() != 2) throw InputError("malformed formula node");
      check_well_formed(f.kids[0], sig);
      check_well_formed(f.kids[1], sig);
      return;
    case FKind::Dist:
      if (f.terms.size() != 2) throw ArityError("d expects 2 arguments");
      for (const auto& t : f.terms) check_term(t, sig);
      return;
    case FKind::Rel: {
      const SymbolDecl* r = sig.relation(f.name);
      if (!r) throw SymbolError("unknown relation symbol \"" + f.name + "\"");
      if (static_cast<int>(f.terms.size()) != r->arity) throw ArityError("arity mismatch for " + f.name);
      for (const auto& t : f.terms) check_term(t, sig);
      return;
    }
  }
}

// ---------------------------------------------------------------- fragments

int Fragment::index_of_key(const std::string& printed) const {
  auto it = std::lower_bound(formulas.begin(), formulas.end(), printed,
                             [](const Formula& f, const std::string& k) { return print_formula(f) < k; });
  if (it != formulas.end() && print_formula(*it) == printed) return static_cast<int>(it - formulas.begin());
  return -1;
}

int Fragment::index_of(const Formula& f) const { return index_of_key(print_formula(alpha_normalize(f))); }

std::vector<Rational> Fragment::grid() const {
  std::vector<Rational> g;
  for (int i = 0; i <= grid_L; ++i) g.emplace_back(i, grid_L);
  return g;
}

static void check_fragment_params(int grid_L, int omega_N) {
  if (grid_L < 2) throw InputError("grid_L must be at least 2");
  if (omega_N < 2) throw InputError("omega_N must be at least 2");
}

Fragment fragment_close(const std::vector<Formula>& seed, const Signature& sig, int grid_L, int omega_N) {
  check_fragment_params(grid_L, omega_N);
  std::map<std::string, Formula> closed;
  std::vector<Formula> work;
  for (const auto& f : seed) {
    check_well_formed(f, sig);
    work.push_back(alpha_normalize(f));
  }
  while (!work.empty()) {
    Formula f = std::move(work.back());
    work.pop_back();
    std::string key = print_formula(f);
    if (closed.count(key)) continue;
    for (const auto& k : f.kids) work.push_back(alpha_normalize(k));
    closed.emplace(std::move(key), std::move(f));
  }
  Fragment out;
  out.grid_L = grid_L;
  out.omega_N = omega_N;
  for (auto& [k, f] : closed) out.formulas.push_back(std::move(f));
  return out;
}

Fragment depth_closure(const Signature& sig, int depth, int grid_L, int omega_N) {
  check_fragment_params(grid_L, omega_N);
  if (depth < 0) throw InputError("depth must be non-negative");
  auto xs = [](int from, int count) {
    std::vector<Term> v;
    for (int i = 0; i < count; ++i) v.push_back(Term::var("x" + std::to_string(from + i)));
    return v;
  };
  std::vector<Formula> atoms;
  atoms.push_back(Formula::dist(Term::var("x0"), Term::var("x1")));
  for (const auto& r : sig.relations) atoms.push_back(Formula::rel(r.name, xs(0, r.arity)));
  for (const auto& f : sig.functions)
    atoms.push_back(Formula::dist(Term::app(f.name, xs(0, f.arity)), Term::var("x" + std::to_string(f.arity))));

  std::vector<Formula> seed = atoms;
  seed.push_back(Formula::zero());
  seed.push_back(Formula::one());
  for (const auto& r : sig.relations)
    seed.push_back(Formula::monus(Formula::rel(r.name, xs(0, r.arity)), Formula::rel(r.name, xs(r.arity, r.arity))));

  std::set<std::string> seen;
  for (const auto& f : seed) seen.insert(print_formula(alpha_normalize(f)));
  auto add = [&](Formula f, std::vector<Formula>& level) {
    f = alpha_normalize(f);
    if (seen.insert(print_formula(f)).second) {
      level.push_back(f);
      seed.push_back(std::move(f));
    }
  };

  std::vector<Formula> frontier = atoms;
  for (int lvl = 1; lvl <= depth; ++lvl) {
    std::vector<Formula> next;
    if (lvl == 1) {
      add(Formula::half(Formula::one()), next);
      for (const auto& a : atoms) add(Formula::monus(Formula::one(), a), next);
      for (const auto& a : atoms)
        for (const auto& b : atoms)
          if (!(a == b)) add(Formula::monus(a, b), next);
    }
    for (const auto& f : frontier) {
      add(Formula::half(f), next);
      for (const auto& v : free_vars(f)) {
        add(Formula::sup(v, f), next);
        add(Formula::inf(v, f), next);
      }
    }
    frontier = std::move(next);
  }
  return fragment_close(seed, sig, grid_L, omega_N);
}

// ---------------------------------------------------------------- formula moduli

Rational term_modulus(const Term& t, const Signature& sig, const Rational& eps) {
  if (t.is_var()) return cap1(eps);
  const SymbolDecl* f = sig.function(t.name);
  if (!f) throw SymbolError("unknown function symbol \"" + t.name + "\"");
  if (t.args.empty()) return Rational(0);
  Rational inner(0);
  for (const auto& a : t.args) inner = rmax(inner, term_modulus(a, sig, eps));
  if (inner == Rational(0)) return Rational(0);
  return f->modulus.inverse(inner);
}

Rational modulus_at(const Formula& f, const Signature& sig, const Rational& eps) {
  switch (f.kind) {
    case FKind::Zero:
    case FKind::One: return Rational(0);
    case FKind::Half: return modulus_at(f.kids[0], sig, eps) * Rational(1, 2);
    case FKind::Monus: return cap1(modulus_at(f.kids[0], sig, eps) + modulus_at(f.kids[1], sig, eps));
    case FKind::Sup:
    case FKind::Inf: return modulus_at(f.kids[0], sig, eps);
    case FKind::Dist: return cap1(term_modulus(f.terms[0], sig, eps) + term_modulus(f.terms[1], sig, eps));
    case FKind::Rel: {
      const SymbolDecl* r = sig.relation(f.name);
      if (!r) throw SymbolError("unknown relation symbol \"" + f.name + "\"");
      Rational inner(0);
      for (const auto& t : f.terms) inner = rmax(inner, term_modulus(t, sig, eps));
      if (inner == Rational(0)) return Rational(0);
      return r->modulus.inverse(inner);
    }
  }
  return Rational(1);
}

ModulusTable formula_modulus(const Formula& f, const Signature& sig, int grid_L) {
  ModulusTable w;
  for (int i = 0; i <= grid_L; ++i) {
    Rational eps(i, grid_L);
    w.entries.emplace_back(eps, modulus_at(f, sig, eps));
  }
  return w;
}

}  // namespace cdense
