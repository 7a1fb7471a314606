#include "cdense/fragment_index.hpp"

#include <algorithm>
#include <numeric>

namespace cdense {

namespace {

CompiledTerm compile_term(const Term& t, const std::vector<std::string>& vars, const Signature& sig) {
  CompiledTerm c;
  if (t.is_var()) {
    auto it = std::find(vars.begin(), vars.end(), t.name);
    c.var_slot = static_cast<int>(it - vars.begin());
    return c;
  }
  c.func = sig.function_index(t.name);
  if (c.func < 0) throw SymbolError("unknown function symbol \"" + t.name + "\"");
  for (const auto& a : t.args) c.args.push_back(compile_term(a, vars, sig));
  return c;
}

}  // namespace

FragmentIndex::FragmentIndex(const Signature& sig, const Fragment& frag) : sig_(sig), frag_(frag) {
  info_.reserve(frag_.formulas.size());
  for (std::size_t i = 0; i < frag_.formulas.size(); ++i) {
    FormulaInfo fi;
    fi.formula = frag_.formulas[i];
    fi.key = print_formula(fi.formula);
    fi.vars = free_vars(fi.formula);
    fi.arity = static_cast<int>(fi.vars.size());
    fi.size = formula_size(fi.formula);
    fi.kind = fi.formula.kind;
    if (!by_key_.emplace(fi.key, static_cast<int>(i)).second)
      throw InputError("duplicate formula in fragment: " + fi.key);
    info_.push_back(std::move(fi));
  }
  for (auto& fi : info_) {
    const Formula& f = fi.formula;
    for (std::size_t c = 0; c < f.kids.size(); ++c) {
      Formula kid = alpha_normalize(f.kids[c]);
      int id = find_key(print_formula(kid));
      if (id < 0) throw InputError("fragment not closed under subformulas: missing " + print_formula(kid));
      fi.child[c] = id;
      for (const auto& v : info_[id].vars) {
        if (f.is_quantifier() && v == f.name) {
          fi.child_map[c].push_back(fi.arity);
          continue;
        }
        auto it = std::find(fi.vars.begin(), fi.vars.end(), v);
        fi.child_map[c].push_back(static_cast<int>(it - fi.vars.begin()));
      }
    }
    if (f.kind == FKind::Rel) {
      fi.rel = sig_.relation_index(f.name);
      if (fi.rel < 0) throw SymbolError("unknown relation symbol \"" + f.name + "\"");
    }
    for (const auto& t : f.terms) fi.terms.push_back(compile_term(t, fi.vars, sig_));
    if (f.kind == FKind::Dist && dist_atom_ < 0 && f.terms[0].is_var() && f.terms[1].is_var() &&
        f.terms[0].name != f.terms[1].name)
      dist_atom_ = static_cast<int>(&fi - info_.data());
  }
  order_.resize(info_.size());
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return info_[a].size < info_[b].size; });
}

int FragmentIndex::find_key(const std::string& key) const {
  auto it = by_key_.find(key);
  return it == by_key_.end() ? -1 : it->second;
}

int FragmentIndex::find(const Formula& f) const { return find_key(print_formula(alpha_normalize(f))); }

int eval_compiled_term(const CompiledTerm& t, const int* slots, std::size_t n,
                       const std::vector<std::vector<int>>& func_tables) {
  if (t.var_slot >= 0) return slots[t.var_slot];
  int buf[16];
  std::vector<int> big;
  int* args = buf;
  if (t.args.size() > 16) {
    big.resize(t.args.size());
    args = big.data();
  }
  for (std::size_t i = 0; i < t.args.size(); ++i) args[i] = eval_compiled_term(t.args[i], slots, n, func_tables);
  return func_tables[t.func][encode_tuple(args, static_cast<int>(t.args.size()), n)];
}

}  // namespace cdense
