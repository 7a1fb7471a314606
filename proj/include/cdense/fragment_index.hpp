#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "cdense/semantics.hpp"
#include "cdense/syntax.hpp"

namespace cdense {

// Term compiled against a formula's free-variable layout.
struct CompiledTerm {
  int var_slot = -1;  // position in the tuple, or -1 for an application
  int func = -1;
  std::vector<CompiledTerm> args;
};

struct FormulaInfo {
  Formula formula;
  std::string key;                // printed, alpha-normalized
  std::vector<std::string> vars;  // tuple layout
  int arity = 0;
  int size = 1;
  FKind kind = FKind::Zero;
  int child[2] = {-1, -1};
  // child var position -> parent tuple slot; slot == arity stands for the bound variable.
  std::vector<int> child_map[2];
  int rel = -1;
  std::vector<CompiledTerm> terms;
};

// Fragment compiled for evaluation: integer ids, tuple layouts, child links.
class FragmentIndex {
 public:
  FragmentIndex(const Signature& sig, const Fragment& frag);

  const Signature& sig() const { return sig_; }
  const Fragment& fragment() const { return frag_; }
  int grid_L() const { return frag_.grid_L; }
  int omega_N() const { return frag_.omega_N; }
  std::size_t size() const { return info_.size(); }
  const FormulaInfo& at(int id) const { return info_[static_cast<std::size_t>(id)]; }
  int find(const Formula& f) const;  // normalizes first; -1 if absent
  int find_key(const std::string& key) const;
  /// Ids ordered so that children precede parents.
  const std::vector<int>& bottom_up() const { return order_; }
  /// d(a, b) with distinct variables a, b; -1 if absent.
  int dist_atom() const { return dist_atom_; }

 private:
  Signature sig_;
  Fragment frag_;
  std::vector<FormulaInfo> info_;
  std::unordered_map<std::string, int> by_key_;
  std::vector<int> order_;
  int dist_atom_ = -1;
};

int eval_compiled_term(const CompiledTerm& t, const int* slots, std::size_t n,
                       const std::vector<std::vector<int>>& func_tables);

}  // namespace cdense
