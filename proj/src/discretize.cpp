#include "cdense/discretize.hpp"

#include <algorithm>
#include <set>

#include "cdense/kernels.hpp"

namespace cdense {

std::size_t DiscreteSignatureFragment::symbol_count() const {
  return index->size() * static_cast<std::size_t>(grid_L() + 1) * 2;
}

std::vector<DiscreteSignatureFragment::Symbol> DiscreteSignatureFragment::symbols() const {
  std::vector<Symbol> out;
  out.reserve(symbol_count());
  for (std::size_t f = 0; f < index->size(); ++f)
    for (int i = 0; i <= grid_L(); ++i)
      for (Dir d : {Dir::GEQ, Dir::LEQ}) out.push_back({static_cast<int>(f), i, d});
  return out;
}

DiscreteSignatureFragment build_signature_fragment(const Signature& sig, const Fragment& frag) {
  if (frag.grid_L < 2) throw InputError("grid_L must be at least 2");
  if (frag.omega_N < 2) throw InputError("omega_N must be at least 2");
  auto idx = std::make_shared<FragmentIndex>(sig, frag);
  if (idx->dist_atom() < 0) throw InputError("fragment lacks a distance atom d(x, y)");
  return DiscreteSignatureFragment{std::move(idx)};
}

int Carrier::element_index(const std::string& name) const {
  auto it = std::find(universe.begin(), universe.end(), name);
  return it == universe.end() ? -1 : static_cast<int>(it - universe.begin());
}

Tri ThresholdView::refine(int f, std::size_t t, Dir d, int lo, int hi) const {
  if (d == Dir::GEQ) {
    if (bit(f, t, Dir::GEQ, hi)) return Tri::True;
    if (!bit(f, t, Dir::GEQ, lo)) return Tri::False;
    return Tri::Unknown;
  }
  if (bit(f, t, Dir::LEQ, lo)) return Tri::True;
  if (!bit(f, t, Dir::LEQ, hi)) return Tri::False;
  return Tri::Unknown;
}

int ThresholdView::geq_sup(int f, std::size_t t) const {
  for (int i = L_; i >= 0; --i)
    if (bit(f, t, Dir::GEQ, i)) return i;
  return -1;
}

int ThresholdView::leq_inf(int f, std::size_t t) const {
  for (int i = 0; i <= L_; ++i)
    if (bit(f, t, Dir::LEQ, i)) return i;
  return L_ + 1;
}

std::optional<Rational> ThresholdView::exact_value(int f, std::size_t t) const {
  if (D_.oracle) return D_.oracle->value(f, t);
  int s = geq_sup(f, t);
  if (s >= 0 && s == leq_inf(f, t)) return Rational(s, L_);
  return std::nullopt;
}

Tri ThresholdView::query(int f, std::size_t t, Dir d, const Rational& thr) const {
  if (thr < Rational(0)) return tri(d == Dir::GEQ);
  if (thr > Rational(1)) return tri(d == Dir::LEQ);
  if (auto v = exact_value(f, t)) return tri(d == Dir::GEQ ? *v >= thr : *v <= thr);
  long lo = thr.floor_mul(L_), hi = thr.ceil_mul(L_);
  if (lo == hi) return tri(bit(f, t, d, static_cast<int>(lo)));
  return refine(f, t, d, static_cast<int>(lo), static_cast<int>(hi));
}

bool check_nicely_dense(const ContinuousStructure& M, const std::vector<int>& A) {
  std::set<int> in(A.begin(), A.end());
  for (int a : A)
    if (a < 0 || static_cast<std::size_t>(a) >= M.size()) return false;
  for (std::size_t f = 0; f < M.sig.functions.size(); ++f) {
    const int ar = M.sig.functions[f].arity;
    const std::size_t T = tuple_count(A.size(), ar);
    std::vector<int> local(ar), x(ar);
    std::vector<int> elems(A.begin(), A.end());
    if (ar == 0) {
      if (!in.count(M.func_tables[f][0])) return false;
      continue;
    }
    for (std::size_t i = 0; i < T; ++i) {
      decode_tuple(i, ar, A.size(), local.data());
      for (int k = 0; k < ar; ++k) x[k] = elems[local[k]];
      if (!in.count(M.func_tables[f][encode_tuple(x, M.size())])) return false;
    }
  }
  // A finite metric space has positive minimum distance: only the whole set is dense.
  return in.size() == M.size();
}

DiscreteStructure encode(const ContinuousStructure& M, const std::vector<int>& A,
                         const DiscreteSignatureFragment& sigf) {
  if (!check_nicely_dense(M, A)) throw NotNicelyDense("subset is not nicely dense");
  DiscreteStructure D;
  D.sigf = sigf;
  D.carrier.universe = M.universe;
  D.carrier.func_tables = M.func_tables;
  D.oracle = std::make_shared<ValueTables>(kernels::value_tables(M, *sigf.index));
  return D;
}

DiscreteStructure encode(const ContinuousStructure& M, const DiscreteSignatureFragment& sigf) {
  std::vector<int> all(M.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return encode(M, all, sigf);
}

DiscreteStructure materialize(const DiscreteStructure& D) {
  if (!D.oracle) return D;
  DiscreteStructure out;
  out.sigf = D.sigf;
  out.carrier = D.carrier;
  out.truth = std::make_shared<TruthTables>(kernels::materialize_tables(*D.oracle, D.index()));
  return out;
}

std::vector<std::string> off_grid_values(const DiscreteStructure& D, std::size_t limit) {
  std::vector<std::string> out;
  ThresholdView view(D);
  const auto& idx = D.index();
  for (std::size_t f = 0; f < idx.size() && out.size() < limit; ++f) {
    const auto& fi = idx.at(static_cast<int>(f));
    const std::size_t T = tuple_count(D.size(), fi.arity);
    for (std::size_t t = 0; t < T && out.size() < limit; ++t) {
      int s = view.geq_sup(static_cast<int>(f), t), i = view.leq_inf(static_cast<int>(f), t);
      if (s == i) continue;
      std::string desc = fi.key + " at (";
      auto x = decode_tuple(t, fi.arity, D.size());
      for (std::size_t k = 0; k < x.size(); ++k) desc += (k ? "," : "") + D.carrier.universe[x[k]];
      desc += ")";
      if (D.oracle) desc += " = " + D.oracle->value(static_cast<int>(f), t).str();
      out.push_back(desc);
    }
  }
  return out;
}

}  // namespace cdense
