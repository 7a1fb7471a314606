#include "cdense/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace cdense::io {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::string str(const json& j, const char* what) {
  if (!j.is_string()) throw InputError(std::string(what) + " must be a string");
  return j.get<std::string>();
}

int integer(const json& j, const char* what) {
  if (!j.is_number_integer()) throw InputError(std::string(what) + " must be an integer");
  return j.get<int>();
}

std::vector<std::string> strings(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(str(e, what));
  return out;
}

std::map<std::string, int> name_index(const std::vector<std::string>& universe) {
  std::map<std::string, int> idx;
  for (std::size_t i = 0; i < universe.size(); ++i)
    if (!idx.emplace(universe[i], static_cast<int>(i)).second)
      throw InputError("duplicate element \"" + universe[i] + "\"");
  return idx;
}

int lookup(const std::map<std::string, int>& idx, const json& j) {
  const std::string nm = str(j, "element");
  auto it = idx.find(nm);
  if (it == idx.end()) throw InputError("unknown element \"" + nm + "\"");
  return it->second;
}

ModulusTable modulus_from_json(const json& j) {
  ModulusTable m;
  if (j.is_null()) return m;
  if (!j.is_array()) throw InputError("modulus must be an array of [r, delta] pairs");
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw InputError("modulus entries are [r, delta] pairs");
    m.set(rational_from_json(e[0]), rational_from_json(e[1]));
  }
  return m;
}

json modulus_to_json(const ModulusTable& m) {
  json a = json::array();
  for (const auto& [r, d] : m.entries) a.push_back(json::array({r.str(), d.str()}));
  return a;
}

std::vector<SymbolDecl> decls_from_json(const json& j) {
  std::vector<SymbolDecl> out;
  if (j.is_null()) return out;
  if (!j.is_array()) throw InputError("symbol lists must be arrays");
  for (const auto& e : j) {
    SymbolDecl d;
    d.name = str(field(e, "name"), "symbol name");
    d.arity = integer(field(e, "arity"), "arity");
    if (d.arity < 0) throw InputError("negative arity for " + d.name);
    if (e.contains("modulus")) d.modulus = modulus_from_json(e.at("modulus"));
    out.push_back(std::move(d));
  }
  return out;
}

json decls_to_json(const std::vector<SymbolDecl>& ds) {
  json a = json::array();
  for (const auto& d : ds) a.push_back(json{{"name", d.name}, {"arity", d.arity}, {"modulus", modulus_to_json(d.modulus)}});
  return a;
}

// Reads {"F": [[["a", ...], out], ...]} into total tables.
template <typename Value, typename Read>
std::vector<std::vector<Value>> tables_from_json(const json& j, const std::vector<SymbolDecl>& decls,
                                                 const std::map<std::string, int>& idx, std::size_t n, Read read,
                                                 const char* kind) {
  if (!j.is_null() && !j.is_object()) throw InputError(std::string(kind) + " must be an object");
  for (auto it = j.begin(); !j.is_null() && it != j.end(); ++it) {
    bool known = std::any_of(decls.begin(), decls.end(), [&](const SymbolDecl& d) { return d.name == it.key(); });
    if (!known) throw InputError(std::string("table for undeclared ") + kind + " \"" + it.key() + "\"");
  }
  std::vector<std::vector<Value>> out;
  for (const auto& d : decls) {
    if (j.is_null() || !j.contains(d.name)) throw InputError("missing table for \"" + d.name + "\"");
    const std::size_t T = tuple_count(n, d.arity);
    std::vector<Value> table(T);
    std::vector<bool> seen(T, false);
    for (const auto& row : j.at(d.name)) {
      if (!row.is_array() || row.size() != 2 || !row[0].is_array())
        throw InputError("table rows for \"" + d.name + "\" are [[args...], value]");
      if (static_cast<int>(row[0].size()) != d.arity) throw ArityError("wrong argument count in table for " + d.name);
      std::vector<int> args;
      for (const auto& a : row[0]) args.push_back(lookup(idx, a));
      const std::size_t t = encode_tuple(args, n);
      if (seen[t]) throw InputError("duplicate row in table for \"" + d.name + "\"");
      seen[t] = true;
      table[t] = read(row[1]);
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      throw InputError("table for \"" + d.name + "\" is not total");
    out.push_back(std::move(table));
  }
  return out;
}

json function_tables_to_json(const Signature& sig, const std::vector<std::vector<int>>& tables,
                             const std::vector<std::string>& universe) {
  json obj = json::object();
  for (std::size_t f = 0; f < sig.functions.size(); ++f) {
    json rows = json::array();
    for (std::size_t t = 0; t < tables[f].size(); ++t) {
      json args = json::array();
      for (int x : decode_tuple(t, sig.functions[f].arity, universe.size())) args.push_back(universe[x]);
      rows.push_back(json::array({args, universe[tables[f][t]]}));
    }
    obj[sig.functions[f].name] = rows;
  }
  return obj;
}

}  // namespace

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  return Rational::parse(str(j, "rational"));
}

json rational_to_json(const Rational& r) { return r.str(); }

Signature signature_from_json(const json& j) {
  Signature sig;
  if (j.contains("functions")) sig.functions = decls_from_json(j.at("functions"));
  if (j.contains("relations")) sig.relations = decls_from_json(j.at("relations"));
  sig.validate();
  return sig;
}

json signature_to_json(const Signature& sig) {
  return json{{"functions", decls_to_json(sig.functions)}, {"relations", decls_to_json(sig.relations)}};
}

ContinuousStructure structure_from_json(const json& j) {
  ContinuousStructure M;
  M.sig = signature_from_json(field(j, "signature"));
  M.universe = strings(field(j, "universe"), "universe");
  const auto idx = name_index(M.universe);
  const std::size_t n = M.size();
  M.metric.assign(n * n, Rational(0));
  std::vector<bool> seen(n * n, false);
  for (std::size_t a = 0; a < n; ++a) seen[a * n + a] = true;
  for (const auto& row : field(j, "metric")) {
    if (!row.is_array() || row.size() != 3) throw InputError("metric rows are [a, b, value]");
    const int a = lookup(idx, row[0]), b = lookup(idx, row[1]);
    Rational v = rational_from_json(row[2]);
    if (a == b) {
      if (v != Rational(0)) throw InputError("metric diagonal must be 0");
      continue;
    }
    const std::size_t ab = static_cast<std::size_t>(a) * n + b, ba = static_cast<std::size_t>(b) * n + a;
    if (seen[ab]) throw InputError("metric pair listed twice");
    seen[ab] = seen[ba] = true;
    M.metric[ab] = v;
    M.metric[ba] = v;
  }
  for (std::size_t k = 0; k < n * n; ++k)
    if (!seen[k]) throw InputError("metric pair (" + M.universe[k / n] + ", " + M.universe[k % n] + ") is unlisted");
  M.func_tables = tables_from_json<int>(j.contains("functions") ? j.at("functions") : json(), M.sig.functions, idx, n,
                                        [&](const json& v) { return lookup(idx, v); }, "function");
  M.rel_tables = tables_from_json<Rational>(j.contains("relations") ? j.at("relations") : json(), M.sig.relations,
                                            idx, n, [](const json& v) { return rational_from_json(v); }, "relation");
  return M;
}

json structure_to_json(const ContinuousStructure& M) {
  json j;
  j["signature"] = signature_to_json(M.sig);
  j["universe"] = M.universe;
  json metric = json::array();
  for (std::size_t a = 0; a < M.size(); ++a)
    for (std::size_t b = a + 1; b < M.size(); ++b)
      metric.push_back(json::array({M.universe[a], M.universe[b], M.d(static_cast<int>(a), static_cast<int>(b)).str()}));
  j["metric"] = metric;
  j["functions"] = function_tables_to_json(M.sig, M.func_tables, M.universe);
  json rels = json::object();
  for (std::size_t r = 0; r < M.sig.relations.size(); ++r) {
    json rows = json::array();
    for (std::size_t t = 0; t < M.rel_tables[r].size(); ++t) {
      json args = json::array();
      for (int x : decode_tuple(t, M.sig.relations[r].arity, M.size())) args.push_back(M.universe[x]);
      rows.push_back(json::array({args, M.rel_tables[r][t].str()}));
    }
    rels[M.sig.relations[r].name] = rows;
  }
  j["relations"] = rels;
  return j;
}

json fragment_to_json(const Fragment& frag) {
  json f;
  json formulas = json::array();
  for (const auto& x : frag.formulas) formulas.push_back(print_formula(x));
  f["formulas"] = formulas;
  f["grid_L"] = frag.grid_L;
  f["omega_N"] = frag.omega_N;
  return f;
}

Fragment fragment_from_json(const json& j, const Signature& sig) {
  const int L = integer(field(j, "grid_L"), "grid_L");
  const int N = integer(field(j, "omega_N"), "omega_N");
  if (L < 2) throw InputError("grid_L must be at least 2");
  if (N < 2) throw InputError("omega_N must be at least 2");
  std::vector<Formula> fs;
  for (const auto& s : strings(field(j, "formulas"), "formula")) fs.push_back(parse_formula(s, sig));
  Fragment frag = fragment_close(fs, sig, L, N);
  if (frag.formulas.size() != fs.size() && !fs.empty()) {
    // Listed formulas must already be closed under subformulas (duplicates aside).
    std::vector<std::string> keys;
    for (const auto& f : fs) keys.push_back(print_formula(f));
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    if (keys.size() != frag.formulas.size()) throw InputError("fragment is not closed under subformulas");
  }
  return frag;
}

DiscreteStructure discrete_from_json(const json& j) {
  const Signature sig = signature_from_json(field(j, "signature"));
  const Fragment frag = fragment_from_json(field(j, "fragment"), sig);
  DiscreteStructure D;
  D.sigf = build_signature_fragment(sig, frag);
  D.carrier.universe = strings(field(j, "universe"), "universe");
  const auto idx = name_index(D.carrier.universe);
  const std::size_t n = D.size();
  D.carrier.func_tables = tables_from_json<int>(j.contains("functions") ? j.at("functions") : json(), sig.functions,
                                                idx, n, [&](const json& v) { return lookup(idx, v); }, "function");
  auto truth = std::make_shared<TruthTables>();
  truth->grid_L = frag.grid_L;
  truth->n = n;
  const auto& fi = D.index();
  std::vector<std::vector<std::uint8_t>> seen(fi.size());
  truth->bits.resize(fi.size());
  for (std::size_t f = 0; f < fi.size(); ++f) {
    const std::size_t sz = tuple_count(n, fi.at(static_cast<int>(f)).arity) * 2 * (frag.grid_L + 1);
    truth->bits[f].assign(sz, 0);
    seen[f].assign(sz, 0);
  }
  for (const auto& row : field(j, "truth")) {
    if (!row.is_array() || row.size() != 5) throw InputError("truth rows are [formula, r, dir, [tuple], bool]");
    const int f = fi.find(parse_formula(str(row[0], "formula"), sig));
    if (f < 0) throw InputError("truth row formula outside the fragment: " + str(row[0], "formula"));
    const Rational r = rational_from_json(row[1]);
    if (r < Rational(0) || r > Rational(1) || r.floor_mul(frag.grid_L) != r.ceil_mul(frag.grid_L))
      throw InputError("threshold " + r.str() + " is not on the grid");
    const int i = static_cast<int>(r.floor_mul(frag.grid_L));
    const std::string dir = str(row[2], "direction");
    if (dir != "GEQ" && dir != "LEQ") throw InputError("direction must be GEQ or LEQ");
    const Dir d = dir == "GEQ" ? Dir::GEQ : Dir::LEQ;
    if (!row[3].is_array() || static_cast<int>(row[3].size()) != fi.at(f).arity)
      throw ArityError("truth row tuple has the wrong length");
    std::vector<int> tuple;
    for (const auto& e : row[3]) tuple.push_back(lookup(idx, e));
    if (!row[4].is_boolean()) throw InputError("truth value must be a boolean");
    const std::size_t off = truth->offset(encode_tuple(tuple, n), d, i);
    if (seen[f][off]) throw InputError("duplicate truth row");
    seen[f][off] = 1;
    truth->bits[f][off] = row[4].get<bool>() ? 1 : 0;
  }
  for (std::size_t f = 0; f < fi.size(); ++f)
    if (std::find(seen[f].begin(), seen[f].end(), 0) != seen[f].end())
      throw InputError("truth table incomplete for " + fi.at(static_cast<int>(f)).key);
  D.truth = truth;
  return D;
}

json discrete_to_json(const DiscreteStructure& D) {
  json j;
  j["signature"] = signature_to_json(D.sigf.sig());
  j["fragment"] = fragment_to_json(D.sigf.fragment());
  j["universe"] = D.carrier.universe;
  j["functions"] = function_tables_to_json(D.sigf.sig(), D.carrier.func_tables, D.carrier.universe);
  json truth = json::array();
  ThresholdView view(D);
  const auto& fi = D.index();
  const int L = D.grid_L();
  std::vector<std::string> grid;
  for (int i = 0; i <= L; ++i) grid.push_back(Rational(i, L).str());
  for (std::size_t f = 0; f < fi.size(); ++f) {
    const int m = fi.at(static_cast<int>(f)).arity;
    const std::size_t T = tuple_count(D.size(), m);
    for (std::size_t t = 0; t < T; ++t) {
      json tup = json::array();
      for (int x : decode_tuple(t, m, D.size())) tup.push_back(D.carrier.universe[x]);
      for (int i = 0; i <= L; ++i)
        for (Dir d : {Dir::GEQ, Dir::LEQ})
          truth.push_back(json::array({fi.at(static_cast<int>(f)).key, grid[i], dir_name(d), tup,
                                       view.bit(static_cast<int>(f), t, d, i)}));
    }
  }
  j["truth"] = truth;
  return j;
}

LevelFamily level_family_from_json(const json& j) {
  LevelFamily fam;
  for (const auto& lv : field(j, "levels")) fam.levels.push_back(discrete_from_json(lv));
  if (j.contains("rate")) fam.rate = rational_from_json(j.at("rate"));
  for (std::size_t k = 1; k < fam.levels.size(); ++k)
    if (auto why = substructure_mismatch(fam.levels[k - 1], fam.levels[k]))
      throw InputError("level " + std::to_string(k - 1) + " is not a substructure of level " + std::to_string(k) +
                       ": " + *why);
  return fam;
}

json level_family_to_json(const LevelFamily& fam) {
  json levels = json::array();
  for (const auto& lv : fam.levels) levels.push_back(discrete_to_json(lv));
  return json{{"levels", levels}, {"rate", fam.rate.str()}};
}

ContinuousTypeFragment type_fragment_from_json(const json& j, const Signature& sig) {
  ContinuousTypeFragment r;
  r.vars = strings(field(j, "vars"), "vars");
  for (const auto& c : field(j, "conditions")) {
    TypeCondition tc;
    tc.formula = parse_formula(str(field(c, "formula"), "formula"), sig);
    tc.values = strings(field(c, "values"), "values");
    if (c.contains("params")) {
      tc.params = strings(c.at("params"), "params");
    } else {
      for (const auto& v : free_vars(tc.formula))
        if (std::find(r.vars.begin(), r.vars.end(), v) == r.vars.end()) tc.params.push_back(v);
    }
    if (tc.params.size() != tc.values.size()) throw InputError("params and values differ in length");
    r.conditions.push_back(std::move(tc));
  }
  return r;
}

json type_fragment_to_json(const ContinuousTypeFragment& r) {
  json conds = json::array();
  for (const auto& c : r.conditions)
    conds.push_back(json{{"formula", print_formula(c.formula)}, {"params", c.params}, {"values", c.values}});
  return json{{"vars", r.vars}, {"conditions", conds}};
}

SequenceType sequence_type_from_json(const json& j, const Signature& sig) {
  SequenceType st;
  const int arity = integer(field(j, "arity"), "arity");
  if (j.contains("vars")) {
    st.vars = strings(j.at("vars"), "vars");
  } else {
    for (int k = 0; k < arity; ++k) st.vars.push_back("x" + std::to_string(k));
  }
  if (static_cast<int>(st.vars.size()) != arity) throw InputError("vars do not match arity");
  st.depth = integer(field(j, "depth"), "depth");
  if (st.depth < 0) throw InputError("depth must be non-negative");
  for (const auto& e : field(j, "index")) {
    SequenceEntry se;
    se.formula = parse_formula(str(field(e, "formula"), "formula"), sig);
    if (e.contains("params")) {
      se.params = strings(e.at("params"), "params");
    } else {
      for (const auto& v : free_vars(se.formula))
        if (std::find(st.vars.begin(), st.vars.end(), v) == st.vars.end()) se.params.push_back(v);
    }
    for (const auto& step : field(e, "chain")) {
      auto names = strings(step, "chain step");
      if (names.size() != se.params.size()) throw InputError("chain step does not match the parameters");
      se.chain.push_back(std::move(names));
    }
    st.index.push_back(std::move(se));
  }
  return st;
}

json sequence_type_to_json(const SequenceType& st) {
  json index = json::array();
  for (const auto& e : st.index)
    index.push_back(json{{"formula", print_formula(e.formula)}, {"params", e.params}, {"chain", e.chain}});
  return json{{"arity", st.arity()}, {"vars", st.vars}, {"index", index}, {"depth", st.depth}};
}

json verdict_to_json(const SchemeVerdict& v) {
  json j{{"scheme", scheme_name(v.scheme)}, {"pass", v.pass}, {"fail", v.fail}, {"skip", v.skip},
         {"undetermined", v.undetermined}, {"mode", v.mode}};
  j["witness"] = v.witness ? json(*v.witness) : json(nullptr);
  return j;
}

json violation_to_json(const Violation& v) {
  return json{{"kind", v.kind}, {"symbol", v.symbol}, {"elements", v.elements}, {"detail", v.detail}};
}

}  // namespace cdense::io
