// Command-line front end. Exit codes: 0 pass, 1 failure, 2 input error.
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cdense/io.hpp"
#include "cdense/kernels.hpp"

using namespace cdense;
using cdense::io::json;

namespace {

struct Options {
  int grid = 8;
  int omega = 8;
  int depth = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  bool strict_grid = false;
  std::vector<std::string> formulas;
  // Set after parsing when the flag was given explicitly.
  bool grid_set = false, omega_set = false, depth_set = false;
};

class Reporter {
 public:
  explicit Reporter(const Options& o) : human_(o.format == "human") {}

  void line(const json& j) const {
    if (!human_) {
      std::cout << j.dump() << '\n';
      return;
    }
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) std::cout << "  ";
      first = false;
      std::cout << it.key() << '=' << (it->is_string() ? it->get<std::string>() : it->dump());
    }
    std::cout << '\n';
  }

 private:
  bool human_;
};

void emit_artifact(const Options& o, const json& j) {
  const std::string text = j.dump(1) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    io::write_text(o.out, text);
  }
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<int> element_indices(const std::vector<std::string>& names, const Carrier& c) {
  std::vector<int> out;
  for (const auto& nm : names) {
    const int i = c.element_index(nm);
    if (i < 0) throw InputError("unknown element \"" + nm + "\"");
    out.push_back(i);
  }
  return out;
}

void check_ranges(const Options& o) {
  if (o.grid < 2) throw InputError("--grid must be at least 2");
  if (o.omega < 2) throw InputError("--omega must be at least 2");
  if (o.depth < 0) throw InputError("--depth must be non-negative");
}

Fragment fragment_for(const Signature& sig, const Options& o) {
  check_ranges(o);
  if (o.formulas.empty()) return depth_closure(sig, o.depth, o.grid, o.omega);
  std::vector<Formula> seed;
  for (const auto& f : o.formulas) seed.push_back(parse_formula(f, sig));
  return fragment_close(seed, sig, o.grid, o.omega);
}

json counts_json(const InstanceSet& set) {
  json j = json::object();
  const auto c = set.counts();
  for (std::size_t s = 0; s < kSchemeCount; ++s) j[scheme_name(static_cast<Scheme>(s))] = c[s];
  return j;
}

json violations_json(const std::vector<Violation>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(io::violation_to_json(v));
  return a;
}

int cmd_validate(const std::string& path, const Options& o) {
  Reporter rep(o);
  const ContinuousStructure M = io::structure_from_json(io::read_json(path));
  std::vector<Violation> all = check_tables(M);
  if (all.empty()) {
    for (auto&& v : check_metric(M)) all.push_back(v);
    for (auto&& v : check_uniform_continuity(M)) all.push_back(v);
  }
  for (const auto& v : all) rep.line(io::violation_to_json(v));
  rep.line(json{{"command", "validate"}, {"pass", all.empty()}, {"violations", all.size()}});
  return all.empty() ? 0 : 1;
}

int cmd_encode(const std::string& path, const Options& o) {
  Reporter rep(o);
  const ContinuousStructure M = io::structure_from_json(io::read_json(path));
  try {
    validate_structure(M);
  } catch (const ValidationError& e) {
    rep.line(json{{"command", "encode"}, {"pass", false}, {"error", e.what()}, {"violations", violations_json(e.violations)}});
    return 1;
  }
  const auto sigf = build_signature_fragment(M.sig, fragment_for(M.sig, o));
  const DiscreteStructure D = encode(M, sigf);
  if (o.strict_grid) {
    const auto off = off_grid_values(D);
    if (!off.empty()) {
      rep.line(json{{"command", "encode"}, {"pass", false}, {"error", "off-grid values"}, {"examples", off}});
      return 1;
    }
  }
  emit_artifact(o, io::discrete_to_json(materialize(D)));
  if (!o.out.empty())
    rep.line(json{{"command", "encode"}, {"pass", true}, {"formulas", sigf.fragment().formulas.size()},
                  {"symbols", sigf.symbol_count()}, {"out", o.out}});
  return 0;
}

int cmd_decode(const std::string& path, const Options& o) {
  Reporter rep(o);
  const DiscreteStructure D = io::discrete_from_json(io::read_json(path));
  ContinuousStructure M;
  try {
    M = decode(D);
  } catch (const DecodeError& e) {
    rep.line(json{{"command", "decode"}, {"pass", false}, {"error", e.what()}});
    return 1;
  } catch (const ValidationError& e) {
    rep.line(json{{"command", "decode"}, {"pass", false}, {"error", e.what()}, {"violations", violations_json(e.violations)}});
    return 1;
  }
  emit_artifact(o, io::structure_to_json(M));
  if (!o.out.empty()) rep.line(json{{"command", "decode"}, {"pass", true}, {"out", o.out}});
  return 0;
}

int cmd_check(const std::string& path, const std::vector<std::string>& conditions, const Options& o) {
  Reporter rep(o);
  const DiscreteStructure D = io::discrete_from_json(io::read_json(path));
  const int omega = o.omega_set ? o.omega : D.sigf.fragment().omega_N;
  if (omega < 2) throw InputError("--omega must be at least 2");
  InstanceSet set;
  if (conditions.empty()) {
    set = generate_tdense(D.sigf, D.carrier, omega);
  } else {
    std::vector<Condition> T;
    for (const auto& c : conditions) T.push_back({parse_formula(c, D.sigf.sig())});
    set = generate_tstar(T, D.sigf, D.carrier, omega);
  }
  const VerdictReport report = check_tdense(D, set);
  for (const auto& v : report.schemes) rep.line(io::verdict_to_json(v));
  rep.line(json{{"command", "check"}, {"pass", report.ok()}, {"instances", set.items.size()},
                {"failures", report.failures()}, {"omega_N", omega}});
  return report.ok() ? 0 : 1;
}

int cmd_roundtrip(const std::string& path, const Options& o) {
  Reporter rep(o);
  const ContinuousStructure M = io::structure_from_json(io::read_json(path));
  validate_structure(M);
  const auto sigf = build_signature_fragment(M.sig, fragment_for(M.sig, o));
  const RoundtripReport r = roundtrip_check(M, sigf);
  rep.line(json{{"command", "roundtrip"}, {"pass", r.pass()}, {"decode_identity", r.decode_identity},
                {"encode_identity", r.encode_identity}, {"clause", r.clause}, {"detail", r.detail}});
  return r.pass() ? 0 : 1;
}

int cmd_axioms(const std::string& structure, int elements, bool list, const Options& o) {
  Reporter rep(o);
  Signature sig;
  Carrier carrier;
  if (!structure.empty()) {
    const ContinuousStructure M = io::structure_from_json(io::read_json(structure));
    sig = M.sig;
    carrier.universe = M.universe;
    carrier.func_tables = M.func_tables;
  } else {
    if (elements < 1) throw InputError("--elements must be positive");
    for (int i = 0; i < elements; ++i) carrier.universe.push_back("a" + std::to_string(i));
  }
  const auto sigf = build_signature_fragment(sig, fragment_for(sig, o));
  const InstanceSet set = generate_tdense(sigf, carrier, o.omega);
  if (list)
    for (const auto& it : set.items)
      rep.line(json{{"scheme", scheme_name(it.scheme)}, {"truncated", it.truncated},
                    {"instance", render_instance(set, it.root, *sigf.index, carrier)}});
  json skipped = json::object();
  for (std::size_t s = 0; s < kSchemeCount; ++s) skipped[scheme_name(static_cast<Scheme>(s))] = set.skipped[s];
  rep.line(json{{"command", "axioms"}, {"grid_L", o.grid}, {"omega_N", o.omega},
                {"formulas", sigf.fragment().formulas.size()}, {"elements", carrier.size()},
                {"instances", set.items.size()}, {"counts", counts_json(set)}, {"skipped", skipped}});
  return 0;
}

int cmd_type(const std::string& path, const std::vector<std::string>& tuples, const std::string& params,
             int infinitesimal, const Options& o) {
  Reporter rep(o);
  const DiscreteStructure D = io::discrete_from_json(io::read_json(path));
  const std::vector<int> ps = element_indices(split_names(params), D.carrier);
  std::vector<std::vector<int>> ts;
  for (const auto& t : tuples) ts.push_back(element_indices(split_names(t), D.carrier));
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const QfType q = qf_type(D, ts[k], ps);
    std::size_t holding = 0;
    for (const auto& f : q.facts) holding += f.value ? 1 : 0;
    rep.line(json{{"tuple", split_names(tuples[k])}, {"facts", q.facts.size()}, {"true_facts", holding}});
  }
  for (std::size_t a = 0; a < ts.size(); ++a)
    for (std::size_t b = a + 1; b < ts.size(); ++b) {
      if (ts[a].size() != ts[b].size()) throw InputError("tuples differ in length");
      rep.line(json{{"left", split_names(tuples[a])}, {"right", split_names(tuples[b])},
                    {"same_type", same_type(D, ts[a], ts[b], ps)}});
    }
  if (infinitesimal > 0) {
    const auto w = infinitesimal_witness(D, infinitesimal);
    json j{{"infinitesimal_N0", infinitesimal}, {"realized", w.has_value()}};
    if (w) j["witness"] = json::array({D.carrier.universe[w->first], D.carrier.universe[w->second]});
    rep.line(j);
  }
  rep.line(json{{"command", "type"}, {"pass", true}});
  return 0;
}

int cmd_seqtype(const std::string& structure, const std::string& typefile, const Options& o) {
  Reporter rep(o);
  const ContinuousStructure M = io::structure_from_json(io::read_json(structure));
  validate_structure(M);
  const ContinuousTypeFragment r = io::type_fragment_from_json(io::read_json(typefile), M.sig);
  check_ranges(o);
  std::vector<Formula> seed{parse_formula("d(x, y)", M.sig)};
  for (const auto& c : r.conditions) seed.push_back(c.formula);
  const auto sigf = build_signature_fragment(M.sig, fragment_close(seed, M.sig, o.grid, o.omega));
  const DiscreteStructure D = materialize(encode(M, sigf));
  std::vector<int> all(M.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  const SequenceType st = build_sequence_type(r, M, all, o.depth);
  const bool continuous = realized_in(M, r).has_value();
  const bool discrete = find_sequence_realization(D, st).has_value();
  bool limit_ok = false;
  std::string limit_error;
  try {
    limit_ok = limit_type(st, D) == r;
  } catch (const UnresolvedChain& e) {
    limit_error = e.what();
  }
  if (!o.out.empty()) io::write_text(o.out, io::sequence_type_to_json(st).dump(1) + "\n");
  const bool pass = continuous == discrete && limit_ok;
  json j{{"command", "seqtype"}, {"pass", pass},          {"depth", o.depth},
         {"realized_continuous", continuous}, {"realized_sequence", discrete}, {"limit_reproduces", limit_ok}};
  if (!limit_error.empty()) j["limit_error"] = limit_error;
  rep.line(j);
  return pass ? 0 : 1;
}

std::vector<Rational> parse_weights(const std::string& s) {
  std::vector<Rational> out;
  for (const auto& w : split_names(s)) out.push_back(Rational::parse(w));
  return out;
}

int cmd_corpus(const std::string& kind, int size, const SigShape& shape, const std::string& weights, int levels,
               const std::string& relation, const Options& o) {
  Reporter rep(o);
  json summary{{"command", "corpus"}, {"kind", kind}, {"seed", o.seed}};
  if (kind == "random") {
    check_ranges(o);
    const ContinuousStructure M = gen_random_structure(o.seed, size, o.grid, shape);
    emit_artifact(o, io::structure_to_json(M));
    summary["size"] = size;
    summary["grid_L"] = o.grid;
  } else if (kind == "pra") {
    const ContinuousStructure P = gen_probability_algebra(parse_weights(weights));
    validate_structure(P);
    const TheoryReport t = models_theory(P, probability_algebra_conditions(P.sig));
    emit_artifact(o, io::structure_to_json(P));
    json chain = json::array();
    for (int x : extract_order_chain(P)) chain.push_back(P.universe[x]);
    summary["elements"] = P.size();
    summary["conditions_pass"] = t.pass;
    summary["chain"] = chain;
    if (!t.pass) {
      if (!o.out.empty()) rep.line(summary);
      return 1;
    }
  } else if (kind == "dyadic") {
    check_ranges(o);
    const LevelFamily fam = gen_dyadic_family(levels, parse_dyadic_relation(relation), o.depth, o.omega);
    emit_artifact(o, io::level_family_to_json(fam));
    summary["levels"] = fam.levels.size();
  } else {
    throw InputError("unknown corpus kind \"" + kind + "\" (random, pra, dyadic)");
  }
  if (!o.out.empty()) rep.line(summary);
  return 0;
}

int cmd_elem(const std::string& mpath, const std::string& npath, const Options& o) {
  Reporter rep(o);
  const ContinuousStructure M = io::structure_from_json(io::read_json(mpath));
  const ContinuousStructure N = io::structure_from_json(io::read_json(npath));
  validate_structure(M);
  validate_structure(N);
  if (!(M.sig == N.sig)) throw InputError("structures have different signatures");
  try {
    require_substructure(M, N);
  } catch (const NotSubstructure& e) {
    throw InputError(e.what());
  }
  const Fragment frag = fragment_for(M.sig, o);
  const ElementarityResult er = check_phi_elementary(M, N, frag.formulas);
  const auto sigf = build_signature_fragment(M.sig, frag);
  const auto why = substructure_mismatch(encode(M, sigf), encode(N, sigf));
  json j{{"command", "elem"}, {"pass", er.elementary}, {"elementary", er.elementary},
         {"tau_plus_substructure", !why.has_value()}, {"agree", er.elementary == !why.has_value()}};
  if (er.witness)
    j["witness"] = json{{"formula", er.witness->formula}, {"tuple", er.witness->tuple},
                        {"value_in_M", er.witness->value_in_M.str()}, {"value_in_N", er.witness->value_in_N.str()}};
  rep.line(j);
  return er.elementary && !why ? 0 : 1;
}

int cmd_inessential(const std::string& apath, const std::string& bpath, const Options& o) {
  Reporter rep(o);
  const DiscreteStructure A = io::discrete_from_json(io::read_json(apath));
  const DiscreteStructure B = io::discrete_from_json(io::read_json(bpath));
  if (o.depth < 1) throw InputError("--depth must be at least 1");
  const InessentialResult r = is_inessential_extension(A, B, o.depth);
  json j{{"command", "inessential"}, {"pass", r.ok}, {"depth", o.depth}};
  if (!r.ok) {
    j["element"] = r.element;
    j["n"] = r.n;
  }
  rep.line(j);
  return r.ok ? 0 : 1;
}

int cmd_completable(const std::string& path, const Options& o) {
  Reporter rep(o);
  const LevelFamily fam = io::level_family_from_json(io::read_json(path));
  if (o.depth < 0) throw InputError("--depth must be non-negative");
  const CompletableVerdict v = check_completable(fam, o.depth);
  rep.line(json{{"command", "completable"}, {"pass", v.pass}, {"depth", v.depth}, {"levels", fam.levels.size()},
                {"comparisons", v.comparisons}, {"witness", v.witness}});
  return v.pass ? 0 : 1;
}

void shared_flags(CLI::App* sub, Options& o) {
  sub->add_option("--grid", o.grid, "threshold grid denominator L");
  sub->add_option("--omega", o.omega, "omega truncation N");
  sub->add_option("--depth", o.depth, "closure or sequence depth");
  sub->add_option("--seed", o.seed, "generator seed");
  sub->add_option("--out", o.out, "output path");
  sub->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "human"}));
  sub->add_flag("--strict-grid", o.strict_grid, "reject values off the grid");
}

void fragment_flags(CLI::App* sub, Options& o) {
  sub->add_option("--formulas", o.formulas, "seed formulas (repeatable); default is the depth closure")
      ->allow_extra_args(false);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cdense: discrete presentations of continuous structures"};
  app.require_subcommand(1);
  Options o;
  std::string in1, in2, kind = "random", weights = "1/2,1/2", relation = "id", structure, params;
  std::vector<std::string> tuples, conditions;
  int size = 4, levels = 4, elements = 2, infinitesimal = 0;
  bool list = false;
  SigShape shape;

  auto* validate = app.add_subcommand("validate", "check metric axioms and moduli of a structure file");
  validate->add_option("structure", in1)->required();
  auto* enc = app.add_subcommand("encode", "write the materialized discrete encoding");
  enc->add_option("structure", in1)->required();
  fragment_flags(enc, o);
  auto* dec = app.add_subcommand("decode", "rebuild the continuous structure from threshold tables");
  dec->add_option("discrete", in1)->required();
  auto* check = app.add_subcommand("check", "check a discrete structure against T_dense");
  check->add_option("discrete", in1)->required();
  check->add_option("--condition", conditions, "closed condition to add as R_{phi<=0} (repeatable)")
      ->allow_extra_args(false);
  auto* rt = app.add_subcommand("roundtrip", "decode(encode(M)) = M and encode(decode(D)) = D");
  rt->add_option("structure", in1)->required();
  fragment_flags(rt, o);
  auto* ax = app.add_subcommand("axioms", "generate axiom instances and print counts");
  ax->add_option("--structure", structure, "structure supplying signature and universe");
  ax->add_option("--elements", elements, "universe size when no structure is given");
  ax->add_flag("--list", list, "print every instance");
  fragment_flags(ax, o);
  auto* ty = app.add_subcommand("type", "quantifier-free types in a discrete structure");
  ty->add_option("discrete", in1)->required();
  ty->add_option("--tuple", tuples, "comma-separated element names (repeatable)")->allow_extra_args(false);
  ty->add_option("--params", params, "comma-separated parameter elements");
  ty->add_option("--infinitesimal", infinitesimal, "check the infinitesimal type up to N0");
  auto* seq = app.add_subcommand("seqtype", "build and verify a sequence type");
  seq->add_option("structure", in1)->required();
  seq->add_option("type", in2)->required();
  auto* corpus = app.add_subcommand("corpus", "generate a structure or level family");
  corpus->add_option("--kind", kind, "random | pra | dyadic");
  corpus->add_option("--size", size, "universe size (random)");
  corpus->add_option("--unary", shape.unary_rel, "unary relations (random)");
  corpus->add_option("--binary", shape.binary_rel, "binary relations (random)");
  corpus->add_option("--functions", shape.unary_fun, "unary functions (random)");
  corpus->add_option("--weights", weights, "comma-separated atom weights (pra)");
  corpus->add_option("--levels", levels, "top level K (dyadic)");
  corpus->add_option("--relation", relation, "id | flip | half | tent (dyadic)");
  auto* elem = app.add_subcommand("elem", "fragment elementarity against the encoded substructure relation");
  elem->add_option("small", in1)->required();
  elem->add_option("large", in2)->required();
  fragment_flags(elem, o);
  auto* iness = app.add_subcommand("inessential", "is B an inessential extension of A");
  iness->add_option("A", in1)->required();
  iness->add_option("B", in2)->required();
  auto* comp = app.add_subcommand("completable", "check a level family for completability");
  comp->add_option("family", in1)->required();

  for (auto* sub : app.get_subcommands({})) shared_flags(sub, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  for (auto* sub : app.get_subcommands({})) {
    if (!sub->parsed()) continue;
    o.grid_set = sub->count("--grid") > 0;
    o.omega_set = sub->count("--omega") > 0;
    o.depth_set = sub->count("--depth") > 0;
  }

  try {
    if (*validate) return cmd_validate(in1, o);
    if (*enc) return cmd_encode(in1, o);
    if (*dec) return cmd_decode(in1, o);
    if (*check) return cmd_check(in1, conditions, o);
    if (*rt) return cmd_roundtrip(in1, o);
    if (*ax) return cmd_axioms(structure, elements, list, o);
    if (*ty) return cmd_type(in1, tuples, params, infinitesimal, o);
    if (*seq) return cmd_seqtype(in1, in2, o);
    if (*corpus) return cmd_corpus(kind, size, shape, weights, levels, relation, o);
    if (*elem) return cmd_elem(in1, in2, o);
    if (*iness) return cmd_inessential(in1, in2, o);
    if (*comp) return cmd_completable(in1, o);
  } catch (const ValidationError& e) {
    std::cout << json{{"pass", false}, {"error", e.what()}, {"violations", violations_json(e.violations)}}.dump()
              << '\n';
    return 1;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const NotNicelyDense& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
