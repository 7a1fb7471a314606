#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cdense/fragment_index.hpp"
#include "cdense/semantics.hpp"

namespace cdense {

enum class Dir : std::uint8_t { GEQ = 0, LEQ = 1 };
inline const char* dir_name(Dir d) { return d == Dir::GEQ ? "GEQ" : "LEQ"; }

// Kleene truth values, ordered so that AND is min and OR is max.
enum class Tri : std::uint8_t { False = 0, Unknown = 1, True = 2 };
inline Tri tri(bool b) { return b ? Tri::True : Tri::False; }

struct DiscreteSignatureFragment {
  std::shared_ptr<const FragmentIndex> index;

  const Signature& sig() const { return index->sig(); }
  const Fragment& fragment() const { return index->fragment(); }
  int grid_L() const { return index->grid_L(); }

  struct Symbol {
    int formula;
    int grid;  // threshold grid/L
    Dir dir;
  };
  std::size_t symbol_count() const;
  /// Ordered by formula, then threshold, then GEQ before LEQ.
  std::vector<Symbol> symbols() const;
};

/// Throws InputError when the fragment has no d(x, y) atom.
DiscreteSignatureFragment build_signature_fragment(const Signature& sig, const Fragment& frag);

struct Carrier {
  std::vector<std::string> universe;
  std::vector<std::vector<int>> func_tables;
  std::size_t size() const { return universe.size(); }
  int element_index(const std::string& name) const;
  bool operator==(const Carrier&) const = default;
};

// Exact values of every fragment formula on every tuple, with floor/ceil of v*L.
struct ValueTables {
  int grid_L = 2;
  std::size_t n = 0;
  std::vector<std::vector<Rational>> values;
  std::vector<std::vector<int>> lo, hi;

  const Rational& value(int f, std::size_t t) const { return values[f][t]; }
  bool geq(int f, std::size_t t, int i) const { return i <= lo[f][t]; }
  bool leq(int f, std::size_t t, int i) const { return i >= hi[f][t]; }
  bool operator==(const ValueTables&) const = default;
};

// Threshold bits: per formula, index ((t * 2 + dir) * (L + 1) + i).
struct TruthTables {
  int grid_L = 2;
  std::size_t n = 0;
  std::vector<std::vector<std::uint8_t>> bits;

  std::size_t offset(std::size_t t, Dir d, int i) const {
    return (t * 2 + static_cast<std::size_t>(d)) * static_cast<std::size_t>(grid_L + 1) + static_cast<std::size_t>(i);
  }
  bool get(int f, std::size_t t, Dir d, int i) const { return bits[f][offset(t, d, i)] != 0; }
  void set(int f, std::size_t t, Dir d, int i, bool v) { bits[f][offset(t, d, i)] = v ? 1 : 0; }
  bool operator==(const TruthTables&) const = default;
};

// Intensional structures carry an oracle; extensional ones a truth table.
struct DiscreteStructure {
  DiscreteSignatureFragment sigf;
  Carrier carrier;
  std::shared_ptr<const ValueTables> oracle;
  std::shared_ptr<const TruthTables> truth;

  bool intensional() const { return oracle != nullptr; }
  std::size_t size() const { return carrier.size(); }
  int grid_L() const { return sigf.grid_L(); }
  const FragmentIndex& index() const { return *sigf.index; }
};

/// Uniform access to threshold relations of either payload.
class ThresholdView {
 public:
  explicit ThresholdView(const DiscreteStructure& D) : D_(D), L_(D.grid_L()) {}

  bool bit(int f, std::size_t t, Dir d, int i) const {
    if (D_.oracle) return d == Dir::GEQ ? D_.oracle->geq(f, t, i) : D_.oracle->leq(f, t, i);
    return D_.truth->get(f, t, d, i);
  }
  /// Literal at an arbitrary threshold in [0,1] judged from the grid
  /// neighbours lo = floor(tL), hi = ceil(tL).
  Tri refine(int f, std::size_t t, Dir d, int lo, int hi) const;
  /// Exact value when known: the oracle, or a grid point pinned by both directions.
  std::optional<Rational> exact_value(int f, std::size_t t) const;
  /// R_{f dir thr}(t) for any rational thr; uses exact_value when available.
  Tri query(int f, std::size_t t, Dir d, const Rational& thr) const;
  /// Largest grid index with GEQ true, smallest with LEQ true (-1 / L+1 when empty).
  int geq_sup(int f, std::size_t t) const;
  int leq_inf(int f, std::size_t t) const;
  int grid_L() const { return L_; }

 private:
  const DiscreteStructure& D_;
  int L_;
};

bool check_nicely_dense(const ContinuousStructure& M, const std::vector<int>& A);

class NotNicelyDense : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Intensional encoding on A (for finite M, A must be the whole universe).
DiscreteStructure encode(const ContinuousStructure& M, const std::vector<int>& A, const DiscreteSignatureFragment& sigf);
DiscreteStructure encode(const ContinuousStructure& M, const DiscreteSignatureFragment& sigf);
/// Extensional copy; identity on extensional input.
DiscreteStructure materialize(const DiscreteStructure& D);

/// Formula/tuples whose value is off the grid (used by --strict-grid).
std::vector<std::string> off_grid_values(const DiscreteStructure& D, std::size_t limit = 5);

// ---------------------------------------------------------------- instances

enum class Scheme : std::uint8_t {
  S1a, S1b, S1c, S1d, S1e, S1f, S1g, S1h,
  S2a, S2b, S2c, S2d, S2e, S2f, S2g, S2h, S2i, S2j, S2k,
  S3a, S3b, S3c,
  S4a, S4b,
  TStar,
  Count
};
constexpr std::size_t kSchemeCount = static_cast<std::size_t>(Scheme::Count);
const char* scheme_name(Scheme s);
/// Schemes decided from the oracle's exact value on intensional input.
bool oracle_scheme(Scheme s);

enum class Op : std::uint8_t { True, False, Lit, Not, And, Or, Implies, Iff, Limit };

// Flat instance body node. Lit: a = formula, b = tuple, c = threshold code.
// And/Or: a = offset into kids, b = count. Not: a. Implies/Iff: a, b.
// Limit: a = truncated body, b = exact body (decided by the oracle).
struct Node {
  Op op = Op::True;
  Dir dir = Dir::GEQ;
  std::uint32_t a = 0, b = 0, c = 0;
};

struct AxiomInstance {
  Scheme scheme;
  bool truncated;
  std::uint32_t root;
};

// Threshold codes: 0..2L are positions p (value p/2L; odd p is the open
// cell between grid points); larger codes index `extra`.
struct InstanceSet {
  int grid_L = 2;
  int omega_N = 2;
  std::vector<Node> nodes;
  std::vector<std::uint32_t> kids;
  std::vector<Rational> extra;
  std::vector<std::pair<int, int>> extra_grid;  // floor/ceil of extra * L
  std::vector<AxiomInstance> items;
  std::array<std::uint64_t, kSchemeCount> skipped{};

  std::array<std::uint64_t, kSchemeCount> counts() const;
};

InstanceSet generate_tdense(const DiscreteSignatureFragment& sigf, const Carrier& carrier, int omega_N);
/// T_dense plus R_{phi<=0} for every condition; throws InputError when a
/// condition formula is outside the fragment.
InstanceSet generate_tstar(const std::vector<Condition>& T, const DiscreteSignatureFragment& sigf,
                           const Carrier& carrier, int omega_N);
/// Relativized universal axioms: sup x1..xk. phi = 0 becomes R_{phi<=0} on every tuple.
void add_relativized(InstanceSet& set, const std::vector<Condition>& T, const DiscreteSignatureFragment& sigf,
                     const Carrier& carrier);

std::string render_instance(const InstanceSet& set, std::uint32_t root, const FragmentIndex& idx,
                            const Carrier& carrier);

struct SchemeVerdict {
  Scheme scheme = Scheme::S1a;
  std::uint64_t pass = 0, fail = 0, skip = 0, undetermined = 0;
  std::string mode;  // exact | truncated | oracle-exact
  std::optional<std::string> witness;
};

struct VerdictReport {
  std::vector<SchemeVerdict> schemes;
  bool ok() const;
  std::uint64_t failures() const;
  const SchemeVerdict& of(Scheme s) const { return schemes[static_cast<std::size_t>(s)]; }
};

VerdictReport check_tdense(const DiscreteStructure& D, const InstanceSet& set);
/// Per-instance verdicts.
std::vector<Tri> evaluate_instances(const DiscreteStructure& D, const InstanceSet& set);

}  // namespace cdense
