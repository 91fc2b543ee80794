#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cohft/raction.hpp"

namespace cohft {

class MissingTableEntry : public Error {
 public:
  explicit MissingTableEntry(const std::string& key) : Error("missing X table entry " + key) {}
};

/// (X-basis index, psi power) at one marked point.
using XInsert = std::pair<int, int>;

struct TableCaps {
  int gMax = 2;
  int nMax = 8;
  int degreeMax = 12;
};

/// Integrals  int Omega^X_{g,n}(e_{x_1}, ..., e_{x_n}) prod psi_j^{d_j} prod kappa_b  over the
/// (g, n) space. Keys are stored sorted; absent keys within caps are 0.
class XCorrelatorTable {
 public:
  using Caps = TableCaps;
  using Key = std::tuple<int, std::vector<XInsert>, std::vector<int>>;
  using Generator = std::function<Scalar(int, const std::vector<XInsert>&, const std::vector<int>&)>;

  std::string label;
  int dim = 0;
  Matrix pairing;
  Vec unit;
  Caps caps;

  /// Throws MissingTableEntry outside caps.
  Scalar lookup(int g, std::vector<XInsert> inserts, std::vector<int> kappa) const;
  void set(int g, std::vector<XInsert> inserts, std::vector<int> kappa, const Scalar& value);
  /// Explicit entries (empty for generated tables).
  const std::map<Key, Scalar>& entries() const { return entries_; }
  bool generated() const { return static_cast<bool>(generator_); }
  /// Keys that were set more than once with different values.
  const std::vector<Key>& conflicts() const { return conflicts_; }

  static std::string key_string(const Key& key);

  /// Rank-1 table of point integrals.
  static XCorrelatorTable point(const Caps& caps = {});
  /// Semisimple TFT tensored with point integrals; npoints(n) is the N-points case.
  static XCorrelatorTable tft(const FrobeniusData& data, const Caps& caps = {});
  static XCorrelatorTable npoints(int n, const std::vector<Scalar>& norms = {}, const Caps& caps = {});
  static XCorrelatorTable from_generator(std::string label, const Matrix& pairing, const Vec& unit, const Caps& caps,
                                         Generator gen);

 private:
  std::map<Key, Scalar> entries_;
  std::vector<Key> conflicts_;
  Generator generator_;
  struct Memo {
    std::mutex mutex;
    std::map<Key, Scalar> values;
  };
  std::shared_ptr<Memo> memo_;
};

/// Symmetry, unit pairing on (0,3), string and dilaton on kappa-free entries within caps.
ValidationReport validate_table(const XCorrelatorTable& table);

struct XDecorations {
  std::vector<int> halfEdgePsi;           // per half-edge of the graph
  std::vector<KappaPoly> vertexKappa;     // per vertex; a single monomial with coefficient 1 is the plain case
  std::vector<Vec> legVectors;            // X-vector per marking 1..n
};

/// Contracts the table over the graph with the X pairing bivector on each edge.
Scalar x_contraction(const XCorrelatorTable& table, const StableGraph& graph, const XDecorations& decorations);

struct ProductInsert {
  Vec vector;  // X (x) Y, index x * dimY + y
  int psi = 0;
};

struct ProductSpec {
  const XCorrelatorTable* xTable = nullptr;
  IdempotentDecomposition yDec;
  RMatrix yR;
  int genus = 0;
  std::vector<ProductInsert> inserts;
};

/// Correlator of Omega^X (x) (R.omega^Y).
Scalar product_correlator(const ProductSpec& spec, const RactionOptions& options = {});

/// Pure tensor x (x) y in the index convention of ProductInsert.
Vec tensor_vector(const Vec& x, const Vec& y);

}  // namespace cohft
