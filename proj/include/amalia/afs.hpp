#pragma once

#include <map>
#include <optional>
#include <vector>

#include "amalia/types.hpp"

namespace amalia {

// Abstract feature structures: the node-free (Pi, Theta, ~=) triples of the
// algebra, stored as their canonical quotient graph. Each node is one
// reentrancy class; arcs are the path extensions. Canonical form numbers
// nodes by first visit in a DFS that follows arcs in feature-ordinal order,
// so structural equality coincides with equality of the triples.
struct AfsNode {
  TypeId type;
  std::vector<std::pair<FeatureId, int>> arcs;  // sorted by feature

  bool operator==(const AfsNode&) const = default;
  auto operator<=>(const AfsNode&) const = default;
};

struct Afs {
  std::vector<AfsNode> nodes;
  int root = 0;

  bool operator==(const Afs&) const = default;
  auto operator<=>(const Afs&) const = default;
};

// Abstract multi-rooted structures. Indices are 1..len; roots may coincide
// when all paths of two indices are shared.
struct Amrs {
  std::vector<AfsNode> nodes;
  std::vector<int> roots;

  int len() const { return static_cast<int>(roots.size()); }
  bool operator==(const Amrs&) const = default;
  auto operator<=>(const Amrs&) const = default;
};

inline Amrs lambda_amrs() { return Amrs{}; }

// Canonicalizes an arbitrary rooted graph (drops unreachable nodes, renumbers).
Afs canonical_afs(const std::vector<AfsNode>& nodes, int root);
Amrs canonical_amrs(const std::vector<AfsNode>& nodes, const std::vector<int>& roots);

Afs single_node_afs(TypeId t);

// Subsumption (more general precedes): Pi/~=/Theta componentwise inclusion,
// decided by the forced root-to-root simulation.
bool preceq(const TypeHierarchy& h, const Afs& a, const Afs& b);
bool preceq(const TypeHierarchy& h, const Amrs& a, const Amrs& b);

// Unification; nullopt is FAIL (some reentrancy class joins to top).
std::optional<Afs> unify_afs(const TypeHierarchy& h, const Afs& a, const Afs& b);

// Unification in context: specializes indices J of `a` against `b`.
// For the AMRS operand J must index both structures; the AFS overload
// requires |J| = 1. The result keeps len(a).
std::optional<Amrs> unify_in_context(const TypeHierarchy& h, const Amrs& a,
                                     const std::vector<int>& js, const Amrs& b);
std::optional<Amrs> unify_in_context(const TypeHierarchy& h, const Amrs& a, int j,
                                     const Afs& b);

// Sub-structure induced by indices j..k (1-based); j == k+1 yields lambda.
Amrs substructure(const Amrs& a, int j, int k);
Afs afs_at(const Amrs& a, int i);
Amrs as_amrs(const Afs& a);

Amrs concat(const Amrs& a, const Amrs& b);

// Removes appropriateness-forced most-general leaves (an unshared arc f whose
// target has no arcs and carries exactly Approp(f, source)). Two structures
// denote the same totally well-typed closure iff their trims are equal; this
// is the normal form the machine/oracle differential compares.
Afs trim(const TypeHierarchy& h, const Afs& a);
Amrs trim(const TypeHierarchy& h, const Amrs& a);

// --- path-level views (tests, printers) ---
using Path = std::vector<FeatureId>;
// Node reached by `p` from root `i` (0-based root index), or -1.
int node_at(const Amrs& a, int i, const Path& p);
int node_at(const Afs& a, const Path& p);
// All paths up to the given length, in lexicographic ordinal order.
std::vector<Path> enumerate_paths(const Afs& a, int max_len);

// Builder for pre-AFSs: raw typed paths plus reentrancy pairs, normalized by
// the closure operations (least fusion-closed extension, least equivalence
// extension, class-wise type join). nullopt when a class joins to top.
class PreAfs {
 public:
  void add_path(const Path& p, TypeId t);
  void equate(const Path& p1, const Path& p2);
  std::optional<Afs> normalize(const TypeHierarchy& h) const;

 private:
  std::vector<std::pair<Path, TypeId>> paths_;
  std::vector<std::pair<Path, Path>> equates_;
};

// Low-level congruence-closure merger shared by the unification operations
// and the derivation step. Nodes of several structures are loaded into one
// pool; requested merges are closed under arc congruence; types join eagerly.
class Merger {
 public:
  // Returns the base offset assigned to the loaded nodes.
  int load(const std::vector<AfsNode>& nodes);
  void merge(int a, int b);
  // Runs pending merges; false when some class type joins to INCONSISTENT.
  bool close(const TypeHierarchy& h);
  Afs extract_afs(int root) const;
  Amrs extract_amrs(const std::vector<int>& roots) const;

 private:
  int find(int a) const;
  struct WNode {
    TypeId type;
    std::map<FeatureId, int> arcs;
  };
  std::vector<WNode> nodes_;
  mutable std::vector<int> parent_;
  std::vector<std::pair<int, int>> pending_;
};

}  // namespace amalia
