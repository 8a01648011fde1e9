#include "amalia/afs.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace amalia {

// DFS renumbering by first visit, children in feature order; arcs are kept
// sorted by feature in AfsNode so the numbering is canonical.
static void canonical_core(const std::vector<AfsNode>& nodes, const std::vector<int>& roots,
                           std::vector<AfsNode>& out_nodes, std::vector<int>& out_roots) {
  std::vector<int> renum(nodes.size(), -1);
  int next = 0;
  for (int r : roots) {
    if (renum[r] >= 0) continue;
    renum[r] = next++;
    std::vector<std::pair<int, size_t>> work;
    work.emplace_back(r, 0);
    while (!work.empty()) {
      auto& [n, i] = work.back();
      if (i < nodes[n].arcs.size()) {
        int child = nodes[n].arcs[i].second;
        ++i;
        if (renum[child] < 0) {
          renum[child] = next++;
          work.emplace_back(child, 0);
        }
      } else {
        work.pop_back();
      }
    }
  }
  out_nodes.assign(next, AfsNode{});
  for (size_t old = 0; old < nodes.size(); ++old) {
    if (renum[old] < 0) continue;
    AfsNode nn;
    nn.type = nodes[old].type;
    for (auto [f, tgt] : nodes[old].arcs) nn.arcs.emplace_back(f, renum[tgt]);
    out_nodes[renum[old]] = std::move(nn);
  }
  out_roots.clear();
  for (int r : roots) out_roots.push_back(renum[r]);
}

Afs canonical_afs(const std::vector<AfsNode>& nodes, int root) {
  Afs a;
  std::vector<int> roots{root}, out_roots;
  canonical_core(nodes, roots, a.nodes, out_roots);
  a.root = out_roots[0];
  return a;
}

Amrs canonical_amrs(const std::vector<AfsNode>& nodes, const std::vector<int>& roots) {
  Amrs m;
  canonical_core(nodes, roots, m.nodes, m.roots);
  return m;
}

Afs single_node_afs(TypeId t) {
  Afs a;
  a.nodes.push_back(AfsNode{t, {}});
  a.root = 0;
  return a;
}

// --- subsumption ---

static bool preceq_core(const TypeHierarchy& h, const std::vector<AfsNode>& an,
                        const std::vector<int>& aroots, const std::vector<AfsNode>& bn,
                        const std::vector<int>& broots) {
  if (aroots.size() != broots.size()) return false;
  std::vector<int> image(an.size(), -1);
  std::deque<std::pair<int, int>> work;
  for (size_t i = 0; i < aroots.size(); ++i) work.emplace_back(aroots[i], broots[i]);
  while (!work.empty()) {
    auto [a, b] = work.front();
    work.pop_front();
    if (image[a] >= 0) {
      if (image[a] != b) return false;  // reentrancy of a not present in b
      continue;
    }
    image[a] = b;
    if (!h.subsumes(an[a].type, bn[b].type)) return false;
    for (auto [f, child] : an[a].arcs) {
      int bchild = -1;
      for (auto [bf, bc] : bn[b].arcs)
        if (bf == f) { bchild = bc; break; }
      if (bchild < 0) return false;  // path of a missing in b
      work.emplace_back(child, bchild);
    }
  }
  return true;
}

bool preceq(const TypeHierarchy& h, const Afs& a, const Afs& b) {
  return preceq_core(h, a.nodes, {a.root}, b.nodes, {b.root});
}

bool preceq(const TypeHierarchy& h, const Amrs& a, const Amrs& b) {
  return preceq_core(h, a.nodes, a.roots, b.nodes, b.roots);
}

// --- merger ---

int Merger::load(const std::vector<AfsNode>& nodes) {
  int base = static_cast<int>(nodes_.size());
  for (const auto& n : nodes) {
    WNode w;
    w.type = n.type;
    for (auto [f, t] : n.arcs) w.arcs.emplace(f, t + base);
    nodes_.push_back(std::move(w));
    parent_.push_back(static_cast<int>(parent_.size()));
  }
  return base;
}

int Merger::find(int a) const {
  while (parent_[a] != a) {
    parent_[a] = parent_[parent_[a]];
    a = parent_[a];
  }
  return a;
}

void Merger::merge(int a, int b) { pending_.emplace_back(a, b); }

bool Merger::close(const TypeHierarchy& h) {
  while (!pending_.empty()) {
    auto [a, b] = pending_.back();
    pending_.pop_back();
    a = find(a);
    b = find(b);
    if (a == b) continue;
    if (nodes_[a].arcs.size() < nodes_[b].arcs.size()) std::swap(a, b);
    TypeId j = h.lub(nodes_[a].type, nodes_[b].type);
    if (j == INCONSISTENT) return false;
    parent_[b] = a;
    nodes_[a].type = j;
    for (auto [f, tgt] : nodes_[b].arcs) {
      auto [it, fresh] = nodes_[a].arcs.emplace(f, tgt);
      if (!fresh) pending_.emplace_back(it->second, tgt);  // arc congruence
    }
    nodes_[b].arcs.clear();
  }
  return true;
}

static void merger_extract(const std::vector<int>& roots,
                           const std::function<int(int)>& find,
                           const std::vector<std::pair<TypeId, const std::map<FeatureId, int>*>>& reps,
                           std::vector<AfsNode>& out_nodes, std::vector<int>& out_roots) {
  // Build a plain graph over representatives, then canonicalize.
  std::vector<AfsNode> tmp(reps.size());
  for (size_t i = 0; i < reps.size(); ++i) {
    tmp[i].type = reps[i].first;
    for (auto [f, tgt] : *reps[i].second) tmp[i].arcs.emplace_back(f, find(tgt));
    std::sort(tmp[i].arcs.begin(), tmp[i].arcs.end());
  }
  std::vector<int> rroots;
  for (int r : roots) rroots.push_back(find(r));
  canonical_core(tmp, rroots, out_nodes, out_roots);
}

Afs Merger::extract_afs(int root) const {
  std::vector<std::pair<TypeId, const std::map<FeatureId, int>*>> reps;
  for (const auto& n : nodes_) reps.emplace_back(n.type, &n.arcs);
  // representative's map sits at the class root; follow find() for targets
  std::vector<AfsNode> out_nodes;
  std::vector<int> out_roots;
  merger_extract({root}, [this](int x) { return find(x); }, reps, out_nodes, out_roots);
  Afs a;
  a.nodes = std::move(out_nodes);
  a.root = out_roots[0];
  return a;
}

Amrs Merger::extract_amrs(const std::vector<int>& roots) const {
  std::vector<std::pair<TypeId, const std::map<FeatureId, int>*>> reps;
  for (const auto& n : nodes_) reps.emplace_back(n.type, &n.arcs);
  Amrs m;
  merger_extract(roots, [this](int x) { return find(x); }, reps, m.nodes, m.roots);
  return m;
}

// --- unification ---

std::optional<Afs> unify_afs(const TypeHierarchy& h, const Afs& a, const Afs& b) {
  Merger m;
  int abase = m.load(a.nodes);
  int bbase = m.load(b.nodes);
  m.merge(a.root + abase, b.root + bbase);
  if (!m.close(h)) return std::nullopt;
  return m.extract_afs(a.root + abase);
}

std::optional<Amrs> unify_in_context(const TypeHierarchy& h, const Amrs& a,
                                     const std::vector<int>& js, const Amrs& b) {
  Merger m;
  int abase = m.load(a.nodes);
  int bbase = m.load(b.nodes);
  for (int j : js) {
    if (j < 1 || j > a.len() || j > b.len())
      throw std::out_of_range("unify_in_context: index out of range");
    m.merge(a.roots[j - 1] + abase, b.roots[j - 1] + bbase);
  }
  if (!m.close(h)) return std::nullopt;
  std::vector<int> roots;
  for (int r : a.roots) roots.push_back(r + abase);
  return m.extract_amrs(roots);
}

std::optional<Amrs> unify_in_context(const TypeHierarchy& h, const Amrs& a, int j,
                                     const Afs& b) {
  Merger m;
  int abase = m.load(a.nodes);
  int bbase = m.load(b.nodes);
  if (j < 1 || j > a.len()) throw std::out_of_range("unify_in_context: index out of range");
  m.merge(a.roots[j - 1] + abase, b.root + bbase);
  if (!m.close(h)) return std::nullopt;
  std::vector<int> roots;
  for (int r : a.roots) roots.push_back(r + abase);
  return m.extract_amrs(roots);
}

// --- structure arithmetic ---

Amrs substructure(const Amrs& a, int j, int k) {
  if (j == k + 1) return lambda_amrs();
  if (j < 1 || k > a.len() || j > k) throw std::out_of_range("substructure: bad index range");
  std::vector<int> roots(a.roots.begin() + (j - 1), a.roots.begin() + k);
  return canonical_amrs(a.nodes, roots);
}

Afs afs_at(const Amrs& a, int i) {
  if (i < 1 || i > a.len()) throw std::out_of_range("afs_at: index out of range");
  return canonical_afs(a.nodes, a.roots[i - 1]);
}

Amrs as_amrs(const Afs& a) {
  Amrs m;
  m.nodes = a.nodes;
  m.roots = {a.root};
  return m;
}

Amrs concat(const Amrs& a, const Amrs& b) {
  Amrs c;
  c.nodes = a.nodes;
  int base = static_cast<int>(a.nodes.size());
  for (const auto& n : b.nodes) {
    AfsNode nn;
    nn.type = n.type;
    for (auto [f, t] : n.arcs) nn.arcs.emplace_back(f, t + base);
    c.nodes.push_back(std::move(nn));
  }
  c.roots = a.roots;
  for (int r : b.roots) c.roots.push_back(r + base);
  return canonical_amrs(c.nodes, c.roots);
}

// --- trim ---

static void trim_core(const TypeHierarchy& h, std::vector<AfsNode>& nodes,
                      const std::vector<int>& roots) {
  bool changed = true;
  while (changed) {
    changed = false;
    // distinct (parent, feature) in-edges per node
    std::vector<int> indeg(nodes.size(), 0);
    std::vector<std::pair<int, FeatureId>> only_in(nodes.size(), {-1, FeatureId{}});
    for (size_t p = 0; p < nodes.size(); ++p)
      for (auto [f, t] : nodes[p].arcs) {
        indeg[t]++;
        only_in[t] = {static_cast<int>(p), f};
      }
    std::vector<char> is_root(nodes.size(), 0);
    for (int r : roots) is_root[r] = 1;
    for (size_t nid = 0; nid < nodes.size(); ++nid) {
      if (is_root[nid] || indeg[nid] != 1 || !nodes[nid].arcs.empty()) continue;
      auto [p, f] = only_in[nid];
      if (nodes[nid].type == h.approp(f, nodes[p].type)) {
        auto& arcs = nodes[p].arcs;
        arcs.erase(std::find_if(arcs.begin(), arcs.end(),
                                [&](auto& a) { return a.first == f; }));
        changed = true;
      }
    }
  }
}

Afs trim(const TypeHierarchy& h, const Afs& a) {
  Afs t = a;
  trim_core(h, t.nodes, {t.root});
  return canonical_afs(t.nodes, t.root);
}

Amrs trim(const TypeHierarchy& h, const Amrs& a) {
  Amrs t = a;
  trim_core(h, t.nodes, t.roots);
  return canonical_amrs(t.nodes, t.roots);
}

// --- path views ---

static int follow(const std::vector<AfsNode>& nodes, int at, const Path& p) {
  for (FeatureId f : p) {
    int next = -1;
    for (auto [af, t] : nodes[at].arcs)
      if (af == f) { next = t; break; }
    if (next < 0) return -1;
    at = next;
  }
  return at;
}

int node_at(const Amrs& a, int i, const Path& p) {
  if (i < 0 || i >= a.len()) return -1;
  return follow(a.nodes, a.roots[i], p);
}

int node_at(const Afs& a, const Path& p) { return follow(a.nodes, a.root, p); }

std::vector<Path> enumerate_paths(const Afs& a, int max_len) {
  std::vector<Path> out;
  std::function<void(int, Path&)> rec = [&](int at, Path& p) {
    out.push_back(p);
    if (static_cast<int>(p.size()) >= max_len) return;
    for (auto [f, t] : a.nodes[at].arcs) {
      p.push_back(f);
      rec(t, p);
      p.pop_back();
    }
  };
  Path p;
  rec(a.root, p);
  std::sort(out.begin(), out.end());
  return out;
}

// --- pre-AFS normalization ---

void PreAfs::add_path(const Path& p, TypeId t) { paths_.emplace_back(p, t); }
void PreAfs::equate(const Path& p1, const Path& p2) { equates_.emplace_back(p1, p2); }

std::optional<Afs> PreAfs::normalize(const TypeHierarchy& h) const {
  // Trie over all mentioned paths (prefixes default to bot), then merge the
  // equated path ends; congruence closure realizes Cl and Eq, the eager type
  // joins realize Ty.
  std::vector<AfsNode> trie{AfsNode{BOTTOM, {}}};
  auto ensure = [&trie](const Path& p) -> int {
    int at = 0;
    for (FeatureId f : p) {
      int next = -1;
      for (auto [af, t] : trie[at].arcs)
        if (af == f) { next = t; break; }
      if (next < 0) {
        next = static_cast<int>(trie.size());
        trie.push_back(AfsNode{BOTTOM, {}});
        trie[at].arcs.emplace_back(f, next);
        std::sort(trie[at].arcs.begin(), trie[at].arcs.end());
      }
      at = next;
    }
    return at;
  };

  std::vector<std::pair<int, TypeId>> typed;
  for (const auto& [p, t] : paths_) typed.emplace_back(ensure(p), t);
  std::vector<std::pair<int, int>> eq;
  for (const auto& [p1, p2] : equates_) eq.emplace_back(ensure(p1), ensure(p2));

  Merger m;
  m.load(trie);
  // apply types by merging with singleton typed nodes
  for (auto [node, t] : typed) {
    std::vector<AfsNode> one{AfsNode{t, {}}};
    int base = m.load(one);
    m.merge(node, base);
  }
  for (auto [a, b] : eq) m.merge(a, b);
  if (!m.close(h)) return std::nullopt;
  return m.extract_afs(0);
}

}  // namespace amalia
