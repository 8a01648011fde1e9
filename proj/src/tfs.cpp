#include "amalia/tfs.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>

namespace amalia {

static int arc_target(const TfsNode& n, FeatureId f) {
  for (auto [af, t] : n.arcs)
    if (af == f) return t;
  return -1;
}

int tfs_node_at(const Tfs& a, const Path& p) {
  int at = a.root;
  for (FeatureId f : p) {
    at = arc_target(a.nodes[at], f);
    if (at < 0) return -1;
  }
  return at;
}

int mrs_node_at(const Mrs& m, int i, const Path& p) {
  if (i < 1 || i > m.len()) return -1;
  int at = m.roots[i - 1];
  for (FeatureId f : p) {
    at = arc_target(m.nodes[at], f);
    if (at < 0) return -1;
  }
  return at;
}

static Tfs restrict_to(const std::vector<TfsNode>& nodes, int root) {
  std::vector<int> renum(nodes.size(), -1);
  std::vector<int> order;
  std::deque<int> work{root};
  while (!work.empty()) {
    int n = work.front();
    work.pop_front();
    if (renum[n] >= 0) continue;
    renum[n] = static_cast<int>(order.size());
    order.push_back(n);
    for (auto [f, t] : nodes[n].arcs) work.push_back(t);
  }
  Tfs out;
  out.root = 0;
  for (int old : order) {
    TfsNode nn;
    nn.type = nodes[old].type;
    for (auto [f, t] : nodes[old].arcs) nn.arcs.emplace_back(f, renum[t]);
    out.nodes.push_back(std::move(nn));
  }
  return out;
}

std::optional<Tfs> val(const Tfs& a, const Path& p) {
  int at = tfs_node_at(a, p);
  if (at < 0) return std::nullopt;
  return restrict_to(a.nodes, at);
}

std::optional<std::vector<int>> subsumes(const TypeHierarchy& h, const Tfs& a, const Tfs& b) {
  // The morphism is unique when it exists (every node reachable): build it
  // arc-by-arc from the root pair and check consistency.
  std::vector<int> image(a.nodes.size(), -1);
  std::deque<std::pair<int, int>> work{{a.root, b.root}};
  while (!work.empty()) {
    auto [x, y] = work.front();
    work.pop_front();
    if (image[x] >= 0) {
      if (image[x] != y) return std::nullopt;
      continue;
    }
    image[x] = y;
    if (!h.subsumes(a.nodes[x].type, b.nodes[y].type)) return std::nullopt;
    for (auto [f, child] : a.nodes[x].arcs) {
      int bchild = arc_target(b.nodes[y], f);
      if (bchild < 0) return std::nullopt;
      work.emplace_back(child, bchild);
    }
  }
  return image;
}

bool alphabetic_variants(const TypeHierarchy& h, const Tfs& a, const Tfs& b) {
  return subsumes(h, a, b).has_value() && subsumes(h, b, a).has_value();
}

bool is_cyclic(const Tfs& a) {
  enum { White, Gray, Black };
  std::vector<int> color(a.nodes.size(), White);
  std::function<bool(int)> dfs = [&](int n) -> bool {
    color[n] = Gray;
    for (auto [f, t] : a.nodes[n].arcs) {
      if (color[t] == Gray) return true;
      if (color[t] == White && dfs(t)) return true;
    }
    color[n] = Black;
    return false;
  };
  return dfs(a.root);
}

long long rank(const TypeHierarchy& h, const Tfs& a) {
  if (is_cyclic(a)) throw CyclicStructureError("rank is defined for acyclic structures only");
  // in_paths[n]: number of distinct paths from the root ending at n.
  // Topological order, then |Pi| = sum(in_paths), Theta = sum(in_paths * depth).
  size_t n = a.nodes.size();
  std::vector<int> indeg(n, 0);
  for (const auto& node : a.nodes)
    for (auto [f, t] : node.arcs) indeg[t]++;
  std::vector<long long> in_paths(n, 0);
  in_paths[a.root] = 1;
  std::deque<int> q;
  std::vector<int> remaining = indeg;
  // nodes unreachable from root don't exist in a well-formed Tfs
  for (size_t i = 0; i < n; ++i)
    if (remaining[i] == 0) q.push_back(static_cast<int>(i));
  std::vector<int> topo;
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    topo.push_back(x);
    for (auto [f, t] : a.nodes[x].arcs)
      if (--remaining[t] == 0) q.push_back(t);
  }
  for (int x : topo)
    for (auto [f, t] : a.nodes[x].arcs) in_paths[t] += in_paths[x];
  long long paths = 0, theta = 0;
  for (size_t i = 0; i < n; ++i) {
    paths += in_paths[i];
    theta += in_paths[i] * h.depth(a.nodes[i].type);
  }
  return (paths - static_cast<long long>(n)) + theta;
}

Afs abs(const Tfs& a) {
  if (is_cyclic(a))
    throw CyclicStructureError("abstraction of cyclic structures is not supported");
  std::vector<AfsNode> nodes(a.nodes.size());
  for (size_t i = 0; i < a.nodes.size(); ++i) {
    nodes[i].type = a.nodes[i].type;
    for (auto [f, t] : a.nodes[i].arcs) nodes[i].arcs.emplace_back(f, t);
  }
  return canonical_afs(nodes, a.root);
}

Amrs abs_mrs(const Mrs& m) {
  for (int i = 1; i <= m.len(); ++i) {
    Tfs p = project(m, i);
    if (is_cyclic(p))
      throw CyclicStructureError("abstraction of cyclic structures is not supported");
  }
  std::vector<AfsNode> nodes(m.nodes.size());
  for (size_t i = 0; i < m.nodes.size(); ++i) {
    nodes[i].type = m.nodes[i].type;
    for (auto [f, t] : m.nodes[i].arcs) nodes[i].arcs.emplace_back(f, t);
  }
  return canonical_amrs(nodes, m.roots);
}

Tfs conc(const Afs& f) {
  Tfs out;
  out.nodes.resize(f.nodes.size());
  for (size_t i = 0; i < f.nodes.size(); ++i) {
    out.nodes[i].type = f.nodes[i].type;
    for (auto [ft, t] : f.nodes[i].arcs) out.nodes[i].arcs.emplace_back(ft, t);
  }
  out.root = f.root;
  return out;
}

Mrs conc_amrs(const Amrs& m) {
  Mrs out;
  out.nodes.resize(m.nodes.size());
  for (size_t i = 0; i < m.nodes.size(); ++i) {
    out.nodes[i].type = m.nodes[i].type;
    for (auto [ft, t] : m.nodes[i].arcs) out.nodes[i].arcs.emplace_back(ft, t);
  }
  out.roots = m.roots;
  return out;
}

Tfs project(const Mrs& m, int i) {
  if (i < 1 || i > m.len()) throw std::out_of_range("project: index out of range");
  return restrict_to(m.nodes, m.roots[i - 1]);
}

bool well_typed(const TypeHierarchy& h, const Tfs& a) {
  for (const auto& n : a.nodes) {
    if (n.type == INCONSISTENT) return false;
    for (auto [f, t] : n.arcs) {
      TypeId r = h.approp(f, n.type);
      if (!r.valid()) return false;
      if (!h.subsumes(r, a.nodes[t].type)) return false;
    }
  }
  return true;
}

bool totally_well_typed(const TypeHierarchy& h, const Tfs& a) {
  if (!well_typed(h, a)) return false;
  for (const auto& n : a.nodes)
    if (n.arcs.size() != h.features_of(n.type).size()) return false;
  return true;
}

// --- terms ---

namespace {

struct TermGraphBuilder {
  const TypeHierarchy& h;
  std::vector<TfsNode> nodes;
  std::map<int, int> tag_node;

  explicit TermGraphBuilder(const TypeHierarchy& hier) : h(hier) {}

  int build(const Term& t) {
    if (t.tag_only) {
      auto it = tag_node.find(t.tag);
      if (it == tag_node.end())
        throw TermSyntaxError("independent tag without a dependent occurrence");
      return it->second;
    }
    int id = static_cast<int>(nodes.size());
    nodes.push_back(TfsNode{t.type, {}});
    if (t.tag != 0) tag_node[t.tag] = id;
    const auto& slots = h.features_of(t.type);
    for (size_t i = 0; i < t.args.size(); ++i) {
      int child = build(t.args[i]);
      nodes[id].arcs.emplace_back(slots[i].feature, child);
    }
    std::sort(nodes[id].arcs.begin(), nodes[id].arcs.end());
    return id;
  }
};

struct TermWriter {
  const TypeHierarchy& h;
  const std::vector<TfsNode>& nodes;
  std::vector<int> shared;    // nodes needing a tag (refcount > 1 or cycle)
  std::map<int, int> tags;    // node -> tag
  int next_tag = 1;

  Term write(int at, std::vector<char>& on_path) {
    auto it = tags.find(at);
    if (it != tags.end()) {
      Term t;
      t.tag = it->second;
      t.tag_only = true;
      return t;
    }
    Term t;
    t.type = nodes[at].type;
    if (shared[at]) {
      t.tag = next_tag++;
      tags[at] = t.tag;
    }
    on_path[at] = 1;
    // argument order follows the type's canonical feature order; arcs not
    // present (lazy values) are skipped, making the term partial there
    const auto& slots = h.features_of(t.type);
    if (!nodes[at].arcs.empty()) {
      for (const auto& slot : slots) {
        int child = arc_target(nodes[at], slot.feature);
        if (child < 0) {
          Term most_general;
          most_general.type = slot.restriction;
          most_general.partial = true;
          t.args.push_back(std::move(most_general));
        } else {
          t.args.push_back(write(child, on_path));
        }
      }
    } else {
      t.partial = true;
    }
    on_path[at] = 0;
    return t;
  }
};

}  // namespace

Tfs tfs_from_term(const Term& t, const TypeHierarchy& h) {
  TermGraphBuilder b(h);
  int root = b.build(t);
  Tfs out;
  out.nodes = std::move(b.nodes);
  out.root = root;
  return out;
}

Mrs mrs_from_terms(const std::vector<Term>& ts, const TypeHierarchy& h) {
  TermGraphBuilder b(h);
  std::vector<int> roots;
  for (const auto& t : ts) roots.push_back(b.build(t));
  Mrs out;
  out.nodes = std::move(b.nodes);
  out.roots = std::move(roots);
  return out;
}

static void count_refs(const std::vector<TfsNode>& nodes, int root, std::vector<int>& refs,
                       std::vector<char>& visiting, std::vector<int>& shared) {
  if (refs[root]++ > 0) {
    shared[root] = 1;
    return;
  }
  visiting[root] = 1;
  for (auto [f, t] : nodes[root].arcs) {
    if (visiting[t]) shared[t] = 1;  // back edge: cycle needs a tag
    count_refs(nodes, t, refs, visiting, shared);
  }
  visiting[root] = 0;
}

Term term_from_tfs(const Tfs& a, const TypeHierarchy& h) {
  std::vector<int> refs(a.nodes.size(), 0), shared(a.nodes.size(), 0);
  std::vector<char> visiting(a.nodes.size(), 0);
  count_refs(a.nodes, a.root, refs, visiting, shared);
  TermWriter w{h, a.nodes, shared, {}, 1};
  std::vector<char> on_path(a.nodes.size(), 0);
  return w.write(a.root, on_path);
}

std::vector<Term> terms_from_mrs(const Mrs& m, const TypeHierarchy& h) {
  std::vector<int> refs(m.nodes.size(), 0), shared(m.nodes.size(), 0);
  std::vector<char> visiting(m.nodes.size(), 0);
  for (int r : m.roots) count_refs(m.nodes, r, refs, visiting, shared);
  TermWriter w{h, m.nodes, shared, {}, 1};
  std::vector<char> on_path(m.nodes.size(), 0);
  std::vector<Term> out;
  for (int r : m.roots) out.push_back(w.write(r, on_path));
  return out;
}

std::string print_tfs(const Tfs& a, const TypeHierarchy& h) {
  return print_term(term_from_tfs(a, h), h);
}

}  // namespace amalia
