#include "amalia/oracle.hpp"

#include <algorithm>

namespace amalia {

std::vector<Amrs> pre_terminals(const Grammar& g, const std::vector<std::string>& words,
                                int j, int k) {
  int n = static_cast<int>(words.size());
  if (j > k) return {lambda_amrs()};
  if (j < 1 || k > n) throw std::out_of_range("pre_terminals: span out of range");
  std::vector<Amrs> acc{lambda_amrs()};
  for (int i = j; i <= k; ++i) {
    auto it = g.lexicon.find(words[i - 1]);
    if (it == g.lexicon.end()) throw UnknownWordError(words[i - 1]);
    std::vector<Amrs> next;
    for (const Amrs& prefix : acc)
      for (const Afs& cat : it->second) next.push_back(concat(prefix, as_amrs(cat)));
    acc = std::move(next);
  }
  std::sort(acc.begin(), acc.end());
  acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
  return acc;
}

ItemSet tgw_step(const TypeHierarchy& h, const Grammar& g,
                 const std::vector<std::string>& words, const ItemSet& items) {
  int n = static_cast<int>(words.size());
  ItemSet out;

  // prediction: [i, lambda, i, Act] for every position
  for (int i = 0; i <= n; ++i) out.insert(Item{i, i, ItemStatus::Act, lambda_amrs()});

  // epsilon facts: length-1 rules at every position
  for (const Rule& rho : g.rules)
    if (rho.len() == 1)
      for (int i = 0; i <= n; ++i) out.insert(Item{i, i, ItemStatus::Comp, rho.amrs});

  // scanning
  for (int i = 1; i <= n; ++i) {
    auto it = g.lexicon.find(words[i - 1]);
    if (it == g.lexicon.end()) throw UnknownWordError(words[i - 1]);
    for (const Afs& cat : it->second)
      out.insert(Item{i - 1, i, ItemStatus::Comp, as_amrs(cat)});
  }

  // completion needs active items indexed by length; dot movement pairs an
  // active item with a complete item starting where it ends
  std::vector<const Item*> actives, completes;
  for (const Item& x : items) {
    if (x.status == ItemStatus::Act)
      actives.push_back(&x);
    else
      completes.push_back(&x);
  }

  for (const Rule& rho : g.rules) {
    int m = rho.len();
    if (m <= 1) continue;
    for (const Item* alpha : actives) {
      int k = alpha->amrs.len();
      // dot movement: k < m-1
      if (k < m - 1) {
        std::vector<int> js(k);
        for (int t = 0; t < k; ++t) js[t] = t + 1;
        std::optional<Amrs> b =
            k == 0 ? std::optional<Amrs>(rho.amrs)
                   : unify_in_context(h, rho.amrs, js, alpha->amrs);
        if (b) {
          for (const Item* beta : completes) {
            if (beta->i != alpha->j) continue;
            std::optional<Amrs> c = unify_in_context(h, *b, k + 1, afs_at(beta->amrs, 1));
            if (c)
              out.insert(Item{alpha->i, beta->j, ItemStatus::Act, substructure(*c, 1, k + 1)});
          }
        }
      }
      // completion: k == m-1
      if (k == m - 1 && k > 0) {
        std::vector<int> js(k);
        for (int t = 0; t < k; ++t) js[t] = t + 1;
        std::optional<Amrs> c = unify_in_context(h, rho.amrs, js, alpha->amrs);
        if (c) out.insert(Item{alpha->i, alpha->j, ItemStatus::Comp, as_amrs(afs_at(*c, m))});
      }
    }
  }
  return out;
}

ItemSet apply_filter(const TypeHierarchy& h, const ItemSet& items) {
  ItemSet out;
  for (const Item& x : items) {
    bool dominated = false;
    for (const Item& y : items) {
      if (y.i != x.i || y.j != x.j || y.status != x.status) continue;
      if (!(y.amrs == x.amrs) && preceq(h, y.amrs, x.amrs)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.insert(x);
  }
  return out;
}

FixpointResult fixpoint_parse(const TypeHierarchy& h, const Grammar& g,
                              const std::vector<std::string>& words,
                              const FixpointBudget& budget, bool filter) {
  FixpointResult res;
  ItemSet current;
  for (int it = 0; it < budget.max_iterations; ++it) {
    ItemSet next = tgw_step(h, g, words, current);
    if (filter) next = apply_filter(h, next);
    res.iterations = it + 1;
    if (next == current) {
      res.items = std::move(next);
      res.success = !successful_results(h, g, words, res.items).empty();
      return res;
    }
    current = std::move(next);
    if (static_cast<int>(current.size()) > budget.max_items) break;
  }
  res.items = std::move(current);
  res.exhausted = true;
  res.success = !successful_results(h, g, words, res.items).empty();
  return res;
}

std::vector<Afs> successful_results(const TypeHierarchy& h, const Grammar& g,
                                    const std::vector<std::string>& words,
                                    const ItemSet& items) {
  int n = static_cast<int>(words.size());
  std::vector<Afs> out;
  for (const Item& x : items) {
    if (x.status != ItemStatus::Comp || x.i != 0 || x.j != n || x.amrs.len() != 1) continue;
    std::optional<Afs> u = unify_afs(h, afs_at(x.amrs, 1), g.start);
    if (u) out.push_back(std::move(*u));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<Amrs> strong_derive(const TypeHierarchy& h, const Amrs& a, int j,
                                  const Rule& rho, const Amrs& r) {
  int n = rho.len();
  int k = a.len();
  if (j < 1 || j > k || r.len() != n) return std::nullopt;
  if (!preceq(h, rho.amrs, r)) return std::nullopt;

  // Absorb the selected element into the candidate's head; the remaining
  // "as specific as needed" equations must then hold without adding
  // information to either side.
  std::optional<Amrs> r1 = unify_in_context(h, r, n, afs_at(a, j));
  if (!r1) return std::nullopt;
  std::optional<Amrs> a1 = unify_in_context(h, a, j, afs_at(*r1, n));
  if (!a1 || !(*a1 == a)) return std::nullopt;
  if (!(*r1 == r)) {
    // r gained information from a's element: the caller's candidate was not
    // specific enough. Retry against the absorbed instance.
    return strong_derive(h, a, j, rho, *r1);
  }

  // Replacement: indices of a around j, with r's body spliced in. Sharing
  // between a and the body flows through the identified j-th/head node.
  Merger m;
  int abase = m.load(a.nodes);
  int rbase = m.load(r.nodes);
  m.merge(a.roots[j - 1] + abase, r.roots[n - 1] + rbase);
  if (!m.close(h)) return std::nullopt;
  std::vector<int> roots;
  for (int i = 1; i < j; ++i) roots.push_back(a.roots[i - 1] + abase);
  for (int i = 1; i <= n - 1; ++i) roots.push_back(r.roots[i - 1] + rbase);
  for (int i = j + 1; i <= k; ++i) roots.push_back(a.roots[i - 1] + abase);
  return m.extract_amrs(roots);
}

}  // namespace amalia
