#include "amalia/types.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace amalia {

TypeId TypeHierarchy::type_by_name(const std::string& n) const {
  auto it = type_ids_.find(n);
  if (it == type_ids_.end())
    throw HierarchyError(HierarchyError::Kind::UndeclaredType, "unknown type: " + n);
  return TypeId{it->second};
}

FeatureId TypeHierarchy::feature_by_name(const std::string& n) const {
  auto it = feature_ids_.find(n);
  if (it == feature_ids_.end())
    throw HierarchyError(HierarchyError::Kind::UndeclaredType, "unknown feature: " + n);
  return FeatureId{it->second};
}

TypeId TypeHierarchy::lub_set(const std::vector<TypeId>& ts) const {
  TypeId acc = BOTTOM;
  for (TypeId t : ts) {
    if (acc == INCONSISTENT) return INCONSISTENT;
    acc = lub(acc, t);
  }
  return acc;
}

TypeId TypeHierarchy::glb(const std::vector<TypeId>& ts) const {
  std::vector<TypeId> lower;
  for (int32_t c = 0; c < type_count(); ++c) {
    TypeId cand{c};
    bool below_all = true;
    for (TypeId t : ts)
      if (!subsumes(cand, t)) { below_all = false; break; }
    if (below_all) lower.push_back(cand);
  }
  return lub_set(lower);  // lower is up-bounded by any member of ts
}

int TypeHierarchy::feature_position(TypeId t, FeatureId f) const {
  const auto& fs = features_[t.v];
  for (size_t i = 0; i < fs.size(); ++i)
    if (fs[i].feature == f) return static_cast<int>(i) + 1;
  return 0;
}

TypeId TypeHierarchy::approp(FeatureId f, TypeId t) const {
  for (const auto& slot : features_[t.v])
    if (slot.feature == f) return slot.restriction;
  return TypeId{};
}

std::vector<std::vector<TypeId>> TypeHierarchy::detect_approp_loops() const {
  // Edge t -> t' iff Approp(f, t) = t' for some f. All simple cycles, each
  // reported once starting from its smallest type id.
  int n = type_count();
  std::vector<std::set<int32_t>> succ(n);
  for (int32_t t = 0; t < n; ++t)
    for (const auto& slot : features_[t])
      succ[t].insert(slot.restriction.v);

  std::vector<std::vector<TypeId>> cycles;
  std::set<std::vector<int32_t>> seen;
  std::vector<int32_t> path;
  std::vector<char> on_path(n, 0);

  auto dfs = [&](auto&& self, int32_t start, int32_t at) -> void {
    for (int32_t next : succ[at]) {
      if (next == start) {
        // canonicalize: rotate so the smallest id leads
        std::vector<int32_t> cyc = path;
        auto mn = std::min_element(cyc.begin(), cyc.end());
        std::rotate(cyc.begin(), mn, cyc.end());
        if (seen.insert(cyc).second) {
          std::vector<TypeId> out;
          for (int32_t id : cyc) out.push_back(TypeId{id});
          cycles.push_back(std::move(out));
        }
      } else if (next > start && !on_path[next]) {
        on_path[next] = 1;
        path.push_back(next);
        self(self, start, next);
        path.pop_back();
        on_path[next] = 0;
      }
    }
  };

  for (int32_t s = 0; s < n; ++s) {
    path = {s};
    on_path.assign(n, 0);
    on_path[s] = 1;
    dfs(dfs, s, s);
  }
  return cycles;
}

std::vector<CharStatement> TypeHierarchy::to_statements() const {
  std::vector<CharStatement> out;
  for (int32_t t = 0; t < type_count(); ++t) {
    if (t != BOTTOM.v && imm_subs_[t].empty() && own_intros_[t].empty()) {
      // leaves still need their own statement so they count as declared
    }
    CharStatement st;
    st.subject = type_names_[t];
    for (TypeId s : imm_subs_[t]) st.subtypes.push_back(type_names_[s.v]);
    for (const auto& [f, r] : own_intros_[t]) {
      st.intros.emplace_back(feature_names_[f.v], type_names_[r.v]);
    }
    if (t == BOTTOM.v && st.subtypes.empty() && st.intros.empty()) continue;
    out.push_back(std::move(st));
  }
  return out;
}

namespace {

[[noreturn]] void fail_kind(HierarchyError::Kind k, const std::string& msg,
                            const std::string& t1 = "", const std::string& t2 = "",
                            const std::string& f = "",
                            std::vector<std::string> wit = {}) {
  HierarchyError e(k, msg);
  e.t1 = t1;
  e.t2 = t2;
  e.feature = f;
  e.witnesses = std::move(wit);
  throw e;
}

}  // namespace

TypeHierarchy compile_hierarchy(const std::vector<CharStatement>& statements) {
  if (statements.empty())
    fail_kind(HierarchyError::Kind::UndeclaredType, "empty type specification");

  TypeHierarchy h;
  auto intern_type = [&h](const std::string& n) -> int32_t {
    auto it = h.type_ids_.find(n);
    if (it != h.type_ids_.end()) return it->second;
    int32_t id = static_cast<int32_t>(h.type_names_.size());
    h.type_names_.push_back(n);
    h.type_ids_.emplace(n, id);
    return id;
  };
  intern_type("bot");

  // Pass 1: subjects, in statement order (bot first regardless).
  std::set<std::string> subjects;
  for (const auto& st : statements) {
    if (!subjects.insert(st.subject).second)
      fail_kind(HierarchyError::Kind::DuplicateCharacterization,
                "type characterized twice: " + st.subject, st.subject);
    intern_type(st.subject);
  }

  // Pass 2: references must be declared (bot is implicit).
  for (const auto& st : statements) {
    for (const auto& s : st.subtypes)
      if (!subjects.count(s) && s != "bot")
        fail_kind(HierarchyError::Kind::UndeclaredType,
                  "undeclared subtype " + s + " in characterization of " + st.subject, s);
    for (const auto& [f, r] : st.intros)
      if (!subjects.count(r) && r != "bot")
        fail_kind(HierarchyError::Kind::UndeclaredType,
                  "undeclared value restriction " + r + " for feature " + f, r);
  }

  const int n = h.type_count();
  h.imm_subs_.assign(n, {});
  h.own_intros_.assign(n, {});

  // Feature interning in first-introduction order.
  auto intern_feature = [&h](const std::string& nm) -> int32_t {
    auto it = h.feature_ids_.find(nm);
    if (it != h.feature_ids_.end()) return it->second;
    int32_t id = static_cast<int32_t>(h.feature_names_.size());
    h.feature_names_.push_back(nm);
    h.feature_ids_.emplace(nm, id);
    return id;
  };

  for (const auto& st : statements) {
    int32_t t = h.type_ids_.at(st.subject);
    for (const auto& s : st.subtypes) h.imm_subs_[t].push_back(TypeId{h.type_ids_.at(s)});
    std::set<int32_t> seen_here;
    for (const auto& [f, r] : st.intros) {
      int32_t fid = intern_feature(f);
      if (!seen_here.insert(fid).second)
        fail_kind(HierarchyError::Kind::FeatureRedeclaredOnSubtype,
                  "feature " + f + " listed twice in characterization of " + st.subject,
                  st.subject, "", f);
      h.own_intros_[t].emplace_back(FeatureId{fid}, TypeId{h.type_ids_.at(r)});
    }
  }

  // Subsumption: reflexive-transitive closure (Warshall). bot subsumes all.
  h.sub_.assign(static_cast<size_t>(n) * n, 0);
  auto sub_at = [&h, n](int32_t a, int32_t b) -> char& {
    return h.sub_[static_cast<size_t>(a) * n + b];
  };
  for (int32_t t = 0; t < n; ++t) {
    sub_at(t, t) = 1;
    sub_at(BOTTOM.v, t) = 1;
  }
  for (int32_t t = 0; t < n; ++t)
    for (TypeId s : h.imm_subs_[t]) sub_at(t, s.v) = 1;
  for (int32_t k = 0; k < n; ++k)
    for (int32_t i = 0; i < n; ++i) {
      if (!sub_at(i, k)) continue;
      for (int32_t j = 0; j < n; ++j)
        if (sub_at(k, j)) sub_at(i, j) = 1;
    }

  for (int32_t a = 0; a < n; ++a)
    for (int32_t b = a + 1; b < n; ++b)
      if (sub_at(a, b) && sub_at(b, a))
        fail_kind(HierarchyError::Kind::CyclicSubsumption,
                  "subsumption cycle through " + h.type_names_[a] + " and " + h.type_names_[b],
                  h.type_names_[a], h.type_names_[b]);

  // LUB table with bounded-completeness check: for each pair, the set of
  // common upper bounds must have a unique minimal element (or be empty).
  h.lub_.assign(static_cast<size_t>(n) * n, INCONSISTENT);
  for (int32_t a = 0; a < n; ++a) {
    for (int32_t b = a; b < n; ++b) {
      std::vector<int32_t> ubs;
      for (int32_t u = 0; u < n; ++u)
        if (sub_at(a, u) && sub_at(b, u)) ubs.push_back(u);
      TypeId val = INCONSISTENT;
      if (!ubs.empty()) {
        std::vector<int32_t> minimals;
        for (int32_t u : ubs) {
          bool minimal = true;
          for (int32_t w : ubs)
            if (w != u && sub_at(w, u)) { minimal = false; break; }
          if (minimal) minimals.push_back(u);
        }
        if (minimals.size() != 1) {
          std::vector<std::string> wit;
          for (int32_t m : minimals) wit.push_back(h.type_names_[m]);
          fail_kind(HierarchyError::Kind::NotBoundedComplete,
                    "types " + h.type_names_[a] + " and " + h.type_names_[b] +
                        " have no least upper bound",
                    h.type_names_[a], h.type_names_[b], "", std::move(wit));
        }
        val = TypeId{minimals[0]};
      }
      h.lub_[static_cast<size_t>(a) * n + b] = val;
      h.lub_[static_cast<size_t>(b) * n + a] = val;
    }
  }

  // Appropriateness: inherit from all proper supertypes' introductions, then
  // add own introductions; a feature may be introduced only once along a chain.
  const int nf = h.feature_count();
  h.features_.assign(n, {});
  h.intro_type_.assign(nf, TypeId{});

  for (int32_t t = 0; t < n; ++t) {
    // feature -> joined restriction, + whether t introduces it itself
    std::map<int32_t, TypeId> restr;
    std::set<int32_t> inherited;
    for (int32_t sup = 0; sup < n; ++sup) {
      if (sup == t || !sub_at(sup, t)) continue;
      for (const auto& [f, r] : h.own_intros_[sup]) {
        inherited.insert(f.v);
        auto [it, fresh] = restr.emplace(f.v, r);
        if (!fresh) {
          TypeId j = h.lub_[static_cast<size_t>(it->second.v) * n + r.v];
          if (j == INCONSISTENT)
            fail_kind(HierarchyError::Kind::ApproprNonMonotone,
                      "conflicting inherited restrictions for feature " +
                          h.feature_names_[f.v] + " at type " + h.type_names_[t],
                      h.type_names_[t], "", h.feature_names_[f.v]);
          it->second = j;
        }
      }
    }
    for (const auto& [f, r] : h.own_intros_[t]) {
      if (inherited.count(f.v))
        fail_kind(HierarchyError::Kind::FeatureRedeclaredOnSubtype,
                  "feature " + h.feature_names_[f.v] + " re-introduced at subtype " +
                      h.type_names_[t],
                  h.type_names_[t], "", h.feature_names_[f.v]);
      auto [it, fresh] = restr.emplace(f.v, r);
      if (!fresh) it->second = r;  // unreachable given the check above
    }
    for (const auto& [f, r] : restr)
      h.features_[t].push_back(FeatureSlot{FeatureId{f}, r, TypeId{}});
    std::sort(h.features_[t].begin(), h.features_[t].end(),
              [](const FeatureSlot& x, const FeatureSlot& y) { return x.feature < y.feature; });
  }

  // Feature introduction condition: the carriers of each feature must have a
  // glb that itself carries the feature.
  for (int32_t f = 0; f < nf; ++f) {
    std::vector<TypeId> carriers;
    for (int32_t t = 0; t < n; ++t)
      if (h.feature_position(TypeId{t}, FeatureId{f}) > 0) carriers.push_back(TypeId{t});
    TypeId m = h.glb(carriers);
    if (m == INCONSISTENT || h.feature_position(m, FeatureId{f}) == 0)
      fail_kind(HierarchyError::Kind::FeatureIntroductionViolation,
                "feature " + h.feature_names_[f] + " has no unique introducing type", "", "",
                h.feature_names_[f]);
    h.intro_type_[f] = m;
    for (int32_t t = 0; t < n; ++t)
      for (auto& slot : h.features_[t])
        if (slot.feature.v == f) slot.introduced_by = m;
  }

  // Monotonicity across the full order (construction should guarantee it;
  // verify anyway since restrictions join across multiple parents).
  for (int32_t a = 0; a < n; ++a)
    for (int32_t b = 0; b < n; ++b) {
      if (!sub_at(a, b)) continue;
      for (const auto& slot : h.features_[a]) {
        TypeId rb = h.approp(slot.feature, TypeId{b});
        if (!rb.valid() || !(rb == slot.restriction || sub_at(slot.restriction.v, rb.v)))
          fail_kind(HierarchyError::Kind::ApproprNonMonotone,
                    "appropriateness not monotone for feature " +
                        h.feature_names_[slot.feature.v] + " between " + h.type_names_[a] +
                        " and " + h.type_names_[b],
                    h.type_names_[a], h.type_names_[b], h.feature_names_[slot.feature.v]);
      }
    }

  // Longest-chain depth from bot; every non-bot type sits at least one step
  // below bot via the implicit edge.
  h.depth_.assign(n, 1);
  h.depth_[BOTTOM.v] = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int32_t t = 0; t < n; ++t)
      for (TypeId s : h.imm_subs_[t])
        if (h.depth_[s.v] < h.depth_[t] + 1) {
          h.depth_[s.v] = h.depth_[t] + 1;
          changed = true;
        }
  }
  return h;
}

}  // namespace amalia
