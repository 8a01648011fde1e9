#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace amalia {

// Type ids index the hierarchy's type table. BOTTOM is always id 0.
// INCONSISTENT stands for the top element, which is never a usable type.
struct TypeId {
  int32_t v = -1;

  constexpr bool operator==(const TypeId&) const = default;
  constexpr auto operator<=>(const TypeId&) const = default;
  constexpr bool valid() const { return v >= 0; }
};

inline constexpr TypeId BOTTOM{0};
inline constexpr TypeId INCONSISTENT{-2};

// Feature ids double as the global feature ordinal: ids are assigned in
// first-introduction order over the statement list, so the id order is the
// total order on Feats.
struct FeatureId {
  int32_t v = -1;

  constexpr bool operator==(const FeatureId&) const = default;
  constexpr auto operator<=>(const FeatureId&) const = default;
  constexpr bool valid() const { return v >= 0; }
};

// One `t sub [t1,...,tn] intro [f1:r1,...,fm:rm].` statement, in name form.
struct CharStatement {
  std::string subject;
  std::vector<std::string> subtypes;
  std::vector<std::pair<std::string, std::string>> intros;  // (feature, restriction)
  int line = 0;
  int col = 0;
};

struct HierarchyError : std::runtime_error {
  enum class Kind {
    DuplicateCharacterization,
    UndeclaredType,
    CyclicSubsumption,
    NotBoundedComplete,
    ApproprNonMonotone,
    FeatureIntroductionViolation,
    FeatureRedeclaredOnSubtype,
  };
  Kind kind;
  std::string t1, t2, feature;
  std::vector<std::string> witnesses;

  HierarchyError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

struct FeatureSlot {
  FeatureId feature;
  TypeId restriction;   // Approp(feature, type)
  TypeId introduced_by; // the unique most general carrier of `feature`
};

class TypeHierarchy {
 public:
  // --- identity ---
  int type_count() const { return static_cast<int>(type_names_.size()); }
  int feature_count() const { return static_cast<int>(feature_names_.size()); }
  const std::string& type_name(TypeId t) const { return type_names_[t.v]; }
  const std::string& feature_name(FeatureId f) const { return feature_names_[f.v]; }
  TypeId type_by_name(const std::string& n) const;
  FeatureId feature_by_name(const std::string& n) const;
  bool has_type(const std::string& n) const { return type_ids_.count(n) != 0; }

  // --- order ---
  bool subsumes(TypeId general, TypeId specific) const {
    return sub_[general.v * type_count() + specific.v];
  }
  TypeId lub(TypeId t1, TypeId t2) const { return lub_[t1.v * type_count() + t2.v]; }
  // Least upper bound of a non-empty set; total because types are up-bounded
  // pairwise-checked at construction. Returns INCONSISTENT when only top bounds.
  TypeId lub_set(const std::vector<TypeId>& ts) const;
  // Greatest lower bound; BOTTOM is always a lower bound, so this is total.
  TypeId glb(const std::vector<TypeId>& ts) const;

  // --- appropriateness ---
  // Ordered feature list of t (global ordinal order); positions are 1-based.
  const std::vector<FeatureSlot>& features_of(TypeId t) const { return features_[t.v]; }
  int arity(TypeId t) const { return static_cast<int>(features_[t.v].size()); }
  // 1-based arc position of f in t, or 0 when f is not appropriate for t.
  int feature_position(TypeId t, FeatureId f) const;
  TypeId approp(FeatureId f, TypeId t) const;  // INVALID TypeId when undefined
  // The unique most general type carrying f.
  TypeId intro_type(FeatureId f) const { return intro_type_[f.v]; }

  // Longest-chain depth from BOTTOM; strictly monotone along subsumption.
  int depth(TypeId t) const { return depth_[t.v]; }

  // Appropriateness loops (Approp(f_i, t_i) = t_{i+1}, cyclically); warnings only.
  std::vector<std::vector<TypeId>> detect_approp_loops() const;

  // Reconstructs a statement list equivalent to the one this hierarchy was
  // compiled from (used by the object-code `%% types` section).
  std::vector<CharStatement> to_statements() const;

  const std::vector<TypeId>& immediate_subtypes(TypeId t) const { return imm_subs_[t.v]; }

  friend TypeHierarchy compile_hierarchy(const std::vector<CharStatement>& statements);

 private:
  std::vector<std::string> type_names_;
  std::vector<std::string> feature_names_;
  std::unordered_map<std::string, int32_t> type_ids_;
  std::unordered_map<std::string, int32_t> feature_ids_;
  std::vector<char> sub_;                          // closure of the immediate relation
  std::vector<TypeId> lub_;                        // n*n table
  std::vector<std::vector<FeatureSlot>> features_; // per type, ordinal order
  std::vector<TypeId> intro_type_;                 // per feature
  std::vector<int> depth_;
  std::vector<std::vector<TypeId>> imm_subs_;      // declaration order
  std::vector<std::vector<std::pair<FeatureId, TypeId>>> own_intros_;  // declaration order
};

TypeHierarchy compile_hierarchy(const std::vector<CharStatement>& statements);

}  // namespace amalia
