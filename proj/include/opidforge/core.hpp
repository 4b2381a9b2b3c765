#pragma once

#include <compare>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

// Shared vocabulary for object-centric nets and logs: object types and
// identifiers, place colors, inscription variables, and tokens.

namespace opidforge {

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

struct ObjectType {
  std::string name;
  auto operator<=>(const ObjectType&) const = default;
};

struct ObjectId {
  std::string id;
  ObjectType type;
  auto operator<=>(const ObjectId&) const = default;
};

// Cartesian product of object types; every place carries one. Length >= 1.
struct Color {
  std::vector<ObjectType> components;
  auto operator<=>(const Color&) const = default;

  std::string to_string(const std::string& sep = ",") const {
    std::string out;
    for (const auto& c : components) {
      if (!out.empty()) out += sep;
      out += c.name;
    }
    return out;
  }
};

enum class VarKind { Normal, List, Fresh };

inline const char* to_string(VarKind k) {
  switch (k) {
    case VarKind::Normal: return "normal";
    case VarKind::List: return "list";
    case VarKind::Fresh: return "fresh";
  }
  return "?";
}

inline std::optional<VarKind> var_kind_from_string(const std::string& s) {
  if (s == "normal") return VarKind::Normal;
  if (s == "list") return VarKind::List;
  if (s == "fresh") return VarKind::Fresh;
  return std::nullopt;
}

// A typed variable. Normal and fresh variables stand for one object, list
// variables for a homogeneous object list of the base type.
struct Variable {
  VarKind kind = VarKind::Normal;
  ObjectType type;
  std::string name;
  auto operator<=>(const Variable&) const = default;
};

// Tuple of variables labelling an arc. At most one component may be a list
// variable; inscriptions with one are "template" inscriptions, the rest are
// "simple". Fresh components are only legal on output flows, which net
// validation checks.
struct Inscription {
  std::vector<Variable> vars;
  auto operator<=>(const Inscription&) const = default;

  bool is_template() const {
    for (const auto& v : vars)
      if (v.kind == VarKind::List) return true;
    return false;
  }

  // Position of the list variable, if any.
  std::optional<std::size_t> list_position() const {
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i].kind == VarKind::List) return i;
    return std::nullopt;
  }

  // Component i is the variable's base type; for list variables the element
  // type, not the list type.
  Color color() const {
    Color c;
    c.components.reserve(vars.size());
    for (const auto& v : vars) c.components.push_back(v.type);
    return c;
  }

  std::string to_string() const {
    std::string out = "<";
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (i) out += ",";
      out += vars[i].name;
    }
    return out + ">";
  }
};

inline void check_inscription(const Inscription& ins) {
  if (ins.vars.empty())
    throw Error("invalid-inscription", "inscription must have at least one variable");
  int lists = 0;
  for (const auto& v : ins.vars)
    if (v.kind == VarKind::List) ++lists;
  if (lists > 1)
    throw Error("invalid-inscription",
                "at most one list variable allowed, got " + ins.to_string());
}

// Object tuple held by a place; its color is the componentwise type sequence.
using Token = std::vector<ObjectId>;

inline Color color_of(const Token& token) {
  Color c;
  c.components.reserve(token.size());
  for (const auto& o : token) c.components.push_back(o.type);
  return c;
}

// Ordered type pair (many-side, one-side) of a stable many-to-one
// relationship.
struct Relationship {
  ObjectType many;
  ObjectType one;
  auto operator<=>(const Relationship&) const = default;

  std::string to_string() const { return "(" + many.name + "," + one.name + ")"; }
};

using RelationshipSet = std::set<Relationship>;

// Interns variables per net. Canonical x_T / X_T / nu_T names are generated
// from type names; a suffix counter disambiguates if a generated name is
// already taken by a different variable.
class VariablePool {
 public:
  const Variable& canonical(VarKind kind, const ObjectType& type) {
    auto key = std::make_pair(kind, type.name);
    auto it = canonical_.find(key);
    if (it != canonical_.end()) return vars_[it->second];
    std::string base;
    switch (kind) {
      case VarKind::Normal: base = "x_" + type.name; break;
      case VarKind::List: base = "X_" + type.name; break;
      case VarKind::Fresh: base = "nu_" + type.name; break;
    }
    std::string name = base;
    for (int i = 2; by_name_.count(name); ++i) name = base + "~" + std::to_string(i);
    return insert(Variable{kind, type, name}, true);
  }

  // Used by deserialization, where names travel with the document.
  const Variable& intern(VarKind kind, const ObjectType& type, const std::string& name) {
    auto it = by_name_.find(name);
    if (it != by_name_.end()) {
      const Variable& v = vars_[it->second];
      if (v.kind != kind || v.type != type)
        throw Error("type-mismatch", "variable '" + name + "' reused with a different signature");
      return v;
    }
    bool is_canonical =
        (kind == VarKind::Normal && name == "x_" + type.name) ||
        (kind == VarKind::List && name == "X_" + type.name) ||
        (kind == VarKind::Fresh && name == "nu_" + type.name);
    return insert(Variable{kind, type, name}, is_canonical);
  }

  const Variable* lookup(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : &vars_[it->second];
  }

 private:
  const Variable& insert(Variable v, bool canonical) {
    vars_.push_back(std::move(v));
    std::size_t idx = vars_.size() - 1;
    by_name_[vars_[idx].name] = idx;
    if (canonical) canonical_[{vars_[idx].kind, vars_[idx].type.name}] = idx;
    return vars_[idx];
  }

  // references into vars_ must survive growth
  std::deque<Variable> vars_;
  std::map<std::pair<VarKind, std::string>, std::size_t> canonical_;
  std::map<std::string, std::size_t> by_name_;
};

}  // namespace opidforge
