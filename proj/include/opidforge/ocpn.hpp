#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "opidforge/core.hpp"
#include "opidforge/ocel.hpp"

// Object-centric Petri nets: places typed by object type, variable arcs that
// move object sets, set-valued markings, and log replay with exhaustive
// search over silent firings.

namespace opidforge {

struct OcpnPlace {
  std::string id;
  ObjectType type;
  bool play = false;
  bool stop = false;
  auto operator<=>(const OcpnPlace&) const = default;
};

struct OcpnTransition {
  std::string id;
  std::optional<std::string> label;  // nullopt = silent
  auto operator<=>(const OcpnTransition&) const = default;
  bool silent() const { return !label.has_value(); }
};

struct OcpnFlow {
  std::string from;
  std::string to;
  bool variable = false;
  auto operator<=>(const OcpnFlow&) const = default;
};

struct Ocpn {
  std::set<ObjectType> types;
  std::vector<OcpnPlace> places;
  std::vector<OcpnTransition> transitions;
  std::vector<OcpnFlow> flows;

  const OcpnPlace* place(const std::string& id) const {
    for (const auto& p : places)
      if (p.id == id) return &p;
    return nullptr;
  }
  const OcpnTransition* transition(const std::string& id) const {
    for (const auto& t : transitions)
      if (t.id == id) return &t;
    return nullptr;
  }

  std::vector<const OcpnFlow*> in_flows(const std::string& transition_id) const {
    std::vector<const OcpnFlow*> out;
    for (const auto& f : flows)
      if (f.to == transition_id) out.push_back(&f);
    return out;
  }
  std::vector<const OcpnFlow*> out_flows(const std::string& transition_id) const {
    std::vector<const OcpnFlow*> out;
    for (const auto& f : flows)
      if (f.from == transition_id) out.push_back(&f);
    return out;
  }

  // Types of all places adjacent to the transition.
  std::set<ObjectType> tpl(const std::string& transition_id) const {
    std::set<ObjectType> out;
    for (const auto& f : flows) {
      if (f.to == transition_id)
        if (const auto* p = place(f.from)) out.insert(p->type);
      if (f.from == transition_id)
        if (const auto* p = place(f.to)) out.insert(p->type);
    }
    return out;
  }

  std::set<ObjectType> tpl_filtered(const std::string& transition_id, bool variable) const {
    std::set<ObjectType> out;
    for (const auto& f : flows) {
      if (f.variable != variable) continue;
      if (f.to == transition_id)
        if (const auto* p = place(f.from)) out.insert(p->type);
      if (f.from == transition_id)
        if (const auto* p = place(f.to)) out.insert(p->type);
    }
    return out;
  }

  const OcpnPlace* play_place(const ObjectType& type) const {
    for (const auto& p : places)
      if (p.play && p.type == type) return &p;
    return nullptr;
  }
  const OcpnPlace* stop_place(const ObjectType& type) const {
    for (const auto& p : places)
      if (p.stop && p.type == type) return &p;
    return nullptr;
  }
};

struct Violation {
  std::string kind;
  std::string element;
  std::string message;
  bool warning = false;
};

// Structural diagnostics; an empty error list means the net is well-formed.
// Workflow-structure findings are warnings only.
inline std::vector<Violation> validate(const Ocpn& net) {
  std::vector<Violation> out;
  std::set<std::string> place_ids, trans_ids;
  for (const auto& p : net.places) {
    if (!place_ids.insert(p.id).second)
      out.push_back({"duplicate-id", p.id, "duplicate place id"});
    if (!net.types.count(p.type))
      out.push_back({"unknown-type", p.id, "place type '" + p.type.name + "' not declared"});
  }
  for (const auto& t : net.transitions) {
    if (!trans_ids.insert(t.id).second || place_ids.count(t.id))
      out.push_back({"duplicate-id", t.id, "duplicate or clashing transition id"});
  }
  for (const auto& f : net.flows) {
    bool pt = place_ids.count(f.from) && trans_ids.count(f.to);
    bool tp = trans_ids.count(f.from) && place_ids.count(f.to);
    if (!pt && !tp)
      out.push_back({"dangling-flow", f.from + "->" + f.to,
                     "flows must connect a known place and a known transition"});
  }
  for (const auto& t : net.transitions) {
    auto var = net.tpl_filtered(t.id, true);
    auto nv = net.tpl_filtered(t.id, false);
    for (const auto& ty : var)
      if (nv.count(ty))
        out.push_back({"well-formedness", t.id,
                       "type '" + ty.name + "' reached by both variable and non-variable arcs"});
  }
  for (const auto& ty : net.types) {
    int plays = 0, stops = 0;
    for (const auto& p : net.places) {
      if (p.type != ty) continue;
      plays += p.play ? 1 : 0;
      stops += p.stop ? 1 : 0;
    }
    if (plays != 1)
      out.push_back({"play-place-cardinality", ty.name,
                     "expected exactly one play place, found " + std::to_string(plays)});
    if (stops != 1)
      out.push_back({"stop-place-cardinality", ty.name,
                     "expected exactly one stop place, found " + std::to_string(stops)});
  }
  // Per-type connectivity, warning only: discovery-produced nets have one
  // workflow component per type, hand-built nets may not.
  for (const auto& ty : net.types) {
    std::vector<std::string> typed;
    for (const auto& p : net.places)
      if (p.type == ty) typed.push_back(p.id);
    if (typed.size() < 2) continue;
    // two hops: place -> transition -> place of the same type
    std::set<std::string> seen{typed.front()};
    std::deque<std::string> queue{typed.front()};
    while (!queue.empty()) {
      std::string cur = queue.front();
      queue.pop_front();
      for (const auto& f : net.flows) {
        std::string trans;
        if (f.from == cur)
          trans = f.to;
        else if (f.to == cur)
          trans = f.from;
        else
          continue;
        for (const auto& g : net.flows) {
          const OcpnPlace* nxt = nullptr;
          if (g.from == trans) nxt = net.place(g.to);
          if (g.to == trans && !nxt) nxt = net.place(g.from);
          if (nxt && nxt->type == ty && seen.insert(nxt->id).second) queue.push_back(nxt->id);
        }
      }
    }
    for (const auto& id : typed)
      if (!seen.count(id))
        out.push_back({"workflow-structure", id,
                       "place not connected to type '" + ty.name + "''s component", true});
  }
  return out;
}

inline bool has_errors(const std::vector<Violation>& violations) {
  for (const auto& v : violations)
    if (!v.warning) return true;
  return false;
}

// (placeId, object) token pairs; multiplicity is at most one by construction.
using OcpnToken = std::pair<std::string, ObjectId>;
using OcpnMarking = std::set<OcpnToken>;

// Maps each object type a transition touches to the bound objects.
// Non-variable types bind exactly one object.
struct OcpnBinding {
  std::map<ObjectType, std::set<ObjectId>> by_type;
  auto operator<=>(const OcpnBinding&) const = default;
};

inline void check_binding(const Ocpn& net, const std::string& transition_id,
                          const OcpnBinding& b) {
  const auto* t = net.transition(transition_id);
  if (!t) throw Error("invalid-binding", "unknown transition '" + transition_id + "'");
  auto types = net.tpl(transition_id);
  auto nv = net.tpl_filtered(transition_id, false);
  for (const auto& ty : types) {
    auto it = b.by_type.find(ty);
    if (it == b.by_type.end() || it->second.empty())
      throw Error("invalid-binding",
                  "binding for '" + transition_id + "' misses type '" + ty.name + "'");
    if (nv.count(ty) && it->second.size() != 1)
      throw Error("invalid-binding", "non-variable type '" + ty.name +
                                         "' must bind exactly one object");
    for (const auto& o : it->second)
      if (o.type != ty)
        throw Error("invalid-binding", "object '" + o.id + "' bound under wrong type");
  }
  for (const auto& [ty, objs] : b.by_type)
    if (!types.count(ty))
      throw Error("invalid-binding",
                  "binding for '" + transition_id + "' has extra type '" + ty.name + "'");
}

inline std::pair<OcpnMarking, OcpnMarking> cons_prod(const Ocpn& net,
                                                     const std::string& transition_id,
                                                     const OcpnBinding& b) {
  check_binding(net, transition_id, b);
  OcpnMarking cons, prod;
  for (const auto* f : net.in_flows(transition_id)) {
    const auto* p = net.place(f->from);
    for (const auto& o : b.by_type.at(p->type)) cons.insert({p->id, o});
  }
  for (const auto* f : net.out_flows(transition_id)) {
    const auto* p = net.place(f->to);
    for (const auto& o : b.by_type.at(p->type)) prod.insert({p->id, o});
  }
  return {std::move(cons), std::move(prod)};
}

inline bool ocpn_enabled(const Ocpn& net, const OcpnMarking& m, const std::string& transition_id,
                         const OcpnBinding& b) {
  auto [cons, prod] = cons_prod(net, transition_id, b);
  (void)prod;
  return std::includes(m.begin(), m.end(), cons.begin(), cons.end());
}

inline OcpnMarking ocpn_fire(const Ocpn& net, const OcpnMarking& m,
                             const std::string& transition_id, const OcpnBinding& b) {
  auto [cons, prod] = cons_prod(net, transition_id, b);
  if (!std::includes(m.begin(), m.end(), cons.begin(), cons.end()))
    throw Error("not-enabled", "transition '" + transition_id + "' not enabled");
  OcpnMarking out = m;
  for (const auto& tok : cons) out.erase(tok);
  for (const auto& tok : prod) out.insert(tok);
  return out;
}

inline OcpnMarking initial_marking(const Ocpn& net, const std::set<ObjectId>& objects) {
  OcpnMarking m;
  for (const auto& o : objects) {
    const auto* p = net.play_place(o.type);
    if (!p) throw Error("unknown-type", "no play place for type '" + o.type.name + "'");
    m.insert({p->id, o});
  }
  return m;
}

inline OcpnMarking final_marking(const Ocpn& net, const std::set<ObjectId>& objects) {
  OcpnMarking m;
  for (const auto& o : objects) {
    const auto* p = net.stop_place(o.type);
    if (!p) throw Error("unknown-type", "no stop place for type '" + o.type.name + "'");
    m.insert({p->id, o});
  }
  return m;
}

// ---------------------------------------------------------------------------
// Replay

enum class RejectReason {
  NoEnabledBinding,
  FinalMarkingNotReached,
  UnknownActivity,
  LinkInferenceFailed,
  BudgetExhausted,
};

inline const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::NoEnabledBinding: return "no-enabled-binding";
    case RejectReason::FinalMarkingNotReached: return "final-marking-not-reached";
    case RejectReason::UnknownActivity: return "unknown-activity";
    case RejectReason::LinkInferenceFailed: return "link-inference-failed";
    case RejectReason::BudgetExhausted: return "budget-exhausted";
  }
  return "?";
}

struct LinkViolation {
  Relationship pair;
  std::string object;
  std::set<std::string> co_occurring;
};

struct ReplayFailure {
  RejectReason reason = RejectReason::NoEnabledBinding;
  std::optional<std::size_t> event_index;
  std::vector<LinkViolation> violations;
};

// One fired step; values are object-id lists keyed by type name (OCPN) or by
// inscription variable name (OPID).
struct TraceStep {
  std::string transition;
  std::map<std::string, std::vector<std::string>> bound;
};

struct ReplayResult {
  bool accepted = false;
  std::optional<ReplayFailure> failure;
  std::vector<TraceStep> trace;
  // Only filled by synchronized-net replay: inferred link tokens per pair.
  std::map<Relationship, std::set<std::pair<std::string, std::string>>> links;
};

struct SearchLimits {
  std::size_t max_states = 1000000;
};

namespace detail {

inline std::string marking_key(const OcpnMarking& m) {
  std::string key;
  for (const auto& [place, obj] : m) {
    key += place;
    key += '\x01';
    key += obj.id;
    key += '\x02';
  }
  return key;
}

inline TraceStep ocpn_trace_step(const std::string& transition, const OcpnBinding& b) {
  TraceStep step;
  step.transition = transition;
  for (const auto& [ty, objs] : b.by_type) {
    auto& slot = step.bound[ty.name];
    for (const auto& o : objs) slot.push_back(o.id);
  }
  return step;
}

// Candidate objects per type for a silent firing: objects present on every
// same-typed pre-place. Types with no pre-place range over the whole universe.
inline std::optional<std::vector<std::pair<ObjectType, std::vector<ObjectId>>>>
silent_candidates(const Ocpn& net, const OcpnMarking& m, const std::string& transition_id,
                  const std::set<ObjectId>& universe) {
  std::vector<std::pair<ObjectType, std::vector<ObjectId>>> out;
  for (const auto& ty : net.tpl(transition_id)) {
    std::vector<ObjectId> candidates;
    bool constrained = false;
    for (const auto* f : net.in_flows(transition_id)) {
      const auto* p = net.place(f->from);
      if (p->type != ty) continue;
      std::vector<ObjectId> here;
      for (const auto& [place, obj] : m)
        if (place == p->id) here.push_back(obj);
      if (!constrained) {
        candidates = std::move(here);
        constrained = true;
      } else {
        std::vector<ObjectId> both;
        std::set_intersection(candidates.begin(), candidates.end(), here.begin(), here.end(),
                              std::back_inserter(both));
        candidates = std::move(both);
      }
    }
    if (!constrained)
      for (const auto& o : universe)
        if (o.type == ty) candidates.push_back(o);
    if (candidates.empty()) return std::nullopt;
    out.emplace_back(ty, std::move(candidates));
  }
  return out;
}

template <typename Fn>
inline void for_each_silent_binding(const Ocpn& net, const OcpnMarking& m,
                                    const std::string& transition_id,
                                    const std::set<ObjectId>& universe, Fn&& fn) {
  auto cands = silent_candidates(net, m, transition_id, universe);
  if (!cands) return;
  auto var = net.tpl_filtered(transition_id, true);
  // subset enumeration per variable type is capped; beyond that the caller's
  // state budget would blow up anyway
  for (const auto& [ty, objs] : *cands)
    if (var.count(ty) && objs.size() > 20)
      throw Error("budget", "variable binding domain too large on '" + transition_id + "'");
  OcpnBinding b;
  std::vector<std::pair<ObjectType, std::vector<ObjectId>>> order(cands->begin(), cands->end());
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == order.size()) {
      fn(b);
      return;
    }
    const auto& [ty, objs] = order[i];
    if (var.count(ty)) {
      std::size_t n = objs.size();
      for (std::uint64_t mask = 1; mask < (1ull << n); ++mask) {
        std::set<ObjectId> subset;
        for (std::size_t j = 0; j < n; ++j)
          if (mask & (1ull << j)) subset.insert(objs[j]);
        b.by_type[ty] = std::move(subset);
        rec(i + 1);
      }
      b.by_type.erase(ty);
    } else {
      for (const auto& o : objs) {
        b.by_type[ty] = {o};
        rec(i + 1);
      }
      b.by_type.erase(ty);
    }
  };
  rec(0);
}

}  // namespace detail

// Derives the binding an event induces for a transition: objects partitioned
// by type. Returns nullopt when the event cannot bind the transition (type
// outside tpl(t), missing type, or arity clash on a non-variable type).
inline std::optional<OcpnBinding> event_binding(const Ocpn& net, const std::string& transition_id,
                                                const Event& event) {
  auto types = net.tpl(transition_id);
  auto nv = net.tpl_filtered(transition_id, false);
  OcpnBinding b;
  for (const auto& o : event.objects) {
    if (!types.count(o.type)) return std::nullopt;
    b.by_type[o.type].insert(o);
  }
  for (const auto& ty : types) {
    auto it = b.by_type.find(ty);
    if (it == b.by_type.end() || it->second.empty()) return std::nullopt;
    if (nv.count(ty) && it->second.size() != 1) return std::nullopt;
  }
  return b;
}

// Replays the log against the net: one binding execution per event in order,
// with arbitrarily many silent firings in between, from the initial to the
// final marking over the log's objects. Search is breadth-first over the
// silent-reachability closure with visited-marking memoization.
inline ReplayResult replay(const Ocpn& net, const Ocel& log, const SearchLimits& limits = {}) {
  auto violations = validate(net);
  if (has_errors(violations))
    throw Error("invalid-ocpn", "net fails validation: " + violations.front().message);

  struct Node {
    OcpnMarking marking;
    std::int64_t parent = -1;
    TraceStep step;
  };
  std::deque<Node> nodes;
  std::size_t visited = 0;
  ReplayResult result;

  auto reject = [&](RejectReason reason, std::optional<std::size_t> index) {
    result.accepted = false;
    result.failure = ReplayFailure{reason, index, {}};
    return result;
  };

  const auto& universe = log.objects();
  OcpnMarking init, target;
  try {
    init = initial_marking(net, universe);
    target = final_marking(net, universe);
  } catch (const Error&) {
    return reject(RejectReason::NoEnabledBinding, 0);
  }

  std::vector<std::int64_t> frontier;
  nodes.push_back({init, -1, {}});
  frontier.push_back(0);
  ++visited;

  std::set<std::string> activities;
  for (const auto& t : net.transitions)
    if (t.label) activities.insert(*t.label);

  // Closes the frontier under silent firings; returns false on budget blow.
  auto close_silent = [&](std::vector<std::int64_t>& layer) {
    std::map<std::string, std::int64_t> seen;
    for (auto idx : layer) seen[detail::marking_key(nodes[idx].marking)] = idx;
    std::deque<std::int64_t> queue(layer.begin(), layer.end());
    while (!queue.empty()) {
      std::int64_t cur = queue.front();
      queue.pop_front();
      for (const auto& t : net.transitions) {
        if (!t.silent()) continue;
        detail::for_each_silent_binding(
            net, nodes[cur].marking, t.id, universe, [&](const OcpnBinding& b) {
              if (!ocpn_enabled(net, nodes[cur].marking, t.id, b)) return;
              OcpnMarking next = ocpn_fire(net, nodes[cur].marking, t.id, b);
              std::string key = detail::marking_key(next);
              if (seen.count(key)) return;
              nodes.push_back({std::move(next), cur, detail::ocpn_trace_step(t.id, b)});
              std::int64_t idx = static_cast<std::int64_t>(nodes.size()) - 1;
              seen[key] = idx;
              queue.push_back(idx);
              layer.push_back(idx);
              ++visited;
            });
        if (visited > limits.max_states) return false;
      }
    }
    return true;
  };

  const auto& events = log.events();
  try {
  for (std::size_t ei = 0; ei < events.size(); ++ei) {
    if (!close_silent(frontier)) return reject(RejectReason::BudgetExhausted, ei);
    const Event& event = events[ei];
    if (!activities.count(event.activity))
      return reject(RejectReason::UnknownActivity, ei);
    std::vector<std::int64_t> next_frontier;
    std::map<std::string, bool> seen;
    for (auto idx : frontier) {
      for (const auto& t : net.transitions) {
        if (!t.label || *t.label != event.activity) continue;
        auto b = event_binding(net, t.id, event);
        if (!b || !ocpn_enabled(net, nodes[idx].marking, t.id, *b)) continue;
        OcpnMarking next = ocpn_fire(net, nodes[idx].marking, t.id, *b);
        std::string key = detail::marking_key(next);
        if (seen.count(key)) continue;
        seen[key] = true;
        nodes.push_back({std::move(next), idx, detail::ocpn_trace_step(t.id, *b)});
        next_frontier.push_back(static_cast<std::int64_t>(nodes.size()) - 1);
        ++visited;
      }
    }
    if (visited > limits.max_states) return reject(RejectReason::BudgetExhausted, ei);
    if (next_frontier.empty()) return reject(RejectReason::NoEnabledBinding, ei);
    frontier = std::move(next_frontier);
  }
  if (!close_silent(frontier))
    return reject(RejectReason::BudgetExhausted, events.size());
  } catch (const Error& e) {
    if (e.kind() == "budget") return reject(RejectReason::BudgetExhausted, std::nullopt);
    throw;
  }

  for (auto idx : frontier) {
    if (nodes[idx].marking == target) {
      result.accepted = true;
      std::vector<TraceStep> rev;
      for (std::int64_t cur = idx; cur > 0; cur = nodes[cur].parent)
        rev.push_back(nodes[cur].step);
      result.trace.assign(rev.rbegin(), rev.rend());
      return result;
    }
  }
  return reject(RejectReason::FinalMarkingNotReached, events.size());
}

}  // namespace opidforge
