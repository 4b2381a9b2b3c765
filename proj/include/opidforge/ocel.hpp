#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "opidforge/core.hpp"

// Object-centric event log: typed objects plus time-ordered events that each
// reference a set of objects.

namespace opidforge {

struct Event {
  std::string id;
  std::string activity;
  std::int64_t time_micros = 0;
  std::set<ObjectId> objects;
};

class Ocel {
 public:
  Ocel() = default;

  // Validates and freezes the log. Events are sorted by (time, id); ties in
  // the timestamp are broken by event id so replay order is deterministic.
  static Ocel build(std::set<ObjectType> types, std::set<ObjectId> objects,
                    std::vector<Event> events) {
    Ocel log;
    log.types_ = std::move(types);
    log.objects_ = std::move(objects);
    log.events_ = std::move(events);
    for (const auto& o : log.objects_) {
      if (!log.types_.count(o.type))
        throw Error("unknown-type", "object '" + o.id + "' has type '" + o.type.name +
                                        "' outside the log's type set");
      auto [it, fresh] = log.type_of_.emplace(o.id, o.type);
      if (!fresh && it->second != o.type)
        throw Error("type-conflict", "object id '" + o.id + "' appears with two types");
    }
    for (auto& e : log.events_) {
      if (e.objects.empty())
        throw Error("malformed-document", "event '" + e.id + "' references no objects");
      for (const auto& o : e.objects) {
        auto it = log.type_of_.find(o.id);
        if (it == log.type_of_.end())
          throw Error("dangling-object-reference",
                      "event '" + e.id + "' references unknown object '" + o.id + "'");
        if (it->second != o.type)
          throw Error("type-conflict",
                      "object '" + o.id + "' typed inconsistently in event '" + e.id + "'");
      }
    }
    std::sort(log.events_.begin(), log.events_.end(), [](const Event& a, const Event& b) {
      return std::tie(a.time_micros, a.id) < std::tie(b.time_micros, b.id);
    });
    for (std::size_t i = 0; i < log.events_.size(); ++i)
      for (const auto& o : log.events_[i].objects) log.events_of_[o.id].push_back(i);
    return log;
  }

  const std::set<ObjectType>& types() const { return types_; }
  const std::set<ObjectId>& objects() const { return objects_; }
  const std::vector<Event>& events() const { return events_; }

  const ObjectType* type_of(const std::string& object_id) const {
    auto it = type_of_.find(object_id);
    return it == type_of_.end() ? nullptr : &it->second;
  }

  bool appears_in_events(const std::string& object_id) const {
    return events_of_.count(object_id) > 0;
  }

  // All objects of the given type co-occurring with o in some event. Note
  // that o itself is included when it has that type and occurs in any event.
  std::set<ObjectId> co_occurring(const ObjectId& o, const ObjectType& type) const {
    if (!objects_.count(o)) throw Error("unknown-object", "object '" + o.id + "' not in log");
    if (!types_.count(type)) throw Error("unknown-type", "type '" + type.name + "' not in log");
    std::set<ObjectId> out;
    auto it = events_of_.find(o.id);
    if (it == events_of_.end()) return out;
    for (std::size_t idx : it->second)
      for (const auto& other : events_[idx].objects)
        if (other.type == type) out.insert(other);
    return out;
  }

  std::set<ObjectId> objects_of_type(const ObjectType& type) const {
    std::set<ObjectId> out;
    for (const auto& o : objects_)
      if (o.type == type) out.insert(o);
    return out;
  }

 private:
  std::set<ObjectType> types_;
  std::set<ObjectId> objects_;
  std::vector<Event> events_;
  std::map<std::string, ObjectType> type_of_;
  std::map<std::string, std::vector<std::size_t>> events_of_;
};

}  // namespace opidforge
