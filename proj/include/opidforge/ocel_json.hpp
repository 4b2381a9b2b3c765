#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"
#include "opidforge/ocel.hpp"

// OCEL ingestion. Two schemas are accepted: the native JSON format documented
// in docs/formats.md and a subset of OCEL 2.0 JSON (relationships are mapped
// to the event's object set, qualifiers ignored).

namespace opidforge {

enum class OcelFormat { NativeJson, Ocel2Json };

namespace detail {

inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

// ISO-8601 instant, e.g. "1970-01-01T00:00:01Z", "2024-05-01T10:30:00.250+02:00".
inline std::int64_t parse_instant_micros(const std::string& s) {
  auto fail = [&]() -> std::int64_t {
    throw Error("malformed-document", "bad timestamp '" + s + "'");
  };
  const char* p = s.c_str();
  auto digits = [&](int n, long long& out) {
    out = 0;
    for (int i = 0; i < n; ++i) {
      if (*p < '0' || *p > '9') return false;
      out = out * 10 + (*p++ - '0');
    }
    return true;
  };
  long long year, month, day, hour = 0, minute = 0, second = 0;
  if (!digits(4, year) || *p++ != '-' || !digits(2, month) || *p++ != '-' || !digits(2, day))
    return fail();
  if (*p == 'T' || *p == 't' || *p == ' ') {
    ++p;
    if (!digits(2, hour) || *p++ != ':' || !digits(2, minute)) return fail();
    if (*p == ':') {
      ++p;
      if (!digits(2, second)) return fail();
    }
  }
  std::int64_t micros = 0;
  if (*p == '.') {
    ++p;
    std::int64_t scale = 100000;
    if (*p < '0' || *p > '9') return fail();
    while (*p >= '0' && *p <= '9') {
      if (scale > 0) micros += (*p - '0') * scale;
      scale /= 10;
      ++p;
    }
  }
  std::int64_t offset_seconds = 0;
  if (*p == 'Z' || *p == 'z') {
    ++p;
  } else if (*p == '+' || *p == '-') {
    int sign = *p == '+' ? 1 : -1;
    ++p;
    long long oh, om = 0;
    if (!digits(2, oh)) return fail();
    if (*p == ':') ++p;
    if (*p >= '0' && *p <= '9' && !digits(2, om)) return fail();
    offset_seconds = sign * (oh * 3600 + om * 60);
  }
  if (*p != '\0') return fail();
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60)
    return fail();
  std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  std::int64_t seconds = days * 86400 + hour * 3600 + minute * 60 + second - offset_seconds;
  return seconds * 1000000 + micros;
}

inline nlohmann::json parse_json_document(std::string_view bytes) {
  nlohmann::json doc = nlohmann::json::parse(bytes, nullptr, false);
  if (doc.is_discarded()) throw Error("malformed-document", "input is not valid JSON");
  return doc;
}

// Accepts an ISO string, a plain number (seconds), or nothing; ordered lists
// without timestamps get synthetic increasing integers.
inline std::int64_t event_time(const nlohmann::json& ev, std::size_t index) {
  if (!ev.contains("time") || ev["time"].is_null())
    return static_cast<std::int64_t>(index) * 1000000;
  const auto& t = ev["time"];
  if (t.is_number()) return static_cast<std::int64_t>(t.get<double>() * 1000000.0);
  if (t.is_string()) return parse_instant_micros(t.get<std::string>());
  throw Error("malformed-document", "event time must be a string or number");
}

}  // namespace detail

inline Ocel parse_ocel(std::string_view bytes, OcelFormat format) {
  nlohmann::json doc = detail::parse_json_document(bytes);
  if (!doc.is_object()) throw Error("malformed-document", "top level must be an object");

  std::set<ObjectType> types;
  std::set<ObjectId> objects;
  std::map<std::string, ObjectType> type_of;
  std::vector<Event> events;

  auto require = [&](const nlohmann::json& node, const char* key,
                     const std::string& where) -> const nlohmann::json& {
    if (!node.contains(key))
      throw Error("malformed-document", where + ": missing key '" + key + "'");
    return node[key];
  };

  if (format == OcelFormat::NativeJson) {
    for (const auto& t : require(doc, "types", "document"))
      types.insert(ObjectType{t.get<std::string>()});
    for (const auto& o : require(doc, "objects", "document")) {
      ObjectType ty{require(o, "type", "object entry").get<std::string>()};
      std::string id = require(o, "id", "object entry").get<std::string>();
      auto [it, fresh] = type_of.emplace(id, ty);
      if (!fresh && it->second != ty)
        throw Error("type-conflict", "object id '" + id + "' appears with two types");
      objects.insert(ObjectId{id, ty});
    }
    std::size_t index = 0;
    for (const auto& e : require(doc, "events", "document")) {
      Event ev;
      ev.id = require(e, "id", "event entry").get<std::string>();
      ev.activity = require(e, "activity", "event '" + ev.id + "'").get<std::string>();
      ev.time_micros = detail::event_time(e, index++);
      for (const auto& oid : require(e, "objects", "event '" + ev.id + "'")) {
        std::string id = oid.get<std::string>();
        auto it = type_of.find(id);
        if (it == type_of.end())
          throw Error("dangling-object-reference",
                      "event '" + ev.id + "' references unknown object '" + id + "'");
        ev.objects.insert(ObjectId{id, it->second});
      }
      events.push_back(std::move(ev));
    }
  } else {
    for (const auto& t : require(doc, "objectTypes", "document")) {
      if (t.is_string())
        types.insert(ObjectType{t.get<std::string>()});
      else
        types.insert(ObjectType{require(t, "name", "objectTypes entry").get<std::string>()});
    }
    for (const auto& o : require(doc, "objects", "document")) {
      ObjectType ty{require(o, "type", "object entry").get<std::string>()};
      std::string id = require(o, "id", "object entry").get<std::string>();
      types.insert(ty);
      auto [it, fresh] = type_of.emplace(id, ty);
      if (!fresh && it->second != ty)
        throw Error("type-conflict", "object id '" + id + "' appears with two types");
      objects.insert(ObjectId{id, ty});
    }
    std::size_t index = 0;
    for (const auto& e : require(doc, "events", "document")) {
      Event ev;
      ev.id = require(e, "id", "event entry").get<std::string>();
      if (e.contains("activity"))
        ev.activity = e["activity"].get<std::string>();
      else
        ev.activity = require(e, "type", "event '" + ev.id + "'").get<std::string>();
      ev.time_micros = detail::event_time(e, index++);
      for (const auto& rel : require(e, "relationships", "event '" + ev.id + "'")) {
        std::string id = require(rel, "objectId", "relationship").get<std::string>();
        auto it = type_of.find(id);
        if (it == type_of.end())
          throw Error("dangling-object-reference",
                      "event '" + ev.id + "' references unknown object '" + id + "'");
        ev.objects.insert(ObjectId{id, it->second});
      }
      events.push_back(std::move(ev));
    }
  }
  return Ocel::build(std::move(types), std::move(objects), std::move(events));
}

// Some tooling does not know which dialect a file uses; key shape decides.
inline OcelFormat sniff_ocel_format(std::string_view bytes) {
  nlohmann::json doc = detail::parse_json_document(bytes);
  if (doc.is_object() && doc.contains("objectTypes")) return OcelFormat::Ocel2Json;
  return OcelFormat::NativeJson;
}

inline std::string write_ocel_json(const Ocel& log) {
  nlohmann::json doc;
  doc["types"] = nlohmann::json::array();
  for (const auto& t : log.types()) doc["types"].push_back(t.name);
  doc["objects"] = nlohmann::json::array();
  for (const auto& o : log.objects())
    doc["objects"].push_back({{"id", o.id}, {"type", o.type.name}});
  doc["events"] = nlohmann::json::array();
  for (const auto& e : log.events()) {
    nlohmann::json ev;
    ev["id"] = e.id;
    ev["activity"] = e.activity;
    ev["time"] = static_cast<double>(e.time_micros) / 1000000.0;
    ev["objects"] = nlohmann::json::array();
    for (const auto& o : e.objects) ev["objects"].push_back(o.id);
    doc["events"].push_back(std::move(ev));
  }
  return doc.dump(2) + "\n";
}

}  // namespace opidforge
