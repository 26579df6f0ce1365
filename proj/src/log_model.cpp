/*
 * Copyright 2026 The slowpool authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "slowpool/log_model.hpp"

#include <charconv>
#include <unordered_map>

#include "slowpool/errors.hpp"

namespace slowpool {

namespace {

using Fields = std::unordered_map<std::string_view, std::string_view>;

Fields split_payload(std::string_view payload) {
  Fields fields;
  std::size_t pos = 0;
  while (pos < payload.size()) {
    const std::size_t end = payload.find(' ', pos);
    const std::string_view token =
        payload.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    const std::size_t eq = token.find('=');
    if (eq != std::string_view::npos) {
      fields.emplace(token.substr(0, eq), token.substr(eq + 1));
    }
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return fields;
}

std::int64_t field_int(const Fields& fields, std::string_view key) {
  const auto it = fields.find(key);
  if (it == fields.end()) throw MalformedError("log", "missing field " + std::string(key));
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
  if (ec != std::errc{} || ptr != it->second.data() + it->second.size()) {
    throw MalformedError("log", "bad integer in field " + std::string(key));
  }
  return v;
}

std::string field_str(const Fields& fields, std::string_view key) {
  const auto it = fields.find(key);
  if (it == fields.end()) throw MalformedError("log", "missing field " + std::string(key));
  return std::string(it->second);
}

}  // namespace

ParsedLog parse_log(const EventLog& log) {
  ParsedLog out;
  for (const auto& entry : log.entries()) {
    out.end_at = entry.at;
    const Fields f = split_payload(entry.payload);

    if (entry.kind == "ConnSpec") {
      ParsedLog::Conn conn;
      conn.id = field_int(f, "conn");
      conn.spec.at = entry.at;
      conn.spec.src_ip = IpAddr::parse(field_str(f, "ip"));
      conn.spec.recv_window = field_int(f, "win");
      conn.spec.read_rate = field_int(f, "rate");
      conn.spec.response_size = field_int(f, "size");
      conn.spec.truth =
          field_str(f, "label") == "attack" ? TruthLabel::Attack : TruthLabel::Legit;
      conn.spec.is_probe = field_int(f, "probe") != 0;
      out.conns.emplace(conn.id, std::move(conn));
    } else if (entry.kind == "Admit") {
      auto& conn = out.conns.at(field_int(f, "conn"));
      conn.admitted_at = entry.at;
      conn.zone = static_cast<std::int32_t>(field_int(f, "zone"));
      out.pool_samples.push_back(
          {entry.at, conn.zone, field_int(f, "pool")});
    } else if (entry.kind == "Reject") {
      out.conns.at(field_int(f, "conn")).rejected = true;
    } else if (entry.kind == "Deliver") {
      auto& conn = out.conns.at(field_int(f, "conn"));
      conn.delivers.push_back({entry.at, field_int(f, "bytes"), field_int(f, "delivered")});
    } else if (entry.kind == "Close") {
      auto& conn = out.conns.at(field_int(f, "conn"));
      ParsedLog::Close close;
      close.at = entry.at;
      close.reason = field_str(f, "reason");
      close.zone = static_cast<std::int32_t>(field_int(f, "zone"));
      if (f.count("group") != 0) close.group = field_str(f, "group");
      conn.close = std::move(close);
      out.pool_samples.push_back(
          {entry.at, static_cast<std::int32_t>(field_int(f, "zone")), field_int(f, "pool")});
    } else if (entry.kind == "ViewRow") {
      const auto zone = static_cast<std::int32_t>(field_int(f, "zone"));
      if (out.views.empty() || out.views.back().at != entry.at ||
          out.views.back().zone != zone) {
        out.views.push_back({entry.at, zone, {}});
      }
      DefenseView row;
      row.conn_id = field_int(f, "conn");
      row.src_ip = IpAddr::parse(field_str(f, "ip"));
      row.opened_at = micros(field_int(f, "opened"));
      row.delivered = field_int(f, "delivered");
      row.last_progress_at = micros(field_int(f, "last"));
      out.views.back().rows.push_back(row);
    } else if (entry.kind == "AnalysisGroup") {
      out.groups.push_back({entry.at, static_cast<std::int32_t>(field_int(f, "zone")),
                            field_str(f, "key"), field_int(f, "size"),
                            field_int(f, "dropped") != 0});
    } else if (entry.kind == "AnalysisSummary") {
      if (out.armed_cycles.empty() || out.armed_cycles.back() != entry.at) {
        out.armed_cycles.push_back(entry.at);
      }
    }
  }
  return out;
}

std::vector<ArrivalSpec> extract_arrivals(const ParsedLog& log) {
  // ConnSpec ids are assigned in scheduling order, so ascending id order is
  // the original order.
  std::vector<ArrivalSpec> out;
  out.reserve(log.conns.size());
  for (const auto& [id, conn] : log.conns) {
    out.push_back(conn.spec);
  }
  return out;
}

}  // namespace slowpool
