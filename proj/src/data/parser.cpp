// Copyright 2026 The seqrec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seqrec/data/parser.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "seqrec/common.hpp"

namespace seqrec {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Schema-level extraction; throws DataError on any type/domain violation.
// Relational checks (unknown ids, time ordering) are handled by the caller
// because they flag the match instead of rejecting the line.
MatchRecord parse_record(const json& j) {
  require_data(j.is_object(), "record is not a JSON object");
  const char* required[] = {"match_id", "start_time", "duration_s",
                            "game_mode", "abandoned", "sessions"};
  for (const char* key : required) {
    require_data(j.contains(key), std::string("missing field '") + key + "'");
  }

  MatchRecord m;
  require_data(j["match_id"].is_number_integer(), "match_id must be an integer");
  m.match_id = j["match_id"].get<std::int64_t>();
  require_data(j["start_time"].is_number_integer(), "start_time must be an integer");
  m.start_time = j["start_time"].get<std::int64_t>();
  require_data(j["duration_s"].is_number_integer(), "duration_s must be an integer");
  m.duration_s = j["duration_s"].get<std::int32_t>();
  require_data(m.duration_s >= 0, "duration_s must be >= 0");
  require_data(j["game_mode"].is_string(), "game_mode must be a string");
  m.game_mode = j["game_mode"].get<std::string>();
  require_data(j["abandoned"].is_boolean(), "abandoned must be a boolean");
  m.abandoned = j["abandoned"].get<bool>();

  require_data(j["sessions"].is_array(), "sessions must be an array");
  const auto& sessions = j["sessions"];
  require_data(sessions.size() <= 10, "more than 10 sessions");
  for (const auto& js : sessions) {
    require_data(js.is_object(), "session is not a JSON object");
    for (const char* key : {"player_slot", "hero_id", "team", "purchases"}) {
      require_data(js.contains(key), std::string("session missing field '") + key + "'");
    }
    Session s;
    require_data(js["player_slot"].is_number_integer(), "player_slot must be an integer");
    s.player_slot = js["player_slot"].get<std::int32_t>();
    require_data(s.player_slot >= 0 && s.player_slot <= 9, "player_slot out of range 0..9");
    require_data(js["hero_id"].is_number_integer(), "hero_id must be an integer");
    s.hero_id = js["hero_id"].get<std::int32_t>();
    require_data(js["team"].is_string(), "team must be a string");
    std::string team = js["team"].get<std::string>();
    if (team == "radiant") {
      s.team = Team::kRadiant;
    } else if (team == "dire") {
      s.team = Team::kDire;
    } else {
      throw DataError("team must be 'radiant' or 'dire', got '" + team + "'");
    }
    require_data(js["purchases"].is_array(), "purchases must be an array");
    for (const auto& jp : js["purchases"]) {
      require_data(jp.is_object(), "purchase is not a JSON object");
      require_data(jp.contains("item_id") && jp.contains("t_s"),
                   "purchase missing item_id or t_s");
      require_data(jp["item_id"].is_number_integer(), "item_id must be an integer");
      require_data(jp["t_s"].is_number_integer(), "t_s must be an integer");
      Purchase p;
      p.item_id = jp["item_id"].get<std::int32_t>();
      p.t_s = jp["t_s"].get<std::int32_t>();
      require_data(p.t_s >= 0, "t_s must be >= 0");
      s.purchases.push_back(p);
    }
    m.sessions.push_back(std::move(s));
  }
  return m;
}

// Relational validation against the vocabularies; returns an empty string
// when the match is consistent.
std::string validate_match(const MatchRecord& m, const ItemVocab& items,
                           const HeroVocab& heroes) {
  for (const auto& s : m.sessions) {
    if (!heroes.contains(s.hero_id)) {
      return "unknown hero_id " + std::to_string(s.hero_id);
    }
    std::int32_t prev_t = 0;
    for (const auto& p : s.purchases) {
      if (!items.contains(p.item_id)) {
        return "unknown item_id " + std::to_string(p.item_id);
      }
      if (p.t_s > m.duration_s) {
        return "purchase t_s " + std::to_string(p.t_s) + " exceeds duration " +
               std::to_string(m.duration_s);
      }
      if (p.t_s < prev_t) return "purchases not ordered by t_s";
      prev_t = p.t_s;
    }
  }
  return {};
}

}  // namespace

Dataset parse_matches(std::istream& in, const ItemVocab& items,
                      const HeroVocab& heroes, const ParseOptions& opts,
                      ParseReport* report) {
  Dataset d;
  d.items = items;
  d.heroes = heroes;
  ParseReport local;
  ParseReport& rep = report ? *report : local;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ++rep.lines_total;
    if (line.empty() || line == "\r") continue;
    MatchRecord m;
    try {
      json j = json::parse(line);
      m = parse_record(j);
    } catch (const json::exception& e) {
      std::string msg = "line " + std::to_string(line_no) + ": invalid JSON: " + e.what();
      if (opts.strict) throw DataError(msg);
      rep.skipped_lines.push_back({line_no, msg});
      continue;
    } catch (const DataError& e) {
      std::string msg = "line " + std::to_string(line_no) + ": " + e.what();
      if (opts.strict) throw DataError(msg);
      rep.skipped_lines.push_back({line_no, msg});
      continue;
    }
    m.invalid_reason = validate_match(m, items, heroes);
    if (!m.invalid_reason.empty()) {
      rep.invalid_matches.push_back({m.match_id, m.invalid_reason});
    }
    ++rep.matches_parsed;
    d.matches.push_back(std::move(m));
  }
  return d;
}

void write_matches(std::ostream& out, const Dataset& d) {
  for (const auto& m : d.matches) {
    ordered_json j;
    j["match_id"] = m.match_id;
    j["start_time"] = m.start_time;
    j["duration_s"] = m.duration_s;
    j["game_mode"] = m.game_mode;
    j["abandoned"] = m.abandoned;
    ordered_json sessions = ordered_json::array();
    for (const auto& s : m.sessions) {
      ordered_json js;
      js["player_slot"] = s.player_slot;
      js["hero_id"] = s.hero_id;
      js["team"] = s.team == Team::kRadiant ? "radiant" : "dire";
      ordered_json purchases = ordered_json::array();
      for (const auto& p : s.purchases) {
        purchases.push_back(ordered_json{{"item_id", p.item_id}, {"t_s", p.t_s}});
      }
      js["purchases"] = std::move(purchases);
      sessions.push_back(std::move(js));
    }
    j["sessions"] = std::move(sessions);
    out << j.dump() << '\n';
  }
}

Dataset load_dataset_dir(const std::string& dir, const ParseOptions& opts,
                         ParseReport* report) {
  namespace fs = std::filesystem;
  fs::path base(dir);
  auto items = ItemVocab::from_csv_file((base / "items.csv").string());
  auto heroes = HeroVocab::from_csv_file((base / "heroes.csv").string());
  std::ifstream in(base / "matches.jsonl");
  if (!in) throw DataError("cannot open " + (base / "matches.jsonl").string());
  return parse_matches(in, items, heroes, opts, report);
}

void save_dataset_dir(const std::string& dir, const Dataset& d) {
  namespace fs = std::filesystem;
  fs::path base(dir);
  fs::create_directories(base);
  d.items.to_csv_file((base / "items.csv").string());
  d.heroes.to_csv_file((base / "heroes.csv").string());
  std::ofstream out(base / "matches.jsonl");
  if (!out) throw DataError("cannot write " + (base / "matches.jsonl").string());
  write_matches(out, d);
}

}  // namespace seqrec
