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

#include "seqrec/data/vocab.hpp"

#include <fstream>
#include <sstream>

#include "seqrec/common.hpp"

namespace seqrec {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::int32_t parse_id(const std::string& s, const char* what, std::size_t line) {
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<std::int32_t>(v);
  } catch (const std::exception&) {
    throw DataError(std::string("bad ") + what + " at csv line " +
                    std::to_string(line) + ": '" + s + "'");
  }
}

bool parse_flag(const std::string& s, const char* what, std::size_t line) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw DataError(std::string("bad ") + what + " flag at csv line " +
                  std::to_string(line) + ": '" + s + "' (want 0 or 1)");
}

}  // namespace

ItemVocab::ItemVocab(std::vector<ItemInfo> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto [it, inserted] = index_.emplace(entries_[i].id, i);
    if (!inserted) {
      throw DataError("duplicate item_id in vocab: " + std::to_string(entries_[i].id));
    }
  }
}

ItemVocab ItemVocab::from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty item vocab csv");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "item_id,name,purchasable,consumable") {
    throw DataError("item vocab csv header mismatch: '" + line + "'");
  }
  std::vector<ItemInfo> entries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != 4) {
      throw DataError("item vocab csv line " + std::to_string(line_no) +
                      ": expected 4 fields, got " + std::to_string(f.size()));
    }
    ItemInfo info;
    info.id = parse_id(f[0], "item_id", line_no);
    info.name = f[1];
    info.purchasable = parse_flag(f[2], "purchasable", line_no);
    info.consumable = parse_flag(f[3], "consumable", line_no);
    entries.push_back(std::move(info));
  }
  return ItemVocab(std::move(entries));
}

ItemVocab ItemVocab::from_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open item vocab: " + path);
  return from_csv(in);
}

void ItemVocab::to_csv(std::ostream& out) const {
  out << "item_id,name,purchasable,consumable\n";
  for (const auto& e : entries_) {
    out << e.id << ',' << e.name << ',' << (e.purchasable ? 1 : 0) << ','
        << (e.consumable ? 1 : 0) << '\n';
  }
}

void ItemVocab::to_csv_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write item vocab: " + path);
  to_csv(out);
}

const ItemInfo* ItemVocab::find(std::int32_t id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

HeroVocab::HeroVocab(std::vector<HeroInfo> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto [it, inserted] = index_.emplace(entries_[i].id, i);
    if (!inserted) {
      throw DataError("duplicate hero_id in vocab: " + std::to_string(entries_[i].id));
    }
  }
}

HeroVocab HeroVocab::from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty hero vocab csv");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "hero_id,name") {
    throw DataError("hero vocab csv header mismatch: '" + line + "'");
  }
  std::vector<HeroInfo> entries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != 2) {
      throw DataError("hero vocab csv line " + std::to_string(line_no) +
                      ": expected 2 fields, got " + std::to_string(f.size()));
    }
    HeroInfo info;
    info.id = parse_id(f[0], "hero_id", line_no);
    info.name = f[1];
    entries.push_back(std::move(info));
  }
  return HeroVocab(std::move(entries));
}

HeroVocab HeroVocab::from_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open hero vocab: " + path);
  return from_csv(in);
}

void HeroVocab::to_csv(std::ostream& out) const {
  out << "hero_id,name\n";
  for (const auto& e : entries_) out << e.id << ',' << e.name << '\n';
}

void HeroVocab::to_csv_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write hero vocab: " + path);
  to_csv(out);
}

const HeroInfo* HeroVocab::find(std::int32_t id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

}  // namespace seqrec
