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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace seqrec {

struct ItemInfo {
  std::int32_t id = 0;
  std::string name;
  bool purchasable = false;
  bool consumable = false;
};

struct HeroInfo {
  std::int32_t id = 0;
  std::string name;
};

// Item metadata table. Ids are unique but need not be contiguous.
// CSV layout: header "item_id,name,purchasable,consumable", flags are 0/1.
class ItemVocab {
 public:
  ItemVocab() = default;
  explicit ItemVocab(std::vector<ItemInfo> entries);

  static ItemVocab from_csv(std::istream& in);
  static ItemVocab from_csv_file(const std::string& path);
  void to_csv(std::ostream& out) const;
  void to_csv_file(const std::string& path) const;

  const ItemInfo* find(std::int32_t id) const;
  bool contains(std::int32_t id) const { return find(id) != nullptr; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<ItemInfo>& entries() const { return entries_; }

 private:
  std::vector<ItemInfo> entries_;
  std::unordered_map<std::int32_t, std::size_t> index_;
};

// Hero metadata table. CSV layout: header "hero_id,name".
class HeroVocab {
 public:
  HeroVocab() = default;
  explicit HeroVocab(std::vector<HeroInfo> entries);

  static HeroVocab from_csv(std::istream& in);
  static HeroVocab from_csv_file(const std::string& path);
  void to_csv(std::ostream& out) const;
  void to_csv_file(const std::string& path) const;

  const HeroInfo* find(std::int32_t id) const;
  bool contains(std::int32_t id) const { return find(id) != nullptr; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<HeroInfo>& entries() const { return entries_; }

 private:
  std::vector<HeroInfo> entries_;
  std::unordered_map<std::int32_t, std::size_t> index_;
};

}  // namespace seqrec
