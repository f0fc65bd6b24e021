#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gwlab/error.hpp"

namespace gwlab {

using PartySet = std::vector<std::size_t>;

/// Disjoint grouping {P_1, ..., P_m} of party indices. Members inside a block
/// are kept sorted; block order is significant (block 0 plays the role of P_1).
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<PartySet> blocks) : blocks_(std::move(blocks)) {
    for (auto& b : blocks_) std::sort(b.begin(), b.end());
    validate_shape();
  }

  static Partition singletons(std::size_t n) {
    std::vector<PartySet> blocks;
    for (std::size_t k = 0; k < n; ++k) blocks.push_back({k});
    return Partition(std::move(blocks));
  }

  /// Parses "0|1,2|3": blocks separated by '|', members by ','.
  static Partition parse(std::string_view text) {
    std::vector<PartySet> blocks;
    PartySet current;
    std::string number;
    auto flush_number = [&] {
      if (number.empty()) throw InvalidArgument("partition: empty member in '" + std::string(text) + "'");
      current.push_back(static_cast<std::size_t>(std::stoul(number)));
      number.clear();
    };
    for (char c : text) {
      if (c == ' ') continue;
      if (c >= '0' && c <= '9') {
        number.push_back(c);
      } else if (c == ',') {
        flush_number();
      } else if (c == '|') {
        flush_number();
        blocks.push_back(std::move(current));
        current.clear();
      } else {
        throw InvalidArgument(std::string("partition: unexpected character '") + c + "'");
      }
    }
    flush_number();
    blocks.push_back(std::move(current));
    return Partition(std::move(blocks));
  }

  const std::vector<PartySet>& blocks() const noexcept { return blocks_; }
  const PartySet& block(std::size_t i) const { return blocks_.at(i); }
  std::size_t size() const noexcept { return blocks_.size(); }

  /// Sorted union of all blocks.
  PartySet parties() const {
    PartySet all;
    for (const auto& b : blocks_) all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    return all;
  }

  bool is_complete(std::size_t n_parties) const {
    auto all = parties();
    return all.size() == n_parties && (all.empty() || all.back() == n_parties - 1);
  }

  /// Throws unless every member is < n_parties (and, if requested, the union covers all parties).
  void validate(std::size_t n_parties, bool require_complete) const {
    for (const auto& b : blocks_)
      for (auto p : b)
        if (p >= n_parties)
          throw InvalidArgument("partition: party " + std::to_string(p) + " out of range for " +
                                std::to_string(n_parties) + " parties");
    if (require_complete && !is_complete(n_parties))
      throw InvalidArgument("partition: blocks do not cover all " + std::to_string(n_parties) + " parties");
  }

  /// Members of block i joined by ','.
  std::string block_string(std::size_t i) const {
    std::string out;
    for (std::size_t j = 0; j < block(i).size(); ++j) {
      if (j) out += ',';
      out += std::to_string(block(i)[j]);
    }
    return out;
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      if (i) out += '|';
      out += block_string(i);
    }
    return out;
  }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  void validate_shape() const {
    if (blocks_.empty()) throw InvalidArgument("partition: no blocks");
    PartySet seen;
    for (const auto& b : blocks_) {
      if (b.empty()) throw InvalidArgument("partition: empty block");
      seen.insert(seen.end(), b.begin(), b.end());
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
      throw InvalidArgument("partition: blocks are not disjoint");
  }

  std::vector<PartySet> blocks_;
};

}  // namespace gwlab
