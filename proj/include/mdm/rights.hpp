#pragma once

#include "mdm/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mdm {

// Rights that can be granted on a multimedia work, encoded as a 6-bit mask.
enum class Right : uint8_t {
  Publication = 1 << 0,
  Revision = 1 << 1,
  Reproduction = 1 << 2,
  Exhibition = 1 << 3,
  Performance = 1 << 4,
  Broadcasting = 1 << 5,
};

struct AccessRights {
  uint8_t mask = 0;

  bool empty() const { return mask == 0; }
  bool contains(const AccessRights& other) const { return (other.mask & ~mask) == 0; }
  bool operator==(const AccessRights&) const = default;

  // "broadcasting,performance,..." (names sorted lexicographically)
  std::string names() const;
  static std::optional<AccessRights> from_mask(uint8_t mask); // nullopt on unknown bits
  static std::optional<AccessRights> from_names(const std::vector<std::string>& names);
  static std::optional<AccessRights> from_csv(const std::string& csv);
};

const std::vector<std::pair<std::string, uint8_t>>& right_name_table();

} // namespace mdm
