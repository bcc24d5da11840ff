#include "mdm/rights.hpp"

#include <algorithm>
#include <sstream>

namespace mdm {

const std::vector<std::pair<std::string, uint8_t>>& right_name_table() {
  static const std::vector<std::pair<std::string, uint8_t>> table = {
      {"publication", static_cast<uint8_t>(Right::Publication)},
      {"revision", static_cast<uint8_t>(Right::Revision)},
      {"reproduction", static_cast<uint8_t>(Right::Reproduction)},
      {"exhibition", static_cast<uint8_t>(Right::Exhibition)},
      {"performance", static_cast<uint8_t>(Right::Performance)},
      {"broadcasting", static_cast<uint8_t>(Right::Broadcasting)},
  };
  return table;
}

std::string AccessRights::names() const {
  std::vector<std::string> out;
  for (const auto& [name, bit] : right_name_table())
    if (mask & bit) out.push_back(name);
  std::sort(out.begin(), out.end());
  std::string joined;
  for (size_t i = 0; i < out.size(); ++i) {
    if (i) joined += ",";
    joined += out[i];
  }
  return joined;
}

std::optional<AccessRights> AccessRights::from_mask(uint8_t mask) {
  if (mask & ~0x3f) return std::nullopt;
  return AccessRights{mask};
}

std::optional<AccessRights> AccessRights::from_names(const std::vector<std::string>& names) {
  AccessRights r;
  for (const auto& name : names) {
    bool found = false;
    for (const auto& [n, bit] : right_name_table()) {
      if (n == name) {
        r.mask |= bit;
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  }
  return r;
}

std::optional<AccessRights> AccessRights::from_csv(const std::string& csv) {
  std::vector<std::string> names;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t b = item.find_first_not_of(" \t");
    size_t e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    names.push_back(item.substr(b, e - b + 1));
  }
  return from_names(names);
}

} // namespace mdm
