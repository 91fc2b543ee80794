#pragma once

#include <string>
#include <vector>

namespace cohft {

/// Outcome of a structural check: one entry per invariant, failures carry a witness.
struct ValidationReport {
  struct Entry {
    std::string check;
    bool passed = true;
    std::string detail;
  };
  std::vector<Entry> entries;

  void add(std::string check, bool passed, std::string detail = {}) {
    entries.push_back({std::move(check), passed, std::move(detail)});
  }
  bool ok() const {
    for (const auto& e : entries)
      if (!e.passed) return false;
    return true;
  }
  const Entry* find(const std::string& check) const {
    for (const auto& e : entries)
      if (e.check == check) return &e;
    return nullptr;
  }
};

}  // namespace cohft
