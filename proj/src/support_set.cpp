#include "sparseatt/support_set.hpp"

#include <stdexcept>
#include <string>

namespace sparseatt {

std::size_t SupportSets::max_row_size() const {
  std::size_t worst = 0;
  for (const auto& r : rows)
    if (r.size() > worst) worst = r.size();
  return worst;
}

std::size_t SupportSets::total_size() const {
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  return total;
}

void SupportSets::validate() const {
  if (rows.size() != scores.size()) {
    throw std::logic_error("SupportSets: rows/scores length mismatch");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != scores[i].size()) {
      throw std::logic_error("SupportSets: row " + std::to_string(i) +
                             " has mismatched index/score lengths");
    }
    for (std::size_t t = 0; t < rows[i].size(); ++t) {
      if (rows[i][t] >= n) {
        throw std::logic_error("SupportSets: index out of range in row " + std::to_string(i));
      }
      if (t > 0 && rows[i][t] <= rows[i][t - 1]) {
        throw std::logic_error("SupportSets: row " + std::to_string(i) +
                               " is not sorted duplicate-free");
      }
    }
  }
}

std::size_t mismatched_rows(const SupportSets& a, const SupportSets& b) {
  if (a.n != b.n || a.rows.size() != b.rows.size()) {
    throw std::invalid_argument("mismatched_rows: incompatible set families");
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i] != b.rows[i] || a.scores[i] != b.scores[i]) ++count;
  }
  return count;
}

}  // namespace sparseatt
