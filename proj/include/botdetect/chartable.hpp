#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace botdetect {

/// Character -> probability table built from a name corpus. Probabilities
/// are corpus frequencies (count / total characters); characters never seen
/// in the corpus fall back to the floor probability 1/(total_chars + 1).
struct NameCharTable {
  std::map<char32_t, double> probs;
  std::int64_t total_chars = 0;
  std::string version = "v1";

  double prob(char32_t cp) const;
  double floor_prob() const { return 1.0 / (static_cast<double>(total_chars) + 1.0); }
};

/// Counts code points across all names. Raises EmptyCorpus when no name
/// contributes a character.
NameCharTable build_char_table(const std::vector<std::string>& names);

/// Positional entropy of a name under the table:
/// H = -sum over character positions of P(c) * log2 P(c).
/// Repeated characters contribute once per occurrence; the sum is not
/// length-normalized. Empty name -> 0.
double name_entropy(const std::string& name, const NameCharTable& table);

void save_char_table(const NameCharTable& table, std::ostream& out);
void save_char_table(const NameCharTable& table, const std::string& path);
NameCharTable load_char_table(std::istream& in);
NameCharTable load_char_table(const std::string& path);

}  // namespace botdetect
