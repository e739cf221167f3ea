#include "botdetect/chartable.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "botdetect/errors.hpp"
#include "botdetect/unicode.hpp"
#include "botdetect/util.hpp"

namespace botdetect {

namespace {
constexpr const char* kMagic = "botdetect-chartable";
}

double NameCharTable::prob(char32_t cp) const {
  auto it = probs.find(cp);
  return it != probs.end() ? it->second : floor_prob();
}

NameCharTable build_char_table(const std::vector<std::string>& names) {
  std::map<char32_t, std::int64_t> counts;
  std::int64_t total = 0;
  for (const auto& name : names) {
    for (char32_t cp : utf8_decode(name)) {
      ++counts[cp];
      ++total;
    }
  }
  if (total == 0) {
    raise(ErrorCode::EmptyCorpus, "no characters in name corpus");
  }
  NameCharTable table;
  table.total_chars = total;
  for (const auto& [cp, count] : counts) {
    table.probs[cp] = static_cast<double>(count) / static_cast<double>(total);
  }
  return table;
}

double name_entropy(const std::string& name, const NameCharTable& table) {
  double h = 0.0;
  for (char32_t cp : utf8_decode(name)) {
    const double p = table.prob(cp);
    h -= p * std::log2(p);
  }
  return h;
}

void save_char_table(const NameCharTable& table, std::ostream& out) {
  out << kMagic << ' ' << table.version << '\n';
  out << "total " << format_int(table.total_chars) << '\n';
  for (const auto& [cp, p] : table.probs) {
    out << format_int(static_cast<std::int64_t>(cp)) << ' ' << format_double(p)
        << '\n';
  }
}

void save_char_table(const NameCharTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  save_char_table(table, out);
  if (!out) raise(ErrorCode::IoError, "write failure on '" + path + "'");
}

NameCharTable load_char_table(std::istream& in) {
  std::string magic, version;
  if (!(in >> magic >> version)) {
    raise(ErrorCode::ParseError, "empty character table");
  }
  if (magic != kMagic) {
    raise(ErrorCode::ParseError, "not a character table file");
  }
  if (version != "v1") {
    raise(ErrorCode::VersionMismatch, "character table version '" + version + "'");
  }
  std::string key;
  if (!(in >> key) || key != "total") {
    raise(ErrorCode::ParseError, "missing total line");
  }
  std::string total_text;
  in >> total_text;
  NameCharTable table;
  table.version = version;
  table.total_chars = parse_int(total_text);
  if (table.total_chars <= 0) {
    raise(ErrorCode::ParseError, "non-positive character total");
  }
  std::string cp_text, prob_text;
  while (in >> cp_text >> prob_text) {
    const auto cp = parse_int(cp_text);
    const auto p = parse_double(prob_text);
    if (cp < 0 || cp > 0x10FFFF || !(p > 0.0) || p > 1.0) {
      raise(ErrorCode::ParseError, "bad table entry '" + cp_text + "'");
    }
    table.probs[static_cast<char32_t>(cp)] = p;
  }
  if (table.probs.empty()) {
    raise(ErrorCode::ParseError, "character table has no entries");
  }
  return table;
}

NameCharTable load_char_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "'");
  return load_char_table(in);
}

}  // namespace botdetect
