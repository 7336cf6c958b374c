#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace idiomgen::prose {

using Sentences = std::vector<std::string>;

// Capitalizes the first letter and ends the sentence with a period.
inline std::string sentence_case(std::string_view raw) {
  std::size_t b = 0, e = raw.size();
  while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
  std::string s;
  bool space = false;
  for (char c : raw.substr(b, e - b)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !s.empty()) s += ' ';
    space = false;
    s += c;
  }
  if (s.empty()) return s;
  s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  char last = s.back();
  if (last != '.' && last != '!' && last != '?') s += '.';
  return s;
}

// One sentence per non-blank line.
inline Sentences split_sentences(std::string_view text) {
  Sentences out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto s = sentence_case(text.substr(start, end - start));
    if (!s.empty()) out.push_back(std::move(s));
    start = end + 1;
  }
  return out;
}

inline std::string render_prose(const Sentences& sentences) {
  std::string out;
  for (const auto& s : sentences) out += (out.empty() ? "" : " ") + s;
  return out;
}

}  // namespace idiomgen::prose
