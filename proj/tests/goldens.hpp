#pragma once

#include <string>

#include "idiomgen/instantiate.hpp"

namespace testing_support {

// Explicit recursive read loop with a let-bound modified sum. The helper is
// started as `go 0 []`; it takes a counter and the list.
inline const std::string kExplicitLoopProgram = R"(main = do
  x <- readLn
  y <- readLn
  let
    go i list
      | i == x = pure list
      | otherwise = do
        v <- readLn
        go (i+1) (list ++ [v])
  xs <- go 0 []
  let res = sum (filter (== y) xs ++ xs)
  print res
)";

inline const std::string kReplicateProgram = R"(main = do
  x <- readLn
  y <- readLn
  xs <- replicateM x readLn
  print $ sum (filter (== y) xs ++ xs)
)";

// Box ids of the modified-sum implementation.
inline const idiomgen::Choice kExplicitLoopChoice{{"x", 0}, {"y", 0}, {"xs", 1}, {"res", 0}, {"p", 0}};
inline const idiomgen::Choice kReplicateChoice{{"x", 0}, {"y", 0}, {"xs", 0}, {"res", 1}, {"p", 0}};

inline std::string strip_trailing_whitespace(const std::string& s) {
  std::string out, line;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '\n') {
      while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) line.pop_back();
      out += line;
      if (i < s.size()) out += '\n';
      line.clear();
    } else {
      line += s[i];
    }
  }
  while (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

}  // namespace testing_support
