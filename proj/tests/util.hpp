#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "plt/syntax.hpp"

inline std::string fixture_path(const std::string& name) {
  const char* dir = std::getenv("PLT_FIXTURES");
  return std::string(dir ? dir : "tests/fixtures") + "/" + name;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw plt::error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline plt::Signature load_signature(const std::string& name) {
  return plt::parse_signature(slurp(fixture_path(name)));
}
