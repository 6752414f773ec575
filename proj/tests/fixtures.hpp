#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "flatfifo/model.hpp"

namespace fixtures {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string path(const std::string& name) { return std::string(FLATFIFO_SOURCE_DIR) + "/tests/" + name; }

inline flatfifo::FifoMachine load(const std::string& name) {
  return flatfifo::parse_machine(read_file(path("fixtures/" + name + ".ff")));
}

}  // namespace fixtures
