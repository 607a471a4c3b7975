#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pagesel/analysis.hpp"
#include "pagesel/funcset.hpp"
#include "pagesel/ir.hpp"

namespace pagesel_test {

inline std::string fixture(const std::string& name) {
  std::string path = std::string(PAGESEL_FIXTURE_DIR) + "/" + name;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// FuncSet from function names, for readable assertions.
inline pagesel::FuncSet names(const pagesel::Program& p, const std::vector<std::string>& fs) {
  pagesel::FuncSet s(static_cast<uint32_t>(p.functions.size()));
  for (const std::string& n : fs) s.insert(*p.find_function(n));
  return s;
}

inline pagesel::FuncId fid(const pagesel::Program& p, const std::string& name) {
  return *p.find_function(name);
}

inline pagesel::BlockId bid(const pagesel::Program& p, const std::string& func,
                            const std::string& block) {
  const pagesel::Function& f = p.functions[fid(p, func)];
  for (pagesel::BlockId b = 0; b < f.blocks.size(); ++b)
    if (f.blocks[b].name == block) return b;
  throw std::runtime_error("no block " + block + " in " + func);
}

}  // namespace pagesel_test
