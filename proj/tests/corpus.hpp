#pragma once
// Shared access to the small-link corpus under data/: each .link file is a
// left tangle block followed by a right tangle block, and together they
// close up to the named link.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bkh/tangles.hpp"

namespace corpus {

inline std::string data_path(const std::string& name) {
  return std::string(BKH_DATA_DIR) + "/" + name;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::pair<bkh::TangleWord, bkh::TangleWord> load_link(
    const std::string& name) {
  return bkh::parse_link(slurp(data_path(name)));
}

// Every corpus link; closures: unknot, unknot, positive Hopf, right-handed
// trefoil, negative Hopf, unknot again (drawn with three mixed crossings).
inline const std::vector<std::string>& link_names() {
  static const std::vector<std::string> names = {
      "unknot.link", "unknot4.link", "hopf.link",
      "trefoil.link", "hopfneg.link", "mixed.link"};
  return names;
}

}  // namespace corpus
