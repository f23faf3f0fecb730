// One line per acceptance criterion. Exits non-zero on any failure that is
// not on the documented known-failure list.

#include <cstdlib>

#include "pinchflow/acceptance.hpp"

int main(int argc, char** argv) {
  pinchflow::acceptance::Options opt;
  opt.scenario_dir = PINCHFLOW_SCENARIO_DIR;
  for (int i = 1; i < argc; ++i) opt.only.insert(std::atoi(argv[i]));
  const auto results = pinchflow::acceptance::run_all(opt);
  return pinchflow::acceptance::print(results) == 0 ? 0 : 1;
}
