#pragma once

#include <string>
#include <vector>

namespace nlsframes {

struct DemoCheck {
  std::string name;
  double value = 0;      // measured
  double threshold = 0;  // pass when value <= threshold (or >= for lower-bound checks)
  bool lower_bound = false;
  bool pass = false;
};

struct DemoResult {
  std::string name;
  std::vector<DemoCheck> checks;
  bool pass = true;
  std::string summary_json() const;
};

// Named experiment bundles; out_dir may be empty (no artifacts written).
DemoResult run_demo(const std::string& name, const std::string& out_dir = "");
std::vector<std::string> demo_names();

}  // namespace nlsframes
