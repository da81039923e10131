#pragma once

#include <string>

#include <json.hpp>

namespace bergdiag::experiments {

// Structured experiment output: JSON document with an overall pass flag.
// {"schema": 1, "experiment": ..., "params": {...}, "results": {...},
//  "assertions": [{"name", "passed", "detail"}...], "passed": bool}
// Reports carry no timestamps: byte-identical across reruns of one spec.
struct Report {
  nlohmann::json doc;
  bool passed = false;

  std::string json() const { return doc.dump(2) + "\n"; }
  std::string csv() const;  // empty when the experiment has no CSV payload
};

// Dispatches on spec["experiment"]; fills every omitted parameter with its
// default and echoes the resolved set back into the report.
// Experiments: verify-ahs, counterexample, equivalence, coverage, margin,
// reconstruct, domain-export, parseval, coefficients.
Report run(const nlohmann::json& spec);
Report run_json(const std::string& spec_json);

// The named test family shared by the one-diagonal bound and the equivalence
// band: polynomials of degree <= 4 and poles at 2, -1, 1+i, 1/2+i.
const std::vector<std::string>& test_family();

}  // namespace bergdiag::experiments
