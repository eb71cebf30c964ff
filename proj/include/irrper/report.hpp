#pragma once

// Report generation for the command-line driver: each mode produces one
// deterministic JSON document (complex numbers as {"re", "im"}, provenance
// tag per quantity); the approximation modes can also render CSV.

#include <string>

#include "json.hpp"

namespace irrper {

inline constexpr int kSchemaVersion = 1;

struct RunOptions {
  double lambda_re = 2.0;
  double lambda_im = 0.0;
  std::string mode = "verify";
  int m = 10;
  double tol = 0.0;  // 0 = precision default
  std::string precision = "double";
  std::string format = "json";
  bool timings = true;
};

// Executes one mode and returns the document. Throws std::invalid_argument
// on unusable options (mapped to exit code 2 by the driver); a document with
// "passed": false signals a verification failure (exit code 1).
nlohmann::ordered_json run_mode(const RunOptions& opts);

// JSON (default) or CSV rendering of the document.
std::string render(const nlohmann::ordered_json& doc, const std::string& format);

}  // namespace irrper
