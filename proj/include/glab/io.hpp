#pragma once

// Serialization of vectors, tables and reports; CSV and plot data; run
// manifests written next to output files.

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "glab/core.hpp"
#include "glab/experiments.hpp"
#include "glab/greedy.hpp"
#include "glab/params.hpp"

namespace glab::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

json to_json(const SparseVector& x);
SparseVector sparse_from_json(const json& j);
/// Whitespace-separated `index:value` pairs; a complex value is written `re,im`.
SparseVector parse_sparse_text(const std::string& text);
std::string to_text(const SparseVector& x);
/// A path to a JSON or text file, or inline text.
SparseVector load_vector(const std::string& arg);

json to_json(const IndexSet& a);
json to_json(const SignPattern& s);
json to_json(const ParamTable& t);
json to_json(const BoundCheck& b);
json to_json(const WitnessReport& r);
json to_json(const ChebyshevStep& s);
json to_json(const SigmaResult& s);
json to_json(const ConvergenceReport& r);
json to_json(const LemmaSuiteResult& r);

/// Two-space indented dump with a trailing newline.
std::string dump(const json& j);

std::string table_csv(const ParamTable& t);
/// Two whitespace-separated columns per line.
std::string plot_data(const std::vector<std::pair<double, double>>& rows);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

struct RunManifest {
  std::string tool_version;
  std::vector<std::string> command_line;
  std::string space;
  std::uint64_t seed = 0;
  json tolerances = json::object();
  std::string timestamp;
  std::string output_digest;  // sha256 of the output bytes

  json to_json() const;
};

std::string sha256_hex(const std::string& bytes);
std::string utc_timestamp();
/// Sidecar path `<out>.manifest.json`.
std::string manifest_path(const std::string& out);

}  // namespace glab::io
