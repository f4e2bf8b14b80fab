#pragma once

// Runnable versions of the bundled decision problems, and their export as
// JSON files (corpus/<bundle>/...).

#include <filesystem>
#include <string>
#include <vector>

#include "bf/json_io.hpp"

namespace bf::examples {

struct Check {
  std::string name;
  std::string expected;
  std::string actual;
  bool pass;
};

struct BundleRun {
  std::string bundle;
  std::vector<Check> checks;
  bool ok() const;
};

struct BundleInfo {
  std::string name;
  std::string description;
};

std::vector<BundleInfo> bundles();

/// `n` is the ball count for one-red-ball and ignored elsewhere. Throws
/// Error(not_found) for an unknown bundle.
BundleRun run_bundle(const std::string& name, int n = 5);

struct BundleFile {
  std::string path;  // relative to the bundle directory
  std::string kind;  // lottery, assessment, compound, states, embedding
  io::json doc;
};

/// manifest.json first, then the data files.
std::vector<BundleFile> bundle_files(const std::string& name);

/// Writes <dir>/<name>/... and returns the paths written.
std::vector<std::filesystem::path> export_bundle(const std::string& name,
                                                 const std::filesystem::path& dir);

/// Loads a bundle file by kind with the json_io loaders; throws on any
/// shape or invariant problem.
void validate_file(const std::string& kind, const io::json& doc);

io::json to_json(const BundleRun& run);

}  // namespace bf::examples
