#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace forumpaths::cli {

/// Output files staged in memory and written together. Nothing reaches
/// the output directory unless every artifact was produced; each file is
/// written to a temporary name and renamed into place.
class ArtifactSet {
 public:
  void add(std::string name, std::string content);
  bool empty() const noexcept { return files_.empty(); }
  std::size_t size() const noexcept { return files_.size(); }
  const std::map<std::string, std::string>& files() const noexcept { return files_; }
  void merge(ArtifactSet other);

  /// Returns the written paths.
  std::vector<std::filesystem::path> commit(const std::filesystem::path& dir) const;

 private:
  std::map<std::string, std::string> files_;
};

std::string read_text_file(const std::filesystem::path& path);

/// Forum ids become file-name stems: characters outside [A-Za-z0-9._-]
/// are replaced by '_'.
std::string file_stem_for(std::string_view forum_id);

/// key = value pairs from a plain-text config file. '#' and ';' start
/// comments; keys are normalized to option names (underscores become
/// dashes, leading dashes stripped).
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

}  // namespace forumpaths::cli
