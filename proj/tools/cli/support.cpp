#include "support.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include <fmt/format.h>

#include "forumpaths/error.hpp"

namespace forumpaths::cli {

namespace fs = std::filesystem;

void ArtifactSet::add(std::string name, std::string content) {
  if (!files_.emplace(name, std::move(content)).second)
    throw std::logic_error(fmt::format("artifact '{}' produced twice", name));
}

void ArtifactSet::merge(ArtifactSet other) {
  for (auto& [name, content] : other.files_) add(name, std::move(content));
}

std::vector<fs::path> ArtifactSet::commit(const fs::path& dir) const {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));

  std::vector<fs::path> written;
  for (const auto& [name, content] : files_) {
    const auto target = dir / name;
    const auto tmp = dir / (name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw DataError(fmt::format("cannot write '{}'", tmp.string()));
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      if (!out) throw DataError(fmt::format("write to '{}' failed", tmp.string()));
    }
    fs::rename(tmp, target, ec);
    if (ec) throw DataError(fmt::format("cannot move '{}' into place: {}", target.string(), ec.message()));
    written.push_back(target);
  }
  return written;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string file_stem_for(std::string_view forum_id) {
  std::string out;
  for (char c : forum_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(fmt::format("{}:{}: expected key = value", path.string(), line_no));
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    for (char& c : key)
      if (c == '_') c = '-';
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.empty())
      throw std::invalid_argument(fmt::format("{}:{}: empty key", path.string(), line_no));
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

}  // namespace forumpaths::cli
