#pragma once

#include <string>
#include <vector>

#include "cwstein/spin_measures.hpp"

namespace cwstein {

std::string version_string();

// Collects artifacts for one run; files are written through a temp name and renamed.
class ArtifactDir {
 public:
  explicit ArtifactDir(std::string root);

  const std::string& root() const { return root_; }
  std::string path(const std::string& name) const;
  void write_text(const std::string& name, const std::string& text);
  void write_json(const std::string& name, const Json& j);
  const std::vector<std::string>& written() const { return written_; }

 private:
  std::string root_;
  std::vector<std::string> written_;
};

std::string dump_json(const Json& j);

Json make_manifest(const std::string& command, const Json& effective_config,
                   const std::vector<std::string>& outputs, int exit_code,
                   const std::string& error = "");

}  // namespace cwstein
