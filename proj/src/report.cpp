#include "cwstein/report.hpp"

#include <boost/version.hpp>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace cwstein {

std::string version_string() { return "0.1.0"; }

ArtifactDir::ArtifactDir(std::string root) : root_(std::move(root)) {}

std::string ArtifactDir::path(const std::string& name) const {
  return (std::filesystem::path(root_) / name).string();
}

void ArtifactDir::write_text(const std::string& name, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target = fs::path(root_) / name;
  fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    os << text;
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
  written_.push_back(name);
}

void ArtifactDir::write_json(const std::string& name, const Json& j) { write_text(name, dump_json(j)); }

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json make_manifest(const std::string& command, const Json& effective_config,
                   const std::vector<std::string>& outputs, int exit_code, const std::string& error) {
  Json j{{"tool", "cwstein"},
              {"version", version_string()},
              {"command", command},
              {"seed", effective_config.value("seed", 1)},
              {"exit_code", exit_code},
              {"effective_config", effective_config},
              {"outputs", outputs},
              {"build", {{"compiler", __VERSION__}, {"cxx_standard", static_cast<long>(__cplusplus)},
                         {"boost", BOOST_LIB_VERSION}}},
              {"rerun", "cwstein " + command + " --config config.json"}};
  if (!error.empty()) j["error"] = error;
  return j;
}

}  // namespace cwstein
