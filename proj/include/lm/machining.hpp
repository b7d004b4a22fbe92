#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lm/model.hpp"

namespace lm {

struct PackTask {
  std::string name;
  std::filesystem::path file;
  TaskSpec spec;
};

/// A knowledge pack directory: model sources, sample tasks, a labelled corpus and a
/// provenance note per fact table.
struct KnowledgePack {
  std::string name;
  std::filesystem::path dir;
  std::vector<std::filesystem::path> sources;
  LogicalModel model;
  std::vector<PackTask> tasks;
  std::vector<Situation> situations;
  std::map<std::string, std::string> provenance;  // table -> note

  const PackTask* task(const std::string& name) const;
};

/// Reads `pack.manifest` and everything it names. Checks that every fact table has a
/// provenance note. Errors: ManifestMissing, parse errors with positions.
KnowledgePack load_pack(const std::filesystem::path& dir);

/// Closed-form feed of an end-mill operation:
/// b2·b3·b4·b5·10000·cutting_speed/π/diameter. Errors: ZeroDiameter.
double end_mill_feed(double b2, double b3, double b4, double b5, double cutting_speed,
                     double diameter);

}  // namespace lm
