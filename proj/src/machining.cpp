#include "lm/machining.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

#include "lm/error.hpp"
#include "lm/parser.hpp"

namespace lm {

const PackTask* KnowledgePack::task(const std::string& name) const {
  for (const auto& t : tasks)
    if (t.name == name) return &t;
  return nullptr;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

KnowledgePack load_pack(const std::filesystem::path& dir) {
  const auto manifest = dir / "pack.manifest";
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::ManifestMissing, "no pack.manifest in '" + dir.string() + "'");

  KnowledgePack pack;
  pack.dir = dir;
  std::vector<std::pair<std::string, std::string>> task_files;
  std::vector<std::string> corpus_files;
  std::string line;
  std::uint32_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    SourcePos at{manifest.string(), lineno, 1};
    auto colon = line.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::SyntaxError, "expected 'key: value'", at);
    std::string key = trim(line.substr(0, colon));
    std::istringstream rest(line.substr(colon + 1));
    if (key == "name") {
      rest >> pack.name;
    } else if (key == "sources") {
      std::string f;
      while (rest >> f) pack.sources.push_back(dir / f);
    } else if (key == "task") {
      std::string name, file;
      if (!(rest >> name >> file)) throw Error(ErrorCode::SyntaxError, "expected 'task: NAME FILE'", at);
      task_files.emplace_back(name, file);
    } else if (key == "situations") {
      std::string f;
      while (rest >> f) corpus_files.push_back(f);
    } else if (key == "provenance") {
      std::string table;
      rest >> table;
      std::string note;
      std::getline(rest, note);
      pack.provenance[table] = trim(note);
    } else {
      throw Error(ErrorCode::SyntaxError, "unknown manifest key '" + key + "'", at);
    }
  }
  if (pack.sources.empty())
    throw Error(ErrorCode::ManifestMissing, "pack.manifest names no model sources", {manifest.string(), 0, 0});

  std::vector<SourceText> texts;
  for (const auto& p : pack.sources) texts.push_back(SourceText{p.string(), read_file(p)});
  pack.model = parse_model(texts, dir);

  for (const auto& sys : pack.model.facts)
    for (const auto& [name, _] : sys.tables)
      if (!pack.provenance.count(name))
        throw Error(ErrorCode::ManifestMissing, "table '" + name + "' has no provenance note",
                    {manifest.string(), 0, 0});

  for (const auto& [name, file] : task_files)
    pack.tasks.push_back(PackTask{name, dir / file, load_task_file(dir / file, pack.model)});
  for (const auto& f : corpus_files) {
    auto path = dir / f;
    auto more = parse_corpus(read_file(path), pack.model, ParseOptions{path.string(), dir});
    pack.situations.insert(pack.situations.end(), more.begin(), more.end());
  }
  return pack;
}

double end_mill_feed(double b2, double b3, double b4, double b5, double cutting_speed,
                     double diameter) {
  if (diameter == 0) throw Error(ErrorCode::ZeroDiameter, "end mill diameter is zero");
  return b2 * b3 * b4 * b5 * 10000.0 * cutting_speed / std::numbers::pi / diameter;
}

}  // namespace lm
