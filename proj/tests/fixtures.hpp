#pragma once

// Generated corpora shared by the test binaries. Each (db, variant, seed)
// lands in its own directory under one temp root that is removed at exit.

#include <unistd.h>

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sqlgate/catalog.hpp"
#include "sqlgate/corpus.hpp"

namespace fixtures {

namespace fs = std::filesystem;

struct TempRoot {
  fs::path path;
  TempRoot() {
    path = fs::temp_directory_path() / ("sqlgate_fx_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempRoot() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

inline const fs::path& root() {
  static TempRoot r;
  return r.path;
}

inline std::string data(const std::string& name) { return std::string(SQLGATE_DATA_DIR) + "/" + name; }

inline std::vector<std::pair<sqlgate::DbKind, sqlgate::Variant>> all_specs() {
  using sqlgate::DbKind;
  using sqlgate::Variant;
  return {{DbKind::HR, Variant::Base},  {DbKind::HR, Variant::Fnc},  {DbKind::HR, Variant::With},
          {DbKind::WH, Variant::Base},  {DbKind::WH, Variant::Fnc},  {DbKind::WH, Variant::With},
          {DbKind::IN, Variant::Base},  {DbKind::IN, Variant::Fnc}};
}

inline const sqlgate::GeneratedCorpus& corpus(sqlgate::DbKind db, sqlgate::Variant v, std::uint64_t seed = 1) {
  static std::map<std::tuple<int, int, std::uint64_t>, sqlgate::GeneratedCorpus> cache;
  auto key = std::make_tuple(static_cast<int>(db), static_cast<int>(v), seed);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  fs::path dir = root() / (std::string(sqlgate::db_kind_name(db)) + "_" + std::string(sqlgate::variant_name(v)) +
                           "_" + std::to_string(seed));
  fs::create_directories(dir);
  sqlgate::CorpusSpec spec{db, v, sqlgate::default_splits(db, v), seed};
  return cache.emplace(key, sqlgate::generate(spec, dir.string())).first->second;
}

inline std::vector<sqlgate::CorpusRecord> all_records(const sqlgate::GeneratedCorpus& g) {
  std::vector<sqlgate::CorpusRecord> out = g.train;
  out.insert(out.end(), g.dev.begin(), g.dev.end());
  out.insert(out.end(), g.test.begin(), g.test.end());
  return out;
}

inline std::shared_ptr<const sqlgate::SchemaCatalog> catalog_of(const sqlgate::GeneratedCorpus& g) {
  return std::make_shared<const sqlgate::SchemaCatalog>(sqlgate::load_spider_schema(g.schema_path));
}

}  // namespace fixtures
