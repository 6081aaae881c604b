#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqlgate/catalog.hpp"
#include "sqlgate/common.hpp"

namespace sqlgate {

class GenerationError : public Error {
 public:
  explicit GenerationError(const std::string& m) : Error(ErrorCode::Generation, m) {}
};

enum class DbKind { HR, WH, IN };
enum class Variant { Base, Fnc, With };

std::string_view db_kind_name(DbKind k);  // hr | wh | in
std::optional<DbKind> parse_db_kind(std::string_view s);
std::string_view variant_name(Variant v);  // base | fnc | with
std::optional<Variant> parse_variant(std::string_view s);
/// Database id of the fixture: hr, warehouse, invoicing.
std::string_view fixture_db_id(DbKind k);

struct SplitSizes {
  size_t train = 0, dev = 0, test = 0;
  size_t total() const { return train + dev + test; }
  bool operator==(const SplitSizes&) const = default;
};

/// Table 1 sizes for Base and Fnc, the WITH corpus sizes for With.
/// Throws ConfigError for IN/With.
SplitSizes default_splits(DbKind db, Variant variant);

struct CorpusSpec {
  DbKind db = DbKind::HR;
  Variant variant = Variant::Base;
  SplitSizes splits;
  std::uint64_t seed = 0;
};

struct CorpusRecord {
  std::string question;
  std::string gold;
  std::string db_id;
  std::optional<std::string> pred;
  bool operator==(const CorpusRecord&) const = default;
};

struct GeneratedCorpus {
  std::string db_path;
  std::string schema_path;
  std::string dictionary_path;
  std::string train_path, dev_path, test_path;
  std::string manifest_path;
  std::vector<CorpusRecord> train, dev, test;
};

/// Writes the fixture database (created fresh) for `db`.
void create_fixture_db(DbKind db, std::uint64_t seed, const std::string& path);

/// Builds the fixture, samples question/SQL pairs from the template pool
/// until the split sizes are met (every gold returns rows), and writes
/// `<db_id>.sqlite`, `<db_id>.json`, `<db_id>_dict.json`,
/// `<db>_<variant>_{train,dev,test}.jsonl`
/// and `<db>_<variant>_manifest.json` into out_dir.
GeneratedCorpus generate(const CorpusSpec& spec, const std::string& out_dir);

/// Rewrites `col = 'v'` on text columns to `lower(trim(col)) = lower(trim('v'))`.
/// Everything else is left byte-identical.
std::string apply_fnc_to_sql(std::string_view sql, const SchemaCatalog& catalog);
std::vector<CorpusRecord> apply_fnc_transform(const std::vector<CorpusRecord>& corpus, const SchemaCatalog& catalog);

std::string record_to_json(const CorpusRecord& r);
std::string corpus_to_jsonl(const std::vector<CorpusRecord>& records);
/// Line-delimited records. With `validate`, every gold must parse under the
/// extended profile. Errors name the line.
std::vector<CorpusRecord> parse_corpus(std::string_view text, bool validate = true);
std::vector<CorpusRecord> load_corpus(const std::string& path);

}  // namespace sqlgate
