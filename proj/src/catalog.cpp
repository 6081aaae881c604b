#include "sqlgate/catalog.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "json.hpp"
#include "sqlgate/common.hpp"
#include "sqlgate/sqlite_db.hpp"

namespace sqlgate {

using nlohmann::json;

std::string_view data_type_name(DataType t) {
  switch (t) {
    case DataType::Text: return "text";
    case DataType::Integer: return "integer";
    case DataType::Decimal: return "decimal";
    case DataType::Date: return "date";
    case DataType::Boolean: return "boolean";
    case DataType::Other: return "other";
  }
  return "other";
}

std::optional<DataType> parse_data_type(std::string_view name) {
  const std::string n = to_lower(trim(name));
  if (n == "text") return DataType::Text;
  if (n == "integer" || n == "int") return DataType::Integer;
  if (n == "decimal" || n == "number" || n == "real") return DataType::Decimal;
  if (n == "date" || n == "time") return DataType::Date;
  if (n == "boolean") return DataType::Boolean;
  if (n == "other" || n == "others") return DataType::Other;
  return std::nullopt;
}

DataType data_type_from_declared(std::string_view declared) {
  const std::string d = to_upper(declared);
  auto has = [&](const char* s) { return d.find(s) != std::string::npos; };
  if (has("DATE") || has("TIME")) return DataType::Date;
  if (has("BOOL")) return DataType::Boolean;
  if (has("INT")) return DataType::Integer;
  if (has("CHAR") || has("CLOB") || has("TEXT")) return DataType::Text;
  if (has("REAL") || has("FLOA") || has("DOUB") || has("DEC") || has("NUM")) return DataType::Decimal;
  return DataType::Other;
}

bool is_numeric(DataType t) { return t == DataType::Integer || t == DataType::Decimal; }

std::optional<size_t> Table::find_column(std::string_view n) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (iequals(columns[i].name, n)) return i;
  return std::nullopt;
}

SchemaCatalog::SchemaCatalog(std::string db_id, std::vector<Table> tables,
                             std::vector<std::pair<ColumnRef, ColumnRef>> foreign_keys,
                             std::vector<ColumnRef> primary_keys)
    : db_id_(std::move(db_id)),
      tables_(std::move(tables)),
      foreign_keys_(std::move(foreign_keys)),
      primary_keys_(std::move(primary_keys)) {
  std::set<std::string> seen_tables;
  for (const auto& t : tables_) {
    if (t.name.empty()) throw IntegrityError("table with empty name");
    if (!seen_tables.insert(to_lower(t.name)).second)
      throw IntegrityError("duplicate table name '" + t.name + "'");
    if (t.columns.empty()) throw IntegrityError("table '" + t.name + "' has no columns");
    std::set<std::string> seen_cols;
    for (const auto& c : t.columns) {
      if (!seen_cols.insert(to_lower(c.name)).second)
        throw IntegrityError("duplicate column '" + c.name + "' in table '" + t.name + "'");
    }
  }
  auto check = [&](const ColumnRef& r) {
    if (r.table >= tables_.size() || r.column >= tables_[r.table].columns.size())
      throw IntegrityError("key references a column that does not exist");
  };
  for (const auto& [a, b] : foreign_keys_) {
    check(a);
    check(b);
  }
  for (const auto& r : primary_keys_) check(r);
}

std::optional<size_t> SchemaCatalog::find_table(std::string_view name) const {
  for (size_t i = 0; i < tables_.size(); ++i)
    if (iequals(tables_[i].name, name)) return i;
  return std::nullopt;
}

const Table* SchemaCatalog::table(std::string_view name) const {
  auto i = find_table(name);
  return i ? &tables_[*i] : nullptr;
}

const Column* SchemaCatalog::column(std::string_view t, std::string_view c) const {
  const Table* tab = table(t);
  if (!tab) return nullptr;
  auto i = tab->find_column(c);
  return i ? &tab->columns[*i] : nullptr;
}

// ---------------------------------------------------------------- Spider I/O

namespace {

const json& require(const json& doc, const char* field, json::value_t type) {
  auto it = doc.find(field);
  if (it == doc.end()) throw FormatError(std::string("missing field '") + field + "'");
  if (it->type() != type) throw FormatError(std::string("field '") + field + "' has the wrong type");
  return *it;
}

long long as_index(const json& v, const char* field) {
  if (!v.is_number_integer()) throw FormatError(std::string("field '") + field + "' must hold integers");
  return v.get<long long>();
}

}  // namespace

SchemaCatalog parse_spider_schema(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("schema document is not JSON: ") + e.what());
  }
  // tables.json is an array of databases; accept a one-element array too.
  if (doc.is_array()) {
    if (doc.size() != 1) throw FormatError("expected exactly one database object");
    doc = doc[0];
  }
  if (!doc.is_object()) throw FormatError("schema document must be an object");

  const auto& db_id = require(doc, "db_id", json::value_t::string);
  const auto& table_names = require(doc, "table_names_original", json::value_t::array);
  const auto& column_names = require(doc, "column_names_original", json::value_t::array);
  const auto& column_types = require(doc, "column_types", json::value_t::array);
  const auto& pks = require(doc, "primary_keys", json::value_t::array);
  const auto& fks = require(doc, "foreign_keys", json::value_t::array);
  if (column_types.size() != column_names.size())
    throw FormatError("field 'column_types' length differs from 'column_names_original'");

  std::vector<Table> tables;
  for (const auto& t : table_names) {
    if (!t.is_string()) throw FormatError("field 'table_names_original' must hold strings");
    tables.push_back(Table{t.get<std::string>(), {}});
  }

  // Column index in the document -> reference. Index 0 is the `*` pseudo-column.
  std::vector<std::optional<ColumnRef>> index;
  for (size_t i = 0; i < column_names.size(); ++i) {
    const auto& entry = column_names[i];
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_integer() || !entry[1].is_string())
      throw FormatError("field 'column_names_original' entry " + std::to_string(i) +
                        " must be [table_index, name]");
    const long long ti = entry[0].get<long long>();
    const auto name = entry[1].get<std::string>();
    if (ti == -1) {
      if (name != "*") throw FormatError("field 'column_names_original' has a table-less column");
      index.emplace_back(std::nullopt);
      continue;
    }
    if (ti < 0 || static_cast<size_t>(ti) >= tables.size())
      throw IntegrityError("column '" + name + "' references missing table index " + std::to_string(ti));
    if (!column_types[i].is_string()) throw FormatError("field 'column_types' must hold strings");
    auto type = parse_data_type(column_types[i].get<std::string>());
    if (!type) throw FormatError("field 'column_types' has unknown type '" +
                                 column_types[i].get<std::string>() + "'");
    auto& tab = tables[static_cast<size_t>(ti)];
    index.emplace_back(ColumnRef{static_cast<size_t>(ti), tab.columns.size()});
    tab.columns.push_back(Column{name, *type});
  }

  auto resolve = [&](long long i, const char* field) -> ColumnRef {
    if (i < 0 || static_cast<size_t>(i) >= index.size())
      throw IntegrityError(std::string("field '") + field + "' cites column index " + std::to_string(i) +
                           " of " + std::to_string(index.size()));
    if (!index[static_cast<size_t>(i)])
      throw IntegrityError(std::string("field '") + field + "' cites the '*' pseudo-column");
    return *index[static_cast<size_t>(i)];
  };

  std::vector<ColumnRef> primary;
  for (const auto& p : pks) {
    if (p.is_array()) {
      for (const auto& q : p) primary.push_back(resolve(as_index(q, "primary_keys"), "primary_keys"));
    } else {
      primary.push_back(resolve(as_index(p, "primary_keys"), "primary_keys"));
    }
  }
  std::vector<std::pair<ColumnRef, ColumnRef>> foreign;
  for (const auto& f : fks) {
    if (!f.is_array() || f.size() != 2) throw FormatError("field 'foreign_keys' must hold index pairs");
    foreign.emplace_back(resolve(as_index(f[0], "foreign_keys"), "foreign_keys"),
                         resolve(as_index(f[1], "foreign_keys"), "foreign_keys"));
  }
  return SchemaCatalog(db_id.get<std::string>(), std::move(tables), std::move(foreign), std::move(primary));
}

SchemaCatalog load_spider_schema(const std::string& path) { return parse_spider_schema(read_file(path)); }

std::string to_spider_json(const SchemaCatalog& catalog) {
  auto natural = [](std::string s) {
    std::replace(s.begin(), s.end(), '_', ' ');
    return to_lower(s);
  };
  json doc;
  doc["db_id"] = catalog.db_id();
  json tn = json::array(), tno = json::array(), cn = json::array(), cno = json::array(),
       ct = json::array();
  cn.push_back({-1, "*"});
  cno.push_back({-1, "*"});
  ct.push_back("text");
  std::vector<std::vector<size_t>> offsets;
  size_t next = 1;
  for (size_t t = 0; t < catalog.tables().size(); ++t) {
    const auto& tab = catalog.tables()[t];
    tno.push_back(tab.name);
    tn.push_back(natural(tab.name));
    offsets.emplace_back();
    for (const auto& c : tab.columns) {
      cno.push_back({static_cast<int>(t), c.name});
      cn.push_back({static_cast<int>(t), natural(c.name)});
      ct.push_back(std::string(data_type_name(c.type)));
      offsets.back().push_back(next++);
    }
  }
  auto idx = [&](const ColumnRef& r) { return offsets[r.table][r.column]; };
  json pk = json::array(), fk = json::array();
  for (const auto& r : catalog.primary_keys()) pk.push_back(idx(r));
  for (const auto& [a, b] : catalog.foreign_keys()) fk.push_back({idx(a), idx(b)});
  doc["table_names"] = tn;
  doc["table_names_original"] = tno;
  doc["column_names"] = cn;
  doc["column_names_original"] = cno;
  doc["column_types"] = ct;
  doc["primary_keys"] = pk;
  doc["foreign_keys"] = fk;
  return doc.dump(2);
}

SchemaCatalog load_db_schema(const std::string& path) {
  auto db = db::Database::open_readonly(path);
  std::vector<Table> tables;
  std::vector<std::vector<std::string>> pk_names;
  auto names = db.query(
      "SELECT name FROM sqlite_master WHERE type='table' AND name NOT LIKE 'sqlite_%' ORDER BY rowid");
  for (const auto& row : names.rows) {
    Table t{std::get<std::string>(row[0]), {}};
    auto info = db.query("PRAGMA table_info(" + db::quote_identifier(t.name) + ")");
    std::vector<std::pair<std::int64_t, std::string>> pk;
    for (const auto& r : info.rows) {
      const auto& cname = std::get<std::string>(r[1]);
      const auto* decl = std::get_if<std::string>(&r[2]);
      t.columns.push_back(Column{cname, data_type_from_declared(decl ? *decl : "")});
      if (const auto* k = std::get_if<std::int64_t>(&r[5]); k && *k > 0) pk.emplace_back(*k, cname);
    }
    std::sort(pk.begin(), pk.end());
    pk_names.emplace_back();
    for (auto& p : pk) pk_names.back().push_back(p.second);
    tables.push_back(std::move(t));
  }

  std::vector<ColumnRef> primary;
  for (size_t t = 0; t < tables.size(); ++t)
    for (const auto& n : pk_names[t]) primary.push_back(ColumnRef{t, *tables[t].find_column(n)});

  auto find = [&](const std::string& table, const std::string& col) -> std::optional<ColumnRef> {
    for (size_t t = 0; t < tables.size(); ++t) {
      if (!iequals(tables[t].name, table)) continue;
      if (auto c = tables[t].find_column(col)) return ColumnRef{t, *c};
    }
    return std::nullopt;
  };
  std::vector<std::pair<ColumnRef, ColumnRef>> foreign;
  for (size_t t = 0; t < tables.size(); ++t) {
    auto fkl = db.query("PRAGMA foreign_key_list(" + db::quote_identifier(tables[t].name) + ")");
    for (const auto& r : fkl.rows) {
      const auto& target = std::get<std::string>(r[2]);
      const auto& from = std::get<std::string>(r[3]);
      std::string to;
      if (const auto* s = std::get_if<std::string>(&r[4])) {
        to = *s;
      } else if (auto ti = std::find_if(tables.begin(), tables.end(),
                                        [&](const Table& x) { return iequals(x.name, target); });
                 ti != tables.end() && !pk_names[static_cast<size_t>(ti - tables.begin())].empty()) {
        to = pk_names[static_cast<size_t>(ti - tables.begin())].front();
      }
      auto a = find(tables[t].name, from);
      auto b = find(target, to);
      if (!a || !b) throw IntegrityError("foreign key on '" + tables[t].name + "' cannot be resolved");
      foreign.emplace_back(*a, *b);
    }
  }
  return SchemaCatalog(std::filesystem::path(path).stem().string(), std::move(tables), std::move(foreign),
                       std::move(primary));
}

// ------------------------------------------------------------ value dictionary

ValueDictionary::ValueDictionary(std::map<std::string, std::vector<ColumnTarget>> entries,
                                 std::vector<ColumnTarget> truncated)
    : entries_(std::move(entries)), truncated_(std::move(truncated)) {
  for (const auto& [k, targets] : entries_) {
    size_t words = k.empty() ? 0 : 1 + static_cast<size_t>(std::count(k.begin(), k.end(), ' '));
    max_key_words_ = std::max(max_key_words_, words);
  }
}

const std::vector<ColumnTarget>* ValueDictionary::lookup(std::string_view normalized) const {
  auto it = entries_.find(std::string(normalized));
  return it == entries_.end() ? nullptr : &it->second;
}

std::string ValueDictionary::to_json() const {
  json doc;
  json entries = json::object();
  for (const auto& [k, targets] : entries_) {
    json arr = json::array();
    for (const auto& t : targets) arr.push_back({t.table, t.column});
    entries[k] = arr;
  }
  json trunc = json::array();
  for (const auto& t : truncated_) trunc.push_back({t.table, t.column});
  doc["entries"] = entries;
  doc["truncated"] = trunc;
  return doc.dump(1);
}

ValueDictionary ValueDictionary::from_json(std::string_view text, const SchemaCatalog& catalog) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("dictionary is not JSON: ") + e.what());
  }
  const auto& entries = require(doc, "entries", json::value_t::object);
  auto target = [&](const json& v) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_string() || !v[1].is_string())
      throw FormatError("dictionary target must be [table, column]");
    ColumnTarget t{v[0].get<std::string>(), v[1].get<std::string>()};
    if (!catalog.column(t.table, t.column))
      throw IntegrityError("dictionary target " + t.table + "." + t.column + " is not in the schema");
    return t;
  };
  std::map<std::string, std::vector<ColumnTarget>> out;
  for (const auto& [k, arr] : entries.items()) {
    if (normalize_value(k) != k) throw FormatError("dictionary key '" + k + "' is not normalized");
    if (!arr.is_array()) throw FormatError("dictionary entry must be an array");
    auto& dst = out[k];
    for (const auto& v : arr) dst.push_back(target(v));
  }
  std::vector<ColumnTarget> truncated;
  if (auto it = doc.find("truncated"); it != doc.end() && it->is_array())
    for (const auto& v : *it) truncated.push_back(target(v));
  return ValueDictionary(std::move(out), std::move(truncated));
}

ValueDictionary build_value_dictionary(const SchemaCatalog& catalog, const std::string& db_path,
                                       size_t max_values_per_column) {
  if (max_values_per_column < 1) throw ContractError("max_values_per_column must be >= 1");
  auto db = db::Database::open_readonly(db_path);
  std::map<std::string, std::vector<ColumnTarget>> entries;
  std::vector<ColumnTarget> truncated;
  for (const auto& t : catalog.tables()) {
    auto info = db.query("PRAGMA table_info(" + db::quote_identifier(t.name) + ")");
    if (info.rows.empty()) throw IntegrityError("table '" + t.name + "' is missing from the database");
    std::set<std::string> present;
    for (const auto& r : info.rows) present.insert(to_lower(std::get<std::string>(r[1])));
    for (const auto& c : t.columns) {
      if (!present.count(to_lower(c.name)))
        throw IntegrityError("column '" + t.name + "." + c.name + "' is missing from the database");
      if (c.type != DataType::Text) continue;
      auto st = db.prepare("SELECT DISTINCT " + db::quote_identifier(c.name) + " FROM " +
                           db::quote_identifier(t.name) + " WHERE typeof(" + db::quote_identifier(c.name) +
                           ") = 'text'");
      std::set<std::string> values;
      bool over = false;
      while (st.step()) {
        auto v = normalize_value(std::get<std::string>(st.column(0)));
        if (v.empty()) continue;
        values.insert(std::move(v));
        if (values.size() > max_values_per_column) {
          over = true;
          break;
        }
      }
      ColumnTarget target{t.name, c.name};
      if (over) {
        truncated.push_back(target);
        continue;
      }
      for (const auto& v : values) entries[v].push_back(target);
    }
  }
  return ValueDictionary(std::move(entries), std::move(truncated));
}

}  // namespace sqlgate
