#include "sqlgate/serializer.hpp"

#include <algorithm>
#include <map>

namespace sqlgate {

std::string serialize(std::string_view question, const SchemaCatalog& catalog,
                      const std::vector<ColumnValue>& links, const SerializationConfig& cfg) {
  // (table index, column index) -> values in link order, deduplicated
  std::map<std::pair<size_t, size_t>, std::vector<std::string>> values;
  for (const auto& l : links) {
    auto t = catalog.find_table(l.table);
    auto c = t ? catalog.tables()[*t].find_column(l.column) : std::nullopt;
    if (!c) throw IntegrityError("link names unknown column " + l.table + "." + l.column);
    if (cfg.db_content == DbContent::Disabled) continue;
    auto& vs = values[{*t, *c}];
    if (std::find(vs.begin(), vs.end(), l.value) == vs.end()) vs.push_back(l.value);
  }
  auto name = [&](const std::string& s) { return cfg.lowercase_schema ? to_lower(s) : s; };

  std::string out = to_lower(trim(question));
  out += " | " + name(catalog.db_id());
  for (size_t t = 0; t < catalog.tables().size(); ++t) {
    const Table& table = catalog.tables()[t];
    out += " | " + name(table.name) + " :";
    for (size_t c = 0; c < table.columns.size(); ++c) {
      out += (c ? ", " : " ") + name(table.columns[c].name);
      auto it = values.find({t, c});
      if (it == values.end()) continue;
      out += " (";
      for (size_t k = 0; k < it->second.size(); ++k) out += (k ? " , " : " ") + it->second[k];
      out += " )";
    }
  }
  return out;
}

std::vector<ColumnValue> extract_value_tags(std::string_view s) {
  std::vector<ColumnValue> out;
  // Skip question and db_id; each later segment is `table : col, col ( v ) ...`.
  std::vector<std::string_view> segs;
  for (size_t i = 0;;) {
    size_t j = s.find(" | ", i);
    segs.push_back(s.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
    if (j == std::string_view::npos) break;
    i = j + 3;
  }
  for (size_t k = 2; k < segs.size(); ++k) {
    std::string_view seg = segs[k];
    size_t colon = seg.find(" : ");
    if (colon == std::string_view::npos) continue;
    std::string table(seg.substr(0, colon));
    std::string_view cols = seg.substr(colon + 3);
    size_t i = 0;
    while (i < cols.size()) {
      size_t open = cols.find(" ( ", i), comma = cols.find(", ", i);
      if (open != std::string_view::npos && (comma == std::string_view::npos || open < comma)) {
        std::string column(cols.substr(i, open - i));
        size_t close = cols.find(" )", open);
        std::string_view body = cols.substr(open + 3, close - open - 3);
        for (size_t b = 0;;) {
          size_t e = body.find(" , ", b);
          out.push_back(ColumnValue{table, column, std::string(body.substr(b, e == std::string_view::npos ? e : e - b))});
          if (e == std::string_view::npos) break;
          b = e + 3;
        }
        i = close + 2;
        if (i < cols.size() && cols.compare(i, 2, ", ") == 0) i += 2;
      } else {
        i = comma == std::string_view::npos ? cols.size() : comma + 2;
      }
    }
  }
  return out;
}

}  // namespace sqlgate
