#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sqlgate/catalog.hpp"
#include "sqlgate/linker.hpp"

namespace sqlgate {

enum class DbContent { Disabled, Enabled };

struct SerializationConfig {
  DbContent db_content = DbContent::Enabled;
  bool lowercase_schema = true;
};

/// `<question> | <db_id> | <table> : <col>, <col> ( v1 , v2 ) | ...`
/// Tables and columns follow catalog order. Links are ignored when DB
/// content is disabled; a link naming an unknown column is an
/// IntegrityError either way.
std::string serialize(std::string_view question, const SchemaCatalog& catalog,
                      const std::vector<ColumnValue>& links, const SerializationConfig& cfg = {});

/// Reads the value tags back out of a serialized string.
std::vector<ColumnValue> extract_value_tags(std::string_view serialized);

}  // namespace sqlgate
