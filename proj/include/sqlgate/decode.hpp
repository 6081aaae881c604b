#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sqlgate/catalog.hpp"
#include "sqlgate/grammar.hpp"

namespace sqlgate {

/// Splits SQL into word-level pieces. A piece carries the whitespace that
/// preceded it (" FROM"). With `fragments`, identifiers and keywords longer
/// than three characters are cut every three characters (" emp" "loy" "ees").
std::vector<std::string> split_pieces(std::string_view sql, bool fragments);

/// Bigram model over pieces with add-one smoothing. Ignores the question.
class MockLm {
 public:
  /// Both spellings of every query (whole words and stride-3 fragments)
  /// are counted. Throws ConfigError on an empty corpus.
  static MockLm train(const std::vector<std::string>& queries);
  /// Uniform model over an arbitrary vocabulary.
  static MockLm uniform(std::vector<std::string> pieces);

  const std::vector<std::string>& vocabulary() const { return vocab_; }
  /// Id used both as sentence start (as context) and end (as next piece).
  size_t boundary() const { return vocab_.size(); }
  std::optional<size_t> id(std::string_view piece) const;
  double log_prob(size_t prev, size_t next) const;
  /// Successors of `prev` (boundary included), most likely first, ties by
  /// spelling; top_k=0 means all.
  std::vector<size_t> ranked(size_t prev, size_t top_k) const;

 private:
  void index();
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, size_t> ids_;
  std::vector<std::unordered_map<size_t, std::uint32_t>> counts_;  // by context id
  std::vector<std::uint32_t> totals_;
};

MockLm train_mock_lm(const std::vector<std::string>& queries);

struct BeamConfig {
  size_t width = 4;
  size_t max_pieces = 64;
  Mode mode = Mode::ParseWithGuards;
  Profile profile = Profile::Extended;
  /// Pieces proposed per hypothesis and step; 0 = whole vocabulary.
  size_t top_k = 0;
};

struct ScoredSql {
  std::string sql;
  double score = 0;  // length-normalized log probability
  bool operator==(const ScoredSql&) const = default;
};

struct DecodeStats {
  std::uint64_t proposed = 0;
  /// Rejections by mode (index = static_cast<int>(Mode)), judged on the same
  /// proposals. Only the run's own mode is filled unless all modes are tracked.
  std::array<std::uint64_t, 3> rejected{};
  double rate(Mode m) const {
    return proposed ? static_cast<double>(rejected[static_cast<int>(m)]) / static_cast<double>(proposed) : 0.0;
  }
};

struct DecodeOutput {
  std::vector<ScoredSql> results;
  DecodeStats stats;
};

/// Full run. With `all_modes`, every proposed piece is also judged under
/// the other two modes (needs a catalog for guards).
DecodeOutput decode(const MockLm& lm, const BeamConfig& cfg, std::shared_ptr<const SchemaCatalog> catalog,
                    bool all_modes = false);

/// Finished hypotheses, best first. Empty when nothing completes in time.
std::vector<ScoredSql> constrained_beam_search(const MockLm& lm, const BeamConfig& cfg,
                                               std::shared_ptr<const SchemaCatalog> catalog);

/// Share of proposed (beam, piece) extensions rejected within `steps` steps.
double filter_rate(const MockLm& lm, BeamConfig cfg, std::shared_ptr<const SchemaCatalog> catalog, size_t steps);

}  // namespace sqlgate
