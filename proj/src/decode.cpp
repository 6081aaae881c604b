#include "sqlgate/decode.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "sqlgate/common.hpp"
#include "sqlgate/parser.hpp"

namespace sqlgate {

namespace {

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<std::string> split_pieces(std::string_view sql, bool fragments) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < sql.size()) {
    size_t ws = i;
    while (i < sql.size() && std::isspace(static_cast<unsigned char>(sql[i]))) ++i;
    if (i == sql.size()) break;
    const std::string lead = i > ws ? " " : "";
    size_t start = i;
    const char c = sql[i];
    bool word = false;
    if (c == '\'' || c == '"') {
      ++i;
      while (i < sql.size()) {
        if (sql[i] == c) {
          if (i + 1 < sql.size() && sql[i + 1] == c) {
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        ++i;
      }
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < sql.size() && (std::isdigit(static_cast<unsigned char>(sql[i])) || sql[i] == '.')) ++i;
    } else if (word_char(c)) {
      while (i < sql.size() && word_char(sql[i])) ++i;
      word = true;
    } else {
      static const std::set<std::string_view> two{"<=", ">=", "<>", "!=", "=="};
      i += (i + 1 < sql.size() && two.count(sql.substr(i, 2))) ? 2 : 1;
    }
    std::string_view tok = sql.substr(start, i - start);
    if (fragments && word && tok.size() > 3) {
      for (size_t k = 0; k < tok.size(); k += 3) out.push_back((k == 0 ? lead : "") + std::string(tok.substr(k, 3)));
    } else {
      out.push_back(lead + std::string(tok));
    }
  }
  return out;
}

void MockLm::index() {
  std::sort(vocab_.begin(), vocab_.end());
  vocab_.erase(std::unique(vocab_.begin(), vocab_.end()), vocab_.end());
  ids_.clear();
  for (size_t i = 0; i < vocab_.size(); ++i) ids_[vocab_[i]] = i;
  counts_.assign(vocab_.size() + 1, {});
  totals_.assign(vocab_.size() + 1, 0);
}

MockLm MockLm::train(const std::vector<std::string>& queries) {
  if (queries.empty()) throw ConfigError("cannot train a model on an empty corpus");
  MockLm lm;
  std::vector<std::vector<std::string>> spellings;
  for (const auto& q : queries)
    for (bool frag : {false, true}) {
      spellings.push_back(split_pieces(q, frag));
      lm.vocab_.insert(lm.vocab_.end(), spellings.back().begin(), spellings.back().end());
    }
  lm.index();
  for (const auto& s : spellings) {
    size_t prev = lm.boundary();
    for (const auto& p : s) {
      size_t cur = lm.ids_.at(p);
      ++lm.counts_[prev][cur];
      ++lm.totals_[prev];
      prev = cur;
    }
    ++lm.counts_[prev][lm.boundary()];
    ++lm.totals_[prev];
  }
  return lm;
}

MockLm MockLm::uniform(std::vector<std::string> pieces) {
  MockLm lm;
  lm.vocab_ = std::move(pieces);
  lm.index();
  return lm;
}

MockLm train_mock_lm(const std::vector<std::string>& queries) { return MockLm::train(queries); }

std::optional<size_t> MockLm::id(std::string_view piece) const {
  auto it = ids_.find(std::string(piece));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

double MockLm::log_prob(size_t prev, size_t next) const {
  std::uint32_t c = 0;
  if (auto it = counts_[prev].find(next); it != counts_[prev].end()) c = it->second;
  return std::log((c + 1.0) / (static_cast<double>(totals_[prev]) + static_cast<double>(vocab_.size() + 1)));
}

std::vector<size_t> MockLm::ranked(size_t prev, size_t top_k) const {
  // Seen successors first by count, then the unseen ones in spelling order;
  // vocab_ is sorted so index order is spelling order.
  std::vector<std::pair<std::uint32_t, size_t>> seen;
  for (const auto& [next, c] : counts_[prev]) seen.push_back({c, next});
  std::sort(seen.begin(), seen.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  const size_t limit = top_k == 0 ? vocab_.size() + 1 : std::min(top_k, vocab_.size() + 1);
  std::vector<size_t> out;
  out.reserve(limit);
  for (const auto& s : seen) {
    if (out.size() == limit) return out;
    out.push_back(s.second);
  }
  for (size_t i = 0; i <= vocab_.size() && out.size() < limit; ++i)
    if (!counts_[prev].count(i)) out.push_back(i);
  return out;
}

namespace {

struct Hyp {
  std::string text;
  size_t last = 0;
  double logp = 0;
  size_t n = 0;
  std::array<std::optional<ParserState>, 3> states;
  double norm() const { return n ? logp / static_cast<double>(n) : 0.0; }
};

bool better(double sa, const std::string& ta, double sb, const std::string& tb) {
  return sa != sb ? sa > sb : ta < tb;
}

}  // namespace

DecodeOutput decode(const MockLm& lm, const BeamConfig& cfg, std::shared_ptr<const SchemaCatalog> catalog,
                    bool all_modes) {
  if (cfg.width == 0 || cfg.max_pieces == 0) throw ConfigError("beam width and max_pieces must be at least 1");
  const int driver = static_cast<int>(cfg.mode);
  std::vector<int> tracked{driver};
  if (all_modes)
    for (int m = 0; m < 3; ++m)
      if (m != driver) tracked.push_back(m);

  DecodeOutput out;
  Hyp root;
  root.last = lm.boundary();
  for (int m : tracked) root.states[m] = init(static_cast<Mode>(m), cfg.profile, catalog);
  std::vector<Hyp> live{root};
  std::map<std::string, double> finished;

  // Ending is a proposal like any piece: it must rank within top_k and the
  // prefix must be a complete statement.
  auto finish = [&](const Hyp& h) {
    if (h.states[driver]->verdict() != Verdict::Complete) return;
    const double s = (h.logp + lm.log_prob(h.last, lm.boundary())) / static_cast<double>(h.n + 1);
    auto [it, fresh] = finished.emplace(trim(h.text), s);
    if (!fresh) it->second = std::max(it->second, s);
  };
  auto worst_kept = [&] {
    std::vector<double> s;
    for (const auto& f : finished) s.push_back(f.second);
    std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(cfg.width - 1), s.end(), std::greater<>());
    return s[cfg.width - 1];
  };

  for (size_t step = 0; step < cfg.max_pieces && !live.empty(); ++step) {
    std::map<std::string, Hyp> next;  // text -> best hypothesis spelling it
    for (const auto& h : live) {
      for (size_t id : lm.ranked(h.last, cfg.top_k)) {
        if (id == lm.boundary()) {
          finish(h);
          continue;
        }
        const std::string& piece = lm.vocabulary()[id];
        ++out.stats.proposed;
        Hyp c;
        for (int m : tracked) {
          ParserState s = sqlgate::advance(*h.states[m], piece);
          if (s.verdict() == Verdict::Invalid) ++out.stats.rejected[m];
          c.states[m] = std::move(s);
        }
        if (c.states[driver]->verdict() == Verdict::Invalid) continue;
        c.text = h.text + piece;
        c.last = id;
        c.logp = h.logp + lm.log_prob(h.last, id);
        c.n = h.n + 1;
        auto it = next.find(c.text);
        if (it == next.end()) next.emplace(c.text, std::move(c));
        else if (c.norm() > it->second.norm()) it->second = std::move(c);
      }
    }
    live.clear();
    for (auto& [text, h] : next) live.push_back(std::move(h));
    std::sort(live.begin(), live.end(),
              [](const Hyp& a, const Hyp& b) { return better(a.norm(), a.text, b.norm(), b.text); });
    if (live.size() > cfg.width) live.resize(cfg.width);
    if (finished.size() >= cfg.width && !live.empty() && live.front().norm() < worst_kept()) break;
  }

  for (const auto& [sql, s] : finished) out.results.push_back({sql, s});
  std::sort(out.results.begin(), out.results.end(),
            [](const ScoredSql& a, const ScoredSql& b) { return better(a.score, a.sql, b.score, b.sql); });
  if (out.results.size() > cfg.width) out.results.resize(cfg.width);
  return out;
}

std::vector<ScoredSql> constrained_beam_search(const MockLm& lm, const BeamConfig& cfg,
                                               std::shared_ptr<const SchemaCatalog> catalog) {
  return decode(lm, cfg, std::move(catalog)).results;
}

double filter_rate(const MockLm& lm, BeamConfig cfg, std::shared_ptr<const SchemaCatalog> catalog, size_t steps) {
  if (steps == 0) throw ConfigError("steps must be at least 1");
  cfg.max_pieces = steps;
  return decode(lm, cfg, std::move(catalog)).stats.rate(cfg.mode);
}

}  // namespace sqlgate
