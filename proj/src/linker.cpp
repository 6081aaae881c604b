#include "sqlgate/linker.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace sqlgate {

namespace {

bool alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  if (from.empty()) return s;
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

/// Curly quotes appear in hand-copied rule files; fold them to ASCII.
std::string fold_quotes(std::string s) {
  s = replace_all(std::move(s), "\xE2\x80\x9C", "\"");
  return replace_all(std::move(s), "\xE2\x80\x9D", "\"");
}

}  // namespace

// --------------------------------------------------------------------- SAF

std::vector<SafEntry> parse_saf_text(std::string_view text, const SchemaCatalog* catalog) {
  static const std::vector<std::string> kProps{"tableName1", "colName1", "dataType1",
                                               "tableName2", "colName2", "dataType2"};
  std::vector<SafEntry> out;
  std::optional<SafEntry> cur;
  std::map<std::string, std::string> props;

  auto flush = [&]() {
    if (!cur) return;
    for (const auto& p : kProps) {
      if (!props.count(p))
        throw FormatError("SAF record at line " + std::to_string(cur->line) + " (\"" + cur->phrase +
                          "\") lacks " + p);
    }
    auto type = [&](const std::string& key) {
      auto t = parse_data_type(props[key]);
      if (!t)
        throw FormatError("SAF record at line " + std::to_string(cur->line) + ": unknown " + key + " '" +
                          props[key] + "'");
      return *t;
    };
    cur->table1 = props["tableName1"];
    cur->column1 = props["colName1"];
    cur->type1 = type("dataType1");
    cur->table2 = props["tableName2"];
    cur->column2 = props["colName2"];
    cur->type2 = type("dataType2");
    if (catalog) {
      for (auto [t, c] : {std::pair{cur->table1, cur->column1}, std::pair{cur->table2, cur->column2}}) {
        if (!catalog->column(t, c))
          throw IntegrityError("SAF record at line " + std::to_string(cur->line) + " names unknown column " +
                               t + "." + c);
      }
    }
    out.push_back(std::move(*cur));
    cur.reset();
    props.clear();
  };

  size_t line = 1;
  size_t i = 0;
  while (i < text.size()) {
    size_t j = text.find(';', i);
    if (j == std::string_view::npos) j = text.size();
    std::string_view raw = text.substr(i, j - i);
    size_t lead = 0;
    while (lead < raw.size() && std::isspace(static_cast<unsigned char>(raw[lead]))) {
      if (raw[lead] == '\n') ++line;
      ++lead;
    }
    const size_t clause_line = line;
    for (size_t k = lead; k < raw.size(); ++k)
      if (raw[k] == '\n') ++line;
    i = j + 1;

    std::istringstream words{std::string(raw.substr(lead))};
    std::vector<std::string> w;
    for (std::string x; words >> x;) w.push_back(x);
    if (w.empty()) continue;

    std::optional<std::string> prop;
    if (w.size() >= 3 && w[1] == "is") {
      for (const auto& p : kProps)
        if (iequals(p, w[0])) prop = p;
    }
    if (!prop) {
      flush();
      cur = SafEntry{};
      cur->line = clause_line;
      for (size_t k = 0; k < w.size(); ++k) cur->phrase += (k ? " " : "") + w[k];
      continue;
    }
    if (!cur) throw FormatError("SAF line " + std::to_string(clause_line) + ": property before any phrase");
    std::string value;
    for (size_t k = 2; k < w.size(); ++k) value += (k > 2 ? " " : "") + w[k];
    if (props.count(*prop))
      throw FormatError("SAF line " + std::to_string(clause_line) + ": duplicate " + *prop);
    props[*prop] = value;
  }
  flush();
  return out;
}

std::vector<SafEntry> parse_saf(const std::string& path, const SchemaCatalog* catalog) {
  return parse_saf_text(read_file(path), catalog);
}

// ------------------------------------------------------------- TRF / LRF

namespace {

std::vector<Constraint> parse_constraints(std::string_view body, size_t line) {
  std::vector<Constraint> out;
  size_t i = 0;
  auto skip = [&]() {
    while (i < body.size() && (std::isspace(static_cast<unsigned char>(body[i])) || body[i] == ',')) ++i;
  };
  auto bad = [&](const std::string& why) {
    return FormatError("rule line " + std::to_string(line) + ": " + why);
  };
  for (skip(); i < body.size(); skip()) {
    Constraint c;
    if (body[i] == '!') {
      c.negated = true;
      ++i;
    }
    size_t open = body.find('(', i);
    if (open == std::string_view::npos) throw bad("constraint without '('");
    c.predicate = trim(body.substr(i, open - i));
    if (c.predicate != "hasPartOfSpeech" && c.predicate != "hasLemmaForm" && c.predicate != "hasParseFeature")
      throw bad("unknown constraint '" + c.predicate + "'");
    size_t q1 = body.find('"', open);
    size_t q2 = q1 == std::string_view::npos ? q1 : body.find('"', q1 + 1);
    size_t close = q2 == std::string_view::npos ? q2 : body.find(')', q2);
    if (close == std::string_view::npos) throw bad("malformed constraint argument");
    c.argument = std::string(body.substr(q1 + 1, q2 - q1 - 1));
    out.push_back(std::move(c));
    i = close + 1;
  }
  return out;
}

/// Splits `target [constraints]` (the bracket part is optional).
std::pair<std::string, std::vector<Constraint>> parse_spec(std::string_view s, size_t line) {
  size_t open = s.find('[');
  if (open == std::string_view::npos) return {trim(s), {}};
  size_t close = s.rfind(']');
  if (close == std::string_view::npos || close < open)
    throw FormatError("rule line " + std::to_string(line) + ": unbalanced '['");
  return {trim(s.substr(0, open)), parse_constraints(s.substr(open + 1, close - open - 1), line)};
}

void write_constraints(std::ostream& os, const std::vector<Constraint>& cs) {
  os << " [";
  for (size_t i = 0; i < cs.size(); ++i) {
    if (i) os << ", ";
    os << (cs[i].negated ? "!" : "") << cs[i].predicate << "(\"" << cs[i].argument << "\")";
  }
  os << ']';
}

}  // namespace

std::vector<Rule> parse_rules(std::string_view text_in) {
  const std::string text = fold_quotes(std::string(text_in));
  std::vector<Rule> out;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  Rule* cur = nullptr;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t start_line = lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    // A constraint list may continue on following lines.
    while (t.find('[') != std::string::npos && t.find(']', t.find('[')) == std::string::npos &&
           std::getline(in, line)) {
      ++lineno;
      t += " " + trim(line);
    }
    if (t.rfind("root=", 0) == 0) {
      out.emplace_back();
      cur = &out.back();
      cur->name = trim(t.substr(5));
      if (cur->name.empty()) throw FormatError("rule line " + std::to_string(start_line) + ": empty root name");
      continue;
    }
    if (!cur) throw FormatError("rule line " + std::to_string(start_line) + ": expected root=");
    if (t.rfind("bindings:", 0) == 0) {
      std::string rest = t.substr(9);
      std::stringstream items(rest);
      for (std::string item; std::getline(items, item, ',');) {
        item = trim(item);
        if (item.empty()) continue;
        // VAR1(product)=PRODUCTS.PRODUCT_ID:integer
        Binding b;
        size_t eq = item.find('='), dot = item.find('.', eq), colon = item.rfind(':');
        if (eq == std::string::npos || dot == std::string::npos || colon == std::string::npos || colon < dot)
          throw FormatError("rule line " + std::to_string(start_line) + ": malformed binding '" + item + "'");
        std::string lhs = trim(item.substr(0, eq));
        if (size_t lp = lhs.find('('); lp != std::string::npos && lhs.back() == ')') {
          b.lemma = lhs.substr(lp + 1, lhs.size() - lp - 2);
          lhs = lhs.substr(0, lp);
        }
        b.placeholder = lhs;
        b.table = item.substr(eq + 1, dot - eq - 1);
        b.column = item.substr(dot + 1, colon - dot - 1);
        auto type = parse_data_type(item.substr(colon + 1));
        if (!type) throw FormatError("rule line " + std::to_string(start_line) + ": unknown data type in '" + item + "'");
        b.type = *type;
        cur->bindings.push_back(std::move(b));
      }
      continue;
    }
    size_t arrow = t.find("->");
    if (arrow == std::string::npos)
      throw FormatError("rule line " + std::to_string(start_line) + ": expected '->'");
    std::string role = trim(t.substr(0, arrow));
    auto [target, constraints] = parse_spec(std::string_view(t).substr(arrow + 2), start_line);
    if (role.empty()) {
      cur->head = target;
      cur->head_constraints = std::move(constraints);
    } else {
      if (role != "subj" && role != "obj")
        throw FormatError("rule line " + std::to_string(start_line) + ": unknown role '" + role + "'");
      cur->arcs.push_back(Arc{role, target, std::move(constraints)});
    }
  }
  for (const auto& r : out)
    if (r.head.empty()) throw FormatError("rule " + r.name + " has no head line");
  return out;
}

std::vector<Rule> load_rules(const std::string& path) { return parse_rules(read_file(path)); }

std::string write_rules(const std::vector<Rule>& rules) {
  std::ostringstream os;
  for (size_t i = 0; i < rules.size(); ++i) {
    const Rule& r = rules[i];
    if (i) os << '\n';
    os << "root=" << r.name << '\n';
    os << "-> " << r.head;
    write_constraints(os, r.head_constraints);
    os << '\n';
    for (const auto& a : r.arcs) {
      os << a.role << " -> " << a.target;
      write_constraints(os, a.constraints);
      os << '\n';
    }
    if (!r.bindings.empty()) {
      os << "bindings: ";
      for (size_t k = 0; k < r.bindings.size(); ++k) {
        const auto& b = r.bindings[k];
        os << (k ? ", " : "") << b.placeholder;
        if (!b.lemma.empty()) os << '(' << b.lemma << ')';
        os << '=' << b.table << '.' << b.column << ':'
           << data_type_name(b.type);
      }
      os << '\n';
    }
  }
  return os.str();
}

// ---------------------------------------------------------------- annotate

std::string_view pos_name(Pos p) {
  switch (p) {
    case Pos::Noun: return "noun";
    case Pos::Verb: return "verb";
    case Pos::Adj: return "adj";
    case Pos::Adv: return "adv";
    case Pos::Num: return "num";
    case Pos::Other: return "other";
  }
  return "other";
}

namespace {

const std::set<std::string>& verb_lemmas() {
  static const std::set<std::string> v{"have", "be",     "do",   "place",  "sell",   "buy",  "work",
                                       "manage", "earn", "make", "supply", "hire",   "leave", "live",
                                       "contain", "own", "give", "find",   "return", "belong", "pay",
                                       "ship", "assign", "sign", "run",    "join",   "get"};
  return v;
}

const std::map<std::string, std::pair<std::string, Pos>>& exceptions() {
  static const std::map<std::string, std::pair<std::string, Pos>> m{
      {"has", {"have", Pos::Verb}},     {"have", {"have", Pos::Verb}},   {"had", {"have", Pos::Verb}},
      {"having", {"have", Pos::Verb}},  {"is", {"be", Pos::Verb}},       {"are", {"be", Pos::Verb}},
      {"was", {"be", Pos::Verb}},       {"were", {"be", Pos::Verb}},     {"been", {"be", Pos::Verb}},
      {"being", {"be", Pos::Verb}},     {"be", {"be", Pos::Verb}},       {"does", {"do", Pos::Verb}},
      {"did", {"do", Pos::Verb}},       {"done", {"do", Pos::Verb}},     {"made", {"make", Pos::Verb}},
      {"sold", {"sell", Pos::Verb}},    {"bought", {"buy", Pos::Verb}},  {"paid", {"pay", Pos::Verb}},
      {"gave", {"give", Pos::Verb}},    {"found", {"find", Pos::Verb}},  {"ran", {"run", Pos::Verb}},
      {"got", {"get", Pos::Verb}},      {"left", {"leave", Pos::Verb}},  {"people", {"person", Pos::Noun}},
      {"children", {"child", Pos::Noun}}, {"men", {"man", Pos::Noun}},   {"women", {"woman", Pos::Noun}},
      {"status", {"status", Pos::Noun}}, {"address", {"address", Pos::Noun}},
      {"sales", {"sale", Pos::Noun}},
  };
  return m;
}

const std::set<std::string>& adjectives() {
  static const std::set<std::string> a{"higher",  "greater", "lower",   "less",    "more",    "most",
                                       "least",   "highest", "lowest",  "largest", "smallest", "larger",
                                       "smaller", "bigger",  "fewer",   "average", "total",   "many",
                                       "much",    "open",    "outstanding", "new", "old",     "maximum",
                                       "minimum", "all",     "each",    "every"};
  return a;
}

const std::set<std::string>& function_words() {
  static const std::set<std::string> f{"the",  "a",     "an",   "of",    "in",    "on",    "for",  "with",
                                       "than", "at",    "by",   "to",    "from",  "and",   "or",   "what",
                                       "which", "who",  "whom", "whose", "where", "when",  "that", "this",
                                       "these", "those", "there", "their", "its",  "per",   "show", "list",
                                       "give", "me",    "find", "all",   "any"};
  return f;
}

const std::set<std::string>& adverbs() {
  static const std::set<std::string> a{"how", "not", "also", "only", "very"};
  return a;
}

std::string noun_lemma(const std::string& w) {
  auto ends = [&](std::string_view s) { return w.size() > s.size() && w.compare(w.size() - s.size(), s.size(), s) == 0; };
  if (ends("ies") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
  if (ends("sses") || ends("ches") || ends("shes") || ends("xes") || ends("zes")) return w.substr(0, w.size() - 2);
  if (ends("s") && !ends("ss") && !ends("us") && !ends("is") && w.size() > 3) return w.substr(0, w.size() - 1);
  return w;
}

std::optional<std::string> verb_stem(const std::string& w, std::string_view suffix) {
  if (w.size() < suffix.size() + 2 || w.compare(w.size() - suffix.size(), suffix.size(), suffix) != 0)
    return std::nullopt;
  std::string stem = w.substr(0, w.size() - suffix.size());
  const auto& verbs = verb_lemmas();
  if (verbs.count(stem)) return stem;
  if (verbs.count(stem + "e")) return stem + "e";
  if (stem.size() > 2 && stem[stem.size() - 1] == stem[stem.size() - 2] && verbs.count(stem.substr(0, stem.size() - 1)))
    return stem.substr(0, stem.size() - 1);
  return std::nullopt;
}

bool is_number(std::string_view w) {
  if (w.empty()) return false;
  bool dot = false;
  for (size_t i = 0; i < w.size(); ++i) {
    if (w[i] == '.' && !dot && i > 0 && i + 1 < w.size()) {
      dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(w[i]))) return false;
  }
  return true;
}

}  // namespace

std::vector<AnnotatedToken> annotate(std::string_view q) {
  std::vector<AnnotatedToken> out;
  size_t i = 0;
  while (i < q.size()) {
    if (std::isspace(static_cast<unsigned char>(q[i]))) {
      ++i;
      continue;
    }
    AnnotatedToken t;
    t.begin = i;
    if (alnum(q[i])) {
      size_t j = i;
      for (;;) {
        while (j < q.size() && alnum(q[j])) ++j;
        // Keep inner joiners such as R&D, e-mail, 12.5, O'Brien.
        if (j + 1 < q.size() && std::string_view("&'._@-").find(q[j]) != std::string_view::npos && alnum(q[j + 1])) {
          ++j;
          continue;
        }
        break;
      }
      t.end = j;
    } else {
      t.end = i + 1;
    }
    t.surface = std::string(q.substr(t.begin, t.end - t.begin));
    const std::string w = to_lower(t.surface);
    if (!alnum(w[0])) {
      t.lemma = w;
      t.pos = Pos::Other;
    } else if (is_number(w)) {
      t.lemma = w;
      t.pos = Pos::Num;
    } else if (auto it = exceptions().find(w); it != exceptions().end()) {
      t.lemma = it->second.first;
      t.pos = it->second.second;
    } else if (verb_lemmas().count(w)) {
      t.lemma = w;
      t.pos = Pos::Verb;
    } else if (adjectives().count(w)) {
      t.lemma = w;
      t.pos = Pos::Adj;
    } else if (adverbs().count(w)) {
      t.lemma = w;
      t.pos = Pos::Adv;
    } else if (function_words().count(w)) {
      t.lemma = w;
      t.pos = Pos::Other;
    } else if (auto s = verb_stem(w, "ing")) {
      t.lemma = *s;
      t.pos = Pos::Verb;
    } else if (auto s2 = verb_stem(w, "ed")) {
      t.lemma = *s2;
      t.pos = Pos::Verb;
    } else if (std::string n = noun_lemma(w); n != w && verb_lemmas().count(n)) {
      t.lemma = n;
      t.pos = Pos::Verb;
    } else {
      t.lemma = noun_lemma(w);
      t.pos = Pos::Noun;
    }
    if (w.size() >= 5 && w.compare(w.size() - 3, 3, "ing") == 0) t.features.insert("ving");
    out.push_back(std::move(t));
    i = out.back().end;
  }
  return out;
}

// ------------------------------------------------------------------- adapt

namespace {

bool satisfies(const AnnotatedToken& t, const Constraint& c) {
  bool ok = false;
  if (c.predicate == "hasPartOfSpeech") ok = pos_name(t.pos) == c.argument;
  if (c.predicate == "hasLemmaForm") ok = iequals(t.lemma, c.argument);
  if (c.predicate == "hasParseFeature") ok = t.features.count(c.argument) > 0;
  return c.negated ? !ok : ok;
}

bool satisfies_all(const AnnotatedToken& t, const std::vector<Constraint>& cs) {
  return std::all_of(cs.begin(), cs.end(), [&](const Constraint& c) { return satisfies(t, c); });
}

std::vector<std::string> placeholders(std::string_view s) {
  std::vector<std::string> out;
  for (size_t p = s.find("VAR"); p != std::string_view::npos; p = s.find("VAR", p + 3)) {
    size_t j = p + 3;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j > p + 3) out.emplace_back(s.substr(p, j - p));
  }
  return out;
}

struct Decomposition {
  std::string subject;
  AnnotatedToken verb;
  std::string object;
};

Decomposition decompose(const SafEntry& e) {
  auto toks = annotate(e.phrase);
  std::vector<size_t> verbs;
  for (size_t i = 0; i < toks.size(); ++i)
    if (toks[i].pos == Pos::Verb) verbs.push_back(i);
  auto fail = [&](const std::string& why) {
    return AdaptationError("cannot decompose SAF phrase \"" + e.phrase + "\" (line " + std::to_string(e.line) +
                           "): " + why);
  };
  if (verbs.size() != 1) throw fail("expected exactly one verb, found " + std::to_string(verbs.size()));
  const size_t v = verbs[0];
  Decomposition d;
  d.verb = toks[v];
  for (size_t i = v; i-- > 0;) {
    if (toks[i].pos == Pos::Noun) {
      d.subject = toks[i].lemma;
      break;
    }
  }
  for (size_t i = v + 1; i < toks.size(); ++i) {
    if (toks[i].pos == Pos::Noun) {
      d.object = toks[i].lemma;
      break;
    }
  }
  if (d.subject.empty()) throw fail("no subject noun before the verb");
  if (d.object.empty()) throw fail("no object noun after the verb");
  return d;
}

}  // namespace

std::vector<Rule> adapt(const std::vector<Rule>& trf, const std::vector<SafEntry>& saf) {
  std::vector<Rule> out;
  for (const auto& rule : trf) {
    auto named = placeholders(rule.name);
    for (const auto& a : rule.arcs) {
      for (const auto& p : placeholders(a.target + " " + [&] {
             std::string s;
             for (const auto& c : a.constraints) s += c.argument + " ";
             return s;
           }())) {
        if (std::find(named.begin(), named.end(), p) == named.end())
          throw AdaptationError("rule " + rule.name + " uses " + p + " outside its name");
      }
    }
  }
  for (const auto& entry : saf) {
    const Decomposition d = decompose(entry);
    for (const auto& rule : trf) {
      // Only lexical head constraints apply to the SAF verb; surface
      // features describe question text.
      bool head_ok = true;
      for (const auto& c : rule.head_constraints)
        if (c.predicate != "hasParseFeature" && !satisfies(d.verb, c)) head_ok = false;
      if (!head_ok) continue;
      const std::map<std::string, std::string> lemma{{"VAR1", d.subject}, {"VAR2", d.object}};
      auto subst = [&](std::string s) {
        for (const auto& [var, lem] : lemma) s = replace_all(std::move(s), var, lem);
        return s;
      };
      Rule r;
      r.name = subst(rule.name);
      r.head = rule.head;
      r.head_constraints = rule.head_constraints;
      for (const auto& a : rule.arcs) {
        Arc na{a.role, subst(a.target), {}};
        for (auto c : a.constraints) {
          c.argument = subst(c.argument);
          na.constraints.push_back(std::move(c));
        }
        r.arcs.push_back(std::move(na));
      }
      for (const auto& p : placeholders(rule.name)) {
        if (p == "VAR1") r.bindings.push_back(Binding{p, d.subject, entry.table1, entry.column1, entry.type1});
        else if (p == "VAR2") r.bindings.push_back(Binding{p, d.object, entry.table2, entry.column2, entry.type2});
        else throw AdaptationError("rule " + rule.name + " uses unsupported placeholder " + p);
      }
      std::sort(r.bindings.begin(), r.bindings.end(),
                [](const Binding& a, const Binding& b) { return a.placeholder < b.placeholder; });
      r.bindings.erase(std::unique(r.bindings.begin(), r.bindings.end()), r.bindings.end());
      out.push_back(std::move(r));
    }
  }
  return out;
}

// ---------------------------------------------------------- process_query

namespace {

constexpr size_t kWindow = 6;

struct Mention {
  size_t token;
  const Binding* binding;
};

const Binding* arc_binding(const Rule& r, const Arc& a) {
  for (const auto& b : r.bindings)
    if (iequals(b.lemma, a.target)) return &b;
  return nullptr;
}

std::string op_before(const std::vector<AnnotatedToken>& t, size_t i) {
  auto lem = [&](size_t k) { return k < t.size() ? t[k].lemma : std::string(); };
  if (i >= 2) {
    const std::string a = lem(i - 2), b = lem(i - 1);
    if (b == "than") {
      if (a == "higher" || a == "greater" || a == "more" || a == "larger" || a == "bigger") return "greaterThan";
      if (a == "less" || a == "lower" || a == "fewer" || a == "smaller") return "lessThan";
    }
    if (a == "at" && b == "least") return "greaterOrEqual";
    if (a == "at" && b == "most") return "lessOrEqual";
  }
  if (i >= 1) {
    const std::string b = lem(i - 1);
    if (b == "above" || b == "over" || b == "exceed" || b == "exceeding") return "greaterThan";
    if (b == "below" || b == "under") return "lessThan";
  }
  return "equals";
}

std::optional<std::string> aggregate_cue(const std::vector<AnnotatedToken>& t, size_t i) {
  const std::string& w = t[i].lemma;
  if (i > 0 && t[i - 1].lemma == "at") return std::nullopt;
  if (w == "average") return "avg";
  if (w == "total") return "sum";
  if (w == "highest" || w == "most" || w == "maximum") return "max";
  if (w == "lowest" || w == "least" || w == "minimum") return "min";
  return std::nullopt;
}

}  // namespace

std::vector<DataItem> process_query(std::string_view question, const std::vector<Rule>& lrf,
                                    const ValueDictionary& dict, const SchemaCatalog& catalog) {
  const auto toks = annotate(question);
  std::vector<DataItem> items;
  auto type_of = [&](const std::string& table, const std::string& column) {
    const Column* c = catalog.column(table, column);
    return c ? c->type : DataType::Other;
  };
  auto base_item = [&](const std::string& table, const std::string& column) {
    DataItem it;
    const Column* c = catalog.column(table, column);
    const Table* tb = catalog.table(table);
    it.table = to_upper(tb ? tb->name : table);
    it.column = to_upper(c ? c->name : column);
    it.data_type = type_of(table, column);
    return it;
  };
  auto find_item = [&](const DataItem& probe) -> DataItem* {
    for (auto& it : items)
      if (it.key() == probe.key() && !it.filter_flag) return &it;
    return nullptr;
  };

  // Dictionary values, longest match first.
  std::vector<bool> is_value(toks.size(), false);
  for (size_t i = 0; i < toks.size();) {
    size_t matched = 0;
    const size_t limit = std::min(dict.max_key_words(), toks.size() - i);
    for (size_t n = limit; n >= 1 && !matched; --n) {
      bool content = false, words = true;
      std::string phrase;
      for (size_t k = i; k < i + n; ++k) {
        if (!alnum(toks[k].surface[0])) words = false;
        if (toks[k].pos != Pos::Other) content = true;
        phrase += (k > i ? " " : "") + toks[k].surface;
      }
      if (!words || !content) continue;
      const auto* targets = dict.lookup(normalize_value(phrase));
      if (!targets) continue;
      const std::string value(question.substr(toks[i].begin, toks[i + n - 1].end - toks[i].begin));
      for (const auto& tgt : *targets) {
        DataItem it = base_item(tgt.table, tgt.column);
        it.filter_flag = true;
        it.value = value;
        it.op = "equals";
        it.ambiguous = targets->size() > 1;
        items.push_back(std::move(it));
      }
      matched = n;
    }
    if (matched) {
      for (size_t k = i; k < i + matched; ++k) is_value[k] = true;
      i += matched;
    } else {
      ++i;
    }
  }

  // Rule matches: head, nearest subj before, nearest obj after.
  std::vector<Mention> mentions;
  for (const auto& rule : lrf) {
    for (size_t h = 0; h < toks.size(); ++h) {
      if (!satisfies_all(toks[h], rule.head_constraints)) continue;
      std::vector<Mention> found;
      bool ok = true;
      for (const auto& arc : rule.arcs) {
        std::optional<size_t> hit;
        if (arc.role == "subj") {
          for (size_t k = h; k-- > 0 && h - k <= kWindow;) {
            if (toks[k].pos != Pos::Other && satisfies_all(toks[k], arc.constraints)) {
              hit = k;
              break;
            }
          }
        } else {
          for (size_t k = h + 1; k < toks.size() && k - h <= kWindow; ++k) {
            if (toks[k].pos != Pos::Other && satisfies_all(toks[k], arc.constraints)) {
              hit = k;
              break;
            }
          }
        }
        if (!hit) {
          ok = false;
          break;
        }
        if (const Binding* b = arc_binding(rule, arc)) found.push_back(Mention{*hit, b});
      }
      if (ok) mentions.insert(mentions.end(), found.begin(), found.end());
    }
  }

  auto add_aggregate = [&](const Binding& b, const std::string& fn) {
    DataItem probe = base_item(b.table, b.column);
    DataItem* it = find_item(probe);
    if (!it) {
      items.push_back(probe);
      it = &items.back();
    }
    it->focus = "select";
    it->aggr_flag = true;
    it->aggr_function = fn;
  };

  // "how many X": count distinct over the key of the entity X names.
  for (size_t i = 0; i + 2 < toks.size(); ++i) {
    if (toks[i].lemma != "how" || toks[i + 1].lemma != "many") continue;
    const std::string& x = toks[i + 2].lemma;
    for (const auto& rule : lrf) {
      for (const auto& arc : rule.arcs) {
        if (arc.role != "subj" || !iequals(arc.target, x)) continue;
        if (const Binding* b = arc_binding(rule, arc)) add_aggregate(*b, "countDistinct");
      }
    }
  }

  for (size_t i = 0; i < toks.size(); ++i) {
    auto fn = aggregate_cue(toks, i);
    if (!fn) continue;
    for (const auto& m : mentions) {
      if (m.token > i && m.token - i <= kWindow && is_numeric(m.binding->type)) {
        add_aggregate(*m.binding, *fn);
        break;
      }
    }
  }

  // Question words put the entity they introduce in focus.
  for (size_t i = 0; i < toks.size(); ++i) {
    const std::string& w = toks[i].lemma;
    if (w != "which" && w != "what" && w != "list" && w != "show") continue;
    for (const auto& m : mentions) {
      if (m.token > i && m.token - i <= 2) {
        DataItem probe = base_item(m.binding->table, m.binding->column);
        DataItem* it = find_item(probe);
        if (!it) {
          items.push_back(probe);
          it = &items.back();
        }
        it->focus = "select";
        break;
      }
    }
  }

  // Numbers next to a numeric entity mention become filters.
  for (size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].pos != Pos::Num || is_value[i]) continue;
    const Mention* best = nullptr;
    for (const auto& m : mentions) {
      if (m.token < i && i - m.token <= kWindow && is_numeric(m.binding->type) && (!best || m.token > best->token))
        best = &m;
    }
    if (!best) continue;
    DataItem it = base_item(best->binding->table, best->binding->column);
    it.filter_flag = true;
    it.value = toks[i].surface;
    it.op = op_before(toks, i);
    items.push_back(std::move(it));
  }

  std::stable_sort(items.begin(), items.end(), [](const DataItem& a, const DataItem& b) { return a.key() < b.key(); });
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

std::string format_data_items(const std::vector<DataItem>& items) {
  std::ostringstream os;
  for (const auto& it : items) {
    std::vector<std::string> props;
    if (it.aggr_flag) props.push_back("aggrFlag=1");
    if (it.filter_flag) props.push_back("filterFlag=1");
    if (it.value) props.push_back("value=" + *it.value);
    props.push_back("dataType=" + std::string(data_type_name(it.data_type)));
    if (it.focus) props.push_back("focus=" + *it.focus);
    if (it.aggr_function) props.push_back("aggrFunction=" + *it.aggr_function);
    if (it.op) props.push_back("operator=" + *it.op);
    if (it.ambiguous) props.push_back("ambiguous=true");
    os << it.key() << "={";
    for (size_t i = 0; i < props.size(); ++i) os << (i ? ", " : "") << props[i];
    os << "}\n";
  }
  return os.str();
}

std::vector<ColumnValue> extract_column_value_pairs(const std::vector<DataItem>& items) {
  std::vector<ColumnValue> out;
  for (const auto& it : items)
    if (it.filter_flag && it.value) out.push_back(ColumnValue{it.table, it.column, *it.value});
  return out;
}

}  // namespace sqlgate
