#include "sqlgate/service.hpp"

#include <algorithm>
#include <filesystem>
#include <random>
#include <sstream>

#include "sqlgate/corpus.hpp"
#include "sqlgate/decode.hpp"
#include "sqlgate/metrics.hpp"
#include "sqlgate/serializer.hpp"

namespace sqlgate {

namespace {

Json error_record(std::string_view code, std::string_view message) {
  Json r;
  r["ok"] = false;
  r["error"] = {{"code", code}, {"message", message}};
  return r;
}

Json ok_record() {
  Json r;
  r["ok"] = true;
  return r;
}

const Json* find(const Json& req, const char* name) {
  auto it = req.find(name);
  return it == req.end() || it->is_null() ? nullptr : &*it;
}

std::string need_str(const Json& req, const char* name) {
  const Json* v = find(req, name);
  if (!v) throw UsageError(std::string("missing field '") + name + "'");
  if (!v->is_string()) throw UsageError(std::string("field '") + name + "' must be a string");
  return v->get<std::string>();
}

std::optional<std::string> opt_str(const Json& req, const char* name) {
  if (!find(req, name)) return std::nullopt;
  return need_str(req, name);
}

size_t opt_count(const Json& req, const char* name, size_t fallback) {
  const Json* v = find(req, name);
  if (!v) return fallback;
  if (!v->is_number_unsigned()) throw UsageError(std::string("field '") + name + "' must be a non-negative integer");
  return v->get<size_t>();
}

bool opt_flag(const Json& req, const char* name, bool fallback) {
  const Json* v = find(req, name);
  if (!v) return fallback;
  if (v->is_boolean()) return v->get<bool>();
  if (v->is_string()) {
    const auto s = to_lower(v->get<std::string>());
    if (s == "on" || s == "true") return true;
    if (s == "off" || s == "false") return false;
  }
  throw UsageError(std::string("field '") + name + "' must be true/false or on/off");
}

Mode need_mode(const Json& req, Mode fallback) {
  auto s = opt_str(req, "mode");
  if (!s) return fallback;
  auto m = parse_mode(*s);
  if (!m) throw UsageError("unknown mode '" + *s + "' (lex, nogrd, guard)");
  return *m;
}

Profile need_profile(const Json& req, Profile fallback) {
  auto s = opt_str(req, "profile");
  if (!s) return fallback;
  auto p = parse_profile(*s);
  if (!p) throw UsageError("unknown profile '" + *s + "' (spider, ext)");
  return *p;
}

Json verdict_list(const std::vector<Verdict>& vs) {
  Json a = Json::array();
  for (auto v : vs) a.push_back(verdict_name(v));
  return a;
}

Json data_items_json(const std::vector<DataItem>& items) {
  Json a = Json::array();
  for (const auto& it : items) {
    Json o;
    o["key"] = it.key();
    if (it.aggr_flag) o["aggrFlag"] = 1;
    if (it.filter_flag) o["filterFlag"] = 1;
    if (it.value) o["value"] = *it.value;
    o["dataType"] = data_type_name(it.data_type);
    if (it.focus) o["focus"] = *it.focus;
    if (it.aggr_function) o["aggrFunction"] = *it.aggr_function;
    if (it.op) o["operator"] = *it.op;
    if (it.ambiguous) o["ambiguous"] = true;
    a.push_back(std::move(o));
  }
  return a;
}

/// Prediction files hold one SQL per line, or JSON records with a "pred",
/// "sql" or (for a corpus file used as predictions) "gold" field.
std::vector<std::string> load_predictions(const std::string& path) {
  std::vector<std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  for (size_t n = 1; std::getline(in, line); ++n) {
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '{') {
      Json j;
      try {
        j = Json::parse(t);
      } catch (const Json::exception& e) {
        throw FormatError("prediction line " + std::to_string(n) + ": not JSON (" + e.what() + ")");
      }
      const Json* v = find(j, "pred");
      if (!v) v = find(j, "sql");
      if (!v) v = find(j, "gold");
      if (!v || !v->is_string()) throw FormatError("prediction line " + std::to_string(n) + ": no pred field");
      out.push_back(v->get<std::string>());
    } else {
      out.push_back(t);
    }
  }
  return out;
}

}  // namespace

Service::Service(ServiceOptions opts) : opts_(std::move(opts)) {}

std::string response_status(std::string_view response) {
  try {
    Json j = Json::parse(response);
    if (j.value("ok", false)) return "ok";
    return j.at("error").at("code").get<std::string>();
  } catch (const Json::exception&) {
    return "format";
  }
}

std::string Service::handle(std::string_view request) {
  Json req;
  try {
    req = Json::parse(request);
  } catch (const Json::exception& e) {
    return error_record("format", std::string("request is not JSON: ") + e.what()).dump();
  }
  if (!req.is_object()) return error_record("format", "request must be a JSON object").dump();
  auto op = req.find("op");
  if (op == req.end() || !op->is_string()) return error_record("usage", "missing field 'op'").dump();
  const std::string name = op->get<std::string>();
  try {
    return dispatch(name, req).dump();
  } catch (const Error& e) {
    return error_record(error_code_name(e.code()), e.what()).dump();
  } catch (const Json::exception& e) {
    return error_record("usage", e.what()).dump();
  } catch (const std::exception& e) {
    return error_record("internal", e.what()).dump();
  }
}

std::string Service::handle_op(std::string_view op, std::string_view body) {
  Json req;
  try {
    req = body.empty() ? Json::object() : Json::parse(body);
  } catch (const Json::exception& e) {
    return error_record("format", std::string("request is not JSON: ") + e.what()).dump();
  }
  if (!req.is_object()) return error_record("format", "request must be a JSON object").dump();
  req["op"] = op;
  return handle(req.dump());
}

Json Service::dispatch(std::string_view op, const Json& req) {
  purge_expired();
  if (op == "register_schema") return register_schema(req);
  if (op == "open_session") return open_session(req);
  if (op == "close_session") return close_session(req);
  if (op == "batch_feasibility") return batch_feasibility(req);
  if (op == "parse") return parse(req);
  if (op == "link_and_serialize") return link_and_serialize(req);
  if (op == "adapt") return adapt(req);
  if (op == "evaluate") return evaluate(req);
  if (op == "gen_corpus") return gen_corpus(req);
  if (op == "decode") return decode(req);
  throw UsageError("unknown op '" + std::string(op) + "'");
}

std::shared_ptr<const RegisteredSchema> Service::schema(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = schemas_.find(id);
  if (it == schemas_.end()) throw NotFoundError("unknown schema_id '" + id + "'");
  return it->second;
}

size_t Service::session_count() {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

size_t Service::purge_expired() {
  const auto now = opts_.clock();
  std::lock_guard lock(mu_);
  return std::erase_if(sessions_, [&](const auto& kv) { return now - kv.second.last_used > opts_.session_ttl; });
}

// ------------------------------------------------------------------- ops

Json Service::register_schema(const Json& req) {
  auto reg = std::make_shared<RegisteredSchema>();
  if (const Json* doc = find(req, "schema")) {
    reg->catalog = std::make_shared<const SchemaCatalog>(parse_spider_schema(doc->is_string() ? doc->get<std::string>()
                                                                                            : doc->dump()));
  } else if (auto path = opt_str(req, "schema_path")) {
    reg->catalog = std::make_shared<const SchemaCatalog>(load_spider_schema(*path));
  } else if (auto db = opt_str(req, "db_path")) {
    reg->catalog = std::make_shared<const SchemaCatalog>(load_db_schema(*db));
  } else {
    throw UsageError("register_schema needs one of 'schema', 'schema_path', 'db_path'");
  }
  reg->db_path = opt_str(req, "db_path").value_or("");
  if (auto d = opt_str(req, "dictionary_path")) {
    reg->dictionary = ValueDictionary::from_json(read_file(*d), *reg->catalog);
  } else if (opt_flag(req, "dictionary", false)) {
    if (reg->db_path.empty()) throw UsageError("'dictionary': true needs 'db_path'");
    reg->dictionary = build_value_dictionary(*reg->catalog, reg->db_path,
                                             opt_count(req, "max_values", ValueDictionary::kDefaultMaxValuesPerColumn));
  }
  if (auto l = opt_str(req, "lrf")) reg->lrf = parse_rules(*l);
  else if (auto lp = opt_str(req, "lrf_path")) reg->lrf = load_rules(*lp);

  Json r = ok_record();
  std::lock_guard lock(mu_);
  std::string id = reg->catalog->db_id() + "-" + std::to_string(next_schema_++);
  r["schema_id"] = id;
  r["tables"] = reg->catalog->tables().size();
  schemas_[id] = std::move(reg);
  return r;
}

Json Service::open_session(const Json& req) {
  const Mode mode = need_mode(req, Mode::ParseNoGuards);
  const Profile profile = need_profile(req, Profile::Extended);
  std::shared_ptr<const SchemaCatalog> catalog;
  auto schema_id = opt_str(req, "schema_id");
  if (schema_id) catalog = schema(*schema_id)->catalog;
  ParserState st = init(mode, profile, catalog);
  if (auto prefix = opt_str(req, "prefix")) st = sqlgate::advance(st, *prefix);
  Json r = ok_record();
  r["verdict"] = verdict_name(st.verdict());
  std::lock_guard lock(mu_);
  std::string id = "s-" + std::to_string(next_session_++);
  sessions_.emplace(id, Session{std::move(st), schema_id.value_or(""), opts_.clock()});
  r["session_id"] = id;
  return r;
}

Json Service::close_session(const Json& req) {
  const std::string id = need_str(req, "session_id");
  std::lock_guard lock(mu_);
  if (!sessions_.erase(id)) throw NotFoundError("unknown session_id '" + id + "'");
  return ok_record();
}

Json Service::batch_feasibility(const Json& req) {
  const Json* items = find(req, "items");
  if (!items || !items->is_array()) throw UsageError("missing array field 'items'");
  const Mode mode = need_mode(req, Mode::ParseNoGuards);
  const Profile profile = need_profile(req, Profile::Extended);
  auto schema_id = opt_str(req, "schema_id");

  Json results = Json::array();
  for (const auto& item : *items) {
    try {
      if (!item.is_object()) throw UsageError("item must be an object");
      const Json* cands = find(item, "candidates");
      if (!cands || !cands->is_array()) throw UsageError("item needs array field 'candidates'");
      std::vector<std::string> candidates;
      for (const auto& c : *cands) {
        if (!c.is_string()) throw UsageError("candidates must be strings");
        candidates.push_back(c.get<std::string>());
      }
      auto commit = opt_str(item, "commit");
      Json out = ok_record();
      auto judge = [&](const ParserState& st) {
        if (st.verdict() == Verdict::Invalid) return std::vector<Verdict>(candidates.size(), Verdict::Invalid);
        return feasible_extensions(st, candidates);
      };

      if (auto sid = opt_str(item, "session_id")) {
        std::shared_ptr<std::mutex> commit_lock;
        ParserState st;
        {
          std::lock_guard lock(mu_);
          auto it = sessions_.find(*sid);
          if (it == sessions_.end()) throw NotFoundError("unknown session_id '" + *sid + "'");
          it->second.last_used = opts_.clock();
          st = it->second.state;
          commit_lock = it->second.commit_lock;
        }
        if (!commit) {
          out["verdicts"] = verdict_list(judge(st));
        } else {
          // Commits on one session are serialized; probes never wait.
          std::lock_guard serial(*commit_lock);
          {
            std::lock_guard lock(mu_);
            auto it = sessions_.find(*sid);
            if (it == sessions_.end()) throw NotFoundError("unknown session_id '" + *sid + "'");
            st = it->second.state;
          }
          out["verdicts"] = verdict_list(judge(st));
          ParserState next = sqlgate::advance(st, *commit);
          out["verdict"] = verdict_name(next.verdict());
          std::lock_guard lock(mu_);
          auto it = sessions_.find(*sid);
          if (it != sessions_.end()) it->second.state = std::move(next);
        }
      } else {
        std::shared_ptr<const SchemaCatalog> catalog;
        if (schema_id) catalog = schema(*schema_id)->catalog;
        ParserState st = sqlgate::advance(init(mode, profile, catalog), opt_str(item, "prefix").value_or(""));
        out["verdicts"] = verdict_list(judge(st));
        if (commit) out["verdict"] = verdict_name(sqlgate::advance(st, *commit).verdict());
      }
      results.push_back(std::move(out));
    } catch (const Error& e) {
      results.push_back(error_record(error_code_name(e.code()), e.what()));
    }
  }
  Json r = ok_record();
  r["results"] = std::move(results);
  return r;
}

Json Service::parse(const Json& req) {
  const std::string sql = need_str(req, "sql");
  const Mode mode = need_mode(req, Mode::ParseNoGuards);
  const Profile profile = need_profile(req, Profile::Extended);
  std::shared_ptr<const SchemaCatalog> catalog;
  if (auto id = opt_str(req, "schema_id")) catalog = schema(*id)->catalog;
  ParserState st = sqlgate::advance(init(mode, profile, catalog), sql);
  Json r = ok_record();
  r["verdict"] = verdict_name(st.verdict());
  if (st.violation()) {
    const auto& v = *st.violation();
    r["violation"] = {{"kind", violation_kind_name(v.kind)}, {"location", v.location}, {"subject", v.subject}};
  }
  return r;
}

Json Service::link_and_serialize(const Json& req) {
  auto reg = schema(need_str(req, "schema_id"));
  const std::string question = need_str(req, "question");
  const bool content = opt_flag(req, "db_content", true);
  std::vector<DataItem> items;
  if (content) {
    if (!reg->dictionary) throw ConfigError("db_content needs a value dictionary registered with the schema");
    if (!reg->lrf) throw ConfigError("db_content needs an LRF registered with the schema");
    items = process_query(question, *reg->lrf, *reg->dictionary, *reg->catalog);
  }
  SerializationConfig cfg;
  cfg.db_content = content ? DbContent::Enabled : DbContent::Disabled;
  Json r = ok_record();
  r["serialized"] = serialize(question, *reg->catalog, extract_column_value_pairs(items), cfg);
  r["data_items"] = data_items_json(items);
  r["data_items_text"] = format_data_items(items);
  return r;
}

Json Service::adapt(const Json& req) {
  std::optional<SchemaCatalog> catalog;
  if (auto p = opt_str(req, "schema_path")) catalog = load_spider_schema(*p);
  else if (auto d = opt_str(req, "db_path")) catalog = load_db_schema(*d);
  else if (auto id = opt_str(req, "schema_id")) catalog = *schema(*id)->catalog;
  const SchemaCatalog* cat = catalog ? &*catalog : nullptr;
  std::vector<SafEntry> saf;
  if (auto t = opt_str(req, "saf")) saf = parse_saf_text(*t, cat);
  else saf = parse_saf(need_str(req, "saf_path"), cat);
  std::vector<Rule> trf;
  if (auto t = opt_str(req, "trf")) trf = parse_rules(*t);
  else trf = load_rules(need_str(req, "trf_path"));
  const std::string text = write_rules(sqlgate::adapt(trf, saf));
  if (auto out = opt_str(req, "out_path")) write_file(*out, text);
  Json r = ok_record();
  r["lrf"] = text;
  return r;
}

Json Service::evaluate(const Json& req) {
  const std::string gold_path = need_str(req, "gold_path");
  auto gold = parse_corpus(read_file(gold_path), false);
  std::vector<std::string> preds;
  if (auto p = opt_str(req, "pred_path")) {
    preds = load_predictions(*p);
  } else {
    for (const auto& g : gold) {
      if (!g.pred) throw UsageError("no 'pred_path' and the gold records carry no pred field");
      preds.push_back(*g.pred);
    }
  }
  if (preds.size() != gold.size())
    throw FormatError("gold has " + std::to_string(gold.size()) + " records but predictions have " +
                      std::to_string(preds.size()));
  const std::string metric = to_lower(opt_str(req, "metric").value_or("both"));
  if (metric != "em" && metric != "ex" && metric != "both") throw UsageError("metric must be em, ex or both");
  EvalOptions opts;
  opts.em = metric != "ex";
  opts.ex = metric != "em";
  opts.compare_values = !opt_flag(req, "structural", false);
  opts.jobs = static_cast<unsigned>(std::max<size_t>(1, opt_count(req, "jobs", 1)));
  const std::string db_path = opts.ex ? need_str(req, "db_path") : opt_str(req, "db_path").value_or("");

  std::optional<SchemaCatalog> catalog;
  if (auto s = opt_str(req, "schema_path")) catalog = load_spider_schema(*s);
  else if (auto id = opt_str(req, "schema_id")) catalog = *schema(*id)->catalog;
  else if (!db_path.empty()) catalog = load_db_schema(db_path);

  std::vector<EvalInput> inputs;
  for (size_t i = 0; i < gold.size(); ++i) inputs.push_back({gold[i].question, gold[i].gold, preds[i]});
  CorpusReport report = evaluate_corpus(inputs, catalog ? &*catalog : nullptr, db_path, opts);
  Json r = ok_record();
  r["report"] = Json::parse(report_json(report));
  r["table"] = report_table(report, opt_str(req, "label").value_or(std::filesystem::path(gold_path).stem().string()));
  return r;
}

Json Service::gen_corpus(const Json& req) {
  CorpusSpec spec;
  const std::string db = need_str(req, "db");
  auto kind = parse_db_kind(db);
  if (!kind) throw UsageError("unknown db '" + db + "' (hr, wh, in)");
  auto variant = parse_variant(opt_str(req, "variant").value_or("base"));
  if (!variant) throw UsageError("unknown variant (base, fnc, with)");
  spec.db = *kind;
  spec.variant = *variant;
  spec.seed = opt_count(req, "seed", 0);
  spec.splits = default_splits(spec.db, spec.variant);
  if (const Json* s = find(req, "splits")) {
    spec.splits.train = opt_count(*s, "train", spec.splits.train);
    spec.splits.dev = opt_count(*s, "dev", spec.splits.dev);
    spec.splits.test = opt_count(*s, "test", spec.splits.test);
  }
  GeneratedCorpus g = generate(spec, need_str(req, "out_dir"));
  Json r = ok_record();
  r["db_id"] = fixture_db_id(spec.db);
  r["variant"] = variant_name(spec.variant);
  r["splits"] = {{"train", g.train.size()}, {"dev", g.dev.size()}, {"test", g.test.size()}};
  r["files"] = {{"db", g.db_path},       {"schema", g.schema_path}, {"dictionary", g.dictionary_path},
                {"train", g.train_path}, {"dev", g.dev_path},       {"test", g.test_path},
                {"manifest", g.manifest_path}};
  return r;
}

Json Service::decode(const Json& req) {
  auto records = load_corpus(need_str(req, "corpus_path"));
  std::vector<std::string> golds;
  for (const auto& rec : records) golds.push_back(rec.gold);
  if (const size_t subset = opt_count(req, "subset", 0); subset > 0 && subset < golds.size()) {
    std::mt19937_64 rng(opt_count(req, "seed", 0));
    for (size_t i = golds.size(); i > 1; --i) std::swap(golds[i - 1], golds[rng() % i]);
    golds.resize(subset);
  }
  std::shared_ptr<const SchemaCatalog> catalog;
  if (auto s = opt_str(req, "schema_path")) catalog = std::make_shared<const SchemaCatalog>(load_spider_schema(*s));
  else if (auto d = opt_str(req, "db_path")) catalog = std::make_shared<const SchemaCatalog>(load_db_schema(*d));
  else if (auto id = opt_str(req, "schema_id")) catalog = schema(*id)->catalog;
  BeamConfig cfg;
  cfg.mode = need_mode(req, Mode::ParseWithGuards);
  cfg.profile = need_profile(req, Profile::Extended);
  cfg.width = opt_count(req, "width", cfg.width);
  cfg.top_k = opt_count(req, "top_k", cfg.top_k);
  cfg.max_pieces = opt_count(req, "max_pieces", cfg.max_pieces);
  DecodeOutput out = sqlgate::decode(train_mock_lm(golds), cfg, catalog);
  Json r = ok_record();
  Json results = Json::array();
  for (const auto& s : out.results) results.push_back({{"sql", s.sql}, {"score", s.score}});
  r["results"] = std::move(results);
  r["proposed"] = out.stats.proposed;
  r["rejection_rate"] = out.stats.rate(cfg.mode);
  return r;
}

}  // namespace sqlgate
