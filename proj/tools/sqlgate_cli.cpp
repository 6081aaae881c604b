// Command-line front end. Every command is one or two service requests sent
// through the C API, so `--json` output is exactly the service's response.

#include <cstdlib>
#include <iostream>
#include <iomanip>
#include <iterator>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sqlgate/sqlgate.h"

using Json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kNegative = 1, kUsage = 2, kIo = 3 };

int exit_for(sqlgate_status s) {
  switch (s) {
    case SQLGATE_OK: return kOk;
    case SQLGATE_E_USAGE:
    case SQLGATE_E_CONFIG:
    case SQLGATE_E_CONTRACT: return kUsage;
    default: return kIo;
  }
}

bool debug_log() {
  const char* v = std::getenv("SQLGATE_LOG");
  return v && (std::string(v) == "debug" || std::string(v) == "trace");
}

struct Failure {
  int code;
};

class Client {
 public:
  Client() {
    if (sqlgate_service_new(0, &svc_) != SQLGATE_OK) {
      std::cerr << "error: " << sqlgate_last_error() << "\n";
      throw Failure{kIo};
    }
  }
  ~Client() { sqlgate_service_free(svc_); }
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  /// Returns the response record; on an error record prints the message
  /// and throws Failure with the mapped exit status.
  Json call(const Json& req, std::string* raw = nullptr) {
    const std::string text = req.dump();
    if (debug_log()) std::cerr << "[sqlgate] request " << text << "\n";
    char* out = nullptr;
    sqlgate_status s = sqlgate_request(svc_, text.c_str(), &out);
    std::string body = out ? out : "";
    sqlgate_string_free(out);
    if (raw) *raw = body;
    Json res = Json::parse(body, nullptr, false);
    if (s != SQLGATE_OK) {
      if (res.is_object() && res.contains("error"))
        std::cerr << "error (" << res["error"]["code"].get<std::string>()
                  << "): " << res["error"]["message"].get<std::string>() << "\n";
      else
        std::cerr << "error: " << sqlgate_last_error() << "\n";
      throw Failure{exit_for(s)};
    }
    return res;
  }

  sqlgate_service* raw() { return svc_; }

 private:
  sqlgate_service* svc_ = nullptr;
};

struct Globals {
  bool json = false;
  unsigned long long seed = 0;
  unsigned jobs = 1;
};

/// Registers --schema/--db (when given) and returns the id, or "".
std::string register_schema(Client& c, const std::string& schema, const std::string& db, const std::string& dict = "",
                            const std::string& lrf = "", bool build_dict = false) {
  if (schema.empty() && db.empty()) return "";
  Json req{{"op", "register_schema"}};
  if (!schema.empty()) req["schema_path"] = schema;
  if (!db.empty()) req["db_path"] = db;
  if (!dict.empty()) req["dictionary_path"] = dict;
  else if (build_dict && !db.empty()) req["dictionary"] = true;
  if (!lrf.empty()) req["lrf_path"] = lrf;
  return c.call(req)["schema_id"].get<std::string>();
}

void print_json(const std::string& raw) { std::cout << raw << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sqlgate: incremental SQL feasibility, value linking and text-to-SQL metrics"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_flag("--json", g.json, "Print the service response records");
  app.add_option("--seed", g.seed, "Seed for corpora and decodes")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads for evaluation")->capture_default_str();

  const std::vector<std::string> modes{"lex", "nogrd", "guard"};
  const std::vector<std::string> profiles{"spider", "ext"};

  // parse
  auto* parse = app.add_subcommand("parse", "Judge a SQL text (prefix) under a mode and profile");
  std::string p_mode = "nogrd", p_profile = "ext", p_schema, p_db, p_sql;
  bool p_stdin = false;
  parse->add_option("--mode", p_mode)->check(CLI::IsMember(modes))->capture_default_str();
  parse->add_option("--profile", p_profile)->check(CLI::IsMember(profiles))->capture_default_str();
  parse->add_option("--schema", p_schema, "Spider-format schema file");
  parse->add_option("--db", p_db, "SQLite database file");
  auto* sql_opt = parse->add_option("--sql", p_sql);
  auto* stdin_opt = parse->add_flag("--stdin", p_stdin, "Read the SQL from standard input");
  sql_opt->excludes(stdin_opt);

  // feasible
  auto* feasible = app.add_subcommand("feasible", "Verdict for each candidate extension of a prefix");
  std::string f_mode = "nogrd", f_profile = "ext", f_schema, f_db, f_prefix;
  std::vector<std::string> f_cands;
  feasible->add_option("--mode", f_mode)->check(CLI::IsMember(modes))->capture_default_str();
  feasible->add_option("--profile", f_profile)->check(CLI::IsMember(profiles))->capture_default_str();
  feasible->add_option("--schema", f_schema);
  feasible->add_option("--db", f_db);
  feasible->add_option("--prefix", f_prefix);
  feasible->add_option("--candidate,-c", f_cands, "Candidate piece (repeatable)")->required();

  // adapt
  auto* adapt = app.add_subcommand("adapt", "Instantiate TRF rules with a schema's SAF entries");
  std::string a_saf, a_trf, a_schema, a_out;
  adapt->add_option("--saf", a_saf)->required();
  adapt->add_option("--trf", a_trf)->required();
  adapt->add_option("--schema", a_schema);
  adapt->add_option("-o,--output", a_out, "Write the LRF here instead of standard output");

  // link
  auto* link = app.add_subcommand("link", "Print the data-items of a question");
  std::string l_lrf, l_dict, l_schema, l_db, l_question;
  link->add_option("--lrf", l_lrf)->required();
  link->add_option("--dict", l_dict, "Value dictionary (JSON)");
  link->add_option("--schema", l_schema);
  link->add_option("--db", l_db, "Build the dictionary from this database when --dict is absent");
  link->add_option("--question,-q", l_question)->required();

  // serialize
  auto* ser = app.add_subcommand("serialize", "Serialize question and schema for a seq2seq model");
  std::string s_schema, s_db, s_question, s_content = "on", s_lrf, s_dict;
  ser->add_option("--schema", s_schema);
  ser->add_option("--db", s_db);
  ser->add_option("--question,-q", s_question)->required();
  ser->add_option("--db-content", s_content)->check(CLI::IsMember({"on", "off"}))->capture_default_str();
  ser->add_option("--lrf", s_lrf);
  ser->add_option("--dict", s_dict);

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Exact-match and execution accuracy of predictions");
  std::string e_gold, e_pred, e_db, e_schema, e_metric = "both";
  bool e_structural = false;
  eval->add_option("--gold", e_gold)->required();
  eval->add_option("--pred", e_pred, "One SQL per line, or JSON records with a pred field");
  eval->add_option("--db", e_db);
  eval->add_option("--schema", e_schema);
  eval->add_option("--metric", e_metric)->check(CLI::IsMember({"em", "ex", "both"}))->capture_default_str();
  eval->add_flag("--structural", e_structural, "Ignore literal values in EM");

  // gen-corpus
  auto* gen = app.add_subcommand("gen-corpus", "Generate a fixture database and its question/SQL splits");
  std::string c_db, c_variant = "base", c_out;
  gen->add_option("--db", c_db)->check(CLI::IsMember({"hr", "wh", "in"}))->required();
  gen->add_option("--variant", c_variant)->check(CLI::IsMember({"base", "fnc", "with"}))->capture_default_str();
  gen->add_option("-o,--output", c_out)->required();

  // decode
  auto* dec = app.add_subcommand("decode", "Constrained beam search with a mock model trained on a corpus");
  std::string d_corpus, d_mode = "guard", d_profile = "ext", d_schema, d_db;
  size_t d_width = 4, d_top_k = 0, d_max = 64, d_subset = 0;
  dec->add_option("--corpus", d_corpus)->required();
  dec->add_option("--mode", d_mode)->check(CLI::IsMember(modes))->capture_default_str();
  dec->add_option("--profile", d_profile)->check(CLI::IsMember(profiles))->capture_default_str();
  dec->add_option("--schema", d_schema);
  dec->add_option("--db", d_db);
  dec->add_option("--width", d_width)->capture_default_str();
  dec->add_option("--top-k", d_top_k, "Pieces proposed per step, 0 = all")->capture_default_str();
  dec->add_option("--max-pieces", d_max)->capture_default_str();
  dec->add_option("--subset", d_subset, "Train on this many seeded-random queries, 0 = all");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the request service");
  std::string v_listen = "tcp://127.0.0.1:7433";
  serve->add_option("--listen", v_listen, "tcp://HOST:PORT, unix:///path or http://HOST:PORT")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    Client c;
    std::string raw;

    if (*parse) {
      if (p_sql.empty() && !p_stdin && !sql_opt->count()) {
        std::cerr << "error: give --sql or --stdin\n";
        return kUsage;
      }
      if (p_stdin) p_sql.assign(std::istreambuf_iterator<char>(std::cin), {});
      Json req{{"op", "parse"}, {"sql", p_sql}, {"mode", p_mode}, {"profile", p_profile}};
      std::string id = register_schema(c, p_schema, p_db);
      if (!id.empty()) req["schema_id"] = id;
      Json res = c.call(req, &raw);
      if (g.json) print_json(raw);
      else std::cout << res["verdict"].get<std::string>() << "\n";
      if (!g.json && res.contains("violation")) {
        const auto& v = res["violation"];
        std::cerr << v["kind"].get<std::string>() << " '" << v["subject"].get<std::string>() << "' at offset "
                  << v["location"] << "\n";
      }
      return res["verdict"] == "invalid" ? kNegative : kOk;
    }

    if (*feasible) {
      Json req{{"op", "batch_feasibility"}, {"mode", f_mode}, {"profile", f_profile}};
      std::string id = register_schema(c, f_schema, f_db);
      if (!id.empty()) req["schema_id"] = id;
      req["items"] = Json::array({{{"prefix", f_prefix}, {"candidates", f_cands}}});
      Json res = c.call(req, &raw);
      const Json& item = res["results"][0];
      if (g.json) {
        print_json(raw);
      } else if (!item["ok"].get<bool>()) {
        std::cerr << "error: " << item["error"]["message"].get<std::string>() << "\n";
        return kUsage;
      } else {
        for (size_t i = 0; i < f_cands.size(); ++i)
          std::cout << item["verdicts"][i].get<std::string>() << "\t" << f_cands[i] << "\n";
      }
      return item["ok"].get<bool>() ? kOk : kUsage;
    }

    if (*adapt) {
      Json req{{"op", "adapt"}, {"saf_path", a_saf}, {"trf_path", a_trf}};
      if (!a_schema.empty()) req["schema_path"] = a_schema;
      if (!a_out.empty()) req["out_path"] = a_out;
      Json res = c.call(req, &raw);
      if (g.json) print_json(raw);
      else if (a_out.empty()) std::cout << res["lrf"].get<std::string>();
      return kOk;
    }

    if (*link) {
      std::string id = register_schema(c, l_schema, l_db, l_dict, l_lrf, true);
      if (id.empty()) {
        std::cerr << "error: give --schema or --db\n";
        return kUsage;
      }
      Json res = c.call({{"op", "link_and_serialize"}, {"schema_id", id}, {"question", l_question}}, &raw);
      if (g.json) print_json(raw);
      else std::cout << res["data_items_text"].get<std::string>();
      return kOk;
    }

    if (*ser) {
      const bool on = s_content == "on";
      std::string id = register_schema(c, s_schema, s_db, s_dict, s_lrf, on);
      if (id.empty()) {
        std::cerr << "error: give --schema or --db\n";
        return kUsage;
      }
      Json res = c.call({{"op", "link_and_serialize"}, {"schema_id", id}, {"question", s_question}, {"db_content", on}},
                        &raw);
      if (g.json) print_json(raw);
      else std::cout << res["serialized"].get<std::string>() << "\n";
      return kOk;
    }

    if (*eval) {
      Json req{{"op", "evaluate"}, {"gold_path", e_gold}, {"metric", e_metric}, {"structural", e_structural},
               {"jobs", g.jobs}};
      if (!e_pred.empty()) req["pred_path"] = e_pred;
      if (!e_db.empty()) req["db_path"] = e_db;
      if (!e_schema.empty()) req["schema_path"] = e_schema;
      Json res = c.call(req, &raw);
      if (g.json) print_json(raw);
      else std::cout << res["table"].get<std::string>();
      return kOk;
    }

    if (*gen) {
      Json res = c.call({{"op", "gen_corpus"}, {"db", c_db}, {"variant", c_variant}, {"seed", g.seed}, {"out_dir", c_out}},
                        &raw);
      if (g.json) {
        print_json(raw);
      } else {
        const auto& s = res["splits"];
        std::cout << res["db_id"].get<std::string>() << " " << res["variant"].get<std::string>() << ": train "
                  << s["train"] << ", dev " << s["dev"] << ", test " << s["test"] << "\n";
        for (const auto& [k, v] : res["files"].items()) std::cout << "  " << k << "\t" << v.get<std::string>() << "\n";
      }
      return kOk;
    }

    if (*dec) {
      Json req{{"op", "decode"},       {"corpus_path", d_corpus}, {"mode", d_mode},       {"profile", d_profile},
               {"width", d_width},     {"top_k", d_top_k},        {"max_pieces", d_max},  {"subset", d_subset},
               {"seed", g.seed}};
      if (!d_schema.empty()) req["schema_path"] = d_schema;
      if (!d_db.empty()) req["db_path"] = d_db;
      Json res = c.call(req, &raw);
      if (g.json) {
        print_json(raw);
      } else {
        for (const auto& r : res["results"])
          std::cout << std::fixed << std::setprecision(4) << r["score"].get<double>() << "\t"
                    << r["sql"].get<std::string>() << "\n";
        std::cerr << "rejected " << res["rejection_rate"].get<double>() * 100 << "% of "
                  << res["proposed"] << " proposals\n";
      }
      return res["results"].empty() ? kNegative : kOk;
    }

    if (*serve) {
      sqlgate_server* server = nullptr;
      sqlgate_status s = sqlgate_server_start(c.raw(), v_listen.c_str(), &server);
      if (s != SQLGATE_OK) {
        std::cerr << "error (" << sqlgate_status_name(s) << "): " << sqlgate_last_error() << "\n";
        return exit_for(s);
      }
      std::cerr << "listening on " << v_listen << " (port " << sqlgate_server_port(server) << ")\n";
      sqlgate_server_wait(server);
      sqlgate_server_free(server);
      return kOk;
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kUsage;
}
