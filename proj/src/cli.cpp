#include "bf/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "bf/examples.hpp"
#include "bf/service.hpp"

namespace bf {
namespace {

namespace fs = std::filesystem;
using io::json;

enum class Format { table, json, csv };

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string set_text(const SubsetMask& m) {
  const json labels = io::to_json(m);
  std::string s = "{";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) s += ",";
    s += labels[i].is_string() ? labels[i].get<std::string>() : labels[i].dump();
  }
  return s + "}";
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void print_rows(std::ostream& out, Format f, const std::vector<std::vector<std::string>>& rows) {
  if (f == Format::csv) {
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_cell(r[i]);
      out << "\n";
    }
    return;
  }
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      line += r[i];
      if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
    }
    out << line << "\n";
  }
}

json envelope(const std::string& command, json result) {
  return json{{"schema", io::kSchemaVersion}, {"command", command}, {"result", std::move(result)}};
}

json load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return io::parse(ss.str());
}

Criterion criterion_arg(const std::string& name) {
  auto c = parse_criterion(name);
  if (!c) {
    throw Error(ErrorCode::malformed,
                "unknown criterion '" + name +
                    "'; expected interval, strict, jaffray, pignistic, choquet, choquet-upper or dominance");
  }
  return *c;
}

/// "{a,b}" or "a,b" to a label array.
json target_arg(const std::string& text) {
  std::string s = text;
  if (s.size() >= 2 && s.front() == '{' && s.back() == '}') s = s.substr(1, s.size() - 2);
  json labels = json::array();
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, ',')) {
    const auto b = cur.find_first_not_of(' ');
    const auto e = cur.find_last_not_of(' ');
    if (b != std::string::npos) labels.push_back(cur.substr(b, e - b + 1));
  }
  return labels;
}

// --- evaluate / compare / reduce ----------------------------------------------

struct EvaluateArgs {
  std::string lottery, assessment, criterion;
  bool diagnostics = false;
};

int cmd_evaluate(const EvaluateArgs& a, Format f, std::ostream& out) {
  io::FrameRegistry reg;
  auto L = io::lottery_from_json(load_file(a.lottery), reg);
  auto A = io::assessment_from_json(load_file(a.assessment), reg, &L.outcomes);
  const Evaluation e = evaluate(L, A);

  std::vector<std::vector<std::string>> rows{{"criterion", "value"}};
  auto interval = [](double lo, double hi) { return "[" + num(lo) + ", " + num(hi) + "]"; };
  auto add = [&](Criterion c, const std::string& v) {
    if (a.criterion.empty() || criterion_arg(a.criterion) == c) rows.push_back({std::string(to_string(c)), v});
  };
  if (a.criterion.empty()) {
    rows.push_back({"reference", "(" + num(e.reference.u) + ", " + num(e.reference.v) + ", " + num(e.reference.w) + ")"});
  }
  add(Criterion::interval, interval(e.interval.lo, e.interval.hi));
  add(Criterion::jaffray, e.jaffray ? num(*e.jaffray) : "n/a");
  add(Criterion::pignistic, num(e.pignistic));
  add(Criterion::choquet_lower, num(e.choquet_lower));
  add(Criterion::choquet_upper, num(e.choquet_upper));
  if (!a.criterion.empty()) {
    const Criterion c = criterion_arg(a.criterion);
    if (c == Criterion::strict_interval) rows.push_back({"strict", interval(e.interval.lo, e.interval.hi)});
    if (c == Criterion::dominance) rows.push_back({"dominance", interval(e.choquet_lower, e.choquet_upper)});
  }

  json diag;
  if (a.diagnostics) {
    const auto oracle = reduce_to_reference_oracle(L, A);
    const double diff = std::max({std::fabs(oracle.u - e.reference.u), std::fabs(oracle.v - e.reference.v),
                                  std::fabs(oracle.w - e.reference.w)});
    diag = json{{"closed_form", io::to_json(e.reference)}, {"oracle", io::to_json(oracle)}, {"max_abs_diff", diff}};
    rows.push_back({"oracle", "(" + num(oracle.u) + ", " + num(oracle.v) + ", " + num(oracle.w) + ")"});
    rows.push_back({"oracle max |diff|", num(diff)});
  }

  if (f == Format::json) {
    json result = io::to_json(e);
    if (!a.criterion.empty()) {
      const Criterion c = criterion_arg(a.criterion);
      json value;
      switch (c) {
        case Criterion::interval:
        case Criterion::strict_interval:
          value = result["interval"];
          break;
        case Criterion::jaffray:
          value = result["jaffray"];
          break;
        case Criterion::pignistic:
          value = e.pignistic;
          break;
        case Criterion::choquet_lower:
          value = e.choquet_lower;
          break;
        case Criterion::choquet_upper:
          value = e.choquet_upper;
          break;
        case Criterion::dominance:
          value = json{{"lo", e.choquet_lower}, {"hi", e.choquet_upper}};
          break;
      }
      result = json{{"criterion", std::string(to_string(c))}, {"value", value}};
    }
    json env = envelope("evaluate", result);
    if (a.diagnostics) env["diagnostics"] = diag;
    out << io::dump(env) << "\n";
  } else {
    print_rows(out, f, rows);
  }
  return 0;
}

struct CompareArgs {
  std::string assessment, left, right;
  std::vector<std::string> criteria;
};

int cmd_compare(const CompareArgs& a, Format f, std::ostream& out) {
  io::FrameRegistry reg;
  auto L = io::lottery_from_json(load_file(a.left), reg);
  auto R = io::lottery_from_json(load_file(a.right), reg);
  auto A = io::assessment_from_json(load_file(a.assessment), reg, &L.outcomes);
  std::vector<Criterion> only;
  for (const auto& c : a.criteria) only.push_back(criterion_arg(c));
  const Comparison c = compare_all(L, R, A, only);
  if (f == Format::json) {
    out << io::dump(envelope("compare", io::to_json(c))) << "\n";
    return 0;
  }
  std::vector<std::vector<std::string>> rows{{"criterion", "verdict"}};
  for (const auto& v : c.verdicts) {
    rows.push_back({std::string(to_string(v.criterion)), v.verdict ? std::string(to_string(*v.verdict)) : "n/a"});
  }
  print_rows(out, f, rows);
  return 0;
}

int cmd_reduce(const std::string& path, Format f, std::ostream& out) {
  io::FrameRegistry reg;
  const auto L = reduce_compound(io::compound_from_json(load_file(path), reg));
  if (f == Format::json) {
    out << io::dump(envelope("reduce", io::to_json(L))) << "\n";
    return 0;
  }
  std::vector<std::vector<std::string>> rows{{"set", "mass"}};
  for (std::size_t i = 0; i < L.m.size(); ++i) rows.push_back({set_text(L.m.focal_set(i)), num(L.m.mass(i))});
  print_rows(out, f, rows);
  if (f == Format::table) out << "\n" << io::dump(io::to_json(L)) << "\n";
  return 0;
}

// --- elicit -------------------------------------------------------------------

struct ElicitArgs {
  std::string config;
  std::vector<std::string> targets;
  double epsilon = 0.0;
  std::string transcript = "bf-elicit.jsonl";
  std::string out;
};

std::optional<DmResponse> read_answer(const std::string& line) {
  std::string s;
  for (char c : line) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(c));
  }
  if (s == "t" || s == "target") return DmResponse::target_preferred;
  if (s == "p" || s == "probe") return DmResponse::probe_preferred;
  if (s == "i" || s == "c" || s == "incomparable") return DmResponse::incomparable;
  return parse_response(s);
}

int cmd_elicit(const ElicitArgs& a, Format f, std::istream& in, std::ostream& out, std::ostream& err) {
  json cfg;
  if (!a.config.empty()) {
    cfg = load_file(a.config);
  } else {
    cfg = io::to_json(ElicitationConfig{OutcomeOrder::natural(Frame::create("O", {"$100", "$0"})), {1.0, 0.0}, {}, kDefaultEpsilon});
  }
  if (!a.targets.empty()) {
    cfg["targets"] = json::array();
    for (const auto& t : a.targets) cfg["targets"].push_back(target_arg(t));
  }
  if (!cfg.contains("targets") || cfg["targets"].empty()) {
    cfg["targets"] = json::array({cfg["outcomes"]["frame"]["labels"]});
  }
  if (a.epsilon > 0.0) cfg["epsilon"] = a.epsilon;
  io::FrameRegistry reg;
  auto config = io::elicitation_config_from_json(cfg, reg);

  std::vector<TranscriptEntry> entries;
  for (const auto& line : read_jsonl(a.transcript)) entries.push_back(io::transcript_entry_from_json(line));
  auto session = ElicitationSession::replay(config, entries);
  if (!entries.empty()) err << "resumed " << entries.size() << " responses from " << a.transcript << "\n";

  while (auto q = session.next_query()) {
    out << "[" << session.sequence() << "] " << set_text(q->target) << "  vs  [O2, (" << num(q->probe_u) << ", "
        << num(1.0 - q->probe_u) << ")]\n"
        << "    t = prefer the set, p = prefer the probe, i = cannot compare, q = quit > " << std::flush;
    std::string line;
    if (!std::getline(in, line)) {
      out << "\n";
      err << "input closed; " << session.sequence() << " responses saved to " << a.transcript << "\n";
      return 0;
    }
    if (line == "q" || line == "quit") {
      err << session.sequence() << " responses saved to " << a.transcript << "\n";
      return 0;
    }
    auto r = read_answer(line);
    if (!r) {
      out << "    please answer t, p or i\n";
      continue;
    }
    try {
      session.record_response(*q, *r, utc_timestamp());
    } catch (const InconsistentResponse& e) {
      out << "    " << e.what() << "\n";
      continue;
    }
    const std::size_t seq = session.sequence() - 1;
    append_line_durable(a.transcript, io::to_json(session.transcript().back(), session, seq).dump());
  }

  const auto A = session.assessment();
  if (!a.out.empty()) write_file_atomic(a.out, io::dump(io::to_json(A)) + "\n");
  if (f == Format::json) {
    json estimates = json::array();
    for (const auto& e : session.estimates()) estimates.push_back(io::to_json(e));
    out << io::dump(envelope("elicit", json{{"estimates", estimates}, {"assessment", io::to_json(A)}})) << "\n";
    return 0;
  }
  std::vector<std::vector<std::string>> rows{{"set", "u_a", "v_a", "w_a", "alpha", "beta", "queries"}};
  for (const auto& e : session.estimates()) {
    rows.push_back({set_text(e.target), num(e.u_a), num(1.0 - e.upper), num(e.upper - e.u_a),
                    e.alpha ? num(*e.alpha) : "n/a", e.beta ? num(*e.beta) : "n/a", std::to_string(e.queries)});
  }
  print_rows(out, f, rows);
  return 0;
}

// --- serve / examples ---------------------------------------------------------

int cmd_serve(std::string store, const std::string& bind) {
  if (store.empty()) {
    const char* env = std::getenv("BF_STORE");
    store = env && *env ? env : "bf-store";
  }
  ServeOptions opt;
  opt.store = store;
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::malformed, "--bind expects HOST:PORT");
  opt.host = bind.substr(0, colon);
  try {
    opt.port = std::stoi(bind.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::malformed, "--bind expects HOST:PORT");
  }
  return serve(opt);
}

int cmd_examples_list(Format f, std::ostream& out) {
  if (f == Format::json) {
    json list = json::array();
    for (const auto& b : examples::bundles()) list.push_back(json{{"name", b.name}, {"description", b.description}});
    out << io::dump(envelope("examples list", list)) << "\n";
    return 0;
  }
  std::vector<std::vector<std::string>> rows{{"bundle", "description"}};
  for (const auto& b : examples::bundles()) rows.push_back({b.name, b.description});
  print_rows(out, f, rows);
  return 0;
}

int cmd_examples_run(const std::string& name, int n, const std::string& csv, Format f, std::ostream& out) {
  if (n < 2) throw validation_error("one_red_ball.n", "--n must be at least 2");
  const auto run = examples::run_bundle(name, n);
  std::vector<std::vector<std::string>> rows{{"check", "expected", "actual", "result"}};
  for (const auto& c : run.checks) rows.push_back({c.name, c.expected, c.actual, c.pass ? "PASS" : "FAIL"});
  if (f == Format::json) {
    out << io::dump(envelope("examples run", examples::to_json(run))) << "\n";
  } else {
    print_rows(out, f, rows);
    if (f == Format::table) out << (run.ok() ? "all checks passed" : "some checks FAILED") << "\n";
  }
  if (!csv.empty()) {
    std::ostringstream ss;
    print_rows(ss, Format::csv, rows);
    write_file_atomic(csv, ss.str());
  }
  return run.ok() ? 0 : 1;
}

int cmd_examples_export(const std::string& dir, const std::string& name, Format f, std::ostream& out) {
  std::vector<std::string> names;
  if (name.empty()) {
    for (const auto& b : examples::bundles()) names.push_back(b.name);
  } else {
    names.push_back(name);
  }
  json written = json::array();
  for (const auto& n : names) {
    for (const auto& p : examples::export_bundle(n, dir)) written.push_back(p.string());
  }
  if (f == Format::json) {
    out << io::dump(envelope("examples export", written)) << "\n";
  } else {
    for (const auto& p : written) out << p.get<std::string>() << "\n";
  }
  return 0;
}

int exit_code(ErrorCode c) { return c == ErrorCode::io ? 3 : 2; }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Belief-function lotteries: evaluate, compare, reduce, elicit, serve", "bf"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "table";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "json", "csv"}));

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Every criterion value of a lottery under an assessment");
  evaluate_cmd->add_option("lottery", ev.lottery, "Lottery JSON")->required();
  evaluate_cmd->add_option("assessment", ev.assessment, "Assessment JSON")->required();
  evaluate_cmd->add_option("--criterion", ev.criterion, "Print only this criterion");
  evaluate_cmd->add_flag("--diagnostics", ev.diagnostics, "Cross-check against the full D-S reduction");

  CompareArgs cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Verdicts between two lotteries");
  compare_cmd->add_option("assessment", cmp.assessment, "Assessment JSON")->required();
  compare_cmd->add_option("left", cmp.left, "Lottery JSON")->required();
  compare_cmd->add_option("right", cmp.right, "Lottery JSON")->required();
  compare_cmd->add_option("--criterion", cmp.criteria, "Criteria to report (repeatable)");

  std::string compound;
  auto* reduce_cmd = app.add_subcommand("reduce", "Reduce a compound lottery to a simple one");
  reduce_cmd->add_option("compound", compound, "Compound lottery JSON")->required();

  ElicitArgs el;
  auto* elicit_cmd = app.add_subcommand("elicit", "Interactive elicitation of (u_a, v_a)");
  elicit_cmd->add_option("--config", el.config, "Session JSON: outcomes, singleton_utilities, targets, epsilon");
  elicit_cmd->add_option("--target", el.targets, "Target set, e.g. \"{$100,$0}\" (repeatable)");
  elicit_cmd->add_option("--epsilon", el.epsilon, "Bracket width to stop at (default 0.01)");
  elicit_cmd->add_option("--transcript", el.transcript, "JSON-lines transcript; resumed if present");
  elicit_cmd->add_option("--out", el.out, "Write the recovered assessment here");

  std::string store, bind = "127.0.0.1:8080";
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP/JSON service");
  serve_cmd->add_option("--store", store, "Store directory (default $BF_STORE, else ./bf-store)");
  serve_cmd->add_option("--bind", bind, "HOST:PORT");

  auto* examples_cmd = app.add_subcommand("examples", "The bundled example corpus");
  examples_cmd->require_subcommand(1);
  auto* ex_list = examples_cmd->add_subcommand("list", "List bundles");
  std::string ex_name, csv;
  int n = 5;
  auto* ex_run = examples_cmd->add_subcommand("run", "Run a bundle and check its expected outputs");
  ex_run->add_option("name", ex_name, "Bundle name")->required();
  ex_run->add_option("--n", n, "Number of balls for one-red-ball");
  ex_run->add_option("--csv", csv, "Also write the results as CSV");
  std::string ex_dir, ex_only;
  auto* ex_export = examples_cmd->add_subcommand("export", "Write bundles as JSON files");
  ex_export->add_option("dir", ex_dir, "Target directory")->required();
  ex_export->add_option("--bundle", ex_only, "Only this bundle");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << json{{"code", "usage_error"}, {"message", e.what()}, {"details", json::object()}}.dump() << "\n";
    return 2;
  }

  const Format f = format == "json" ? Format::json : format == "csv" ? Format::csv : Format::table;
  try {
    if (*evaluate_cmd) return cmd_evaluate(ev, f, out);
    if (*compare_cmd) return cmd_compare(cmp, f, out);
    if (*reduce_cmd) return cmd_reduce(compound, f, out);
    if (*elicit_cmd) return cmd_elicit(el, f, in, out, err);
    if (*serve_cmd) return cmd_serve(store, bind);
    if (*ex_list) return cmd_examples_list(f, out);
    if (*ex_run) return cmd_examples_run(ex_name, n, csv, f, out);
    if (*ex_export) return cmd_examples_export(ex_dir, ex_only, f, out);
  } catch (const Error& e) {
    err << io::error_body(e).dump() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << io::error_body(e).dump() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace bf
