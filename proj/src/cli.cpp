#include "mahler/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mahler/acceptance.hpp"
#include "mahler/classify.hpp"
#include "mahler/gallery.hpp"

namespace mahler::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct RunConfig {
  std::string command;
  std::string point;
  unsigned d = 0;  // 0: taken from the point
  unsigned k = 1;
  std::string Q = "2:64:x2";
  std::string method = "brute";
  std::string weights;
  std::string eps = "1/2";
  std::string H;  // vwa height range lo:hi; default 1:max(Q)
  std::uint64_t seed = 0;
  long p_start = 64;
  long p_max = 2048;
  std::string format = "jsonl";
  std::string out;
  std::string sample;  // gallery: lebesgue or cantor
  unsigned count = 1;
  unsigned resolution = 64;
  std::vector<int> only;

  json to_json() const {
    return json{{"command", command}, {"point", point},   {"d", d},           {"k", k},
                {"Q", Q},             {"method", method}, {"weights", weights}, {"eps", eps},
                {"H", H},             {"seed", seed},     {"p_start", p_start}, {"p_max", p_max},
                {"format", format},   {"out", out},       {"sample", sample},   {"count", count},
                {"resolution", resolution}, {"only", only}};
  }
};

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Sink {
 public:
  Sink(std::ostream& os, const RunConfig& c) : os_(os), command_(c.command), csv_(c.format == "csv") {
    hash_ = hex64(fnv1a(c.to_json().dump()));
  }

  bool csv() const { return csv_; }
  const std::string& hash() const { return hash_; }

  void emit(json payload) {
    ordered_json line;
    line["config_hash"] = hash_;
    line["command"] = command_;
    line["timestamp"] = utc_now();
    line["payload"] = std::move(payload);
    os_ << line.dump() << '\n';
  }

  void row(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) os_ << (i ? "," : "") << cols[i];
    os_ << '\n';
  }

  bool undecided = false;

 private:
  std::ostream& os_;
  std::string command_;
  std::string hash_;
  bool csv_;
};

std::string quoted(const std::string& s) { return '"' + s + '"'; }

json interval(const DyadicInterval& v) {
  return json::array({scientific(v.lo().to_rational(), false), scientific(v.hi().to_rational(), true)});
}

std::string lower_text(const Rational& v) { return to_decimal(v, 12); }

json estimate_json(const ExponentEstimate& e) {
  json j{{"kind", to_string(e.kind)},
         {"Q_max", to_string(e.Q_max)},
         {"witnesses", e.witnesses},
         {"witness_height", to_string(e.witness_height)},
         {"beyond_truncation", e.beyond_truncation}};
  j["lower_bound"] = e.value ? lower_text(*e.value) : "+inf";
  return j;
}

json poly_json(const IntPolynomial& P) {
  json q = json::array();
  for (const auto& c : P.q()) q.push_back(to_string(c));
  return json{{"a0", to_string(P.a0())}, {"q", q}, {"text", P.to_string()}};
}

std::vector<RealOracle> load_point(const RunConfig& c) {
  if (c.point.empty()) throw ConfigError("--point is required for " + c.command);
  const PointSpec spec = parse_point(c.point);
  if (c.d != 0 && c.d != dimension(spec))
    throw ConfigError("-d " + std::to_string(c.d) + " does not match the point dimension " +
                      std::to_string(dimension(spec)));
  return realize(spec);
}

SearchConfig search_config(const RunConfig& c) {
  SearchConfig s;
  if (c.p_start < 1 || c.p_max < c.p_start) throw ConfigError("need 1 <= p_start <= p_max");
  s.precision.p_start = c.p_start;
  s.precision.p_max = c.p_max;
  return s;
}

std::optional<WeightVector> parse_weights(const std::string& text) {
  if (text.empty()) return std::nullopt;
  WeightVector w;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) w.r.push_back(parse_rational(item));
  return w;
}

BigInt max_of(const std::vector<BigInt>& s) { return *std::max_element(s.begin(), s.end()); }

void require_jsonl(const RunConfig& c) {
  if (c.format == "csv") throw ConfigError("csv output is available for dirichlet and records only");
}

// ----------------------------------------------------------------- commands

void cmd_basis(const RunConfig& c, Sink& sink) {
  require_jsonl(c);
  if (c.d == 0) throw ConfigError("basis needs -d");
  auto b = basis(c.d, c.k);
  json monos = json::array();
  for (const auto& e : b->order()) monos.push_back(json{{"exponents", to_string(e)}, {"name", monomial_name(e)}});
  sink.emit(json{{"d", c.d}, {"k", c.k}, {"n", b->size()}, {"monomials", monos}});
}

void cmd_dirichlet(const RunConfig& c, Sink& sink) {
  auto x = load_point(c);
  auto y = FormTarget::from_point(x, basis(static_cast<unsigned>(x.size()), c.k));
  auto prof = dirichlet_profile(y, expand_schedule(c.Q), parse_weights(c.weights), parse_method(c.method),
                                search_config(c));
  if (sink.csv()) sink.row({"Q", "eps_lo", "eps_hi", "witness"});
  for (const auto& s : prof.samples) {
    if (sink.csv()) {
      sink.row({to_string(s.Q), scientific(s.eps.lo().to_rational(), false),
                scientific(s.eps.hi().to_rational(), true), quoted(s.witness.to_string())});
      continue;
    }
    json j{{"Q", to_string(s.Q)}, {"eps", interval(s.eps)}, {"witness", poly_json(s.witness)}};
    if (s.exact) j["exact"] = to_string(*s.exact);
    sink.emit(j);
  }
  if (!sink.csv()) {
    sink.emit(json{{"samples", prof.samples.size()},
                   {"tail_sup", interval(prof.tail_sup)},
                   {"singular_trend", prof.singular_trend}});
  }
}

void cmd_records(const RunConfig& c, Sink& sink) {
  auto x = load_point(c);
  auto y = FormTarget::from_point(x, basis(static_cast<unsigned>(x.size()), c.k));
  auto t = record_scan(y, max_of(expand_schedule(c.Q)), parse_method(c.method), search_config(c));
  if (sink.csv()) sink.row({"Htilde", "value_lo", "value_hi", "witness"});
  for (const auto& e : t.entries) {
    if (sink.csv()) {
      sink.row({to_string(e.heights.Htilde), scientific(e.value.lo().to_rational(), false),
                scientific(e.value.hi().to_rational(), true), quoted(e.P.to_string())});
      continue;
    }
    json j{{"H", to_string(e.heights.H)},
           {"Htilde", to_string(e.heights.Htilde)},
           {"value", interval(e.value)},
           {"exact_zero", e.exact_zero},
           {"undecided", e.undecided},
           {"witness", poly_json(e.P)}};
    if (e.ratio) j["ratio_lower"] = lower_text(*e.ratio);
    sink.emit(j);
  }
  if (!sink.csv()) {
    json summary{{"Q_max", to_string(t.Q_max)},
                 {"method", to_string(t.method)},
                 {"entries", t.entries.size()},
                 {"exact_zero", t.exact_zero},
                 {"undecided", t.undecided}};
    summary["c_min"] = t.c_min ? interval(*t.c_min) : json(nullptr);
    sink.emit(summary);
  }
  sink.undecided = sink.undecided || t.undecided;
}

void cmd_exponent(const RunConfig& c, Sink& sink) {
  require_jsonl(c);
  auto x = load_point(c);
  const auto cfg = search_config(c);
  for (const auto& Q : expand_schedule(c.Q)) {
    sink.emit(estimate_json(estimate_omega_k(x, c.k, Q, parse_method(c.method), cfg)));
  }
}

void cmd_classify(const RunConfig& c, Sink& sink) {
  require_jsonl(c);
  auto x = load_point(c);
  auto rep = class_heuristic(x, c.k, max_of(expand_schedule(c.Q)), parse_method(c.method), search_config(c));
  json per_k = json::array();
  for (std::size_t i = 0; i < rep.k.size(); ++i) {
    json j{{"k", rep.k[i]}, {"n", rep.n[i]}, {"omega", estimate_json(rep.omega[i])}};
    j["normalized_lower"] = rep.normalized[i] ? lower_text(*rep.normalized[i]) : "+inf";
    per_k.push_back(j);
  }
  sink.emit(json{{"label", to_string(rep.label)}, {"per_k", per_k}});
}

std::pair<BigInt, BigInt> height_range(const RunConfig& c) {
  if (c.H.empty()) return {BigInt(1), max_of(expand_schedule(c.Q))};
  const auto colon = c.H.find(':');
  if (colon == std::string::npos) throw ConfigError("--H expects lo:hi");
  return {parse_bigint(c.H.substr(0, colon)), parse_bigint(c.H.substr(colon + 1))};
}

void cmd_vwa(const RunConfig& c, Sink& sink) {
  require_jsonl(c);
  auto x = load_point(c);
  const auto [lo, hi] = height_range(c);
  auto rep = detect_k_vwa(x, c.k, parse_rational(c.eps), lo, hi, search_config(c));
  json wit = json::array(), zeros = json::array(), und = json::array();
  for (const auto& w : rep.witnesses) {
    wit.push_back(json{{"P", poly_json(w.P)}, {"H", to_string(w.heights.H)}, {"value", interval(w.value)}});
  }
  for (const auto& P : rep.exact_zeros) zeros.push_back(poly_json(P));
  for (const auto& P : rep.undecided) und.push_back(poly_json(P));
  sink.emit(json{{"eps", to_string(rep.eps)},
                 {"H_range", json::array({to_string(rep.H_lo), to_string(rep.H_hi)})},
                 {"count", rep.witnesses.size()},
                 {"witnesses", wit},
                 {"exact_zeros", zeros},
                 {"undecided", und}});
  sink.undecided = sink.undecided || !rep.undecided.empty();
}

void cmd_bad(const RunConfig& c, Sink& sink) {
  require_jsonl(c);
  auto x = load_point(c);
  const auto w = parse_weights(c.weights).value_or(WeightVector::uniform(x.size()));
  auto best = weighted_bad_statistic(x, w, max_of(expand_schedule(c.Q)), search_config(c));
  json ties = json::array();
  for (const auto& q : best.ties) ties.push_back(to_string(q));
  json weights = json::array();
  for (const auto& r : w.r) weights.push_back(to_string(r));
  sink.emit(json{{"weights", weights}, {"q", to_string(best.q)}, {"value", interval(best.value)}, {"ties", ties}});
  sink.undecided = sink.undecided || !best.ties.empty();
}

json transference_json(const TransferenceReport& t) {
  auto gap = [](const std::optional<Rational>& g, bool holds) {
    return g ? json(to_decimal(*g, 12)) : json(holds ? "+inf" : "-inf");
  };
  return json{{"gap_lower", gap(t.gap_lower, t.lower_holds)},
              {"gap_upper", gap(t.gap_upper, t.upper_holds)},
              {"lower_holds", t.lower_holds},
              {"upper_holds", t.upper_holds},
              {"verdict", to_string(t.verdict)}};
}

void cmd_simul(const RunConfig& c, Sink& sink) {
  require_jsonl(c);
  auto x = load_point(c);
  const BigInt Q = max_of(expand_schedule(c.Q));
  const auto cfg = search_config(c);
  auto sb = simultaneous_best(x, Q, cfg);
  auto lin = estimate_omega_k(x, 1, Q, parse_method(c.method), cfg);
  auto tr = transference_check(lin, sb.exponent, x.size());
  json ties = json::array();
  for (const auto& q : sb.ties) ties.push_back(to_string(q));
  sink.emit(json{{"q", to_string(sb.q)},
                 {"value", interval(sb.value)},
                 {"ties", ties},
                 {"records", sb.records},
                 {"lambda", estimate_json(sb.exponent)},
                 {"omega", estimate_json(lin)},
                 {"transference", transference_json(tr)}});
  sink.undecided = sink.undecided || !sb.ties.empty();
}

void cmd_gallery(const RunConfig& c, Sink& sink) {
  require_jsonl(c);
  std::vector<PointSpec> specs;
  if (!c.sample.empty()) {
    if (c.sample != "lebesgue" && c.sample != "cantor") throw ConfigError("--sample must be lebesgue or cantor");
    const auto kind = c.sample == "lebesgue" ? SampleKind::lebesgue : SampleKind::cantor;
    for (unsigned i = 0; i < c.count; ++i)
      specs.push_back(sample_point(kind, derive_seed(c.seed, i), c.d ? c.d : 1, c.resolution));
  } else {
    if (c.point.empty()) throw ConfigError("gallery needs --point or --sample");
    specs.push_back(parse_point(c.point));
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    json coords = json::array();
    for (const auto& o : realize(specs[i])) coords.push_back(interval(refine(o, c.p_start)));
    sink.emit(json{{"index", i}, {"point", to_json(specs[i])}, {"p", c.p_start}, {"enclosures", coords}});
  }
}

int cmd_selftest(const RunConfig& c, Sink& sink, std::ostream& err) {
  require_jsonl(c);
  std::vector<int> ids = c.only;
  if (ids.empty())
    for (int id = 1; id <= kCriterionCount; ++id) ids.push_back(id);
  AcceptanceOptions opt;
  if (c.seed != 0) opt.seed = c.seed;
  int failed = 0;
  for (int id : ids) {
    auto r = run_criterion(id, opt);
    err << format_result(r) << '\n';
    sink.emit(json{{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}});
    failed += r.pass ? 0 : 1;
  }
  return failed == 0 ? kOk : kFailed;
}

// key=value lines become leading arguments so that flags win
std::vector<std::string> config_file_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::vector<std::string> args;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(n) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config") throw ConfigError(path + ":" + std::to_string(n) + ": bad key");
    args.push_back((key == "d" || key == "k" ? "-" : "--") + key);
    args.push_back(value);
  }
  return args;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<BigInt> expand_schedule(std::string_view text) {
  std::vector<BigInt> out;
  const std::string s(text);
  if (s.find(':') == std::string::npos) {
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_bigint(item));
  } else {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() < 2 || parts.size() > 3) throw ConfigError("schedule must be a:b or a:b:xr");
    const BigInt a = parse_bigint(parts[0]), b = parse_bigint(parts[1]);
    if (a < 1 || b < a) throw ConfigError("schedule needs 1 <= a <= b");
    if (parts.size() == 2) {
      if (b - a > 1'000'000) throw ConfigError("schedule a:b has more than 10^6 entries");
      for (BigInt Q = a; Q <= b; ++Q) out.push_back(Q);
    } else {
      if (parts[2].empty() || parts[2][0] != 'x') throw ConfigError("geometric schedule must end in :x<ratio>");
      const BigInt r = parse_bigint(parts[2].substr(1));
      if (r < 2) throw ConfigError("geometric ratio must be at least 2");
      for (BigInt Q = a; Q <= b; Q *= r) out.push_back(Q);
    }
  }
  if (out.empty()) throw ConfigError("empty schedule");
  for (const auto& Q : out)
    if (Q < 1) throw ConfigError("schedule entries must be positive");
  return out;
}

std::string scientific(const Rational& v, bool up, int digits) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  const Rational a = abs(v);
  auto pow10 = [](long e) {
    return e >= 0 ? Rational(pow(BigInt(10), static_cast<unsigned long>(e)))
                  : make_rational(1, pow(BigInt(10), static_cast<unsigned long>(-e)));
  };
  long e = static_cast<long>((static_cast<double>(bit_length(a.get_num())) -
                              static_cast<double>(bit_length(a.get_den()))) * 0.30102999566398120);
  while (pow10(e) > a) --e;
  while (pow10(e + 1) <= a) ++e;
  const Rational scaled = a / pow10(e - digits + 1);
  BigInt m = up != neg ? ceil(scaled) : floor(scaled);
  if (m == pow(BigInt(10), static_cast<unsigned long>(digits))) {
    m /= 10;
    ++e;
  }
  std::string d = to_string(m);
  while (d.size() > 1 && d.back() == '0') d.pop_back();
  std::string s = neg ? "-" : "";
  s += d.substr(0, 1);
  if (d.size() > 1) s += "." + d.substr(1);
  if (e != 0) s += "e" + std::to_string(e);
  return s;
}

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Experiments on Diophantine approximation of points by integer polynomials."};
  app.name("mahler-lab");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "key=value file; flags take precedence");
  app.add_option("--point", c.point, "point spec, e.g. rational:1/2 or liouville:10,5");
  app.add_option("-d", c.d, "dimension");
  app.add_option("-k", c.k, "degree (classify: maximal degree)");
  app.add_option("--Q", c.Q, "schedule: list 2,4,8 or a:b or a:b:xr");
  app.add_option("--method", c.method, "brute or lattice");
  app.add_option("--weights", c.weights, "comma list of rational weights");
  app.add_option("--eps", c.eps, "VWA exponent excess");
  app.add_option("--H", c.H, "VWA height range lo:hi");
  app.add_option("--seed", c.seed, "sampling seed");
  app.add_option("--pstart", c.p_start, "initial working precision (bits)");
  app.add_option("--pmax", c.p_max, "maximal working precision (bits)");
  app.add_option("--out", c.out, "append output to this file");
  app.add_option("--format", c.format, "jsonl or csv")->check(CLI::IsMember({"jsonl", "csv"}));
  app.add_option("--sample", c.sample, "gallery: lebesgue or cantor");
  app.add_option("--count", c.count, "gallery: number of samples");
  app.add_option("--resolution", c.resolution, "gallery: bits (lebesgue) or ternary digits (cantor)");
  app.add_option("--only", c.only, "selftest: criterion ids")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->delimiter(',');

  const std::vector<std::pair<std::string, std::string>> commands{
      {"basis", "list the monomial basis"},
      {"dirichlet", "eps*(Q) over a schedule with the singular-trend verdict"},
      {"records", "successive minima and the badness constant"},
      {"exponent", "lower bound for omega_k at each Q"},
      {"classify", "heuristic class label from omega_1..omega_k"},
      {"vwa", "certified very-well-approximable witnesses in a height range"},
      {"bad", "weighted badly-approximable statistic"},
      {"simul", "simultaneous best approximation and transference check"},
      {"gallery", "construct or sample points"},
      {"selftest", "run the acceptance checks"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  int code = kOk;
  try {
    std::vector<std::string> args;
    for (std::size_t i = 0; i + 1 < args_in.size(); ++i) {
      if (args_in[i] == "--config") {
        args = config_file_args(args_in[i + 1]);
        break;
      }
    }
    args.insert(args.end(), args_in.begin(), args_in.end());
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      return app.exit(e, out, err) == 0 ? kOk : kBadConfig;
    }
    c.command = app.get_subcommands().front()->get_name();

    std::ofstream file;
    if (!c.out.empty()) {
      file.open(c.out, std::ios::app);
      if (!file) throw ConfigError("cannot open " + c.out);
    }
    std::ostream& data = c.out.empty() ? out : file;
    Sink sink(data, c);
    err << "config " << sink.hash() << '\n';

    if (c.command == "basis") cmd_basis(c, sink);
    else if (c.command == "dirichlet") cmd_dirichlet(c, sink);
    else if (c.command == "records") cmd_records(c, sink);
    else if (c.command == "exponent") cmd_exponent(c, sink);
    else if (c.command == "classify") cmd_classify(c, sink);
    else if (c.command == "vwa") cmd_vwa(c, sink);
    else if (c.command == "bad") cmd_bad(c, sink);
    else if (c.command == "simul") cmd_simul(c, sink);
    else if (c.command == "gallery") cmd_gallery(c, sink);
    else code = cmd_selftest(c, sink, err);
    data.flush();
    if (code == kOk && sink.undecided) {
      err << "mahler-lab: some comparisons stayed undecided at p_max\n";
      code = kUndecided;
    }
  } catch (const ConfigError& e) {
    err << "mahler-lab: invalid configuration: " << e.what() << '\n';
    return kBadConfig;
  } catch (const DomainError& e) {
    err << "mahler-lab: invalid input: " << e.what() << '\n';
    return kBadConfig;
  } catch (const ResourceCapError& e) {
    err << "mahler-lab: refused: " << e.what() << '\n';
    return kResourceCap;
  } catch (const OracleError& e) {
    err << "mahler-lab: undecided: " << e.what() << '\n';
    return kUndecided;
  } catch (const std::exception& e) {
    err << "mahler-lab: error: " << e.what() << '\n';
    return kFailed;
  }
  return code;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace mahler::cli
