#include "dsgda/config.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <set>
#include <sstream>

#include "dsgda/report_io.hpp"

namespace dsgda {

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

IniDocument::IniDocument(std::string source,
                         std::map<std::string, std::map<std::string, IniValue>> sections,
                         std::map<std::string, int> section_lines)
    : source_(std::move(source)),
      sections_(std::move(sections)),
      section_lines_(std::move(section_lines)) {}

bool IniDocument::has_section(const std::string& section) const {
  return sections_.count(section) > 0;
}

bool IniDocument::has(const std::string& section, const std::string& key) const {
  return get(section, key) != nullptr;
}

const IniValue* IniDocument::get(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

int IniDocument::section_line(const std::string& section) const {
  auto it = section_lines_.find(section);
  return it == section_lines_.end() ? 0 : it->second;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
  const auto p = s.find_first_of("#;");
  return p == std::string::npos ? s : s.substr(0, p);
}

}  // namespace

IniDocument parse_ini(const std::string& text, const std::string& source) {
  std::map<std::string, std::map<std::string, IniValue>> sections;
  std::map<std::string, int> section_lines;
  std::istringstream in(text);
  std::string raw;
  std::string current;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(source, line, "unterminated section header");
      current = trim(s.substr(1, s.size() - 2));
      if (current.empty()) throw ConfigError(source, line, "empty section name");
      if (section_lines.count(current)) {
        throw ConfigError(source, line, "section [" + current + "] appears twice");
      }
      section_lines[current] = line;
      sections[current];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "expected 'key = value'");
    if (current.empty()) throw ConfigError(source, line, "key outside of any section");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(source, line, "missing key before '='");
    if (sections[current].count(key)) {
      throw ConfigError(source, line, "key '" + key + "' repeated in [" + current + "]");
    }
    sections[current][key] = {value, line};
  }
  return IniDocument(source, std::move(sections), std::move(section_lines));
}

namespace {

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"problem",
     {"kind", "dim", "mu", "coupling", "matrix", "class_prior", "separation", "l2", "amplitude",
      "radius_x", "radius_y"}},
    {"topology", {"kind", "m", "weighting", "matrix_file"}},
    {"data", {"n", "sigma", "clip", "heterogeneity"}},
    {"run",
     {"T", "K", "schedule", "eta", "alpha", "beta", "project", "output", "repeats", "seed_base",
      "seeds", "identical_datasets", "weak_stability", "probes", "risks", "mc_samples"}},
    {"sweep", {"axis", "values"}},
    {"outputs", {"directory", "formats"}},
};

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const IniDocument& doc) : doc_(doc) {}

  [[noreturn]] void fail(const IniValue& v, const std::string& msg) const {
    throw ConfigError(doc_.source(), v.line, msg);
  }

  const IniValue* get(const std::string& sec, const std::string& key) const {
    return doc_.get(sec, key);
  }

  const IniValue& require(const std::string& sec, const std::string& key) const {
    if (const IniValue* v = doc_.get(sec, key)) return *v;
    throw ConfigError(doc_.source(), doc_.section_line(sec),
                      "missing key '" + key + "' in [" + sec + "]");
  }

  double real(const IniValue& v, const std::string& key) const {
    std::size_t pos = 0;
    double out = 0;
    try {
      out = std::stod(v.text, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != v.text.size()) fail(v, key + ": '" + v.text + "' is not a number");
    return out;
  }

  long long integer(const IniValue& v, const std::string& key) const {
    std::size_t pos = 0;
    long long out = 0;
    try {
      out = std::stoll(v.text, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != v.text.size()) fail(v, key + ": '" + v.text + "' is not an integer");
    return out;
  }

  bool boolean(const IniValue& v, const std::string& key) const {
    std::string t = v.text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
    if (t == "false" || t == "no" || t == "0" || t == "off") return false;
    fail(v, key + ": '" + v.text + "' is not a boolean");
  }

  void real_opt(const std::string& sec, const std::string& key, double& target) const {
    if (const IniValue* v = get(sec, key)) target = real(*v, key);
  }
  void int_opt(const std::string& sec, const std::string& key, int& target) const {
    if (const IniValue* v = get(sec, key)) target = static_cast<int>(integer(*v, key));
  }
  void bool_opt(const std::string& sec, const std::string& key, bool& target) const {
    if (const IniValue* v = get(sec, key)) target = boolean(*v, key);
  }

  // Runs `fn`, re-raising plain argument errors at the value's line.
  template <typename T, typename Fn>
  T anchored(const IniValue& v, Fn&& fn) const {
    try {
      return fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail(v, e.what());
    }
  }

 private:
  const IniDocument& doc_;
};

Eigen::MatrixXd parse_inline_matrix(const Reader& rd, const IniValue& v) {
  const auto rows = split_list(v.text, '|');
  if (rows.empty()) rd.fail(v, "matrix: no rows");
  std::vector<std::vector<double>> vals;
  for (const auto& r : rows) {
    std::istringstream in(r);
    std::vector<double> row;
    std::string tok;
    while (in >> tok) row.push_back(rd.real(IniValue{tok, v.line}, "matrix"));
    if (!vals.empty() && row.size() != vals.front().size()) rd.fail(v, "matrix: ragged rows");
    if (row.empty()) rd.fail(v, "matrix: empty row");
    vals.push_back(std::move(row));
  }
  Eigen::MatrixXd A(vals.size(), vals.front().size());
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (std::size_t j = 0; j < vals[i].size(); ++j) A(i, j) = vals[i][j];
  return A;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  const IniDocument doc = parse_ini(text, source);
  const Reader rd(doc);
  for (const auto& [sec, keys] : doc.sections()) {
    auto known = kKnownKeys.find(sec);
    if (known == kKnownKeys.end()) {
      throw ConfigError(source, doc.section_line(sec), "unknown section [" + sec + "]");
    }
    for (const auto& [key, v] : keys) {
      if (!known->second.count(key)) {
        rd.fail(v, "unknown key '" + key + "' in [" + sec + "]");
      }
    }
  }
  for (const char* required : {"problem", "topology", "data", "run"}) {
    if (!doc.has_section(required)) {
      throw ConfigError(source, 0, std::string("missing section [") + required + "]");
    }
  }

  ExperimentConfig cfg;
  cfg.source = source;
  ExperimentSetup& s = cfg.setup;

  // problem
  {
    const IniValue& kind = rd.require("problem", "kind");
    s.problem.kind = rd.anchored<ProblemKind>(kind, [&] { return parse_problem_kind(kind.text); });
    rd.int_opt("problem", "dim", s.problem.dim);
    rd.real_opt("problem", "mu", s.problem.mu);
    rd.real_opt("problem", "coupling", s.problem.coupling);
    rd.real_opt("problem", "class_prior", s.problem.class_prior);
    rd.real_opt("problem", "separation", s.problem.separation);
    rd.real_opt("problem", "l2", s.problem.l2);
    rd.real_opt("problem", "amplitude", s.problem.amplitude);
    if (const IniValue* v = rd.get("problem", "radius_x")) s.problem.radius_x = rd.real(*v, "radius_x");
    if (const IniValue* v = rd.get("problem", "radius_y")) s.problem.radius_y = rd.real(*v, "radius_y");
    if (const IniValue* v = rd.get("problem", "matrix")) s.problem.matrix = parse_inline_matrix(rd, *v);
  }

  // data
  {
    s.n = static_cast<int>(rd.integer(rd.require("data", "n"), "n"));
    rd.real_opt("data", "sigma", s.problem.data.sigma);
    rd.real_opt("data", "clip", s.problem.data.clip);
    rd.real_opt("data", "heterogeneity", s.problem.data.heterogeneity);
  }

  // topology
  {
    const IniValue& kind = rd.require("topology", "kind");
    s.topology = rd.anchored<TopologyKind>(kind, [&] { return parse_topology_kind(kind.text); });
    if (const IniValue* w = rd.get("topology", "weighting")) {
      s.weighting = rd.anchored<Weighting>(*w, [&] { return parse_weighting(w->text); });
    }
    if (s.topology == TopologyKind::kCustom) {
      const IniValue& file = rd.require("topology", "matrix_file");
      std::filesystem::path p(file.text);
      if (p.is_relative()) p = std::filesystem::path(source).parent_path() / p;
      s.custom_matrix = rd.anchored<Eigen::MatrixXd>(file, [&] { return read_matrix(p.string()); });
      s.m = static_cast<int>(s.custom_matrix->rows());
      if (const IniValue* m = rd.get("topology", "m")) {
        if (rd.integer(*m, "m") != s.m) rd.fail(*m, "m disagrees with the matrix file");
      }
    } else {
      s.m = static_cast<int>(rd.integer(rd.require("topology", "m"), "m"));
    }
  }

  // run
  {
    s.T = static_cast<int>(rd.integer(rd.require("run", "T"), "T"));
    s.K = static_cast<int>(rd.integer(rd.require("run", "K"), "K"));
    std::string kind = "fixed";
    if (const IniValue* v = rd.get("run", "schedule")) {
      kind = v->text;
      if (kind != "fixed" && kind != "decaying") {
        rd.fail(*v, "schedule must be 'fixed' or 'decaying', got '" + kind + "'");
      }
    }
    const double eta = rd.real(rd.require("run", "eta"), "eta");
    if (kind == "fixed") {
      s.schedule = Schedule::fixed(eta);
    } else {
      double alpha = 1.0, beta = 1.0;
      rd.real_opt("run", "alpha", alpha);
      rd.real_opt("run", "beta", beta);
      s.schedule = Schedule::decaying(eta, alpha, beta);
    }
    rd.bool_opt("run", "project", s.project);
    if (const IniValue* v = rd.get("run", "output")) {
      s.output = rd.anchored<OutputKind>(*v, [&] { return parse_output_kind(v->text); });
    }
    rd.int_opt("run", "repeats", s.repeats);
    if (const IniValue* v = rd.get("run", "seed_base")) {
      s.seed_base = static_cast<std::uint64_t>(rd.integer(*v, "seed_base"));
    }
    if (const IniValue* v = rd.get("run", "seeds")) {
      for (const auto& tok : split_list(v->text, ',')) {
        s.seeds.push_back(static_cast<std::uint64_t>(rd.integer(IniValue{tok, v->line}, "seeds")));
      }
      if (s.seeds.empty()) rd.fail(*v, "seeds: empty list");
    }
    rd.bool_opt("run", "identical_datasets", s.identical_datasets);
    rd.bool_opt("run", "weak_stability", s.weak_stability);
    rd.int_opt("run", "probes", s.fresh_probes);
    rd.bool_opt("run", "risks", s.risks);
    rd.int_opt("run", "mc_samples", s.population.mc_samples);

    auto positive = [&](const char* key, long long v) {
      if (v < 1) rd.fail(rd.require("run", key), std::string(key) + " must be >= 1");
    };
    positive("T", s.T);
    positive("K", s.K);
    if (const IniValue* v = rd.get("run", "repeats")) {
      if (s.repeats < 1) rd.fail(*v, "repeats must be >= 1");
    }
  }

  if (s.n < 1) rd.fail(rd.require("data", "n"), "n must be >= 1");
  if (s.m < 1 && s.topology != TopologyKind::kCustom) {
    rd.fail(rd.require("topology", "m"), "m must be >= 1");
  }

  // Building the problem once surfaces parameter errors at config time.
  {
    const IniValue& kind = rd.require("problem", "kind");
    rd.anchored<int>(kind, [&] {
      make_problem(s.problem);
      return 0;
    });
  }

  // sweep
  if (doc.has_section("sweep")) {
    const IniValue& axis = rd.require("sweep", "axis");
    cfg.axis.kind = rd.anchored<SweepAxisKind>(axis, [&] { return parse_axis(axis.text); });
    if (cfg.axis.kind != SweepAxisKind::kNone) {
      const IniValue& values = rd.require("sweep", "values");
      cfg.axis.values = split_list(values.text, ',');
      if (cfg.axis.values.empty()) rd.fail(values, "values: empty list");
      for (const auto& v : cfg.axis.values) {
        rd.anchored<int>(values, [&] {
          apply_axis(s, cfg.axis.kind, v);
          return 0;
        });
      }
    }
  }

  // outputs
  if (const IniValue* v = rd.get("outputs", "directory")) cfg.out_dir = v->text;
  if (const IniValue* v = rd.get("outputs", "formats")) {
    cfg.formats = split_list(v->text, ',');
    for (const auto& f : cfg.formats) {
      if (f != "csv" && f != "json" && f != "svg") rd.fail(*v, "unknown output format '" + f + "'");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(read_file(path), path);
}

}  // namespace dsgda
