#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "railcal/error.hpp"
#include "railcal/harness.hpp"

namespace railcal::harness {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::vector<std::string> names_of(const ResultBundle& b) {
  if (!b.param_names.empty()) return b.param_names;
  std::size_t dim = b.start.size();
  std::vector<std::string> n;
  for (std::size_t i = 0; i < dim; ++i) n.push_back("x" + std::to_string(i + 1));
  return n;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& file, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(file, line, "expected a number, found '" + s + "'");
  }
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

}  // namespace

std::vector<CurvePoint> convergence_curve(const ResultBundle& b, optim::Algorithm a) {
  std::vector<const std::vector<optim::Evaluation>*> runs;
  std::size_t len = 0;
  for (const auto& c : b.cells) {
    if (c.cell.algorithm != a || c.result.trace.evaluations.empty()) continue;
    runs.push_back(&c.result.trace.evaluations);
    len = std::max(len, c.result.trace.evaluations.size());
  }
  std::vector<CurvePoint> curve;
  for (std::size_t k = 0; k < len; ++k) {
    CurvePoint p;
    p.eval_index = k + 1;
    p.runs = runs.size();
    double sum = 0.0, sq = 0.0;
    for (auto* r : runs) sum += (*r)[std::min(k, r->size() - 1)].best_so_far;
    p.mean = sum / static_cast<double>(runs.size());
    for (auto* r : runs) {
      const double d = (*r)[std::min(k, r->size() - 1)].best_so_far - p.mean;
      sq += d * d;
    }
    p.sd = runs.size() > 1 ? std::sqrt(sq / static_cast<double>(runs.size() - 1)) : 0.0;
    curve.push_back(p);
  }
  return curve;
}

std::optional<std::size_t> best_cell(const ResultBundle& b, optim::Algorithm a) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < b.cells.size(); ++i) {
    const auto& c = b.cells[i];
    if (c.cell.algorithm != a || c.result.trace.evaluations.empty()) continue;
    if (!best || c.result.best_value < b.cells[*best].result.best_value) best = i;
  }
  return best;
}

void write_traces(std::ostream& out, const ResultBundle& b) {
  out << "algorithm,replication,seed,deterministic,eval_index";
  for (const auto& n : names_of(b)) out << ',' << n;
  out << ",Z,best_so_far\n";
  for (const auto& c : b.cells) {
    for (const auto& e : c.result.trace.evaluations) {
      out << optim::algorithm_name(c.cell.algorithm) << ',' << c.cell.replication << ',' << c.cell.seed << ','
          << (c.cell.deterministic ? 1 : 0) << ',' << e.index;
      for (double v : e.theta) out << ',' << format_number(v);
      out << ',' << format_number(e.value) << ',' << format_number(e.best_so_far) << '\n';
    }
  }
}

void write_eval_log(std::ostream& out, const ResultBundle& b) {
  out << "algorithm,replication,seed,eval_index";
  for (const auto& n : names_of(b)) out << ',' << n;
  out << ",Z,wall_seconds\n";
  for (const auto& c : b.cells) {
    for (const auto& e : c.result.trace.evaluations) {
      out << optim::algorithm_name(c.cell.algorithm) << ',' << c.cell.replication << ',' << c.cell.seed << ','
          << e.index;
      for (double v : e.theta) out << ',' << format_number(v);
      out << ',' << format_number(e.value) << ',' << format_number(e.wall_seconds) << '\n';
    }
  }
}

void write_convergence(std::ostream& out, const ResultBundle& b) {
  out << "algorithm,eval_index,mean_best,sd_best,error_bar,runs,deterministic\n";
  for (auto a : b.config.algorithms) {
    for (const auto& p : convergence_curve(b, a)) {
      out << optim::algorithm_name(a) << ',' << p.eval_index << ',' << format_number(p.mean) << ','
          << format_number(p.sd) << ',' << format_number(p.sd / 4.0) << ',' << p.runs << ','
          << (optim::is_deterministic(a) ? 1 : 0) << '\n';
    }
  }
}

void write_estimates(std::ostream& out, const ResultBundle& b) {
  std::vector<std::pair<optim::Algorithm, std::size_t>> cols;
  for (auto a : b.config.algorithms) {
    if (auto i = best_cell(b, a)) cols.emplace_back(a, *i);
  }
  out << "parameter,true";
  for (const auto& [a, i] : cols) out << ',' << optim::algorithm_name(a);
  out << '\n';
  const auto names = names_of(b);
  for (std::size_t k = 0; k < names.size(); ++k) {
    out << names[k] << ',';
    if (b.theta_true) out << format_number((*b.theta_true)[k]);
    for (const auto& [a, i] : cols) out << ',' << format_number(b.cells[i].result.best[k]);
    out << '\n';
  }
  out << "Z,";
  if (b.true_value) out << format_number(*b.true_value);
  for (const auto& [a, i] : cols) out << ',' << format_number(b.cells[i].result.best_value);
  out << '\n';
}

void write_summary(std::ostream& out, const ResultBundle& b) {
  out << "algorithm,replication,seed,deterministic,evaluations,objective_calls,best_Z,ratio_to_start";
  for (const auto& n : names_of(b)) out << ',' << n;
  out << '\n';
  for (const auto& c : b.cells) {
    const double ratio = b.start_value > 0.0 ? c.result.best_value / b.start_value : 0.0;
    out << optim::algorithm_name(c.cell.algorithm) << ',' << c.cell.replication << ',' << c.cell.seed << ','
        << (c.cell.deterministic ? 1 : 0) << ',' << c.result.trace.evaluations.size() << ',' << c.objective_calls
        << ',' << format_number(c.result.best_value) << ',' << format_number(ratio);
    for (double v : c.result.best) out << ',' << format_number(v);
    out << '\n';
  }
}

std::vector<std::string> deterministic_outputs() {
  return {"traces.csv", "convergence.csv", "estimates.csv", "summary.csv"};
}

void write_report(const ResultBundle& b, const std::optional<synth::SyntheticDataset>& dataset) {
  const auto& dir = b.config.out;
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "run_config.txt");
    write_config(out, b.config);
  }
  json outputs = json::object();
  if (!b.cells.empty()) {
    auto emit = [&](const char* name, void (*fn)(std::ostream&, const ResultBundle&)) {
      {
        auto out = open_out(dir / name);
        fn(out, b);
      }
      outputs[name] = synth::file_digest(dir / name);
    };
    emit("traces.csv", write_traces);
    emit("convergence.csv", write_convergence);
    emit("estimates.csv", write_estimates);
    emit("summary.csv", write_summary);
    emit("eval_log.csv", write_eval_log);
  }

  json m;
  m["tool"] = "railcal";
  m["version"] = kVersion;
  json cfg = json::object();
  for (const auto& [k, v] : echo(b.config)) cfg[k] = v;
  m["config"] = cfg;
  m["scenario"] = b.scenario;
  m["param_names"] = names_of(b);
  m["theta_true"] = b.theta_true ? json(*b.theta_true) : json(nullptr);
  m["true_value"] = b.true_value ? json(*b.true_value) : json(nullptr);
  m["start"] = b.start;
  m["start_value"] = b.start_value;
  if (dataset) {
    m["dataset"] = {{"scenario", dataset->scenario.name},
                    {"seed", dataset->seed},
                    {"gamma_cf", dataset->gamma_cf},
                    {"demand_count", dataset->demand_count},
                    {"unserved", dataset->unserved},
                    {"afc_records", dataset->afc.size()}};
  }
  json cells = json::array();
  for (const auto& c : b.cells) {
    cells.push_back({{"algorithm", optim::algorithm_name(c.cell.algorithm)},
                     {"replication", c.cell.replication},
                     {"seed", c.cell.seed},
                     {"deterministic", c.cell.deterministic},
                     {"evaluations", c.result.trace.evaluations.size()},
                     {"objective_calls", c.objective_calls},
                     {"best_value", c.result.best_value}});
  }
  m["cells"] = cells;
  m["outputs"] = outputs;
  auto out = open_out(dir / "manifest.json");
  out << m.dump(2) << '\n';
}

std::vector<std::pair<std::string, std::string>> manifest_digests(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw ConfigError("no manifest.json in " + dir.string());
  std::vector<std::pair<std::string, std::string>> out;
  try {
    const json m = json::parse(in);
    for (const auto& [k, v] : m.at("outputs").items()) out.emplace_back(k, v.get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError((dir / "manifest.json").string() + ": " + e.what());
  }
  return out;
}

ResultBundle read_report(const std::filesystem::path& dir) {
  ResultBundle b;
  b.config = load_config(dir / "run_config.txt");
  b.config.out = dir;
  {
    const auto path = dir / "manifest.json";
    std::ifstream in(path);
    if (!in) throw ConfigError("no manifest.json in " + dir.string());
    try {
      const json m = json::parse(in);
      b.scenario = m.at("scenario").get<std::string>();
      b.param_names = m.at("param_names").get<std::vector<std::string>>();
      if (!m.at("theta_true").is_null()) b.theta_true = m["theta_true"].get<std::vector<double>>();
      if (!m.at("true_value").is_null()) b.true_value = m["true_value"].get<double>();
      b.start = m.at("start").get<std::vector<double>>();
      b.start_value = m.at("start_value").get<double>();
      for (const auto& c : m.at("cells")) {
        CellResult r;
        r.cell.algorithm = optim::parse_algorithm(c.at("algorithm").get<std::string>());
        r.cell.replication = c.at("replication").get<int>();
        r.cell.seed = c.at("seed").get<std::uint64_t>();
        r.cell.deterministic = c.at("deterministic").get<bool>();
        r.objective_calls = c.at("objective_calls").get<std::size_t>();
        r.result.trace.algorithm = r.cell.algorithm;
        r.result.trace.seed = r.cell.seed;
        b.cells.push_back(std::move(r));
      }
    } catch (const json::exception& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }
  if (b.cells.empty()) return b;

  const auto path = dir / "traces.csv";
  std::ifstream in(path);
  if (!in) throw ConfigError("no traces.csv in " + dir.string());
  const std::string file = path.string();
  std::string line;
  std::getline(in, line);
  const std::size_t dim = b.param_names.size();
  std::map<std::pair<std::string, int>, std::size_t> index;
  for (std::size_t i = 0; i < b.cells.size(); ++i) {
    index[{std::string(optim::algorithm_name(b.cells[i].cell.algorithm)), b.cells[i].cell.replication}] = i;
  }
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 5 + dim + 2) throw ParseError(file, n, "expected " + std::to_string(7 + dim) + " fields");
    const auto it = index.find({f[0], static_cast<int>(to_double(f[1], file, n))});
    if (it == index.end()) throw ParseError(file, n, "row for a cell missing from the manifest");
    optim::Evaluation e;
    e.index = static_cast<std::size_t>(to_double(f[4], file, n));
    for (std::size_t k = 0; k < dim; ++k) e.theta.push_back(to_double(f[5 + k], file, n));
    e.value = to_double(f[5 + dim], file, n);
    e.best_so_far = to_double(f[6 + dim], file, n);
    b.cells[it->second].result.trace.evaluations.push_back(std::move(e));
  }
  for (auto& c : b.cells) {
    const auto& ev = c.result.trace.evaluations;
    if (ev.empty()) continue;
    const auto best = std::min_element(ev.begin(), ev.end(),
                                       [](const auto& x, const auto& y) { return x.value < y.value; });
    c.result.best = best->theta;
    c.result.best_value = best->value;
  }
  return b;
}

}  // namespace railcal::harness
