#include <charconv>
#include <fstream>
#include <algorithm>
#include <sstream>
#include <type_traits>

#include "railcal/error.hpp"
#include "railcal/harness.hpp"

namespace railcal::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(std::string_view key, std::string_view value, const char* what) {
  throw ConfigError("setting '" + std::string(key) + "': cannot read '" + std::string(value) + "' as " + what);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T v{};
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || text.empty()) {
    bad(key, text, std::is_floating_point_v<T> ? "a number" : "an integer");
  }
  return v;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> v;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) v.push_back(parse_number<double>(key, tok));
  if (v.empty()) bad(key, text, "a list of numbers");
  return v;
}

template <class T>
std::string show(const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    return format_number(v);
  } else if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else if constexpr (std::is_same_v<T, std::filesystem::path>) {
    return v.string();
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : " ") + format_number(x);
    return s;
  } else if constexpr (std::is_same_v<T, std::vector<optim::Algorithm>>) {
    return join_algorithms(v);
  } else if constexpr (std::is_same_v<T, std::optional<std::uint64_t>>) {
    return v ? std::to_string(*v) : std::string();
  } else {
    return std::to_string(v);
  }
}

template <class T>
void assign(T& slot, std::string_view key, std::string_view text) {
  if constexpr (std::is_same_v<T, std::string> || std::is_same_v<T, std::filesystem::path>) {
    slot = T(std::string(trim(text)));
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    slot = parse_list(key, text);
  } else if constexpr (std::is_same_v<T, std::vector<optim::Algorithm>>) {
    slot = parse_algorithms(text);
  } else if constexpr (std::is_same_v<T, std::optional<std::uint64_t>>) {
    if (trim(text).empty()) {
      slot.reset();
    } else {
      slot = parse_number<std::uint64_t>(key, text);
    }
  } else {
    slot = parse_number<T>(key, text);
  }
}

struct Field {
  std::string key;
  std::function<std::string(RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

template <class Ref>
Field field(std::string key, Ref ref) {
  Field f;
  f.key = key;
  f.get = [ref](RunConfig& c) { return show(ref(c)); };
  f.set = [ref, key](RunConfig& c, std::string_view v) { assign(ref(c), key, v); };
  return f;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    t.push_back(field("scenario", [](RunConfig& c) -> auto& { return c.scenario; }));
    t.push_back(field("algorithms", [](RunConfig& c) -> auto& { return c.algorithms; }));
    t.push_back(field("budget", [](RunConfig& c) -> auto& { return c.budget; }));
    t.push_back(field("replications", [](RunConfig& c) -> auto& { return c.replications; }));
    t.push_back(field("seed", [](RunConfig& c) -> auto& { return c.seed; }));
    t.push_back(field("workers", [](RunConfig& c) -> auto& { return c.workers; }));
    t.push_back(field("out", [](RunConfig& c) -> auto& { return c.out; }));
    t.push_back(field("data", [](RunConfig& c) -> auto& { return c.data; }));
    t.push_back(field("dataset", [](RunConfig& c) -> auto& { return c.dataset; }));
    t.push_back(field("sim_seed", [](RunConfig& c) -> auto& { return c.sim_seed; }));
    t.push_back(field("eval_seed", [](RunConfig& c) -> auto& { return c.eval_seed; }));
    t.push_back(field("gamma_cf", [](RunConfig& c) -> auto& { return c.gamma_cf; }));
    t.push_back(field("w1", [](RunConfig& c) -> auto& { return c.metrics.weights.w1; }));
    t.push_back(field("w2", [](RunConfig& c) -> auto& { return c.metrics.weights.w2; }));
    t.push_back(field("threshold", [](RunConfig& c) -> auto& { return c.metrics.threshold; }));
    t.push_back(field("bin_width", [](RunConfig& c) -> auto& { return c.metrics.bin_width; }));
    t.push_back(field("smoothing", [](RunConfig& c) -> auto& { return c.metrics.smoothing; }));

    t.push_back(field("ga.population", [](RunConfig& c) -> auto& { return c.optimizer.ga.population; }));
    t.push_back(field("ga.crossover_prob", [](RunConfig& c) -> auto& { return c.optimizer.ga.crossover_prob; }));
    t.push_back(field("ga.mutation_prob", [](RunConfig& c) -> auto& { return c.optimizer.ga.mutation_prob; }));
    t.push_back(
        field("ga.gene_mutation_prob", [](RunConfig& c) -> auto& { return c.optimizer.ga.gene_mutation_prob; }));
    t.push_back(field("ga.blend_alpha", [](RunConfig& c) -> auto& { return c.optimizer.ga.blend_alpha; }));
    t.push_back(field("ga.mutation_sigma", [](RunConfig& c) -> auto& { return c.optimizer.ga.mutation_sigma; }));
    t.push_back(field("ga.tournament_size", [](RunConfig& c) -> auto& { return c.optimizer.ga.tournament_size; }));

    t.push_back(field("sa.visiting", [](RunConfig& c) -> auto& { return c.optimizer.sa.visiting; }));
    t.push_back(field("sa.acceptance", [](RunConfig& c) -> auto& { return c.optimizer.sa.acceptance; }));
    t.push_back(field("sa.initial_temp", [](RunConfig& c) -> auto& { return c.optimizer.sa.initial_temp; }));
    t.push_back(
        field("sa.restart_temp_ratio", [](RunConfig& c) -> auto& { return c.optimizer.sa.restart_temp_ratio; }));

    t.push_back(field("nmsa.initial_step", [](RunConfig& c) -> auto& { return c.optimizer.nmsa.initial_step; }));
    t.push_back(field("nmsa.reflection", [](RunConfig& c) -> auto& { return c.optimizer.nmsa.reflection; }));
    t.push_back(field("nmsa.expansion", [](RunConfig& c) -> auto& { return c.optimizer.nmsa.expansion; }));
    t.push_back(field("nmsa.contraction", [](RunConfig& c) -> auto& { return c.optimizer.nmsa.contraction; }));
    t.push_back(field("nmsa.shrink", [](RunConfig& c) -> auto& { return c.optimizer.nmsa.shrink; }));
    t.push_back(field("nmsa.penalty", [](RunConfig& c) -> auto& { return c.optimizer.nmsa.penalty; }));

    t.push_back(field("mads.initial_poll", [](RunConfig& c) -> auto& { return c.optimizer.mads.initial_poll; }));
    t.push_back(field("mads.max_poll", [](RunConfig& c) -> auto& { return c.optimizer.mads.max_poll; }));
    t.push_back(field("mads.min_poll", [](RunConfig& c) -> auto& { return c.optimizer.mads.min_poll; }));

    t.push_back(field("spsa.a", [](RunConfig& c) -> auto& { return c.optimizer.spsa.a; }));
    t.push_back(field("spsa.c", [](RunConfig& c) -> auto& { return c.optimizer.spsa.c; }));
    t.push_back(field("spsa.alpha", [](RunConfig& c) -> auto& { return c.optimizer.spsa.alpha; }));
    t.push_back(field("spsa.gamma", [](RunConfig& c) -> auto& { return c.optimizer.spsa.gamma; }));
    t.push_back(
        field("spsa.stability_fraction", [](RunConfig& c) -> auto& { return c.optimizer.spsa.stability_fraction; }));

    t.push_back(field("byo.initial_points", [](RunConfig& c) -> auto& { return c.optimizer.byo.initial_points; }));
    t.push_back(field("byo.refit_every", [](RunConfig& c) -> auto& { return c.optimizer.byo.refit_every; }));
    t.push_back(field("byo.jitter", [](RunConfig& c) -> auto& { return c.optimizer.byo.jitter; }));
    t.push_back(field("byo.starts", [](RunConfig& c) -> auto& { return c.optimizer.byo.starts; }));
    t.push_back(field("byo.xi", [](RunConfig& c) -> auto& { return c.optimizer.byo.xi; }));

    t.push_back(
        field("cors.initial_fraction", [](RunConfig& c) -> auto& { return c.optimizer.cors.initial_fraction; }));
    t.push_back(field("cors.distance_cycle", [](RunConfig& c) -> auto& { return c.optimizer.cors.distance_cycle; }));
    t.push_back(field("cors.candidates", [](RunConfig& c) -> auto& { return c.optimizer.cors.candidates; }));
    t.push_back(field("cors.starts", [](RunConfig& c) -> auto& { return c.optimizer.cors.starts; }));
    t.push_back(field("cors.min_distance", [](RunConfig& c) -> auto& { return c.optimizer.cors.min_distance; }));
    return t;
  }();
  return table;
}

}  // namespace

std::string join_algorithms(const std::vector<optim::Algorithm>& algorithms) {
  std::string s;
  for (auto a : algorithms) s += (s.empty() ? "" : ",") + std::string(optim::algorithm_name(a));
  return s;
}

std::vector<optim::Algorithm> parse_algorithms(std::string_view list) {
  std::vector<optim::Algorithm> out;
  if (trim(list) == "all") return {optim::kAllAlgorithms.begin(), optim::kAllAlgorithms.end()};
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto name = trim(list.substr(0, comma));
    if (!name.empty()) {
      const auto a = optim::parse_algorithm(name);
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    }
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ConfigError("empty algorithm list");
  return out;
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
  key = trim(key);
  for (const auto& f : fields()) {
    if (f.key == key) {
      f.set(config, value);
      return;
    }
  }
  throw ConfigError("unknown setting '" + std::string(key) + "'");
}

RunConfig parse_config(std::istream& in, const std::string& source, RunConfig base) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, n, "expected key = value");
    try {
      apply_setting(base, std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ParseError(source, n, e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& file, RunConfig base) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  return parse_config(in, file.string(), std::move(base));
}

std::vector<std::pair<std::string, std::string>> echo(const RunConfig& config) {
  RunConfig c = config;
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(c));
  return out;
}

void write_config(std::ostream& out, const RunConfig& config) {
  for (const auto& [k, v] : echo(config)) out << k << " = " << v << '\n';
}

void validate(const RunConfig& c) {
  if (c.budget < 1) throw ConfigError("budget must be at least 1");
  if (c.replications < 1) throw ConfigError("replications must be at least 1");
  if (c.workers < 1) throw ConfigError("workers must be at least 1");
  if (c.algorithms.empty()) throw ConfigError("empty algorithm list");
  if (!(c.metrics.weights.w1 >= 0.0) || !(c.metrics.weights.w2 >= 0.0)) {
    throw ConfigError("objective weights must be nonnegative");
  }
  if (!(c.metrics.bin_width > 0.0)) throw ConfigError("bin_width must be positive");
  if (!(c.metrics.smoothing > 0.0)) throw ConfigError("smoothing must be positive");
  if (!(c.gamma_cf >= 0.0)) throw ConfigError("gamma_cf must be nonnegative");
  if (c.optimizer.ga.population < 2) throw ConfigError("ga.population must be at least 2");
  if (c.optimizer.ga.tournament_size < 1) throw ConfigError("ga.tournament_size must be at least 1");
  if (c.optimizer.byo.initial_points < 1 || c.optimizer.byo.refit_every < 1 || c.optimizer.byo.starts < 1) {
    throw ConfigError("byo counts must be at least 1");
  }
  if (c.optimizer.cors.distance_cycle.empty() || c.optimizer.cors.candidates < 1 || c.optimizer.cors.starts < 1) {
    throw ConfigError("cors needs a distance cycle, candidates and starts");
  }
}

}  // namespace railcal::harness
