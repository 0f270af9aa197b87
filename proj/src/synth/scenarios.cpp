#include <fstream>
#include <sstream>

#include "railcal/error.hpp"
#include "railcal/synth.hpp"

namespace railcal::synth {

Bounds default_bounds() {
  return Bounds{{-2.0, -5.0, -3.0, -10.0, 220.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0, 260.0, 0.2, 0.2}};
}

std::vector<Scenario> scenario_presets() {
  const ParamArray reference{-0.147, -1.271, -0.573, -3.679, 232.0, 0.0732, 0.0607};
  const Bounds b = default_bounds();
  std::vector<Scenario> out;
  out.push_back({"reference", reference, b});

  ParamArray random_choice = reference;
  for (int i = 0; i < 4; ++i) random_choice[i] = 0.0;
  out.push_back({"random-choice", random_choice, b});

  ParamArray deterministic = reference;
  for (int i = 0; i < 4; ++i) deterministic[i] = b.lower[i];
  out.push_back({"deterministic-choice", deterministic, b});

  ParamArray sensitive = reference;
  sensitive[4] = 225.0;
  sensitive[5] = 0.2;
  sensitive[6] = 0.2;
  out.push_back({"crowding-sensitive", sensitive, b});

  ParamArray insensitive = reference;
  insensitive[4] = 235.0;
  insensitive[5] = 0.0;
  insensitive[6] = 0.0;
  out.push_back({"crowding-insensitive", insensitive, b});
  return out;
}

Scenario scenario_by_name(std::string_view name) {
  for (auto& s : scenario_presets()) {
    if (s.name == name) return s;
  }
  throw ConfigError("unknown scenario '" + std::string(name) +
                    "' (expected reference, random-choice, deterministic-choice, crowding-sensitive or "
                    "crowding-insensitive)");
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> numbers(const std::string& text, const std::string& source, int line) {
  std::istringstream in(text);
  std::vector<double> v;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ParseError(source, static_cast<std::size_t>(line), "not a number: " + tok);
    }
  }
  if (v.size() != kNumParams) {
    throw ParseError(source, static_cast<std::size_t>(line), "expected 7 numbers, got " + std::to_string(v.size()));
  }
  return v;
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& source) {
  Scenario s;
  bool have_base = false;
  bool have_theta = false;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    raw = trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string::npos) throw ParseError(source, static_cast<std::size_t>(line), "expected key = value");
    const std::string key = trim(raw.substr(0, eq));
    const std::string value = trim(raw.substr(eq + 1));
    if (key == "preset") {
      try {
        s = scenario_by_name(value);
      } catch (const ConfigError& e) {
        throw ParseError(source, static_cast<std::size_t>(line), e.what());
      }
      have_base = have_theta = true;
    } else if (key == "name") {
      s.name = value;
    } else if (key == "theta") {
      auto v = numbers(value, source, line);
      std::copy(v.begin(), v.end(), s.theta.begin());
      have_theta = true;
    } else if (key == "lower") {
      s.bounds.lower = numbers(value, source, line);
    } else if (key == "upper") {
      s.bounds.upper = numbers(value, source, line);
    } else {
      throw ParseError(source, static_cast<std::size_t>(line), "unknown key '" + key + "'");
    }
  }
  if (!have_theta) throw ParseError(source, static_cast<std::size_t>(line), "scenario needs a preset or theta");
  if (!have_base && s.bounds.lower.empty()) s.bounds.lower = default_bounds().lower;
  if (!have_base && s.bounds.upper.empty()) s.bounds.upper = default_bounds().upper;
  if (s.name.empty()) s.name = "custom";
  try {
    s.bounds.validate();
  } catch (const DomainError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  if (!s.bounds.contains(s.theta)) throw ConfigError(source + ": theta lies outside the bounds");
  return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open scenario file " + file.string());
  return parse_scenario(in, file.string());
}

Scenario resolve_scenario(std::string_view name_or_path) {
  for (auto& s : scenario_presets()) {
    if (s.name == name_or_path) return s;
  }
  const std::filesystem::path p(name_or_path);
  if (std::filesystem::exists(p)) return load_scenario(p);
  return scenario_by_name(name_or_path);
}

}  // namespace railcal::synth
