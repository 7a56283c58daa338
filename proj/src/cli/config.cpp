#include "sevsteps/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "sevsteps/schemes.hpp"

namespace sevsteps::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigurationError("config key '" + key + "': expected a number, got '" + value + "'");
  }
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigurationError("config key '" + key + "': expected a non-negative integer, got '" + value + "'");
  }
  try {
    return std::stoull(value);
  } catch (const std::exception&) {
    throw ConfigurationError("config key '" + key + "': integer out of range");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigurationError("config key '" + key + "': expected true or false");
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

template <class T, class F>
std::string join(const std::vector<T>& values, F&& format) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += format(values[i]);
  }
  return out;
}

bool is_power_of_two(double ratio) {
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) return false;
  const auto n = static_cast<std::uint64_t>(rounded);
  return (n & (n - 1)) == 0;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem", [](auto& c, auto&, auto& v) { c.problem = v; }},
      {"potential", [](auto& c, auto&, auto& v) { c.potential = v; }},
      {"potential_bound", [](auto& c, auto& k, auto& v) { c.potential_bound = to_double(k, v); }},
      {"schemes", [](auto& c, auto&, auto& v) { c.schemes = split_list(v); }},
      {"scheme", [](auto& c, auto&, auto& v) { c.schemes = split_list(v); }},
      {"sigma", [](auto& c, auto& k, auto& v) { c.sigma = to_double(k, v); }},
      {"K", [](auto& c, auto& k, auto& v) { c.K = static_cast<int>(to_unsigned(k, v)); }},
      {"N_h", [](auto& c, auto& k, auto& v) { c.N_h = static_cast<int>(to_unsigned(k, v)); }},
      {"lambda_decay", [](auto& c, auto& k, auto& v) { c.lambda_decay = to_double(k, v); }},
      {"noise_scale", [](auto& c, auto& k, auto& v) { c.noise_scale = to_double(k, v); }},
      {"noise_field", [](auto& c, auto&, auto& v) { c.noise_field = v; }},
      {"u0", [](auto& c, auto&, auto& v) { c.u0 = v; }},
      {"phi", [](auto& c, auto&, auto& v) { c.phi = v; }},
      {"psi", [](auto& c, auto&, auto& v) { c.psi = v; }},
      {"T", [](auto& c, auto& k, auto& v) { c.T = to_double(k, v); }},
      {"p", [](auto& c, auto& k, auto& v) { c.p = to_double(k, v); }},
      {"M", [](auto& c, auto& k, auto& v) { c.M = to_unsigned(k, v); }},
      {"seed", [](auto& c, auto& k, auto& v) { c.seed = to_unsigned(k, v); }},
      {"k_grid",
       [](auto& c, auto&, auto& v) {
         c.k_grid.clear();
         for (const auto& item : split_list(v)) c.k_grid.push_back(parse_step(item));
       }},
      {"k_ref", [](auto& c, auto&, auto& v) { c.k_ref = parse_step(v); }},
      {"m_grid",
       [](auto& c, auto& k, auto& v) {
         c.m_grid.clear();
         for (const auto& item : split_list(v)) c.m_grid.push_back(to_double(k, item));
       }},
      {"m_fixed", [](auto& c, auto& k, auto& v) { c.m_fixed = to_double(k, v); }},
      {"n_grid",
       [](auto& c, auto& k, auto& v) {
         c.n_grid.clear();
         for (const auto& item : split_list(v)) c.n_grid.push_back(to_unsigned(k, item));
       }},
      {"rate_min", [](auto& c, auto& k, auto& v) { c.rate_min = to_double(k, v); }},
      {"rate_max", [](auto& c, auto& k, auto& v) { c.rate_max = to_double(k, v); }},
      {"slack", [](auto& c, auto& k, auto& v) { c.slack = to_double(k, v); }},
      {"stability_ratio", [](auto& c, auto& k, auto& v) { c.stability_ratio = to_double(k, v); }},
      {"inequality_paths", [](auto& c, auto& k, auto& v) { c.inequality_paths = to_unsigned(k, v); }},
      {"inequality_steps", [](auto& c, auto& k, auto& v) { c.inequality_steps = to_unsigned(k, v); }},
      {"inequality_fine_steps", [](auto& c, auto& k, auto& v) { c.inequality_fine_steps = to_unsigned(k, v); }},
      {"gronwall_cases", [](auto& c, auto& k, auto& v) { c.gronwall_cases = to_unsigned(k, v); }},
      {"verify", [](auto& c, auto& k, auto& v) { c.verify = to_bool(k, v); }},
      {"output", [](auto& c, auto&, auto& v) { c.output = v; }},
      {"threads", [](auto& c, auto& k, auto& v) { c.threads = static_cast<unsigned>(to_unsigned(k, v)); }},
  };
  return table;
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& msg) { throw ConfigurationError(msg); };
  if (c.problem != "linear" && c.problem != "nonlinear" && c.problem != "custom") {
    fail("problem must be linear, nonlinear or custom");
  }
  if (c.potential != "smooth" && c.potential != "rough" && c.potential != "zero") {
    fail("potential must be smooth, rough or zero");
  }
  if (!(c.potential_bound > 0.0)) fail("potential_bound must be > 0");
  if (c.schemes.empty()) fail("at least one scheme is required");
  for (const auto& s : c.schemes) {
    try {
      (void)RationalScheme::from_name(s);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  if (!(c.sigma >= 0.0)) fail("sigma must be >= 0");
  if (c.K < 0 || c.K > 4096) fail("K must lie in [0, 4096]");
  if (c.N_h != 0 && (c.N_h % 2 == 0 || c.N_h > 2 * c.K + 1)) fail("N_h must be odd and at most 2K+1");
  if (!(c.noise_scale >= 0.0)) fail("noise_scale must be >= 0");
  if (c.noise_field != "complex" && c.noise_field != "real") fail("noise_field must be complex or real");
  if (c.u0 != "rough") {
    try {
      std::size_t used = 0;
      const double beta = std::stod(c.u0, &used);
      if (used != c.u0.size() || !(beta >= 0.0)) throw std::invalid_argument(c.u0);
    } catch (const std::exception&) {
      fail("u0 must be a non-negative decay exponent or 'rough'");
    }
  }
  for (const auto& name : {c.phi, c.psi}) {
    if (name != "zero" && name != "identity" && name != "saturate" && name != "sine") {
      fail("phi and psi must be zero, identity, saturate or sine");
    }
  }
  if (!(c.T > 0.0)) fail("T must be > 0");
  if (!(c.p >= 2.0)) fail("p must be >= 2");
  if (c.M == 0) fail("M must be >= 1");
  for (double k : c.k_grid) {
    if (!(k > 0.0) || !is_power_of_two(c.T / k)) fail("every k must divide T dyadically (T/k a power of two)");
  }
  if (!c.k_grid.empty()) {
    const double k_ref = c.reference_step();
    for (double k : c.k_grid) {
      if (!is_power_of_two(k / k_ref)) fail("k_ref must divide every k dyadically");
    }
    if (c.T / k_ref > std::ldexp(1.0, 20) + 0.5) fail("reference grid exceeds 2^20 steps");
  }
  for (double m : c.m_grid) {
    if (!(m > 0.0)) fail("m values must be > 0");
  }
  if (!(c.m_fixed > 0.0)) fail("m_fixed must be > 0");
  if (!c.n_grid.empty()) {
    const std::size_t finest = *std::max_element(c.n_grid.begin(), c.n_grid.end());
    if (finest > (std::size_t{1} << 20)) fail("n_grid exceeds 2^20 steps");
    for (std::size_t n : c.n_grid) {
      if (n == 0 || finest % n != 0) fail("every n_grid entry must divide the largest one");
    }
  }
  if (!(c.rate_min <= c.rate_max)) fail("rate_min must not exceed rate_max");
  if (!(c.slack >= 0.0)) fail("slack must be >= 0");
  if (!(c.stability_ratio >= 1.0)) fail("stability_ratio must be >= 1");
  if (c.inequality_paths == 0 || c.inequality_steps == 0 || c.inequality_fine_steps == 0) {
    fail("inequality path and step counts must be positive");
  }
}

}  // namespace

double parse_step(const std::string& raw) {
  const std::string text = trim(raw);
  double value = 0.0;
  if (const auto caret = text.find('^'); caret != std::string::npos) {
    value = std::pow(to_double("k", text.substr(0, caret)), to_double("k", text.substr(caret + 1)));
  } else if (const auto slash = text.find('/'); slash != std::string::npos) {
    value = to_double("k", text.substr(0, slash)) / to_double("k", text.substr(slash + 1));
  } else {
    value = to_double("k", text);
  }
  if (!(value > 0.0) || !std::isfinite(value)) throw ConfigurationError("step sizes must be positive: '" + raw + "'");
  return value;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigurationError("config line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigurationError("config line " + std::to_string(number) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigurationError("cannot open config file " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

ExperimentConfig make_config(const std::map<std::string, std::string>& raw) {
  ExperimentConfig c;
  for (const auto& [key, value] : raw) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigurationError("unknown config key '" + key + "'");
    it->second(c, key, value);
  }
  validate(c);
  return c;
}

double ExperimentConfig::reference_step() const {
  if (k_ref > 0.0) return k_ref;
  if (k_grid.empty()) throw ConfigurationError("k_grid is empty");
  return *std::min_element(k_grid.begin(), k_grid.end()) / 16.0;
}

unsigned ExperimentConfig::resolved_threads() const {
  if (threads > 0) return threads;
  if (const char* env = std::getenv("SEVSTEPS_THREADS")) {
    const std::string value = trim(env);
    if (!value.empty() && value.find_first_not_of("0123456789") == std::string::npos) {
      const unsigned long n = std::stoul(value);
      if (n > 0) return static_cast<unsigned>(std::min<unsigned long>(n, 1024));
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  auto quote = [](const std::string& s) { return s; };
  return {
      {"problem", problem},
      {"potential", potential},
      {"potential_bound", format_double(potential_bound)},
      {"schemes", join(schemes, quote)},
      {"sigma", format_double(sigma)},
      {"K", std::to_string(K)},
      {"N_h", std::to_string(N_h == 0 ? 2 * K + 1 : N_h)},
      {"lambda_decay", format_double(lambda_decay)},
      {"noise_scale", format_double(noise_scale)},
      {"noise_field", noise_field},
      {"u0", u0},
      {"phi", phi},
      {"psi", psi},
      {"T", format_double(T)},
      {"p", format_double(p)},
      {"M", std::to_string(M)},
      {"seed", std::to_string(seed)},
      {"k_grid", join(k_grid, format_double)},
      {"k_ref", k_grid.empty() && k_ref == 0.0 ? std::string("-") : format_double(reference_step())},
      {"m_grid", join(m_grid, format_double)},
      {"m_fixed", format_double(m_fixed)},
      {"n_grid", join(n_grid, [](std::size_t n) { return std::to_string(n); })},
      {"rate_min", format_double(rate_min)},
      {"rate_max", format_double(rate_max)},
      {"slack", format_double(slack)},
      {"stability_ratio", format_double(stability_ratio)},
      {"inequality_paths", std::to_string(inequality_paths)},
      {"inequality_steps", std::to_string(inequality_steps)},
      {"inequality_fine_steps", std::to_string(inequality_fine_steps)},
      {"gronwall_cases", std::to_string(gronwall_cases)},
      {"verify", verify ? "true" : "false"},
      {"output", output.string()},
      {"threads", std::to_string(resolved_threads())},
  };
}

}  // namespace sevsteps::cli
