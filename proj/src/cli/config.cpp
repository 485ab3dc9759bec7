#include "greentune/cli/config.hpp"

#include <charconv>
#include <functional>
#include <sstream>
#include <system_error>

#include "greentune/common/error.hpp"
#include "greentune/common/io.hpp"

namespace greentune::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"name", [](auto& c, auto&, auto& v) { c.name = v; }},
      {"dataset", [](auto& c, auto&, auto& v) { c.dataset = v; }},
      {"synth_n", [](auto& c, auto& k, auto& v) {
         const auto n = to_int(k, v);
         if (n < 0) throw ConfigError(k + " must be non-negative");
         c.synth.n = static_cast<std::size_t>(n);
       }},
      {"synth_seed", [](auto& c, auto& k, auto& v) {
         c.synth.seed = static_cast<std::uint64_t>(to_int(k, v));
       }},
      {"synth_proportions", [](auto& c, auto&, auto& v) { c.synth.proportions = parse_proportions(v); }},
      {"synth_noise", [](auto& c, auto& k, auto& v) { c.synth.noise = to_double(k, v); }},
      {"variant", [](auto& c, auto&, auto& v) { c.variant = fstune::parse_variant(v); }},
      {"optimizer", [](auto& c, auto&, auto& v) { c.optimizer = parse_optimizer_or_none(v); }},
      {"population_size", [](auto& c, auto& k, auto& v) { c.population_size = static_cast<int>(to_int(k, v)); }},
      {"max_nfe", [](auto& c, auto& k, auto& v) { c.max_nfe = static_cast<int>(to_int(k, v)); }},
      {"inner_k", [](auto& c, auto& k, auto& v) { c.inner_k = static_cast<int>(to_int(k, v)); }},
      {"outer_k", [](auto& c, auto& k, auto& v) { c.outer_k = static_cast<int>(to_int(k, v)); }},
      {"seeds", [](auto& c, auto&, auto& v) { c.seeds = parse_seed_list(v); }},
      {"n_trees", [](auto& c, auto& k, auto& v) { c.defaults.n_trees = static_cast<int>(to_int(k, v)); }},
      {"learning_rate", [](auto& c, auto& k, auto& v) { c.defaults.learning_rate = to_double(k, v); }},
      {"min_samples_leaf", [](auto& c, auto& k, auto& v) { c.defaults.min_samples_leaf = static_cast<int>(to_int(k, v)); }},
      {"max_leaf_nodes", [](auto& c, auto& k, auto& v) { c.defaults.max_leaf_nodes = static_cast<int>(to_int(k, v)); }},
      {"l2", [](auto& c, auto& k, auto& v) { c.defaults.l2 = to_double(k, v); }},
      {"max_bins", [](auto& c, auto& k, auto& v) { c.defaults.max_bins = static_cast<int>(to_int(k, v)); }},
      {"protocol", [](auto& c, auto& k, auto& v) {
         if (v == "nested") c.protocol = Protocol::nested;
         else if (v == "global") c.protocol = Protocol::global;
         else throw ConfigError(k + ": expected nested or global, got '" + v + "'");
       }},
      {"f_average", [](auto& c, auto& k, auto& v) {
         if (v == "macro") c.f_average = eval::FAverage::macro;
         else if (v == "weighted") c.f_average = eval::FAverage::weighted;
         else throw ConfigError(k + ": expected macro or weighted, got '" + v + "'");
       }},
      {"cache", [](auto& c, auto& k, auto& v) { c.cache = to_bool(k, v); }},
      {"workers", [](auto& c, auto& k, auto& v) {
         const auto w = to_int(k, v);
         if (w < 0) throw ConfigError(k + " must be non-negative");
         c.workers = static_cast<unsigned>(w);
       }},
      {"out", [](auto& c, auto&, auto& v) { c.out = v; }},
      {"de_f", [](auto& c, auto& k, auto& v) { c.settings.de.de.f = to_double(k, v); }},
      {"de_cr", [](auto& c, auto& k, auto& v) { c.settings.de.de.cr = to_double(k, v); }},
      {"de_strategy", [](auto& c, auto&, auto& v) { c.settings.de.de.strategy = de::parse_strategy(v); }},
      {"adaptive_strategy", [](auto& c, auto&, auto& v) {
         c.settings.de.adaptive_strategy = de::parse_strategy(v);
       }},
      {"jade_mu_cr", [](auto& c, auto& k, auto& v) { c.settings.de.jade.mu_cr = to_double(k, v); }},
      {"jade_mu_f", [](auto& c, auto& k, auto& v) { c.settings.de.jade.mu_f = to_double(k, v); }},
      {"jade_c", [](auto& c, auto& k, auto& v) { c.settings.de.jade.c = to_double(k, v); }},
      {"jade_p", [](auto& c, auto& k, auto& v) { c.settings.de.jade.p = to_double(k, v); }},
      {"jade_archive", [](auto& c, auto& k, auto& v) { c.settings.de.jade.use_archive = to_bool(k, v); }},
      {"shade_memory_size", [](auto& c, auto& k, auto& v) { c.settings.de.shade.memory_size = static_cast<int>(to_int(k, v)); }},
      {"lshade_min_population", [](auto& c, auto& k, auto& v) { c.settings.de.shade.min_population = static_cast<int>(to_int(k, v)); }},
      {"ga_pc", [](auto& c, auto& k, auto& v) { c.settings.ga.pc = to_double(k, v); }},
      {"ga_pm", [](auto& c, auto& k, auto& v) { c.settings.ga.pm = to_double(k, v); }},
      {"ga_tournament", [](auto& c, auto& k, auto& v) { c.settings.ga.tournament_size = static_cast<int>(to_int(k, v)); }},
      {"pso_c1", [](auto& c, auto& k, auto& v) { c.settings.pso.c1 = to_double(k, v); }},
      {"pso_c2", [](auto& c, auto& k, auto& v) { c.settings.pso.c2 = to_double(k, v); }},
      {"pso_w_min", [](auto& c, auto& k, auto& v) { c.settings.pso.w_min = to_double(k, v); }},
      {"pso_w_max", [](auto& c, auto& k, auto& v) { c.settings.pso.w_max = to_double(k, v); }},
  };
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (outer_k < 2) throw ConfigError("outer_k must be at least 2");
  if (inner_k < 2) throw ConfigError("inner_k must be at least 2");
  if (population_size < 1) throw ConfigError("population_size must be positive");
  if (max_nfe < 1) throw ConfigError("max_nfe must be positive");
  defaults.validate();
  settings.ga.validate();
  settings.pso.validate();
  settings.de.de.validate();
}

std::string ExperimentConfig::label() const {
  if (!name.empty()) return name;
  if (!optimizer) return "hgbc-default";
  return std::string(fstune::to_string(variant)) + "-" + std::string(search::to_string(*optimizer));
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

KeyValues read_config_file(const std::string& path) {
  try {
    return parse_key_values(read_text_file(path));
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

void apply(ExperimentConfig& config, const KeyValues& values) {
  const auto& table = setters();
  for (const auto& [key, value] : values) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(config, key, value);
  }
}

std::string to_key_values(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "name=" << c.label() << '\n';
  if (!c.dataset.empty()) {
    out << "dataset=" << c.dataset << '\n';
  } else {
    out << "synth_n=" << c.synth.n << '\n';
    out << "synth_seed=" << c.synth.seed << '\n';
    out << "synth_proportions=" << fmt(c.synth.proportions[0]) << ',' << fmt(c.synth.proportions[1])
        << ',' << fmt(c.synth.proportions[2]) << '\n';
    out << "synth_noise=" << fmt(c.synth.noise) << '\n';
  }
  out << "variant=" << fstune::to_string(c.variant) << '\n';
  out << "optimizer=" << optimizer_name(c.optimizer) << '\n';
  out << "population_size=" << c.population_size << '\n';
  out << "max_nfe=" << c.max_nfe << '\n';
  out << "inner_k=" << c.inner_k << '\n';
  out << "outer_k=" << c.outer_k << '\n';
  out << "seeds=";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) out << (i ? "," : "") << c.seeds[i];
  out << '\n';
  out << "n_trees=" << c.defaults.n_trees << '\n';
  out << "learning_rate=" << fmt(c.defaults.learning_rate) << '\n';
  out << "min_samples_leaf=" << c.defaults.min_samples_leaf << '\n';
  out << "max_leaf_nodes=" << c.defaults.max_leaf_nodes << '\n';
  out << "l2=" << fmt(c.defaults.l2) << '\n';
  out << "max_bins=" << c.defaults.max_bins << '\n';
  out << "protocol=" << (c.protocol == Protocol::nested ? "nested" : "global") << '\n';
  out << "f_average=" << (c.f_average == eval::FAverage::macro ? "macro" : "weighted") << '\n';
  out << "cache=" << (c.cache ? "true" : "false") << '\n';
  return out.str();
}

std::optional<search::OptimizerKind> parse_optimizer_or_none(const std::string& name) {
  if (name == "none") return std::nullopt;
  try {
    return search::parse_optimizer(name);
  } catch (const ConfigError&) {
    std::string valid = "none";
    for (const auto& n : search::optimizer_names()) valid += ", " + n;
    throw ConfigError("unknown optimizer '" + name + "' (valid: " + valid + ")");
  }
}

std::string optimizer_name(const std::optional<search::OptimizerKind>& kind) {
  return kind ? std::string(search::to_string(*kind)) : "none";
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item =
        trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    // a-b expands to the inclusive range
    const auto dash = item.find('-', 1);
    if (dash != std::string::npos) {
      const auto lo = to_int("seeds", item.substr(0, dash));
      const auto hi = to_int("seeds", item.substr(dash + 1));
      if (lo < 0 || hi < lo) throw ConfigError("seeds: bad range '" + item + "'");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
    } else {
      const auto s = to_int("seeds", item);
      if (s < 0) throw ConfigError("seeds must be non-negative");
      seeds.push_back(static_cast<std::uint64_t>(s));
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return seeds;
}

std::array<double, energy::kClassCount> parse_proportions(const std::string& text) {
  std::array<double, energy::kClassCount> p{};
  std::istringstream in(text);
  std::string item;
  std::size_t i = 0;
  while (std::getline(in, item, ',')) {
    if (i == p.size()) throw ConfigError("proportions: expected three values");
    p[i++] = to_double("proportions", trim(item));
  }
  if (i != p.size()) throw ConfigError("proportions: expected three values");
  return p;
}

}  // namespace greentune::cli
