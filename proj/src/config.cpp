#include "gas/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "gas/csv.hpp"
#include "gas/pde.hpp"

namespace gas {

std::string to_string(SamplingMode m) {
  switch (m) {
    case SamplingMode::GasTop: return "gas_t";
    case SamplingMode::GasLocal: return "gas_l";
    case SamplingMode::UniformBaseline: return "uniform_baseline";
  }
  return "gas_t";
}

SamplingMode sampling_mode_from_string(const std::string& s) {
  if (s == "gas_t") return SamplingMode::GasTop;
  if (s == "gas_l") return SamplingMode::GasLocal;
  if (s == "uniform_baseline") return SamplingMode::UniformBaseline;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

std::vector<int> GasConfig::layer_sizes(int problem_dim) const {
  std::vector<int> sizes;
  sizes.push_back(problem_dim);
  for (int i = 0; i < hidden_layers; ++i) sizes.push_back(width);
  sizes.push_back(1);
  return sizes;
}

OptimizerConfig GasConfig::optimizer_config() const {
  OptimizerConfig c;
  c.kind = optimizer_from_string(optimizer);
  c.lr = lr;
  c.beta1 = beta1;
  c.beta2 = beta2;
  c.eps = adam_eps;
  return c;
}

void GasConfig::validate() const {
  std::vector<std::string> bad;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) bad.push_back(msg);
  };
  need(hidden_layers >= 0, "hidden_layers must be >= 0");
  need(width > 0, "width must be positive");
  need(n_r > 0, "n_r must be positive");
  need(n_b > 0, "n_b must be positive");
  need(n_p >= 0, "n_p must be >= 0");
  need(n_a > 0, "n_a must be positive");
  need(n_g > 0, "n_g must be positive");
  need(n_per_component > 0, "n_per_component must be positive");
  need(m > 0, "m must be positive");
  need(m_b > 0, "m_b must be positive");
  need(steps_per_epoch > 0, "steps_per_epoch must be positive");
  need(gamma >= 0.0, "gamma must be >= 0");
  need(lambda > 0.0, "lambda must be positive");
  need(sigma2_min > 0.0 && sigma2_max >= sigma2_min, "sigma2 clamps must satisfy 0 < min <= max");
  need(h > 0.0, "h must be positive");
  need(k_neighbors > 0, "k_neighbors must be positive");
  need(n_t > k_neighbors, "n_t must exceed k_neighbors");
  need(n_t >= n_g, "n_t must be >= n_g");
  need(lr > 0.0, "lr must be positive");
  need(eps_stop >= 0.0, "eps_stop must be >= 0");
  need(mse_grid >= 2, "mse_grid must be >= 2");
  need(rel_l2_nodes >= 1, "rel_l2_nodes must be >= 1");
  need(rel_l2_half_width > 0.0, "rel_l2_half_width must be positive");
  try {
    (void)sampling_mode();
  } catch (const std::exception& e) {
    bad.push_back(e.what());
  }
  try {
    (void)optimizer_from_string(optimizer);
  } catch (const std::exception& e) {
    bad.push_back(e.what());
  }
  try {
    (void)activation_from_string(activation);
  } catch (const std::exception& e) {
    bad.push_back(e.what());
  }
  try {
    (void)PdeProblem::by_name(problem);
  } catch (const std::exception& e) {
    bad.push_back(e.what());
  }
  if (!bad.empty()) {
    std::string msg = "invalid config:";
    for (const auto& b : bad) msg += "\n  - " + b;
    throw std::invalid_argument(msg);
  }
}

namespace {

struct Field {
  const char* key;
  std::function<void(GasConfig&, const std::string&)> set;
  std::function<std::string(const GasConfig&)> get;
};

template <typename T>
T parse_number(const std::string& s) {
  T v{};
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars<double> handles scientific notation, locale-independent
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
      throw std::invalid_argument("not a number: '" + s + "'");
  } else {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
      throw std::invalid_argument("not an integer: '" + s + "'");
  }
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("not a bool: '" + s + "'");
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    auto add_str = [&](const char* key, std::string GasConfig::* mem) {
      f.push_back({key, [mem](GasConfig& c, const std::string& v) { c.*mem = v; },
                   [mem](const GasConfig& c) { return c.*mem; }});
    };
    auto add_int = [&](const char* key, int GasConfig::* mem) {
      f.push_back({key, [mem](GasConfig& c, const std::string& v) { c.*mem = parse_number<int>(v); },
                   [mem](const GasConfig& c) { return std::to_string(c.*mem); }});
    };
    auto add_dbl = [&](const char* key, double GasConfig::* mem) {
      f.push_back({key,
                   [mem](GasConfig& c, const std::string& v) { c.*mem = parse_number<double>(v); },
                   [mem](const GasConfig& c) { return format_g17(c.*mem); }});
    };
    add_str("problem", &GasConfig::problem);
    add_int("dim", &GasConfig::dim);
    add_dbl("sharpness", &GasConfig::sharpness);
    add_int("hidden_layers", &GasConfig::hidden_layers);
    add_int("width", &GasConfig::width);
    add_str("activation", &GasConfig::activation);
    add_int("n_r", &GasConfig::n_r);
    add_int("n_b", &GasConfig::n_b);
    add_int("n_p", &GasConfig::n_p);
    add_int("n_a", &GasConfig::n_a);
    add_int("n_g", &GasConfig::n_g);
    add_int("n_per_component", &GasConfig::n_per_component);
    add_int("m", &GasConfig::m);
    add_int("m_b", &GasConfig::m_b);
    add_int("steps_per_epoch", &GasConfig::steps_per_epoch);
    add_dbl("gamma", &GasConfig::gamma);
    add_dbl("lambda", &GasConfig::lambda);
    add_str("mode", &GasConfig::mode);
    add_dbl("sigma2_min", &GasConfig::sigma2_min);
    add_dbl("sigma2_max", &GasConfig::sigma2_max);
    add_dbl("h", &GasConfig::h);
    add_int("k_neighbors", &GasConfig::k_neighbors);
    add_int("n_t", &GasConfig::n_t);
    f.push_back({"resample_validation",
                 [](GasConfig& c, const std::string& v) { c.resample_validation = parse_bool(v); },
                 [](const GasConfig& c) { return c.resample_validation ? "true" : "false"; }});
    add_str("optimizer", &GasConfig::optimizer);
    add_dbl("lr", &GasConfig::lr);
    add_dbl("beta1", &GasConfig::beta1);
    add_dbl("beta2", &GasConfig::beta2);
    add_dbl("adam_eps", &GasConfig::adam_eps);
    f.push_back({"seed",
                 [](GasConfig& c, const std::string& v) {
                   c.seed = parse_number<std::uint64_t>(v);
                 },
                 [](const GasConfig& c) { return std::to_string(c.seed); }});
    add_dbl("eps_stop", &GasConfig::eps_stop);
    add_int("mse_grid", &GasConfig::mse_grid);
    add_int("rel_l2_nodes", &GasConfig::rel_l2_nodes);
    add_dbl("rel_l2_half_width", &GasConfig::rel_l2_half_width);
    return f;
  }();
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

GasConfig parse_config(const std::string& text) {
  GasConfig cfg;
  std::vector<std::string> errors;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& tab = fields();
    const auto it = std::find_if(tab.begin(), tab.end(),
                                 [&](const Field& field) { return key == field.key; });
    if (it == tab.end()) {
      errors.push_back("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      continue;
    }
    try {
      it->set(cfg, value);
    } catch (const std::exception& e) {
      errors.push_back("line " + std::to_string(lineno) + ": key '" + key + "': " + e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = "config parse failed:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw std::invalid_argument(msg);
  }
  return cfg;
}

GasConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const GasConfig& cfg) {
  std::string out;
  for (const auto& field : fields()) {
    out += field.key;
    out += " = ";
    out += field.get(cfg);
    out += "\n";
  }
  return out;
}

void apply_override(GasConfig& cfg, const std::string& key, const std::string& value) {
  const auto& tab = fields();
  const auto it =
      std::find_if(tab.begin(), tab.end(), [&](const Field& field) { return key == field.key; });
  if (it == tab.end()) throw std::invalid_argument("unknown config key '" + key + "'");
  it->set(cfg, value);
}

namespace {

GasConfig make_one_peak(SamplingMode mode) {
  GasConfig c;
  c.problem = "one_peak";
  c.mode = to_string(mode);
  c.width = 32;
  c.n_r = 500;
  c.n_b = 200;
  c.n_p = 3000;
  c.n_a = 10;
  c.n_g = 20;
  c.n_per_component = 25;
  c.m = 500;
  c.m_b = 200;
  return c;
}

GasConfig make_two_peak(SamplingMode mode) {
  GasConfig c = make_one_peak(mode);
  c.problem = "two_peak";
  c.n_p = 5000;
  c.n_a = 20;
  return c;
}

GasConfig make_nine_peak(SamplingMode mode) {
  GasConfig c;
  c.problem = "nine_peak";
  c.mode = to_string(mode);
  c.width = 32;
  c.n_r = 1000;
  c.n_b = 400;
  c.n_p = 5000;
  c.n_a = 20;
  c.n_g = 20;
  c.n_per_component = 50;
  c.m = 500;
  c.m_b = 200;
  return c;
}

GasConfig make_dim10(SamplingMode mode) {
  GasConfig c;
  c.problem = "dim10";
  c.mode = to_string(mode);
  c.width = 64;
  c.n_r = 10000;
  c.n_b = 10000;
  c.n_p = 3000;
  c.n_a = 20;
  c.n_g = 40;
  c.n_per_component = 250;
  c.m = 5000;
  c.m_b = 5000;
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"one_peak_gas_t",  "one_peak_uniform", "two_peak_gas_l", "two_peak_gas_t",
          "two_peak_uniform", "nine_peak_gas_l", "dim10",          "dim10_uniform"};
}

GasConfig preset(const std::string& name) {
  if (name == "one_peak_gas_t") return make_one_peak(SamplingMode::GasTop);
  if (name == "one_peak_uniform") return make_one_peak(SamplingMode::UniformBaseline);
  if (name == "two_peak_gas_l") return make_two_peak(SamplingMode::GasLocal);
  if (name == "two_peak_gas_t") return make_two_peak(SamplingMode::GasTop);
  if (name == "two_peak_uniform") return make_two_peak(SamplingMode::UniformBaseline);
  if (name == "nine_peak_gas_l") return make_nine_peak(SamplingMode::GasLocal);
  if (name == "dim10") return make_dim10(SamplingMode::GasTop);
  if (name == "dim10_uniform") return make_dim10(SamplingMode::UniformBaseline);
  throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace gas
