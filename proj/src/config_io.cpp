#include "aammsu/config_io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "aammsu/errors.hpp"

namespace aammsu {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + v + "' as a number");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + v + "'");
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(xs[i]);
    } else {
      out += std::to_string(xs[i]);
    }
  }
  return out;
}

constexpr const char* kSweepPrefix = "sweep.";

}  // namespace

const std::vector<std::string>& sweepable_keys() {
  static const std::vector<std::string> keys{
      "M",     "mu",     "nu",    "gamma_tilde",  "beta2",         "epsilon", "B",
      "beta1", "eta.value", "eta.C", "oracle.sigma", "lr_decay.factor"};
  return keys;
}

void apply_parameter(ExperimentConfig& cfg, const std::string& key, double value) {
  auto& c = cfg.coefficients;
  if (key == "M") {
    c.M = value;
  } else if (key == "mu") {
    c.mu = value;
  } else if (key == "nu") {
    c.nu = value;
  } else if (key == "gamma_tilde") {
    c.gamma_tilde = value;
  } else if (key == "beta2") {
    c.beta2 = value;
  } else if (key == "epsilon") {
    c.epsilon = value;
  } else if (key == "B") {
    c.B = value;
  } else if (key == "beta1") {
    cfg.beta1 = value;
  } else if (key == "eta.value") {
    auto* s = std::get_if<ConstantEta>(&c.eta);
    if (!s) throw ConfigError("eta.value requires eta.schedule = constant");
    s->value = value;
  } else if (key == "eta.C") {
    if (auto* f = std::get_if<FiniteHorizonEta>(&c.eta)) {
      f->C = value;
    } else if (auto* d = std::get_if<DecreasingEta>(&c.eta)) {
      d->C = value;
    } else {
      throw ConfigError("eta.C requires eta.schedule = finite_horizon or decreasing");
    }
  } else if (key == "oracle.sigma") {
    cfg.oracle.sigma = value;
  } else if (key == "lr_decay.factor") {
    cfg.lr_decay.factor = value;
  } else {
    throw ConfigError("parameter '" + key + "' cannot be swept");
  }
}

void ExperimentConfig::validate() const {
  if (n_iters < 1) throw ConfigError("n_iters >= 1 required");
  if (n_runs < 1) throw ConfigError("n_runs >= 1 required");
  if (epoch_length < 0) throw ConfigError("epoch_length >= 0 required");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1 in [0,1) required");
  if (!(init_scale > 0.0)) throw ConfigError("init.scale > 0 required");
  if (!(equivalence_tol > 0.0)) throw ConfigError("equivalence.tol > 0 required");
  if (!(audit_delta_prime > 0.0 && audit_delta_prime <= 1.0)) {
    throw ConfigError("audit.delta_prime in (0,1] required");
  }
  oracle.validate();
  CoefficientConfig c = coefficients;
  c.d = oracle.dim == 0 ? 1 : oracle.dim;
  c.validate();
  LrDecay probe = lr_decay;
  if (probe.epoch_length < 1) probe.epoch_length = 1;
  probe.validate();
  for (const auto& [key, values] : sweep_grid) {
    if (values.empty()) throw ConfigError("sweep." + key + " has no values");
    ExperimentConfig copy = *this;
    apply_parameter(copy, key, values.front());
  }
  for (std::size_t i = 1; i < rate_curve_N.size(); ++i) {
    if (rate_curve_N[i] <= rate_curve_N[i - 1]) {
      throw ConfigError("rate_curve.N must be strictly increasing");
    }
  }
}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::vector<std::string> sweep_order;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (kv.count(key)) throw ConfigError("config key '" + key + "' given twice");
    kv[key] = value;
    if (key.rfind(kSweepPrefix, 0) == 0 && key != "sweep.max_points") sweep_order.push_back(key);
  }

  ExperimentConfig cfg;
  std::set<std::string> used;
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    used.insert(key);
    return &it->second;
  };
  auto num = [&](const std::string& key, double& out) {
    if (auto v = get(key)) out = parse_number<double>(key, *v);
  };
  auto integer = [&](const std::string& key, auto& out) {
    using T = std::decay_t<decltype(out)>;
    if (auto v = get(key)) out = parse_number<T>(key, *v);
  };

  if (auto v = get("optimizer")) cfg.optimizer = optimizer_kind_from_string(*v);
  integer("n_iters", cfg.n_iters);
  integer("n_runs", cfg.n_runs);
  integer("base_seed", cfg.base_seed);
  if (auto v = get("output_dir")) cfg.output_dir = *v;

  auto& c = cfg.coefficients;
  num("M", c.M);
  num("mu", c.mu);
  num("nu", c.nu);
  num("gamma_tilde", c.gamma_tilde);
  num("beta2", c.beta2);
  num("epsilon", c.epsilon);
  num("B", c.B);
  if (auto v = get("B_scales_with_dimension")) c.B_scales_with_dimension = parse_bool("B_scales_with_dimension", *v);
  num("beta1", cfg.beta1);

  const std::string schedule = [&] {
    auto v = get("eta.schedule");
    return v ? *v : std::string("constant");
  }();
  if (schedule == "constant") {
    ConstantEta e;
    num("eta.value", e.value);
    c.eta = e;
  } else if (schedule == "finite_horizon") {
    FiniteHorizonEta e;
    num("eta.C", e.C);
    e.N = cfg.n_iters;
    integer("eta.N", e.N);
    c.eta = e;
  } else if (schedule == "decreasing") {
    DecreasingEta e;
    num("eta.C", e.C);
    c.eta = e;
  } else {
    throw ConfigError("eta.schedule must be constant, finite_horizon or decreasing");
  }

  if (auto v = get("lr_decay.milestones")) {
    for (const auto& item : split_list(*v)) {
      cfg.lr_decay.milestones.push_back(parse_number<Iteration>("lr_decay.milestones", item));
    }
  }
  num("lr_decay.factor", cfg.lr_decay.factor);
  integer("epoch_length", cfg.epoch_length);

  auto& o = cfg.oracle;
  if (auto v = get("oracle.kind")) o.kind = oracle_kind_from_string(*v);
  integer("oracle.dim", o.dim);
  num("oracle.sigma", o.sigma);
  integer("oracle.seed", o.seed);
  if (auto v = get("oracle.grad_bound")) o.grad_bound = parse_number<double>("oracle.grad_bound", *v);
  num("oracle.eig_min", o.eig_min);
  num("oracle.eig_max", o.eig_max);
  num("oracle.minimizer_scale", o.minimizer_scale);
  integer("oracle.n_samples", o.n_samples);
  integer("oracle.n_test", o.n_test);
  integer("oracle.batch_size", o.batch_size);
  num("oracle.separation", o.separation);
  num("oracle.spread", o.spread);
  if (auto v = get("oracle.data_csv")) o.data_csv = *v;

  if (auto v = get("init.point")) cfg.init_point = *v;
  num("init.scale", cfg.init_scale);
  if (auto v = get("strict_alpha_cap")) cfg.strict_alpha_cap = parse_bool("strict_alpha_cap", *v);

  for (const auto& key : sweep_order) {
    const std::string param = key.substr(std::char_traits<char>::length(kSweepPrefix));
    std::vector<double> values;
    for (const auto& item : split_list(*get(key))) values.push_back(parse_number<double>(key, item));
    cfg.sweep_grid.emplace_back(param, std::move(values));
  }
  integer("sweep.max_points", cfg.sweep_max_points);
  if (auto v = get("rate_curve.N")) {
    for (const auto& item : split_list(*v)) {
      cfg.rate_curve_N.push_back(parse_number<Iteration>("rate_curve.N", item));
    }
  }
  num("equivalence.tol", cfg.equivalence_tol);
  num("audit.delta_prime", cfg.audit_delta_prime);

  for (const auto& [key, value] : kv) {
    if (!used.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  c.d = o.dim;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  auto kv = [&os](const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; };
  auto d = [](double x) { return format_double(x); };
  const auto& c = cfg.coefficients;
  const auto& o = cfg.oracle;

  kv("optimizer", to_string(cfg.optimizer));
  kv("n_iters", std::to_string(cfg.n_iters));
  kv("n_runs", std::to_string(cfg.n_runs));
  kv("base_seed", std::to_string(cfg.base_seed));
  kv("output_dir", cfg.output_dir);
  os << '\n';
  kv("M", d(c.M));
  kv("mu", d(c.mu));
  kv("nu", d(c.nu));
  kv("gamma_tilde", d(c.gamma_tilde));
  kv("beta2", d(c.beta2));
  kv("epsilon", d(c.epsilon));
  kv("B", d(c.B));
  kv("B_scales_with_dimension", c.B_scales_with_dimension ? "true" : "false");
  kv("beta1", d(cfg.beta1));
  os << '\n';
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantEta>) {
          kv("eta.schedule", "constant");
          kv("eta.value", d(s.value));
        } else if constexpr (std::is_same_v<T, FiniteHorizonEta>) {
          kv("eta.schedule", "finite_horizon");
          kv("eta.C", d(s.C));
          kv("eta.N", std::to_string(s.N));
        } else {
          kv("eta.schedule", "decreasing");
          kv("eta.C", d(s.C));
        }
      },
      c.eta);
  if (!cfg.lr_decay.milestones.empty()) kv("lr_decay.milestones", join(cfg.lr_decay.milestones));
  kv("lr_decay.factor", d(cfg.lr_decay.factor));
  kv("epoch_length", std::to_string(cfg.epoch_length));
  os << '\n';
  kv("oracle.kind", to_string(o.kind));
  kv("oracle.dim", std::to_string(o.dim));
  kv("oracle.sigma", d(o.sigma));
  kv("oracle.seed", std::to_string(o.seed));
  if (o.grad_bound) kv("oracle.grad_bound", d(*o.grad_bound));
  kv("oracle.eig_min", d(o.eig_min));
  kv("oracle.eig_max", d(o.eig_max));
  kv("oracle.minimizer_scale", d(o.minimizer_scale));
  kv("oracle.n_samples", std::to_string(o.n_samples));
  kv("oracle.n_test", std::to_string(o.n_test));
  kv("oracle.batch_size", std::to_string(o.batch_size));
  kv("oracle.separation", d(o.separation));
  kv("oracle.spread", d(o.spread));
  if (!o.data_csv.empty()) kv("oracle.data_csv", o.data_csv);
  os << '\n';
  kv("init.point", cfg.init_point);
  kv("init.scale", d(cfg.init_scale));
  kv("strict_alpha_cap", cfg.strict_alpha_cap ? "true" : "false");
  for (const auto& [key, values] : cfg.sweep_grid) kv(kSweepPrefix + key, join(values));
  kv("sweep.max_points", std::to_string(cfg.sweep_max_points));
  if (!cfg.rate_curve_N.empty()) kv("rate_curve.N", join(cfg.rate_curve_N));
  kv("equivalence.tol", d(cfg.equivalence_tol));
  kv("audit.delta_prime", d(cfg.audit_delta_prime));
  return os.str();
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << serialize_config(cfg);
}

}  // namespace aammsu
