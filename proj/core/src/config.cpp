#include "horolab/experiments.hpp"

#include "horolab/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <sstream>

namespace horolab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Thrown inside setters; the parser adds the location.
struct BadValue {
  std::string message;
};

double to_double(const std::string& s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    throw BadValue{"'" + s + "' is not a finite number"};
  }
  return v;
}

long long to_integer(const std::string& s) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw BadValue{"'" + s + "' is not an integer"};
  return v;
}

std::uint64_t to_unsigned(const std::string& s) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw BadValue{"'" + s + "' is not a non-negative integer"};
  return v;
}

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> v;
  for (const auto& item : split_list(s)) v.push_back(to_double(item));
  if (v.empty()) throw BadValue{"empty list"};
  return v;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s;
}

Vector to_vector(const std::string& s) {
  const auto items = split_list(s);
  Vector v(static_cast<Eigen::Index>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) v(static_cast<Eigen::Index>(i)) = to_double(items[i]);
  return v;
}

// "c_0 c_1 ... : radius -> c_0 c_1 ... : radius [twist value]"
PairingSpec to_pairing(const std::string& s, int dim) {
  const auto arrow = s.find("->");
  if (arrow == std::string::npos) throw BadValue{"expected 'source -> target'"};
  std::string rhs = s.substr(arrow + 2);
  PairingSpec p;
  const auto tw = rhs.find("twist");
  if (tw != std::string::npos) {
    p.twist = to_double(trim(rhs.substr(tw + 5)));
    rhs = rhs.substr(0, tw);
  }
  auto ball = [&](const std::string& part) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) throw BadValue{"ball needs 'centre : radius'"};
    BallSpec b;
    b.center = to_vector(part.substr(0, colon));
    if (b.center.size() > kMaxDim || b.center.size() == 0) throw BadValue{"ball centre has the wrong length"};
    b.radius = to_double(trim(part.substr(colon + 1)));
    return b;
  };
  p.source = ball(s.substr(0, arrow));
  p.target = ball(rhs);
  if (p.source.center.size() != dim || p.target.center.size() != dim) {
    throw BadValue{"ball centres must have " + std::to_string(dim) + " coordinates (set dim first)"};
  }
  return p;
}

std::string format_pairing(const PairingSpec& p) {
  auto ball = [](const BallSpec& b) {
    std::string s;
    for (Eigen::Index i = 0; i < b.center.size(); ++i) s += format_double(b.center(i)) + " ";
    return s + ": " + format_double(b.radius);
  };
  return ball(p.source) + " -> " + ball(p.target) + " twist " + format_double(p.twist);
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
Field int_field(const std::string& key, T ExperimentConfig::*member, long long lo, long long hi) {
  return {key,
          [=](ExperimentConfig& c, const std::string& v) {
            const long long x = to_integer(v);
            if (x < lo || x > hi) {
              throw BadValue{"must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"};
            }
            c.*member = static_cast<T>(x);
          },
          [=](const ExperimentConfig& c) { return std::to_string(c.*member); }};
}

Field positive_field(const std::string& key, double ExperimentConfig::*member) {
  return {key,
          [=](ExperimentConfig& c, const std::string& v) {
            const double x = to_double(v);
            if (!(x > 0.0)) throw BadValue{"must be positive"};
            c.*member = x;
          },
          [=](const ExperimentConfig& c) { return format_double(c.*member); }};
}

Field grid_field(const std::string& key, std::vector<double> ExperimentConfig::*member, double lo,
                 std::size_t min_points) {
  return {key,
          [=](ExperimentConfig& c, const std::string& v) {
            auto x = to_doubles(v);
            if (x.size() < min_points) throw BadValue{"needs at least " + std::to_string(min_points) + " values"};
            for (std::size_t i = 0; i < x.size(); ++i) {
              if (x[i] < lo) throw BadValue{"values must be >= " + format_double(lo)};
              if (i && !(x[i] > x[i - 1])) throw BadValue{"values must increase"};
            }
            c.*member = std::move(x);
          },
          [=](const ExperimentConfig& c) { return join(c.*member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"name", [](ExperimentConfig& c, const std::string& v) { c.name = v; },
                 [](const ExperimentConfig& c) { return c.name; }});
    f.push_back({"seed", [](ExperimentConfig& c, const std::string& v) { c.seed = to_unsigned(v); },
                 [](const ExperimentConfig& c) { return std::to_string(c.seed); }});
    f.push_back(int_field("dim", &ExperimentConfig::dim, 2, 3));
    f.push_back(int_field("group.rank", &ExperimentConfig::rank, 1, 8));
    f.push_back(positive_field("group.radius", &ExperimentConfig::radius));
    f.push_back({"group.pairing",
                 [](ExperimentConfig& c, const std::string& v) { c.pairings.push_back(to_pairing(v, c.dim)); },
                 // Repeated key: canonical_text writes one line per pairing.
                 [](const ExperimentConfig&) { return std::string(); }});
    f.push_back(int_field("group.pingpong_grid", &ExperimentConfig::pingpong_grid, 10, 1000000));
    f.push_back(int_field("exponent.min_length", &ExperimentConfig::exponent_min_length, 1, 12));
    f.push_back(int_field("exponent.max_length", &ExperimentConfig::exponent_max_length, 2, 12));
    f.push_back(positive_field("density.offset", &ExperimentConfig::density_offset));
    f.push_back(int_field("density.length", &ExperimentConfig::density_length, 3, 12));
    f.push_back({"density.conformality_lengths",
                 [](ExperimentConfig& c, const std::string& v) {
                   std::vector<int> lengths;
                   for (const auto& item : split_list(v)) {
                     const long long l = to_integer(item);
                     if (l < 3 || l > 12) throw BadValue{"lengths must lie in [3, 12]"};
                     if (!lengths.empty() && l <= lengths.back()) throw BadValue{"lengths must increase"};
                     lengths.push_back(static_cast<int>(l));
                   }
                   if (lengths.size() < 2) throw BadValue{"needs at least two lengths"};
                   c.conformality_lengths = lengths;
                 },
                 [](const ExperimentConfig& c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.conformality_lengths.size(); ++i) {
                     s += (i ? ", " : "") + std::to_string(c.conformality_lengths[i]);
                   }
                   return s;
                 }});
    f.push_back(int_field("core.limit_length", &ExperimentConfig::core_limit_length, 1, 8));
    f.push_back(positive_field("core.spacing", &ExperimentConfig::core_spacing));
    f.push_back(int_field("psi.count", &ExperimentConfig::psi_count, 1, 64));
    f.push_back(positive_field("psi.t_radius", &ExperimentConfig::psi_t_radius));
    f.push_back(positive_field("psi.p_radius", &ExperimentConfig::psi_p_radius));
    f.push_back(int_field("psi.smoothness", &ExperimentConfig::psi_smoothness, 0, 8));
    f.push_back({"x.flow", [](ExperimentConfig& c, const std::string& v) { c.x_flow = to_double(v); },
                 [](const ExperimentConfig& c) { return format_double(c.x_flow); }});
    f.push_back(int_field("samples.draws", &ExperimentConfig::draws, 1000, 100000000));
    f.push_back(positive_field("shadow.min", &ExperimentConfig::shadow_min));
    f.push_back(positive_field("shadow.max", &ExperimentConfig::shadow_max));
    f.push_back(int_field("shadow.points", &ExperimentConfig::shadow_points, 3, 1000));
    f.push_back(positive_field("friendliness.window", &ExperimentConfig::friendliness_window));
    f.push_back(grid_field("windows.T", &ExperimentConfig::window_T, 1e-6, 3));
    f.push_back(positive_field("windows.resolution", &ExperimentConfig::window_resolution));
    f.push_back(positive_field("windows.conjugation_time", &ExperimentConfig::conjugation_time));
    f.push_back(grid_field("translates.s", &ExperimentConfig::translate_s, 0.0, 3));
    f.push_back(positive_field("translates.f_radius", &ExperimentConfig::translate_f_radius));
    f.push_back(grid_field("mixing.s", &ExperimentConfig::mixing_s, 0.0, 3));
    f.push_back(int_field("dual.density_length", &ExperimentConfig::dual_density_length, 3, 12));
    f.push_back(int_field("dual.time_nodes", &ExperimentConfig::dual_time_nodes, 2, 256));
    f.push_back(int_field("dual.draws", &ExperimentConfig::dual_draws, 1000, 100000000));
    f.push_back(int_field("diophantine.count", &ExperimentConfig::diophantine_count, 1, 100000));
    f.push_back(positive_field("diophantine.epsilon", &ExperimentConfig::diophantine_epsilon));
    f.push_back(positive_field("diophantine.s_max", &ExperimentConfig::diophantine_s_max));
    f.push_back(positive_field("nondivergence.T", &ExperimentConfig::nondivergence_T));
    f.push_back(positive_field("nondivergence.s", &ExperimentConfig::nondivergence_s));
    f.push_back(positive_field("good.window", &ExperimentConfig::good_window));
    f.push_back(positive_field("good.radius", &ExperimentConfig::good_radius));
    f.push_back({"experiments",
                 [](ExperimentConfig& c, const std::string& v) {
                   std::vector<std::string> ids;
                   for (const auto& id : split_list(v)) {
                     if (id == "all") {
                       for (const auto& e : experiment_catalog()) ids.push_back(e.id);
                     } else if (id == "none") {
                       continue;
                     } else if (!is_experiment(id)) {
                       throw BadValue{"unknown experiment '" + id + "' (see list-experiments)"};
                     } else {
                       ids.push_back(id);
                     }
                   }
                   c.experiments = ids;
                 },
                 [](const ExperimentConfig& c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.experiments.size(); ++i) s += (i ? ", " : "") + c.experiments[i];
                   return s;
                 }});
    return f;
  }();
  return table;
}

}  // namespace

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"algebra.identity", 1e-10},        {"algebra.form", 1e-12},
      {"geometry.cocycle", 1e-8},         {"geometry.ray", 1e-6},
      {"geometry.half_euclidean", 1e-8},  {"geometry.sandwich", 1e-12},
      {"density.scaling", 1e-10},         {"density.basepoint", 0.02},
      {"shadow.slope", 0.1},              {"shadow.lebesgue", 0.02},
      {"friendliness.spread", 2.0},       {"friendliness.alpha", 0.1},
      {"friendliness.doubling", 0.05},    {"windows.inversions", 1.0},
      {"windows.conjugation", 1e-10},     {"translates.consistency", 1e-12},
      {"mixing.sigmas", 3.0},             {"dual.sigmas", 3.0},
      {"good.lebesgue", 0.1},             {"reproducibility.rate", 1e-10},
  };
  return t;
}

double ExperimentConfig::tolerance(const std::string& key) const {
  if (auto it = tolerances.find(key); it != tolerances.end()) return it->second;
  const auto& d = default_tolerances();
  if (auto it = d.find(key); it != d.end()) return it->second;
  throw Error(ErrorCode::invalid_argument, "no tolerance named " + key);
}

ExperimentConfig standard_config() {
  ExperimentConfig c;
  c.name = "schottky-n2-standard";
  c.seed = 20240611;
  for (const auto& e : experiment_catalog()) c.experiments.push_back(e.id);
  return c;
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig c;
  c.experiments.clear();
  std::set<std::string> seen;
  std::string raw;
  int line_no = 0;
  auto fail = [&](const std::string& key, const std::string& msg) -> Error {
    return Error(ErrorCode::invalid_config,
                 source + ":" + std::to_string(line_no) + (key.empty() ? "" : ": field '" + key + "'") + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw fail("", "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw fail("", "missing key");
    if (value.empty()) throw fail(key, "missing value");
    if (key != "group.pairing" && !seen.insert(key).second) throw fail(key, "given twice");
    try {
      if (key.rfind("tolerance.", 0) == 0) {
        const std::string name = key.substr(10);
        if (!default_tolerances().count(name)) throw BadValue{"unknown tolerance"};
        const double v = to_double(value);
        if (!(v >= 0.0)) throw BadValue{"must be non-negative"};
        c.tolerances[name] = v;
        continue;
      }
      const auto& table = fields();
      const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
      if (it == table.end()) throw BadValue{"unknown key"};
      it->set(c, value);
    } catch (const BadValue& bad) {
      throw fail(key, bad.message);
    }
  }

  line_no = 0;
  const bool explicit_group = !c.pairings.empty();
  if (explicit_group && (seen.count("group.rank") || seen.count("group.radius"))) {
    throw fail("group.pairing", "give either group.rank/group.radius or group.pairing lines, not both");
  }
  if (explicit_group) {
    c.rank = 0;
    c.radius = 0.0;
    for (const auto& p : c.pairings) {
      if (p.source.center.size() != c.dim || p.target.center.size() != c.dim) {
        throw fail("group.pairing", "ball centres must have dim coordinates");
      }
    }
  }
  // The H^3 core is a surface-filling cloud; a coarser spacing keeps it small.
  if (c.dim == 3 && !seen.count("core.spacing")) c.core_spacing = 0.25;
  if (c.exponent_min_length >= c.exponent_max_length) {
    throw fail("exponent.max_length", "must exceed exponent.min_length");
  }
  if (!(c.shadow_max > c.shadow_min)) throw fail("shadow.max", "must exceed shadow.min");
  if (!(c.translate_f_radius < 1.0)) throw fail("translates.f_radius", "must be below 1");
  if (!(c.good_radius <= c.good_window)) throw fail("good.radius", "must not exceed good.window");
  if (!(c.diophantine_epsilon < 1.0)) throw fail("diophantine.epsilon", "must lie in (0, 1)");
  if (!(c.nondivergence_s >= 1.0)) throw fail("nondivergence.s", "must be at least 1");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot read config " + path);
  return parse_config(in, path);
}

std::string canonical_text(const ExperimentConfig& config) {
  std::string s;
  for (const auto& f : fields()) {
    if (f.key == "seed") continue;
    if (f.key == "group.pairing") {
      for (const auto& p : config.pairings) s += f.key + " = " + format_pairing(p) + "\n";
      continue;
    }
    if ((f.key == "group.rank" || f.key == "group.radius") && !config.pairings.empty()) continue;
    s += f.key + " = " + f.get(config) + "\n";
  }
  for (const auto& [k, v] : config.tolerances) s += "tolerance." + k + " = " + format_double(v) + "\n";
  return s;
}

std::string config_hash(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(stream_id(canonical_text(config))));
  return buf;
}

}  // namespace horolab
