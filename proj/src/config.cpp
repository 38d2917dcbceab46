#include "vemcdr/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "vemcdr/expression.hpp"

namespace vem {

PolygonalMesh build_mesh(const MeshConfig& config, int n_override) {
  const int n = n_override > 0 ? n_override : config.n;
  if (config.family == "squares")
    return generate_distorted_squares(n, config.distortion, config.seed);
  if (config.family == "nonconvex") return generate_nonconvex(n);
  if (config.family == "voronoi") return generate_voronoi(n * n, config.lloyd, config.seed);
  if (config.family == "file") {
    if (n_override > 0)
      throw std::invalid_argument("mesh.family=file cannot be used in a refinement sweep");
    return load_mesh(config.path);
  }
  throw std::invalid_argument("mesh.family: unknown family '" + config.family +
                              "' (valid: squares, nonconvex, voronoi, file)");
}

SolverConfig RunConfig::solver_config(double dt_value) const {
  SolverConfig s;
  s.dt = dt_value;
  s.T = T;
  s.algorithm = algorithm;
  s.tol = tol;
  s.ctol = ctol;
  s.fiter = fiter;
  s.max_iter = max_iter;
  s.species_parallel = species_parallel;
  return s;
}

namespace {

// flat key -> (value, seen flag); section names become "section.key"
class KeyTable {
 public:
  void insert(const std::string& key, const std::string& value, int line) {
    if (entries_.count(key))
      throw std::invalid_argument("config: duplicate key '" + key + "' at line " +
                                  std::to_string(line));
    entries_[key] = value;
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string take(const std::string& key, const std::string& fallback) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    used_.insert(key);
    return it->second;
  }

  std::string require(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end())
      throw std::invalid_argument("config: missing key '" + key + "'");
    used_.insert(key);
    return it->second;
  }

  void check_exhausted() const {
    for (const auto& [key, value] : entries_)
      if (!used_.count(key))
        throw std::invalid_argument("config: unknown key '" + key + "'");
  }

  std::vector<std::string> keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [key, value] : entries_)
      if (key.rfind(prefix, 0) == 0) out.push_back(key);
    return out;
  }

 private:
  std::map<std::string, std::string> entries_;
  std::set<std::string> used_;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& text) {
  // accepts plain numbers and fractions like 1/32
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      const double num = std::stod(trim(text.substr(0, slash)));
      const double den = std::stod(trim(text.substr(slash + 1)));
      return num / den;
    }
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).size())
      throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: " + key + ": cannot parse number '" + text + "'");
  }
}

long parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used, 10);
    if (trim(text.substr(used)).size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: " + key + ": cannot parse integer '" + text + "'");
  }
}

bool parse_flag(const std::string& key, const std::string& text) {
  if (text == "on" || text == "true" || text == "1") return true;
  if (text == "off" || text == "false" || text == "0") return false;
  throw std::invalid_argument("config: " + key + ": expected on/off, got '" + text + "'");
}

std::vector<double> parse_number_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string tok;
  while (ss >> tok) out.push_back(parse_number(key, tok));
  return out;
}

MeshConfig parse_mesh_section(KeyTable& keys, const std::string& section) {
  MeshConfig mc;
  mc.family = keys.take(section + ".family", mc.family);
  mc.n = static_cast<int>(parse_int(section + ".n", keys.take(section + ".n", "8")));
  mc.distortion =
      parse_number(section + ".distortion", keys.take(section + ".distortion", "0.2"));
  mc.seed = static_cast<std::uint64_t>(
      parse_int(section + ".seed", keys.take(section + ".seed", "42")));
  mc.lloyd = static_cast<int>(parse_int(section + ".lloyd", keys.take(section + ".lloyd", "100")));
  mc.path = keys.take(section + ".path", "");
  if (mc.family != "squares" && mc.family != "nonconvex" && mc.family != "voronoi" &&
      mc.family != "file")
    throw std::invalid_argument("config: " + section + ".family: unknown family '" + mc.family +
                                "' (valid: squares, nonconvex, voronoi, file)");
  if (mc.family == "file" && mc.path.empty())
    throw std::invalid_argument("config: " + section + ".path required for family=file");
  if (mc.n < 1) throw std::invalid_argument("config: " + section + ".n must be >= 1");
  if (mc.distortion < 0 || mc.distortion >= 0.5)
    throw std::invalid_argument("config: " + section + ".distortion must be in [0,0.5)");
  return mc;
}

ScalarField field_of(const Expression& e) {
  return [e](double t, double x, double y) { return e.eval(x, y, t); };
}

CoefField coef_of(const std::string& key, const std::string& text) {
  try {
    const Expression e = Expression::parse(text);
    if (e.is_constant()) return CoefField::constant(e.eval(0, 0, 0));
    return CoefField::field(field_of(e));
  } catch (const std::invalid_argument& err) {
    throw std::invalid_argument("config: " + key + ": " + err.what());
  }
}

std::vector<CoefField> parse_matrix(const std::string& key, const std::string& text, int m) {
  std::vector<CoefField> out;
  std::istringstream rows(text);
  std::string row;
  while (std::getline(rows, row, ';')) {
    std::istringstream ss(row);
    std::string tok;
    int in_row = 0;
    while (ss >> tok) {
      out.push_back(CoefField::constant(parse_number(key, tok)));
      ++in_row;
    }
    if (in_row != m)
      throw std::invalid_argument("config: " + key + ": expected " + std::to_string(m) +
                                  " entries per row");
  }
  if (static_cast<int>(out.size()) != m * m)
    throw std::invalid_argument("config: " + key + ": expected " + std::to_string(m) + "x" +
                                std::to_string(m) + " matrix");
  return out;
}

ProblemSpec parse_inline_problem(KeyTable& keys) {
  ProblemSpec p;
  p.name = "inline";
  p.m = static_cast<int>(parse_int("problem.m", keys.require("problem.m")));
  if (p.m < 1 || p.m > 9)
    throw std::invalid_argument("config: problem.m must be in [1,9]");
  p.T = parse_number("problem.T", keys.take("problem.T", "1"));

  for (int i = 1; i <= p.m; ++i)
    p.xi.push_back(coef_of("problem.xi" + std::to_string(i),
                           keys.require("problem.xi" + std::to_string(i))));
  p.omega1 = coef_of("problem.omega1", keys.require("problem.omega1"));
  p.omega2 = coef_of("problem.omega2", keys.require("problem.omega2"));
  p.A = parse_matrix("problem.A", keys.require("problem.A"), p.m);
  p.R = parse_matrix("problem.R", keys.require("problem.R"), p.m);

  // sparse Q entries: problem.Q<i><l><j> = value (1-based indices)
  const auto qkeys = keys.keys_with_prefix("problem.Q");
  if (!qkeys.empty()) {
    p.Q.assign(p.m * p.m * p.m, CoefField::constant(0.0));
    for (const auto& qk : qkeys) {
      const std::string suffix = qk.substr(9);
      if (suffix.size() != 3 || !isdigit(suffix[0]) || !isdigit(suffix[1]) ||
          !isdigit(suffix[2]))
        throw std::invalid_argument("config: " + qk + ": expected problem.Q<i><l><j>");
      const int i = suffix[0] - '1', l = suffix[1] - '1', j = suffix[2] - '1';
      if (i < 0 || i >= p.m || l < 0 || l >= p.m || j < 0 || j >= p.m)
        throw std::invalid_argument("config: " + qk + ": index out of range");
      p.Q[(i * p.m + l) * p.m + j] = coef_of(qk, keys.take(qk, "0"));
    }
  }

  bool any_exact = false;
  for (int i = 1; i <= p.m; ++i)
    if (keys.has("problem.exact" + std::to_string(i))) any_exact = true;

  for (int i = 1; i <= p.m; ++i) {
    const std::string si = std::to_string(i);
    {
      const std::string key = "problem.f" + si;
      const Expression e = Expression::parse(keys.require(key));
      p.forcing.push_back(field_of(e));
    }
    {
      const std::string key = "problem.u0" + si;
      const Expression e = Expression::parse(keys.require(key));
      p.initial.push_back([e](double x, double y) { return e.eval(x, y, 0.0); });
    }
    if (any_exact) {
      const std::string key = "problem.exact" + si;
      const Expression e = Expression::parse(keys.require(key));
      p.exact.push_back(field_of(e));
      p.exact_gx.push_back(field_of(e.derivative('x')));
      p.exact_gy.push_back(field_of(e.derivative('y')));
    }
  }
  // optional Dirichlet data; defaults to the exact trace when given, else zero
  bool any_dirichlet = false;
  for (int i = 1; i <= p.m; ++i)
    if (keys.has("problem.dirichlet" + std::to_string(i))) any_dirichlet = true;
  if (any_dirichlet) {
    for (int i = 1; i <= p.m; ++i) {
      const std::string key = "problem.dirichlet" + std::to_string(i);
      const Expression e = Expression::parse(keys.take(key, "0"));
      p.dirichlet.push_back(field_of(e));
    }
  } else if (any_exact) {
    p.dirichlet = p.exact;
  }
  p.validate();
  return p;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  KeyTable keys;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                    ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    keys.insert(section.empty() ? key : section + "." + key, value, lineno);
  }

  RunConfig cfg;
  cfg.problem_name = keys.take("problem", "");
  cfg.order = static_cast<int>(parse_int("order", keys.take("order", "1")));
  if (cfg.order < 1) throw std::invalid_argument("config: order must be >= 1");

  cfg.mesh = parse_mesh_section(keys, "mesh");
  if (keys.has("coarse.family") || keys.has("coarse.n")) {
    cfg.coarse = parse_mesh_section(keys, "coarse");
    cfg.coarse_set = true;
  } else {
    // consume possible partial keys to keep check_exhausted honest
    cfg.coarse = cfg.mesh;
    cfg.coarse.n = std::max(1, cfg.mesh.n / 2);
  }

  cfg.sweep_h = parse_number_list("sweep.h", keys.take("sweep.h", ""));
  cfg.sweep_dt = parse_number_list("sweep.dt", keys.take("sweep.dt", ""));

  if (keys.has("dt")) {
    cfg.dt = parse_number("dt", keys.take("dt", "0"));
    cfg.dt_set = true;
    if (cfg.dt <= 0) throw std::invalid_argument("config: dt must be positive");
  } else if (cfg.sweep_h.empty() && cfg.sweep_dt.empty()) {
    throw std::invalid_argument("config: missing key 'dt'");
  }

  const std::string alg = keys.take("algorithm", "iteration");
  if (alg == "iteration")
    cfg.algorithm = Algorithm::iteration;
  else if (alg == "twogrid")
    cfg.algorithm = Algorithm::twogrid;
  else
    throw std::invalid_argument("config: algorithm: expected iteration or twogrid, got '" +
                                alg + "'");

  cfg.tol = parse_number("tol", keys.take("tol", "1e-6"));
  cfg.ctol = parse_number("ctol", keys.take("ctol", "1e-3"));
  cfg.fiter = static_cast<int>(parse_int("fiter", keys.take("fiter", "1")));
  cfg.max_iter = static_cast<int>(parse_int("max_iter", keys.take("max_iter", "100")));
  cfg.species_parallel = parse_flag("threads", keys.take("threads", "on"));
  cfg.out = keys.take("out", "report.csv");

  if (!cfg.problem_name.empty()) {
    cfg.problem = problem_by_name(cfg.problem_name);
  } else {
    cfg.problem = parse_inline_problem(keys);
  }
  cfg.T = keys.has("T") ? parse_number("T", keys.take("T", "1")) : cfg.problem.T;
  if (cfg.T <= 0) throw std::invalid_argument("config: T must be positive");
  cfg.problem.T = cfg.T;

  keys.check_exhausted();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void save_default_config(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("config: cannot open " + path + " for writing");
  out << "# vemcdr run configuration\n"
         "problem = example1        # example1 | example2; leave empty for [problem]\n"
         "order = 1                 # VEM order p\n"
         "dt = 1e-3                 # time step; may be omitted when sweep.h is set\n"
         "T = 1                     # final time\n"
         "algorithm = iteration     # iteration | twogrid\n"
         "tol = 1e-6                # Algorithm 1 stopping tolerance\n"
         "ctol = 1e-3               # coarse tolerance (twogrid)\n"
         "fiter = 1                 # fine iterations per step (twogrid)\n"
         "max_iter = 100\n"
         "threads = on              # solve species concurrently\n"
         "out = report.csv\n"
         "\n"
         "[mesh]\n"
         "family = squares          # squares | nonconvex | voronoi | file\n"
         "n = 8                     # cells per side (voronoi: n^2 seeds)\n"
         "distortion = 0.2\n"
         "seed = 42\n"
         "lloyd = 100\n"
         "\n"
         "[coarse]\n"
         "family = squares\n"
         "n = 4\n"
         "distortion = 0.2\n"
         "seed = 42\n"
         "lloyd = 100\n"
         "\n"
         "[sweep]\n"
         "# h = 1/4 1/8 1/16 1/32\n"
         "# dt = 1/5 1/10 1/20 1/40\n";
  if (!out) throw std::runtime_error("config: write failed for " + path);
}

}  // namespace vem
