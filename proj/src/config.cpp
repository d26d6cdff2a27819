#include "fvk/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace fvk {

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::ostringstream os;
  os << "configuration invalid:";
  for (const auto& e : errors) os << "\n  " << e;
  return os.str();
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

struct Collector {
  std::vector<std::string> errors;
  void add(int line, const std::string& msg) {
    errors.push_back("line " + std::to_string(line) + ": " + msg);
  }
};

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool parse_int(const std::string& text, int& out) {
  const std::string t = trim(text);
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool parse_u64(const std::string& text, std::uint64_t& out) {
  const std::string t = trim(text);
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

int growth_index(const std::string& key, const std::string& prefix) {
  // prefix_rc with r, c in 1..3
  if (key.size() != prefix.size() + 3 || key.compare(0, prefix.size(), prefix) != 0 ||
      key[prefix.size()] != '_')
    return -1;
  const char r = key[prefix.size() + 1], c = key[prefix.size() + 2];
  if (r < '1' || r > '3' || c < '1' || c > '3') return -1;
  return 3 * (r - '1') + (c - '1');
}

}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& errs)
    : std::runtime_error(join_errors(errs)), errors(errs) {}

ProblemConfig::ProblemConfig() {
  eps_text.fill("0");
  kappa_text.fill("0");
}

ProblemConfig parse_config(const std::string& text) {
  ProblemConfig cfg;
  Collector errors;

  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line_no = 0;

  auto parse_expr_checked = [&](const std::string& value, int line, Expr& out) {
    try {
      out = parse_expr(value);
      return true;
    } catch (const ExprParseError& err) {
      errors.add(line, std::string("unparsable expression '") + value + "': " + err.what());
      return false;
    }
  };

  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.add(line_no, "malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      const bool known = section == "grid" || section == "material" || section == "thickness" ||
                         section == "growth" || section == "solver" || section == "gamma" ||
                         section == "displacement";
      if (!known) errors.add(line_no, "unknown section [" + section + "]");
      if (section == "displacement") cfg.has_displacement = true;
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      errors.add(line_no, "expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      errors.add(line_no, "key '" + key + "' outside any section");
      continue;
    }

    auto bad_number = [&]() { errors.add(line_no, "malformed number for '" + key + "'"); };

    if (section == "grid") {
      if (key == "x_min") { if (!parse_double(value, cfg.x_min)) bad_number(); }
      else if (key == "x_max") { if (!parse_double(value, cfg.x_max)) bad_number(); }
      else if (key == "y_min") { if (!parse_double(value, cfg.y_min)) bad_number(); }
      else if (key == "y_max") { if (!parse_double(value, cfg.y_max)) bad_number(); }
      else if (key == "nx") { if (!parse_int(value, cfg.nx)) bad_number(); }
      else if (key == "ny") { if (!parse_int(value, cfg.ny)) bad_number(); }
      else errors.add(line_no, "unknown key '" + key + "' in [grid]");
    } else if (section == "material") {
      if (key == "mu") { if (!parse_double(value, cfg.mu)) bad_number(); }
      else if (key == "lambda") { if (!parse_double(value, cfg.lambda)) bad_number(); }
      else errors.add(line_no, "unknown key '" + key + "' in [material]");
    } else if (section == "thickness") {
      if (key == "g1") {
        if (parse_expr_checked(value, line_no, cfg.g1)) cfg.g1_text = value;
      } else if (key == "g2") {
        if (parse_expr_checked(value, line_no, cfg.g2)) cfg.g2_text = value;
      } else {
        errors.add(line_no, "unknown key '" + key + "' in [thickness]");
      }
    } else if (section == "growth") {
      int idx = growth_index(key, "eps");
      if (idx >= 0) {
        if (parse_expr_checked(value, line_no, cfg.eps[idx])) cfg.eps_text[idx] = value;
        continue;
      }
      idx = growth_index(key, "kappa");
      if (idx >= 0) {
        if (parse_expr_checked(value, line_no, cfg.kappa[idx])) cfg.kappa_text[idx] = value;
        continue;
      }
      errors.add(line_no, "unknown key '" + key + "' in [growth]");
    } else if (section == "solver") {
      if (key == "max_iters") { if (!parse_int(value, cfg.solver.max_iters)) bad_number(); }
      else if (key == "grad_tol") { if (!parse_double(value, cfg.solver.grad_tol)) bad_number(); }
      else if (key == "memory") { if (!parse_int(value, cfg.solver.memory)) bad_number(); }
      else if (key == "armijo_c") { if (!parse_double(value, cfg.solver.armijo_c)) bad_number(); }
      else if (key == "backtrack") { if (!parse_double(value, cfg.solver.backtrack)) bad_number(); }
      else if (key == "seed") { if (!parse_u64(value, cfg.solver.seed)) bad_number(); }
      else if (key == "init_amplitude") {
        if (!parse_double(value, cfg.solver.init_amplitude)) bad_number();
      } else if (key == "stationarity_tests") {
        if (!parse_int(value, cfg.solver.n_stationarity_tests)) bad_number();
      } else {
        errors.add(line_no, "unknown key '" + key + "' in [solver]");
      }
    } else if (section == "gamma") {
      if (key == "h_list") {
        std::vector<double> hs;
        std::istringstream hs_in(value);
        std::string item;
        bool ok = true;
        while (std::getline(hs_in, item, ',')) {
          double h;
          if (!parse_double(item, h)) {
            ok = false;
            break;
          }
          hs.push_back(h);
        }
        if (!ok || hs.empty()) {
          errors.add(line_no, "malformed h_list (expect comma-separated positive numbers)");
        } else {
          cfg.h_list = hs;
        }
      } else if (key == "n_inplane") { if (!parse_int(value, cfg.n_inplane)) bad_number(); }
      else if (key == "n_thickness") { if (!parse_int(value, cfg.n_thickness)) bad_number(); }
      else if (key == "n_reference") { if (!parse_int(value, cfg.n_reference)) bad_number(); }
      else errors.add(line_no, "unknown key '" + key + "' in [gamma]");
    } else if (section == "displacement") {
      if (key == "w1") {
        if (parse_expr_checked(value, line_no, cfg.w_expr[0])) cfg.w1_text = value;
      } else if (key == "w2") {
        if (parse_expr_checked(value, line_no, cfg.w_expr[1])) cfg.w2_text = value;
      } else if (key == "v") {
        if (parse_expr_checked(value, line_no, cfg.v_expr)) cfg.v_text = value;
      } else {
        errors.add(line_no, "unknown key '" + key + "' in [displacement]");
      }
    }
  }

  // Semantic validation once the text level is clean.
  if (errors.errors.empty()) {
    if (!(cfg.x_min < cfg.x_max) || !(cfg.y_min < cfg.y_max))
      errors.add(0, "grid bounds must satisfy x_min < x_max and y_min < y_max");
    if (cfg.nx < 5 || cfg.ny < 5) errors.add(0, "grid needs nx, ny >= 5");
    if (!(cfg.mu > 0.0)) errors.add(0, "material mu must be positive");
    if (cfg.lambda < 0.0) errors.add(0, "material lambda must be nonnegative");
    try {
      cfg.solver.validate();
    } catch (const std::invalid_argument& err) {
      errors.add(0, err.what());
    }
    for (std::size_t k = 0; k + 1 < cfg.h_list.size(); ++k)
      if (!(cfg.h_list[k] > cfg.h_list[k + 1]))
        errors.add(0, "gamma h_list must be strictly decreasing");
    for (double h : cfg.h_list)
      if (!(h > 0.0)) errors.add(0, "gamma h_list entries must be positive");
    if (cfg.n_thickness < 2 || cfg.n_inplane < 2)
      errors.add(0, "gamma quadrature orders must be at least 2");
    if (cfg.n_reference < 5) errors.add(0, "gamma n_reference must be at least 5");
  }
  if (errors.errors.empty()) {
    const Grid2D grid(cfg.x_min, cfg.x_max, cfg.y_min, cfg.y_max, cfg.nx, cfg.ny);
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        if (!(cfg.g1.eval(grid.x(i), grid.y(j)) > 0.0) ||
            !(cfg.g2.eval(grid.x(i), grid.y(j)) > 0.0)) {
          errors.add(0, "thickness must be positive on the grid");
          j = grid.ny;  // one report is enough
          break;
        }
      }
  }

  if (!errors.errors.empty()) throw ConfigError(errors.errors);

  cfg.eps_is_zero = true;
  cfg.kappa_is_zero = true;
  for (int k = 0; k < 9; ++k) {
    if (!cfg.eps[k].is_constant(0.0)) cfg.eps_is_zero = false;
    if (!cfg.kappa[k].is_constant(0.0)) cfg.kappa_is_zero = false;
  }
  return cfg;
}

ProblemConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return parse_config(buffer.str());
}

std::string echo_config(const ProblemConfig& cfg) {
  std::ostringstream os;
  os << "[grid]\n";
  os << "x_min = " << format_double(cfg.x_min) << "\n";
  os << "x_max = " << format_double(cfg.x_max) << "\n";
  os << "y_min = " << format_double(cfg.y_min) << "\n";
  os << "y_max = " << format_double(cfg.y_max) << "\n";
  os << "nx = " << cfg.nx << "\n";
  os << "ny = " << cfg.ny << "\n\n";
  os << "[material]\n";
  os << "mu = " << format_double(cfg.mu) << "\n";
  os << "lambda = " << format_double(cfg.lambda) << "\n\n";
  os << "[thickness]\n";
  os << "g1 = " << cfg.g1.to_string() << "\n";
  os << "g2 = " << cfg.g2.to_string() << "\n\n";
  os << "[growth]\n";
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      os << "eps_" << (r + 1) << (c + 1) << " = " << cfg.eps[3 * r + c].to_string() << "\n";
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      os << "kappa_" << (r + 1) << (c + 1) << " = " << cfg.kappa[3 * r + c].to_string() << "\n";
  os << "\n[solver]\n";
  os << "max_iters = " << cfg.solver.max_iters << "\n";
  os << "grad_tol = " << format_double(cfg.solver.grad_tol) << "\n";
  os << "memory = " << cfg.solver.memory << "\n";
  os << "armijo_c = " << format_double(cfg.solver.armijo_c) << "\n";
  os << "backtrack = " << format_double(cfg.solver.backtrack) << "\n";
  os << "seed = " << cfg.solver.seed << "\n";
  os << "init_amplitude = " << format_double(cfg.solver.init_amplitude) << "\n";
  os << "stationarity_tests = " << cfg.solver.n_stationarity_tests << "\n\n";
  os << "[gamma]\n";
  os << "h_list = ";
  for (std::size_t k = 0; k < cfg.h_list.size(); ++k)
    os << (k ? ", " : "") << format_double(cfg.h_list[k]);
  os << "\n";
  os << "n_inplane = " << cfg.n_inplane << "\n";
  os << "n_thickness = " << cfg.n_thickness << "\n";
  os << "n_reference = " << cfg.n_reference << "\n";
  if (cfg.has_displacement) {
    os << "\n[displacement]\n";
    os << "w1 = " << cfg.w_expr[0].to_string() << "\n";
    os << "w2 = " << cfg.w_expr[1].to_string() << "\n";
    os << "v = " << cfg.v_expr.to_string() << "\n";
  }
  return os.str();
}

Grid2D make_grid(const ProblemConfig& cfg) {
  return Grid2D(cfg.x_min, cfg.x_max, cfg.y_min, cfg.y_max, cfg.nx, cfg.ny);
}

PlateProblem make_problem(const ProblemConfig& cfg) {
  ThicknessPair thick{cfg.g1, cfg.g2};
  GrowthTensor growth{cfg.eps, cfg.kappa};
  return PlateProblem(make_grid(cfg), LameMaterial(cfg.mu, cfg.lambda), thick, growth);
}

AnalyticDisplacement make_displacement(const ProblemConfig& cfg) {
  return AnalyticDisplacement{cfg.w_expr, cfg.v_expr};
}

}  // namespace fvk
