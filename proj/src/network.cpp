#include "svcplan/network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

#include "svcplan/errors.hpp"

namespace svcplan {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Line {
  int number;
  std::string text;
};

std::vector<Line> split_lines(const std::string& text) {
  std::vector<Line> out;
  std::string cur;
  int n = 1;
  for (char ch : text) {
    if (ch == '\n') {
      out.push_back({n++, cur});
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back({n, cur});
  return out;
}

void strip_comment(std::string& s) {
  auto pos = s.find('%');
  if (pos != std::string::npos) s.erase(pos);
}

bool parse_number(const std::string& tok, double& out) {
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end && *end == '\0' && end != tok.c_str();
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ParseError("line " + std::to_string(line) + ": " + what);
}

// numeric rows of one `mpc.<name> = [ ... ];` block
std::vector<std::pair<int, std::vector<double>>> read_matrix(
    const std::vector<Line>& lines, std::size_t& i) {
  std::vector<std::pair<int, std::vector<double>>> rows;
  for (; i < lines.size(); ++i) {
    std::string s = lines[i].text;
    strip_comment(s);
    bool done = false;
    auto close = s.find(']');
    if (close != std::string::npos) {
      s.erase(close);
      done = true;
    }
    std::replace(s.begin(), s.end(), ';', ' ');
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::vector<double> row;
    std::string tok;
    while (is >> tok) {
      double v;
      if (!parse_number(tok, v)) fail(lines[i].number, "bad number '" + tok + "'");
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back({lines[i].number, row});
    if (done) return rows;
  }
  throw ParseError("unterminated matrix block");
}

void check(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

int NetworkCase::bus_ordinal(int bus_id) const {
  for (std::size_t i = 0; i < buses.size(); ++i)
    if (buses[i].id == bus_id) return static_cast<int>(i);
  return -1;
}

double NetworkCase::total_load_p() const {
  double t = 0.0;
  for (const Load& d : loads) t += d.p_base;
  return t;
}

double NetworkCase::total_load_q() const {
  double t = 0.0;
  for (const Load& d : loads) t += d.q_base;
  return t;
}

NetworkCase parse_case(const std::string& text) {
  NetworkCase c;
  bool saw_base = false, saw_bus = false, saw_gen = false, saw_branch = false;

  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string s = lines[i].text;
    strip_comment(s);
    auto eq = s.find('=');
    if (eq == std::string::npos) continue;
    std::string name = s.substr(0, eq);
    name.erase(std::remove_if(name.begin(), name.end(),
                              [](unsigned char ch) { return std::isspace(ch); }),
               name.end());

    if (name == "mpc.baseMVA") {
      std::string v = s.substr(eq + 1);
      std::erase(v, ';');
      std::erase(v, ' ');
      if (!parse_number(v, c.base_mva) || c.base_mva <= 0.0)
        fail(lines[i].number, "bad baseMVA");
      saw_base = true;
      continue;
    }
    if (name != "mpc.bus" && name != "mpc.gen" && name != "mpc.branch") continue;

    // matrix may start on this line after '['
    auto open = s.find('[', eq);
    if (open == std::string::npos) fail(lines[i].number, "expected '['");
    std::size_t j = i;
    lines[j].text = s.substr(open + 1);
    auto rows = read_matrix(lines, j);
    i = j;

    if (name == "mpc.bus") {
      saw_bus = true;
      for (auto& [ln, r] : rows) {
        if (r.size() < 13) fail(ln, "bus row needs 13 columns");
        Bus b;
        b.id = static_cast<int>(r[0]);
        if (r[4] != 0.0) fail(ln, "bus shunt conductance unsupported");
        b.shunt_b = r[5];  // filled after baseMVA check below
        b.v_max = r[11];
        b.v_min = r[12];
        c.buses.push_back(b);
        if (r[2] != 0.0 || r[3] != 0.0)
          c.loads.push_back({b.id, r[2], r[3]});
      }
    } else if (name == "mpc.gen") {
      saw_gen = true;
      for (auto& [ln, r] : rows) {
        if (r.size() < 10) fail(ln, "gen row needs 10 columns");
        if (r[7] <= 0.0) continue;  // out of service
        Generator g;
        g.bus = static_cast<int>(r[0]);
        g.q_max = r[3];
        g.q_min = r[4];
        g.p_max = r[8];
        g.p_min = r[9];
        c.generators.push_back(g);
      }
    } else {
      saw_branch = true;
      for (auto& [ln, r] : rows) {
        if (r.size() < 11) fail(ln, "branch row needs 11 columns");
        if (r[10] <= 0.0) continue;  // out of service
        Branch k;
        k.from_bus = static_cast<int>(r[0]);
        k.to_bus = static_cast<int>(r[1]);
        k.r = r[2];
        k.x = r[3];
        k.b_ch = r[4];
        k.s_max = r[5];
        k.tau = r[8] == 0.0 ? 1.0 : r[8];
        k.theta_ps = r[9] * kPi / 180.0;
        c.branches.push_back(k);
      }
    }
  }

  if (!saw_base) throw ParseError("missing mpc.baseMVA");
  if (!saw_bus) throw ParseError("missing mpc.bus");
  if (!saw_gen) throw ParseError("missing mpc.gen");
  if (!saw_branch) throw ParseError("missing mpc.branch");

  // to per-unit
  for (Bus& b : c.buses) b.shunt_b /= c.base_mva;
  for (Load& d : c.loads) {
    d.p_base /= c.base_mva;
    d.q_base /= c.base_mva;
  }
  for (Generator& g : c.generators) {
    g.p_min /= c.base_mva;
    g.p_max /= c.base_mva;
    g.q_min /= c.base_mva;
    g.q_max /= c.base_mva;
  }
  for (Branch& k : c.branches) k.s_max /= c.base_mva;

  // invariants
  std::set<int> ids;
  for (const Bus& b : c.buses) {
    check(ids.insert(b.id).second,
          "duplicate bus id " + std::to_string(b.id));
    check(b.v_min > 0.0 && b.v_min < b.v_max,
          "bus " + std::to_string(b.id) + ": need 0 < v_min < v_max");
  }
  for (const Branch& k : c.branches) {
    std::string tag = "branch " + std::to_string(k.from_bus) + "-" +
                      std::to_string(k.to_bus);
    check(ids.count(k.from_bus) && ids.count(k.to_bus),
          tag + ": dangling bus reference");
    check(k.from_bus != k.to_bus, tag + ": self loop");
    check(k.x > 0.0, tag + ": reactance must be positive");
    check(k.r >= 0.0, tag + ": negative resistance");
    check(k.tau > 0.0, tag + ": tap must be positive");
    check(k.s_max >= 0.0, tag + ": negative rating");
  }
  for (const Generator& g : c.generators) {
    check(ids.count(g.bus),
          "generator at nonexistent bus " + std::to_string(g.bus));
    check(g.p_min <= g.p_max && g.q_min <= g.q_max,
          "generator at bus " + std::to_string(g.bus) + ": crossed limits");
  }
  for (const Load& d : c.loads)
    check(ids.count(d.bus), "load at nonexistent bus " + std::to_string(d.bus));

  // connectivity
  check(!c.buses.empty(), "empty bus table");
  std::unordered_map<int, std::vector<int>> adj;
  for (const Branch& k : c.branches) {
    adj[k.from_bus].push_back(k.to_bus);
    adj[k.to_bus].push_back(k.from_bus);
  }
  std::set<int> seen;
  std::queue<int> q;
  q.push(c.buses.front().id);
  seen.insert(c.buses.front().id);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (seen.insert(v).second) q.push(v);
  }
  check(seen.size() == c.buses.size(), "network graph is not connected");

  // candidate flags: every bus without a generator
  for (Bus& b : c.buses) {
    b.is_candidate = std::none_of(
        c.generators.begin(), c.generators.end(),
        [&](const Generator& g) { return g.bus == b.id; });
  }
  return c;
}

NetworkCase load_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open case file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_case(buf.str());
}

namespace {

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Emits a file value that reparses to exactly `stored` once the parser
// applies its conversion (per-unit division, or degrees to radians).
template <class F>
std::string exact_inverse(double stored, double guess, F apply) {
  if (apply(guess) == stored) return num17(guess);
  double lo = guess, hi = guess;
  for (int i = 0; i < 16; ++i) {
    lo = std::nextafter(lo, -1e308);
    hi = std::nextafter(hi, 1e308);
    if (apply(lo) == stored) return num17(lo);
    if (apply(hi) == stored) return num17(hi);
  }
  return num17(guess);
}

}  // namespace

std::string serialize_case(const NetworkCase& c) {
  std::ostringstream os;
  const double base = c.base_mva;
  auto exact_scaled = [base](double stored) {
    return exact_inverse(stored, stored * base,
                         [base](double v) { return v / base; });
  };
  auto exact_deg = [](double stored) {
    return exact_inverse(stored, stored * 180.0 / kPi,
                         [](double v) { return v * kPi / 180.0; });
  };
  os << "function mpc = case_export\n";
  os << "mpc.version = '2';\n";
  os << "mpc.baseMVA = " << num17(base) << ";\n";
  os << "mpc.bus = [\n";
  for (const Bus& b : c.buses) {
    double pd = 0.0, qd = 0.0;
    for (const Load& d : c.loads)
      if (d.bus == b.id) {
        pd += d.p_base;
        qd += d.q_base;
      }
    os << "\t" << b.id << "\t1\t" << exact_scaled(pd) << "\t"
       << exact_scaled(qd) << "\t0\t" << exact_scaled(b.shunt_b)
       << "\t1\t1\t0\t135\t1\t" << num17(b.v_max) << "\t" << num17(b.v_min)
       << ";\n";
  }
  os << "];\n";
  os << "mpc.gen = [\n";
  for (const Generator& g : c.generators) {
    os << "\t" << g.bus << "\t0\t0\t" << exact_scaled(g.q_max) << "\t"
       << exact_scaled(g.q_min) << "\t1\t" << num17(base) << "\t1\t"
       << exact_scaled(g.p_max) << "\t" << exact_scaled(g.p_min)
       << ";\n";
  }
  os << "];\n";
  os << "mpc.branch = [\n";
  for (const Branch& k : c.branches) {
    os << "\t" << k.from_bus << "\t" << k.to_bus << "\t" << num17(k.r) << "\t"
       << num17(k.x) << "\t" << num17(k.b_ch) << "\t"
       << exact_scaled(k.s_max) << "\t0\t0\t"
       << num17(k.tau == 1.0 ? 0.0 : k.tau) << "\t"
       << exact_deg(k.theta_ps) << "\t1;\n";
  }
  os << "];\n";
  return os.str();
}

ScenarioSet build_scenarios(const std::vector<std::pair<double, double>>& rows) {
  check(!rows.empty(), "empty scenario table");
  ScenarioSet set;
  double total = 0.0;
  for (auto& [rho, lambda] : rows) {
    check(rho >= 0.0 && rho <= 1.0, "scenario probability outside [0,1]");
    check(lambda > 0.0, "scenario load factor must be positive");
    total += rho;
    set.scenarios.push_back({rho, lambda});
  }
  check(std::abs(total - 1.0) <= 1e-6,
        "scenario probabilities sum to " + std::to_string(total));
  return set;
}

ScenarioSet parse_scenarios_csv(const std::string& text) {
  auto lines = split_lines(text);
  std::vector<std::pair<double, double>> rows;
  bool header_seen = false;
  for (auto& [n, raw] : lines) {
    std::string s = raw;
    if (!s.empty() && s.back() == '\r') s.pop_back();
    if (s.empty()) continue;
    if (!header_seen) {
      std::string h = s;
      std::erase(h, ' ');
      if (h != "rho,lambda") fail(n, "expected header 'rho,lambda'");
      header_seen = true;
      continue;
    }
    auto comma = s.find(',');
    if (comma == std::string::npos) fail(n, "expected 'rho,lambda' row");
    double rho, lambda;
    if (!parse_number(s.substr(0, comma), rho) ||
        !parse_number(s.substr(comma + 1), lambda))
      fail(n, "bad scenario row");
    rows.push_back({rho, lambda});
  }
  if (!header_seen) throw ParseError("empty scenario file");
  return build_scenarios(rows);
}

ScenarioSet load_scenarios(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenarios_csv(buf.str());
}

ScenarioSet builtin_scenarios() {
  static const double rho[] = {0.02, 0.14, 0.04};
  static const double lam[] = {1.00, 0.80, 0.60, 1.10, 0.88, 0.66, 1.21, 0.97,
                               0.73, 1.33, 1.06, 0.77, 1.46, 1.17, 0.87};
  std::vector<std::pair<double, double>> rows;
  for (int i = 0; i < 15; ++i) rows.push_back({rho[i % 3], lam[i]});
  return build_scenarios(rows);
}

std::vector<Load> scale_loads(const NetworkCase& c, const Scenario& s) {
  std::vector<Load> out = c.loads;
  for (Load& d : out) {
    d.p_base *= s.lambda;
    d.q_base *= s.lambda;
  }
  return out;
}

std::vector<int> candidate_buses(const NetworkCase& c) {
  std::vector<int> out;
  for (const Bus& b : c.buses)
    if (b.is_candidate) out.push_back(b.id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> bus_fixed_susceptance(const NetworkCase& c) {
  std::vector<double> b(c.buses.size(), 0.0);
  for (std::size_t i = 0; i < c.buses.size(); ++i) b[i] = c.buses[i].shunt_b;
  for (const Branch& k : c.branches) {
    int f = c.bus_ordinal(k.from_bus);
    int t = c.bus_ordinal(k.to_bus);
    b[f] += 0.5 * k.b_ch / (k.tau * k.tau);
    b[t] += 0.5 * k.b_ch;
  }
  return b;
}

}  // namespace svcplan
