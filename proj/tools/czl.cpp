// czl: command-line front end over the header-only library.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "czl/czl.hpp"

namespace {

using nlohmann::json;
using namespace czl;

// Malformed command-line input; exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string cone = "orthant_1";
  std::string s;
  std::string f = "gaussian";
  std::string side = "primal";
  std::string graph;
  std::string out;
  int nodes = 0;
  long mc_samples = 0;
  std::uint64_t seed = 7;
  double tol = 0.0;
  int threads = 1;
  int r = 3;
  int trials = 0;
};

json error_document(const json& err) {
  return {{"schema_version", kSchemaVersion}, {"kind", "error"}, {"pass", false}, {"error", err}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void write_document(const json& doc, const std::string& out) {
  const std::string text = doc.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw IoError("cannot open " + out + " for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("write to " + out + " failed");
}

// Catalog name, or a path to a cone JSON document.
ConeModel resolve_cone(const std::string& spec) {
  const bool looks_like_file = spec.find('/') != std::string::npos || spec.ends_with(".json");
  if (looks_like_file || std::filesystem::exists(spec)) {
    try {
      return cone_from_json(read_json_file(spec));
    } catch (const json::exception& e) {
      throw UsageError(spec + ": " + e.what());
    } catch (const DomainError& e) {
      throw UsageError(spec + ": " + e.what());
    }
  }
  try {
    return load_catalog_cone(spec);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

cplx parse_complex(std::string tok) {
  tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
  static const std::string num = R"([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)";
  static const std::regex real_only("^(" + num + ")$");
  static const std::regex imag_only("^([+-]?(?:\\d+\\.?\\d*|\\.\\d+)?(?:[eE][+-]?\\d+)?)i$");
  static const std::regex both("^(" + num + ")([+-](?:\\d+\\.?\\d*|\\.\\d+)?(?:[eE][+-]?\\d+)?)i$");
  std::smatch m;
  auto imag_part = [](std::string v) {
    if (v.empty() || v == "+") return 1.0;
    if (v == "-") return -1.0;
    return std::stod(v);
  };
  if (std::regex_match(tok, m, real_only)) return {std::stod(m[1]), 0.0};
  if (std::regex_match(tok, m, both)) return {std::stod(m[1]), imag_part(m[2])};
  if (std::regex_match(tok, m, imag_only)) return {0.0, imag_part(m[1])};
  throw UsageError("cannot parse complex number '" + tok + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto at = s.find(sep, pos);
    out.push_back(s.substr(pos, at == std::string::npos ? std::string::npos : at - pos));
    if (at == std::string::npos) break;
    pos = at + 1;
  }
  return out;
}

// "a,b,c" is one point; points are separated by ';'.
std::vector<CVec> parse_points(const std::string& s, int rank) {
  std::vector<CVec> pts;
  for (auto& p : split(s, ';')) {
    CVec v;
    for (auto& c : split(p, ',')) v.push_back(parse_complex(c));
    if (static_cast<int>(v.size()) != rank)
      throw UsageError("--s point has " + std::to_string(v.size()) + " components, cone rank is " +
                       std::to_string(rank));
    pts.push_back(v);
  }
  return pts;
}

QuadratureSpec quad_from(const Options& o) {
  QuadratureSpec q;
  q.seed = o.seed;
  q.nodes_per_axis = o.nodes;
  q.target_tol = o.tol;
  q.threads = o.threads;
  if (o.mc_samples > 0) {
    q.scheme = QuadratureSpec::Scheme::monte_carlo;
    q.mc_samples = o.mc_samples;
  }
  return q;
}

Side parse_side(const std::string& s) {
  if (s == "primal") return Side::primal;
  if (s == "dual") return Side::dual;
  throw UsageError("--side must be primal or dual");
}

json check_document(const std::string& id, const std::vector<VerificationReport>& reports) {
  json arr = json::array();
  bool pass = !reports.empty();
  for (auto& r : reports) {
    arr.push_back(to_json(r));
    pass = pass && r.pass;
  }
  return {{"schema_version", kSchemaVersion}, {"kind", "check"}, {"check_id", id}, {"pass", pass}, {"reports", arr}};
}

json order_json(const OrderMap& m, int r) {
  json out = json::array();
  for (auto idx : m.order) out.push_back(parity_from_index(idx, r));
  return out;
}

std::vector<std::string> invariant_formulas(const ConeModel& c, Side side) {
  const int r = c.rank();
  std::vector<std::string> out;
  auto x = [](int j) { return "x" + std::to_string(j); };
  auto X = [](int k) { return "|X" + std::to_string(k) + "1|^2"; };
  if (c.family == Family::orthant) {
    for (int j = 1; j <= r; ++j) out.push_back(x(j));
    return out;
  }
  if (side == Side::primal) {
    out.push_back(x(1));
    for (int k = 2; k <= r; ++k) out.push_back(x(1) + " " + x(k) + " - " + X(k));
    return out;
  }
  std::string first = x(1);
  for (int k = 2; k <= r; ++k) first += " " + x(k);
  for (int k = 2; k <= r; ++k) {
    first += " - " + X(k);
    for (int l = 2; l <= r; ++l)
      if (l != k) first += " " + x(l);
  }
  out.push_back(first);
  for (int k = 2; k <= r; ++k) out.push_back(x(k));
  return out;
}

json describe_document(const ConeModel& c) {
  const auto& s = c.structure;
  const int r = c.rank();
  json dims = json::array();
  for (int k = 0; k < r; ++k)
    for (int j = 0; j < k; ++j) dims.push_back({k + 1, j + 1, s.dims[k][j]});
  const auto m = check_completion_condition(s);
  const auto rev = reversal_conjugation_check(c.sigma, c.sigma_star);
  json d_vec = json::array();
  for (int j = 0; j < r; ++j) d_vec.push_back(s.d(j));
  return {{"schema_version", kSchemaVersion},
          {"kind", "describe"},
          {"pass", true},
          {"cone",
           {{"name", c.name},
            {"family", c.family == Family::orthant ? "orthant" : "star"},
            {"rank", r},
            {"dimension", c.dim()},
            {"block_sizes", c.block_sizes},
            {"coordinates", c.coordinates},
            {"gram_scale", c.gram_scale},
            {"dims", dims},
            {"n", s.dims},
            {"p", s.p},
            {"q", s.q},
            {"d", d_vec},
            {"sigma", c.sigma},
            {"sigma_star", c.sigma_star},
            {"m", m ? json(*m) : json("fails")},
            {"order_sigma", order_json(order_map_sigma(c.sigma), r)},
            {"order_sigma_star", order_json(order_map_sigma(c.sigma_star), r)},
            {"reversal", {{"conjugated", rev.conjugated}, {"verdict", rev.equal ? "equal" : "not equal"}}},
            {"invariants", invariant_formulas(c, Side::primal)},
            {"dual_invariants", invariant_formulas(c, Side::dual)},
            {"measure_exponents", {{"primal", c.measure_exponents(Side::primal)},
                                   {"dual", c.measure_exponents(Side::dual)}}},
            {"calibration", {{"primal", c.calibration(Side::primal)}, {"dual", c.calibration(Side::dual)}}}}}};
}

std::vector<VerificationReport> run_fe(const std::string& id, const ConeModel& cone, const Options& o) {
  const auto quad = quad_from(o);
  TestFunction f;
  try {
    f = make_test_function(cone, o.f);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const auto pts = (o.s.empty() || o.s == "auto-strip") ? auto_strip_points(cone, f, o.seed)
                                                        : parse_points(o.s, cone.rank());
  std::vector<VerificationReport> out;
  for (auto& s : pts) {
    const auto d = fe_data(cone, f, s, quad);
    if (id == "fe-raw") out.push_back(verify_raw_fe(cone, d, quad));
    else if (id == "fe-completed") out.push_back(verify_completed_fe(cone, d, quad));
    else out.push_back(verify_distribution_fe(cone, d, quad));
  }
  return out;
}

IMat load_graph(const std::string& path) {
  try {
    return adjacency_from_json(read_json_file(path));
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::vector<VerificationReport> run_check(const std::string& id, const Options& o) {
  const int trials = o.trials;
  if (id == "lemma-diag") {
    if (o.r < 1 || o.r > 12) throw UsageError("--r must be in 1..12");
    return {verify_lemma_diag(o.r, trials > 0 ? trials : 100, o.seed)};
  }
  if (id == "gamma-identity") return {verify_gamma_identity(trials > 0 ? trials : 1000, o.seed)};
  if (id == "graph") {
    if (!o.graph.empty()) {
      const auto label = std::filesystem::path(o.graph).stem().string();
      return {verify_graph(load_graph(o.graph), label)};
    }
    return {verify_graph(detail::graph_k3(), "K3"), verify_graph(detail::graph_p3(), "P3")};
  }
  const auto cone = resolve_cone(o.cone);
  if (id == "half-gamma") return {verify_half_gamma(cone, trials > 0 ? trials : 20, o.seed)};
  if (id == "multiplier") return {multiplier_consistency_check(cone, o.seed, trials > 0 ? trials : 20)};
  if (id == "det-conjecture") {
    if (cone.rank() < 2) throw UsageError("det-conjecture needs a cone of rank >= 2");
    return {check_det_conjecture(cone.structure, trials > 0 ? trials : 20, o.seed, cone.name)};
  }
  if (id == "gindikin") {
    const Side side = parse_side(o.side);
    const auto pts = o.s.empty() ? std::vector<CVec>{default_calibration_point(cone, side, 1.75)}
                                 : parse_points(o.s, cone.rank());
    std::vector<VerificationReport> out;
    for (auto& s : pts) out.push_back(verify_gindikin_identity(cone, s, quad_from(o), side));
    return out;
  }
  if (id == "fe-raw" || id == "fe-completed" || id == "fe-distribution") return run_fe(id, cone, o);
  throw UsageError("unknown check id '" + id + "'");
}

int exit_for(bool pass) { return pass ? 0 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"czl: local zeta functions on homogeneous cones"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
    sub->add_option("--threads", o.threads, "worker threads; results do not depend on it")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "write the JSON document here instead of stdout");
  };
  auto add_quad = [&](CLI::App* sub) {
    sub->add_option("--nodes", o.nodes, "nodes per axis (0: automatic)")->check(CLI::NonNegativeNumber);
    sub->add_option("--mc-samples", o.mc_samples, "Monte Carlo samples; switches Gindikin integrals to Monte Carlo")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--tol", o.tol, "target tolerance (0: tolerance ladder)")->check(CLI::NonNegativeNumber);
  };

  auto* list = app.add_subcommand("list-cones", "catalog cones");
  list->add_option("--out", o.out);

  std::string describe_cone;
  auto* describe = app.add_subcommand("describe", "structure constants of a cone");
  describe->add_option("name", describe_cone, "catalog name or cone JSON file");
  describe->add_option("--cone", o.cone, "catalog name or cone JSON file");
  describe->add_option("--out", o.out);

  std::string check_id;
  auto* check = app.add_subcommand("check", "run one verifier");
  check->add_option("id", check_id, "check id")->required();
  check->add_option("--cone", o.cone, "catalog name or cone JSON file");
  check->add_option("--s", o.s, "points: comma-separated components, ';' between points, or auto-strip");
  check->add_option("--f", o.f, "gaussian | hermite:K | hermite:k1,...,kn | vanishing:D");
  check->add_option("--side", o.side, "primal or dual (gindikin)");
  check->add_option("--graph", o.graph, "graph JSON file (graph check)");
  check->add_option("--r", o.r, "rank (lemma-diag)");
  check->add_option("--trials", o.trials, "trials or sample points");
  add_common(check);
  add_quad(check);

  std::string s1;
  auto* calibrate = app.add_subcommand("calibrate", "fix the measure constants from the Gindikin identity");
  calibrate->add_option("--cone", o.cone, "catalog name or cone JSON file");
  calibrate->add_option("--s", o.s, "calibration point");
  calibrate->add_option("--s1", s1, "validation point");
  add_common(calibrate);
  add_quad(calibrate);

  std::string graph_file;
  auto* graph = app.add_subcommand("graph", "cone structure of a chordal A4-free graph");
  graph->add_option("file", graph_file, "graph JSON file")->required();
  graph->add_option("--out", o.out);

  std::string suite_name = "desk";
  auto* suite = app.add_subcommand("suite", "acceptance matrix");
  suite->add_option("name", suite_name, "suite name")->capture_default_str();
  suite->add_flag("--no-runtime", "omit runtime_ms so output is byte-comparable");
  suite->add_flag("--quiet", "no progress lines on stderr");
  add_common(suite);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cout << error_document({{"type", "usage"}, {"message", e.what()}}).dump(2) << "\n";
    std::cerr << "czl: " << e.what() << "\n";
    return 2;
  }

  try {
    json doc;
    int code = 0;
    if (*list) {
      json cones = json::array();
      for (auto& n : catalog_names()) {
        const auto c = load_catalog_cone(n);
        const auto m = check_completion_condition(c.structure);
        cones.push_back({{"name", n}, {"rank", c.rank()}, {"dimension", c.dim()}, {"m", m ? json(*m) : json("fails")}});
      }
      doc = {{"schema_version", kSchemaVersion}, {"kind", "list-cones"}, {"pass", true}, {"cones", cones}};
    } else if (*describe) {
      doc = describe_document(resolve_cone(describe_cone.empty() ? o.cone : describe_cone));
    } else if (*check) {
      const auto reports = run_check(check_id, o);
      doc = check_document(check_id, reports);
      code = exit_for(doc["pass"].get<bool>());
    } else if (*calibrate) {
      const auto cone = resolve_cone(o.cone);
      std::optional<CVec> a, b;
      if (!o.s.empty()) a = parse_points(o.s, cone.rank()).at(0);
      if (!s1.empty()) b = parse_points(s1, cone.rank()).at(0);
      auto res = calibration_report(cone, quad_from(o), a, b);
      doc = check_document("calibrate", {res.report});
      doc["constants"] = {{"primal", *res.cone.c_primal}, {"dual", *res.cone.c_dual}};
      code = exit_for(res.report.pass);
    } else if (*graph) {
      const auto adj = load_graph(graph_file);
      const auto gs = build_structure_from_graph(adj);
      const auto rep = verify_graph(adj, std::filesystem::path(graph_file).stem().string());
      doc = check_document("graph", {rep});
      json dims = json::array();
      for (int k = 0; k < gs.structure.rank; ++k)
        for (int j = 0; j < k; ++j) dims.push_back({k + 1, j + 1, gs.structure.dims[k][j]});
      doc["structure"] = {{"rank", gs.structure.rank}, {"dims", dims}, {"vertex_order", gs.order},
                          {"m", gs.m ? json(*gs.m) : json("fails")}};
      code = exit_for(rep.pass);
    } else if (*suite) {
      if (suite_name != "desk") throw UsageError("unknown suite '" + suite_name + "' (available: desk)");
      // Fail on an unwritable destination before spending minutes on the suite.
      if (!o.out.empty() && o.out != "-") {
        std::ofstream probe(o.out, std::ios::app);
        if (!probe) throw IoError("cannot open " + o.out + " for writing");
      }
      SuiteOptions so;
      so.seed = o.seed;
      so.quad.threads = o.threads;
      if (!suite->get_option("--quiet")->as<bool>())
        so.progress = [](const SuiteEntry& e) {
          std::cerr << (e.pass ? "PASS " : "FAIL ") << "[" << e.criterion << "] " << e.label << "\n";
        };
      const auto res = run_desk_suite(so);
      doc = suite_to_json(res, !suite->get_option("--no-runtime")->as<bool>());
      code = exit_for(res.pass());
    }
    write_document(doc, o.out);
    return code;
  } catch (const UsageError& e) {
    std::cout << error_document({{"type", "usage"}, {"message", e.what()}}).dump(2) << "\n";
    std::cerr << "czl: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cout << error_document({{"type", "io"}, {"message", e.what()}}).dump(2) << "\n";
    std::cerr << "czl: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cout << error_document(error_to_json(e)).dump(2) << "\n";
    std::cerr << "czl: " << e.what() << "\n";
    return 1;
  }
}
