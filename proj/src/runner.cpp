#include "beq/runner.hpp"

#include "beq/errors.hpp"
#include "beq/trace_io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace beq {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto& [k, v] : j.items()) {
    if (!known.count(k)) config_error("unknown key '" + k + "' in " + where);
  }
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) config_error(what + " must be a number");
  return j.get<double>();
}

Eigen::VectorXd vector_of(const json& j, const std::string& what) {
  if (j.is_number()) return Eigen::VectorXd::Constant(1, j.get<double>());
  if (!j.is_array() || j.empty()) config_error(what + " must be a number or a non-empty array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], what);
  return v;
}

Eigen::MatrixXd matrix_of(const json& j, const std::string& what) {
  if (j.is_number()) return Eigen::MatrixXd::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) config_error(what + " must be a number or an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) config_error(what + " must be an array of rows");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) config_error(what + " has ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)], what);
  }
  return m;
}

Schedule schedule_of(const json& j, const std::string& what) {
  if (j.is_number()) return Schedule::constant(j.get<double>());
  if (!j.is_object()) config_error(what + " must be a number or a schedule object");
  if (j.contains("constant")) {
    reject_unknown(j, {"constant"}, what);
    return Schedule::constant(number(j.at("constant"), what));
  }
  const json& h = j.contains("harmonic") ? j.at("harmonic") : j;
  reject_unknown(h, {"base", "numer", "shift"}, what);
  if (!h.contains("base") || !h.contains("numer") || !h.contains("shift")) {
    config_error(what + " harmonic schedule needs base, numer, shift");
  }
  return Schedule::harmonic(number(h.at("base"), what), number(h.at("numer"), what), number(h.at("shift"), what));
}

Geometry geometry_of(const json& j, Eigen::Index dim) {
  if (j.is_string()) {
    if (j.get<std::string>() == "euclidean") return Geometry::euclidean(dim);
    config_error("unknown geometry '" + j.get<std::string>() + "'");
  }
  reject_unknown(j, {"kind", "p", "c", "identity_tol"}, "geometry");
  const std::string kind = j.value("kind", std::string("euclidean"));
  Geometry g = Geometry::euclidean(dim);
  if (kind == "lp") {
    if (!j.contains("p")) config_error("lp geometry needs p");
    std::optional<double> c;
    if (j.contains("c")) c = number(j.at("c"), "geometry.c");
    g = Geometry::lp(dim, number(j.at("p"), "geometry.p"), c);
  } else if (kind != "euclidean") {
    config_error("unknown geometry kind '" + kind + "'");
  }
  if (j.contains("identity_tol")) g = g.with_identity_tol(number(j.at("identity_tol"), "geometry.identity_tol"));
  return g;
}

ConvexSet set_of(const json& j) {
  reject_unknown(j, {"kind", "lo", "hi"}, "set");
  if (j.value("kind", std::string("box")) != "box") config_error("only box sets are configurable");
  if (!j.contains("lo") || !j.contains("hi")) config_error("box set needs lo and hi");
  return ConvexSet::box(vector_of(j.at("lo"), "set.lo"), vector_of(j.at("hi"), "set.hi"));
}

std::optional<LipschitzConstants> lipschitz_of(const json& j) {
  if (!j.contains("lipschitz")) return std::nullopt;
  const json& l = j.at("lipschitz");
  reject_unknown(l, {"c1", "c2"}, "lipschitz");
  if (!l.contains("c1") || !l.contains("c2")) config_error("lipschitz needs c1 and c2");
  return LipschitzConstants{number(l.at("c1"), "lipschitz.c1"), number(l.at("c2"), "lipschitz.c2")};
}

Problem problem_of(const json& j) {
  if (j.is_string()) return problem_from_registry(j.get<std::string>());
  if (!j.is_object()) config_error("problem must be a registry name or an object");
  if (j.contains("registry")) {
    reject_unknown(j, {"registry", "dim"}, "problem");
    return problem_from_registry(j.at("registry").get<std::string>(), j.value("dim", 1));
  }
  reject_unknown(j, {"name", "quadratic", "mapping", "lipschitz"}, "problem");
  if (!j.contains("quadratic")) config_error("inline problem needs a quadratic block");
  const json& q = j.at("quadratic");
  reject_unknown(q, {"A", "B", "C"}, "problem.quadratic");
  if (!q.contains("A") || !q.contains("B") || !q.contains("C")) config_error("quadratic needs A, B, C");
  Bifunction f = quadratic_bifunction(matrix_of(q.at("A"), "A"), matrix_of(q.at("B"), "B"), matrix_of(q.at("C"), "C"),
                                      lipschitz_of(j));
  const Eigen::Index dim = f.dim;
  double scale = 1.0;
  if (j.contains("mapping")) {
    const json& m = j.at("mapping");
    reject_unknown(m, {"scale"}, "problem.mapping");
    scale = number(m.at("scale"), "mapping.scale");
  }
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(dim, -100.0), hi = Eigen::VectorXd::Constant(dim, 100.0);
  Problem p{j.value("name", std::string("inline_quadratic")), std::move(f), scaling_mapping(dim, scale),
            ConvexSet::box(lo, hi), Geometry::euclidean(dim)};
  return p;
}

void apply_loop(const json& s, LoopOptions& loop) {
  if (s.contains("max_outer")) loop.max_outer = s.at("max_outer").get<int>();
  if (s.contains("stop_tol")) loop.stop_tol = number(s.at("stop_tol"), "solver.stop_tol");
  if (s.contains("prox_tol")) loop.prox_tol = number(s.at("prox_tol"), "solver.prox_tol");
  if (s.contains("prox_path")) {
    const std::string p = s.at("prox_path").get<std::string>();
    if (p == "auto") {
      loop.prox_path = ProxPath::Auto;
    } else if (p == "closed_form") {
      loop.prox_path = ProxPath::ClosedForm;
    } else if (p == "numeric") {
      loop.prox_path = ProxPath::Numeric;
    } else {
      config_error("unknown prox_path '" + p + "'");
    }
  }
}

json vec_json(const PrimalVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.dim(); ++i) a.push_back(v[i]);
  return a;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void require_dim(const Eigen::VectorXd& v, Eigen::Index dim, const std::string& what) {
  if (v.size() != dim) {
    config_error(what + " has dimension " + std::to_string(v.size()) + ", problem has " + std::to_string(dim));
  }
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::MissingConstants:
    case ErrorCode::InvalidArgument:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InfeasibleStart:
      return 4;
    case ErrorCode::InfeasibleCut:
    case ErrorCode::LinesearchExhausted:
    case ErrorCode::ZeroSubgradient:
    case ErrorCode::MissingRows:
      return 3;
    case ErrorCode::InfeasibleSet:
    case ErrorCode::NoConvergence:
      return 1;
  }
  return 1;
}

Problem problem_from_registry(const std::string& name, int dim) {
  if (name == "paper_example_sec5") {
    if (dim != 1) config_error("paper_example_sec5 is one-dimensional");
    return paper_example();
  }
  if (name == "paper_example_product") {
    if (dim < 1) config_error("paper_example_product needs dim >= 1");
    return paper_example_product(dim);
  }
  config_error("unknown problem '" + name + "'");
}

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text, nullptr, true, true);
  } catch (const json::exception& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("config must be a JSON object");
  try {
    reject_unknown(j, {"name", "problem", "geometry", "set", "algorithm", "solver", "x0", "reference_solution",
                       "output", "golden_table", "quantization", "description"},
                   "config");
    RunConfig cfg;
    cfg.name = j.value("name", std::string("run"));
    if (!j.contains("problem")) config_error("config needs a problem");
    cfg.problem = problem_of(j.at("problem"));
    const Eigen::Index dim = cfg.problem.f.dim;
    if (j.contains("geometry")) cfg.problem.geometry = geometry_of(j.at("geometry"), dim);
    if (j.contains("set")) cfg.problem.C = set_of(j.at("set"));
    if (cfg.problem.C.dim() != dim) config_error("set dimension does not match the problem");

    const std::string alg = j.value("algorithm", std::string("extragradient"));
    if (alg == "extragradient") {
      cfg.algorithm = Algorithm::Extragradient;
    } else if (alg == "linesearch") {
      cfg.algorithm = Algorithm::Linesearch;
    } else {
      config_error("algorithm must be extragradient or linesearch, got '" + alg + "'");
    }

    const json s = j.value("solver", json::object());
    if (cfg.algorithm == Algorithm::Extragradient) {
      reject_unknown(s, {"alpha", "beta", "lambda", "max_outer", "stop_tol", "prox_tol", "prox_path"}, "solver");
      ExtragradientConfig& e = cfg.extragradient;
      if (s.contains("alpha")) e.alpha = schedule_of(s.at("alpha"), "solver.alpha");
      if (s.contains("beta")) e.beta = schedule_of(s.at("beta"), "solver.beta");
      if (s.contains("lambda")) e.lambda = schedule_of(s.at("lambda"), "solver.lambda");
      apply_loop(s, e.loop);
    } else {
      reject_unknown(s, {"alpha", "beta", "lambda", "max_outer", "stop_tol", "prox_tol", "prox_path", "armijo_alpha",
                         "gamma", "nu", "m_max", "sigma_variant"},
                     "solver");
      LinesearchConfig& l = cfg.linesearch;
      if (s.contains("alpha")) l.alpha = schedule_of(s.at("alpha"), "solver.alpha");
      if (s.contains("beta")) l.beta = schedule_of(s.at("beta"), "solver.beta");
      if (s.contains("lambda")) l.lambda = schedule_of(s.at("lambda"), "solver.lambda");
      if (s.contains("armijo_alpha")) l.armijo_alpha = number(s.at("armijo_alpha"), "solver.armijo_alpha");
      if (s.contains("gamma")) l.gamma = number(s.at("gamma"), "solver.gamma");
      if (s.contains("nu")) l.nu = number(s.at("nu"), "solver.nu");
      if (s.contains("m_max")) l.m_max = s.at("m_max").get<int>();
      if (s.contains("sigma_variant")) {
        const std::string v = s.at("sigma_variant").get<std::string>();
        if (v == "squared_norm") {
          l.sigma_variant = SigmaVariant::SquaredNorm;
        } else if (v == "example_norm") {
          l.sigma_variant = SigmaVariant::ExampleNorm;
        } else {
          config_error("sigma_variant must be squared_norm or example_norm");
        }
      }
      apply_loop(s, l.loop);
    }

    if (!j.contains("x0")) config_error("config needs x0");
    const Eigen::VectorXd x0 = vector_of(j.at("x0"), "x0");
    require_dim(x0, dim, "x0");
    cfg.x0 = PrimalVector(x0);
    if (j.contains("reference_solution")) {
      const Eigen::VectorXd r = vector_of(j.at("reference_solution"), "reference_solution");
      require_dim(r, dim, "reference_solution");
      cfg.reference_solution = PrimalVector(r);
    }
    if (j.contains("quantization")) cfg.quantization = number(j.at("quantization"), "quantization");
    if (j.contains("output")) {
      const json& o = j.at("output");
      reject_unknown(o, {"csv", "plot"}, "output");
      if (o.contains("csv")) cfg.csv_path = o.at("csv").get<std::string>();
      if (o.contains("plot")) cfg.plot_path = o.at("plot").get<std::string>();
    }
    if (j.contains("golden_table")) {
      std::filesystem::path gp = j.at("golden_table").get<std::string>();
      if (gp.is_relative() && !base_dir.empty()) gp = base_dir / gp;
      cfg.golden_path = gp.string();
    }
    return cfg;
  } catch (const json::exception& e) {
    config_error(std::string("config: ") + e.what());
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) config_error("cannot open config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  RunConfig cfg = parse_run_config(ss.str(), std::filesystem::path(path).parent_path());
  if (cfg.name == "run") cfg.name = std::filesystem::path(path).stem().string();
  return cfg;
}

void write_plot_data(const std::string& path, const SolveResult& result, const Geometry& g, const PrimalVector& ref) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::InvalidArgument, "cannot open " + path + " for writing");
  os << "# n  |x_n - x*|\n";
  for (const IterateRecord& r : result.trace.records) os << r.n << ' ' << format_real(g.norm(r.x - ref)) << '\n';
}

RunOutcome run(const RunConfig& cfg, const RunOverrides& overrides) {
  RunOutcome out;
  json summary;
  summary["name"] = cfg.name;
  summary["algorithm"] = to_string(cfg.algorithm);
  summary["problem"] = cfg.problem.name;
  try {
    const auto quant = overrides.quantization ? overrides.quantization : cfg.quantization;
    const Geometry& g = cfg.problem.geometry;
    if (cfg.reference_solution && !contains(cfg.problem.C, g, *cfg.reference_solution, 1e-9)) {
      config_error("reference_solution is outside the feasible set");
    }
    if (!contains(cfg.problem.C, g, cfg.x0, 0.0)) config_error("x0 is outside the feasible set");
    auto prepare = [&](LoopOptions& loop) {
      loop.quantization = quant;
      loop.reference_solution = cfg.reference_solution;
      loop.seed = overrides.seed;
      loop.retraction.seed = overrides.seed;
    };
    SolveResult res;
    if (cfg.algorithm == Algorithm::Extragradient) {
      ExtragradientConfig c = cfg.extragradient;
      prepare(c.loop);
      res = eg_solve(cfg.problem, c, cfg.x0);
    } else {
      LinesearchConfig c = cfg.linesearch;
      prepare(c.loop);
      res = ls_solve(cfg.problem, c, cfg.x0);
    }

    const auto csv = overrides.csv_path ? overrides.csv_path : cfg.csv_path;
    if (csv) {
      write_trace_csv(*csv, res.trace);
      summary["csv"] = *csv;
    }
    if (cfg.plot_path && cfg.reference_solution) {
      write_plot_data(*cfg.plot_path, res, g, *cfg.reference_solution);
      summary["plot"] = *cfg.plot_path;
    }

    summary["status"] = to_string(res.status);
    summary["final_point"] = vec_json(res.final_point);
    summary["iterations"] = res.iterations;
    summary["worst_slack"] = finite_or_null(res.worst_slack);
    json viol = json::array();
    for (const Violation& v : res.violations) viol.push_back({{"n", v.n}, {"what", v.what}, {"value", v.value}});
    summary["violations"] = viol;

    out.exit_code = res.status == Status::MaxIter ? 2 : 0;
    if (!res.violations.empty()) {
      out.exit_code = 3;
      out.diagnostic = std::to_string(res.violations.size()) + " invariant violation(s); first at n=" +
                       std::to_string(res.violations.front().n) + ": " + res.violations.front().what;
    }

    const auto golden = overrides.golden_path ? overrides.golden_path : cfg.golden_path;
    if (golden) {
      const GoldenTable table = load_golden(*golden);
      GoldenReport rep = compare_golden(res.trace, table);
      json cells = json::array();
      for (const CellDiff& c : rep.mismatches()) {
        cells.push_back({{"n", c.n}, {"column", c.column}, {"expected", c.expected}, {"actual", c.actual},
                         {"tolerance", c.tolerance}});
      }
      summary["golden"] = {{"table", table.name},
                           {"pass", rep.pass()},
                           {"cells", rep.cells.size()},
                           {"mismatches", cells}};
      if (!rep.pass()) {
        out.exit_code = 3;
        if (!out.diagnostic.empty()) out.diagnostic += "; ";
        out.diagnostic += "golden mismatch: " + rep.describe();
      }
      out.golden = std::move(rep);
    }
    out.result = std::move(res);
  } catch (const Error& e) {
    out.exit_code = exit_code_for(e.code());
    out.diagnostic = e.what();
    summary["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
  }
  summary["exit_code"] = out.exit_code;
  out.summary = summary.dump(2);
  return out;
}

RunOutcome run_file(const std::string& config_path, const RunOverrides& overrides) {
  try {
    return run(load_run_config(config_path), overrides);
  } catch (const Error& e) {
    RunOutcome out;
    out.exit_code = exit_code_for(e.code());
    out.diagnostic = e.what();
    out.summary = json{{"config", config_path},
                       {"error", {{"code", to_string(e.code())}, {"message", e.what()}}},
                       {"exit_code", out.exit_code}}
                      .dump(2);
    return out;
  }
}

RunOutcome verify_file(const std::string& config_path, std::uint64_t seed, int samples) {
  RunOutcome out;
  json summary{{"config", config_path}};
  try {
    const RunConfig cfg = load_run_config(config_path);
    const Problem& p = cfg.problem;
    std::mt19937_64 rng(seed);
    const AssumptionReport rep =
        verify_assumptions(p.f, p.C, p.geometry, samples, rng, AssumptionOptions{.check_a5 = p.f.lipschitz.has_value()});
    const double s_worst = check_relative_nonexpansive(p.S, p.C, p.geometry, samples, rng);
    const double tol = 1e-8;
    const bool a2 = rep.a2_worst <= tol;
    const bool rn = !(s_worst > tol);
    summary["problem"] = p.name;
    summary["samples"] = rep.samples;
    summary["a1_worst"] = rep.a1_worst;
    summary["a2_worst"] = rep.a2_worst;
    summary["a2_pairs"] = rep.a2_pairs;
    summary["a4_worst_slack"] = finite_or_null(rep.a4_worst_slack);
    summary["a5_worst_slack"] = rep.a5_worst_slack ? finite_or_null(*rep.a5_worst_slack) : json(nullptr);
    summary["relative_nonexpansive_worst"] = finite_or_null(s_worst);
    summary["seed"] = seed;
    const bool ok = rep.passes(tol) && a2 && rn;
    summary["pass"] = ok;
    out.exit_code = ok ? 0 : 3;
    if (!ok) out.diagnostic = "assumption check failed";
  } catch (const Error& e) {
    out.exit_code = exit_code_for(e.code());
    out.diagnostic = e.what();
    summary["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
  }
  summary["exit_code"] = out.exit_code;
  out.summary = summary.dump(2);
  return out;
}

}  // namespace beq
