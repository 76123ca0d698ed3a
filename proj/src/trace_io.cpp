#include "beq/trace_io.hpp"

#include "beq/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace beq {

namespace {

const std::vector<std::string> kBase = {"n",          "x",           "y",           "z",
                                        "t",          "alpha",       "beta",        "lambda",
                                        "phi_x0_xn",  "phi_star_xn", "lem1_slack",  "lem3_slack",
                                        "cut_slack",  "retract_residual", "retract_iters", "prox_path",
                                        "prox_iters", "prox_residual", "y_eq_x",    "t_eq_x"};
const std::vector<std::string> kLinesearch = {"w",   "g",    "sigma",        "m",               "rho",
                                              "f_zx", "prop41_slack", "prop41_ii_slack", "minimal_m",
                                              "sigma_variant"};

template <class Tag>
std::string format_vec(const Coords<Tag>& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.dim(); ++i) {
    if (i) out += ';';
    out += format_real(v[i]);
  }
  return out;
}

std::string format_opt(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

double parse_real(const std::string& s, const char* column) {
  if (s.empty()) throw Error(ErrorCode::InvalidArgument, std::string("empty cell in column ") + column);
  // strtod rather than from_chars: it also reads inf/nan and keeps
  // subnormals exact (ERANGE is ignored on purpose).
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad real '") + s + "' in column " + column);
  }
  return v;
}

std::optional<double> parse_opt(const std::string& s, const char* column) {
  if (s.empty()) return std::nullopt;
  return parse_real(s, column);
}

int parse_int(const std::string& s, const char* column) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad integer '") + s + "' in column " + column);
  }
  return v;
}

template <class Tag>
Coords<Tag> parse_vec(const std::string& s, const char* column) {
  std::vector<double> vals;
  std::size_t start = 0;
  while (true) {
    const std::size_t sep = s.find(';', start);
    vals.push_back(parse_real(s.substr(start, sep - start), column));
    if (sep == std::string::npos) break;
    start = sep + 1;
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return Coords<Tag>(std::move(v));
}

bool parse_bool(const std::string& s, const char* column) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw Error(ErrorCode::InvalidArgument, std::string("bad flag '") + s + "' in column " + column);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t sep = line.find(',', start);
    cells.push_back(line.substr(start, sep - start));
    if (sep == std::string::npos) break;
    start = sep + 1;
  }
  return cells;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> trace_columns(Algorithm algorithm) {
  std::vector<std::string> cols = kBase;
  if (algorithm == Algorithm::Linesearch) cols.insert(cols.end(), kLinesearch.begin(), kLinesearch.end());
  return cols;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  const auto cols = trace_columns(trace.algorithm);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const IterateRecord& r : trace.records) {
    const Monitors& m = r.monitors;
    std::vector<std::string> cells = {std::to_string(r.n),
                                      format_vec(r.x),
                                      format_vec(r.y),
                                      format_vec(r.z),
                                      format_vec(r.t),
                                      format_real(r.alpha),
                                      format_real(r.beta),
                                      format_real(r.lambda),
                                      format_real(m.phi_x0_xn),
                                      format_opt(m.phi_star_xn),
                                      format_opt(m.lem1_slack),
                                      format_opt(m.lem3_slack),
                                      format_opt(m.cut_slack),
                                      format_real(r.retract_residual),
                                      std::to_string(r.retract_iters),
                                      r.prox_path,
                                      std::to_string(r.prox_iters),
                                      format_real(r.prox_residual),
                                      r.y_eq_x ? "1" : "0",
                                      r.t_eq_x ? "1" : "0"};
    if (trace.algorithm == Algorithm::Linesearch) {
      if (!r.ls) throw Error(ErrorCode::InvalidArgument, "linesearch trace record without linesearch fields");
      const LinesearchFields& l = *r.ls;
      const std::vector<std::string> extra = {format_vec(l.w),        format_vec(l.g),
                                              format_real(l.sigma),   std::to_string(l.m),
                                              format_real(l.rho),     format_real(l.f_zx),
                                              format_opt(m.prop41_slack), format_opt(m.prop41_ii_slack),
                                              l.minimal_m ? "1" : "0", to_string(l.sigma_variant)};
      cells.insert(cells.end(), extra.begin(), extra.end());
    }
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  }
}

void write_trace_csv(const std::string& path, const Trace& trace) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::InvalidArgument, "cannot open " + path + " for writing");
  write_trace_csv(os, trace);
}

Trace read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::InvalidArgument, "empty trace CSV");
  const auto header = split(line);
  Trace trace;
  trace.algorithm = std::find(header.begin(), header.end(), "w") != header.end() ? Algorithm::Linesearch
                                                                                 : Algorithm::Extragradient;
  if (header != trace_columns(trace.algorithm)) throw Error(ErrorCode::InvalidArgument, "unexpected trace CSV header");
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < header.size(); ++i) idx[header[i]] = i;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw Error(ErrorCode::InvalidArgument, "ragged trace CSV row");
    auto cell = [&](const char* name) -> const std::string& { return cells[idx.at(name)]; };
    IterateRecord r;
    r.n = parse_int(cell("n"), "n");
    r.x = parse_vec<PrimalTag>(cell("x"), "x");
    r.y = parse_vec<PrimalTag>(cell("y"), "y");
    r.z = parse_vec<PrimalTag>(cell("z"), "z");
    r.t = parse_vec<PrimalTag>(cell("t"), "t");
    r.alpha = parse_real(cell("alpha"), "alpha");
    r.beta = parse_real(cell("beta"), "beta");
    r.lambda = parse_real(cell("lambda"), "lambda");
    r.monitors.phi_x0_xn = parse_real(cell("phi_x0_xn"), "phi_x0_xn");
    r.monitors.phi_star_xn = parse_opt(cell("phi_star_xn"), "phi_star_xn");
    r.monitors.lem1_slack = parse_opt(cell("lem1_slack"), "lem1_slack");
    r.monitors.lem3_slack = parse_opt(cell("lem3_slack"), "lem3_slack");
    r.monitors.cut_slack = parse_opt(cell("cut_slack"), "cut_slack");
    r.retract_residual = parse_real(cell("retract_residual"), "retract_residual");
    r.retract_iters = parse_int(cell("retract_iters"), "retract_iters");
    r.prox_path = cell("prox_path");
    r.prox_iters = parse_int(cell("prox_iters"), "prox_iters");
    r.prox_residual = parse_real(cell("prox_residual"), "prox_residual");
    r.y_eq_x = parse_bool(cell("y_eq_x"), "y_eq_x");
    r.t_eq_x = parse_bool(cell("t_eq_x"), "t_eq_x");
    if (trace.algorithm == Algorithm::Linesearch) {
      LinesearchFields l;
      l.w = parse_vec<PrimalTag>(cell("w"), "w");
      l.g = parse_vec<DualTag>(cell("g"), "g");
      l.sigma = parse_real(cell("sigma"), "sigma");
      l.m = parse_int(cell("m"), "m");
      l.rho = parse_real(cell("rho"), "rho");
      l.f_zx = parse_real(cell("f_zx"), "f_zx");
      r.monitors.prop41_slack = parse_opt(cell("prop41_slack"), "prop41_slack");
      r.monitors.prop41_ii_slack = parse_opt(cell("prop41_ii_slack"), "prop41_ii_slack");
      l.minimal_m = parse_bool(cell("minimal_m"), "minimal_m");
      const std::string& v = cell("sigma_variant");
      if (v == "squared_norm") {
        l.sigma_variant = SigmaVariant::SquaredNorm;
      } else if (v == "example_norm") {
        l.sigma_variant = SigmaVariant::ExampleNorm;
      } else {
        throw Error(ErrorCode::InvalidArgument, "bad sigma_variant '" + v + "'");
      }
      r.ls = std::move(l);
    }
    trace.records.push_back(std::move(r));
  }
  return trace;
}

Trace read_trace_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  return read_trace_csv(is);
}

}  // namespace beq
