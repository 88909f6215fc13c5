// Command-line front end: map unconstrained vectors to bounded correlation
// Cholesky factors and back, sample bounded correlation matrices, or probe
// a bounds configuration for feasibility.
//
// Exit codes: 0 success, 2 infeasible bounds (the diagnostic names the
// offending entry), 1 usage or I/O errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "corrchol/batch.hpp"
#include "corrchol/oracle.hpp"
#include "corrchol/sampler.hpp"
#include "corrchol/transform.hpp"

namespace {

using json = nlohmann::json;
using namespace corrchol;

// Round-trippable double formatting, identical across runs.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_csv_line(const std::string& line, int lineno) {
  std::vector<double> values;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      std::size_t pos = 0;
      values.push_back(std::stod(field, &pos));
      while (pos < field.size() &&
             std::isspace(static_cast<unsigned char>(field[pos])))
        ++pos;
      if (pos != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw Error("line " + std::to_string(lineno) + ": cannot parse '" +
                  field + "' as a number");
    }
  }
  return values;
}

// A first line starting with one of our own column names is a CSV header,
// so the output of one mode pipes straight into another.
bool looks_like_header(const std::string& line) {
  std::stringstream ss(line);
  std::string field;
  if (!std::getline(ss, field, ',')) return false;
  return field.rfind("l_", 0) == 0 || field.rfind("x_", 0) == 0 ||
         field.rfind("corr_", 0) == 0 || field == "chain";
}

BoundsSpec load_bounds(int dim, double lb, double ub,
                       const std::string& bounds_file) {
  if (bounds_file.empty()) return BoundsSpec(dim, lb, ub);
  std::ifstream in(bounds_file);
  if (!in) throw Error("cannot open bounds file '" + bounds_file + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("bounds file: " + std::string(e.what()));
  }
  if (!j.contains("n") || !j["n"].is_number_integer())
    throw Error("bounds file: missing integer field 'n'");
  if (j["n"].get<int>() != dim)
    throw Error("bounds file dimension " + std::to_string(j["n"].get<int>()) +
                " does not match --dim " + std::to_string(dim));
  double def_lb = lb;
  double def_ub = ub;
  if (j.contains("default")) {
    const auto& d = j["default"];
    if (!d.is_array() || d.size() != 2)
      throw Error("bounds file: 'default' must be [lb, ub]");
    def_lb = d[0].get<double>();
    def_ub = d[1].get<double>();
  }
  BoundsSpec bounds(dim, def_lb, def_ub);
  for (const auto& e : j.value("entries", json::array())) {
    for (const char* key : {"i", "j", "lb", "ub"})
      if (!e.contains(key))
        throw Error(std::string("bounds file: entry missing '") + key + "'");
    bounds.set_entry(e["i"].get<int>(), e["j"].get<int>(),
                     e["lb"].get<double>(), e["ub"].get<double>());
  }
  return bounds;
}

FixedValueSpec load_pins(const std::string& pins_file) {
  if (pins_file.empty()) return {};
  std::ifstream in(pins_file);
  if (!in) throw Error("cannot open pins file '" + pins_file + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("pins file: " + std::string(e.what()));
  }
  std::vector<Pin> pins;
  for (const auto& p : j.value("pins", json::array())) {
    for (const char* key : {"i", "j", "value"})
      if (!p.contains(key))
        throw Error(std::string("pins file: pin missing '") + key + "'");
    pins.push_back(
        Pin{p["i"].get<int>(), p["j"].get<int>(), p["value"].get<double>()});
  }
  return FixedValueSpec(std::move(pins));
}

struct Options {
  std::string mode;
  int dim = 0;
  double eta = 1.0;
  double lb = -1.0;
  double ub = 1.0;
  std::string bounds_file;
  std::string pins_file;
  int samples = 1000;
  int warmup = 1000;
  std::uint64_t seed = 0;
  int chains = 1;
  std::string output;
  std::string format = "csv";
};

class OutputSink {
 public:
  explicit OutputSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// Strict-lower entries of m, column-major, as formatted fields.
std::vector<std::string> flatten_lower(const Eigen::MatrixXd& m) {
  std::vector<std::string> fields;
  for (const auto& [r, c] : column_major_order(static_cast<int>(m.rows())))
    fields.push_back(fmt(m(r, c)));
  return fields;
}

void write_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) os << ',';
    os << fields[k];
  }
  os << '\n';
}

int run_transform(const Options& opt, const BoundsSpec& bounds,
                  const FixedValueSpec& pins, std::ostream& os) {
  const bool csv = opt.format == "csv";
  const int k = tri_size(opt.dim) - pins.size();
  if (csv) {
    std::vector<std::string> header;
    for (const auto& [r, c] : column_major_order(opt.dim))
      header.push_back("l_" + std::to_string(r + 1) + "_" +
                       std::to_string(c + 1));
    header.push_back("log_jacobian");
    write_row(os, header);
  }
  std::string line;
  int lineno = 0;
  while (std::getline(std::cin, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && looks_like_header(line)) continue;
    const std::vector<double> values = parse_csv_line(line, lineno);
    if (static_cast<int>(values.size()) != k)
      throw Error("line " + std::to_string(lineno) + ": expected " +
                  std::to_string(k) + " values, got " +
                  std::to_string(values.size()));
    UnconstrainedVector x(k);
    for (int d = 0; d < k; ++d) x[d] = values[d];
    const TransformResult result =
        pins.empty() ? forward(x, bounds) : forward_with_fixed(x, bounds, pins);
    if (csv) {
      std::vector<std::string> fields = flatten_lower(result.factor.matrix());
      fields.push_back(fmt(result.log_abs_det_jacobian));
      write_row(os, fields);
    } else {
      json j;
      j["l"] = json::array();
      for (const auto& [r, c] : column_major_order(opt.dim))
        j["l"].push_back(result.factor.matrix()(r, c));
      j["log_jacobian"] = result.log_abs_det_jacobian;
      os << j.dump() << '\n';
    }
  }
  return 0;
}

int run_inverse(const Options& opt, const BoundsSpec& bounds,
                std::ostream& os) {
  const bool csv = opt.format == "csv";
  const int k = tri_size(opt.dim);
  if (csv) {
    std::vector<std::string> header;
    for (int d = 1; d <= k; ++d) header.push_back("x_" + std::to_string(d));
    write_row(os, header);
  }
  std::string line;
  int lineno = 0;
  while (std::getline(std::cin, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && looks_like_header(line)) continue;
    const std::vector<double> values = parse_csv_line(line, lineno);
    // accept a trailing log-Jacobian column so transform output pipes back
    if (static_cast<int>(values.size()) != k &&
        static_cast<int>(values.size()) != k + 1)
      throw Error("line " + std::to_string(lineno) + ": expected " +
                  std::to_string(k) + " strict-lower entries, got " +
                  std::to_string(values.size()));

    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(opt.dim, opt.dim);
    L(0, 0) = 1.0;
    int next = 0;
    for (const auto& [r, c] : column_major_order(opt.dim))
      L(r, c) = values[next++];
    for (int r = 1; r < opt.dim; ++r) {
      const double d2 = 1.0 - L.row(r).head(r).squaredNorm();
      if (!(d2 > 0.0))
        throw InvalidFactor("line " + std::to_string(lineno) + ": row " +
                            std::to_string(r + 1) + " norm is not below 1");
      L(r, r) = std::sqrt(d2);
    }
    const UnconstrainedVector x = inverse(CholFactor(std::move(L)), bounds);
    if (csv) {
      std::vector<std::string> fields;
      for (int d = 0; d < x.size(); ++d) fields.push_back(fmt(x[d]));
      write_row(os, fields);
    } else {
      json j;
      j["x"] = std::vector<double>(x.data(), x.data() + x.size());
      os << j.dump() << '\n';
    }
  }
  return 0;
}

int run_sample(const Options& opt, const BoundsSpec& bounds,
               const FixedValueSpec& pins, std::ostream& os, bool debug) {
  SamplerConfig config{.bounds = bounds};
  config.eta = LkjShape(opt.eta);
  if (!pins.empty()) config.fixed = pins;
  config.warmup = opt.warmup;
  config.samples = opt.samples;
  config.seed = opt.seed;
  if (debug) config.trace = &std::cerr;

  const auto chains =
      batch::run_chains(config, opt.chains, batch::Execution::openmp);

  const bool csv = opt.format == "csv";
  if (csv) {
    std::vector<std::string> header;
    if (opt.chains > 1) header.push_back("chain");
    for (const auto& [r, c] : column_major_order(opt.dim))
      header.push_back("corr_" + std::to_string(r + 1) + "_" +
                       std::to_string(c + 1));
    header.push_back("log_posterior");
    write_row(os, header);
  }
  for (std::size_t chain = 0; chain < chains.size(); ++chain) {
    for (const Draw& draw : chains[chain].draws) {
      if (csv) {
        std::vector<std::string> fields;
        if (opt.chains > 1) fields.push_back(std::to_string(chain));
        for (auto& f : flatten_lower(draw.correlation))
          fields.push_back(std::move(f));
        fields.push_back(fmt(draw.log_posterior));
        write_row(os, fields);
      } else {
        json j;
        if (opt.chains > 1) j["chain"] = chain;
        j["corr"] = json::array();
        for (const auto& [r, c] : column_major_order(opt.dim))
          j["corr"].push_back(draw.correlation(r, c));
        j["log_posterior"] = draw.log_posterior;
        os << j.dump() << '\n';
      }
    }
  }
  if (debug) {
    for (std::size_t chain = 0; chain < chains.size(); ++chain)
      std::cerr << "chain " << chain
                << " accept_rate=" << chains[chain].accept_rate << '\n';
  }
  return 0;
}

int run_check_bounds(const BoundsSpec& bounds, const FixedValueSpec& pins,
                     std::ostream& os) {
  const ProbeResult probe = probe_bounds(bounds, pins);
  if (probe.feasible) {
    os << "bounds feasible along the midpoint recursion\n";
    return 0;
  }
  os << "infeasible bounds at " << entry_label(probe.row, probe.col)
     << ": interval [" << fmt(probe.lb) << ", " << fmt(probe.ub)
     << "] is empty or narrower than 1e-08\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Bounded correlation-matrix Cholesky transform, sampler, and "
      "feasibility checker"};
  Options opt;
  app.add_option("--mode", opt.mode,
                 "transform | inverse | sample | check-bounds")
      ->required()
      ->check(CLI::IsMember({"transform", "inverse", "sample", "check-bounds"}));
  app.add_option("--dim", opt.dim, "matrix dimension (>= 2)")->required();
  app.add_option("--eta", opt.eta, "LKJ shape parameter (default 1)");
  app.add_option("--lb", opt.lb, "scalar lower correlation bound (default -1)");
  app.add_option("--ub", opt.ub, "scalar upper correlation bound (default 1)");
  app.add_option("--bounds-file", opt.bounds_file,
                 "JSON per-entry bounds, overrides --lb/--ub");
  app.add_option("--pins-file", opt.pins_file, "JSON pinned correlations");
  app.add_option("--samples", opt.samples, "retained draws per chain");
  app.add_option("--warmup", opt.warmup, "adaptation iterations");
  app.add_option("--seed", opt.seed, "random seed");
  app.add_option("--chains", opt.chains, "independent chains (sample mode)");
  app.add_option("--output", opt.output, "output path (default stdout)");
  app.add_option("--format", opt.format, "csv | jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message; 0 for --help
    return code == 0 ? 0 : 1;
  }

  const char* log_env = std::getenv("CORRCHOL_LOG");
  const bool debug = log_env && std::string(log_env) == "debug";

  try {
    if (opt.dim < 2) throw Error("--dim must be >= 2");
    if (opt.chains < 1) throw Error("--chains must be >= 1");
    const BoundsSpec bounds =
        load_bounds(opt.dim, opt.lb, opt.ub, opt.bounds_file);
    const FixedValueSpec pins = load_pins(opt.pins_file);
    pins.validate_for(opt.dim);
    OutputSink sink(opt.output);

    if (opt.mode == "transform")
      return run_transform(opt, bounds, pins, sink.stream());
    if (opt.mode == "inverse") return run_inverse(opt, bounds, sink.stream());
    if (opt.mode == "sample")
      return run_sample(opt, bounds, pins, sink.stream(), debug);
    return run_check_bounds(bounds, pins, sink.stream());
  } catch (const DegenerateInterval& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const InfeasiblePin& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const InfeasibleAtInit& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const OutOfBounds& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
