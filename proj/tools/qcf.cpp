// qcf: command-line front end for quasi-transformation matrices.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qcf/eval2d.hpp"
#include "qcf/ifs_support.hpp"
#include "qcf/kernels.hpp"
#include "qcf/multi_nd.hpp"
#include "qcf/qt_matrix.hpp"
#include "qcf/render.hpp"

namespace {

using namespace qcf;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;

// Raised when the input parses but fails a mathematical check.
struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Rational parse_literal(const std::string& text, const std::string& flag) {
  Rational r;
  try {
    r = Rational::parse(text);
  } catch (const std::exception& e) {
    throw UsageError(flag + ": cannot read '" + text + "' as a number (" + e.what() + ")");
  }
  if (Rational::is_decimal_literal(text))
    std::cerr << "warning: " << flag << ": decimal '" << text << "' read as " << r.str()
              << "; write p/q to keep values such as thirds exact\n";
  return r;
}

std::vector<Rational> parse_list(const std::vector<std::string>& items, const std::string& flag, std::size_t count) {
  if (count != 0 && items.size() != count)
    throw UsageError(flag + ": expected " + std::to_string(count) + " comma-separated values, got " +
                     std::to_string(items.size()));
  std::vector<Rational> out;
  for (const auto& s : items) out.push_back(parse_literal(s, flag));
  return out;
}

bool is_json_path(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoFailure("cannot open " + path);
  return is;
}

QtMatrix2 load_matrix(const std::string& path) {
  auto is = open_in(path);
  try {
    return read_matrix(is);
  } catch (const MatrixValidationError& e) {
    throw InvalidInput(e.what());
  }
}

MultiMatrix load_multi(const std::string& path) {
  auto is = open_in(path);
  if (is_json_path(path)) return read_multi_json(is);
  return MultiMatrix::from_grid(read_matrix_grid(is));
}

// Writes to `path`, or stdout when it is empty or "-".
template <typename F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoFailure("cannot open " + path + " for writing");
  write(os);
  if (!os) throw IoFailure("failed writing " + path);
}

int cmd_validate(const std::string& path) {
  if (is_json_path(path)) {
    const MultiMatrix t = load_multi(path);
    const NdValidation v = validate_nd(t);
    if (!v.ok()) {
      std::cout << "invalid: " << to_string(v.code) << ": " << v.message() << '\n';
      return kExitInvalid;
    }
    std::cout << (t.is_proper() ? "valid, proper" : "valid, transformation") << '\n';
    std::cout << "n " << t.dims() << '\n';
    std::cout << "alpha " << contraction_alpha(t).str() << '\n';
    return kExitOk;
  }
  auto is = open_in(path);
  const ColumnGrid grid = read_matrix_grid(is);
  if (const auto failure = check_matrix(grid)) {
    std::cout << "invalid: " << failure->message() << '\n';
    return kExitInvalid;
  }
  const QtMatrix2 m = build_matrix(grid);
  std::cout << (m.is_proper() ? "valid, proper" : "valid, transformation") << '\n';
  std::cout << "order " << m.order() << '\n';
  const SelfSimilarity sim = self_similarity_check(m);
  std::cout << "self-similar " << (sim.holds ? "yes" : "no") << '\n';
  return kExitOk;
}

int cmd_eval(const std::string& path, const std::vector<std::string>& point, double tol, int max_depth, int grid,
             const std::string& out) {
  FixedPointEvaluator f(load_matrix(path), tol, max_depth);
  if (grid > 0) {
    const auto values = kernels::evaluate_grid(f, grid);
    emit(out, [&](std::ostream& os) { write_grid_csv(os, grid, values); });
    if (!out.empty() && out != "-") std::cout << "wrote " << values.size() << " grid values to " << out << '\n';
    if (point.empty()) return kExitOk;
  }
  if (point.empty()) throw UsageError("--point: required unless --grid is given");
  const auto uv = parse_list(point, "--point", 2);
  const EvalResult r = f.eval(uv[0].to_double(), uv[1].to_double());
  std::cout << "value " << num(r.value) << '\n';
  std::cout << "error_bound " << num(r.error_bound) << '\n';
  if (const auto exact = f.eval_exact(uv[0], uv[1])) std::cout << "exact " << exact->str() << '\n';
  return kExitOk;
}

int cmd_volume(const std::string& path, const std::vector<std::string>& rect, double tol) {
  const auto c = parse_list(rect, "--rect", 4);
  if (c[0] > c[1] || c[2] > c[3]) throw UsageError("--rect: expected u1,u2,v1,v2 with u1 <= u2 and v1 <= v2");
  FixedPointEvaluator f(load_matrix(path), tol);
  const Evaluable q = f.as_evaluable();
  if (const auto exact = volume_exact(q, Box2{c[0], c[1], c[2], c[3]})) {
    std::cout << "volume " << exact->str() << '\n';
    std::cout << "decimal " << num(exact->to_double()) << '\n';
    return kExitOk;
  }
  const EvalResult r = volume(q, RealRect{c[0].to_double(), c[1].to_double(), c[2].to_double(), c[3].to_double()});
  std::cout << "volume " << num(r.value) << '\n';
  std::cout << "error_bound " << num(r.error_bound) << '\n';
  return kExitOk;
}

ImageFormat image_format(const std::string& requested, const std::string& path) {
  std::string f = requested;
  if (f.empty()) f = (path.size() >= 4 && path.compare(path.size() - 4, 4, ".ppm") == 0) ? "ppm" : "pgm";
  if (f == "pgm") return ImageFormat::Pgm;
  if (f == "ppm") return ImageFormat::Ppm;
  throw UsageError("--format: expected pgm or ppm, got '" + requested + "'");
}

int cmd_support(const std::string& path, int depth, int res, const std::string& out, const std::string& format,
                const std::string& json, std::uint64_t budget) {
  const ImageFormat fmt = image_format(format, out);
  const QtMatrix2 m = load_matrix(path);
  const SupportApprox support = enumerate_support(m, depth, budget);
  const SignedMask mask = rasterize_support(support, res);
  write_image(mask, fmt, out);
  if (!json.empty()) emit(json, [&](std::ostream& os) { write_support_json(os, support); });
  const double fraction = static_cast<double>(mask.occupied_count()) / (static_cast<double>(res) * res);
  std::cout << "rectangles " << support.size() << '\n';
  std::cout << "occupied_pixels " << mask.occupied_count() << '\n';
  std::cout << "occupied_fraction " << num(fraction) << '\n';
  return kExitOk;
}

int cmd_dim_moran(const std::vector<std::string>& ratio_text, double tol, const std::string& json) {
  std::vector<double> ratios;
  for (const auto& r : parse_list(ratio_text, "--ratios", 0)) ratios.push_back(r.to_double());
  const DimensionReport report = solve_moran(ratios, tol);
  std::cout << "s " << num(report.s) << '\n';
  std::cout << "residual " << num(report.residual) << '\n';
  std::cout << "bracket " << num(report.s_lo) << ' ' << num(report.s_hi) << '\n';
  std::cout << "iterations " << report.iterations << '\n';
  if (!json.empty()) emit(json, [&](std::ostream& os) { write_dimension_json(os, report); });
  return kExitOk;
}

int cmd_dim_family(const std::string& r_text, const std::string& s_text, int n, double tol) {
  if (r_text.empty() == s_text.empty()) throw UsageError("dim family: give exactly one of --r and --s");
  if (!r_text.empty()) {
    const double r = parse_literal(r_text, "--r").to_double();
    const double s = family_dimension(FamilyDirection::SOfR, r, n, tol);
    std::cout << "s " << num(s) << '\n';
    std::cout << "residual " << num(family_g(r, s, n) - 1.0) << '\n';
  } else {
    const double s = parse_literal(s_text, "--s").to_double();
    const double r = family_dimension(FamilyDirection::ROfS, s, n, tol);
    std::cout << "r " << num(r) << '\n';
    std::cout << "residual " << num(family_g(r, s, n) - 1.0) << '\n';
    std::cout << "critical_r " << num(critical_r(s, n)) << '\n';
  }
  return kExitOk;
}

int cmd_dim_box(const std::string& mask_path, const std::vector<std::string>& scale_text) {
  const OccupancyGrid mask = read_occupancy_image(mask_path);
  const auto scales = parse_list(scale_text, "--scales", 0);
  const BoxCountResult r = box_counting_estimate(mask, scales);
  std::cout << "dim " << num(r.dim) << '\n';
  std::cout << "fit_residual " << num(r.fit_residual) << '\n';
  for (std::size_t k = 0; k < r.scales.size(); ++k)
    std::cout << "scale " << scales[k].str() << " boxes " << r.counts[k] << '\n';
  return kExitOk;
}

int cmd_make(const std::string& kind, const std::string& out) {
  auto after = [&](const std::string& prefix) { return kind.substr(prefix.size()); };
  if (kind == "t0") {
    const QtMatrix2 m = canonical_matrix(CanonicalKind::t0());
    emit(out, [&](std::ostream& os) { write_matrix(os, m); });
  } else if (kind.rfind("tr:", 0) == 0) {
    const QtMatrix2 m = canonical_matrix(CanonicalKind::tr(parse_literal(after("tr:"), "make tr")));
    emit(out, [&](std::ostream& os) { write_matrix(os, m); });
  } else if (kind.rfind("step:", 0) == 0) {
    const std::string args = after("step:");
    const auto comma = args.find(',');
    if (comma == std::string::npos) throw UsageError("make: expected step:<n>,<r>");
    const Rational n = parse_literal(args.substr(0, comma), "make step");
    if (n.denominator() != 1) throw UsageError("make: step dimension must be an integer");
    const MultiMatrix t =
        make_step_matrix(static_cast<int>(n.numerator()), parse_literal(args.substr(comma + 1), "make step"));
    emit(out, [&](std::ostream& os) { write_multi_json(os, t); });
  } else if (kind.rfind("cube:", 0) == 0) {
    const Rational n = parse_literal(after("cube:"), "make cube");
    if (n.denominator() != 1) throw UsageError("make: cube dimension must be an integer");
    const MultiMatrix t = make_cube_matrix(static_cast<int>(n.numerator()));
    emit(out, [&](std::ostream& os) { write_multi_json(os, t); });
  } else {
    throw UsageError("make: unknown kind '" + kind + "' (expected t0, tr:<r>, step:<n>,<r> or cube:<n>)");
  }
  return kExitOk;
}

int cmd_lattice(const std::string& path, int depth, const std::string& out, std::uint64_t budget) {
  const MultiMatrix t = load_multi(path);
  const NdValidation v = validate_nd(t);
  if (!v.ok()) throw InvalidInput(std::string(to_string(v.code)) + ": " + v.message());
  const LatticeValues lattice = lattice_eval(t, depth, budget);
  emit(out, [&](std::ostream& os) { write_lattice_json(os, lattice); });
  return kExitOk;
}

int cmd_axioms(const std::string& path, int samples, std::uint64_t seed, double tol) {
  FixedPointEvaluator f(load_matrix(path), tol);
  const AxiomReport r = axiom_report(f.as_evaluable(), samples, seed);
  std::cout << "samples " << r.samples << '\n';
  std::cout << "slack " << num(r.slack) << '\n';
  std::cout << "boundary_worst " << num(r.boundary_worst) << " violations " << r.boundary_violations << '\n';
  std::cout << "monotone_worst " << num(r.monotone_worst) << " violations " << r.monotone_violations << '\n';
  std::cout << "lipschitz_worst " << num(r.lipschitz_worst) << " violations " << r.lipschitz_violations << '\n';
  std::cout << (r.ok() ? "ok" : "violations found") << '\n';
  return r.ok() ? kExitOk : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-copulas from quasi-transformation matrices"};
  app.require_subcommand(1);

  std::string matrix_path, out, format, json, kind, mask_path, r_text, s_text;
  std::vector<std::string> point, rect, ratios, scales;
  double tol = 1e-12;
  int max_depth = 64, grid = 0, depth = 4, res = 243, n = 2, samples = 10000;
  std::uint64_t seed = 1, budget = kDefaultRectBudget;

  auto* validate = app.add_subcommand("validate", "Check a matrix (text, or .json for n dimensions)");
  validate->add_option("matrix", matrix_path, "Matrix file")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate the fixed point Q_T");
  eval->add_option("matrix", matrix_path, "Matrix file")->required();
  eval->add_option("--point", point, "u,v (p/q or decimal)")->delimiter(',');
  eval->add_option("--tol", tol, "Truncation tolerance")->check(CLI::PositiveNumber);
  eval->add_option("--max-depth", max_depth, "Descent depth limit")->check(CLI::PositiveNumber);
  eval->add_option("--grid", grid, "Evaluate an N x N grid instead")->check(CLI::Range(2, 100000));
  eval->add_option("--out", out, "CSV output for --grid (default stdout)");

  auto* vol = app.add_subcommand("volume", "Q_T-volume of a rectangle");
  vol->add_option("matrix", matrix_path, "Matrix file")->required();
  vol->add_option("--rect", rect, "u1,u2,v1,v2")->delimiter(',')->required();
  vol->add_option("--tol", tol, "Truncation tolerance")->check(CLI::PositiveNumber);

  auto* support = app.add_subcommand("support", "Rasterize the depth-l support");
  support->add_option("matrix", matrix_path, "Matrix file")->required();
  support->add_option("--depth", depth, "Depth l")->check(CLI::Range(0, 64));
  support->add_option("--res", res, "Pixels per side")->check(CLI::Range(1, 1 << 15));
  support->add_option("--out", out, "Image path")->required();
  support->add_option("--format", format, "pgm or ppm (default from extension)");
  support->add_option("--json", json, "Also write the rectangles as JSON");
  support->add_option("--budget", budget, "Maximum number of rectangles");

  auto* dim = app.add_subcommand("dim", "Dimension reports");
  dim->require_subcommand(1);
  auto* moran = dim->add_subcommand("moran", "Solve sum c^s = 1");
  moran->add_option("--ratios", ratios, "Contraction ratios")->delimiter(',')->required();
  moran->add_option("--tol", tol, "Residual tolerance")->check(CLI::PositiveNumber);
  moran->add_option("--json", json, "Write the report as JSON");
  auto* family = dim->add_subcommand("family", "Dimension of the corner-plus-cubes family");
  family->add_option("--r", r_text, "Solve for s at this r");
  family->add_option("--s", s_text, "Solve for r at this s");
  family->add_option("--n", n, "Ambient dimension")->check(CLI::Range(2, 12));
  family->add_option("--tol", tol, "Residual tolerance")->check(CLI::PositiveNumber);
  auto* box = dim->add_subcommand("box", "Box-counting estimate of an image");
  box->add_option("--mask", mask_path, "PGM or PPM image")->required();
  box->add_option("--scales", scales, "Box sides as fractions of the unit square")->delimiter(',')->required();

  auto* make = app.add_subcommand("make", "Write a built-in matrix");
  make->add_option("kind", kind, "t0 | tr:<r> | step:<n>,<r> | cube:<n>")->required();
  make->add_option("--out", out, "Output path (default stdout)");

  auto* lattice = app.add_subcommand("lattice", "Exact Q_T on the depth-k corner lattice");
  lattice->add_option("matrix", matrix_path, "Matrix file (.json for n dimensions)")->required();
  lattice->add_option("--depth", depth, "Depth k")->check(CLI::Range(0, 32));
  lattice->add_option("--out", out, "JSON output (default stdout)");
  lattice->add_option("--budget", budget, "Maximum number of cells and lattice points");

  auto* axioms = app.add_subcommand("axioms", "Seeded check of boundary, monotonicity and Lipschitz conditions");
  axioms->add_option("matrix", matrix_path, "Matrix file")->required();
  axioms->add_option("--samples", samples, "Number of sample pairs")->check(CLI::PositiveNumber);
  axioms->add_option("--seed", seed, "Random seed");
  axioms->add_option("--tol", tol, "Evaluator tolerance")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(matrix_path);
    if (eval->parsed()) return cmd_eval(matrix_path, point, tol, max_depth, grid, out);
    if (vol->parsed()) return cmd_volume(matrix_path, rect, tol);
    if (support->parsed()) return cmd_support(matrix_path, depth, res, out, format, json, budget);
    if (moran->parsed()) return cmd_dim_moran(ratios, tol, json);
    if (family->parsed()) return cmd_dim_family(r_text, s_text, n, tol);
    if (box->parsed()) return cmd_dim_box(mask_path, scales);
    if (make->parsed()) return cmd_make(kind, out);
    if (lattice->parsed()) return cmd_lattice(matrix_path, depth, out, budget);
    if (axioms->parsed()) return cmd_axioms(matrix_path, samples, seed, tol);
  } catch (const InvalidInput& e) {
    std::cerr << "invalid: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
