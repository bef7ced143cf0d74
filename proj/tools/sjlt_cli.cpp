// Command-line front end for the sparse JL library.
//
//   sjlt params    --epsilon E --delta D --dim N [--seed S]
//   sjlt transform --input FILE [--output FILE] [--path phi|hg|auto|l1] [--report-norms]
//   sjlt sketch    --dim N [--strict] [--merge FILE...] [--output FILE]
//   sjlt verify    [--check distortion|goodness|tail|intersection] [--path phi|hg|hash] [--family F]
//   sjlt bench
//
// Data goes to stdout (or --output); warnings and diagnostics go to stderr.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sjlt/sjlt.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

struct CommonOptions {
  double epsilon = 0.5;
  double delta = 0.05;
  std::uint64_t seed = kDefaultSeed;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--epsilon", o.epsilon, "Target relative distortion, 0 < epsilon < 1")->capture_default_str();
  cmd->add_option("--delta", o.delta, "Failure probability budget, 0 < delta < 0.1")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
}

/// stdout unless a path other than "-" is given.
class OutputSink {
 public:
  explicit OutputSink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void print_warnings(const sjlt::JLParams& p) {
  for (const auto& w : sjlt::validate_assumptions(p)) std::cerr << "warning: " << w.message << '\n';
}

// --- params -----------------------------------------------------------------

int cmd_params(const CommonOptions& o, std::uint64_t dim) {
  const sjlt::JLParams p = sjlt::derive_params(o.epsilon, o.delta, dim, o.seed);
  std::cout << sjlt::to_record(p);
  print_warnings(p);
  return 0;
}

// --- transform --------------------------------------------------------------

struct TransformOptions {
  std::string input;
  std::string output = "-";
  std::string path = "auto";
  bool report_norms = false;
};

int cmd_transform(const CommonOptions& o, const TransformOptions& t) {
  sjlt::VectorFile file;
  if (t.input == "-") {
    file = sjlt::read_vector_file(std::cin);
  } else {
    std::ifstream in(t.input);
    if (!in) throw std::runtime_error("cannot open input file '" + t.input + "'");
    file = sjlt::read_vector_file(in);
  }
  const sjlt::JLParams p = sjlt::derive_params(o.epsilon, o.delta, file.vec.dim, o.seed);
  const sjlt::SparseVector& x = file.vec;

  std::vector<double> y;
  std::string taken = t.path;
  if (t.path == "phi") {
    y = sjlt::phi_apply(sjlt::SparseJL(p), x);
  } else if (t.path == "hg") {
    y = sjlt::hg_apply(sjlt::HadamardJL(p), x);
  } else if (t.path == "l1") {
    y = sjlt::L1Embed(p).project(x);
  } else {
    sjlt::AutoResult r = sjlt::auto_apply(p, x);
    y = std::move(r.y);
    taken = sjlt::to_string(r.path);
    if (r.hg_unavailable) std::cerr << "note: hg path unavailable for d=" << p.d << ", using phi\n";
  }

  OutputSink out(t.output);
  sjlt::write_dense(out.stream(), y);

  if (t.report_norms) {
    double x_sq = 0.0;
    for (const auto& e : x.coalesced().entries) x_sq += e.value * e.value;
    std::cerr << "path=" << taken << '\n';
    std::cerr << "input_sq_norm=" << sjlt::format_real(x_sq) << '\n';
    if (t.path == "l1") {
      double s = 0.0;
      for (double v : y) s += std::abs(v);
      const double est = s / (sjlt::L1Embed::beta0 * std::sqrt(static_cast<double>(y.size())));
      std::cerr << "l1_estimate=" << sjlt::format_real(est) << '\n';
      std::cerr << "relative_distortion=" << sjlt::format_real(x_sq > 0 ? (est - std::sqrt(x_sq)) / std::sqrt(x_sq) : 0.0)
                << '\n';
    } else {
      const double y_sq = sjlt::sq_norm(y);
      std::cerr << "output_sq_norm=" << sjlt::format_real(y_sq) << '\n';
      std::cerr << "relative_distortion=" << sjlt::format_real(x_sq > 0 ? (y_sq - x_sq) / x_sq : 0.0) << '\n';
    }
  }
  return 0;
}

// --- sketch -----------------------------------------------------------------

struct SketchOptions {
  std::uint64_t dim = 0;
  std::string path = "phi";
  bool strict = false;
  std::vector<std::string> merge;
  std::string output = "-";
};

sjlt::SketchRecord record_of(const sjlt::Sketch<sjlt::SparseJL>& s) {
  const auto& t = s.transform();
  return {t.seed(), t.k(), t.input_dim(), t.c(), s.update_count(), s.values()};
}

int cmd_sketch(const CommonOptions& o, const SketchOptions& so) {
  if (so.path != "phi") {
    throw std::invalid_argument("sketch supports only --path phi (the replicated hash is the streaming transform)");
  }

  if (!so.merge.empty()) {
    std::vector<sjlt::SketchRecord> records;
    for (const auto& f : so.merge) {
      std::ifstream in(f);
      if (!in) throw std::runtime_error("cannot open sketch file '" + f + "'");
      try {
        records.push_back(sjlt::read_sketch(in));
      } catch (const sjlt::ParseError& e) {
        throw std::runtime_error(f + ": " + e.what());
      }
    }
    const auto& r0 = records.front();
    const sjlt::SparseJL t(r0.k, r0.c, r0.dim, r0.seed);
    sjlt::Sketch<sjlt::SparseJL> acc(t);
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      if (r.seed != r0.seed || r.k != r0.k || r.dim != r0.dim || r.c != r0.c) {
        throw sjlt::IdentityMismatch("sketch '" + so.merge[i] + "' was built with a different projection");
      }
      sjlt::Sketch<sjlt::SparseJL> s(t);
      s.assign(r.values, r.updates);
      acc.merge(s);
    }
    OutputSink out(so.output);
    sjlt::write_sketch(out.stream(), record_of(acc));
    return 0;
  }

  if (so.dim == 0) throw std::invalid_argument("sketch needs --dim");
  const sjlt::JLParams p = sjlt::derive_params(o.epsilon, o.delta, so.dim, o.seed);
  const sjlt::SparseJL t(p);
  sjlt::Sketch<sjlt::SparseJL> s(t);
  std::string line;
  std::uint64_t lineno = 0;
  std::uint64_t rejected = 0;
  while (std::getline(std::cin, line)) {
    ++lineno;
    try {
      const auto u = sjlt::parse_update_line(line, lineno);
      if (!u) continue;
      if (u->index >= so.dim) {
        throw sjlt::ParseError(lineno, "index " + std::to_string(u->index) + " out of range for dimension " +
                                           std::to_string(so.dim));
      }
      s.update(u->index, u->value);
    } catch (const sjlt::ParseError& e) {
      if (so.strict) throw;
      std::cerr << "skipped: " << e.what() << '\n';
      ++rejected;
    }
  }
  OutputSink out(so.output);
  sjlt::write_sketch(out.stream(), record_of(s));
  if (rejected > 0) std::cerr << "rejected_lines=" << rejected << '\n';
  return 0;
}

// --- verify -----------------------------------------------------------------

struct VerifyOptions {
  std::string check = "distortion";
  std::string path = "phi";
  std::string family = "sphere";
  std::uint64_t dim = 0;
  std::uint64_t trials = 2000;
  std::uint64_t pairs = 10000;
};

/// Smallest power of two strictly above the hg dimension threshold.
std::uint64_t hg_dimension(const sjlt::JLParams& p) {
  std::uint64_t d = p.b;
  while (static_cast<double>(d) <= p.hadamard_threshold()) d <<= 1;
  return d;
}

int cmd_verify(const CommonOptions& o, const VerifyOptions& v) {
  const bool needs_hg = v.check == "tail" || (v.check == "distortion" && v.path == "hg");
  std::uint64_t dim = v.dim;
  if (dim == 0) {
    const sjlt::JLParams probe = sjlt::derive_params(o.epsilon, o.delta, 1, o.seed);
    dim = needs_hg ? hg_dimension(probe) : (v.check == "goodness" || v.path == "hash" ? 64 : 256);
  }
  const sjlt::JLParams p = sjlt::derive_params(o.epsilon, o.delta, dim, o.seed);
  print_warnings(p);

  if (v.check == "intersection") {
    const sjlt::ColumnIntersectionReport r =
        sjlt::max_column_intersection(sjlt::SparseJL(p), p.epsilon, v.pairs, p.seed);
    std::cout << "check=intersection\n" << sjlt::to_record(r);
    return 0;
  }

  sjlt::DistortionReport r;
  if (v.check == "distortion") {
    sjlt::VerifyPath path = sjlt::VerifyPath::kPhi;
    if (v.path == "hg") {
      path = sjlt::VerifyPath::kHg;
    } else if (v.path == "hash") {
      path = sjlt::VerifyPath::kHash;
    } else if (v.path != "phi") {
      throw std::invalid_argument("verify --path must be phi, hg or hash");
    }
    r = sjlt::estimate_failure_rate(p, path, v.trials, sjlt::parse_family(v.family), o.seed);
  } else if (v.check == "goodness") {
    r = sjlt::goodness_rate(p, v.trials, o.seed);
  } else if (v.check == "tail") {
    r = sjlt::infnorm_tail_rate(p, v.trials, sjlt::SparseVector::basis(p.d, 0), o.seed);
  } else {
    throw std::invalid_argument("unknown check '" + v.check + "'");
  }
  std::cout << sjlt::to_record(r);
  return r.passed() ? 0 : 1;
}

// --- bench ------------------------------------------------------------------

struct BenchOptions {
  int reps = 3;
  std::uint64_t min_log_nnz = 12;
  std::uint64_t max_log_nnz = 15;
  std::uint64_t log_d = 20;
  bool hg = true;
};

int cmd_bench(const CommonOptions& o, const BenchOptions& b) {
  std::ostream& out = std::cout;
  const sjlt::JLParams p = sjlt::derive_params(o.epsilon, o.delta, 1, o.seed);
  out << "# k=" << p.k << " c=" << p.c << " b=" << p.b << "\n";
  out << "transform\td\tnnz\tseconds\tns_per_nnz\tratio_to_prev\n";
  double prev = 0.0;
  for (std::uint64_t l = b.min_log_nnz; l <= b.max_log_nnz; ++l) {
    const auto t = sjlt::time_phi_apply(o.epsilon, o.delta, 1ULL << b.log_d, 1ULL << l, o.seed, b.reps);
    out << "phi\t" << t.d << '\t' << t.nnz << '\t' << sjlt::format_real(t.seconds) << '\t'
        << sjlt::format_real(t.seconds * 1e9 / static_cast<double>(t.nnz)) << '\t'
        << (prev > 0 ? sjlt::format_real(t.seconds / prev) : "-") << '\n';
    prev = t.seconds;
  }
  prev = 0.0;
  for (std::uint64_t ld = 16; ld <= b.log_d; ld += 2) {
    const auto t = sjlt::time_phi_apply(o.epsilon, o.delta, 1ULL << ld, 1ULL << b.min_log_nnz, o.seed, b.reps);
    out << "phi\t" << t.d << '\t' << t.nnz << '\t' << sjlt::format_real(t.seconds) << '\t'
        << sjlt::format_real(t.seconds * 1e9 / static_cast<double>(t.nnz)) << '\t'
        << (prev > 0 ? sjlt::format_real(t.seconds / prev) : "-") << '\n';
    prev = t.seconds;
  }
  if (b.hg) {
    prev = 0.0;
    const std::uint64_t d0 = hg_dimension(p);
    for (std::uint64_t d = d0; d <= 4 * d0; d *= 2) {
      const auto t = sjlt::time_hg_apply_dense(o.epsilon, o.delta, d, o.seed, b.reps);
      out << "hg_dense\t" << t.d << '\t' << t.nnz << '\t' << sjlt::format_real(t.seconds) << '\t'
          << sjlt::format_real(t.seconds * 1e9 / static_cast<double>(t.nnz)) << '\t'
          << (prev > 0 ? sjlt::format_real(t.seconds / prev) : "-") << '\n';
      prev = t.seconds;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse Johnson-Lindenstrauss transforms, turnstile sketches and Monte Carlo checks"};
  app.require_subcommand(1);

  CommonOptions common;

  auto* params = app.add_subcommand("params", "Print derived constants as name=value lines");
  std::uint64_t params_dim = 0;
  add_common(params, common);
  params->add_option("--dim,-d", params_dim, "Input dimension")->required();

  auto* transform = app.add_subcommand("transform", "Project a vector file to k dimensions");
  TransformOptions topt;
  add_common(transform, common);
  transform->add_option("--input,-i", topt.input, "Vector file ('-' for stdin)")->required();
  transform->add_option("--output,-o", topt.output, "Output file ('-' for stdout)");
  transform->add_option("--path", topt.path, "Transform path")
      ->check(CLI::IsMember({"phi", "hg", "auto", "l1"}))
      ->capture_default_str();
  transform->add_flag("--report-norms", topt.report_norms, "Print norms and distortion to stderr");

  auto* sketch = app.add_subcommand("sketch", "Sketch '<index> <delta>' updates from stdin, or merge sketches");
  SketchOptions sopt;
  add_common(sketch, common);
  sketch->add_option("--dim,-d", sopt.dim, "Input dimension");
  sketch->add_option("--path", sopt.path, "Transform path (phi only)")->capture_default_str();
  sketch->add_flag("--strict", sopt.strict, "Abort on the first malformed line");
  sketch->add_option("--merge", sopt.merge, "Serialized sketches to merge")->expected(1, -1);
  sketch->add_option("--output,-o", sopt.output, "Output file ('-' for stdout)");

  auto* verify = app.add_subcommand("verify", "Run a Monte Carlo check and report against its bound");
  VerifyOptions vopt;
  add_common(verify, common);
  verify->add_option("--check", vopt.check, "distortion | goodness | tail | intersection")
      ->check(CLI::IsMember({"distortion", "goodness", "tail", "intersection"}))
      ->capture_default_str();
  verify->add_option("--path", vopt.path, "phi | hg | hash")->capture_default_str();
  verify->add_option("--family", vopt.family, "sphere | e1 | heavy | flat | zero")->capture_default_str();
  verify->add_option("--dim,-d", vopt.dim, "Input dimension (0 picks a default for the check)");
  verify->add_option("--trials", vopt.trials, "Trials")->capture_default_str();
  verify->add_option("--pairs", vopt.pairs, "Column pairs for the intersection check")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Time phi_apply against nnz and d, and dense hg_apply against d");
  BenchOptions bopt;
  add_common(bench, common);
  bench->add_option("--reps", bopt.reps, "Repetitions (best is reported)")->capture_default_str();
  bench->add_option("--min-log-nnz", bopt.min_log_nnz)->capture_default_str();
  bench->add_option("--max-log-nnz", bopt.max_log_nnz)->capture_default_str();
  bench->add_option("--log-d", bopt.log_d)->capture_default_str();
  bench->add_flag("!--no-hg", bopt.hg, "Skip the hg timings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (params->parsed()) return cmd_params(common, params_dim);
    if (transform->parsed()) return cmd_transform(common, topt);
    if (sketch->parsed()) return cmd_sketch(common, sopt);
    if (verify->parsed()) return cmd_verify(common, vopt);
    if (bench->parsed()) return cmd_bench(common, bopt);
  } catch (const sjlt::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
