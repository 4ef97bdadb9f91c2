#include "specinf/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "specinf/errors.hpp"
#include "specinf/highrank.hpp"
#include "specinf/modelio.hpp"
#include "specinf/parallel.hpp"

namespace specinf::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EstimatorFlags {
  std::string quantization = "experimental";
  double epsilon = 0.1;
  double c = 0.0;
  std::string shift = "sdp";
  int sdp_iters = 2000;
  int mf_iters = 1000;
  int bp_iters = 200;
  double bp_damping = 0.5;
  int cap = 20;
  int threads = default_thread_count();
  CLI::Option* quantization_opt = nullptr;

  void add_to(CLI::App& app, bool with_cap) {
    quantization_opt =
        app.add_option("--quantization", quantization, "c policy: experimental | theorem | fixed")
            ->capture_default_str();
    app.add_option("--epsilon", epsilon, "target accuracy for the theorem policy")->capture_default_str();
    app.add_option("--c", c, "interval for the fixed policy");
    app.add_option("--shift", shift, "diagonal shift: sdp | zero | max-eig | diag-dominant")
        ->capture_default_str();
    app.add_option("--sdp-iters", sdp_iters, "SDP iteration limit")->capture_default_str();
    app.add_option("--mf-iters", mf_iters, "mean-field sweeps")->capture_default_str();
    app.add_option("--bp-iters", bp_iters, "BP iterations")->capture_default_str();
    app.add_option("--bp-damping", bp_damping, "BP damping in [0, 1)")->capture_default_str();
    if (with_cap) app.add_option("--cap", cap, "largest n for the exact oracle")->capture_default_str();
    app.add_option("--threads", threads, "worker threads (1 is the deterministic reference)")
        ->capture_default_str();
  }

  CompareOptions build() const {
    if (threads < 1) throw UsageError("--threads must be >= 1");
    if (quantization == "fixed" && !(c > 0.0)) throw UsageError("--quantization fixed needs --c > 0");
    if (!(epsilon > 0.0 && epsilon <= 0.5)) throw UsageError("--epsilon must lie in (0, 0.5]");
    if (!(bp_damping >= 0.0 && bp_damping < 1.0)) throw UsageError("--bp-damping must lie in [0, 1)");
    CompareOptions o;
    QuantizationPolicy q;
    switch (parse_quantization_kind(quantization)) {
      case QuantizationPolicy::Kind::experimental: q = QuantizationPolicy::experimental(); break;
      case QuantizationPolicy::Kind::theorem: q = QuantizationPolicy::theorem_mode(epsilon); break;
      case QuantizationPolicy::Kind::fixed: q = QuantizationPolicy::fixed_interval(c); break;
    }
    o.spectral.quantization = q;
    o.lowrank = quantization_opt && quantization_opt->count() ? q : QuantizationPolicy::theorem_mode(epsilon);
    o.spectral.shift.kind = parse_shift_kind(shift);
    o.spectral.shift.sdp.max_iters = sdp_iters;
    o.spectral.threads = threads;
    o.mf.iters = mf_iters;
    o.bp.iters = bp_iters;
    o.bp.damping = bp_damping;
    o.exact.cap = cap;
    o.exact.threads = threads;
    return o;
  }
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> out;
  for (const auto& name : split_list(list)) out.push_back(parse_method(name));
  if (out.empty()) throw UsageError("--methods is empty");
  return out;
}

void write_records(const std::vector<ResultRecord>& records, const std::string& path, const std::string& format,
                   std::ostream& out) {
  const ResultFormat f = parse_result_format(format);
  if (path == "-") {
    if (f == ResultFormat::csv)
      write_results_csv(records, out);
    else
      write_results_json(records, out);
  } else {
    emit_results(records, path, f);
  }
}

std::string fmt(double v) { return format_log_z(v); }

GeneratorSpec build_spec(const std::string& family, int n, double p, bool has_p, double s, int sign,
                         const std::string& normalization, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.family = parse_family(family);
  spec.n = n;
  if (has_p) spec.p = p;
  spec.s = s;
  if (sign != 0) spec.sign = sign;
  spec.seed = seed;
  if (normalization == "n-plus-one")
    spec.normalization = Rank1Normalization::n_plus_one;
  else if (normalization == "offdiag")
    spec.normalization = Rank1Normalization::offdiag;
  else
    throw UsageError("--normalization must be n-plus-one or offdiag");
  return spec;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral approximations of the log-partition function of pairwise binary models", "specinf"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "print help for every subcommand");

  // generate
  auto* gen = app.add_subcommand("generate", "sample a random model and write it as UAI");
  std::string g_family = "er", g_norm = "n-plus-one", g_out = "-";
  int g_n = 10, g_sign = 0;
  double g_p = 0.5, g_s = 1.0;
  std::uint64_t g_seed = 0;
  gen->add_option("--family", g_family, "er | complete | complete-bipartite | grid | rank1")->capture_default_str();
  gen->add_option("--n", g_n, "number of variables")->capture_default_str();
  auto* g_p_opt = gen->add_option("--p", g_p, "ER edge probability");
  gen->add_option("--s", g_s, "coupling strength")->capture_default_str();
  gen->add_option("--sign", g_sign, "rank1 eigenvalue sign (+1 or -1); random when omitted");
  gen->add_option("--normalization", g_norm, "rank1 pair count: n-plus-one (n(n+1)) | offdiag (n(n-1))")
      ->capture_default_str();
  gen->add_option("--seed", g_seed, "random seed")->capture_default_str();
  gen->add_option("--out,-o", g_out, "output UAI path, - for stdout")->capture_default_str();

  // infer
  auto* inf = app.add_subcommand("infer", "estimate log Z of a UAI model");
  std::string i_model, i_method = "spectral-mf", i_out, i_format = "csv";
  bool i_oracle = false, i_no_timing = false;
  EstimatorFlags i_flags;
  inf->add_option("model,--model", i_model, "UAI model file")->required();
  inf->add_option("--method", i_method, "exact | lowrank | spectral-mf | mf | bp")->capture_default_str();
  i_flags.add_to(*inf, true);
  inf->add_flag("--oracle,!--no-oracle", i_oracle, "also run the exact oracle and report the error");
  inf->add_option("--out,-o", i_out, "optional record file");
  inf->add_option("--format", i_format, "record format: csv | json")->capture_default_str();
  inf->add_flag("--no-timing", i_no_timing, "write runtime_ms = 0 for byte-reproducible records");

  // exact
  auto* ex = app.add_subcommand("exact", "brute-force log Z of a UAI model");
  std::string e_model;
  int e_cap = 26, e_threads = 1;
  ex->add_option("model,--model", e_model, "UAI model file")->required();
  ex->add_option("--cap", e_cap, "largest n accepted")->capture_default_str();
  ex->add_option("--threads", e_threads, "worker threads")->capture_default_str();

  // shift
  auto* sh = app.add_subcommand("shift", "solve for the diagonal shift and print its certificate");
  std::string s_model, s_method = "sdp";
  int s_iters = 2000, s_samples = 1000;
  std::uint64_t s_seed = 0;
  bool s_absorb = false, s_print_d = false;
  sh->add_option("model,--model", s_model, "UAI model file")->required();
  sh->add_option("--method", s_method, "sdp | zero | max-eig | diag-dominant")->capture_default_str();
  sh->add_option("--sdp-iters", s_iters, "SDP iteration limit")->capture_default_str();
  sh->add_option("--samples", s_samples, "sign vectors for the weak-duality check")->capture_default_str();
  sh->add_option("--seed", s_seed, "seed for the sign vectors")->capture_default_str();
  sh->add_flag("--absorb", s_absorb, "absorb the fields into an extra variable first");
  sh->add_flag("--print-d", s_print_d, "print the shift vector");

  // bench
  auto* be = app.add_subcommand("bench", "seeded sweep over coupling strengths and methods");
  std::string b_family = "er", b_methods = "spectral-mf,mf,bp", b_out = "-", b_format = "csv", b_norm = "n-plus-one";
  std::vector<double> b_s = {0.5, 1.0, 1.5, 2.0, 2.5};
  int b_n = 14, b_seeds = 30, b_sign = 0;
  double b_p = 0.5;
  std::uint64_t b_seed_base = 0;
  bool b_oracle = true, b_no_timing = false, b_zero_fields = false;
  EstimatorFlags b_flags;
  be->add_option("--family", b_family, "er | complete | complete-bipartite | grid | rank1")->capture_default_str();
  be->add_option("--n", b_n, "number of variables")->capture_default_str();
  be->add_option("--p", b_p, "ER edge probability")->capture_default_str();
  be->add_option("--s", b_s, "coupling strengths (comma separated)")->delimiter(',')->capture_default_str();
  be->add_option("--sign", b_sign, "rank1 eigenvalue sign; random when omitted");
  be->add_option("--normalization", b_norm, "rank1 pair count: n-plus-one | offdiag")->capture_default_str();
  be->add_option("--seeds", b_seeds, "instances per coupling strength")->capture_default_str();
  be->add_option("--seed-base", b_seed_base, "first seed")->capture_default_str();
  be->add_option("--methods", b_methods, "comma-separated methods")->capture_default_str();
  be->add_flag("--oracle,!--no-oracle", b_oracle, "compute errors against the exact oracle when n <= cap")
      ->capture_default_str();
  be->add_flag("--zero-fields", b_zero_fields, "set theta = 0 after sampling");
  b_flags.add_to(*be, true);
  be->add_option("--out,-o", b_out, "result path, - for stdout")->capture_default_str();
  be->add_option("--format", b_format, "csv | json")->capture_default_str();
  be->add_flag("--no-timing", b_no_timing, "write runtime_ms = 0 for byte-reproducible files");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    for (auto* sub : app.get_subcommands())
      if (sub->parsed()) err << "run 'specinf " << sub->get_name() << " --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      const bool has_p = g_p_opt->count() > 0 || g_family == "er";
      if (g_sign != 0 && g_sign != 1 && g_sign != -1) throw UsageError("--sign must be +1 or -1");
      const GraphicalModel model =
          generate(build_spec(g_family, g_n, g_p, has_p, g_s, g_sign, g_norm, g_seed));
      if (g_out == "-") {
        write_uai(model, out);
      } else {
        std::ofstream f(g_out, std::ios::binary);
        if (!f) throw IoError("cannot write '" + g_out + "'");
        write_uai(model, f);
        if (!f) throw IoError("failed while writing '" + g_out + "'");
      }
      return kExitOk;
    }

    if (ex->parsed()) {
      if (e_threads < 1) throw UsageError("--threads must be >= 1");
      const GraphicalModel model = read_uai_file(e_model);
      out << fmt(exact_log_z(model, {e_cap, e_threads}).log_z) << '\n';
      return kExitOk;
    }

    if (inf->parsed()) {
      const CompareOptions opts = i_flags.build();
      const Method method = parse_method(i_method);
      const GraphicalModel model = read_uai_file(i_model);
      const auto records = compare_methods(model, {method}, i_oracle && method != Method::exact, opts);
      const MethodRecord& rec = records.front();
      out << fmt(rec.estimate.log_z) << '\n';
      if (rec.error) err << "abs_error " << fmt(*rec.error) << '\n';
      if (!i_out.empty()) {
        ResultRecord r;
        r.family = "uai";
        r.n = model.size();
        r.method = std::string(to_string(method));
        r.log_z = rec.estimate.log_z;
        r.error = rec.error;
        r.runtime_ms = i_no_timing ? 0.0 : rec.runtime_ms;
        r.diagnostics = rec.estimate.diagnostics.joined();
        write_records({r}, i_out, i_format, out);
      }
      return kExitOk;
    }

    if (sh->parsed()) {
      GraphicalModel model = read_uai_file(s_model);
      if (s_absorb) model = absorb_fields(model);
      const Matrix& a = model.coupling();
      Vector d;
      int iterations = 0;
      bool converged = true;
      switch (parse_shift_kind(s_method)) {
        case ShiftPolicy::Kind::sdp: {
          SdpOptions so;
          so.max_iters = s_iters;
          const SdpSolution sol = solve_diagonal_shift(a, so);
          d = sol.d;
          iterations = sol.iterations;
          converged = sol.converged;
          break;
        }
        case ShiftPolicy::Kind::zero: d = Vector::Zero(a.rows()); break;
        case ShiftPolicy::Kind::max_eig: d = baseline_shift_max_eig(a); break;
        case ShiftPolicy::Kind::diag_dominant: d = baseline_shift_diag_dominant(a); break;
        case ShiftPolicy::Kind::given: throw UsageError("shift method 'given' is not available here");
      }
      const FeasibilityReport rep = verify_feasibility(a, d, s_samples, s_seed);
      out << "n " << a.rows() << '\n';
      out << "trace " << fmt(rep.trace) << '\n';
      out << "lambda_max " << fmt(rep.lambda_max) << '\n';
      out << "feasible " << (rep.feasible ? "yes" : "no") << '\n';
      out << "dual_bound " << fmt(rep.dual_bound) << '\n';
      out << "dual_violations " << rep.dual_violations << '/' << rep.samples << '\n';
      if (parse_shift_kind(s_method) == ShiftPolicy::Kind::sdp)
        out << "iterations " << iterations << (converged ? " converged" : " stopped") << '\n';
      if (s_print_d) {
        out << "d";
        for (int i = 0; i < d.size(); ++i) out << ' ' << fmt(d[i]);
        out << '\n';
      }
      return kExitOk;
    }

    if (be->parsed()) {
      const CompareOptions base = b_flags.build();
      const std::vector<Method> methods = parse_methods(b_methods);
      if (b_seeds < 1) throw UsageError("--seeds must be >= 1");
      if (b_s.empty()) throw UsageError("--s is empty");
      if (b_sign != 0 && b_sign != 1 && b_sign != -1) throw UsageError("--sign must be +1 or -1");
      const bool oracle = b_oracle && b_n <= base.exact.cap;
      const std::size_t instances = b_s.size() * static_cast<std::size_t>(b_seeds);
      std::vector<std::vector<ResultRecord>> rows(instances);
      // Instance-level parallelism; each instance runs single-threaded.
      CompareOptions per = base;
      per.spectral.threads = 1;
      per.exact.threads = 1;
      for (double s : b_s)
        build_spec(b_family, b_n, b_p, true, s, b_sign, b_norm, 0);  // validate before spawning work
      parallel_for(instances, base.spectral.threads, [&](std::size_t k) {
        const double s = b_s[k / b_seeds];
        const std::uint64_t seed = b_seed_base + k % b_seeds;
        GraphicalModel model = generate(build_spec(b_family, b_n, b_p, true, s, b_sign, b_norm, seed));
        if (b_zero_fields) model = GraphicalModel(Vector::Zero(b_n), model.coupling(), model.log_offset());
        for (const MethodRecord& rec : compare_methods(model, methods, oracle, per)) {
          ResultRecord r;
          r.seed = seed;
          r.family = std::string(to_string(parse_family(b_family)));
          r.n = b_n;
          r.s = s;
          r.method = std::string(to_string(rec.method));
          r.log_z = rec.estimate.log_z;
          r.error = rec.error;
          r.runtime_ms = b_no_timing ? 0.0 : rec.runtime_ms;
          r.diagnostics = rec.estimate.diagnostics.joined();
          rows[k].push_back(std::move(r));
        }
      });
      std::vector<ResultRecord> all;
      for (auto& v : rows)
        for (auto& r : v) all.push_back(std::move(r));
      write_records(all, b_out, b_format, out);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace specinf::cli
