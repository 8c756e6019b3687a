#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>

#include "json.hpp"

#include "nloc/compactops.hpp"
#include "nloc/error.hpp"
#include "nloc/grid_io.hpp"
#include "nloc/maximize.hpp"
#include "nloc/parallel.hpp"
#include "nloc/poincare.hpp"
#include "nloc/rearrange.hpp"
#include "nloc/spectral.hpp"
#include "nloc/verify.hpp"

#ifndef NLOC_VERSION
#define NLOC_VERSION "unknown"
#endif

namespace nloc::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Context {
  const Config& config;
  fs::path out;
  std::vector<std::string> written;
  bool strict = false;

  void write(const std::string& name, const std::string& contents) {
    atomic_write(out / name, contents);
    written.push_back(name);
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
  // Suite tolerances shrink a hundredfold under the strict profile.
  double tol(double base) const { return strict ? base * 1e-2 : base; }
};

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
    text_ += "\n";
  }
  Csv& row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
    text_ += "\n";
    return *this;
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

std::string num(double x) { return format_double(x); }

std::string shift_text(const Multi& s, int dim) {
  return dim == 1 ? std::to_string(s[0]) : std::to_string(s[0]) + ";" + std::to_string(s[1]);
}

// Gnuplot script over a CSV written next to it; column 1 is the abscissa.
std::string plot_script(const std::string& csv, const std::string& xlabel, const std::vector<std::pair<int, std::string>>& ys,
                        bool logx, bool logy) {
  std::string s = "set datafile separator ','\nset key autotitle columnhead\nset xlabel '" + xlabel + "'\n";
  if (logx) s += "set logscale x\n";
  if (logy) s += "set logscale y\n";
  s += "plot";
  for (std::size_t i = 0; i < ys.size(); ++i)
    s += std::string(i ? ", \\\n    " : " ") + "'" + csv + "' using 1:" + std::to_string(ys[i].first) +
         " with linespoints title '" + ys[i].second + "'";
  return s + "\n";
}

Rng make_rng(const Config& c) { return Rng(static_cast<std::uint64_t>(c.integer("run", "seed"))); }

int positive_int(const Config& c, const std::string& section, const std::string& key) {
  const long long v = c.integer(section, key);
  if (v < 1) throw ConfigError(section + "." + key, "must be at least 1");
  return static_cast<int>(v);
}

std::vector<double> positive_list(const Config& c, const std::string& section, const std::string& key) {
  const std::vector<double> v = c.numbers(section, key);
  if (v.empty()) throw ConfigError(section + "." + key, "needs at least one value");
  for (double x : v)
    if (!(x > 0.0)) throw ConfigError(section + "." + key, "values must be positive");
  return v;
}

json record_json(const SuiteRecord& r) {
  json values = json::object();
  for (const auto& [k, v] : r.values) values[k] = v;
  return {{"name", r.name},       {"checks", r.checks}, {"violations", r.violations}, {"worst_excess", r.worst_excess},
          {"tol", r.tol},         {"passed", r.passed()}, {"values", values},         {"note", r.note}};
}

int kernel_info(Context& ctx) {
  const Kernel k = make_kernel(ctx.config);
  const int levels = static_cast<int>(ctx.config.integer("kernel", "levels"));
  if (levels < 2) throw ConfigError("kernel.levels", "must be at least 2");
  const std::vector<double> deltas = positive_list(ctx.config, "kernel", "deltas");
  for (std::size_t i = 1; i < deltas.size(); ++i)
    if (!(deltas[i] < deltas[i - 1])) throw ConfigError("kernel.deltas", "must be strictly decreasing");
  const double threshold = ctx.config.number("kernel", "divergence_threshold");
  if (!(threshold > 0.0)) throw ConfigError("kernel.divergence_threshold", "must be positive");

  const LevyReport levy = check_levy(k, levels);
  const NonIntegrabilityReport ni = check_non_integrable(k, deltas, threshold);
  auto rec = [&](const std::string& q, std::vector<double> v, const std::string& flag) {
    return json{{"kernel", k.name()}, {"quantity", q}, {"values", v}, {"flag", flag}};
  };
  json records = json::array();
  records.push_back(rec("levy-integral", levy.estimates,
                        levy.a1_violated ? "A1-violated" : levy.converged ? "converged" : "not-converged"));
  records.push_back(rec("levy-tail", {levy.tail, levy.tail_uncertainty}, ""));
  records.push_back(rec("truncated-l1", ni.l1_norms, ni.divergent ? "divergent" : "bounded"));
  records.push_back(rec("truncation-radii", ni.deltas, ""));
  records.push_back(rec("total-mass", {k.total_mass()}, k.integrable() ? "integrable" : "non-integrable"));
  records.push_back(rec("singular-exponent", {k.singular_exponent()}, ""));
  ctx.write_json("kernel_info.json", records);
  return 0;
}

int kappa_table(Context& ctx) {
  const FormOperator<double> op(make_kernel(ctx.config), make_grid(ctx.config));
  const RearrangementTable table(op);
  Csv csv({"r", "d", "kappa"});
  for (double r : ctx.config.numbers("kappa", "r")) {
    if (!(r >= 0.0)) throw ConfigError("kappa.r", "values must be nonnegative");
    csv.row({num(r), num(table.d_of_r(r)), num(table.kappa_of_r(r))});
  }
  ctx.write("kappa_table.csv", csv.str());
  ctx.write("kappa_table.gp", plot_script("kappa_table.csv", "r", {{2, "d_j(r)"}, {3, "kappa(r)"}}, true, true));
  return 0;
}

int jensen(Context& ctx) {
  const FormOperator<double> op(make_kernel(ctx.config), make_grid(ctx.config));
  const std::vector<double> deltas = positive_list(ctx.config, "jensen", "delta");
  const int samples = positive_int(ctx.config, "jensen", "samples");
  Rng rng = make_rng(ctx.config);
  Csv csv({"delta", "S", "l1_norm", "max_ratio", "violations"});
  int total = 0;
  for (double delta : deltas) {
    const TruncatedKernel trunc = truncate(op.kernel(), delta);
    const JensenWeight jw = jensen_weight(op, delta);
    double worst = 0.0;
    int bad = 0;
    for (int t = 0; t < samples; ++t) {
      const JensenReport r = jensen_gap(op, jw, trunc, random_function(op.grid(), rng));
      if (r.rhs > 0.0) worst = std::max(worst, r.lhs / r.rhs);
      if (r.lhs > r.rhs * (1.0 + ctx.tol(1e-10))) ++bad;
    }
    total += bad;
    csv.row({num(delta), num(jw.mass), num(trunc.l1_norm), num(worst), std::to_string(bad)});
  }
  ctx.write("jensen.csv", csv.str());
  ctx.write("jensen.gp", plot_script("jensen.csv", "delta", {{2, "S"}, {3, "l1_norm"}}, true, true));
  return total == 0 ? 0 : 1;
}

int eigs(Context& ctx) {
  const Grid g = make_grid(ctx.config);
  const FormOperator<double> op(make_kernel(ctx.config), g);
  const CellSet mask = make_mask(ctx.config, g);
  const Index count = positive_int(ctx.config, "eigs", "count");
  if (count > mask.count()) throw ConfigError("eigs.count", "exceeds the number of mask cells");
  const std::string m = ctx.config.text("eigs", "method");
  EigenMethod method = EigenMethod::automatic;
  if (m == "dense") {
    method = EigenMethod::dense;
  } else if (m == "iterative") {
    method = EigenMethod::iterative;
  } else if (m != "automatic") {
    throw ConfigError("eigs.method", "must be dense, iterative or automatic");
  }
  EigenOptions opt;
  opt.tol = ctx.strict ? 1e-10 : 1e-9;
  const Spectrum s = eigensolve(op, mask, count, method, opt);
  ctx.write_json("eigs.json", {{"lambda", s.eigenvalues},
                               {"residual", s.residuals},
                               {"upper", s.upper},
                               {"degenerate-with-next", s.degenerate_with_next},
                               {"h", g.h()},
                               {"mask-measure", s.mask_measure},
                               {"method", s.method == EigenMethod::dense ? "dense" : "iterative"},
                               {"restarts", s.restarts}});
  return 0;
}

int poincare(Context& ctx) {
  const Grid g = make_grid(ctx.config);
  const FormOperator<double> op(make_kernel(ctx.config), g);
  Csv csv({"a", "m", "delta", "C_a", "C_tilde_a", "lambda1_slab"});
  for (double a : positive_list(ctx.config, "poincare", "a")) {
    const ConvolutionChain chain = build_chain(op, a);
    const SlabConstant c = constant_Ca(chain, a);
    const CellSet slab = CellSet::slab(g, a);
    if (slab.empty()) throw ConfigError("poincare.a", "slab of half-width " + num(a) + " holds no cells");
    const double lambda = eigensolve(op, slab, 1).eigenvalues[0];
    csv.row({num(a), std::to_string(chain.depth), num(chain.delta), num(c.c_a), num(constant_Ca_tilde(op.kernel(), a)),
             num(lambda)});
  }
  ctx.write("poincare.csv", csv.str());
  ctx.write("poincare.gp",
            plot_script("poincare.csv", "a", {{4, "C_a"}, {5, "C_tilde_a"}, {6, "lambda1"}}, true, true));
  return 0;
}

int dichotomy(Context& ctx) {
  const Grid g = make_grid(ctx.config);
  std::vector<double> eps = ctx.config.numbers("dichotomy", "epsilon");
  if (eps.empty()) eps = dyadic_epsilons(10);
  for (double e : eps)
    if (!(e > 0.0)) throw ConfigError("dichotomy.epsilon", "values must be positive");
  const std::vector<double> ns = positive_list(ctx.config, "dichotomy", "n");
  const Index window = positive_int(ctx.config, "dichotomy", "window");
  const std::string family = ctx.config.text("dichotomy", "family");
  if (family != "vanishing" && family != "bump")
    throw ConfigError("dichotomy.family", "must be vanishing or bump");
  Csv csv({"n", "epsilon", "mass_above", "shift", "post_shift_mass"});
  std::vector<DichotomyRow> rows;
  try {
    rows = dichotomy_rows(g, family, ns, eps, window);
  } catch (const Error& e) {
    if (e.code() != "domain-error") throw;
    throw ConfigError("grid.half_widths", e.what());
  }
  for (const DichotomyRow& r : rows)
    csv.row({num(r.n), num(r.epsilon), num(r.mass_above), shift_text(r.shift, g.dim()), num(r.post_shift_mass)});
  ctx.write("dichotomy.csv", csv.str());
  ctx.write("dichotomy.gp", plot_script("dichotomy.csv", "n", {{3, "mass above epsilon"}, {5, "post-shift mass"}},
                                        true, false));
  return 0;
}

int maximize(Context& ctx) {
  const Grid g = make_grid(ctx.config);
  const FormOperator<double> op(make_kernel(ctx.config), g);
  const Nonlinearity f = make_nonlinearity(ctx.config);
  const AscentParams params = make_ascent(ctx.config);
  const int starts = static_cast<int>(ctx.config.integer("ascent", "starts"));
  const MultistartResult m =
      multistart(op, f, params, static_cast<std::uint64_t>(ctx.config.integer("run", "seed")), starts);
  const AscentState& best = m.runs.at(m.best);
  json shifts = json::array();
  for (const Multi& s : best.shifts) shifts.push_back(g.dim() == 1 ? json{s[0]} : json{s[0], s[1]});
  json runs = json::array();
  for (const AscentState& r : m.runs)
    runs.push_back({{"phi", r.phi}, {"iterations", r.iterations}, {"status", r.status}, {"grad-norm", r.grad_norm}});
  ctx.write("maximizer.csv", to_csv(best.u));
  ctx.write("maximizer.bin", to_binary(best.u));
  Csv hist({"iteration", "phi"});
  for (std::size_t i = 0; i < best.history.size(); ++i) hist.row({std::to_string(i), num(best.history[i])});
  ctx.write("history.csv", hist.str());
  ctx.write("history.gp", plot_script("history.csv", "iteration", {{2, "Phi"}}, false, false));
  ctx.write_json("maximize.json", {{"mF-hat", m.m_hat()},
                                   {"iterations", best.iterations},
                                   {"history", best.history},
                                   {"final-function", "maximizer.csv"},
                                   {"recenter-shifts", shifts},
                                   {"status", best.status},
                                   {"grad-norm", best.grad_norm},
                                   {"spread", m.spread},
                                   {"nonlinearity", f.name()},
                                   {"runs", runs}});
  return 0;
}

int verify_all(Context& ctx) {
  const FormOperator<double> op(make_kernel(ctx.config), make_grid(ctx.config));
  const Nonlinearity f = make_nonlinearity(ctx.config);
  const int samples = positive_int(ctx.config, "verify", "samples");
  const std::vector<double> deltas = positive_list(ctx.config, "verify", "delta");
  const std::vector<double> slabs = positive_list(ctx.config, "verify", "a");
  Rng rng = make_rng(ctx.config);

  std::vector<SuiteRecord> suites;
  suites.push_back(oracle_suite(op, 5, rng, ctx.tol(1e-12)));
  suites.push_back(jensen_suite(op, deltas, samples, rng, ctx.tol(1e-10)));
  suites.push_back(killing_suite(op, samples, rng, ctx.tol(1e-9)));
  suites.push_back(truncation_suite(op, samples, rng, ctx.tol(1e-10)));
  suites.push_back(iteration_suite(op, samples, rng, ctx.tol(1e-10)));
  suites.push_back(poincare_suite(op, slabs, samples, rng, ctx.tol(1e-10)));
  const MultistartResult m =
      multistart(op, f, make_ascent(ctx.config), static_cast<std::uint64_t>(ctx.config.integer("run", "seed")),
                 static_cast<int>(ctx.config.integer("ascent", "starts")));
  suites.push_back(scaling_suite(op, f, m.m_hat(), samples, rng, ctx.tol(1e-6)));
  suites.back().note = "m_hat from " + std::to_string(m.runs.size()) + " ascents, best status " + m.runs[m.best].status;
  suites.push_back(gradient_suite(op, f, 3, 10, rng, 1e-5));
  if (op.kernel().integrable()) suites.push_back(norm_equivalence_suite(op, samples, rng, ctx.tol(1e-10)));

  bool ok = true;
  json list = json::array();
  for (const SuiteRecord& s : suites) {
    ok = ok && s.passed();
    list.push_back(record_json(s));
    std::cout << (s.passed() ? "[PASS] " : "[FAIL] ") << s.name << ": " << s.checks << " checks, " << s.violations
              << " violations, worst excess " << s.worst_excess << "\n";
  }
  ctx.write_json("verify.json", {{"kernel", op.kernel().name()}, {"passed", ok}, {"suites", list}});
  return ok ? 0 : 1;
}

}  // namespace

int run(const std::string& command, const Config& config, const fs::path& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string profile = config.text("run", "tolerance_profile");
  if (profile != "default" && profile != "strict")
    throw ConfigError("run.tolerance_profile", "must be default or strict");
  const long long threads = config.integer("run", "threads");
  if (threads < 0) throw ConfigError("run.threads", "must be nonnegative");
  set_thread_count(static_cast<int>(threads));

  Context ctx{config, out, {}, profile == "strict"};
  fs::create_directories(out);
  int status = 0;
  if (command == "kernel-info") {
    status = kernel_info(ctx);
  } else if (command == "kappa-table") {
    status = kappa_table(ctx);
  } else if (command == "jensen") {
    status = jensen(ctx);
  } else if (command == "eigs") {
    status = eigs(ctx);
  } else if (command == "poincare") {
    status = poincare(ctx);
  } else if (command == "dichotomy") {
    status = dichotomy(ctx);
  } else if (command == "maximize") {
    status = maximize(ctx);
  } else if (command == "verify-all") {
    status = verify_all(ctx);
  } else {
    throw ConfigError("command", "unknown command '" + command + "'");
  }

  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config.hash(command)));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const json manifest{{"command", command},
                      {"config-hash", std::string("fnv1a64:") + hash},
                      {"version", NLOC_VERSION},
                      {"wall-time-s", wall},
                      {"seed", config.integer("run", "seed")},
                      {"exit-status", status},
                      {"outputs", ctx.written}};
  atomic_write(out / "manifest.json", manifest.dump(2) + "\n");
  return status;
}

}  // namespace nloc::cli
