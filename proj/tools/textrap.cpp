#include "textrap/error.hpp"
#include "textrap/extrapolation.hpp"
#include "textrap/io.hpp"
#include "textrap/synthetic.hpp"
#include "textrap/tproduct.hpp"
#include "textrap/trre_tsvd.hpp"
#include "textrap/tsvd.hpp"
#include "textrap/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace textrap;

namespace {

/// Bad flag values or combinations; exits with status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string input;
  std::string output;
  std::string config;
  std::string report;
  std::uint64_t seed = 42;
};

Dims parse_dims(const std::string& text) {
  std::vector<std::size_t> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t pos = 0;
      const long long x = std::stoll(part, &pos);
      if (pos != part.size() || x <= 0) throw UsageError("");
      v.push_back(static_cast<std::size_t>(x));
    } catch (const std::exception&) {
      throw UsageError("--dims expects three positive integers n1,n2,n3, got '" + text + "'");
    }
  }
  if (v.size() != 3) throw UsageError("--dims expects three positive integers n1,n2,n3, got '" + text + "'");
  return Dims{v[0], v[1], v[2]};
}

json dims_json(const Dims& d) { return json::array({d.n1, d.n2, d.n3}); }

json tensor_json(const Tensor3& t) {
  return json{{"dims", dims_json(t.dims())}, {"data", t.data()}};
}

json stack_json(const Stack4& s) {
  json arr = json::array();
  for (const auto& t : s) arr.push_back(tensor_json(t));
  return arr;
}

/// Fills options not given on the command line from a JSON object whose keys
/// are long option names. Flags override the file; the file overrides defaults.
void apply_config(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config file " + path + " must hold a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    if (key == "config") continue;
    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr) throw UsageError("unknown config key '" + key + "' for " + sub.get_name());
    if (opt->count() > 0) continue;
    auto text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (value.is_array()) {
      if (key == "dims") {
        std::string joined;
        for (const auto& x : value) joined += (joined.empty() ? "" : ",") + text(x);
        opt->add_result(joined);
      } else {
        for (const auto& x : value) opt->add_result(text(x));
      }
    } else {
      opt->add_result(text(value));
    }
    opt->run_callback();
  }
}

void add_common(CLI::App& sub, Common& c, bool input, bool output) {
  if (input) sub.add_option("-i,--input", c.input, "Input file");
  if (output) sub.add_option("-o,--output", c.output, "Output path");
  sub.add_option("--config", c.config, "JSON file with option defaults");
  sub.add_option("--report", c.report, "Write the JSON report here instead of stdout");
  sub.add_option("--seed", c.seed, "Random seed");
}

void emit(const json& report, const Common& c) {
  const std::string text = report.dump(2) + "\n";
  if (c.report.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(c.report);
  if (!out) throw IoError("cannot write report " + c.report);
  out << text;
}

void require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw UsageError(flag + " is required");
}

// gen -----------------------------------------------------------------------

struct GenArgs {
  Common c;
  std::string dims = "16,16,3";
  std::string profile = "geometric";
  double rate = 1.0;
  double noise = 1e-3;
  std::size_t rhs_cols = 1;
  std::string solution = "gaussian";
};

int cmd_gen(const GenArgs& g) {
  require(g.c.output, "--output");
  IllPosedConfig cfg;
  cfg.dims = parse_dims(g.dims);
  const auto profile = parse_profile(g.profile);
  if (!profile) throw UsageError("unknown profile '" + g.profile + "' (geometric or algebraic)");
  cfg.profile = *profile;
  cfg.rate = g.rate;
  if (!(g.noise >= 0.0)) throw UsageError("--noise must be nonnegative");
  cfg.noise = g.noise;
  if (g.rhs_cols == 0) throw UsageError("--rhs-cols must be positive");
  cfg.rhs_cols = g.rhs_cols;
  const auto solution = parse_solution_kind(g.solution);
  if (!solution) throw UsageError("unknown solution kind '" + g.solution + "' (gaussian or source)");
  cfg.solution = *solution;

  Rng rng(g.c.seed);
  const IllPosedProblem p = generate_ill_posed(cfg, rng);
  const fs::path dir(g.c.output);
  fs::create_directories(dir);
  write_tns3(p.a, dir / "A.tns3");
  write_tns3(p.b, dir / "B.tns3");
  write_tns3(p.x_true, dir / "Xtrue.tns3");

  json r;
  r["command"] = "gen";
  r["seed"] = g.c.seed;
  r["dims"] = dims_json(cfg.dims);
  r["rhs_cols"] = cfg.rhs_cols;
  r["profile"] = std::string(profile_name(cfg.profile));
  r["rate"] = cfg.rate;
  r["noise"] = cfg.noise;
  r["solution"] = std::string(solution_kind_name(cfg.solution));
  r["b_exact_norm"] = frobenius_norm(p.b_exact);
  r["noise_norm"] = frobenius_norm(p.b - p.b_exact);
  r["files"] = {{"A", (dir / "A.tns3").string()}, {"B", (dir / "B.tns3").string()},
                {"Xtrue", (dir / "Xtrue.tns3").string()}};
  emit(r, g.c);
  return 0;
}

// tsvd ----------------------------------------------------------------------

struct TsvdArgs {
  Common c;
  std::optional<std::size_t> k;
};

int cmd_tsvd(const TsvdArgs& t) {
  require(t.c.input, "--input");
  require(t.c.output, "--output");
  const Tensor3 a = read_tns3(t.c.input);
  const std::size_t full = std::min(a.n1(), a.n2());
  if (t.k && (*t.k == 0 || *t.k > full))
    throw UsageError("--k must lie in [1, " + std::to_string(full) + "] for a " + to_string(a.dims()) + " tensor");

  TsvdFactors f;
  double orth_u = 0.0;
  double orth_v = 0.0;
  if (t.k) {
    f = ttsvd(a, *t.k).factors;
    orth_u = column_orthogonality_residual(f.u);
    orth_v = column_orthogonality_residual(f.v);
  } else {
    f = tsvd(a);
    orth_u = orthogonality_residual(f.u);
    orth_v = orthogonality_residual(f.v);
  }

  const fs::path dir(t.c.output);
  fs::create_directories(dir);
  write_tns3(f.u, dir / "U.tns3");
  write_tns3(f.s, dir / "S.tns3");
  write_tns3(f.v, dir / "V.tns3");

  json r;
  r["command"] = "tsvd";
  r["seed"] = t.c.seed;
  r["input"] = t.c.input;
  r["dims"] = dims_json(a.dims());
  r["k"] = f.rank;
  r["truncated"] = t.k.has_value() && *t.k < full;
  r["reconstruction_error"] = relative_error(reconstruct(f), a);
  r["orthogonality"] = {{"u", orth_u}, {"v", orth_v}};
  r["face_singular_values"] = f.face_singular_values;
  r["files"] = {{"U", (dir / "U.tns3").string()}, {"S", (dir / "S.tns3").string()},
                {"V", (dir / "V.tns3").string()}};
  const std::string text = r.dump(2) + "\n";
  std::ofstream(dir / "report.json") << text;
  emit(r, t.c);
  return 0;
}

// solve ---------------------------------------------------------------------

struct SolveArgs {
  Common c;
  std::string rhs;
  std::string xtrue;
  double tol = 1e-6;
  std::optional<std::size_t> k;
};

int cmd_solve(const SolveArgs& s) {
  require(s.c.input, "--input");
  require(s.rhs, "--rhs");
  if (!(s.tol > 0.0)) throw UsageError("--tol must be positive");
  const Tensor3 a = read_tns3(s.c.input);
  const Tensor3 b = read_tns3(s.rhs);
  std::optional<Tensor3> x_true;
  if (!s.xtrue.empty()) x_true = read_tns3(s.xtrue);

  SolverOptions opts;
  opts.tol = s.tol;
  opts.k_max = s.k;
  const auto start = std::chrono::steady_clock::now();
  const SolverReport rep = solve(a, b, opts);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json r;
  r["command"] = "solve";
  r["seed"] = s.c.seed;
  r["input"] = s.c.input;
  r["rhs"] = s.rhs;
  r["tol"] = s.tol;
  r["k_max"] = s.k ? json(*s.k) : json(nullptr);
  r["stop_reason"] = std::string(stop_reason_name(rep.stop_reason));
  r["final_k"] = rep.final_k;
  r["sequence_length"] = rep.sequence_length;
  r["iterations"] = rep.iterations();
  json history = json::array();
  json residuals = json::array();
  json etas = json::array();
  json errors = json::array();
  for (const auto& it : rep.history) {
    json h{{"k", it.k},
           {"residual_norm", it.residual_norm},
           {"eta", it.eta ? json(*it.eta) : json(nullptr)},
           {"solution_norm", it.solution_norm},
           {"shifted", it.shifted}};
    if (x_true) {
      const double e = relative_error(it.t_k, *x_true);
      h["relative_error"] = e;
      errors.push_back(e);
    }
    residuals.push_back(it.residual_norm);
    etas.push_back(h["eta"]);
    history.push_back(std::move(h));
  }
  r["residual_norms"] = residuals;
  r["eta_ratios"] = etas;
  if (x_true) {
    r["relative_errors"] = errors;
    r["final_relative_error"] = relative_error(rep.solution, *x_true);
  }
  r["history"] = history;
  r["seconds"] = seconds;
  if (!s.c.output.empty()) {
    write_tns3(rep.solution, s.c.output);
    r["output"] = s.c.output;
  }
  emit(r, s.c);
  return 0;
}

// extrapolate ---------------------------------------------------------------

struct ExtrapolateArgs {
  Common c;
  std::string method = "trre";
  std::size_t n = 0;
  std::size_t k = 1;
  std::string y;
};

int cmd_extrapolate(const ExtrapolateArgs& e) {
  require(e.c.input, "--input");
  if (e.k == 0) throw UsageError("--k must be positive");
  std::string lower = e.method;
  for (char& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  const bool ttea = lower == "ttea";
  const auto method = parse_method(lower);
  if (!ttea && !method) throw UsageError("unknown method '" + e.method + "' (tmpe, trre, tmmpe or ttea)");
  if (ttea && e.y.empty()) throw UsageError("method ttea needs --y");

  const Stack4 seq = read_tns4(e.c.input);
  json r;
  r["command"] = "extrapolate";
  r["seed"] = e.c.seed;
  r["input"] = e.c.input;
  r["method"] = lower;
  r["n"] = e.n;
  r["k"] = e.k;
  Tensor3 result;
  if (ttea) {
    const TteaResult t = ttea_extrapolate(seq, e.n, e.k, read_tns3(e.y));
    result = t.e_k;
    r["coefficients"] = {{"beta", stack_json(t.beta)}};
  } else {
    std::optional<Stack4> y;
    if (!e.y.empty()) y = read_tns4(e.y);
    else if (*method == Method::tmmpe) y = default_tmmpe_y(seq.slice_dims(), e.k);
    const ExtrapolationResult x = extrapolate(seq, e.n, e.k, *method, y);
    result = x.t_k;
    r["k_used"] = x.k;
    r["degenerate"] = x.degenerate;
    r["residual_norm"] = frobenius_norm(x.residual);
    r["coefficients"] = {{"beta", stack_json(x.beta)}, {"gamma", stack_json(x.gamma)}, {"alpha", stack_json(x.alpha)}};
  }
  r["result_norm"] = frobenius_norm(result);
  if (!e.c.output.empty()) {
    write_tns3(result, e.c.output);
    r["output"] = e.c.output;
  }
  emit(r, e.c);
  return 0;
}

// verify --------------------------------------------------------------------

struct VerifyArgs {
  Common c;
  std::vector<std::string> suites;
  bool mutate = false;
};

int cmd_verify(VerifyArgs v) {
  const auto& known = suite_names();
  if (v.suites.empty()) v.suites = known;
  for (const auto& s : v.suites)
    if (std::find(known.begin(), known.end(), s) == known.end()) throw UsageError("unknown suite '" + s + "'");

  VerifyConfig cfg;
  cfg.seed = v.c.seed;
  cfg.mutate_bcirc_sign = v.mutate;
  json r;
  r["command"] = "verify";
  r["seed"] = cfg.seed;
  r["mutate_bcirc_sign"] = cfg.mutate_bcirc_sign;
  json arr = json::array();
  bool all = true;
  for (const auto& name : v.suites) {
    const SuiteResult s = run_suite(name, cfg);
    all = all && s.passed;
    std::cerr << (s.passed ? "PASS " : "FAIL ") << s.name << " (" << s.cases << " cases, " << s.seconds << " s)\n";
    arr.push_back({{"name", s.name},
                   {"description", s.description},
                   {"passed", s.passed},
                   {"cases", s.cases},
                   {"worst", s.worst},
                   {"tolerance", s.tolerance},
                   {"seconds", s.seconds},
                   {"time_limit", s.time_limit},
                   {"detail", s.detail}});
  }
  r["suites"] = arr;
  r["passed"] = all;
  emit(r, v.c);
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor t-product algebra, t-SVD and extrapolation toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* g = app.add_subcommand("gen", "Generate a synthetic ill-posed problem A * X = B");
  add_common(*g, gen.c, false, true);
  g->add_option("--dims", gen.dims, "n1,n2,n3 of A");
  g->add_option("--profile", gen.profile, "Face singular value decay: geometric or algebraic");
  g->add_option("--rate,--decay", gen.rate, "Decay rate");
  g->add_option("--noise", gen.noise, "Relative noise level ||E|| / ||A * X||");
  g->add_option("--rhs-cols", gen.rhs_cols, "Lateral slices of X and B");
  g->add_option("--solution", gen.solution, "X_true: gaussian or source (A^T * W)");

  TsvdArgs ts;
  CLI::App* t = app.add_subcommand("tsvd", "t-SVD or truncated t-SVD of a tensor");
  add_common(*t, ts.c, true, true);
  t->add_option("--k", ts.k, "Truncation level (default: full)");

  SolveArgs so;
  CLI::App* s = app.add_subcommand("solve", "TRRE-TSVD solver for A * X = B");
  add_common(*s, so.c, true, true);
  s->add_option("-b,--rhs", so.rhs, "Right-hand side B");
  s->add_option("--xtrue", so.xtrue, "Exact solution for error reporting");
  s->add_option("--tol", so.tol, "Stopping tolerance on min(||R||, eta)");
  s->add_option("--k", so.k, "Largest extrapolation width k");

  ExtrapolateArgs ex;
  CLI::App* e = app.add_subcommand("extrapolate", "Extrapolate a tensor sequence");
  add_common(*e, ex.c, true, true);
  e->add_option("--method", ex.method, "tmpe, trre, tmmpe or ttea");
  e->add_option("--n", ex.n, "Index of the first term used");
  e->add_option("--k", ex.k, "Extrapolation width");
  e->add_option("--y", ex.y, "Test tensors: TNS4 stack for tmmpe, TNS3 tensor for ttea");

  VerifyArgs ve;
  CLI::App* v = app.add_subcommand("verify", "Run oracle and invariant suites");
  add_common(*v, ve.c, false, false);
  ve.c.seed = VerifyConfig{}.seed;
  v->add_option("--suite", ve.suites, "Suite to run (repeatable; default all)");
  v->add_flag("--mutate", ve.mutate, "Plant a sign defect in the block-circulant oracle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  }

  try {
    const std::pair<CLI::App*, Common*> subs[] = {{g, &gen.c}, {t, &ts.c}, {s, &so.c}, {e, &ex.c}, {v, &ve.c}};
    for (auto [sub, common] : subs) {
      if (!sub->parsed()) continue;
      if (!common->config.empty()) apply_config(*sub, common->config);
      if (sub == g) return cmd_gen(gen);
      if (sub == t) return cmd_tsvd(ts);
      if (sub == s) return cmd_solve(so);
      if (sub == e) return cmd_extrapolate(ex);
      return cmd_verify(ve);
    }
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return 2;
  } catch (const CLI::ParseError& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 2;
}
