#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <variant>

#include "qdio/approx.hpp"
#include "qdio/dynamics.hpp"
#include "qdio/exponents.hpp"
#include "qdio/isotropy.hpp"
#include "qdio/khintchine.hpp"
#include "qdio/normalize.hpp"
#include "qdio/points.hpp"

namespace qdio::cli {

namespace {

using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string rat(const Rational& r) { return r.get_str(); }

// Rows of one report plus the provenance shared by every output.
struct Report {
  std::string command;
  std::string form_hash;  // empty when the command takes no form
  std::uint64_t seed = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string csv_field(const Cell& c) {
  std::string s = std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "";
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, double>) return fmt_double(v);
        else return v;
      },
      c);
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

std::string json_value(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "null";
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, double>) {
          return std::isfinite(v) ? fmt_double(v) : nlohmann::json(fmt_double(v)).dump();
        } else return nlohmann::json(v).dump(-1, ' ', true);
      },
      c);
}

std::string provenance_json(const Report& r) {
  nlohmann::ordered_json p;
  p["command"] = r.command;
  if (!r.form_hash.empty()) p["form_hash"] = r.form_hash;
  p["seed"] = r.seed;
  nlohmann::ordered_json wrap;
  wrap["provenance"] = p;
  return wrap.dump(-1, ' ', true);
}

void write(const Report& r, Format f, std::ostream& out) {
  if (f == Format::Csv) {
    out << "# provenance command=" << r.command;
    if (!r.form_hash.empty()) out << " form_hash=" << r.form_hash;
    out << " seed=" << r.seed << "\n";
    for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << csv_field(r.columns[i]);
    out << "\n";
    for (const auto& row : r.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
      out << "\n";
    }
  } else {
    out << provenance_json(r) << "\n";
    for (const auto& row : r.rows) {
      out << "{";
      for (std::size_t i = 0; i < row.size(); ++i)
        out << (i ? "," : "") << nlohmann::json(r.columns[i]).dump() << ":" << json_value(row[i]);
      out << "}\n";
    }
  }
  if (!out) throw std::runtime_error("failed to write report");
}

// FNV-1a over the dimension and gram2 entries.
std::string gram2_hash(const QuadForm& q) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  mix(std::to_string(q.dim()));
  for (std::size_t i = 0; i < q.dim(); ++i)
    for (std::size_t j = 0; j < q.dim(); ++j) mix("," + std::to_string(q.gram2(i, j)));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// {"dim": n, "upper": [[i, j, c], ...]} with c the coefficient of x_i x_j.
QuadForm load_form(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedForm("cannot open form file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    auto dim = j.at("dim").get<std::int64_t>();
    if (dim < 2 || dim > 64) throw MalformedForm("dim must lie in [2, 64]");
    std::vector<Term> terms;
    for (const auto& t : j.at("upper")) {
      if (!t.is_array() || t.size() != 3) throw MalformedForm("each term must be [i, j, c]");
      auto i = t[0].get<std::int64_t>(), k = t[1].get<std::int64_t>();
      if (i < 0 || k < 0 || i >= dim || k >= dim) throw MalformedForm("term index out of range");
      if (i > k) std::swap(i, k);
      terms.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(k), t[2].get<std::int64_t>()});
    }
    return QuadForm::from_terms(static_cast<std::size_t>(dim), terms);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedForm(std::string("invalid form JSON: ") + e.what());
  }
}

std::string matrix_string(const RatMatrix& m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s += i ? ",[" : "[";
    for (std::size_t j = 0; j < m.cols(); ++j) s += (j ? "," : "") + rat(m(i, j));
    s += "]";
  }
  return s + "]";
}

std::string basis_string(const IsoSubspace& e) {
  std::string s;
  for (std::size_t i = 0; i < e.dim(); ++i) s += (i ? ";" : "") + ProjPoint(e.basis[i]).to_string();
  return s;
}

Rational parse_rational(const std::string& text) {
  Rational r;
  if (r.set_str(text, 10) != 0) throw InvalidArgument("not a rational: '" + text + "'");
  r.canonicalize();
  if (r.get_den() == 0) throw InvalidArgument("zero denominator in '" + text + "'");
  return r;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

// Exact coordinates when every entry parses over a real quadratic field, long doubles otherwise.
TargetPoint load_target(const QuadForm& q, const std::string& text) {
  if (text.empty()) throw InvalidArgument("--target is required");
  auto parts = split(text, ',');
  try {
    std::vector<QuadraticNumber> exact;
    for (const auto& p : parts) exact.push_back(parse_quadratic(p));
    return TargetPoint::exact(q, std::move(exact));
  } catch (const NotOnQuadric&) {
    throw;
  } catch (const Error&) {
  } catch (const std::invalid_argument&) {
  }
  std::vector<long double> real;
  for (const auto& p : parts) {
    try {
      std::size_t used = 0;
      real.push_back(std::stold(p, &used));
      if (used != p.size()) throw std::invalid_argument(p);
    } catch (const std::logic_error&) {
      throw InvalidArgument("cannot parse target coordinate '" + p + "'");
    }
  }
  return TargetPoint::real(q, std::move(real));
}

// a:b:step over exponents of 2.
std::vector<int> parse_sgrid(const std::string& text) {
  auto parts = split(text, ':');
  if (parts.size() != 3) throw InvalidArgument("--sgrid must be a:b:step");
  int a, b, st;
  try {
    a = std::stoi(parts[0]);
    b = std::stoi(parts[1]);
    st = std::stoi(parts[2]);
  } catch (const std::logic_error&) {
    throw InvalidArgument("--sgrid must hold integers");
  }
  if (a < 0 || b < a || st < 1 || b > 62) throw InvalidArgument("--sgrid needs 0 <= a <= b <= 62 and step >= 1");
  std::vector<int> out;
  for (int e = a; e <= b; e += st) out.push_back(e);
  return out;
}

std::vector<std::int64_t> dyadic_upto(std::int64_t tmax) {
  std::vector<std::int64_t> g;
  for (std::int64_t t = 2; t <= tmax; t *= 2) g.push_back(t);
  if (g.empty() || g.back() != tmax) g.push_back(tmax);
  return g;
}

void require_positive(std::int64_t v, const char* name) {
  if (v < 1) throw InvalidArgument(std::string(name) + " must be positive");
}

Report cmd_rank(const RunConfig& c, const QuadForm& q) {
  Report r;
  auto rk = q_rank(q, kDefaultWitnessBound);
  r.columns = {"p_Q", "p_R", "det", "exceptional", "witness"};
  bool exc = q.dim() == 4 && rk.ranks.p_Q > 0 && is_exceptional(q);
  r.rows.push_back({std::int64_t{rk.ranks.p_Q}, std::int64_t{rk.ranks.p_R}, rat(determinant(q)), exc,
                    basis_string(rk.subspace)});
  (void)c;
  return r;
}

Report cmd_normalize(const RunConfig&, const QuadForm& q) {
  Report r;
  auto rk = q_rank(q, kDefaultWitnessBound);
  if (rk.subspace.dim() == 0) throw NotApplicable("form is anisotropic over Q; nothing to normalize");
  auto n = m_normalize(q, rk.subspace);
  auto rem = remainder_of(n);
  r.columns = {"m", "M", "R_gram2", "remainder_gram2"};
  r.rows.push_back({static_cast<std::int64_t>(n.m), matrix_string(n.M), matrix_string(n.R.gram2()),
                    matrix_string(rem.gram2())});
  return r;
}

Report cmd_points(const RunConfig& c, const QuadForm& q) {
  require_positive(c.tmax, "--tmax");
  Report r;
  r.columns = {"height", "point"};
  for (const auto& p : enumerate_points(q, c.tmax, {Strategy::Auto, c.threads}))
    r.rows.push_back({p.height(), p.to_string()});
  return r;
}

Report cmd_count(const RunConfig& c, const QuadForm& q) {
  require_positive(c.tmax, "--tmax");
  Report r;
  r.columns = {"T", "N", "ratio_k", "ratio_log"};
  auto grid = dyadic_upto(c.tmax);
  for (const auto& row : count_points(q, grid, {Strategy::Auto, c.threads}))
    r.rows.push_back({row.T, static_cast<std::int64_t>(row.N), row.ratio_k,
                      row.ratio_log ? Cell(*row.ratio_log) : Cell(std::monostate{})});
  return r;
}

Report cmd_exponents(const RunConfig& c) {
  if (c.kmax < 1 || c.kmax > 200) throw InvalidArgument("--kmax must lie in [1, 200]");
  Report r;
  r.columns = {"k", "d", "n", "m", "N", "c"};
  for (int d = 1; d <= c.kmax; ++d)
    for (int k = 1; k <= d; ++k) {
      auto e = exponent_data(k, d);
      r.rows.push_back({std::int64_t{k}, std::int64_t{d}, e.n_kd, e.m_kd, e.N_kd, rat(e.c_kd)});
    }
  return r;
}

Report cmd_approx(const RunConfig& c, const QuadForm& q) {
  require_positive(c.tmax, "--tmax");
  auto x = load_target(q, c.target);
  Report r;
  r.columns = {"T", "D", "S", "best_height", "best_point"};
  auto grid = dyadic_upto(c.tmax);
  for (const auto& row : strong_dirichlet_profile(q, x, grid, c.threads)) {
    Cell h, p;
    if (row.best) {
      h = row.best->height;
      p = row.best->point.to_string();
    }
    r.rows.push_back({row.T, static_cast<double>(row.D), static_cast<double>(row.S), h, p});
  }
  return r;
}

Normalization one_normalization(const QuadForm& q) {
  auto w = find_isotropic_vector(q, kDefaultWitnessBound);
  if (!w) {
    auto v = decide_isotropic(q, 0);
    if (!v.isotropic) throw EmptyLightCone("form is anisotropic over Q");
    throw WitnessBoundExceeded(static_cast<int>(kDefaultWitnessBound), RationalForm(q), IsoSubspace{});
  }
  return m_normalize(q, IsoSubspace{{w->coords()}});
}

Report cmd_orbit(const RunConfig& c, const QuadForm& q) {
  require_positive(c.hmax, "--hmax");
  auto exps = parse_sgrid(c.sgrid);
  auto n = one_normalization(q);
  std::optional<TargetPoint> x;
  std::optional<LatticeFrame> frame;
  if (c.target.empty()) {
    frame.emplace(q, n);
  } else {
    x = load_target(q, c.target);
    frame.emplace(LatticeFrame::toward(q, n, *x));
  }
  std::vector<FlowParam> grid;
  for (int e : exps) grid.emplace_back(Rational(BigInt(1) << e));
  FlowProbe probe(*frame, c.hmax, c.threads);
  Report r;
  r.columns = {"s", "rho", "certified", "min_point"};
  for (const auto& row : probe.profile(grid, c.threads))
    r.rows.push_back({rat(row.s.s[0]), static_cast<double>(row.rho), row.certified, row.argmin.to_string()});
  return r;
}

double round12(long double v) { return std::stod(fmt_double(static_cast<double>(v))); }

nlohmann::ordered_json num(long double v) {
  double d = static_cast<double>(v);
  if (!std::isfinite(d)) return fmt_double(d);
  return round12(v);
}

void cmd_khintchine(const RunConfig& c, const std::string& form_hash, std::ostream& out) {
  PsiFamily psi{parse_rational(c.psi_a), parse_rational(c.psi_b)};
  const Rational hs = parse_rational(c.hausdorff_s);
  nlohmann::ordered_json series = nlohmann::ordered_json::array();
  auto hyp = check_hypotheses(psi);
  for (auto kind : {SeriesKind::Convergence3, SeriesKind::LogLog, SeriesKind::LogLog2}) {
    SeriesParams p;
    p.kind = kind;
    p.psi = psi;
    p.k = c.k;
    p.s = kind == SeriesKind::LogLog2 ? hs : Rational(c.k);
    p.exceptional = c.exceptional;
    p.J_max = c.jmax;
    nlohmann::ordered_json s;
    s["kind"] = to_string(kind);
    s["s"] = rat(p.s);
    try {
      auto res = series_sum(p);
      s["partial"] = num(res.partial);
      s["verdict"] = to_string(res.verdict);
      s["alpha"] = rat(res.alpha);
      s["beta"] = rat(res.beta);
      s["gamma"] = res.gamma;
    } catch (const Error& e) {
      s["verdict"] = "rejected";
      s["reason"] = e.what();
    }
    series.push_back(s);
  }
  nlohmann::ordered_json covering;
  try {
    auto cb = covering_bound(psi, c.level);
    covering["N"] = cb.N;
    covering["psi_N"] = num(cb.psi_N);
    covering["refined"] = num(cb.refined);
    covering["naive"] = num(cb.naive);
    covering["ratio"] = num(cb.naive > 0 ? cb.refined / cb.naive : 0);
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : cb.per_n) {
      nlohmann::ordered_json o;
      o["n"] = row.n;
      o["case"] = to_string(row.which);
      o["value"] = num(row.value);
      rows.push_back(o);
    }
    covering["per_n"] = rows;
  } catch (const Error& e) {
    covering["rejected"] = e.what();
  }
  nlohmann::ordered_json mc;
  auto est = mc_limsup_measure(psi, c.level, c.samples, c.seed, c.threads);
  mc["N"] = c.level;
  mc["samples"] = est.samples;
  mc["radius"] = num(est.radius);
  mc["hits"] = est.hits;
  mc["estimate"] = num(est.estimate);
  mc["stderr"] = num(est.stderr_);
  mc["fitted_constant"] = num(est.fitted_constant);

  Report r;
  r.command = c.subcommand;
  r.form_hash = form_hash;
  r.seed = c.seed;
  if (c.format == Format::Json) {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json h;
    h["nonincreasing"] = hyp.nonincreasing;
    h["q_psi_to_zero"] = hyp.q_psi_to_zero;
    h["regular"] = hyp.regular;
    doc["psi"] = {{"a", rat(psi.a)}, {"b", rat(psi.b)}};
    doc["hypotheses"] = h;
    doc["series"] = series;
    doc["covering"] = covering;
    doc["mc"] = mc;
    doc["seed"] = c.seed;
    out << provenance_json(r) << "\n" << doc.dump(-1, ' ', true) << "\n";
    return;
  }
  // CSV: one (section, name, value) row per scalar.
  r.columns = {"section", "name", "value"};
  auto scalar = [](const nlohmann::ordered_json& v) -> Cell {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number()) return v.get<double>();
    return v.dump();
  };
  r.rows.push_back({"hypotheses", "nonincreasing", hyp.nonincreasing});
  r.rows.push_back({"hypotheses", "q_psi_to_zero", hyp.q_psi_to_zero});
  r.rows.push_back({"hypotheses", "regular", hyp.regular});
  for (const auto& s : series)
    for (auto it = s.begin(); it != s.end(); ++it)
      if (it.key() != "kind") r.rows.push_back({"series." + s["kind"].get<std::string>(), it.key(), scalar(it.value())});
  for (auto it = covering.begin(); it != covering.end(); ++it) {
    if (it.key() == "per_n") {
      for (const auto& row : it.value())
        r.rows.push_back({"covering.n" + std::to_string(row["n"].get<int>()), row["case"].get<std::string>(),
                          scalar(row["value"])});
    } else {
      r.rows.push_back({"covering", it.key(), scalar(it.value())});
    }
  }
  for (auto it = mc.begin(); it != mc.end(); ++it) r.rows.push_back({"mc", it.key(), scalar(it.value())});
  write(r, c.format, out);
}

void error_object(std::ostream& err, const std::string& code, const std::string& message) {
  nlohmann::ordered_json e;
  e["error"] = code;
  e["message"] = message;
  err << e.dump(-1, ' ', true) << "\n";
}

}  // namespace

int dispatch(const RunConfig& c, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> with_form = {"rank", "normalize", "points", "count", "approx", "orbit"};
  QuadForm q;
  std::string hash;
  const bool needs_form = std::find(with_form.begin(), with_form.end(), c.subcommand) != with_form.end();
  try {
    if (needs_form || (c.subcommand == "khintchine" && !c.form_path.empty())) {
      if (c.form_path.empty()) throw MalformedForm("--form is required");
      q = load_form(c.form_path);
      hash = gram2_hash(q);
    }
  } catch (const Error& e) {
    error_object(err, e.code(), e.what());
    return kExitMalformedForm;
  }
  try {
    if (c.subcommand == "khintchine") {
      RunConfig k = c;
      if (!c.form_path.empty()) {
        k.k = static_cast<int>(q.d()) - 1;
        k.exceptional = q.dim() == 4 && is_exceptional(q);
      }
      cmd_khintchine(k, hash, out);
      return kExitOk;
    }
    Report r;
    if (c.subcommand == "rank") r = cmd_rank(c, q);
    else if (c.subcommand == "normalize") r = cmd_normalize(c, q);
    else if (c.subcommand == "points") r = cmd_points(c, q);
    else if (c.subcommand == "count") r = cmd_count(c, q);
    else if (c.subcommand == "exponents") r = cmd_exponents(c);
    else if (c.subcommand == "approx") r = cmd_approx(c, q);
    else if (c.subcommand == "orbit") r = cmd_orbit(c, q);
    else throw InvalidArgument("unknown subcommand '" + c.subcommand + "'");
    r.command = c.subcommand;
    r.form_hash = hash;
    r.seed = c.seed;
    write(r, c.format, out);
    return kExitOk;
  } catch (const Error& e) {
    error_object(err, e.code(), e.what());
    return kExitPrecondition;
  } catch (const std::overflow_error& e) {
    error_object(err, "Overflow", e.what());
    return kExitPrecondition;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Intrinsic Diophantine approximation on rational quadrics"};
  app.require_subcommand(1, 1);
  RunConfig c;
  std::string format = "csv";
  unsigned threads = 1;

  auto common = [&](CLI::App* s, bool form) {
    if (form) s->add_option("--form", c.form_path, "Form JSON file {dim, upper: [[i, j, c], ...]}")->required();
    s->add_option("--seed", c.seed, "Seed recorded in the output");
    s->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--threads", threads, "Worker threads (0 = all)");
  };
  auto* rank = app.add_subcommand("rank", "Rational and real isotropy ranks");
  common(rank, true);
  auto* norm = app.add_subcommand("normalize", "p_Q-normalization along a maximal isotropic subspace");
  common(norm, true);
  auto* pts = app.add_subcommand("points", "Rational points up to a height bound");
  common(pts, true);
  pts->add_option("--tmax", c.tmax, "Height bound");
  auto* cnt = app.add_subcommand("count", "Point counts N(T) on a dyadic grid");
  common(cnt, true);
  cnt->add_option("--tmax", c.tmax, "Largest T");
  auto* exps = app.add_subcommand("exponents", "Exponent table (k, d, n, m, N, c)");
  common(exps, false);
  exps->add_option("--kmax", c.kmax, "Largest d");
  auto* appr = app.add_subcommand("approx", "Dirichlet and strong Dirichlet profiles of a target");
  common(appr, true);
  appr->add_option("--tmax", c.tmax, "Largest T");
  appr->add_option("--target", c.target, "Comma-separated coordinates")->required();
  auto* orb = app.add_subcommand("orbit", "Light-cone minima along the diagonal flow");
  common(orb, true);
  orb->add_option("--hmax", c.hmax, "Enumeration bound");
  orb->add_option("--sgrid", c.sgrid, "Flow scales 2^e for e in a:b:step");
  orb->add_option("--target", c.target, "Comma-separated coordinates (optional)");
  auto* kh = app.add_subcommand("khintchine", "Series verdicts, covering bound, Monte Carlo measure");
  common(kh, false);
  kh->add_option("--form", c.form_path, "Form JSON; sets k and the exceptional flag");
  kh->add_option("--psi-a", c.psi_a, "Exponent a of psi = q^-a (log2 q)^-b");
  kh->add_option("--psi-b", c.psi_b, "Log exponent b");
  kh->add_option("--level", c.level, "N for the covering and Monte Carlo labs");
  kh->add_option("--samples", c.samples, "Monte Carlo samples");
  kh->add_option("--jmax", c.jmax, "Series terms T = 2^j, j <= jmax");
  kh->add_option("--k", c.k, "Quadric dimension");
  kh->add_option("--s", c.hausdorff_s, "Hausdorff exponent for the loglog2 series");
  kh->add_flag("--exceptional", c.exceptional, "Treat the quadric as exceptional");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }
  c.subcommand = app.get_subcommands().front()->get_name();
  c.format = format == "json" ? Format::Json : Format::Csv;
  c.threads = threads;
  if (const char* env = std::getenv("QUADRIC_DIO_THREADS")) {
    try {
      c.threads = static_cast<unsigned>(std::stoul(env));
    } catch (const std::logic_error&) {
      error_object(err, "InvalidArgument", "QUADRIC_DIO_THREADS must be a non-negative integer");
      return kExitUsage;
    }
  }
  return dispatch(c, out, err);
}

}  // namespace qdio::cli
