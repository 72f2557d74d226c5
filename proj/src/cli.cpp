#include "stackyrr/cli.hpp"

#include <filesystem>
#include <fstream>
#include <new>
#include <set>
#include <sstream>

namespace stackyrr::cli {

using io::Json;

namespace {

Json rat(const Rational& q) { return io::rational_json(q); }

// Collects oracle blocks and remembers any disagreement.
struct Ctx {
  bool oracle = false;
  bool disagree = false;

  void check(Json& section, const char* name, Json oracle_value, bool agree) {
    if (!oracle) return;
    section["oracle"][name] = Json{{"value", std::move(oracle_value)}, {"agree", agree}};
    disagree = disagree || !agree;
  }
};

Json classes_section(const GroupPtr& g, Ctx& ctx) {
  const ConjClassTable& t = g->classes();
  Json s = Json::object();
  s["order"] = g->order();
  s["class_count"] = t.size();
  Json cls = Json::array();
  for (std::size_t c = 0; c < t.size(); ++c) {
    const int rep = t.representatives[c];
    cls.push_back(Json{{"representative", rep},
                       {"size", t.class_sizes[c]},
                       {"element_order", g->element_order(rep)},
                       {"centralizer_order", t.centralizer_orders[c]}});
  }
  s["classes"] = std::move(cls);
  if (ctx.oracle) {
    // class sizes by brute conjugation, centralizers by brute commutation
    bool agree = true;
    long total = 0;
    Json sizes = Json::array();
    for (std::size_t c = 0; c < t.size(); ++c) {
      const int rep = t.representatives[c];
      std::set<int> conj;
      for (int a = 0; a < g->order(); ++a) conj.insert(g->conj(a, rep));
      const int cent = centralizer(g, {rep}).order();
      sizes.push_back(conj.size());
      total += static_cast<long>(conj.size());
      agree = agree && static_cast<int>(conj.size()) == t.class_sizes[c] && cent == t.centralizer_orders[c] &&
              cent * t.class_sizes[c] == g->order();
    }
    agree = agree && total == g->order();
    ctx.check(s, "class_sizes", std::move(sizes), agree);
  }
  return s;
}

Json inertia_section(const FiniteGSet& x, Ctx& ctx) {
  const OrbitDecomposition o = orbits(x);
  const InertiaSet in = inertia(x);
  const OrbitDecomposition oi = orbits(in.gset);
  Json s = Json::object();
  s["group_order"] = x.group()->order();
  s["points"] = x.size();
  Json orbs = Json::array();
  for (std::size_t k = 0; k < o.size(); ++k) {
    orbs.push_back(Json{{"representative", o.representatives[k]},
                        {"size", o.orbits[k].size()},
                        {"stabilizer_order", o.stabilizer_orders[k]}});
  }
  s["orbits"] = std::move(orbs);
  s["inertia"] = Json{{"points", in.pairs.size()}, {"orbits", oi.size()}};
  if (ctx.oracle) {
    long fixed = 0;
    for (int h = 0; h < x.group()->order(); ++h)
      for (int p = 0; p < x.size(); ++p) fixed += x.act(p, h) == p;
    ctx.check(s, "inertia_points_by_element", fixed, fixed == static_cast<long>(in.pairs.size()));
    std::size_t classes = 0;
    for (int rep : o.representatives) classes += as_group(stabilizer(x, rep))->classes().size();
    ctx.check(s, "inertia_orbits_by_stabilizer_classes", classes, classes == oi.size());
  }
  return s;
}

Json series_json(const std::vector<Rational>& series) {
  Json out = Json::array();
  for (const auto& q : series) out.push_back(rat(q));
  return out;
}

std::vector<Rational> recursive_series(const FiniteGSet& x, int m_max) {
  std::vector<Rational> out;
  for (int m = 0; m <= m_max; ++m) out.push_back(chi_m_recursive(x, m));
  return out;
}

Json euler_section(const FiniteGSet& x, int m_max, Ctx& ctx) {
  const EulerReport r = euler_report(x, m_max);
  Json s = Json::object();
  s["chi_top"] = r.chi_top;
  s["chi_orb"] = rat(r.chi_orb);
  s["chi_phy"] = r.chi_phy;
  s["series"] = series_json(r.series);
  s["ladder"] = Json{{"m", r.ladder_m}, {"ok", r.ladder_verified}};
  if (ctx.oracle) {
    const Rational ratio = make_rational(x.size(), x.group()->order());
    ctx.check(s, "chi_orb", rat(ratio), ratio == r.chi_orb);
    const auto rec = recursive_series(x, m_max);
    ctx.check(s, "series", series_json(rec), rec == r.series);
    // ladder against inertia applied repeatedly and the centralizer recursion
    Json rungs = Json::array();
    bool agree = r.ladder_verified;
    FiniteGSet repeated = inertia(x).gset;
    for (int m = 0; m <= r.ladder_m; ++m) {
      const long top = static_cast<long>(orbit_count(repeated));
      const Rational orb = chi_m_recursive(x, m + 2);
      const LadderResult& l = r.rungs[static_cast<std::size_t>(m)];
      agree = agree && Rational(top) == orb && top == l.top && top == l.phy;
      rungs.push_back(Json{{"m", m}, {"chi_top_repeated", top}, {"chi_orb_recursive", rat(orb)}});
      if (m < r.ladder_m) repeated = inertia(repeated).gset;
    }
    ctx.check(s, "ladder", std::move(rungs), agree);
  }
  return s;
}

Json series_section(const FiniteGSet& x, int m_max, Ctx& ctx) {
  const auto series = euler_series(x, m_max);
  Json s = Json::object();
  s["series"] = series_json(series);
  if (ctx.oracle) {
    const auto rec = recursive_series(x, m_max);
    ctx.check(s, "series", series_json(rec), rec == series);
  }
  return s;
}

Json rr_section(const OrbifoldCurve& c, const std::optional<FracDivisor>& divisor, Ctx& ctx) {
  const FracDivisor d = divisor ? *divisor : FracDivisor::zero(c);
  Json s = Json::object();
  s["curve"] = io::curve_json(c);
  s["divisor"] = io::divisor_json(d);
  s["degree"] = rat(degree(d));
  Json mult = Json::object();
  for (const auto& p : c.stacky()) mult[p.label] = multiplicity(d, p.label);
  s["multiplicities"] = std::move(mult);
  s["chi"] = euler_char_rr(d);
  s["chi_orb"] = rat(chi_orb_curve(c));
  s["chi_top"] = chi_top_curve(c);
  s["chi_phy"] = chi_phy_curve(c);
  if (ctx.oracle) {
    const long chi = euler_char_rr(d);
    const long todd = euler_char_todd(d);
    ctx.check(s, "todd_route", todd, todd == chi);
    const long coarse = coarse_rr_oracle(d);
    ctx.check(s, "coarse_round_down", coarse, coarse == chi);
    const long dual = -euler_char_rr(canonical_divisor(c) - d);
    ctx.check(s, "serre_duality", dual, dual == chi);
    const Rational minus_deg_k = -degree(canonical_divisor(c));
    ctx.check(s, "minus_degree_canonical", rat(minus_deg_k), minus_deg_k == chi_orb_curve(c));
    Rational integral = chi_orb_curve(c);
    for (const auto& p : c.stacky()) integral += make_rational(p.order - 1, p.order);
    ctx.check(s, "inertia_integral", rat(integral), integral == chi_top_curve(c));
  }
  return s;
}

Json bundle_section(const VirtualEqBundle& v, Ctx& ctx) {
  const PointPushforward p = pushforward_to_point(v);
  const InertiaFunction phi = devissage_phi(v);
  Json s = Json::object();
  s["genuine"] = v.genuine();
  Json vals = Json::array();
  for (const auto& z : phi.values) vals.push_back(io::cyclo_json(z));
  s["phi"] = std::move(vals);
  s["chi"] = io::cyclo_json(p.source_side);
  ctx.check(s, "inertia_side", io::cyclo_json(p.inertia_side), p.inertia_side == p.source_side);
  return s;
}

Json devissage_section(const FiniteGSet& x, Ctx& ctx) {
  const DevissageMatrix dm = devissage_matrix(x);
  Json s = Json::object();
  s["basis"] = "induced_cyclic";
  s["rows"] = dm.target_dim;
  s["cols"] = dm.source_dim;
  s["rank"] = dm.rank;
  s["ok"] = dm.is_isomorphism();
  Json rows = Json::array();
  for (std::size_t i = 0; i < dm.matrix.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < dm.matrix.cols(); ++j) row.push_back(io::cyclo_json(dm.matrix(i, j)));
    rows.push_back(std::move(row));
  }
  s["matrix"] = std::move(rows);
  if (ctx.oracle) {
    const DevissageMatrix deltas = devissage_matrix(x, DevissageBasis::class_delta);
    ctx.check(s, "class_delta_rank", deltas.rank, deltas.is_isomorphism() == dm.is_isomorphism() && deltas.rank == dm.rank);
  }
  return s;
}

Json determinant_json(const EulerDeterminant& d) {
  Json factors = Json::array();
  for (const auto& [base, exp] : d.factors) factors.push_back(Json{{"base", rat(base)}, {"exponent", rat(exp)}});
  return Json{{"factors", std::move(factors)}, {"value", d.value ? rat(*d.value) : Json(nullptr)}};
}

bool integer_weights(const WeightedStrata& w) {
  return std::all_of(w.strata.begin(), w.strata.end(), [](const Stratum& s) { return is_integer(s.weight); });
}

bool nonzero_weights(const WeightedStrata& w) {
  return std::all_of(w.strata.begin(), w.strata.end(), [](const Stratum& s) { return s.weight != 0; });
}

Json weighted_values(const WeightedStrata& w) {
  Json s = Json::object();
  s["weighted_chi"] = integer_weights(w) ? Json{{"top", rat(weighted_chi(w, EulerVariant::top))},
                                                {"orb", rat(weighted_chi(w, EulerVariant::orb))}}
                                         : Json(nullptr);
  s["determinant"] = nonzero_weights(w) ? Json{{"top", determinant_json(euler_determinant(w, EulerVariant::top))},
                                               {"orb", determinant_json(euler_determinant(w, EulerVariant::orb))}}
                                        : Json(nullptr);
  return s;
}

Json weighted_section(const io::WeightsInput& w, Ctx& ctx) {
  Json s = Json::object();
  s["base"] = w.gset ? "gset" : "curve";
  Json strata = Json::array();
  for (const auto& st : w.strata.strata) {
    strata.push_back(Json{{"name", st.name}, {"weight", rat(st.weight)}, {"chi_top", st.chi_top}, {"chi_orb", rat(st.chi_orb)}});
  }
  s["strata"] = std::move(strata);
  Json values = weighted_values(w.strata);
  s["weighted_chi"] = values["weighted_chi"];
  s["determinant"] = values["determinant"];
  if (ctx.oracle) {
    Json finest = weighted_values(w.finest);
    const bool agree = finest == values;
    ctx.check(s, "finest_refinement", std::move(finest), agree);
  }
  return s;
}

const FiniteGSet* base_gset(const Inputs& in) {
  if (in.gset) return &*in.gset;
  if (in.bundle) return &in.bundle->base;
  return nullptr;
}

Json build_report(const JobSpec& spec, Ctx& ctx) {
  Json r = Json::object();
  r["schema_version"] = report_schema_version();
  r["command"] = command_name(spec.command);
  r["options"] = Json{{"max_m", spec.m_max}, {"oracle", spec.oracle}};
  const Inputs& in = spec.inputs;
  const FiniteGSet* x = base_gset(in);
  switch (spec.command) {
    case Command::classes:
      r["classes"] = classes_section(in.group ? *in.group : x->group(), ctx);
      break;
    case Command::inertia:
      r["inertia"] = inertia_section(*x, ctx);
      break;
    case Command::euler:
      r["euler"] = euler_section(*x, spec.m_max, ctx);
      break;
    case Command::series:
      r["series"] = series_section(*x, spec.m_max, ctx);
      break;
    case Command::rr:
      r["rr"] = rr_section(*in.curve, in.divisor, ctx);
      break;
    case Command::devissage:
      r["devissage"] = devissage_section(*x, ctx);
      if (in.bundle) r["bundle"] = bundle_section(*in.bundle, ctx);
      break;
    case Command::weighted:
      r["weighted"] = weighted_section(*in.weights, ctx);
      break;
    case Command::report:
      if (in.group || x) r["classes"] = classes_section(in.group ? *in.group : x->group(), ctx);
      if (x) {
        r["inertia"] = inertia_section(*x, ctx);
        r["euler"] = euler_section(*x, spec.m_max, ctx);
        r["devissage"] = devissage_section(*x, ctx);
      }
      if (in.bundle) r["bundle"] = bundle_section(*in.bundle, ctx);
      if (in.curve) r["rr"] = rr_section(*in.curve, in.divisor, ctx);
      if (in.weights) r["weighted"] = weighted_section(*in.weights, ctx);
      break;
  }
  return r;
}

// A pair of decimal strings is a rational.
std::string scalar_text(const Json& j) {
  if (j.is_array() && j.size() == 2 && j[0].is_string() && j[1].is_string()) {
    const std::string num = j[0].get<std::string>();
    const std::string den = j[1].get<std::string>();
    return den == "1" ? num : num + "/" + den;
  }
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

bool is_scalar_like(const Json& j) {
  return !j.is_structured() || (j.is_array() && j.size() == 2 && j[0].is_string() && j[1].is_string());
}

void render(const Json& j, const std::string& path, std::ostringstream& out) {
  if (is_scalar_like(j)) {
    out << path << " = " << scalar_text(j) << "\n";
    return;
  }
  if (j.is_array()) {
    if (std::all_of(j.begin(), j.end(), is_scalar_like)) {
      out << path << " = [";
      for (std::size_t i = 0; i < j.size(); ++i) out << (i ? ", " : "") << scalar_text(j[i]);
      out << "]\n";
      return;
    }
    for (std::size_t i = 0; i < j.size(); ++i) render(j[i], path + "[" + std::to_string(i) + "]", out);
    return;
  }
  for (auto it = j.begin(); it != j.end(); ++it) render(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
}

struct Source {
  std::string name;
  Json json;
};

Source load_source(const std::string& ref, const std::string& kind) {
  namespace fs = std::filesystem;
  std::string text;
  std::string name;
  std::error_code ec;
  if (fs::is_regular_file(ref, ec)) {
    std::ifstream in(ref);
    std::stringstream buf;
    buf << in.rdbuf();
    if (!in) throw ValidationError("--" + kind + ": cannot read '" + ref + "'");
    text = buf.str();
    name = ref;
  } else {
    std::string stem = fs::path(ref).filename().string();
    if (stem.size() > 5 && stem.compare(stem.size() - 5, 5, ".json") == 0) stem.resize(stem.size() - 5);
    auto f = find_fixture(stem);
    if (!f) throw ValidationError("--" + kind + ": no file '" + ref + "' and no embedded fixture '" + stem + "'");
    if (f->kind != kind) throw ValidationError("--" + kind + ": fixture '" + stem + "' is a " + f->kind);
    text = f->text;
    name = stem + ".json";
  }
  try {
    return Source{name, Json::parse(text)};
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(name + ": JSON parse error at byte " + std::to_string(e.byte));
  }
}

io::Node root(const Source& s) { return io::Node(s.json, s.name + ":$"); }

bool uses(Command c, const char* input) {
  const std::string in = input;
  switch (c) {
    case Command::classes:
      return in == "group" || in == "gset";
    case Command::inertia:
    case Command::euler:
    case Command::series:
      return in == "gset";
    case Command::rr:
      return in == "curve" || in == "divisor";
    case Command::devissage:
      return in == "gset" || in == "bundle";
    case Command::weighted:
      return in == "weights";
    case Command::report:
      return true;
  }
  return false;
}

}  // namespace

std::string report_schema_version() { return "1"; }

std::optional<Command> parse_command(const std::string& name) {
  static const std::map<std::string, Command> table = {
      {"classes", Command::classes}, {"inertia", Command::inertia}, {"euler", Command::euler},
      {"series", Command::series},   {"rr", Command::rr},           {"devissage", Command::devissage},
      {"weighted", Command::weighted}, {"report", Command::report}};
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::string command_name(Command c) {
  switch (c) {
    case Command::classes: return "classes";
    case Command::inertia: return "inertia";
    case Command::euler: return "euler";
    case Command::series: return "series";
    case Command::rr: return "rr";
    case Command::devissage: return "devissage";
    case Command::weighted: return "weighted";
    case Command::report: return "report";
  }
  return "";
}

JobSpec load_job(const RawJob& raw) {
  JobSpec spec;
  auto cmd = parse_command(raw.command);
  if (!cmd) throw ValidationError("unknown command '" + raw.command + "'");
  spec.command = *cmd;
  if (raw.format == "json") {
    spec.format = Format::json;
  } else if (raw.format == "table") {
    spec.format = Format::table;
  } else {
    throw ValidationError("--format must be json or table, got '" + raw.format + "'");
  }
  if (raw.m_max < 0) throw ValidationError("--max-m must be non-negative, got " + std::to_string(raw.m_max));
  spec.m_max = raw.m_max;
  spec.oracle = raw.oracle;
  spec.output_path = raw.output_path;

  const std::pair<const char*, const std::optional<std::string>*> given[] = {
      {"group", &raw.group}, {"gset", &raw.gset},       {"bundle", &raw.bundle},
      {"curve", &raw.curve}, {"divisor", &raw.divisor}, {"weights", &raw.weights}};
  for (const auto& [name, value] : given)
    if (*value && !uses(spec.command, name)) {
      throw ValidationError(std::string("--") + name + " is not used by '" + raw.command + "'");
    }

  Inputs& in = spec.inputs;
  if (raw.group) in.group = io::parse_group(root(load_source(*raw.group, "group")));
  if (raw.gset) in.gset = io::parse_gset(root(load_source(*raw.gset, "gset")));
  if (raw.bundle) {
    in.bundle = io::parse_bundle(root(load_source(*raw.bundle, "bundle")));
    if (in.gset && !(in.bundle->base == *in.gset)) throw ValidationError("--bundle lives on a different G-set than --gset");
  }
  if (raw.curve) in.curve = io::parse_curve(root(load_source(*raw.curve, "curve")));
  if (raw.divisor) {
    if (!in.curve) throw ValidationError("--divisor needs --curve");
    in.divisor = io::parse_divisor(root(load_source(*raw.divisor, "divisor")), *in.curve);
  }
  if (raw.weights) in.weights = io::parse_weights(root(load_source(*raw.weights, "weights")));

  const bool has_gset = in.gset || in.bundle;
  switch (spec.command) {
    case Command::classes:
      if (!in.group && !has_gset) throw ValidationError("'classes' needs --group or --gset");
      if (in.group && in.gset) throw ValidationError("'classes' takes one of --group and --gset");
      break;
    case Command::inertia:
    case Command::euler:
    case Command::series:
      if (!in.gset) throw ValidationError("'" + raw.command + "' needs --gset");
      break;
    case Command::devissage:
      if (!has_gset) throw ValidationError("'devissage' needs --gset or --bundle");
      break;
    case Command::rr:
      if (!in.curve) throw ValidationError("'rr' needs --curve");
      break;
    case Command::weighted:
      if (!in.weights) throw ValidationError("'weighted' needs --weights");
      break;
    case Command::report:
      if (!in.group && !has_gset && !in.curve && !in.weights) throw ValidationError("'report' needs at least one input");
      if (in.group && has_gset && !same_group(*in.group, base_gset(in)->group())) {
        throw ValidationError("--group differs from the group of the G-set");
      }
      break;
  }
  return spec;
}

RunResult run(const JobSpec& spec) {
  RunResult r;
  Ctx ctx;
  ctx.oracle = spec.oracle;
  try {
    r.report = build_report(spec, ctx);
  } catch (const ResourceError& e) {
    return RunResult{status::resource, "", nullptr, std::string("resource limit: ") + e.what()};
  } catch (const std::bad_alloc&) {
    return RunResult{status::resource, "", nullptr, "resource limit: out of memory"};
  } catch (const ConsistencyError& e) {
    return RunResult{status::disagreement, "", nullptr, std::string("oracle disagreement: ") + e.what()};
  } catch (const Error& e) {
    return RunResult{status::invalid, "", nullptr, e.what()};
  }
  r.output = spec.format == Format::json ? r.report.dump(2) + "\n" : render_table(r.report);
  if (ctx.disagree) {
    r.status = status::disagreement;
    r.error = "oracle disagreement: see the \"agree\": false entries";
  }
  if (!spec.output_path.empty()) {
    std::ofstream out(spec.output_path, std::ios::binary);
    out << r.output;
    if (!out) return RunResult{status::invalid, "", r.report, "cannot write '" + spec.output_path + "'"};
  }
  return r;
}

RunResult run(const RawJob& raw) {
  JobSpec spec;
  try {
    spec = load_job(raw);
  } catch (const ResourceError& e) {
    return RunResult{status::resource, "", nullptr, std::string("resource limit: ") + e.what()};
  } catch (const Error& e) {
    return RunResult{status::invalid, "", nullptr, e.what()};
  }
  return run(spec);
}

Json parse_report(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("report: JSON parse error at byte " + std::to_string(e.byte));
  }
  if (!j.is_object() || !j.contains("schema_version") || !j["schema_version"].is_string()) {
    throw ValidationError("report: missing schema_version");
  }
  if (j["schema_version"] != report_schema_version()) {
    throw ValidationError("report: unknown schema version '" + j["schema_version"].get<std::string>() + "'");
  }
  return j;
}

std::string render_table(const Json& report) {
  std::ostringstream out;
  render(report, "", out);
  return out.str();
}

const std::vector<Fixture>& fixtures() {
  static const std::vector<Fixture> table = {
      {"s3-natural", "gset",
       R"({"group": {"permutations": [[1, 0, 2], [1, 2, 0]]}, "points": 3, "generator_action": [[1, 0, 2], [1, 2, 0]]})", ""},
      {"pt-S3", "gset", R"({"preset": "pt-S3"})", ""},
      {"pt-Z2", "gset", R"({"preset": "pt-Z2"})", ""},
      {"free-Z2", "gset", R"({"preset": "free-Z2"})", ""},
      {"s3-regular-bundle", "bundle",
       R"({"gset": "natural-S3", "orbit_characters": [{"orbit": 0, "values_on_stab_classes": [2, 0]}], "genuine": true})", ""},
      {"p237", "curve",
       R"({"genus": 0, "stacky": [{"label": "p2", "order": 2}, {"label": "p3", "order": 3}, {"label": "p7", "order": 7}]})", ""},
      {"modular", "curve", R"({"genus": 0, "stacky": [{"label": "i", "order": 2}, {"label": "rho", "order": 3}]})", ""},
      {"zero", "divisor", "[]", "p237"},
      {"weight-12", "divisor", R"([{"label": "cusp", "num": 1}])", "modular"},
      {"weights-example", "weights",
       R"({"curve": {"genus": 0, "stacky": [{"label": "i", "order": 2}, {"label": "rho", "order": 3}]},
           "point_strata": [["i"], ["rho"]], "point_weights": {"i": 7, "rho": 11}, "open_weight": 5})", ""},
      {"s3-orbit-weights", "weights", R"({"gset": "natural-S3", "orbit_weights": [3]})", ""},
  };
  return table;
}

std::optional<Fixture> find_fixture(const std::string& name) {
  for (const auto& f : fixtures())
    if (f.name == name) return f;
  return std::nullopt;
}

RawJob fixture_job(const Fixture& f) {
  RawJob job;
  job.command = "report";
  job.oracle = true;
  if (f.kind == "group") job.group = f.name;
  if (f.kind == "gset") job.gset = f.name;
  if (f.kind == "bundle") job.bundle = f.name;
  if (f.kind == "curve") job.curve = f.name;
  if (f.kind == "divisor") {
    job.curve = f.companion;
    job.divisor = f.name;
  }
  if (f.kind == "weights") job.weights = f.name;
  return job;
}

}  // namespace stackyrr::cli
