#include "devmodal/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <future>
#include <json.hpp>
#include <sstream>

#include "devmodal/checker.hpp"
#include "devmodal/forcing.hpp"
#include "devmodal/fuzz.hpp"
#include "devmodal/omega.hpp"
#include "devmodal/rationals.hpp"
#include "devmodal/revision.hpp"
#include "devmodal/typereal.hpp"

namespace devmodal::cli {

using json = nlohmann::ordered_json;
using structures::Assignment;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Assignment parse_assigns(const std::vector<std::string>& kvs) {
  Assignment asg;
  for (const std::string& kv : kvs) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw Error("expected --assign <var>=<element>, got '" + kv + "'");
    asg[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return asg;
}

// Free variables that name elements of the union bind to them; anything
// else must come from --assign.
Assignment auto_bind(const model::DevelopmentModel& m, const logic::FormulaPtr& f,
                     Assignment asg) {
  structures::FiniteStructure uni = model::union_of(m);
  for (const logic::Var& v : logic::free_vars(f)) {
    if (asg.count(v.name)) continue;
    if (uni.has_element(v.sort, v.name)) asg[v.name] = v.name;
  }
  return asg;
}

Assignment auto_bind_lasso(const omega::Lasso& l, const logic::FormulaPtr& f,
                           Assignment asg) {
  std::vector<structures::FiniteStructure> all = l.structures;
  structures::FiniteStructure uni = structures::union_structure(all);
  for (const logic::Var& v : logic::free_vars(f)) {
    if (asg.count(v.name)) continue;
    if (uni.has_element(v.sort, v.name)) asg[v.name] = v.name;
  }
  return asg;
}

std::size_t env_threads() {
  const char* t = std::getenv("DEVMODAL_THREADS");
  if (!t) return 1;
  long v = std::strtol(t, nullptr, 10);
  if (v < 1) return 1;
  if (v > 64) return 64;
  return static_cast<std::size_t>(v);
}

// Deterministic parallel map: each case derives its own generator from
// (seed, index), so chunking cannot change results.
template <typename R, typename Fn>
std::vector<R> parallel_cases(std::size_t count, std::size_t threads, Fn&& fn) {
  std::vector<R> out(count);
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::future<void>> futs;
  std::size_t chunk = (count + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    std::size_t lo = t * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    futs.push_back(std::async(std::launch::async, [&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
    }));
  }
  for (auto& f : futs) f.get();
  return out;
}

std::uint64_t case_seed(std::uint64_t seed, std::uint64_t index) {
  return seed * 0x9e3779b97f4a7c15ULL + (index + 1) * 0xbf58476d1ce4e5b9ULL;
}

struct SweepCase {
  bool ok = true;
  std::string witness;
};

enum class Format { Text, Csv, Structured };

Format parse_format(const std::string& f) {
  if (f == "text") return Format::Text;
  if (f == "csv") return Format::Csv;
  if (f == "structured") return Format::Structured;
  throw Error("unknown format '" + f + "'");
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

int cmd_check(const std::string& model_path, const std::string& formula,
              const std::string& state, const std::vector<std::string>& assigns,
              Format fmt, std::ostream& out) {
  model::DevelopmentModel m = model::parse_devmodel(slurp(model_path));
  logic::FormulaPtr f = logic::parse_formula(formula, *m.sig());
  Assignment asg = auto_bind(m, f, parse_assigns(assigns));
  json rows = json::array();
  bool all = true;
  for (const auto& s : m.states()) {
    if (!state.empty() && s != state) continue;
    bool v = check::satisfies(m, s, f, asg);
    all = all && v;
    rows.push_back({{"state", s}, {"holds", v}});
    if (fmt == Format::Text)
      out << s << ": " << (v ? "true" : "false") << "\n";
    else if (fmt == Format::Csv)
      out << s << "," << (v ? "true" : "false") << "\n";
  }
  if (fmt == Format::Structured)
    out << json{{"command", "check"}, {"formula", formula}, {"rows", rows},
                {"global", all}}
               .dump(2)
        << "\n";
  else
    out << "global: " << (all ? "true" : "false") << "\n";
  return 0;
}

int cmd_validate(const std::string& model_path, const std::string& lasso_path,
                 Format fmt, std::ostream& out) {
  model::ValidationReport rep;
  if (!lasso_path.empty())
    rep = omega::validate_lasso(omega::parse_lasso(slurp(lasso_path)));
  else
    rep = model::validate(model::parse_devmodel(slurp(model_path)));
  if (fmt == Format::Structured) {
    json items = json::array();
    for (const auto& v : rep.items)
      items.push_back({{"clause", v.clause}, {"detail", v.detail},
                       {"warning", v.warning}});
    out << json{{"command", "validate"}, {"valid", rep.valid()}, {"items", items}}
               .dump(2)
        << "\n";
  } else {
    out << rep.to_text();
  }
  return rep.valid() ? 0 : 1;
}

int cmd_translate(const std::string& formula, const std::string& mode,
                  const std::string& tuple, const std::string& dynvar, bool full_wrap,
                  std::ostream& out) {
  // the arithmetic signature extended by Dyn1 covers the translation demos;
  // translation itself is signature-independent
  auto base = omega::arith_basic_stream().sig;
  std::vector<logic::Sort> sorts = base->sorts();
  sorts.push_back(logic::dyn_sort(1));
  std::vector<logic::RelationDecl> decls;
  for (const auto& d : base->relations())
    if (!d.manifestation) decls.push_back(d);
  auto sig = std::make_shared<const logic::Signature>(sorts, decls);

  logic::FormulaPtr f = logic::parse_formula(formula, *sig);
  if (mode == "potentialist") {
    out << logic::print_formula(logic::potentialist_translate(f)) << "\n";
    return 0;
  }
  if (mode == "dynsub") {
    std::vector<logic::Var> xs;
    std::istringstream ts(tuple);
    std::string name;
    while (std::getline(ts, name, ','))
      if (!name.empty()) xs.push_back({name, logic::kStat});
    if (xs.empty()) throw Error("--tuple is required for dynsub");
    logic::Var xi{dynvar.empty() ? "xi" : dynvar,
                  logic::dyn_sort(static_cast<int>(xs.size()))};
    out << logic::print_formula(logic::dynamic_substitute(f, xs, xi, full_wrap))
        << "\n";
    return 0;
  }
  throw Error("unknown translation mode '" + mode + "'");
}

int cmd_mirror(std::uint64_t seed, std::size_t count, Format fmt, std::ostream& out) {
  std::size_t threads = env_threads();
  auto cases = parallel_cases<SweepCase>(count, threads, [&](std::size_t i) {
    Rng rng(case_seed(seed, i));
    fuzz::ModelOptions mo;
    auto sig = fuzz::fuzz_signature(rng, mo);
    model::DevelopmentModel m = fuzz::fuzz_model(rng, sig, mo);
    fuzz::FormulaOptions fo;
    fo.quantifier_depth = 2;
    fo.free_vars = 1 + rng.below(2);
    fo.static_only = true;
    logic::FormulaPtr f = fuzz::fuzz_formula(rng, *sig, fo);
    auto asg = fuzz::fuzz_assignment(rng, m, f);
    SweepCase c;
    if (!asg) return c;
    check::MirrorResult r = check::check_mirroring(m, f, *asg);
    // the literal three-way equivalence rides along on literal samples
    logic::FormulaPtr lit = fuzz::fuzz_literal(rng, *sig, 2);
    auto lasg = fuzz::fuzz_assignment(rng, m, lit);
    bool converge_ok = true;
    bool tele_ok = true;
    if (lasg) {
      converge_ok = check::check_converge(m, lit, *lasg).agree;
      // the teleology collapse: optimized equals naive
      tele_ok = check::tele(m, lit, *lasg).verdict == check::tele_naive(m, lit, *lasg);
    }
    if (!r.agree || !converge_ok || !tele_ok) {
      c.ok = false;
      std::ostringstream w;
      w << "case " << i << (r.agree ? "" : " mirroring")
        << (converge_ok ? "" : " converge") << (tele_ok ? "" : " teleology")
        << "\nformula: " << logic::print_formula(f) << "\nliteral: "
        << logic::print_formula(lit) << "\nmodel:\n"
        << model::model_to_text(m);
      c.witness = w.str();
    }
    return c;
  });
  std::size_t bad = 0;
  for (const auto& c : cases)
    if (!c.ok) ++bad;
  if (fmt == Format::Structured) {
    out << json{{"command", "mirror"}, {"seed", seed}, {"cases", count},
                {"disagreements", bad}, {"status", bad == 0 ? "pass" : "fail"}}
               .dump(2)
        << "\n";
  } else {
    out << "mirroring+converge+teleology sweep: " << (bad == 0 ? "PASS" : "FAIL")
        << " (" << count << " cases, " << bad << " disagreements)\n";
  }
  if (bad != 0)
    for (const auto& c : cases)
      if (!c.ok) {
        out << c.witness << "\n";
        break;
      }
  return bad == 0 ? 0 : 1;
}

int cmd_cmp(std::uint64_t seed, std::size_t count, Format fmt, std::ostream& out) {
  std::size_t threads = env_threads();
  auto cases = parallel_cases<SweepCase>(count, threads, [&](std::size_t i) {
    Rng rng(case_seed(seed, i));
    fuzz::ModelOptions mo;
    auto sig = fuzz::fuzz_signature(rng, mo);
    model::DevelopmentModel m = fuzz::fuzz_model(rng, sig, mo);
    std::vector<logic::FormulaPtr> sample;
    fuzz::FormulaOptions fo;
    fo.quantifier_depth = 1;
    fo.free_vars = 1;
    sample.push_back(fuzz::fuzz_literal(rng, *sig, 1));
    sample.push_back(fuzz::fuzz_formula(rng, *sig, fo));
    sample.push_back(
        logic::potentialist_translate(fuzz::fuzz_formula(rng, *sig, fo)));
    check::CmpReport rep = check::check_cmp(m, sample);
    SweepCase c;
    if (!rep.ok()) {
      c.ok = false;
      std::ostringstream w;
      const auto& v = rep.violations.front();
      w << "case " << i << ": schema " << v.schema << " fails at state " << v.state
        << " under " << v.assignment << "\nformula: " << v.formula << "\nmodel:\n"
        << model::model_to_text(m);
      c.witness = w.str();
    }
    return c;
  });
  std::size_t bad = 0;
  for (const auto& c : cases)
    if (!c.ok) ++bad;

  // harness sanity: the fork frame must violate G
  model::DevelopmentModel fork = fuzz::fork_model();
  logic::FormulaPtr r_atom =
      logic::Formula::atom("R", {logic::Var{"x", logic::kStat}});
  check::CmpReport fork_rep = check::check_cmp(fork, {r_atom});
  bool fork_violates = false;
  for (const auto& v : fork_rep.violations)
    if (v.schema == "G") fork_violates = true;

  bool pass = bad == 0 && fork_violates;
  if (fmt == Format::Structured) {
    out << json{{"command", "cmp"}, {"seed", seed}, {"cases", count},
                {"violations", bad}, {"fork_violates_G", fork_violates},
                {"status", pass ? "pass" : "fail"}}
               .dump(2)
        << "\n";
  } else {
    out << "S4.2+stability sweep: " << (bad == 0 ? "PASS" : "FAIL") << " (" << count
        << " models)\n";
    out << "non-directed fork violates G: " << (fork_violates ? "PASS" : "FAIL")
        << "\n";
  }
  if (bad != 0)
    for (const auto& c : cases)
      if (!c.ok) {
        out << c.witness << "\n";
        break;
      }
  return pass ? 0 : 1;
}

int cmd_tele(const std::string& model_path, const std::string& formula,
             const std::vector<std::string>& assigns, Format fmt, std::ostream& out) {
  model::DevelopmentModel m = model::parse_devmodel(slurp(model_path));
  model::ValidationReport vrep = model::validate(m);
  logic::FormulaPtr f = logic::parse_formula(formula, *m.sig());
  Assignment asg = auto_bind(m, f, parse_assigns(assigns));
  check::TeleologyReport rep = check::tele(m, f, asg);
  bool naive = check::tele_naive(m, f, asg);
  bool consistent = !vrep.valid() || rep.verdict == naive;
  if (fmt == Format::Structured) {
    json wit = json::array();
    for (const auto& [s, w] : rep.witness)
      wit.push_back({{"state", s}, {"witness", w ? json(*w) : json(nullptr)}});
    out << json{{"command", "tele"}, {"formula", formula},
                {"verdict", rep.verdict}, {"naive", naive},
                {"witnesses", wit}}
               .dump(2)
        << "\n";
  } else {
    out << "teleological: " << (rep.verdict ? "true" : "false") << "\n";
    for (const auto& [s, w] : rep.witness)
      out << "  " << s << " -> " << (w ? *w : std::string("-")) << "\n";
  }
  return consistent ? 0 : 1;
}

int cmd_sigma2(const std::string& structure_path, const std::string& formula,
               Format fmt, std::ostream& out) {
  structures::FiniteStructure u = structures::parse_structure(slurp(structure_path));
  logic::FormulaPtr f = logic::parse_formula(formula, *u.sig());
  auto cert = check::sigma2_certificate(u, f);
  if (fmt == Format::Structured) {
    json j{{"command", "sigma2"}, {"formula", formula}, {"found", cert.has_value()}};
    if (cert) {
      j["witnesses"] = cert->witnesses;
      j["state"] = cert->state;
      j["verified_supersets"] = cert->verified_supersets;
    }
    out << j.dump(2) << "\n";
  } else if (cert) {
    out << "certificate: witnesses (";
    for (std::size_t i = 0; i < cert->witnesses.size(); ++i)
      out << (i ? "," : "") << cert->witnesses[i];
    out << ") from state " << cert->state << "; verified on "
        << cert->verified_supersets << " superset states\n";
  } else {
    out << "no certificate: the structure does not satisfy the formula\n";
  }
  return 0;
}

int cmd_reflect(const std::string& structure_path,
                const std::vector<std::string>& chain_paths,
                const std::string& formulas_path,
                const std::vector<std::string>& params, Format fmt,
                std::ostream& out) {
  structures::FiniteStructure u = structures::parse_structure(slurp(structure_path));
  std::vector<structures::FiniteStructure> chain;
  for (const std::string& p : chain_paths)
    chain.push_back(structures::parse_structure(slurp(p)));
  std::vector<logic::FormulaPtr> gamma;
  std::istringstream in(slurp(formulas_path));
  std::string line;
  while (std::getline(in, line)) {
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (!blank) gamma.push_back(logic::parse_formula(line, *u.sig()));
  }
  check::ReflectionResult r = check::reflection_dev(u, chain, gamma, params);
  bool pass = r.all_tele();
  if (fmt == Format::Structured) {
    json rows = json::array();
    for (const auto& row : r.rows)
      rows.push_back({{"formula", row.formula}, {"params", row.params},
                      {"teleological", row.tele}});
    out << json{{"command", "reflect"}, {"states", r.model.states().size()},
                {"rows", rows}, {"status", pass ? "pass" : "fail"}}
               .dump(2)
        << "\n";
  } else {
    out << "reflection states: " << r.model.states().size() << "\n";
    for (const auto& row : r.rows) {
      out << "formula " << row.formula << " params (";
      for (std::size_t i = 0; i < row.params.size(); ++i)
        out << (i ? "," : "") << row.params[i];
      out << "): " << (row.tele ? "teleological" : "FAILS") << "\n";
    }
  }
  return pass ? 0 : 1;
}

int cmd_force(std::size_t max_poset, int rank, int width, std::size_t max_generic,
              const std::string& poset_path, Format fmt, std::ostream& out) {
  if (!poset_path.empty()) {
    forcing::Poset p = forcing::parse_poset(slurp(poset_path));
    auto names = forcing::gen_pnames(p, rank, width);
    out << "names of rank <= " << rank << ", width <= " << width << ": "
        << names.size() << "\n";
    for (const forcing::Ideal& i : forcing::all_ideals(p)) {
      out << "ideal {";
      bool first = true;
      for (const auto& e : i) {
        out << (first ? "" : ",") << e;
        first = false;
      }
      out << "}: " << (forcing::is_generic_ideal(p, i) ? "generic" : "not generic")
          << "\n";
    }
    return 0;
  }

  std::size_t collapse_instances = 0, collapse_failures = 0;
  for (std::size_t n = 1; n <= max_poset; ++n) {
    for (const forcing::Poset& p : forcing::enumerate_posets(n)) {
      auto names = forcing::gen_pnames(p, rank, width);
      for (const forcing::Ideal& i : forcing::all_ideals(p, /*include_empty=*/true)) {
        forcing::CollapseCheck c = forcing::check_collapse(p, i, names);
        collapse_instances += c.instances;
        if (!c.pointwise || !c.image_equal) ++collapse_failures;
      }
    }
  }

  std::size_t generic_checked = 0, generic_failures = 0;
  for (std::size_t n = 1; n <= max_generic; ++n)
    for (const forcing::Poset& p : forcing::enumerate_posets(n))
      for (const forcing::Ideal& i : forcing::all_ideals(p)) {
        ++generic_checked;
        if (forcing::is_generic_ideal(p, i) != forcing::contains_maximal_element(p, i))
          ++generic_failures;
      }

  bool pass = collapse_failures == 0 && generic_failures == 0;
  if (fmt == Format::Structured) {
    out << json{{"command", "force"}, {"max_poset", max_poset}, {"rank", rank},
                {"width", width}, {"collapse_instances", collapse_instances},
                {"collapse_failures", collapse_failures},
                {"generic_checked", generic_checked},
                {"generic_failures", generic_failures},
                {"status", pass ? "pass" : "fail"}}
               .dump(2)
        << "\n";
  } else {
    out << "mostowski=val: " << (collapse_failures == 0 ? "PASS" : "FAIL") << " ("
        << collapse_instances << " instances)\n";
    out << "generic iff contains-maximal (|P| <= " << max_generic
        << "): " << (generic_failures == 0 ? "PASS" : "FAIL") << " ("
        << generic_checked << " ideals)\n";
  }
  return pass ? 0 : 1;
}

int cmd_revise(const std::string& net_path, const std::string& formula,
               const std::string& p0_csv, bool multi, int uct_depth,
               const std::string& q_csv, Format fmt, std::ostream& out) {
  revision::SentenceNetwork net = revision::parse_network(slurp(net_path));
  auto parse_hyp = [&](const std::string& csv) {
    revision::Hypothesis h;
    std::istringstream ss(csv);
    std::string nm;
    while (std::getline(ss, nm, ','))
      if (!nm.empty()) h.insert(nm);
    return h;
  };

  if (multi) {
    revision::MultiRootReport rep = revision::multi_root(net);
    if (fmt == Format::Structured) {
      json roots = json::array();
      for (const auto& r : rep.roots) {
        json row{{"p0", std::vector<std::string>(r.p0.begin(), r.p0.end())},
                 {"transient", r.transient}, {"period", r.period}};
        json cls = json::object();
        for (const auto& [n, c] : r.box_class)
          cls[n] = c > 0 ? "box-true" : c < 0 ? "box-false" : "oscillates";
        row["classes"] = cls;
        roots.push_back(row);
      }
      out << json{{"command", "revise"}, {"mode", "multi-root"}, {"roots", roots}}
                 .dump(2)
          << "\n";
    } else {
      for (const auto& r : rep.roots) {
        out << "root {";
        bool first = true;
        for (const auto& n : r.p0) {
          out << (first ? "" : ",") << n;
          first = false;
        }
        out << "} lasso(" << r.transient << "," << r.period << "):";
        for (const auto& [n, c] : r.box_class)
          out << " " << n << "="
              << (c > 0 ? "box-true" : c < 0 ? "box-false" : "oscillates");
        out << "\n";
      }
    }
    return 0;
  }

  if (uct_depth > 0) {
    revision::UctReport rep = revision::uct_fragment_check(net, parse_hyp(q_csv),
                                                           uct_depth);
    auto rows = revision::battery_tabulation(net);
    std::size_t mism = 0;
    for (const auto& r : rows)
      if (r.battery != r.in_image) ++mism;
    if (fmt == Format::Structured) {
      out << json{{"command", "revise"}, {"mode", "uct"},
                  {"fragment", rep.fragment_size}, {"checks", rep.checks},
                  {"violations", rep.violations.size()},
                  {"battery_rows", rows.size()}, {"battery_mismatches", mism}}
                 .dump(2)
          << "\n";
    } else {
      out << "uct one-step checks: " << (rep.ok() ? "PASS" : "FAIL") << " ("
          << rep.checks << " checks over " << rep.fragment_size << " sentences)\n";
      out << "battery vs image tabulation: " << (mism == 0 ? "agree" : "DIFFER")
          << " (" << rows.size() << " hypotheses)\n";
    }
    return rep.ok() && mism == 0 ? 0 : 1;
  }

  revision::Hypothesis p0 = parse_hyp(p0_csv);
  omega::Lasso l = revision::truth_dev_model(net, p0);
  if (formula.empty()) {
    revision::RevisionLasso rl = revision::revision_sequence(net, p0);
    if (fmt == Format::Structured) {
      json hyps = json::array();
      for (const auto& h : rl.hypotheses)
        hyps.push_back(std::vector<std::string>(h.begin(), h.end()));
      out << json{{"command", "revise"}, {"transient", rl.transient},
                  {"period", rl.period}, {"hypotheses", hyps}}
                 .dump(2)
          << "\n";
    } else {
      out << "lasso: transient " << rl.transient << ", period " << rl.period << "\n";
      for (std::size_t i = 0; i < rl.hypotheses.size(); ++i) {
        out << "  P" << i << " = {";
        bool first = true;
        for (const auto& n : rl.hypotheses[i]) {
          out << (first ? "" : ",") << n;
          first = false;
        }
        out << "}\n";
      }
    }
    return 0;
  }

  logic::FormulaPtr f = logic::parse_formula(formula, *l.structures[0].sig());
  Assignment asg = auto_bind_lasso(l, f, {});
  bool v = omega::lasso_satisfies(l, 0, f, asg);
  if (fmt == Format::Structured) {
    out << json{{"command", "revise"}, {"formula", formula}, {"holds", v},
                {"status", v ? "pass" : "fail"}}
               .dump(2)
        << "\n";
  } else {
    out << (v ? "PASS" : "FAIL") << ": " << formula << "\n";
  }
  return v ? 0 : 1;
}

rationals::Net preset_net(const std::string& name) {
  if (name == "leibniz") return rationals::leibniz_net();
  if (name == "machin") return rationals::machin_net();
  if (name == "dyadic-sqrt2") return rationals::dyadic_sqrt2_net();
  if (name.rfind("const:", 0) == 0)
    return rationals::const_net(rationals::rat_parse(name.substr(6)));
  throw Error("unknown net preset '" + name + "'");
}

int cmd_reals(const std::string& net_name, std::size_t table, bool cauchy, bool rho,
              const std::string& equiv_other, const std::string& rho_grid,
              std::size_t horizon, Format fmt, std::ostream& out) {
  rationals::Net net = preset_net(net_name);
  if (table > 0) {
    if (fmt == Format::Structured) {
      json rows = json::array();
      for (std::size_t s = 0; s < table; ++s) {
        json row{{"state", s}, {"value", rationals::rat_text(net.value(s))}};
        if (net.target)
          row["bound"] = rationals::rat_text(net.target->bound(s));
        rows.push_back(row);
      }
      out << json{{"command", "reals"}, {"net", net_name}, {"rows", rows}}.dump(2)
          << "\n";
    } else {
      for (std::size_t s = 0; s < table; ++s) {
        out << s << (fmt == Format::Csv ? "," : " ")
            << rationals::rat_text(net.value(s));
        if (net.target)
          out << (fmt == Format::Csv ? "," : " ")
              << rationals::rat_text(net.target->bound(s));
        out << "\n";
      }
    }
    return 0;
  }
  if (cauchy) {
    rationals::CauchyResult r = rationals::cauchy_convergent(net, horizon);
    out << "cauchy: "
        << (r.status == rationals::CertStatus::Certified   ? "Certified"
            : r.status == rationals::CertStatus::Refuted ? "Refuted"
                                                           : "Unknown(" +
                                                                 std::to_string(r.horizon) +
                                                                 ")")
        << (r.detail.empty() ? "" : " [" + r.detail + "]") << "\n";
    return 0;
  }
  if (!equiv_other.empty()) {
    rationals::Net other = preset_net(equiv_other);
    rationals::CauchyResult r = rationals::cauchy_equiv(net, other, horizon);
    out << "equivalent: "
        << (r.status == rationals::CertStatus::Certified   ? "Certified"
            : r.status == rationals::CertStatus::Refuted ? "Refuted"
                                                           : "Unknown")
        << (r.detail.empty() ? "" : " [" + r.detail + "]") << "\n";
    return 0;
  }
  if (rho) {
    rationals::CauchyResult r = rationals::eval_rho_omega(net, horizon);
    out << "rho (omega, via modulus): "
        << (r.status == rationals::CertStatus::Certified   ? "Certified"
            : r.status == rationals::CertStatus::Refuted ? "Refuted"
                                                           : "Unknown")
        << (r.detail.empty() ? "" : " [" + r.detail + "]") << "\n";
    return 0;
  }
  if (!rho_grid.empty()) {
    std::vector<rationals::Rational> grid;
    std::istringstream gs(rho_grid);
    std::string q;
    while (std::getline(gs, q, ','))
      if (!q.empty()) grid.push_back(rationals::rat_parse(q));
    if (!net.target) throw Error("the grid evaluation needs a net with a target");
    rationals::Target t = *net.target;
    rationals::RhoReport rep = rationals::eval_rho_finite(
        grid, [&](const std::set<rationals::Rational>& s) {
          // best approximant of the target inside the state
          std::vector<rationals::Rational> g(s.begin(), s.end());
          auto sub = rationals::d_r_net(
              t, [&](std::size_t) { return g; },
              [](std::size_t) { return rationals::Rational(1); });
          return sub.value(0);
        });
    out << "rho on the grid model: " << (rep.formula_holds ? "holds" : "fails")
        << "; chain agreement: " << (rep.all_agree ? "PASS" : "FAIL") << "\n";
    out << "formula: " << rep.formula_text << "\n";
    return rep.all_agree ? 0 : 1;
  }
  throw Error("choose one of --table/--cauchy/--equiv/--rho/--rho-grid");
}

int cmd_types(const std::string& preset, const std::string& type_path,
              std::size_t horizon, const std::string& formula, Format fmt,
              std::ostream& out) {
  typereal::Ambient amb = typereal::arith_ambient();
  typereal::TypeFragment frag;
  if (!type_path.empty())
    frag = typereal::parse_type_fragment(slurp(type_path), amb);
  else if (preset == "zero")
    frag = typereal::zero_type();
  else if (preset.rfind("gt:", 0) == 0)
    frag = typereal::greater_than_type(std::stoul(preset.substr(3)));
  else
    throw Error("unknown type preset '" + preset + "'");

  typereal::RealizerNet net = typereal::d_p(frag, amb);
  auto verdicts = typereal::tele_type_net(frag, amb, net, horizon);
  bool tele_ok = true;
  for (const auto& v : verdicts) tele_ok = tele_ok && v.ok;

  json jrows = json::array();
  if (fmt != Format::Structured) {
    out << "realizer:";
    for (std::size_t s = 0; s <= std::min<std::size_t>(horizon, 12); ++s) {
      auto t = net.at(s);
      out << " ";
      for (std::size_t i = 0; i < t.size(); ++i) out << (i ? "," : "") << t[i];
    }
    out << "\n";
    for (const auto& v : verdicts)
      out << "p" << v.formula << ": "
          << (v.ok ? "teleological from state " + std::to_string(v.from_state)
                   : "FAILS " + v.counterexample)
          << "\n";
  } else {
    for (const auto& v : verdicts)
      jrows.push_back({{"formula", v.formula}, {"ok", v.ok},
                       {"from_state", v.from_state}});
  }

  bool chain_ok = true;
  std::string los_line;
  if (!formula.empty()) {
    logic::FormulaPtr f = logic::parse_formula(formula, *amb.sig());
    typereal::LosResult r = typereal::eventual_los(frag, amb, f, horizon);
    chain_ok = r.chain_ok;
    los_line = typereal::los_text(r.verdict);
    if (fmt != Format::Structured)
      out << "eventual verdict: " << los_line << "\n";
  }

  if (fmt == Format::Structured)
    out << json{{"command", "types"}, {"tele", jrows}, {"tele_ok", tele_ok},
                {"los", los_line}, {"chain_ok", chain_ok}}
               .dump(2)
        << "\n";
  return tele_ok && chain_ok ? 0 : 1;
}

int cmd_omega(const std::string& lasso_path, const std::string& stream_name,
              std::size_t at, std::size_t horizon, const std::string& formula,
              Format fmt, std::ostream& out) {
  if (!lasso_path.empty()) {
    omega::Lasso l = omega::parse_lasso(slurp(lasso_path));
    model::ValidationReport rep = omega::validate_lasso(l);
    if (!rep.valid()) {
      out << rep.to_text();
      return 1;
    }
    logic::FormulaPtr f = logic::parse_formula(formula, *l.structures[0].sig());
    Assignment asg = auto_bind_lasso(l, f, {});
    bool v = omega::lasso_satisfies(l, at, f, asg);
    if (fmt == Format::Structured)
      out << json{{"command", "omega"}, {"mode", "lasso"}, {"state", at},
                  {"holds", v}}
                 .dump(2)
          << "\n";
    else
      out << "state " << at << ": " << (v ? "true" : "false") << "\n";
    return 0;
  }
  omega::StructureStream stream;
  if (stream_name == "arith-basic")
    stream = omega::arith_basic_stream();
  else if (stream_name.rfind("rationals-grid:", 0) == 0)
    stream = omega::rationals_grid_stream(std::stoi(stream_name.substr(15)));
  else
    throw Error("unknown stream '" + stream_name + "'");
  logic::FormulaPtr f = logic::parse_formula(formula, *stream.sig);
  omega::BoundedVerdict v = omega::bounded_satisfies(stream, horizon, f, {});
  if (fmt == Format::Structured) {
    out << json{{"command", "omega"}, {"mode", "bounded"}, {"stream", stream_name},
                {"horizon", horizon},
                {"verdict", v.kind == omega::VerdictKind::True    ? "True"
                            : v.kind == omega::VerdictKind::False ? "False"
                                                                  : "Unknown"},
                {"certificate", v.certificate}}
               .dump(2)
        << "\n";
  } else {
    out << v.to_text() << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"development-model checker"};
  app.require_subcommand(1);

  std::string format = "text";
  app.add_option("--format", format, "text | csv | structured");

  // check
  auto* check_cmd = app.add_subcommand("check", "evaluate a formula on a model");
  std::string model_path, formula, state;
  std::vector<std::string> assigns;
  check_cmd->add_option("--model", model_path)->required();
  check_cmd->add_option("--formula", formula)->required();
  check_cmd->add_option("--state", state);
  check_cmd->add_option("--assign", assigns);

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "validate a model or lasso");
  std::string v_model, v_lasso;
  validate_cmd->add_option("--model", v_model);
  validate_cmd->add_option("--lasso", v_lasso);

  // translate
  auto* translate_cmd = app.add_subcommand("translate", "potentialist / dynsub");
  std::string t_formula, t_mode = "potentialist", t_tuple, t_dyn;
  bool t_fullwrap = false;
  translate_cmd->add_option("--formula", t_formula)->required();
  translate_cmd->add_option("--mode", t_mode);
  translate_cmd->add_option("--tuple", t_tuple);
  translate_cmd->add_option("--dyn", t_dyn);
  translate_cmd->add_flag("--full-wrap", t_fullwrap);

  // sweeps
  std::uint64_t seed = 0;
  std::size_t count = 0;
  auto* mirror_cmd = app.add_subcommand("mirror", "mirroring sweep");
  mirror_cmd->add_option("--seed", seed);
  mirror_cmd->add_option("--count", count);
  auto* cmp_cmd = app.add_subcommand("cmp", "axiom schema sweep");
  cmp_cmd->add_option("--seed", seed);
  cmp_cmd->add_option("--count", count);

  // tele
  auto* tele_cmd = app.add_subcommand("tele", "teleological satisfaction");
  std::string te_model, te_formula;
  std::vector<std::string> te_assigns;
  tele_cmd->add_option("--model", te_model)->required();
  tele_cmd->add_option("--formula", te_formula)->required();
  tele_cmd->add_option("--assign", te_assigns);

  // sigma2
  auto* sigma_cmd = app.add_subcommand("sigma2", "witness certificates");
  std::string s_structure, s_formula;
  sigma_cmd->add_option("--structure", s_structure)->required();
  sigma_cmd->add_option("--formula", s_formula)->required();

  // reflect
  auto* reflect_cmd = app.add_subcommand("reflect", "reflection development");
  std::string r_structure, r_formulas;
  std::vector<std::string> r_chain, r_params;
  reflect_cmd->add_option("--structure", r_structure)->required();
  reflect_cmd->add_option("--chain", r_chain)->required();
  reflect_cmd->add_option("--formulas", r_formulas)->required();
  reflect_cmd->add_option("--params", r_params);

  // force
  auto* force_cmd = app.add_subcommand("force", "names, ideals, collapse sweep");
  std::size_t max_poset = 3, max_generic = 4;
  int rank = 2, width = 2;
  std::string f_poset;
  force_cmd->add_option("--max-poset", max_poset);
  force_cmd->add_option("--rank", rank);
  force_cmd->add_option("--width", width);
  force_cmd->add_option("--max-generic", max_generic);
  force_cmd->add_option("--poset", f_poset);

  // revise
  auto* revise_cmd = app.add_subcommand("revise", "revision networks");
  std::string rv_net, rv_formula, rv_p0, rv_q;
  bool rv_multi = false;
  int rv_uct = 0;
  revise_cmd->add_option("--net", rv_net)->required();
  revise_cmd->add_option("--formula", rv_formula);
  revise_cmd->add_option("--p0", rv_p0);
  revise_cmd->add_flag("--multi-root", rv_multi);
  revise_cmd->add_option("--uct-depth", rv_uct);
  revise_cmd->add_option("--q", rv_q);

  // reals
  auto* reals_cmd = app.add_subcommand("reals", "rational nets");
  std::string re_net = "leibniz", re_equiv, re_grid;
  std::size_t re_table = 0, horizon = 25;
  bool re_cauchy = false, re_rho = false;
  reals_cmd->add_option("--net", re_net);
  reals_cmd->add_option("--table", re_table);
  reals_cmd->add_flag("--cauchy", re_cauchy);
  reals_cmd->add_flag("--rho", re_rho);
  reals_cmd->add_option("--equiv", re_equiv);
  reals_cmd->add_option("--rho-grid", re_grid);
  reals_cmd->add_option("--horizon", horizon);

  // types
  auto* types_cmd = app.add_subcommand("types", "type fragments");
  std::string ty_preset = "gt:10", ty_file, ty_formula;
  types_cmd->add_option("--preset", ty_preset);
  types_cmd->add_option("--type", ty_file);
  types_cmd->add_option("--formula", ty_formula);
  types_cmd->add_option("--horizon", horizon);

  // omega
  auto* omega_cmd = app.add_subcommand("omega", "lasso / bounded evaluation");
  std::string o_lasso, o_stream, o_formula;
  std::size_t o_at = 0;
  omega_cmd->add_option("--lasso", o_lasso);
  omega_cmd->add_option("--stream", o_stream);
  omega_cmd->add_option("--formula", o_formula)->required();
  omega_cmd->add_option("--at", o_at);
  omega_cmd->add_option("--horizon", horizon);

  std::vector<std::string> argv = args;
  try {
    std::vector<const char*> cargs;
    cargs.push_back("devmodal");
    for (const std::string& a : argv) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help and friends
      out << app.help();
      return 0;
    }
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    Format fmt = parse_format(format);
    if (*check_cmd) return cmd_check(model_path, formula, state, assigns, fmt, out);
    if (*validate_cmd) return cmd_validate(v_model, v_lasso, fmt, out);
    if (*translate_cmd)
      return cmd_translate(t_formula, t_mode, t_tuple, t_dyn, t_fullwrap, out);
    if (*mirror_cmd) return cmd_mirror(seed, count ? count : 1000, fmt, out);
    if (*cmp_cmd) return cmd_cmp(seed, count ? count : 500, fmt, out);
    if (*tele_cmd) return cmd_tele(te_model, te_formula, te_assigns, fmt, out);
    if (*sigma_cmd) return cmd_sigma2(s_structure, s_formula, fmt, out);
    if (*reflect_cmd)
      return cmd_reflect(r_structure, r_chain, r_formulas, r_params, fmt, out);
    if (*force_cmd)
      return cmd_force(max_poset, rank, width, max_generic, f_poset, fmt, out);
    if (*revise_cmd)
      return cmd_revise(rv_net, rv_formula, rv_p0, rv_multi, rv_uct, rv_q, fmt, out);
    if (*reals_cmd)
      return cmd_reals(re_net, re_table, re_cauchy, re_rho, re_equiv, re_grid,
                       horizon, fmt, out);
    if (*types_cmd)
      return cmd_types(ty_preset, ty_file, horizon, ty_formula, fmt, out);
    if (*omega_cmd)
      return cmd_omega(o_lasso, o_stream, o_at, horizon, o_formula, fmt, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "no subcommand selected\n";
  return 2;
}

}  // namespace devmodal::cli
