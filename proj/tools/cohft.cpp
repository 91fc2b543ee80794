// Command-line front end. Every command prints one JSON (or CSV) document.
// Exit codes: 0 success, 1 validation failure, 2 input error.

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "cohft/io.hpp"
#include "json.hpp"

using namespace cohft;
using json = nlohmann::json;

namespace {

struct RunConfig {
  int gMax = 2;
  int nMax = 6;
  int psiDegreeMax = 7;
  int zOrder = 6;
  std::uint64_t seed = 1;
  bool trace = false;
  std::string format = "json";
  std::string output;
  int threads = 1;
};

struct Outcome {
  json doc;
  int code = 0;
};

class InputError : public Error {
 public:
  InputError(std::string pointer, const std::string& what) : Error(what), pointer(std::move(pointer)) {}
  std::string pointer;
};

json parse_arg(const std::string& text, const std::string& flag) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    throw InputError("", flag + " is not JSON");
  }
}

void apply_caps(RunConfig& cfg, const std::string& text) {
  const json c = parse_arg(text, "--caps");
  if (!c.is_object()) throw InputError("", "--caps must be a JSON object");
  for (auto it = c.begin(); it != c.end(); ++it) {
    if (!it.value().is_number_integer()) throw InputError("/" + it.key(), "expected an integer");
    const int v = it.value().get<int>();
    if (it.key() == "gMax")
      cfg.gMax = v;
    else if (it.key() == "nMax")
      cfg.nMax = v;
    else if (it.key() == "psiDegreeMax")
      cfg.psiDegreeMax = v;
    else if (it.key() == "zOrder")
      cfg.zOrder = v;
    else
      throw InputError("/" + it.key(), "unknown cap");
  }
  if (cfg.gMax < 0 || cfg.gMax > 2) throw InputError("/gMax", "must lie in [0, 2]");
  if (cfg.nMax < 0 || cfg.nMax > 8) throw InputError("/nMax", "must lie in [0, 8]");
  if (cfg.psiDegreeMax < 0 || cfg.psiDegreeMax > 12) throw InputError("/psiDegreeMax", "must lie in [0, 12]");
  if (cfg.zOrder < 0 || cfg.zOrder > 8) throw InputError("/zOrder", "must lie in [0, 8]");
}

json report_json(const ValidationReport& rep) {
  json checks = json::array();
  for (const auto& e : rep.entries) checks.push_back({{"check", e.check}, {"passed", e.passed}, {"detail", e.detail}});
  return checks;
}

std::vector<std::pair<int, int>> int_pairs(const std::string& text, const std::string& flag, std::size_t width,
                                           std::vector<std::vector<int>>* full = nullptr) {
  const json j = parse_arg(text, flag);
  if (!j.is_array()) throw InputError("", flag + " must be an array");
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = "/" + std::to_string(i);
    if (!j[i].is_array() || j[i].size() != width)
      throw InputError(p, "expected an array of " + std::to_string(width) + " integers");
    std::vector<int> row;
    for (std::size_t k = 0; k < width; ++k) {
      if (!j[i][k].is_number_integer()) throw InputError(p + "/" + std::to_string(k), "expected an integer");
      row.push_back(j[i][k].get<int>());
    }
    if (row.back() < 0) throw InputError(p + "/" + std::to_string(width - 1), "negative psi power");
    out.push_back({row.front(), row.back()});
    if (full) full->push_back(row);
  }
  return out;
}

RMatrix target_r(const TargetFile& t, const RunConfig& cfg, bool randomR) {
  if (randomR) {
    std::mt19937_64 rng(cfg.seed);
    return random_symplectic(t.frobenius.pairing, cfg.zOrder, rng);
  }
  if (t.rmatrix) return *t.rmatrix;
  return RMatrix::identity(t.frobenius.dim, cfg.zOrder);
}

Vec basis(int dim, int a, const std::string& pointer) {
  if (a < 0 || a >= dim) throw InputError(pointer, "basis index out of range");
  Vec v(dim);
  v[a] = 1;
  return v;
}

json trace_json(const std::vector<GraphContribution>& trace) {
  json out = json::array();
  for (const auto& c : trace)
    out.push_back({{"graph", c.canonicalForm}, {"automorphisms", c.automorphisms}, {"value", to_string(c.value)}});
  return out;
}

XCorrelatorTable load_table(const std::string& spec, const RunConfig& cfg) {
  const TableCaps caps{cfg.gMax, 8, 12};
  if (spec == "point") return XCorrelatorTable::point(caps);
  if (spec.rfind("npoints:", 0) == 0) {
    const int n = std::atoi(spec.c_str() + 8);
    if (n < 1) throw InputError("", "--x npoints:N needs N >= 1");
    return XCorrelatorTable::npoints(n, {}, caps);
  }
  return parse_table(read_file(spec));
}

PotentialSource source_for(const TargetFile& t, const RactionOptions& opt) {
  const auto dec = idempotent_basis(t.frobenius);
  if (t.rmatrix) return raction_source(dec, *t.rmatrix, opt);
  return tft_source(dec);
}

json monomial_json(const Monomial& m) {
  json a = json::array();
  for (const auto& [k, x] : m) a.push_back({k, x});
  return a;
}

// ---------------------------------------------------------------------------

std::string to_csv(const json& doc) {
  std::ostringstream os;
  std::vector<std::string> tables;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.value().is_array() && !it.value().empty() && it.value().front().is_object()) {
      tables.push_back(it.key());
      continue;
    }
    os << it.key() << "," << (it.value().is_string() ? it.value().get<std::string>() : it.value().dump()) << "\n";
  }
  for (const auto& name : tables) {
    const json& rows = doc[name];
    std::vector<std::string> cols;
    for (auto it = rows.front().begin(); it != rows.front().end(); ++it) cols.push_back(it.key());
    os << "\n" << name << "\n";
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        const json& v = r.at(cols[i]);
        std::string s = v.is_string() ? v.get<std::string>() : v.dump();
        if (s.find(',') != std::string::npos || s.find('"') != std::string::npos) {
          std::string q = "\"";
          for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
          s = q + "\"";
        }
        os << (i ? "," : "") << s;
      }
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cohomological field theory engine: graphs, intersection numbers, R-action and product correlators, "
               "Virasoro and grading checks"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string capsText;
  app.add_option("--caps", capsText, "JSON object with gMax, nMax, psiDegreeMax, zOrder");
  app.add_option("--seed", cfg.seed, "seed for sampled R-matrices");
  app.add_flag("--trace", cfg.trace, "include per-graph contributions");
  app.add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output", cfg.output, "write the report to FILE");
  app.add_option("--threads", cfg.threads, "worker threads for constraint checks")->check(CLI::Range(1, 64));

  std::function<Outcome()> run;

  auto* validate = app.add_subcommand("validate", "validate a target file or an X table");
  std::string vTarget, vTable;
  validate->add_option("--target", vTarget, "target JSON file");
  validate->add_option("--table", vTable, "X correlator table JSON file");
  validate->callback([&] {
    run = [&]() -> Outcome {
      if (vTarget.empty() == vTable.empty()) throw InputError("", "give exactly one of --target, --table");
      if (!vTable.empty()) {
        const auto t = parse_table(read_file(vTable));
        return {{{"table", t.label}, {"valid", true}, {"checks", report_json(validate_table(t))}}};
      }
      const auto t = read_target(vTarget);
      ValidationReport rep = validate_frobenius(t.frobenius);
      if (t.graded())
        for (const auto& e : validate_graded(GradedTargetData{t.frobenius, *t.mu, *t.rho}).entries)
          rep.entries.push_back(e);
      if (t.rmatrix)
        for (const auto& e : validate_symplectic(*t.rmatrix, t.frobenius.pairing).entries) rep.entries.push_back(e);
      json doc{{"target", t.frobenius.label}, {"dim", t.frobenius.dim}, {"valid", true}, {"checks", report_json(rep)}};
      doc["rmatrixOrder"] = t.rmatrix ? t.rmatrix->order() : -1;
      doc["smatrixOrder"] = t.smatrix ? static_cast<int>(t.smatrix->size()) - 1 : -1;
      return {doc};
    };
  });

  auto* graphs = app.add_subcommand("graphs", "enumerate stable graphs");
  int gGenus = 0, gLegs = 0;
  graphs->add_option("--genus", gGenus)->required();
  graphs->add_option("--legs", gLegs)->required();
  graphs->callback([&] {
    run = [&]() -> Outcome {
      if (gGenus > cfg.gMax || gLegs > cfg.nMax) throw CapExceeded("graphs outside --caps");
      const auto& set = enumerate(gGenus, gLegs, GraphCaps{cfg.gMax, cfg.nMax});
      json list = json::array();
      for (std::size_t i = 0; i < set.graphs.size(); ++i)
        list.push_back({{"canonical", set.canonicalForms[i]},
                        {"automorphisms", automorphism_order(set.graphs[i])},
                        {"edges", static_cast<int>(set.graphs[i].edges().size())}});
      return {{{"genus", gGenus}, {"legs", gLegs}, {"count", static_cast<int>(set.graphs.size())}, {"graphs", list}}};
    };
  });

  auto* inter = app.add_subcommand("intersection", "psi/kappa integrals on the moduli space");
  std::string iSpec;
  inter->add_option("--spec", iSpec, R"(JSON {"g":G,"powers":[...],"kappa":[...]})")->required();
  inter->callback([&] {
    run = [&]() -> Outcome {
      const json s = parse_arg(iSpec, "--spec");
      if (!s.is_object() || !s.contains("g") || !s["g"].is_number_integer()) throw InputError("/g", "expected an integer");
      const int g = s["g"].get<int>();
      auto ints = [&](const char* key) {
        std::vector<int> out;
        if (!s.contains(key)) return out;
        if (!s[key].is_array()) throw InputError(std::string("/") + key, "expected an array");
        for (std::size_t i = 0; i < s[key].size(); ++i) {
          if (!s[key][i].is_number_integer() || s[key][i].get<int>() < 0)
            throw InputError(std::string("/") + key + "/" + std::to_string(i), "expected a nonnegative integer");
          out.push_back(s[key][i].get<int>());
        }
        return out;
      };
      const auto powers = ints("powers"), kappa = ints("kappa");
      const IntersectCaps caps{cfg.gMax, 16, 16};
      const Scalar v = kappa.empty() ? psi_correlator(g, powers, caps) : kappa_integral(g, powers, kappa, caps);
      return {{{"g", g}, {"powers", powers}, {"kappa", kappa}, {"value", to_string(v)}}};
    };
  });

  auto* corr = app.add_subcommand("correlator", "correlator of R.omega on a target");
  std::string cTarget, cInserts = "[]";
  int cGenus = 0;
  bool cRandom = false;
  corr->add_option("--target", cTarget)->required();
  corr->add_option("--genus", cGenus)->required();
  corr->add_option("--inserts", cInserts, "JSON [[basis index, psi], ...]");
  corr->add_flag("--random-r", cRandom, "use a seeded random symplectic R of order zOrder");
  corr->callback([&] {
    run = [&]() -> Outcome {
      const auto t = read_target(cTarget);
      const auto pairs = int_pairs(cInserts, "--inserts", 2);
      if (cGenus < 0 || cGenus > cfg.gMax || static_cast<int>(pairs.size()) > cfg.nMax)
        throw CapExceeded("correlator outside --caps");
      std::vector<Insert> ins;
      for (std::size_t i = 0; i < pairs.size(); ++i)
        ins.push_back({basis(t.frobenius.dim, pairs[i].first, "/" + std::to_string(i) + "/0"), pairs[i].second});
      std::vector<GraphContribution> trace;
      RactionOptions opt;
      opt.graphCaps = {cfg.gMax, cfg.nMax};
      if (cfg.trace) opt.trace = &trace;
      const Scalar v = raction_correlator(idempotent_basis(t.frobenius), target_r(t, cfg, cRandom), cGenus, ins, opt);
      json doc{{"target", t.frobenius.label}, {"genus", cGenus}, {"inserts", parse_arg(cInserts, "--inserts")},
               {"value", to_string(v)}};
      if (cfg.trace) doc["trace"] = trace_json(trace);
      return {doc};
    };
  });

  auto* pcorr = app.add_subcommand("product-correlator", "correlator of Omega^X (x) R.omega^Y");
  std::string pX = "point", pTarget, pInserts = "[]";
  int pGenus = 0;
  bool pRandom = false;
  pcorr->add_option("--x", pX, "point, npoints:N or an X table file");
  pcorr->add_option("--target", pTarget, "Y target file")->required();
  pcorr->add_option("--genus", pGenus)->required();
  pcorr->add_option("--inserts", pInserts, "JSON [[x index, y index, psi], ...]");
  pcorr->add_flag("--random-r", pRandom, "use a seeded random symplectic R of order zOrder");
  pcorr->callback([&] {
    run = [&]() -> Outcome {
      const auto table = load_table(pX, cfg);
      const auto t = read_target(pTarget);
      std::vector<std::vector<int>> rows;
      int_pairs(pInserts, "--inserts", 3, &rows);
      if (pGenus < 0 || pGenus > cfg.gMax || static_cast<int>(rows.size()) > cfg.nMax)
        throw CapExceeded("correlator outside --caps");
      ProductSpec spec{&table, idempotent_basis(t.frobenius), target_r(t, cfg, pRandom), pGenus, {}};
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string p = "/" + std::to_string(i);
        spec.inserts.push_back({tensor_vector(basis(table.dim, rows[i][0], p + "/0"),
                                              basis(t.frobenius.dim, rows[i][1], p + "/1")),
                                rows[i][2]});
      }
      RactionOptions opt;
      opt.graphCaps = {cfg.gMax, cfg.nMax};
      const Scalar v = product_correlator(spec, opt);
      return {{{"x", table.label}, {"y", t.frobenius.label}, {"genus", pGenus},
               {"inserts", parse_arg(pInserts, "--inserts")}, {"value", to_string(v)}}};
    };
  });

  auto* pot = app.add_subcommand("potential", "truncated descendant potential of a target");
  std::string potTarget;
  pot->add_option("--target", potTarget)->required();
  pot->callback([&] {
    run = [&]() -> Outcome {
      const auto t = read_target(potTarget);
      RactionOptions opt;
      opt.graphCaps = {cfg.gMax, cfg.nMax};
      const PotentialCaps caps{cfg.gMax, cfg.nMax, cfg.psiDegreeMax};
      const auto p = assemble_potential(source_for(t, opt), caps);
      json entries = json::array();
      for (const auto& [g, m] : p.correlators)
        for (const auto& [mono, v] : m)
          entries.push_back({{"genus", g},
                             {"monomial", monomial_string(mono)},
                             {"correlator", to_string(v)},
                             {"coefficient", to_string(p.coefficient(g, mono))}});
      return {{{"target", t.frobenius.label},
               {"caps", {{"gMax", caps.gMax}, {"nMax", caps.nMax}, {"K", caps.K}}},
               {"count", static_cast<int>(entries.size())},
               {"entries", entries}}};
    };
  });

  auto* vir = app.add_subcommand("virasoro-check", "check L_m Z = 0 coefficientwise within caps");
  std::string vrTarget;
  int mMax = 3;
  vir->add_option("--target", vrTarget)->required();
  vir->add_option("--m-max", mMax, "check L_{-1} .. L_{m-max}")->check(CLI::Range(-1, 8));
  vir->callback([&] {
    run = [&]() -> Outcome {
      const auto t = read_target(vrTarget);
      if (!t.graded()) throw InputError("/mu", "virasoro-check needs mu and rho");
      RactionOptions opt;
      opt.graphCaps = {cfg.gMax, cfg.nMax};
      const PotentialCaps caps{cfg.gMax, cfg.nMax, cfg.psiDegreeMax};
      const auto p = assemble_potential(source_for(t, opt), caps);
      std::vector<QuantizedOperator> ops;
      for (int m = -1; m <= mMax; ++m)
        ops.push_back(quantize(lm_symbol(*t.mu, *t.rho, m, caps.K), t.frobenius.pairing, t.frobenius.unit, caps.K));
      const auto rep = virasoro_check(p, ops, cfg.threads);
      json failures = json::array();
      for (const auto& e : rep.failures())
        failures.push_back(
            {{"m", e.m}, {"genus", e.genus}, {"monomial", monomial_string(e.monomial)}, {"value", to_string(e.value)}});
      json perOp = json::array();
      for (int m = -1; m <= mMax; ++m) {
        int complete = 0, boundary = 0;
        for (const auto& e : rep.entries)
          if (e.m == m) (e.cls == ResidualClass::Complete ? complete : boundary)++;
        perOp.push_back({{"m", m}, {"complete", complete}, {"boundary", boundary}});
      }
      json doc{{"target", t.frobenius.label},
               {"caps", {{"gMax", caps.gMax}, {"nMax", caps.nMax}, {"K", caps.K}}},
               {"operators", perOp},
               {"complete", rep.complete_count()},
               {"boundary", rep.boundary_count()},
               {"failures", failures},
               {"ok", rep.ok()}};
      if (cfg.trace) {
        json all = json::array();
        for (const auto& e : rep.entries)
          all.push_back({{"m", e.m},
                         {"genus", e.genus},
                         {"monomial", monomial_json(e.monomial)},
                         {"value", to_string(e.value)},
                         {"class", e.cls == ResidualClass::Complete ? "COMPLETE" : "TRUNCATION-BOUNDARY"}});
        doc["residuals"] = all;
      }
      return {doc, rep.ok() ? 0 : 1};
    };
  });

  auto* grading = app.add_subcommand("grading-check", "grading conjugation identities for R and S");
  std::string grTarget, grProduct;
  int grOrder = 2;
  grading->add_option("--target", grTarget)->required();
  grading->add_option("--order", grOrder)->check(CLI::Range(0, 8));
  grading->add_option("--product-with", grProduct, "graded X target for the product form");
  grading->callback([&] {
    run = [&]() -> Outcome {
      const auto t = read_target(grTarget);
      if (!t.graded()) throw InputError("/mu", "grading-check needs mu and rho");
      if (!t.rmatrix) throw InputError("/rmatrix", "grading-check needs rmatrix");
      if (!t.smatrix) throw InputError("/smatrix", "grading-check needs smatrix");
      const GradingCheckInput in{*t.mu, *t.rho, t.quantum_rho(), *t.smatrix, *t.rmatrix};
      ValidationReport rep;
      if (grProduct.empty()) {
        rep = grading_conjugation_check(in, grOrder);
      } else {
        const auto x = read_target(grProduct);
        if (!x.graded()) throw InputError("/mu", "--product-with target needs mu and rho");
        rep = grading_conjugation_check(in, grOrder, *x.mu, *x.rho);
      }
      return {{{"target", t.frobenius.label}, {"order", grOrder}, {"ok", rep.ok()}, {"checks", report_json(rep)}},
              rep.ok() ? 0 : 1};
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  auto fail = [](int code, const std::string& message, const std::string& pointer) {
    json err{{"error", message}};
    if (!pointer.empty()) err["pointer"] = pointer;
    std::cerr << err.dump() << "\n";
    return code;
  };
  Outcome out;
  try {
    if (!capsText.empty()) apply_caps(cfg, capsText);
    out = run();
  } catch (const InputError& e) {
    return fail(2, e.what(), e.pointer);
  } catch (const SchemaError& e) {
    return fail(2, e.what(), e.pointer);
  } catch (const ValidationError& e) {
    json doc{{"valid", false}, {"error", e.what()}, {"checks", report_json(e.report)}};
    out = {doc, 1};
  } catch (const Error& e) {
    return fail(2, e.what(), "");
  }

  const std::string text = cfg.format == "csv" ? to_csv(out.doc) : out.doc.dump(2) + "\n";
  if (cfg.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(cfg.output, std::ios::binary);
    if (!f) return fail(2, "cannot write " + cfg.output, "");
    f << text;
  }
  return out.code;
}
