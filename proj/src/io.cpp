#include "cohft/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cohft {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

const json& field(const json& j, const std::string& ptr, const char* key) {
  if (!j.is_object()) throw SchemaError(ptr, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(ptr + "/" + key, "missing");
  return *it;
}

int int_at(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw SchemaError(ptr, "expected an integer");
  return j.get<int>();
}

Scalar scalar_at(const json& j, const std::string& ptr) {
  if (!j.is_string()) throw SchemaError(ptr, "expected a rational string \"p/q\"");
  try {
    return parse_scalar(j.get<std::string>());
  } catch (const Error& e) {
    throw SchemaError(ptr, e.what());
  }
}

const json& array_at(const json& j, const std::string& ptr, std::size_t size) {
  if (!j.is_array()) throw SchemaError(ptr, "expected an array");
  if (j.size() != size)
    throw SchemaError(ptr, "expected " + std::to_string(size) + " entries, found " + std::to_string(j.size()));
  return j;
}

Vec vec_at(const json& j, const std::string& ptr, std::size_t size) {
  array_at(j, ptr, size);
  Vec v;
  for (std::size_t i = 0; i < size; ++i) v.push_back(scalar_at(j[i], ptr + "/" + std::to_string(i)));
  return v;
}

Matrix matrix_at(const json& j, const std::string& ptr, std::size_t n) {
  array_at(j, ptr, n);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec row = vec_at(j[i], ptr + "/" + std::to_string(i), n);
    for (std::size_t k = 0; k < n; ++k) m(i, k) = row[k];
  }
  return m;
}

std::vector<Matrix> series_at(const json& j, const std::string& ptr, std::size_t n) {
  if (!j.is_array() || j.empty()) throw SchemaError(ptr, "expected a nonempty array of matrices");
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(matrix_at(j[k], ptr + "/" + std::to_string(k), n));
  return out;
}

ojson dump_vec(const Vec& v) {
  ojson a = ojson::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

ojson dump_matrix(const Matrix& m) {
  ojson a = ojson::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(to_string(m(i, k)));
    a.push_back(row);
  }
  return a;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("not JSON: ") + e.what());
  }
}

void require(const ValidationReport& rep) {
  if (!rep.ok()) throw ValidationError(rep);
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Matrix TargetFile::quantum_rho() const {
  if (!rho) throw Error("target has no rho");
  return frobenius.multiplication_matrix(*rho * frobenius.unit);
}

TargetFile parse_target(const std::string& text) {
  const json j = parse_json(text);
  TargetFile t;
  auto& f = t.frobenius;
  f.label = j.contains("label") && j["label"].is_string() ? j["label"].get<std::string>() : "";
  f.dim = int_at(field(j, "", "dim"), "/dim");
  if (f.dim < 1) throw SchemaError("/dim", "must be positive");
  const std::size_t n = f.dim;
  f.pairing = matrix_at(field(j, "", "pairing"), "/pairing", n);
  const json& st = array_at(field(j, "", "structure"), "/structure", n);
  f.structure.assign(n * n * n, Scalar(0));
  for (std::size_t a = 0; a < n; ++a) {
    const std::string pa = "/structure/" + std::to_string(a);
    array_at(st[a], pa, n);
    for (std::size_t b = 0; b < n; ++b) {
      const Vec v = vec_at(st[a][b], pa + "/" + std::to_string(b), n);
      for (std::size_t k = 0; k < n; ++k) f.c(a, b, k) = v[k];
    }
  }
  f.unit = vec_at(field(j, "", "unit"), "/unit", n);
  if (j.contains("mu")) t.mu = matrix_at(j["mu"], "/mu", n);
  if (j.contains("rho")) t.rho = matrix_at(j["rho"], "/rho", n);
  if (t.mu.has_value() != t.rho.has_value()) throw SchemaError(t.mu ? "/rho" : "/mu", "mu and rho come together");
  if (j.contains("complexDim")) t.complexDim = int_at(j["complexDim"], "/complexDim");
  if (j.contains("hodge")) {
    const json& h = array_at(j["hodge"], "/hodge", n);
    std::vector<std::pair<int, int>> hodge;
    for (std::size_t a = 0; a < n; ++a) {
      const std::string p = "/hodge/" + std::to_string(a);
      array_at(h[a], p, 2);
      hodge.push_back({int_at(h[a][0], p + "/0"), int_at(h[a][1], p + "/1")});
    }
    t.hodge = hodge;
    if (!t.complexDim) throw SchemaError("/complexDim", "required with hodge");
  }
  if (j.contains("rmatrix")) t.rmatrix = RMatrix{series_at(j["rmatrix"], "/rmatrix", n)};
  if (j.contains("smatrix")) t.smatrix = series_at(j["smatrix"], "/smatrix", n);

  require(validate_frobenius(f));
  if (t.hodge) {
    const Matrix rho = t.rho ? *t.rho : Matrix::zero(n);
    GradingOperators g;
    try {
      g = build_mu_rho(*t.hodge, *t.complexDim, rho);
    } catch (const GradingInconsistent& e) {
      ValidationReport rep;
      rep.add("hodge grading", false, e.what());
      throw ValidationError(rep);
    }
    if (t.mu && *t.mu != g.mu) {
      ValidationReport rep;
      rep.add("mu matches hodge", false);
      throw ValidationError(rep);
    }
    t.mu = g.mu;
    t.rho = g.rho;
  }
  if (t.graded()) require(validate_graded(GradedTargetData{f, *t.mu, *t.rho}));
  if (t.rmatrix) require(validate_symplectic(*t.rmatrix, f.pairing));
  if (t.smatrix && t.smatrix->front() != Matrix::identity(n)) {
    ValidationReport rep;
    rep.add("S_0 = Id", false);
    throw ValidationError(rep);
  }
  return t;
}

TargetFile read_target(const std::string& path) { return parse_target(read_file(path)); }

std::string serialize_target(const TargetFile& t) {
  const auto& f = t.frobenius;
  ojson j;
  j["label"] = f.label;
  j["dim"] = f.dim;
  j["pairing"] = dump_matrix(f.pairing);
  ojson st = ojson::array();
  for (int a = 0; a < f.dim; ++a) {
    ojson row = ojson::array();
    for (int b = 0; b < f.dim; ++b) {
      Vec v;
      for (int k = 0; k < f.dim; ++k) v.push_back(f.c(a, b, k));
      row.push_back(dump_vec(v));
    }
    st.push_back(row);
  }
  j["structure"] = st;
  j["unit"] = dump_vec(f.unit);
  if (t.complexDim) j["complexDim"] = *t.complexDim;
  if (t.hodge) {
    ojson h = ojson::array();
    for (const auto& [p, q] : *t.hodge) h.push_back({p, q});
    j["hodge"] = h;
  }
  if (t.mu) j["mu"] = dump_matrix(*t.mu);
  if (t.rho) j["rho"] = dump_matrix(*t.rho);
  auto dumpSeries = [](const std::vector<Matrix>& s) {
    ojson a = ojson::array();
    for (const auto& m : s) a.push_back(dump_matrix(m));
    return a;
  };
  if (t.rmatrix) j["rmatrix"] = dumpSeries(t.rmatrix->coeffs);
  if (t.smatrix) j["smatrix"] = dumpSeries(*t.smatrix);
  return j.dump(2) + "\n";
}

XCorrelatorTable parse_table(const std::string& text) {
  const json j = parse_json(text);
  TableCaps caps;
  if (j.contains("caps")) {
    const json& c = j["caps"];
    caps.gMax = int_at(field(c, "/caps", "gMax"), "/caps/gMax");
    caps.nMax = int_at(field(c, "/caps", "nMax"), "/caps/nMax");
    caps.degreeMax = int_at(field(c, "/caps", "degreeMax"), "/caps/degreeMax");
    if (caps.gMax < 0 || caps.gMax > 2) throw SchemaError("/caps/gMax", "must lie in [0, 2]");
    if (caps.nMax < 0 || caps.nMax > 8) throw SchemaError("/caps/nMax", "must lie in [0, 8]");
    if (caps.degreeMax < 0) throw SchemaError("/caps/degreeMax", "must be nonnegative");
  }
  if (j.contains("builtin")) {
    const std::string b = j["builtin"].is_string() ? j["builtin"].get<std::string>() : "";
    if (b == "point") return XCorrelatorTable::point(caps);
    if (b == "npoints") {
      const int n = int_at(field(j, "", "n"), "/n");
      if (n < 1) throw SchemaError("/n", "must be positive");
      return XCorrelatorTable::npoints(n, {}, caps);
    }
    throw SchemaError("/builtin", "expected \"point\" or \"npoints\"");
  }
  XCorrelatorTable t;
  t.label = j.contains("label") && j["label"].is_string() ? j["label"].get<std::string>() : "table";
  t.dim = int_at(field(j, "", "dim"), "/dim");
  if (t.dim < 1) throw SchemaError("/dim", "must be positive");
  t.pairing = matrix_at(field(j, "", "pairing"), "/pairing", t.dim);
  t.unit = vec_at(field(j, "", "unit"), "/unit", t.dim);
  t.caps = caps;
  const json& entries = field(j, "", "entries");
  if (!entries.is_array()) throw SchemaError("/entries", "expected an array");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string p = "/entries/" + std::to_string(i);
    const json& e = entries[i];
    const int g = int_at(field(e, p, "g"), p + "/g");
    const json& ins = field(e, p, "inserts");
    if (!ins.is_array()) throw SchemaError(p + "/inserts", "expected an array");
    std::vector<XInsert> inserts;
    for (std::size_t k = 0; k < ins.size(); ++k) {
      const std::string pk = p + "/inserts/" + std::to_string(k);
      array_at(ins[k], pk, 2);
      const int x = int_at(ins[k][0], pk + "/0"), d = int_at(ins[k][1], pk + "/1");
      if (x < 0 || x >= t.dim) throw SchemaError(pk + "/0", "basis index out of range");
      if (d < 0) throw SchemaError(pk + "/1", "negative psi power");
      inserts.push_back({x, d});
    }
    std::vector<int> kappa;
    if (e.contains("kappa")) {
      if (!e["kappa"].is_array()) throw SchemaError(p + "/kappa", "expected an array");
      for (std::size_t k = 0; k < e["kappa"].size(); ++k) {
        const int b = int_at(e["kappa"][k], p + "/kappa/" + std::to_string(k));
        if (b < 1) throw SchemaError(p + "/kappa/" + std::to_string(k), "kappa index must be >= 1");
        kappa.push_back(b);
      }
    }
    if (!is_stable(g, static_cast<int>(inserts.size()))) throw SchemaError(p, "unstable (g, n)");
    t.set(g, inserts, kappa, scalar_at(field(e, p, "value"), p + "/value"));
  }
  require(validate_table(t));
  return t;
}

std::string serialize_table(const XCorrelatorTable& t) {
  if (t.generated()) throw Error("generated tables have no entry list");
  ojson j;
  j["label"] = t.label;
  j["dim"] = t.dim;
  j["pairing"] = dump_matrix(t.pairing);
  j["unit"] = dump_vec(t.unit);
  ojson caps;
  caps["gMax"] = t.caps.gMax;
  caps["nMax"] = t.caps.nMax;
  caps["degreeMax"] = t.caps.degreeMax;
  j["caps"] = caps;
  ojson entries = ojson::array();
  for (const auto& [key, value] : t.entries()) {
    const auto& [g, ins, kappa] = key;
    ojson e;
    e["g"] = g;
    ojson is = ojson::array();
    for (const auto& [x, d] : ins) is.push_back({x, d});
    e["inserts"] = is;
    e["kappa"] = kappa;
    e["value"] = to_string(value);
    entries.push_back(e);
  }
  j["entries"] = entries;
  return j.dump(2) + "\n";
}

}  // namespace cohft
