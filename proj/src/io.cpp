#include "glab/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace glab::io {

namespace {

json number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? json("nan") : json(v > 0 ? "inf" : "-inf");
  return v;
}

json scalar(Scalar v) {
  if (v.imag() == 0.0) return number(v.real());
  return json::array({number(v.real()), number(v.imag())});
}

json opt(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ParseError("not a number: '" + s + "'");
  return v;
}

Index parse_idx(const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw ParseError("not an index: '" + s + "'");
  }
  if (used != s.size() || v < 1) throw ParseError("not a positive index: '" + s + "'");
  return static_cast<Index>(v);
}

}  // namespace

json to_json(const SparseVector& x) {
  json j = json::object();
  for (const auto& [n, v] : x.entries()) j[std::to_string(n)] = scalar(v);
  return j;
}

SparseVector sparse_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("sparse vector JSON must be an object");
  std::vector<SparseVector::Entry> e;
  for (const auto& [k, v] : j.items()) {
    const Index n = parse_idx(k);
    if (v.is_number()) {
      e.emplace_back(n, Scalar(v.get<double>(), 0.0));
    } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      e.emplace_back(n, Scalar(v[0].get<double>(), v[1].get<double>()));
    } else {
      throw ParseError("entry " + k + " must be a number or [re, im]");
    }
  }
  std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  try {
    return SparseVector(std::move(e));
  } catch (const std::invalid_argument& ex) {
    throw ParseError(ex.what());
  }
}

SparseVector parse_sparse_text(const std::string& text) {
  std::istringstream is(text);
  std::string tok;
  std::vector<SparseVector::Entry> e;
  while (is >> tok) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw ParseError("expected index:value, got '" + tok + "'");
    const Index n = parse_idx(tok.substr(0, colon));
    std::string val = tok.substr(colon + 1);
    if (!val.empty() && val.front() == '(' && val.back() == ')') val = val.substr(1, val.size() - 2);
    const auto comma = val.find(',');
    if (comma == std::string::npos)
      e.emplace_back(n, Scalar(parse_double(val), 0.0));
    else
      e.emplace_back(n, Scalar(parse_double(val.substr(0, comma)), parse_double(val.substr(comma + 1))));
  }
  std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < e.size(); ++i)
    if (e[i].first == e[i - 1].first) throw ParseError("duplicate index " + std::to_string(e[i].first));
  try {
    return SparseVector(std::move(e));
  } catch (const std::invalid_argument& ex) {
    throw ParseError(ex.what());
  }
}

std::string to_text(const SparseVector& x) { return x.to_string(); }

SparseVector load_vector(const std::string& arg) {
  std::error_code ec;
  std::string body = arg;
  if (std::filesystem::is_regular_file(arg, ec)) body = read_file(arg);
  const auto first = body.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && body[first] == '{') {
    json j;
    try {
      j = json::parse(body);
    } catch (const json::parse_error& ex) {
      throw ParseError(std::string("bad vector JSON: ") + ex.what());
    }
    return sparse_from_json(j);
  }
  return parse_sparse_text(body);
}

json to_json(const IndexSet& a) { return json(a.indices()); }

json to_json(const SignPattern& s) {
  json j = json::object();
  for (const auto& [n, v] : s.values()) j[std::to_string(n)] = scalar(v);
  return j;
}

json to_json(const ParamTable& t) {
  json j;
  j["name"] = t.name;
  j["mode"] = to_string(t.mode);
  j["window"] = t.window.empty() ? json::array() : json::array({t.window.min(), t.window.max()});
  json values = json::object(), wits = json::object();
  for (const auto& [m, e] : t.entries) {
    values[std::to_string(m)] = opt(e.value);
    json w = json::object();
    if (!e.witness.sets.empty()) {
      w["sets"] = json::array();
      for (const auto& s : e.witness.sets) w["sets"].push_back(to_json(s));
    }
    if (!e.witness.signs.empty()) {
      w["signs"] = json::array();
      for (const auto& s : e.witness.signs) w["signs"].push_back(to_json(s));
    }
    if (e.witness.vector) w["vector"] = to_json(*e.witness.vector);
    if (e.witness.c) w["c"] = number(*e.witness.c);
    wits[std::to_string(m)] = std::move(w);
  }
  j["values"] = std::move(values);
  j["witnesses"] = std::move(wits);
  j["notes"] = t.notes;
  return j;
}

json to_json(const BoundCheck& b) {
  return json{{"name", b.name},        {"lhs", number(b.lhs)},   {"rhs", number(b.rhs)},
              {"satisfied", b.satisfied}, {"advisory", b.advisory}, {"note", b.note}};
}

json to_json(const WitnessReport& r) {
  json j;
  j["kind"] = r.kind;
  j["space"] = r.space;
  j["m"] = r.m;
  j["t"] = number(r.t);
  j["ratio"] = number(r.ratio);
  j["ratio_kind"] = r.ratio_kind;
  j["expected_ratio"] = opt(r.expected_ratio);
  j["residual"] = opt(r.residual);
  j["greedy_residual"] = opt(r.greedy_residual);
  j["sigma"] = opt(r.sigma);
  j["sigma_exhaustive"] = r.sigma_exhaustive;
  j["witness"] = to_json(r.witness);
  j["greedy_set"] = to_json(r.greedy_set);
  j["chebyshev_coefficients"] = to_json(r.chebyshev_coefficients);
  j["achieved_tol"] = number(r.achieved_tol);
  j["converged"] = r.converged;
  json d = json::object();
  for (const auto& [k, v] : r.details) d[k] = number(v);
  j["details"] = std::move(d);
  j["bounds"] = json::array();
  for (const auto& b : r.bounds) j["bounds"].push_back(to_json(b));
  j["notes"] = r.notes;
  return j;
}

json to_json(const ChebyshevStep& s) {
  return json{{"support", to_json(s.support)},
              {"coefficients", to_json(s.coefficients)},
              {"residual", to_json(s.residual)},
              {"residual_norm", number(s.residual_norm)},
              {"achieved_tol", number(s.achieved_tol)},
              {"evaluations", s.evaluations},
              {"converged", s.converged}};
}

json to_json(const SigmaResult& s) {
  return json{{"value", number(s.value)},
              {"support", to_json(s.support)},
              {"coefficients", to_json(s.coefficients)},
              {"supports", s.supports},
              {"converged", s.converged}};
}

json to_json(const ConvergenceReport& r) {
  json rows = json::array();
  for (std::size_t m = 0; m < r.chebyshev.size(); ++m)
    rows.push_back(json{{"m", m}, {"chebyshev", number(r.chebyshev[m])}, {"greedy", number(r.greedy[m])},
                        {"sets", r.sets[m]}});
  return json{{"space", r.space}, {"t", number(r.t)}, {"converged", r.converged}, {"rows", std::move(rows)}};
}

json to_json(const LemmaSuiteResult& r) {
  json checked = json::object();
  for (const auto& [k, v] : r.checked) checked[k] = v;
  json viol = json::array();
  for (const auto& b : r.violations) viol.push_back(to_json(b));
  return json{{"space", r.space},          {"instances", r.instances}, {"checked", std::move(checked)},
              {"worst_ratio", number(r.worst_ratio)}, {"violations", std::move(viol)}, {"notes", r.notes}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string table_csv(const ParamTable& t) {
  std::ostringstream os;
  os.precision(17);
  os << "m,value\n";
  for (const auto& [m, e] : t.entries) {
    os << m << ',';
    if (e.value) os << *e.value;
    os << '\n';
  }
  return os.str();
}

std::string plot_data(const std::vector<std::pair<double, double>>& rows) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& [a, b] : rows) os << a << ' ' << b << '\n';
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw Error("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot read '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

json RunManifest::to_json() const {
  return json{{"toolVersion", tool_version}, {"commandLine", command_line}, {"space", space},
              {"seed", seed},                {"tolerances", tolerances},    {"timestamp", timestamp},
              {"outputDigest", output_digest}};
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_path(const std::string& out) { return out + ".manifest.json"; }

}  // namespace glab::io
