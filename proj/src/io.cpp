#include "entwine/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

namespace entwine {

namespace {

using Json = nlohmann::ordered_json;

bool same_vector(const ComplexVector& x, const ComplexVector& y) {
  return x.size() == y.size() && x == y;
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& err) {
    // Translate the byte offset into a line/column for the diagnostic.
    const std::size_t offset = std::min<std::size_t>(err.byte == 0 ? 0 : err.byte - 1, text.size());
    const std::size_t line = 1 + static_cast<std::size_t>(
                                     std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
    const std::size_t last_nl = text.rfind('\n', offset == 0 ? 0 : offset - 1);
    const std::size_t column = last_nl == std::string_view::npos || offset == 0 ? offset + 1 : offset - last_nl;
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                     ": malformed JSON");
  }
}

const Json& field(const Json& obj, const char* name, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  const auto it = obj.find(name);
  if (it == obj.end()) throw ParseError(where + "." + name + ": missing field");
  return *it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(where + ": non-finite number");
  return v;
}

std::uint64_t unsigned_integer(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned()) throw ParseError(where + ": expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::string text_field(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where + ": expected a string");
  return j.get<std::string>();
}

Complex complex_pair(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ParseError(where + ": expected a [re, im] pair");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

Json pair(Complex z) { return Json::array({z.real(), z.imag()}); }

ComplexVector complex_array(const Json& j, const std::string& where,
                            std::optional<std::size_t> expected) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of [re, im] pairs");
  if (expected && j.size() != *expected) {
    throw ParseError(where + ": expected " + std::to_string(*expected) + " entries, got " +
                     std::to_string(j.size()));
  }
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    v(static_cast<Eigen::Index>(k)) = complex_pair(j[k], where + "[" + std::to_string(k) + "]");
  }
  return v;
}

Json complex_array(const ComplexVector& v) {
  Json arr = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(pair(v(k)));
  return arr;
}

std::pair<std::size_t, std::size_t> dims(const Json& root) {
  const Json& d = field(root, "dims", "$");
  if (!d.is_array() || d.size() != 2) throw ParseError("$.dims: expected [dim_a, dim_b]");
  const auto da = unsigned_integer(d[0], "$.dims[0]");
  const auto db = unsigned_integer(d[1], "$.dims[1]");
  if (da == 0 || db == 0) throw ParseError("$.dims: dimensions must be positive");
  return {da, db};
}

std::string finish(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

bool operator==(const EnsembleFile& x, const EnsembleFile& y) {
  return x.dim_a == y.dim_a && x.dim_b == y.dim_b && x.weights == y.weights &&
         std::ranges::equal(x.vectors, y.vectors, same_vector);
}

bool operator==(const DensityFile& x, const DensityFile& y) {
  return x.dim_a == y.dim_a && x.dim_b == y.dim_b && x.matrix.rows() == y.matrix.rows() &&
         x.matrix.cols() == y.matrix.cols() && x.matrix == y.matrix;
}

bool operator==(const CertificateFile& x, const CertificateFile& y) {
  return x.verdict == y.verdict && x.gap == y.gap && same_vector(x.c, y.c) &&
         x.hermiticity_residual == y.hermiticity_residual && x.restarts == y.restarts &&
         x.seed == y.seed && x.tool_version == y.tool_version && x.input_digest == y.input_digest;
}

EnsembleFile parse_ensemble_file(std::string_view text) {
  const Json root = parse_json(text);
  EnsembleFile f;
  std::tie(f.dim_a, f.dim_b) = dims(root);
  const Json& vectors = field(root, "vectors", "$");
  if (!vectors.is_array() || vectors.empty()) throw ParseError("$.vectors: expected a non-empty array");
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    f.vectors.push_back(complex_array(vectors[i], "$.vectors[" + std::to_string(i) + "]",
                                      f.dim_a * f.dim_b));
  }
  if (const auto it = root.find("weights"); it != root.end()) {
    if (!it->is_array()) throw ParseError("$.weights: expected an array");
    if (it->size() != f.vectors.size()) {
      throw ParseError("$.weights: " + std::to_string(it->size()) + " weights for " +
                       std::to_string(f.vectors.size()) + " vectors");
    }
    std::vector<double> w;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string where = "$.weights[" + std::to_string(i) + "]";
      const double v = number((*it)[i], where);
      if (v < 0.0) throw ParseError(where + ": negative weight");
      w.push_back(v);
    }
    f.weights = std::move(w);
  }
  return f;
}

DensityFile parse_density_file(std::string_view text) {
  const Json root = parse_json(text);
  DensityFile f;
  std::tie(f.dim_a, f.dim_b) = dims(root);
  const std::size_t dim = f.dim_a * f.dim_b;
  const Json& rows = field(root, "matrix", "$");
  if (!rows.is_array() || rows.size() != dim) {
    throw ParseError("$.matrix: expected " + std::to_string(dim) + " rows");
  }
  f.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    f.matrix.row(static_cast<Eigen::Index>(r)) =
        complex_array(rows[r], "$.matrix[" + std::to_string(r) + "]", dim).transpose();
  }
  return f;
}

CertificateFile parse_certificate_file(std::string_view text) {
  const Json root = parse_json(text);
  CertificateFile f;
  f.verdict = text_field(field(root, "verdict", "$"), "$.verdict");
  if (f.verdict != "VIOLATED" && f.verdict != "NO_VIOLATION_FOUND") {
    throw ParseError("$.verdict: unknown verdict '" + f.verdict + "'");
  }
  f.gap = number(field(root, "gap", "$"), "$.gap");
  f.c = complex_array(field(root, "c", "$"), "$.c", std::nullopt);
  if (f.c.size() == 0) throw ParseError("$.c: empty coefficient vector");
  f.hermiticity_residual = number(field(root, "hermiticity_residual", "$"), "$.hermiticity_residual");
  f.restarts = unsigned_integer(field(root, "restarts", "$"), "$.restarts");
  f.seed = unsigned_integer(field(root, "seed", "$"), "$.seed");
  f.tool_version = text_field(field(root, "tool_version", "$"), "$.tool_version");
  f.input_digest = text_field(field(root, "input_digest", "$"), "$.input_digest");
  return f;
}

std::string serialize(const EnsembleFile& f) {
  Json root;
  root["dims"] = {f.dim_a, f.dim_b};
  Json vectors = Json::array();
  for (const auto& v : f.vectors) vectors.push_back(complex_array(v));
  root["vectors"] = std::move(vectors);
  if (f.weights) root["weights"] = *f.weights;
  return finish(root);
}

std::string serialize(const DensityFile& f) {
  Json root;
  root["dims"] = {f.dim_a, f.dim_b};
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < f.matrix.rows(); ++r) {
    rows.push_back(complex_array(f.matrix.row(r).transpose()));
  }
  root["matrix"] = std::move(rows);
  return finish(root);
}

std::string serialize(const CertificateFile& f) {
  Json root;
  root["verdict"] = f.verdict;
  root["gap"] = f.gap;
  root["c"] = complex_array(f.c);
  root["hermiticity_residual"] = f.hermiticity_residual;
  root["restarts"] = f.restarts;
  root["seed"] = f.seed;
  root["tool_version"] = f.tool_version;
  root["input_digest"] = f.input_digest;
  return finish(root);
}

Ensemble to_ensemble(const EnsembleFile& f) {
  std::vector<BipartiteVector> vectors;
  for (const auto& v : f.vectors) vectors.emplace_back(f.dim_a, f.dim_b, v);
  if (f.weights) {
    for (std::size_t i = 0; i < f.weights->size(); ++i) {
      if ((*f.weights)[i] <= kWeightCutoff) {
        throw ValidationError("weights[" + std::to_string(i) +
                              "]: zero weight; certificates index members in file order");
      }
    }
    return from_weighted(*f.weights, vectors);
  }
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].squared_norm() <= kWeightCutoff) {
      throw ValidationError("vectors[" + std::to_string(i) +
                            "]: zero vector; certificates index members in file order");
    }
  }
  return {f.dim_a, f.dim_b, std::move(vectors)};
}

EnsembleFile to_file(const Ensemble& e) {
  EnsembleFile f;
  f.dim_a = e.dim_a();
  f.dim_b = e.dim_b();
  for (const auto& v : e.vectors()) f.vectors.push_back(v.amplitudes());
  return f;
}

CertificateFile to_file(const GapCertificate& cert, double hermiticity_residual,
                        std::string input_digest) {
  CertificateFile f;
  f.verdict = to_string(cert.verdict);
  f.gap = cert.gap;
  f.c = cert.c;
  f.hermiticity_residual = hermiticity_residual;
  f.restarts = cert.restarts_used;
  f.seed = cert.seed;
  f.tool_version = std::string(kToolVersion);
  f.input_digest = std::move(input_digest);
  return f;
}

GapCertificate to_certificate(const CertificateFile& f) {
  GapCertificate cert;
  cert.c = f.c;
  cert.gap = f.gap;
  cert.verdict = f.verdict == "VIOLATED" ? Verdict::kViolated : Verdict::kNoViolationFound;
  cert.restarts_used = f.restarts;
  cert.seed = f.seed;
  return cert;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace entwine
