#pragma once

// JSON file formats. Complex numbers are [re, im] pairs; vectors use the
// bipartite index a * dim_b + b; files are UTF-8 and newline-terminated.
//
//   ensemble:     {"dims": [da, db], "vectors": [[[re, im], ...], ...],
//                  "weights": [...]}                      (weights optional)
//   density:      {"dims": [da, db], "matrix": [[[re, im], ...], ...]}
//   certificate:  {"verdict", "gap", "c", "hermiticity_residual",
//                  "restarts", "seed", "tool_version", "input_digest"}

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entwine/condition.hpp"
#include "entwine/ensemble.hpp"
#include "entwine/errors.hpp"
#include "entwine/linalg.hpp"

namespace entwine {

inline constexpr std::string_view kToolVersion = "entwine 0.1.0";

/// Malformed input; the message names the line or field at fault.
class ParseError : public Error {
 public:
  using Error::Error;
};

struct EnsembleFile {
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;
  std::vector<ComplexVector> vectors;
  /// When present, vectors are normalized states with these probabilities.
  std::optional<std::vector<double>> weights;

  friend bool operator==(const EnsembleFile& x, const EnsembleFile& y);
};

struct DensityFile {
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;
  ComplexMatrix matrix;

  friend bool operator==(const DensityFile& x, const DensityFile& y);
};

struct CertificateFile {
  std::string verdict;
  double gap = 0.0;
  ComplexVector c;
  double hermiticity_residual = 0.0;
  std::size_t restarts = 0;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string input_digest;

  friend bool operator==(const CertificateFile& x, const CertificateFile& y);
};

EnsembleFile parse_ensemble_file(std::string_view text);
DensityFile parse_density_file(std::string_view text);
CertificateFile parse_certificate_file(std::string_view text);

std::string serialize(const EnsembleFile& f);
std::string serialize(const DensityFile& f);
std::string serialize(const CertificateFile& f);

/// Applies from_weighted when weights are present, otherwise takes the
/// vectors as tilde vectors. Throws ValidationError on zero members, since
/// certificates index members in file order.
Ensemble to_ensemble(const EnsembleFile& f);
/// Tilde-vector form, no weights.
EnsembleFile to_file(const Ensemble& e);

CertificateFile to_file(const GapCertificate& cert, double hermiticity_residual,
                        std::string input_digest);
/// Verdict, gap and c; history is not stored in the file.
GapCertificate to_certificate(const CertificateFile& f);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

/// Reads a whole file; throws ParseError when it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace entwine
