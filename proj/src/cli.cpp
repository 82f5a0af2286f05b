#include "entwine/cli.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "entwine/condition.hpp"
#include "entwine/ensemble.hpp"
#include "entwine/errors.hpp"
#include "entwine/io.hpp"
#include "entwine/optimizer.hpp"
#include "entwine/wootters.hpp"

namespace entwine {

namespace {

struct Flags {
  std::string out_path;
  std::uint64_t seed = 0;
  std::size_t restarts = 0;
  std::size_t max_iters = 500;
  double tau_gap = 1e-7;
  std::optional<std::size_t> m;
};

class Output {
 public:
  Output(const Flags& flags, std::ostream& out, std::ostream& err)
      : path_(flags.out_path), out_(out), report_(flags.out_path.empty() ? err : out) {
    report_ << std::setprecision(12);
  }

  std::ostream& report() { return report_; }

  void machine(const std::string& text) {
    if (path_.empty()) {
      out_ << text;
      return;
    }
    std::ofstream file(path_, std::ios::binary);
    if (!file) throw Error("cannot write " + path_);
    file << text;
    report_ << "wrote " << path_ << "\n";
  }

 private:
  std::string path_;
  std::ostream& out_;
  std::ostream& report_;
};

GapOptions gap_options(const Flags& f) {
  GapOptions opts;
  opts.restarts = f.restarts;
  opts.max_iters = f.max_iters;
  opts.seed = f.seed;
  opts.tau_gap = f.tau_gap;
  return opts;
}

int verdict_exit(const GapCertificate& cert) {
  return cert.verdict == Verdict::kViolated ? kExitViolated : kExitOk;
}

void report_certificate(std::ostream& os, const GapCertificate& cert, double residual) {
  os << "verdict: " << to_string(cert.verdict) << "\n"
     << "gap: " << cert.gap << "\n"
     << "hermiticity_residual: " << residual << "\n"
     << "restarts: " << cert.restarts_used << "\n"
     << "seed: " << cert.seed << "\n";
}

int cmd_check(const std::string& input, const Flags& flags, std::ostream& out, std::ostream& err) {
  const std::string bytes = read_file(input);
  const Ensemble e = to_ensemble(parse_ensemble_file(bytes));
  const auto states = e.states();
  const CrossTable ct = build_cross_table(states);
  const double residual = hermiticity_check(ct);
  const GapCertificate cert = minimize_gap(ct, gap_options(flags));

  Output sink(flags, out, err);
  sink.machine(serialize(to_file(cert, residual, sha256_hex(bytes))));
  report_certificate(sink.report(), cert, residual);
  return verdict_exit(cert);
}

int cmd_eof(const std::string& input, const Flags& flags, std::ostream& out, std::ostream& err) {
  const DensityFile f = parse_density_file(read_file(input));
  const DensityOperator rho(f.matrix);
  EofOptions opts;
  opts.restarts = flags.restarts;
  opts.max_iters = flags.max_iters;
  opts.seed = flags.seed;
  const EofResult r = eof_min(rho, f.dim_a, f.dim_b, flags.m, opts);

  Output sink(flags, out, err);
  sink.machine(serialize(to_file(r.ensemble)));
  sink.report() << "eof_bits: " << r.value << "\n"
                << "m: " << r.m << "\n"
                << "members: " << r.ensemble.count() << "\n"
                << "restarts: " << r.restarts << "\n"
                << "seed: " << r.seed << "\n";
  return kExitOk;
}

int cmd_wootters(const std::string& input, const Flags& flags, std::ostream& out,
                 std::ostream& err) {
  const DensityFile f = parse_density_file(read_file(input));
  if (f.dim_a != 2 || f.dim_b != 2) {
    throw ValidationError("wootters: expected dims [2, 2], got [" + std::to_string(f.dim_a) +
                          ", " + std::to_string(f.dim_b) + "]");
  }
  const TwoQubitState rho(f.matrix);
  const WoottersDecomposition d = optimal_decomposition_2qubit(rho);

  Output sink(flags, out, err);
  sink.machine(serialize(to_file(d.ensemble)));
  sink.report() << "concurrence: " << d.concurrence << "\n"
                << "eof_bits: " << eof_from_concurrence(d.concurrence) << "\n"
                << "members: " << d.ensemble.count() << "\n";
  if (d.jittered) sink.report() << "jitter_seed: " << d.jitter_seed << "\n";
  return kExitOk;
}

int cmd_improve(const std::string& input, const std::string& cert_path, const Flags& flags,
                std::ostream& out, std::ostream& err) {
  const std::string bytes = read_file(input);
  const CertificateFile cf = parse_certificate_file(read_file(cert_path));
  if (cf.input_digest != sha256_hex(bytes)) {
    throw ValidationError("certificate digest does not match " + input);
  }
  if (cf.verdict != "VIOLATED") throw ValidationError("certificate does not report a violation");
  const Ensemble e = to_ensemble(parse_ensemble_file(bytes));
  ImproveOptions opts;
  opts.tau_gap = flags.tau_gap;
  const Ensemble better = improve(e, to_certificate(cf), opts);

  Output sink(flags, out, err);
  sink.machine(serialize(to_file(better)));
  sink.report() << "before_bits: " << avg_entanglement(e) << "\n"
                << "after_bits: " << avg_entanglement(better) << "\n"
                << "members: " << better.count() << "\n";
  return kExitOk;
}

int cmd_additivity(const std::string& first, const std::string& second, const Flags& flags,
                   std::ostream& out, std::ostream& err) {
  const std::string bytes1 = read_file(first);
  const std::string bytes2 = read_file(second);
  const Ensemble e1 = to_ensemble(parse_ensemble_file(bytes1));
  const Ensemble e2 = to_ensemble(parse_ensemble_file(bytes2));
  const AdditivityReport r = additivity_probe(e1, e2, gap_options(flags));

  Output sink(flags, out, err);
  sink.machine(serialize(to_file(r.certificate, r.hermiticity_residual, sha256_hex(bytes1 + bytes2))));
  auto& os = sink.report();
  os << "product_members: " << r.product.count() << "\n";
  report_certificate(os, r.certificate, r.hermiticity_residual);
  os << "seconds: " << r.seconds << "\n";
  if (r.product_entanglement) os << "product_bits: " << *r.product_entanglement << "\n";
  if (r.improved_entanglement) os << "improved_bits: " << *r.improved_entanglement << "\n";
  if (r.eof_upper_bound) os << "eof_upper_bound_bits: " << *r.eof_upper_bound << "\n";
  if (!r.double_check_note.empty()) os << "double_check: " << r.double_check_note << "\n";
  return verdict_exit(r.certificate);
}

// Everything the library throws on bad input or an unusable certificate maps
// to exit 2; plain Error is reserved for I/O and internal faults.
bool is_input_error(const Error& e) {
  return dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
         dynamic_cast<const ShapeError*>(&e) || dynamic_cast<const HermiticityError*>(&e) ||
         dynamic_cast<const NormalizationError*>(&e) ||
         dynamic_cast<const DegenerateInputError*>(&e) || dynamic_cast<const SearchFailure*>(&e);
}

void add_search_flags(CLI::App* sub, Flags& flags, std::size_t default_restarts) {
  flags.restarts = default_restarts;
  sub->add_option("--out", flags.out_path, "Output file (default: standard output)");
  sub->add_option("--seed", flags.seed, "Random seed")->capture_default_str();
  sub->add_option("--restarts", flags.restarts, "Number of multistart descents")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--max-iters", flags.max_iters, "Iterations per descent")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal-decomposition checks and entanglement-of-formation estimates", "entwine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Flags check_flags, eof_flags, wootters_flags, improve_flags, add_flags;
  std::string input, input2, cert_path;

  auto* check = app.add_subcommand("check", "Test whether a set of states is an optimal decomposition");
  check->add_option("input", input, "Ensemble file")->required();
  add_search_flags(check, check_flags, 64);
  check->add_option("--tau-gap", check_flags.tau_gap, "Violation threshold in bits")->capture_default_str();

  auto* eof = app.add_subcommand("eof", "Estimate the entanglement of formation of a density matrix");
  eof->add_option("input", input, "Density matrix file")->required();
  add_search_flags(eof, eof_flags, 32);
  eof->add_option("--m", eof_flags.m, "Decomposition size (default rank^2)");

  auto* wootters = app.add_subcommand("wootters", "Two-qubit concurrence, EoF and optimal decomposition");
  wootters->add_option("input", input, "4x4 density matrix file")->required();
  wootters->add_option("--out", wootters_flags.out_path, "Output file (default: standard output)");

  auto* improve_cmd = app.add_subcommand("improve", "Lower the average entanglement using a violation certificate");
  improve_cmd->add_option("input", input, "Ensemble file")->required();
  improve_cmd->add_option("--cert", cert_path, "Certificate produced by check")->required();
  improve_cmd->add_option("--out", improve_flags.out_path, "Output file (default: standard output)");
  improve_cmd->add_option("--tau-gap", improve_flags.tau_gap, "Violation threshold in bits")->capture_default_str();

  auto* additivity = app.add_subcommand("additivity", "Test the tensor-product set of two ensembles");
  additivity->add_option("input1", input, "First ensemble file")->required();
  additivity->add_option("input2", input2, "Second ensemble file")->required();
  add_search_flags(additivity, add_flags, 64);
  additivity->add_option("--tau-gap", add_flags.tau_gap, "Violation threshold in bits")->capture_default_str();

  std::vector<std::string> argv_store{"entwine"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (check->parsed()) return cmd_check(input, check_flags, out, err);
    if (eof->parsed()) return cmd_eof(input, eof_flags, out, err);
    if (wootters->parsed()) return cmd_wootters(input, wootters_flags, out, err);
    if (improve_cmd->parsed()) return cmd_improve(input, cert_path, improve_flags, out, err);
    if (additivity->parsed()) return cmd_additivity(input, input2, add_flags, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_input_error(e) ? kExitInvalidInput : kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace entwine
