#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pnspec/case_string.hpp"
#include "pnspec/verify.hpp"

namespace {

using namespace pnspec;
using nlohmann::json;

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kUsage = 2, kNumerical = 3 };

struct CliConfig {
  std::string command;
  std::string case_text;
  std::optional<std::size_t> samples;
  std::uint64_t seed = 1;
  std::vector<std::string> tolerance_overrides;
  std::string output;
  std::string format;  // empty: command default
  bool identity = false;
};

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

Tolerances tolerances_from(const CliConfig& cfg) {
  Tolerances tol = default_tolerances();
  for (const auto& item : cfg.tolerance_overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--tol expects name=value, got '" + item + "'");
    const std::string name = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    if (!tol.count(name)) throw UsageError("unknown tolerance '" + name + "'");
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !(v >= 0.0)) {
      throw UsageError("tolerance '" + name + "' needs a non-negative number");
    }
    tol[name] = v;
  }
  return tol;
}

std::size_t sample_count(const CliConfig& cfg, std::size_t fallback) {
  const std::size_t n = cfg.samples.value_or(fallback);
  if (n == 0) throw UsageError("--samples must be positive");
  return n;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw UsageError("write to '" + path + "' failed");
}

Calibration calibrated(std::uint64_t seed) { return calibrate(calibration_reference_case(), seed).chosen; }

int cmd_verify(const CliConfig& cfg) {
  const CaseSpec cs = build_case(parse_case(cfg.case_text));
  SuiteOptions opt;
  opt.samples = sample_count(cfg, 100);
  opt.seed = cfg.seed;
  opt.tolerances = tolerances_from(cfg);
  opt.calibration = calibrated(cfg.seed);
  const auto rep = run_suite(cs, opt);

  std::printf("case %s  seed %llu  samples %zu  calibration s_K=%d s_0=%d\n", rep.case_name.c_str(),
              static_cast<unsigned long long>(rep.seed), rep.samples, rep.calibration.s_k, rep.calibration.s_0);
  for (const auto& c : rep.checks) {
    const char* status = c.evaluated == 0 ? "SKIP" : c.pass ? "ok" : "FAIL";
    std::printf("  %-20s %10.3e / %-8.1e %-4s (evaluated %zu, skipped %zu)\n", c.name.c_str(), c.max_residual,
                c.tolerance, status, c.evaluated, c.skipped);
  }
  std::printf("%s\n", rep.passed() ? "PASS" : "FAIL");

  if (!cfg.output.empty()) {
    if (cfg.format != "csv") {
      write_file(cfg.output, to_json(rep).dump(2) + "\n");
    } else {
      std::string csv = "name,max_residual,tolerance,pass,evaluated,skipped\n";
      for (const auto& c : rep.checks) {
        csv += c.name + "," + number(c.max_residual) + "," + number(c.tolerance) + "," + (c.pass ? "1" : "0") + "," +
               std::to_string(c.evaluated) + "," + std::to_string(c.skipped) + "\n";
      }
      write_file(cfg.output, csv);
    }
  }
  return rep.passed() ? kPass : kCheckFailure;
}

int cmd_spectrum(const CliConfig& cfg) {
  const CaseSpec cs = build_case(parse_case(cfg.case_text));
  const Tolerances tol = tolerances_from(cfg);
  const Calibration cal = calibrated(cfg.seed);
  const OrbitPoint pt = cfg.identity ? identity_point(cs) : random_point(cs, sample_seed(cfg.seed, 0));
  const auto sp = chain_spectrum(cs, pt.m, {tol.at("polytope"), false});
  const auto pa = pencil_analysis(bracket_pair(cs, pt, cal));
  const auto chain = sp.free_values();
  const double diff = multiset_distance(chain, pa.values);

  std::printf("case %s  %s\n", cs.name().c_str(), cfg.identity ? "identity coset" : "random point");
  if (cs.family() == CaseFamily::BDI) {
    for (std::size_t k = 0; k < sp.a.size(); ++k) std::printf("  level %zu  a=% .12f  b=% .12f\n", sp.levels[k], sp.a[k], sp.b[k]);
  } else {
    for (std::size_t s = 0; s < sp.rows.size(); ++s) {
      std::printf("  level %zu raw:", sp.levels[s]);
      for (double v : sp.rows[s]) std::printf(" % .12f", v);
      std::printf("\n");
    }
  }
  std::printf("  chain eigenvalues (level, index):\n");
  for (const auto& e : sp.entries) {
    std::printf("    (%zu, %zu) % .12f%s\n", e.level, e.index, e.value, e.free ? "" : "  frozen");
  }
  const auto poly = polytope_membership(cs, sp, tol.at("polytope"));
  for (const auto& [name, margin] : poly.margins) std::printf("  inequality %-24s margin % .3e\n", name.c_str(), margin);
  std::printf("  pencil eigenvalues:");
  for (double v : pa.values) std::printf(" % .12f", v);
  std::printf("\n  max discrepancy %.3e\n", diff);

  if (!cfg.output.empty()) {
    if (cfg.format != "csv") {
      json j;
      j["case"] = cs.name();
      j["identity"] = cfg.identity;
      j["seed"] = cfg.seed;
      j["chain"] = json::array();
      for (const auto& e : sp.entries) {
        j["chain"].push_back({{"level", e.level}, {"index", e.index}, {"raw", e.raw}, {"value", e.value}, {"free", e.free}});
      }
      j["pencil"] = pa.values;
      j["max_discrepancy"] = diff;
      write_file(cfg.output, j.dump(2) + "\n");
    } else {
      std::string csv = "level,index,raw,value,free\n";
      for (const auto& e : sp.entries) {
        csv += std::to_string(e.level) + "," + std::to_string(e.index) + "," + number(e.raw) + "," + number(e.value) +
               "," + (e.free ? "1" : "0") + "\n";
      }
      write_file(cfg.output, csv);
    }
  }
  return diff <= tol.at("pencil_chain") ? kPass : kCheckFailure;
}

int cmd_polytope(const CliConfig& cfg) {
  const CaseSpec cs = build_case(parse_case(cfg.case_text));
  const Tolerances tol = tolerances_from(cfg);
  const double slack = tol.at("polytope");
  const std::size_t samples = sample_count(cfg, 1000);

  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  rows.reserve(samples);
  std::map<std::string, Range> ranges;
  std::size_t violations = 0;
  double min_margin = INFINITY;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto pt = random_point(cs, sample_seed(cfg.seed, i));
    const auto sp = chain_spectrum(cs, pt.m, {slack, false});
    const auto poly = polytope_membership(cs, sp, slack);
    violations += poly.violations;
    min_margin = std::min(min_margin, poly.min_margin);
    const auto coords = sp.coordinates();
    if (labels.empty()) {
      for (const auto& c : coords) labels.push_back(c.first);
    }
    std::vector<double> row;
    for (const auto& [label, v] : coords) {
      row.push_back(v);
      ranges[label].add(v);
    }
    rows.push_back(std::move(row));
  }

  json summary;
  summary["case"] = cs.name();
  summary["seed"] = cfg.seed;
  summary["samples"] = samples;
  summary["violations"] = violations;
  summary["min_margin"] = min_margin;
  summary["coordinates"] = json::object();
  for (const auto& label : labels) summary["coordinates"][label] = {{"min", ranges[label].min}, {"max", ranges[label].max}};

  std::printf("case %s  samples %zu  violations %zu  min margin %.3e\n", cs.name().c_str(), samples, violations,
              min_margin);
  for (const auto& label : labels) {
    std::printf("  %-8s min % .12f  max % .12f\n", label.c_str(), ranges[label].min, ranges[label].max);
  }

  if (!cfg.output.empty()) {
    std::string body;
    if (cfg.format != "json") {
      body = "sample";
      for (const auto& l : labels) body += "," + l;
      body += "\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        body += std::to_string(i);
        for (double v : rows[i]) body += "," + number(v);
        body += "\n";
      }
    } else {
      json j;
      j["labels"] = labels;
      j["rows"] = rows;
      body = j.dump() + "\n";
    }
    write_file(cfg.output, body);
    write_file(cfg.output + ".summary.json", summary.dump(2) + "\n");
  }
  return violations == 0 ? kPass : kCheckFailure;
}

int cmd_calibrate(const CliConfig& cfg) {
  std::size_t n = 3;
  if (!cfg.case_text.empty()) {
    const auto p = parse_case(cfg.case_text);
    if (p.family != CaseFamily::DIII) throw UsageError("calibrate measures the DIII range; use --case diii:n=<n>");
    n = p.n;
  }
  const std::size_t samples = sample_count(cfg, 10000);
  const auto reference = calibration_reference_case();
  const auto report = calibrate(reference, cfg.seed);
  std::printf("reference case %s  seed %llu\n", reference.name().c_str(), static_cast<unsigned long long>(cfg.seed));
  for (const auto& c : report.candidates) {
    std::printf("  s_K=%+d s_0=%+d  nijenhuis residual %.3e  kks orientation %.3e  %s\n", c.signs.s_k, c.signs.s_0,
                c.nijenhuis_residual, c.kks_orientation, c.qualifies ? "qualifies" : "rejected");
  }
  std::printf("chosen s_K=%+d s_0=%+d\n", report.chosen.s_k, report.chosen.s_0);

  const auto nf = measure_diii_range(n, samples, cfg.seed, report.chosen);
  std::printf("diii:n=%zu pencil eigenvalue range over %zu samples: [% .12f, % .12f]\n", nf.n, nf.samples,
              nf.observed.min, nf.observed.max);
  std::printf("  endpoint distance to [0,2]: %.3e\n", nf.distance_half);
  std::printf("  endpoint distance to [-1,3]: %.3e\n", nf.distance_printed);
  std::printf("  matches %s\n", nf.matches.c_str());

  if (!cfg.output.empty()) {
    if (cfg.format == "csv") throw UsageError("calibrate writes JSON only");
    json j;
    j["calibration"] = {{"s_K", report.chosen.s_k}, {"s_0", report.chosen.s_0}};
    j["candidates"] = json::array();
    for (const auto& c : report.candidates) {
      j["candidates"].push_back({{"s_K", c.signs.s_k},
                                 {"s_0", c.signs.s_0},
                                 {"nijenhuis_residual", c.nijenhuis_residual},
                                 {"kks_orientation", c.kks_orientation},
                                 {"qualifies", c.qualifies}});
    }
    j["diii"] = {{"n", nf.n},
                 {"samples", nf.samples},
                 {"min", nf.observed.min},
                 {"max", nf.observed.max},
                 {"distance_0_2", nf.distance_half},
                 {"distance_m1_3", nf.distance_printed},
                 {"matches", nf.matches}};
    write_file(cfg.output, j.dump(2) + "\n");
  }
  return kPass;
}

void add_common(CLI::App* sub, CliConfig& cfg, bool needs_case) {
  auto* c = sub->add_option("--case", cfg.case_text, "case descriptor, e.g. aiii:k=2,n=4, ci:n=3, diii:n=4, bdi:m=7");
  if (needs_case) c->required();
  sub->add_option("--samples", cfg.samples, "number of random orbit points");
  sub->add_option("--seed", cfg.seed, "64-bit seed");
  sub->add_option("--tol", cfg.tolerance_overrides, "tolerance override name=value (repeatable)");
  sub->add_option("--output", cfg.output, "output file");
  sub->add_option("--format", cfg.format, "output format (polytope: csv, others: json)")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bihamiltonian spectra on compact hermitian symmetric spaces"};
  app.require_subcommand(1);
  CliConfig cfg;
  auto* verify = app.add_subcommand("verify", "run the verification suite on one case");
  auto* spectrum = app.add_subcommand("spectrum", "chain and pencil eigenvalues at one point");
  auto* polytope = app.add_subcommand("polytope", "sample polytope coordinates");
  auto* calibrate_cmd = app.add_subcommand("calibrate", "sign calibration and DIII range measurement");
  add_common(verify, cfg, true);
  add_common(spectrum, cfg, true);
  add_common(polytope, cfg, true);
  add_common(calibrate_cmd, cfg, false);
  spectrum->add_flag("--identity", cfg.identity, "use the identity coset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  try {
    if (cfg.command == "verify") return cmd_verify(cfg);
    if (cfg.command == "spectrum") return cmd_spectrum(cfg);
    if (cfg.command == "polytope") return cmd_polytope(cfg);
    return cmd_calibrate(cfg);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const ConventionError& e) {
    std::fprintf(stderr, "convention check failed: %s\n", e.what());
    return kCheckFailure;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kNumerical;
  }
}
