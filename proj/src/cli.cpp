#include "fomip/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fomip/bpc.hpp"
#include "fomip/errors.hpp"
#include "fomip/json_io.hpp"
#include "fomip/lp_export.hpp"
#include "fomip/parser.hpp"
#include "fomip/util.hpp"

namespace fomip::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitInput = 2;
constexpr int kExitLimit = 3;

std::optional<SourceModel> read_source(const std::string& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "error: cannot open '" << path << "'\n";
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return SourceModel{ss.str(), path};
}

void print_diagnostics(const std::string& path, const std::vector<Diagnostic>& ds,
                       std::ostream& err) {
  for (const auto& d : ds) err << format_diagnostic(path, d) << "\n";
}

std::optional<Model> load_model(const std::string& path, std::ostream& err) {
  auto src = read_source(path, err);
  if (!src) return std::nullopt;
  ParseResult res = parse_model(*src);
  print_diagnostics(path, res.diagnostics, err);
  return res.model;
}

int write_output(const std::string& text, const std::string& out_path, std::ostream& out,
                 std::ostream& err) {
  if (out_path.empty()) {
    out << text;
    return kExitOk;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    err << "error: cannot write '" << out_path << "'\n";
    return kExitInput;
  }
  f << text;
  return kExitOk;
}

void summarize(const SolveReport& rep, std::ostream& err) {
  if (rep.status == SolveStatus::Optimal) {
    err << "status: optimal\n"
        << "objective: " << format_double(round9(rep.objective)) << "\n"
        << "bound: " << format_double(round9(rep.bound)) << "\n";
  } else {
    err << "status: infeasible\n";
  }
  err << "nodes: " << rep.stats.nodes << "  lp solves: " << rep.stats.lp_solves
      << "  cuts: " << rep.stats.cuts_added << "  atoms priced: " << rep.stats.atoms_priced
      << "\n";
}

int report_exit(const SolveReport& rep) {
  return rep.status == SolveStatus::Optimal ? kExitOk : kExitInfeasible;
}

int map_error_exit(const Error& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  switch (e.code()) {
    case Errc::IterationLimit:
    case Errc::GroundSizeExceeded:
    case Errc::EnumSizeExceeded:
    case Errc::NumericalFailure:
      return kExitLimit;
    default:
      return kExitInput;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fomip - a first-order mixed integer programming toolkit", "fomip"};
  app.require_subcommand(1);

  std::string path, out_path;
  std::string mode = "bpc", separator = "guided", pricer = "guided";
  int verbosity = 0;
  int threads = 1;
  BpcOptions opts;

  auto* check = app.add_subcommand("check", "parse and validate a model");
  check->add_option("file", path, "model file (.fomip)")->required();

  auto* ground = app.add_subcommand("ground", "write the grounded problem as JSON");
  ground->add_option("file", path)->required();
  ground->add_option("-o,--out", out_path, "output path (default stdout)");

  auto* exp = app.add_subcommand("export", "write the grounded problem in LP format");
  exp->add_option("file", path)->required();
  exp->add_option("-o,--out", out_path, "output path (default stdout)");

  auto* solve = app.add_subcommand("solve", "solve to proven optimality");
  solve->add_option("file", path)->required();
  solve->add_option("-o,--out", out_path, "report path (default stdout)");
  auto* mode_opt =
      solve->add_option("--mode", mode, "ground | bpc")->check(CLI::IsMember({"ground", "bpc"}));
  auto* sep_opt = solve->add_option("--separator", separator, "naive | guided")
                      ->check(CLI::IsMember({"naive", "guided"}));
  auto* pricer_opt = solve->add_option("--pricer", pricer, "naive | guided | off")
                         ->check(CLI::IsMember({"naive", "guided", "off"}));
  solve->add_option("--max-nodes", opts.max_nodes, "node limit");
  solve->add_option("--max-rounds", opts.max_rounds_per_node, "cut/price rounds per node");
  solve->add_option("--cuts-per-round", opts.max_cuts_per_round, "cap on cuts added per round");
  solve->add_option("--violation-threshold", opts.violation_threshold);
  solve->add_option("--pricing-threshold", opts.pricing_threshold);
  solve->add_option("--threads", threads, "worker threads (current backends are sequential)")
      ->check(CLI::PositiveNumber);
  solve->add_flag("-v,--verbose", verbosity, "-v summary detail, -vv node trace in the report");

  auto* enum_cmd = app.add_subcommand("enum", "solve by exhaustive enumeration (oracle)");
  enum_cmd->add_option("file", path)->required();
  enum_cmd->add_option("-o,--out", out_path, "report path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    int code = app.exit(e, msg, msg);
    (code == 0 ? out : err) << msg.str();
    return code == 0 ? kExitOk : kExitInput;
  }

  if (const char* seed = std::getenv("FOMIP_SEED")) opts.seed = std::strtoull(seed, nullptr, 10);

  if (*check) {
    auto src = read_source(path, err);
    if (!src) return kExitInput;
    ParseResult res = parse_model(*src);
    print_diagnostics(path, res.diagnostics, err);
    return res.ok() ? kExitOk : kExitInput;
  }

  if (*ground || *exp) {
    auto model = load_model(path, err);
    if (!model) return kExitInput;
    try {
      GroundProblem gp = ground_problem(*model);
      std::ostringstream body;
      if (*ground)
        body << ground_to_json(gp).dump(2) << "\n";
      else
        export_lp(gp, body);
      return write_output(body.str(), out_path, out, err);
    } catch (const Error& e) {
      return map_error_exit(e, err);
    }
  }

  if (*solve || *enum_cmd) {
    // pricing and separation choices only apply to branch-price-and-cut
    if (*solve && mode == "ground" && (sep_opt->count() > 0 || pricer_opt->count() > 0)) {
      err << "error: --separator/--pricer require --mode=bpc\n";
      return kExitInput;
    }
    (void)mode_opt;
    auto model = load_model(path, err);
    if (!model) return kExitInput;

    opts.separator = separator == "naive" ? BpcOptions::Separator::Naive
                                          : BpcOptions::Separator::Guided;
    opts.pricer = pricer == "naive"    ? BpcOptions::Pricer::Naive
                  : pricer == "guided" ? BpcOptions::Pricer::Guided
                                       : BpcOptions::Pricer::Off;
    opts.trace = verbosity >= 2;

    try {
      SolveReport rep;
      if (*enum_cmd)
        rep = solve_enum(*model);
      else if (mode == "ground")
        rep = solve_ground(*model, opts);
      else
        rep = solve_bpc(*model, opts);
      if (verbosity >= 1 || *solve) summarize(rep, err);
      std::string body = report_to_json(rep, opts.trace).dump(2) + "\n";
      int rc = write_output(body, out_path, out, err);
      return rc != kExitOk ? rc : report_exit(rep);
    } catch (const IterationLimitError& e) {
      err << "error: " << e.what() << "\n";
      err << "best bound: " << format_double(round9(e.bound));
      if (e.has_incumbent)
        err << "  incumbent: " << format_double(round9(e.incumbent))
            << "  gap: " << format_double(round9(e.gap()));
      err << "\n";
      return kExitLimit;
    } catch (const Error& e) {
      return map_error_exit(e, err);
    }
  }

  err << "error: no command\n";
  return kExitInput;
}

}  // namespace fomip::cli
