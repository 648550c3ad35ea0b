#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vnlab/errors.hpp"
#include "vnlab/harness.hpp"

namespace {

enum Exit { kPass = 0, kCheckFailure = 1, kUsage = 2, kNumerical = 3 };

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw vnlab::Error(vnlab::ErrorKind::Usage, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw vnlab::Error(vnlab::ErrorKind::Usage, "cannot write " + out);
  f << text;
}

int exit_for(vnlab::ErrorKind k) {
  using vnlab::ErrorKind;
  switch (k) {
    case ErrorKind::Usage:
    case ErrorKind::Parameter:
    case ErrorKind::Limit:
    case ErrorKind::InvalidDimension:
    case ErrorKind::Shape:
    case ErrorKind::Scope:
      return kUsage;
    default:
      return kNumerical;
  }
}

std::vector<int> parse_dims(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw vnlab::Error(vnlab::ErrorKind::Usage, "bad dimension list '" + s + "'");
    }
  }
  return out;
}

// Reports write non-finite numbers as strings.
double stored_value(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  const std::string s = v.is_string() ? v.get<std::string>() : "nan";
  if (s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vnlab: finite-dimensional modular theory and entanglement bounds"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::optional<double> p;
  std::string out;
  std::string format = "json";
  app.add_option("--seed", seed, "seed for instance generation");
  app.add_option("--tol", tol, "override every check tolerance (a check passes iff residual < tol)");
  app.add_option("--p", p, "nuclearity exponent in (0, 1]");
  app.add_option("--out", out, "write the report to a file instead of stdout");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "tsv"}));

  auto* compute = app.add_subcommand("compute", "evaluate one quantity on a scenario file");
  std::string quantity, scenario;
  compute->add_option("quantity", quantity,
                      "relative-entropy | entropy | mutual-information | relative-entanglement | "
                      "canonical-entropy | partition-function | takesaki")
      ->required();
  compute->add_option("scenario", scenario, "scenario JSON file")->required();

  auto* suite = app.add_subcommand("suite", "run an invariant suite");
  std::string suite_name;
  int trials = 0;
  std::string replay_file;
  bool list = false;
  suite->add_option("name", suite_name, "suite name, or 'all'");
  suite->add_option("--trials", trials, "trials per suite (default: suite specific)");
  suite->add_option("--replay", replay_file, "re-evaluate the worst instance stored in a report");
  suite->add_flag("--list", list, "list the registered suites");

  auto* certify = app.add_subcommand("certify", "pipeline and canonical-factor checks on a split pair");
  std::string cert_file;
  certify->add_option("scenario", cert_file, "split_pair scenario JSON file")->required();

  auto* scan = app.add_subcommand("scan", "distance scan on the 2 x 2 family");
  int steps = 10;
  scan->add_option("--steps", steps, "number of unit steps in s");

  auto* gen = app.add_subcommand("gen", "generate a scenario file");
  std::string kind, dims;
  gen->add_option("kind", kind, "state | bipartite | split_pair | inclusion")->required();
  gen->add_option("--dims", dims, "comma separated dimensions (inclusion: n1,m1,n2,m2,...)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*compute) {
      emit(vnlab::compute_quantity(quantity, read_file(scenario), p.value_or(0.5)), out);
      return kPass;
    }
    if (*suite) {
      if (list) {
        std::string text;
        for (const auto& n : vnlab::suite_names()) text += n + "\n";
        emit(text, out);
        return kPass;
      }
      if (!replay_file.empty()) {
        const auto report = nlohmann::json::parse(read_file(replay_file));
        const auto& worst = report.at("worst");
        if (worst.is_null()) throw vnlab::Error(vnlab::ErrorKind::Usage, "report has no stored instance");
        const std::string sname = worst.at("suite").get<std::string>();
        std::string id = worst.at("check_id").get<std::string>();
        if (report.at("suite").get<std::string>() == "all") id = id.substr(sname.size() + 1);
        const auto recs = vnlab::replay(sname, worst.at("instance").dump(), tol);
        const auto stored = worst.at("residual");
        nlohmann::json res{{"suite", sname}, {"check_id", id}, {"stored_residual", stored}};
        bool identical = false;
        for (const auto& r : recs)
          if (r.id == id) {
            res["replayed_residual"] = r.residual;
            identical = stored_value(stored) == r.residual;
          }
        res["identical"] = identical;
        emit(res.dump(1) + "\n", out);
        return identical ? kPass : kCheckFailure;
      }
      if (suite_name.empty()) throw vnlab::Error(vnlab::ErrorKind::Usage, "suite name required (see --list)");
      const auto r = vnlab::run_suite(suite_name, tol, seed, trials);
      emit(format == "tsv" ? vnlab::to_tsv(r) : vnlab::to_json(r), out);
      return r.all_pass() ? kPass : kCheckFailure;
    }
    if (*certify) {
      std::vector<double> ps{0.25, 0.5, 0.75};
      if (p) ps = {*p};
      const auto r = vnlab::certify(read_file(cert_file), ps, tol);
      emit(format == "tsv" ? vnlab::to_tsv(r) : vnlab::to_json(r), out);
      return r.all_pass() ? kPass : kCheckFailure;
    }
    if (*scan) {
      const double pp = p.value_or(0.5);
      const auto rows = vnlab::scan_distance(pp, steps);
      emit(format == "tsv" ? vnlab::scan_to_tsv(rows) : vnlab::scan_to_json(rows, pp), out);
      return kPass;
    }
    if (*gen) {
      emit(vnlab::generate_instance(kind, parse_dims(dims), seed), out);
      return kPass;
    }
  } catch (const vnlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
