#include <fstream>
#include <iostream>

#include "cli.hpp"
#include "plk/errors.hpp"
#include "plk/parallel.hpp"

namespace plk::cli {

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Seed for every random choice");
  sub->add_option("--tolerance", c.tolerance, "Override numeric thresholds (exact checks are unaffected)");
  sub->add_option("--report", c.report_path, "Also write the report to this file");
}

Json load(const std::string& path) { return io::parse(io::read_file(path)); }

void write_json(const std::string& path, const Json& j) { io::write_atomic(path, j.dump(1) + "\n"); }

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  io::write_atomic(path, out.str());
}

Rational rational(const std::string& s) {
  try {
    return Rational::parse(s);
  } catch (const std::invalid_argument&) {
    throw ParseError("bad rational \"" + s + "\"");
  }
}

std::vector<Rational> rationals(const std::string& csv) {
  std::vector<Rational> out;
  std::string cur;
  std::istringstream in(csv);
  while (std::getline(in, cur, ','))
    if (!cur.empty()) out.push_back(rational(cur));
  return out;
}

void fail(Json& report, const std::string& message) {
  report["status"] = "fail";
  if (!report.contains("message")) report["message"] = message;
}

}  // namespace plk::cli

int main(int argc, char** argv) {
  using namespace plk::cli;
  CLI::App app{"plk: certified PL lifts and the Morin polynomial laboratory"};
  app.require_subcommand(1);
  Common common;
  Handlers handlers;
  register_lift_verbs(app, handlers, common);
  register_morin_verbs(app, handlers, common);

  std::string verb = "plk";
  auto emit = [&](Json report, int code) {
    report["threads"] = plk::worker_count();
    std::cout << report.dump(1) << std::endl;
    if (!common.report_path.empty()) {
      try {
        write_json(common.report_path, report);
      } catch (const std::exception& e) {
        std::cerr << "plk: " << e.what() << "\n";
        return static_cast<int>(error);
      }
    }
    return code;
  };
  auto error_report = [&](const std::string& msg) {
    Json r = plk::io::report(verb);
    r["status"] = "error";
    r["message"] = msg;
    return r;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }

  for (const auto& [sub, run] : handlers) {
    if (!sub->parsed()) continue;
    verb = sub->get_name();
    try {
      Json report = run();
      const bool pass = report["status"] == "pass";
      return emit(std::move(report), pass ? ok : failed);
    } catch (const UsageError& e) {
      std::cerr << "plk " << verb << ": " << e.what() << "\n";
      return emit(error_report(e.what()), usage);
    } catch (const plk::ParseError& e) {
      return emit(error_report(std::string("parse failure: ") + e.what()), parse_failure);
    } catch (const plk::UnknownBuiltin& e) {
      return emit(error_report(e.what()), unknown_builtin);
    } catch (const plk::SchemaError& e) {
      return emit(error_report(std::string("schema violation: ") + e.what()), schema_violation);
    } catch (const std::exception& e) {
      return emit(error_report(e.what()), error);
    }
  }
  return usage;
}
