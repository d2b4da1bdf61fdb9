#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "magnon/cli.hpp"
#include "magnon/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Two-magnon bound states of the modulated XXZ chain"};
  std::string command;
  std::string config_path;
  magnon::ConfigOverrides overrides;
  std::string delta_over_j, lambda_over_j, beta, length, bc, ndelta, output, phase, neta, max_q;
  bool long_run = false;

  app.add_option("command", command, "spectrum | chern | table1 | butterfly | edges | effective | deform | dsweep");
  app.add_option("-c,--config", config_path, "key = value configuration file");
  app.add_option("--delta-over-j", delta_over_j, "Delta / J");
  app.add_option("--lambda-over-j", lambda_over_j, "lambda / J");
  app.add_option("--beta", beta, "modulation frequency p/q");
  app.add_option("--phase", phase, "modulation phase delta (number or multiple of pi, e.g. pi/6)");
  app.add_option("--length", length, "number of sites L");
  app.add_option("--bc", bc, "periodic | open");
  app.add_option("--ndelta", ndelta, "delta grid points");
  app.add_option("--neta", neta, "eta grid points (deform)");
  app.add_option("--max-q", max_q, "largest denominator (butterfly)");
  app.add_option("-o,--output", output, "output directory");
  app.add_flag("--long", long_run, "table1: include q = 7, 9");
  CLI11_PARSE(app, argc, argv);

  try {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw magnon::IoError("cannot read configuration " + config_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    auto set = [&](const char* key, const std::string& value) {
      if (!value.empty()) overrides[key] = value;
    };
    set("command", command);
    set("Delta", delta_over_j);
    set("lambda", lambda_over_j);
    set("delta", phase);
    set("L", length);
    set("bc", bc);
    set("n_delta", ndelta);
    set("n_eta", neta);
    set("max_q", max_q);
    set("output", output);
    if (long_run) overrides["long"] = "true";
    if (!beta.empty()) {
      const auto slash = beta.find('/');
      if (slash == std::string::npos) throw magnon::ValidationError("--beta: expected p/q, got '" + beta + "'");
      overrides["beta_p"] = beta.substr(0, slash);
      overrides["beta_q"] = beta.substr(slash + 1);
    }

    const magnon::RunConfig config = magnon::parse_config(text, overrides);
    const magnon::RunReport report = magnon::run(config);
    std::cout << report.summary << "\n";
    for (const auto& f : report.files) std::cout << "wrote " << f.string() << "\n";
    return magnon::kExitOk;
  } catch (const std::exception& e) {
    const int code = magnon::exit_code_for_current_exception();
    std::cerr << "error: " << e.what() << "\n";
    return code;
  }
}
