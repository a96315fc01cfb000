#include "cli.hpp"

#include "poolea/analyzer.hpp"
#include "poolea/churn.hpp"
#include "poolea/http_transport.hpp"
#include "poolea/island.hpp"
#include "poolea/pool.hpp"
#include "poolea/pool_server.hpp"
#include "poolea/transport.hpp"

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"

#include <pthread.h>

#include <atomic>
#include <cctype>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace poolea::cli {

namespace {

std::string envName(const std::string& sub, const std::string& flag) {
  std::string name = "POOLEA_" + sub + "_" + flag;
  for (char& c : name) c = c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return name;
}

/// Reads `--config` files written as JSON: one object per subcommand, keyed
/// by long flag names without the dashes.
///
///     {"simulate": {"seed": 42, "traps": 10}, "serve": {"port": 9000}}
///
/// CLI11 applies config values before environment variables, so entries
/// whose variable is set are dropped here to let the environment win.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool defaults, bool, std::string) const override {
    nlohmann::ordered_json j = describe(app, defaults);
    return j.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j = nlohmann::json::parse(input, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw CLI::ConfigError("config file is not a JSON object");
    }
    std::vector<CLI::ConfigItem> items;
    walk(j, {}, items);
    return items;
  }

 private:
  static nlohmann::ordered_json describe(const CLI::App* app, bool defaults) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string& name = opt->get_lnames().front();
      if (opt->count() > 0) {
        j[name] = opt->as<std::string>();
      } else if (defaults && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      j[sub->get_name()] = describe(sub, defaults);
    }
    return j;
  }

  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void walk(const nlohmann::json& j, const std::vector<std::string>& parents,
                   std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        walk(value, nested, items);
        continue;
      }
      if (value.is_null()) continue;
      if (!parents.empty() && std::getenv(envName(parents.back(), key).c_str()) != nullptr) continue;
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

template <typename T>
CLI::Option* option(CLI::App* app, const std::string& flag, T& target, const std::string& help) {
  return app->add_option("--" + flag, target, help)
      ->envname(envName(app->get_name(), flag))
      ->capture_default_str();
}

CLI::Option* flag(CLI::App* app, const std::string& name, bool& target, const std::string& help) {
  return app->add_flag("--" + name, target, help)->envname(envName(app->get_name(), name));
}

std::uint64_t entropySeed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

struct SpecArgs {
  std::size_t trapLength = 4;
  std::size_t traps = 40;

  void add(CLI::App* app) {
    option(app, "trap-length", trapLength, "Bits per trap block");
    option(app, "traps", traps, "Number of concatenated trap blocks");
  }
  TrapSpec spec() const { return TrapSpec{trapLength, traps}; }
};

struct EaArgs {
  EAParams params;

  void add(CLI::App* app) {
    option(app, "population", params.populationSize, "Population size");
    option(app, "elite", params.eliteSize, "Individuals copied unchanged each generation");
    option(app, "tournament", params.tournamentSize, "Tournament size");
    option(app, "crossover-rate", params.crossoverRate, "Probability of two-point crossover");
    option(app, "mutation-rate", params.mutationRatePerBit, "Per-bit flip probability (default 1/L)");
    option(app, "period", params.migrationPeriod, "Generations between migrations");
    option(app, "max-generations", params.maxGenerations, "Stop after this many generations");
  }
};

struct ServeArgs {
  ServerOptions server;
  SpecArgs spec;
  std::size_t seedCount = 0;
  std::optional<std::size_t> capacity;
  std::string logFile = "pool_log.ndjson";
  std::optional<std::uint64_t> seed;
  std::string staticDir;
};

struct IslandArgs {
  SpecArgs spec;
  EaArgs ea;
  std::string server;
  std::optional<std::uint64_t> seed;
  std::string report;
  int timeoutMs = 2000;
  std::string forwardedFor;
  bool background = false;
};

struct SimulateArgs {
  ChurnProfile profile;
  SpecArgs spec{defaultChurnSpec().trapLength, defaultChurnSpec().trapCount};
  EaArgs ea;
  std::string log = "simulation_log.ndjson";
  std::string report = "simulation_report.json";
};

struct AnalyzeArgs {
  std::string input;
  std::string outDir = "analysis";
};

void writeFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("error writing " + path);
}

std::string readInput(const std::string& input) {
  if (input.rfind("https://", 0) == 0) {
    throw std::runtime_error("https log URLs are not supported; use http or a file");
  }
  if (input.rfind("http://", 0) == 0) {
    const ServerUrl url = ServerUrl::parse(input);
    httplib::Client client(url.origin);
    client.set_connection_timeout(std::chrono::seconds(5));
    client.set_read_timeout(std::chrono::seconds(30));
    auto res = client.Get(url.pathPrefix + "/log");
    if (!res) throw std::runtime_error("cannot fetch " + input + ": " + httplib::to_string(res.error()));
    if (res->status != 200) {
      throw std::runtime_error("fetching " + input + " returned HTTP " + std::to_string(res->status));
    }
    return res->body;
  }
  std::ifstream in(input, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + input);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int runServe(const ServeArgs& args, std::ostream& out) {
  ExperimentConfig config;
  config.spec = args.spec.spec();
  config.seedCount = args.seedCount;
  config.capacity = args.capacity;
  config.seed = args.seed ? *args.seed : entropySeed();
  config.validate();
  if (args.server.port < 0 || args.server.port > 65535) {
    throw std::invalid_argument("port must be in [0, 65535]");
  }
  ServerOptions options = args.server;
  if (!args.staticDir.empty()) {
    if (!std::filesystem::is_directory(args.staticDir)) {
      throw std::invalid_argument("static dir " + args.staticDir + " is not a directory");
    }
    options.staticDir = args.staticDir;
  }

  // Signals go to a dedicated thread; every thread started below inherits
  // the mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &signals, &previous);

  std::optional<std::filesystem::path> logFile;
  if (!args.logFile.empty()) logFile = args.logFile;
  PoolService service(config, Anonymizer::withRandomKey(), systemClockMs, logFile);
  PoolServer server(service, options);
  const int port = server.bind();
  out << "listening on http://" << options.host << ":" << port << std::endl;

  std::atomic<bool> signalled{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    signalled = true;
    server.stop();
  });
  server.serve();
  if (!signalled) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  out << "stopped after " << service.logSize() << " logged requests" << std::endl;
  return 0;
}

int runIslandCommand(const IslandArgs& args, std::ostream& out) {
  const TrapSpec spec = args.spec.spec();
  spec.validate();
  args.ea.params.validate();
  if (args.timeoutMs <= 0) throw std::invalid_argument("timeout must be positive");
  const std::uint64_t seed = args.seed ? *args.seed : entropySeed();

  std::unique_ptr<MigrationTransport> base;
  if (args.server.empty()) {
    base = std::make_unique<NullTransport>();
  } else {
    HttpTransportOptions options;
    options.timeout = std::chrono::milliseconds(args.timeoutMs);
    if (!args.forwardedFor.empty()) options.forwardedFor = args.forwardedFor;
    base = std::make_unique<HttpTransport>(args.server, options);
  }
  std::unique_ptr<BackgroundTransport> background;
  MigrationTransport* transport = base.get();
  if (args.background) {
    background = std::make_unique<BackgroundTransport>(*base);
    transport = background.get();
  }

  IslandReport report = runIsland(args.ea.params, spec, *transport, seed);
  if (background) background->drain();
  background.reset();

  nlohmann::ordered_json j;
  j["seed"] = seed;
  j.update(toJson(report));
  const std::string text = j.dump() + "\n";
  if (args.report.empty()) {
    out << text;
  } else {
    writeFile(args.report, text);
    out << (report.solved ? "solved" : "not solved") << " after " << report.generations
        << " generations; report written to " << args.report << "\n";
  }
  return 0;
}

int runSimulate(const SimulateArgs& args, std::ostream& out) {
  const TrapSpec spec = args.spec.spec();
  spec.validate();
  args.ea.params.validate();
  args.profile.validate();
  if (args.log.empty() || args.report.empty()) {
    throw std::invalid_argument("log and report paths must not be empty");
  }

  const SimulationReport report = runSimulation(args.profile, args.ea.params, spec);
  std::string log;
  for (const auto& e : report.syntheticLog) log += toJsonLine(e) + "\n";
  writeFile(args.log, log);
  writeFile(args.report, toJson(report).dump(2) + "\n");
  out << report.participants.size() << " participants, " << report.syntheticLog.size()
      << " events, " << (report.solvedAtVirtualTime ? "solved" : "not solved") << "; wrote "
      << args.log << " and " << args.report << "\n";
  return 0;
}

int runAnalyze(const AnalyzeArgs& args, std::ostream& out) {
  const ParsedLog parsed = parseLog(readInput(args.input));
  const ExperimentStats stats = computeStats(parsed.events);
  exportCsv(stats, args.outDir);
  const StatsSummary s = summarize(stats);
  out << parsed.events.size() << " events (" << parsed.skipped << " skipped), " << s.totalPuts
      << " PUTs from " << s.distinctClients << " clients, " << s.intervalCount
      << " intervals, fraction under 4 s " << s.fractionUnder4s;
  if (s.powerLawSlope) out << ", power-law slope " << *s.powerLawSlope;
  out << "; CSVs in " << args.outDir << "\n";
  return 0;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pool-based distributed evolutionary algorithm", "poolea"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file with one section per subcommand");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  ServeArgs serve;
  IslandArgs island;
  SimulateArgs simulate;
  AnalyzeArgs analyze;

  CLI::App* serveCmd = app.add_subcommand("serve", "Run the migration pool server");
  option(serveCmd, "host", serve.server.host, "Listen address");
  option(serveCmd, "port", serve.server.port, "Listen port (0 picks one)");
  serve.spec.add(serveCmd);
  option(serveCmd, "seed-count", serve.seedCount, "Random chromosomes placed in the pool at start");
  option(serveCmd, "capacity", serve.capacity, "Maximum pool size; oldest entries are evicted");
  option(serveCmd, "log-file", serve.logFile, "Experiment log (one JSON event per line); empty disables");
  option(serveCmd, "seed", serve.seed, "Seed for pool seeding and sampling (default: random)");
  flag(serveCmd, "trust-forwarded-for", serve.server.trustForwardedFor,
       "Identify clients by X-Forwarded-For");
  flag(serveCmd, "admin", serve.server.enableAdminReset, "Enable POST /admin/reset from loopback");
  option(serveCmd, "static-dir", serve.staticDir, "Directory served at /");

  CLI::App* islandCmd = app.add_subcommand("island", "Run one native island");
  island.spec.add(islandCmd);
  island.ea.add(islandCmd);
  option(islandCmd, "server", island.server, "Pool server URL; omit to run alone");
  option(islandCmd, "seed", island.seed, "Random seed (default: random)");
  option(islandCmd, "report", island.report, "Write the JSON report here instead of stdout");
  option(islandCmd, "timeout-ms", island.timeoutMs, "Per-request network timeout");
  option(islandCmd, "forwarded-for", island.forwardedFor, "X-Forwarded-For value to send");
  flag(islandCmd, "background", island.background, "Overlap migration with computation");

  CLI::App* simulateCmd = app.add_subcommand("simulate", "Simulate a volunteer crowd in virtual time");
  simulate.spec.add(simulateCmd);
  simulate.ea.add(simulateCmd);
  option(simulateCmd, "seed", simulate.profile.seed, "Random seed");
  option(simulateCmd, "participants-min", simulate.profile.participantsMin, "Fewest participants");
  option(simulateCmd, "participants-max", simulate.profile.participantsMax, "Most participants");
  option(simulateCmd, "zipf", simulate.profile.zipfExponent, "Contribution power-law exponent");
  option(simulateCmd, "top-quota", simulate.profile.topQuota, "Cycles of the top contributor");
  option(simulateCmd, "interval-mu", simulate.profile.interval.mu, "Log-normal mu of seconds per cycle");
  option(simulateCmd, "interval-sigma", simulate.profile.interval.sigma,
         "Log-normal sigma of seconds per cycle");
  option(simulateCmd, "join-spread", simulate.profile.joinSpreadSeconds,
         "Seconds over which participants arrive");
  option(simulateCmd, "epoch-ms", simulate.profile.epochMs, "Timestamp of virtual time zero");
  option(simulateCmd, "log", simulate.log, "Output log path");
  option(simulateCmd, "report", simulate.report, "Output report path");

  CLI::App* analyzeCmd = app.add_subcommand("analyze", "Compute statistics from an experiment log");
  option(analyzeCmd, "input", analyze.input, "Log file, or server URL whose /log to fetch")->required();
  option(analyzeCmd, "out-dir", analyze.outDir, "Directory for the CSV files");

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 2;
  }

  try {
    if (*serveCmd) return runServe(serve, out);
    if (*islandCmd) return runIslandCommand(island, out);
    if (*simulateCmd) return runSimulate(simulate, out);
    return runAnalyze(analyze, out);
  } catch (const std::invalid_argument& e) {
    err << "poolea: invalid configuration: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "poolea: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace poolea::cli
