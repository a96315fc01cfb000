// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any fails.

#include "poolea/analyzer.hpp"
#include "poolea/churn.hpp"
#include "poolea/http_transport.hpp"
#include "poolea/island.hpp"
#include "poolea/pool.hpp"
#include "poolea/pool_server.hpp"
#include "poolea/trap.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

using namespace poolea;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double secondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(const std::string& name, const std::function<void(Outcome&)>& check) {
  Outcome o;
  try {
    check(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS " : "FAIL ") << name << ":" << o.detail.str() << std::endl;
}

double blockSumOracle(const std::string& bits, std::size_t l) {
  double total = 0;
  for (std::size_t start = 0; start < bits.size(); start += l) {
    std::size_t ones = 0;
    for (std::size_t i = start; i < start + l; ++i) ones += bits[i] == '1';
    total += ones == l ? static_cast<double>(l) : static_cast<double>(l - 1 - ones);
  }
  return total;
}

void trapCorrectness(Outcome& o) {
  const auto start = Clock::now();
  for (std::size_t l = 2; l <= 8; ++l) {
    std::size_t optima = 0;
    for (std::uint32_t pattern = 0; pattern < (1U << l); ++pattern) {
      std::vector<std::uint8_t> block(l);
      std::size_t ones = 0;
      for (std::size_t i = 0; i < l; ++i) ones += block[i] = (pattern >> i) & 1U;
      const Fitness f = trapFitness(block, l);
      if (ones == l) {
        o.require(f == static_cast<Fitness>(l), "all-ones value l=" + std::to_string(l));
      } else if (ones == 0) {
        o.require(f == static_cast<Fitness>(l - 1), "all-zeros value l=" + std::to_string(l));
      } else {
        o.require(f < static_cast<Fitness>(l - 1), "interior below local optimum");
      }
      optima += f == static_cast<Fitness>(l);
    }
    o.require(optima == 1, "unique global optimum l=" + std::to_string(l));
  }
  Rng rng(20240101);
  std::size_t mismatches = 0;
  const std::size_t lengths[] = {2, 3, 4, 5, 6, 7, 8, 13, 64, 65};
  for (int i = 0; i < 10000; ++i) {
    const std::size_t l = lengths[i % 10];
    const TrapSpec spec{l, 1 + static_cast<std::size_t>(rng.below(40))};
    std::string s(spec.chromosomeLength(), '0');
    for (auto& ch : s) ch = rng.below(2) ? '1' : '0';
    for (std::size_t b = 0; b < spec.trapCount; ++b) {
      if (rng.below(4) == 0) std::fill_n(s.begin() + static_cast<std::ptrdiff_t>(b * l), l, '1');
    }
    mismatches += evaluate(Chromosome::parse(s), spec) != blockSumOracle(s, l);
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " oracle mismatches");
  const double t = secondsSince(start);
  o.require(t < 5.0, "runtime");
  o.detail << " l=2..8 exhaustive, 10000 random chromosomes, " << mismatches << " mismatches, " << t
           << " s (limit 5 s)";
}

void solverWorks(Outcome& o) {
  const auto start = Clock::now();
  EAParams params;
  params.maxGenerations = 20000;
  std::size_t solved = 0;
  std::uint64_t worst = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    NullTransport none;
    const IslandReport r = runIsland(params, TrapSpec{4, 10}, none, seed);
    solved += r.solved;
    worst = std::max(worst, r.generations);
  }
  const double t = secondsSince(start);
  o.require(solved == 20, "all seeds solve");
  o.require(t < 120.0, "runtime");
  o.detail << " " << solved << "/20 solved, max " << worst << " generations, " << t << " s (limit 120 s)";
}

void distributedRun(Outcome& o) {
  const auto start = Clock::now();
  ExperimentConfig config;
  config.spec = TrapSpec{4, 10};
  config.seed = 77;
  PoolService svc(config, Anonymizer::withRandomKey());

  std::mutex m;
  std::multiset<std::string> stored;
  std::size_t puts = 0, gets = 0, violations = 0;
  std::int64_t lastT = 0;
  svc.setObserver([&](const PoolObservation& obs) {
    std::lock_guard lock(m);
    if (obs.event.timestampMs < lastT) ++violations;
    lastT = obs.event.timestampMs;
    if (obs.event.op == Op::Put) {
      stored.insert(obs.chromosome->toString());
      ++puts;
    } else {
      ++gets;
      if (obs.chromosome && stored.count(obs.chromosome->toString()) == 0) ++violations;
      if (!obs.chromosome && !stored.empty()) ++violations;
    }
    if (obs.poolSizeAfter != puts) ++violations;
  });

  ServerOptions options;
  options.host = "127.0.0.1";
  options.port = 0;
  options.trustForwardedFor = true;
  PoolServer server(svc, options);
  const int port = server.bind();
  std::thread serving([&] { server.serve(); });
  server.waitUntilReady();

  EAParams params;
  params.maxGenerations = 20000;
  // At period 100 most islands solve this instance before their first exchange.
  params.migrationPeriod = 10;
  std::vector<IslandReport> reports(4);
  std::vector<std::thread> islands;
  for (int i = 0; i < 4; ++i) {
    islands.emplace_back([&, i] {
      HttpTransportOptions t;
      t.forwardedFor = "198.51.100." + std::to_string(10 + i);
      HttpTransport transport("http://127.0.0.1:" + std::to_string(port), t);
      reports[i] = runIsland(params, config.spec, transport, deriveSeed(4242, i));
    });
  }
  for (auto& th : islands) th.join();
  server.stop();
  serving.join();

  const auto log = svc.log();
  std::set<std::string> ids;
  for (const auto& e : log) ids.insert(e.clientId);
  bool prefixed = std::all_of(ids.begin(), ids.end(), [](const std::string& id) { return id.rfind("10.", 0) == 0; });
  std::size_t solved = 0;
  std::uint64_t sent = 0;
  for (const auto& r : reports) {
    solved += r.solved;
    sent += r.migrationsSent;
  }
  const double t = secondsSince(start);
  o.require(solved == 4, "all islands solve");
  o.require(ids.size() == 4 && prefixed, "4 distinct 10.x ids");
  o.require(violations == 0, "pool invariants");
  o.require(log.size() == puts + gets && puts == sent && svc.poolSize() == puts, "size accounting");
  o.require(t < 120.0, "runtime");
  o.detail << " " << solved << "/4 solved, " << ids.size() << " client ids, " << puts << " PUTs, " << gets
           << " GETs, " << violations << " invariant violations, " << t << " s (limit 120 s)";
}

// A loopback port with nothing listening: connections are refused at once.
int closedPort() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  socklen_t len = sizeof addr;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), len);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

void fireAndForget(Outcome& o) {
  const int port = closedPort();
  EAParams params;
  params.maxGenerations = 20000;
  const TrapSpec spec{4, 10};
  double baseline = 0, unreachable = 0;
  bool allSolved = true;
  std::uint64_t received = 0, sent = 0;
  // Per seed, the fastest of three runs in each mode, summed over seeds.
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    double bestBase = 1e9, bestDown = 1e9;
    for (int rep = 0; rep < 3; ++rep) {
      NullTransport none;
      auto start = Clock::now();
      runIsland(params, spec, none, seed);
      bestBase = std::min(bestBase, secondsSince(start));
      HttpTransport down("http://127.0.0.1:" + std::to_string(port));
      start = Clock::now();
      const IslandReport r = runIsland(params, spec, down, seed);
      bestDown = std::min(bestDown, secondsSince(start));
      if (rep == 0) {
        allSolved = allSolved && r.solved;
        received += r.migrationsReceived;
        sent += r.migrationsSent;
      }
    }
    baseline += bestBase;
    unreachable += bestDown;
  }
  o.require(allSolved, "solved");
  o.require(received == 0, "nothing received");
  o.require(unreachable <= 1.5 * baseline, "within 1.5x baseline");
  o.detail << " solved=" << (allSolved ? "true" : "false") << ", migrationsReceived=" << received << " of "
           << sent << " attempts, " << unreachable << " s vs baseline " << baseline << " s (ratio "
           << unreachable / baseline << ", limit 1.5)";
}

void equivalence(Outcome& o) {
  EAParams params;
  params.maxGenerations = 20000;
  const TrapSpec spec{4, 10};
  std::size_t identical = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    NullTransport none;
    const IslandReport r = runIsland(params, spec, none, seed);
    Rng rng(seed);
    Population pop = newRandomPopulation(params, spec, rng);
    evaluateAll(pop, spec);
    std::vector<std::pair<std::uint64_t, Fitness>> trace{{0, pop.bestFitness()}};
    while (!pop.hasSolution() && pop.generation < *params.maxGenerations) {
      pop = stepGeneration(std::move(pop), params, spec, rng);
      trace.emplace_back(pop.generation, pop.bestFitness());
    }
    identical += trace == r.bestFitnessTrace;
  }
  o.require(identical == 5, "identical traces");
  o.detail << " " << identical << "/5 seeds bit-identical";
}

struct ChurnRun {
  SimulationReport report;
  ExperimentStats stats;
};

std::vector<ChurnRun> churnRuns;

void churnStatistics(Outcome& o) {
  const auto start = Clock::now();
  const EAParams params;
  const ChurnProfile defaults;
  std::vector<double> slopes;
  std::size_t intervals = 0, under4 = 0, minN = 1000, maxN = 0, fits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ChurnProfile profile;
    profile.seed = seed;
    SimulationReport report = runSimulation(profile, params, defaultChurnSpec());
    std::string ndjson;
    for (const auto& e : report.syntheticLog) ndjson += toJsonLine(e) + "\n";
    ExperimentStats stats = computeStats(parseLog(ndjson).events);
    minN = std::min(minN, report.participants.size());
    maxN = std::max(maxN, report.participants.size());
    if (stats.powerLaw) {
      slopes.push_back(stats.powerLaw->slope);
      ++fits;
    }
    intervals += stats.intervals.size();
    under4 += static_cast<std::size_t>(
        std::count_if(stats.intervals.begin(), stats.intervals.end(), [](double x) { return x < 4.0; }));
    churnRuns.push_back({std::move(report), std::move(stats)});
  }
  const double t = secondsSince(start);
  double meanSlope = 0;
  for (double s : slopes) meanSlope += s;
  meanSlope /= static_cast<double>(std::max<std::size_t>(1, slopes.size()));
  const double fraction = static_cast<double>(under4) / static_cast<double>(std::max<std::size_t>(1, intervals));
  o.require(fits == 20, "power-law fit on every seed");
  o.require(std::abs(meanSlope + defaults.zipfExponent) <= 0.2, "slope");
  o.require(std::abs(fraction - 0.75) <= 0.03, "fraction under 4 s");
  o.require(intervals >= 10000, "interval count");
  o.require(minN >= 6 && maxN <= 28, "participant range");
  o.require(t < 60.0, "runtime");
  o.detail << " mean slope " << meanSlope << " over " << fits << " seeds (target " << -defaults.zipfExponent
           << " +/- 0.2), fractionUnder(4s) " << fraction << " on " << intervals
           << " intervals (target 0.75 +/- 0.03, >= 10000), participants in [" << minN << "," << maxN
           << "], " << t << " s (limit 60 s)";
}

void analyzerFidelity(Outcome& o) {
  o.require(churnRuns.size() == 20, "churn runs available");
  std::size_t countMismatch = 0, massMismatch = 0, durationMismatch = 0;
  for (const auto& run : churnRuns) {
    std::map<std::string, std::uint64_t> recovered(run.stats.rankedPutCounts.begin(), run.stats.rankedPutCounts.end());
    countMismatch += recovered != run.report.perClientPuts;
    std::uint64_t gaps = 0;
    for (const auto& [id, n] : run.report.perClientPuts) gaps += n - 1;
    std::uint64_t mass = 0;
    for (const auto& [k, n] : run.stats.intervalHistogram) mass += n;
    massMismatch += mass != gaps || run.stats.intervals.size() != gaps;
    std::optional<std::int64_t> first, last;
    for (const auto& e : run.report.syntheticLog) {
      if (e.op != Op::Put) continue;
      if (!first) first = e.timestampMs;
      last = e.timestampMs;
    }
    const double expected = first ? static_cast<double>(*last - *first) / 1000.0 : 0.0;
    durationMismatch += run.stats.durationSeconds != expected;
  }
  o.require(countMismatch == 0, "per-client counts");
  o.require(massMismatch == 0, "histogram mass");
  o.require(durationMismatch == 0, "duration");
  o.detail << " " << churnRuns.size() << " simulated logs: " << countMismatch << " count mismatches, "
           << massMismatch << " histogram-mass mismatches, " << durationMismatch << " duration mismatches";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism(Outcome& o, const std::string& binary) {
  const fs::path dir = fs::temp_directory_path() / ("poolea_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  for (const char* tag : {"a", "b"}) {
    const std::string cmd = "\"" + binary + "\" simulate --seed 42 --log \"" + (dir / tag).string() +
                            ".ndjson\" --report \"" + (dir / tag).string() + ".json\" > /dev/null";
    o.require(std::system(cmd.c_str()) == 0, std::string("simulate run ") + tag);
  }
  const std::string logA = slurp(dir / "a.ndjson"), logB = slurp(dir / "b.ndjson");
  const std::string repA = slurp(dir / "a.json"), repB = slurp(dir / "b.json");
  o.require(!logA.empty() && logA == logB, "log identical");
  o.require(!repA.empty() && repA == repB, "report identical");
  o.detail << " two `simulate --seed 42` runs: log " << logA.size() << " bytes "
           << (logA == logB ? "identical" : "DIFFERENT") << ", report " << repA.size() << " bytes "
           << (repA == repB ? "identical" : "DIFFERENT");
  fs::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
  std::string binary = argc > 1 ? argv[1] : "poolea";
  report("trap-correctness", trapCorrectness);
  report("solver-works", solverWorks);
  report("distributed-run", distributedRun);
  report("fire-and-forget", fireAndForget);
  report("equivalence-oracle", equivalence);
  report("churn-statistics", churnStatistics);
  report("analyzer-fidelity", analyzerFidelity);
  report("determinism", [&](Outcome& o) { determinism(o, binary); });
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
