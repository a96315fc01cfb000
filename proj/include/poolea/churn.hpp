#pragma once

/// Virtual-time simulation of a volunteer crowd.
///
/// Participants join at random times, each runs a real Island against an
/// in-process PoolService, spends a log-normally distributed number of
/// seconds per migration cycle, and leaves after a Zipf-distributed number
/// of cycles. No wall clock is read anywhere, so a seed fixes the output
/// byte for byte.

#include "poolea/ga.hpp"
#include "poolea/log_event.hpp"
#include "poolea/pool.hpp"
#include "poolea/random.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace poolea {

/// Seconds per migration cycle ~ LogNormal(mu, sigma).
/// The defaults put the 75th percentile at 4 s: mu = ln 4 - 0.6745 sigma.
struct IntervalModel {
  double mu = 0.712;
  double sigma = 1.0;
};

struct ChurnProfile {
  std::size_t participantsMin = 6;
  std::size_t participantsMax = 28;
  double zipfExponent = 0.5;
  /// Cycles contributed by the rank-1 participant.
  double topQuota = 100.0;
  IntervalModel interval;
  /// Participants arrive uniformly over [0, joinSpreadSeconds].
  double joinSpreadSeconds = 3600.0;
  std::uint64_t seed = 1;
  /// Virtual time zero, in ms since the Unix epoch.
  std::int64_t epochMs = 1420070400000;

  void validate() const;
};

/// Instance the simulator runs unless told otherwise: hard enough that a
/// crowd with the default profile usually spends its quotas before solving.
inline TrapSpec defaultChurnSpec() { return TrapSpec{5, 40}; }

/// Uniform over [participantsMin, participantsMax].
std::size_t sampleParticipantCount(const ChurnProfile& profile, Rng& rng);

/// Cycles per rank: max(1, round(topQuota * r^-exponent)) for r = 1..n.
std::vector<std::uint64_t> contributionQuotas(std::size_t n, double exponent,
                                              double topQuota = 100.0);

double sampleCycleInterval(const IntervalModel& model, Rng& rng);

struct ParticipantSummary {
  std::string address;
  std::string clientId;
  std::uint64_t islandSeed = 0;
  std::uint64_t quota = 0;
  double joinedAt = 0.0;
  std::optional<double> leftAt;
  /// Completed cycles, each ending in one PUT.
  std::uint64_t cycles = 0;
  std::uint64_t generations = 0;
  bool solved = false;
};

struct SimulationReport {
  std::vector<LogEvent> syntheticLog;
  std::map<std::string, std::uint64_t> perClientPuts;
  std::optional<double> solvedAtVirtualTime;
  double totalVirtualDuration = 0.0;
  std::vector<ParticipantSummary> participants;
};

/// The report without the log, which is written separately.
nlohmann::ordered_json toJson(const SimulationReport& report);

/// Pool configuration the simulator uses for a profile.
ExperimentConfig simulationPoolConfig(const ChurnProfile& profile, const TrapSpec& spec);
/// Island seed of the participant that joins i-th (0-based).
std::uint64_t participantSeed(const ChurnProfile& profile, std::size_t i);

/// Ends when an island finds the solution or every participant has left.
SimulationReport runSimulation(const ChurnProfile& profile, const EAParams& params,
                               const TrapSpec& spec);

}  // namespace poolea
