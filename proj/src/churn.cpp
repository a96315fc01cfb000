#include "poolea/churn.hpp"

#include "poolea/island.hpp"
#include "poolea/transport.hpp"

#include <cmath>
#include <memory>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace poolea {

void ChurnProfile::validate() const {
  if (participantsMin < 1) throw std::invalid_argument("participant minimum must be at least 1");
  if (participantsMax < participantsMin) {
    throw std::invalid_argument("participant maximum below minimum");
  }
  if (!(zipfExponent > 0.0)) throw std::invalid_argument("zipf exponent must be positive");
  if (!(topQuota >= 1.0)) throw std::invalid_argument("top quota must be at least 1");
  if (!(interval.sigma > 0.0)) throw std::invalid_argument("interval sigma must be positive");
  if (!std::isfinite(interval.mu)) throw std::invalid_argument("interval mu must be finite");
  if (!(joinSpreadSeconds >= 0.0)) throw std::invalid_argument("join spread must be >= 0");
}

std::size_t sampleParticipantCount(const ChurnProfile& profile, Rng& rng) {
  return static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(profile.participantsMin),
                                               static_cast<std::int64_t>(profile.participantsMax)));
}

std::vector<std::uint64_t> contributionQuotas(std::size_t n, double exponent, double topQuota) {
  std::vector<std::uint64_t> quotas;
  quotas.reserve(n);
  for (std::size_t r = 1; r <= n; ++r) {
    const double q = std::round(topQuota * std::pow(static_cast<double>(r), -exponent));
    quotas.push_back(q < 1.0 ? 1 : static_cast<std::uint64_t>(q));
  }
  return quotas;
}

double sampleCycleInterval(const IntervalModel& model, Rng& rng) {
  return rng.logNormal(model.mu, model.sigma);
}

nlohmann::ordered_json toJson(const SimulationReport& report) {
  nlohmann::ordered_json j;
  j["participants"] = report.participants.size();
  j["events"] = report.syntheticLog.size();
  std::uint64_t puts = 0;
  for (const auto& [id, n] : report.perClientPuts) puts += n;
  j["puts"] = puts;
  j["solved"] = report.solvedAtVirtualTime.has_value();
  j["solvedAtVirtualTime"] =
      report.solvedAtVirtualTime ? nlohmann::ordered_json(*report.solvedAtVirtualTime) : nullptr;
  j["totalVirtualDuration"] = report.totalVirtualDuration;
  nlohmann::ordered_json perClient = nlohmann::ordered_json::object();
  for (const auto& [id, n] : report.perClientPuts) perClient[id] = n;
  j["perClientPuts"] = std::move(perClient);
  auto clients = nlohmann::ordered_json::array();
  for (const auto& p : report.participants) {
    nlohmann::ordered_json c;
    c["clientId"] = p.clientId;
    c["quota"] = p.quota;
    c["joinedAt"] = p.joinedAt;
    c["leftAt"] = p.leftAt ? nlohmann::ordered_json(*p.leftAt) : nullptr;
    c["cycles"] = p.cycles;
    c["generations"] = p.generations;
    c["solved"] = p.solved;
    c["islandSeed"] = p.islandSeed;
    clients.push_back(std::move(c));
  }
  j["clients"] = std::move(clients);
  return j;
}

ExperimentConfig simulationPoolConfig(const ChurnProfile& profile, const TrapSpec& spec) {
  ExperimentConfig config;
  config.spec = spec;
  config.seed = deriveSeed(profile.seed, 2);
  return config;
}

std::uint64_t participantSeed(const ChurnProfile& profile, std::size_t i) {
  return deriveSeed(profile.seed, 1000 + i);
}

SimulationReport runSimulation(const ChurnProfile& profile, const EAParams& params,
                               const TrapSpec& spec) {
  profile.validate();
  params.validate();
  spec.validate();

  Rng rng(deriveSeed(profile.seed, 0));
  double now = 0.0;
  auto clock = [&now, &profile] {
    return profile.epochMs + static_cast<std::int64_t>(std::llround(now * 1000.0));
  };
  PoolService pool(simulationPoolConfig(profile, spec),
                   Anonymizer::fromSeed(deriveSeed(profile.seed, 3)), clock);

  const std::size_t n = sampleParticipantCount(profile, rng);
  std::vector<std::uint64_t> quotas = contributionQuotas(n, profile.zipfExponent, profile.topQuota);
  rng.shuffle(std::span<std::uint64_t>(quotas));

  SimulationReport report;
  report.participants.resize(n);
  std::vector<std::unique_ptr<Island>> islands(n);
  std::vector<std::unique_ptr<ServiceTransport>> transports(n);

  // (time, sequence, participant); the sequence number breaks time ties.
  using Event = std::tuple<double, std::uint64_t, std::size_t>;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  std::uint64_t sequence = 0;

  for (std::size_t i = 0; i < n; ++i) {
    auto& p = report.participants[i];
    p.address = "172.16." + std::to_string(i / 256) + "." + std::to_string(i % 256);
    p.islandSeed = participantSeed(profile, i);
    p.quota = quotas[i];
    p.joinedAt = rng.uniform() * profile.joinSpreadSeconds;
    queue.emplace(p.joinedAt, sequence++, i);
  }

  while (!queue.empty()) {
    const auto [time, seq, i] = queue.top();
    queue.pop();
    now = time;
    report.totalVirtualDuration = now;
    auto& p = report.participants[i];

    if (!islands[i]) {
      islands[i] = std::make_unique<Island>(params, spec, p.islandSeed);
      transports[i] = std::make_unique<ServiceTransport>(pool, p.address);
      queue.emplace(now + sampleCycleInterval(profile.interval, rng), sequence++, i);
      continue;
    }

    Island& island = *islands[i];
    do {
      island.advance(*transports[i]);
    } while (island.generation() % params.migrationPeriod != 0 && !island.finished());
    if (island.generation() % params.migrationPeriod == 0) ++p.cycles;
    p.generations = island.generation();

    if (island.solved()) {
      p.solved = true;
      p.leftAt = now;
      report.solvedAtVirtualTime = now;
      break;
    }
    if (p.cycles >= p.quota || island.finished()) {
      p.leftAt = now;
      continue;
    }
    queue.emplace(now + sampleCycleInterval(profile.interval, rng), sequence++, i);
  }

  report.syntheticLog = pool.log();
  for (auto& p : report.participants) p.clientId = pool.clientIdFor(p.address);
  for (const auto& e : report.syntheticLog) {
    if (e.op == Op::Put) ++report.perClientPuts[e.clientId];
  }
  return report;
}

}  // namespace poolea
