#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tnsim/corpus.hpp"
#include "tnsim/rng.hpp"

namespace tnsim::hawkes {

/// Background rate in events/hour, indexed (weekday 0=Monday, hour 0-23).
using PeriodicBaseline = Eigen::Matrix<double, 7, 24, Eigen::RowMajor>;

/// Multivariate Hawkes process with a weekly periodic baseline and the
/// exponential kernel phi_ij(u) = alpha_ij * beta * exp(-beta u), u > 0.
/// Intensities are in events/hour; beta is stored per hour.
struct HawkesModel {
  std::vector<std::string> agents;  // name of each agent index
  std::vector<PeriodicBaseline> baselines;
  Eigen::MatrixXd alpha;  // row i: influence of each sender j on agent i
  double beta_per_hour = 1.0;
  bool diagonal_only = true;

  Eigen::Index dimension() const { return static_cast<Eigen::Index>(baselines.size()); }
  double baseline(AgentIndex agent, Timestamp t) const {
    return baselines[agent](weekday(t), hour_of_day(t));
  }
  /// True when some agent's total excitation is supercritical (row sum >= 1).
  bool stability_warning() const;
  /// Throws InputError when an invariant is violated.
  void validate() const;

  /// D agents, constant baseline `rate`, alpha = diag(self_excitation).
  static HawkesModel constant(std::vector<std::string> agents, double rate, double self_excitation,
                              double beta_per_hour);
};

/// Excitation carried forward in closed form. After record(j, t) the level
/// of agent i holds sum_k alpha_ij * beta * exp(-beta (now - t_k)), i.e. the
/// right limit of the self-exciting part of lambda_i.
class ExcitationState {
 public:
  ExcitationState(const HawkesModel& model, Timestamp origin);

  Timestamp time() const { return time_; }
  /// Decays all levels to t (t >= time()).
  void advance_to(Timestamp t);
  /// An event by `sender` at t >= time().
  void record(AgentIndex sender, Timestamp t);
  /// Replays every event of `log` with timestamp < before.
  void replay(const EventLog& log, Timestamp before);

  double level(AgentIndex agent) const { return level_(agent); }
  /// Excitation of `agent` `seconds_after` time(), events/hour.
  double level_after(AgentIndex agent, double seconds_after) const;

 private:
  const HawkesModel* model_;
  Timestamp time_;
  Eigen::VectorXd level_;
};

/// lambda_agent(t) in events/hour, summing every history event strictly
/// before t (naive O(n) evaluation).
double intensity(const HawkesModel& model, AgentIndex agent, Timestamp t, const EventLog& history);

/// Closed-form integral over [t0, t1) of the self-exciting part of
/// lambda_agent, in expected events.
double excitation_integral(const HawkesModel& model, AgentIndex agent, const EventLog& history,
                           Timestamp t0, Timestamp t1);

/// Hours of [t0, t1) falling in each (weekday, hour) bin.
PeriodicBaseline exposure_hours(Timestamp t0, Timestamp t1);

/// Point-process log-likelihood over [t0, t1): for every agent, the sum of
/// log-intensities at its own events in the window minus the compensator.
/// Events before t0 contribute excitation only. Throws ComputationError if
/// some event has a nonpositive intensity.
double log_likelihood(const HawkesModel& model, const EventLog& log, Timestamp t0, Timestamp t1);

struct FitConfig {
  bool diagonal_only = true;
  std::optional<double> beta_override_per_hour;
  int max_iters = 500;
  double tolerance = 1e-6;
  double baseline_floor = 1e-6;  // events/hour
};

struct FitResult {
  HawkesModel model;
  double log_likelihood = 0;
  int iterations = 0;
  bool converged = false;
  /// Total log-likelihood after initialization and after every accepted step.
  std::vector<double> trace;
};

/// beta = 1 / median positive gap between consecutive events of the same
/// sender, gaps pooled over all senders, in 1/hour.
double calibrate_beta_per_hour(const EventLog& log, Timestamp t0, Timestamp t1);

/// Maximum-likelihood fit over the window by projected ascent with a
/// backtracking line search. Agents without events in the window keep
/// floor baselines and a zero alpha row.
FitResult fit(const EventLog& log, Timestamp t0, Timestamp t1, const FitConfig& config = {});

/// Ogata thinning for one agent from `state` (taken at t_now, including
/// events at t_now). Returns the first accepted time in (t_now, horizon].
std::optional<Timestamp> sample_next_activation(const HawkesModel& model, AgentIndex agent,
                                                const ExcitationState& state, Timestamp t_now,
                                                Timestamp horizon, Rng& rng);

/// Same, building the state from every history event at or before t_now.
std::optional<Timestamp> sample_next_activation(const HawkesModel& model, AgentIndex agent,
                                                const EventLog& history, Timestamp t_now,
                                                Timestamp horizon, Rng& rng);

struct SampledEvent {
  Timestamp time = 0;
  AgentIndex agent = 0;
};

/// Thinning over the superposition of the eligible agents' intensities.
std::optional<SampledEvent> sample_next_event(const HawkesModel& model,
                                              std::span<const AgentIndex> eligible,
                                              const ExcitationState& state, Timestamp t_now,
                                              Timestamp horizon, Rng& rng);

/// Normalized recipient frequencies of each sender, by agent index.
struct ContactTable {
  std::vector<std::vector<std::pair<AgentIndex, double>>> rows;

  static ContactTable from_log(const EventLog& log);
  bool has_contacts(AgentIndex agent) const {
    return agent < rows.size() && !rows[agent].empty();
  }
  /// Draws from the row of `agent`; requires has_contacts(agent).
  AgentIndex draw(AgentIndex agent, Rng& rng) const;
};

struct PureHawkesResult {
  EventLog log;
  std::size_t uniform_fallbacks = 0;  // senders without historical contacts
};

/// Statistical baseline: trigger events are copied at their timestamps and
/// excite the process; every other agent emits organic single-recipient
/// events by thinning over [t0, t1), recipients drawn from its contacts.
PureHawkesResult simulate_pure_hawkes(const HawkesModel& model, Timestamp t0, Timestamp t1,
                                      const EventLog& trigger_events,
                                      std::span<const AgentIndex> trigger_agents,
                                      const EventLog& history, const ContactTable& contacts,
                                      std::uint64_t seed);

std::string model_to_json(const HawkesModel& model);
HawkesModel model_from_json(const std::string& text);

}  // namespace tnsim::hawkes
