#include "tnsim/hawkes.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Cholesky>
#include <json.hpp>

#include "tnsim/errors.hpp"

namespace tnsim::hawkes {
namespace {

constexpr double kHour = static_cast<double>(kSecondsPerHour);

double hours_between(Timestamp from, Timestamp to) { return static_cast<double>(to - from) / kHour; }

}  // namespace

// ---------------------------------------------------------------------------
// Model

bool HawkesModel::stability_warning() const {
  for (Eigen::Index i = 0; i < alpha.rows(); ++i) {
    if (alpha.row(i).sum() >= 1.0) return true;
  }
  return false;
}

void HawkesModel::validate() const {
  const auto d = dimension();
  if (static_cast<Eigen::Index>(agents.size()) != d) throw InputError("model: agent list size mismatch");
  if (alpha.rows() != d || alpha.cols() != d) throw InputError("model: alpha must be D x D");
  if (!(beta_per_hour > 0) || !std::isfinite(beta_per_hour)) throw InputError("model: beta must be positive");
  for (const auto& b : baselines) {
    if (!b.allFinite() || (b.array() < 0).any()) throw InputError("model: baseline entries must be finite and >= 0");
  }
  if (!alpha.allFinite() || (alpha.array() < 0).any()) throw InputError("model: alpha must be finite and >= 0");
  if (diagonal_only) {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        if (i != j && alpha(i, j) != 0.0) throw InputError("model: diagonal_only with off-diagonal alpha");
      }
    }
  }
}

HawkesModel HawkesModel::constant(std::vector<std::string> agents, double rate, double self_excitation,
                                  double beta_per_hour) {
  HawkesModel m;
  const auto d = static_cast<Eigen::Index>(agents.size());
  m.agents = std::move(agents);
  m.baselines.assign(static_cast<std::size_t>(d), PeriodicBaseline::Constant(rate));
  m.alpha = Eigen::MatrixXd::Identity(d, d) * self_excitation;
  m.beta_per_hour = beta_per_hour;
  m.diagonal_only = true;
  return m;
}

// ---------------------------------------------------------------------------
// Excitation

ExcitationState::ExcitationState(const HawkesModel& model, Timestamp origin)
    : model_(&model), time_(origin), level_(Eigen::VectorXd::Zero(model.dimension())) {}

void ExcitationState::advance_to(Timestamp t) {
  assert(t >= time_);
  if (t == time_) return;
  level_ *= std::exp(-model_->beta_per_hour * hours_between(time_, t));
  time_ = t;
}

void ExcitationState::record(AgentIndex sender, Timestamp t) {
  advance_to(t);
  if (model_->diagonal_only) {
    level_(sender) += model_->alpha(sender, sender) * model_->beta_per_hour;
  } else {
    level_ += model_->alpha.col(sender) * model_->beta_per_hour;
  }
}

void ExcitationState::replay(const EventLog& log, Timestamp before) {
  for (const Event& e : log) {
    if (e.timestamp >= before) break;
    record(e.sender, e.timestamp);
  }
}

double ExcitationState::level_after(AgentIndex agent, double seconds_after) const {
  return level_(agent) * std::exp(-model_->beta_per_hour * seconds_after / kHour);
}

double intensity(const HawkesModel& model, AgentIndex agent, Timestamp t, const EventLog& history) {
  if (static_cast<Eigen::Index>(agent) >= model.dimension()) throw InputError("intensity: agent not in model");
  double lambda = model.baseline(agent, t);
  for (const Event& e : history) {
    if (e.timestamp >= t) break;
    lambda += model.alpha(agent, e.sender) * model.beta_per_hour *
              std::exp(-model.beta_per_hour * hours_between(e.timestamp, t));
  }
  return lambda;
}

double excitation_integral(const HawkesModel& model, AgentIndex agent, const EventLog& history,
                           Timestamp t0, Timestamp t1) {
  double total = 0;
  for (const Event& e : history) {
    if (e.timestamp >= t1) break;
    const double a = model.alpha(agent, e.sender);
    if (a == 0) continue;
    const double start = std::max<double>(0.0, hours_between(e.timestamp, t0));
    total += a * (std::exp(-model.beta_per_hour * start) -
                  std::exp(-model.beta_per_hour * hours_between(e.timestamp, t1)));
  }
  return total;
}

PeriodicBaseline exposure_hours(Timestamp t0, Timestamp t1) {
  PeriodicBaseline e = PeriodicBaseline::Zero();
  if (t1 <= t0) return e;
  const std::int64_t full_weeks = (t1 - t0) / kSecondsPerWeek;
  if (full_weeks > 0) {
    e.setConstant(static_cast<double>(full_weeks));
    t0 += full_weeks * kSecondsPerWeek;
  }
  for (std::int64_t h = hour_index(t0); h * kSecondsPerHour < t1; ++h) {
    const Timestamp lo = std::max(t0, h * kSecondsPerHour);
    const Timestamp hi = std::min(t1, (h + 1) * kSecondsPerHour);
    if (hi > lo) e(weekday(lo), hour_of_day(lo)) += hours_between(lo, hi);
  }
  return e;
}

double log_likelihood(const HawkesModel& model, const EventLog& log, Timestamp t0, Timestamp t1) {
  if (t1 <= t0) throw InputError("log_likelihood: empty window");
  const auto d = model.dimension();
  const Timestamp origin = log.empty() ? t0 : std::min(t0, log.events().front().timestamp);
  ExcitationState state(model, origin);
  double ll = 0;
  const auto events = log.events();
  for (std::size_t k = 0; k < events.size() && events[k].timestamp < t1;) {
    // Events sharing a timestamp do not excite each other.
    const Timestamp t = events[k].timestamp;
    std::size_t end = k;
    while (end < events.size() && events[end].timestamp == t) ++end;
    state.advance_to(t);
    if (t >= t0) {
      for (std::size_t m = k; m < end; ++m) {
        const AgentIndex i = events[m].sender;
        const double lambda = model.baseline(i, t) + state.level(i);
        if (!(lambda > 0)) {
          throw ComputationError("nonpositive intensity at event " + std::to_string(events[m].id) +
                                 "; raise the baseline floor");
        }
        ll += std::log(lambda);
      }
    }
    for (std::size_t m = k; m < end; ++m) state.record(events[m].sender, t);
    k = end;
  }
  const PeriodicBaseline exposure = exposure_hours(t0, t1);
  for (Eigen::Index i = 0; i < d; ++i) {
    ll -= model.baselines[static_cast<std::size_t>(i)].cwiseProduct(exposure).sum();
    ll -= excitation_integral(model, static_cast<AgentIndex>(i), log, t0, t1);
  }
  return ll;
}

// ---------------------------------------------------------------------------
// Fitting

double calibrate_beta_per_hour(const EventLog& log, Timestamp t0, Timestamp t1) {
  std::map<AgentIndex, Timestamp> last;
  std::vector<double> gaps;
  for (const Event& e : log) {
    if (e.timestamp < t0 || e.timestamp >= t1) continue;
    auto [it, fresh] = last.try_emplace(e.sender, e.timestamp);
    if (!fresh) {
      if (e.timestamp > it->second) gaps.push_back(static_cast<double>(e.timestamp - it->second));
      it->second = e.timestamp;
    }
  }
  if (gaps.empty()) throw InputError("cannot calibrate beta: no positive inter-event gaps in window");
  return kHour / median(std::move(gaps));
}

namespace {

// Per-agent maximum-likelihood subproblem. Variables are the baseline bins
// in which the agent has events, followed by the alpha entries for the
// exciting senders in `sources`. Bins without events sit at the floor,
// which is where their (strictly decreasing) objective peaks.
struct AgentProblem {
  AgentIndex agent = 0;
  std::vector<int> bins;          // (weekday*24 + hour) of each active bin
  std::vector<double> exposure;   // hours per active bin
  std::vector<int> event_bin;     // active-bin position of each event
  Eigen::MatrixXd excitation;     // events x sources, unit-alpha excitation
  std::vector<AgentIndex> sources;
  Eigen::VectorXd compensator;    // per source, unit-alpha integral
  double constant = 0;            // floor bins' compensator (already negated)

  Eigen::Index n_bins() const { return static_cast<Eigen::Index>(bins.size()); }
  Eigen::Index n_vars() const { return n_bins() + static_cast<Eigen::Index>(sources.size()); }

  // Fills lambda; returns -inf if some intensity is not positive.
  double value(const Eigen::VectorXd& theta, Eigen::VectorXd& lambda) const {
    const auto nb = n_bins();
    lambda = excitation * theta.tail(theta.size() - nb);
    double ll = constant;
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      lambda(k) += theta(event_bin[static_cast<std::size_t>(k)]);
      if (!(lambda(k) > 0)) return -std::numeric_limits<double>::infinity();
      ll += std::log(lambda(k));
    }
    for (Eigen::Index b = 0; b < nb; ++b) ll -= theta(b) * exposure[static_cast<std::size_t>(b)];
    ll -= theta.tail(theta.size() - nb).dot(compensator);
    return ll;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& lambda) const {
    const auto nb = n_bins();
    Eigen::VectorXd g(n_vars());
    const Eigen::VectorXd inv = lambda.cwiseInverse();
    g.head(nb).setZero();
    for (Eigen::Index k = 0; k < inv.size(); ++k) g(event_bin[static_cast<std::size_t>(k)]) += inv(k);
    for (Eigen::Index b = 0; b < nb; ++b) g(b) -= exposure[static_cast<std::size_t>(b)];
    g.tail(n_vars() - nb) = excitation.transpose() * inv - compensator;
    return g;
  }

  // Negative Hessian: sum_k x_k x_k^T / lambda_k^2.
  Eigen::MatrixXd curvature(const Eigen::VectorXd& lambda) const {
    const auto nb = n_bins();
    const auto ns = n_vars() - nb;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n_vars(), n_vars());
    const Eigen::VectorXd w = lambda.cwiseInverse().cwiseAbs2();
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      const int b = event_bin[static_cast<std::size_t>(k)];
      h(b, b) += w(k);
      h.block(b, nb, 1, ns) += w(k) * excitation.row(k);
    }
    h.block(nb, nb, ns, ns) = excitation.transpose() * w.asDiagonal() * excitation;
    h.block(nb, 0, ns, nb) = h.block(0, nb, nb, ns).transpose();
    return h;
  }

  Eigen::VectorXd diagonal_curvature(const Eigen::VectorXd& lambda) const {
    const auto nb = n_bins();
    Eigen::VectorXd h = Eigen::VectorXd::Zero(n_vars());
    const Eigen::VectorXd w = lambda.cwiseInverse().cwiseAbs2();
    for (Eigen::Index k = 0; k < w.size(); ++k) h(event_bin[static_cast<std::size_t>(k)]) += w(k);
    h.tail(n_vars() - nb) = excitation.cwiseAbs2().transpose() * w;
    return h;
  }
};

struct AgentSolver {
  const AgentProblem* problem;
  Eigen::VectorXd theta;
  Eigen::VectorXd lower;
  Eigen::VectorXd lambda;
  double ll = 0;
  bool done = false;

  Eigen::VectorXd newton_direction(const Eigen::VectorXd& g) const {
    const auto n = problem->n_vars();
    std::vector<Eigen::Index> free;
    for (Eigen::Index v = 0; v < n; ++v) {
      if (theta(v) > lower(v) || g(v) > 0) free.push_back(v);
    }
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
    if (free.empty()) return dir;
    const Eigen::MatrixXd h = problem->curvature(lambda);
    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd hf(nf, nf);
    Eigen::VectorXd gf(nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
      gf(a) = g(free[static_cast<std::size_t>(a)]);
      for (Eigen::Index b = 0; b < nf; ++b) hf(a, b) = h(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
    }
    const double ridge = 1e-10 * std::max(1.0, hf.diagonal().maxCoeff());
    hf.diagonal().array() += ridge;
    const Eigen::VectorXd df = hf.ldlt().solve(gf);
    if (!df.allFinite()) return Eigen::VectorXd::Zero(n);
    for (Eigen::Index a = 0; a < nf; ++a) dir(free[static_cast<std::size_t>(a)]) = df(a);
    return dir;
  }

  Eigen::VectorXd scaled_gradient(const Eigen::VectorXd& g) const {
    const Eigen::VectorXd h = problem->diagonal_curvature(lambda);
    Eigen::VectorXd dir(g.size());
    for (Eigen::Index v = 0; v < g.size(); ++v) dir(v) = g(v) / std::max(h(v), 1e-12);
    return dir;
  }

  // Backtracking along the projected path theta(t) = max(lower, theta + t dir).
  bool line_search(const Eigen::VectorXd& dir, const Eigen::VectorXd& g) {
    Eigen::VectorXd trial_lambda;
    double step = 1.0;
    for (int k = 0; k < 60; ++k, step *= 0.5) {
      const Eigen::VectorXd trial = (theta + step * dir).cwiseMax(lower);
      const double gain = g.dot(trial - theta);
      if (!(gain > 0)) continue;
      const double v = problem->value(trial, trial_lambda);
      if (std::isnan(v)) throw ComputationError("non-finite log-likelihood during fit");
      if (v >= ll + 1e-4 * gain) {
        theta = trial;
        lambda = trial_lambda;
        ll = v;
        return true;
      }
    }
    return false;
  }

  // One accepted ascent step; returns false at a stationary point.
  bool step(bool use_newton) {
    const Eigen::VectorXd g = problem->gradient(lambda);
    if (use_newton && line_search(newton_direction(g), g)) return true;
    return line_search(scaled_gradient(g), g);
  }
};

std::vector<AgentProblem> build_problems(const EventLog& log, Timestamp t0, Timestamp t1,
                                         const HawkesModel& shape, const FitConfig& config) {
  const auto d = static_cast<std::size_t>(shape.dimension());
  const double beta = shape.beta_per_hour;
  const PeriodicBaseline exposure = exposure_hours(t0, t1);

  std::vector<char> sends(d, 0);
  std::vector<std::size_t> window_events(d, 0);
  for (const Event& e : log) {
    if (e.timestamp >= t1) break;
    sends[e.sender] = 1;
    if (e.timestamp >= t0) ++window_events[e.sender];
  }
  std::vector<AgentIndex> all_sources;
  for (std::size_t j = 0; j < d; ++j) {
    if (sends[j]) all_sources.push_back(static_cast<AgentIndex>(j));
  }

  std::vector<AgentProblem> problems;
  std::vector<int> problem_of(d, -1);
  for (std::size_t i = 0; i < d; ++i) {
    if (window_events[i] == 0) continue;
    AgentProblem p;
    p.agent = static_cast<AgentIndex>(i);
    if (config.diagonal_only) {
      p.sources = {p.agent};
    } else {
      p.sources = all_sources;
    }
    p.excitation = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(window_events[i]),
                                         static_cast<Eigen::Index>(p.sources.size()));
    problem_of[i] = static_cast<int>(problems.size());
    problems.push_back(std::move(p));
  }

  // Source column of each sender inside each problem (diagonal: only self).

  // Unit-alpha excitation levels of every source, strictly before each event.
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  Timestamp clock = log.empty() ? t0 : log.events().front().timestamp;
  std::vector<std::map<int, int>> bin_slot(problems.size());
  std::vector<Eigen::Index> row(problems.size(), 0);
  const auto events = log.events();
  for (std::size_t k = 0; k < events.size() && events[k].timestamp < t1;) {
    const Timestamp t = events[k].timestamp;
    std::size_t end = k;
    while (end < events.size() && events[end].timestamp == t) ++end;
    unit *= std::exp(-beta * hours_between(clock, t));
    clock = t;
    if (t >= t0) {
      for (std::size_t m = k; m < end; ++m) {
        const auto pi = problem_of[events[m].sender];
        AgentProblem& p = problems[static_cast<std::size_t>(pi)];
        const int bin = hour_of_week(t);
        auto [slot, fresh] = bin_slot[static_cast<std::size_t>(pi)].try_emplace(bin, static_cast<int>(p.bins.size()));
        if (fresh) {
          p.bins.push_back(bin);
          p.exposure.push_back(exposure(bin / 24, bin % 24));
        }
        p.event_bin.push_back(slot->second);
        auto& r = row[static_cast<std::size_t>(pi)];
        if (config.diagonal_only) {
          p.excitation(r, 0) = unit(p.agent);
        } else {
          for (std::size_t c = 0; c < all_sources.size(); ++c) {
            p.excitation(r, static_cast<Eigen::Index>(c)) = unit(all_sources[c]);
          }
        }
        ++r;
      }
    }
    for (std::size_t m = k; m < end; ++m) unit(events[m].sender) += beta;
    k = end;
  }

  // Compensator of the excitation per unit alpha, and the floor bins' mass.
  Eigen::VectorXd unit_integral = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (const Event& e : log) {
    if (e.timestamp >= t1) break;
    const double start = std::max<double>(0.0, hours_between(e.timestamp, t0));
    unit_integral(e.sender) += std::exp(-beta * start) - std::exp(-beta * hours_between(e.timestamp, t1));
  }
  for (auto& p : problems) {
    p.compensator.resize(static_cast<Eigen::Index>(p.sources.size()));
    for (std::size_t c = 0; c < p.sources.size(); ++c) {
      p.compensator(static_cast<Eigen::Index>(c)) = unit_integral(p.sources[c]);
    }
    double active_exposure = 0;
    for (double x : p.exposure) active_exposure += x;
    p.constant = -config.baseline_floor * (exposure.sum() - active_exposure);
  }
  return problems;
}

}  // namespace

FitResult fit(const EventLog& log, Timestamp t0, Timestamp t1, const FitConfig& config) {
  if (t1 <= t0) throw InputError("fit: empty window");
  if (config.max_iters <= 0 || !(config.tolerance > 0) || !(config.baseline_floor > 0)) {
    throw InputError("fit: max_iters, tolerance and baseline_floor must be positive");
  }
  std::size_t in_window = 0;
  for (const Event& e : log) in_window += (e.timestamp >= t0 && e.timestamp < t1);
  if (in_window < 2) throw InputError("fit: window needs at least 2 events");

  FitResult result;
  HawkesModel& model = result.model;
  const auto& reg = log.registry();
  const auto d = static_cast<Eigen::Index>(reg.index_bound());
  for (AgentIndex i = 0; i < reg.index_bound(); ++i) model.agents.push_back(reg.name(i));
  model.baselines.assign(static_cast<std::size_t>(d), PeriodicBaseline::Constant(config.baseline_floor));
  model.alpha = Eigen::MatrixXd::Zero(d, d);
  model.diagonal_only = config.diagonal_only;
  if (config.beta_override_per_hour) {
    if (!(*config.beta_override_per_hour > 0)) throw InputError("fit: beta override must be positive");
    model.beta_per_hour = *config.beta_override_per_hour;
  } else {
    model.beta_per_hour = calibrate_beta_per_hour(log, t0, t1);
  }

  const auto problems = build_problems(log, t0, t1, model, config);

  // Floor-only agents contribute a constant compensator.
  double idle_constant = 0;
  {
    std::vector<char> fitted(static_cast<std::size_t>(d), 0);
    for (const auto& p : problems) fitted[p.agent] = 1;
    const double week_mass = exposure_hours(t0, t1).sum() * config.baseline_floor;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (!fitted[static_cast<std::size_t>(i)]) idle_constant -= week_mass;
    }
  }

  std::vector<AgentSolver> solvers;
  solvers.reserve(problems.size());
  for (const auto& p : problems) {
    AgentSolver s;
    s.problem = &p;
    s.theta = Eigen::VectorXd::Zero(p.n_vars());
    s.lower = Eigen::VectorXd::Zero(p.n_vars());
    std::vector<double> counts(p.bins.size(), 0.0);
    for (int b : p.event_bin) counts[static_cast<std::size_t>(b)] += 1;
    for (Eigen::Index b = 0; b < p.n_bins(); ++b) {
      s.lower(b) = config.baseline_floor;
      s.theta(b) = std::max(config.baseline_floor, counts[static_cast<std::size_t>(b)] / p.exposure[static_cast<std::size_t>(b)]);
    }
    s.ll = p.value(s.theta, s.lambda);
    if (!std::isfinite(s.ll)) throw ComputationError("non-finite initial log-likelihood");
    solvers.push_back(std::move(s));
  }

  auto total = [&] {
    double sum = idle_constant;
    for (const auto& s : solvers) sum += s.ll;
    return sum;
  };
  result.trace.push_back(total());

  for (int iter = 0; iter < config.max_iters; ++iter) {
    bool any_active = false;
    for (auto& s : solvers) {
      if (s.done) continue;
      const double before = s.ll;
      const auto nv = s.problem->n_vars();
      const bool newton = nv <= 400 && static_cast<double>(s.problem->event_bin.size()) * nv * nv <= 5e7;
      if (!s.step(newton) || std::abs(s.ll - before) <= config.tolerance * std::max(1.0, std::abs(before))) {
        s.done = true;
      } else {
        any_active = true;
      }
    }
    result.iterations = iter + 1;
    result.trace.push_back(total());
    if (!any_active) {
      result.converged = true;
      break;
    }
  }

  for (const auto& s : solvers) {
    const AgentProblem& p = *s.problem;
    auto& base = model.baselines[p.agent];
    for (Eigen::Index b = 0; b < p.n_bins(); ++b) {
      const int bin = p.bins[static_cast<std::size_t>(b)];
      base(bin / 24, bin % 24) = s.theta(b);
    }
    for (std::size_t c = 0; c < p.sources.size(); ++c) {
      model.alpha(p.agent, p.sources[c]) = s.theta(p.n_bins() + static_cast<Eigen::Index>(c));
    }
  }
  result.log_likelihood = result.trace.back();
  return result;
}

// ---------------------------------------------------------------------------
// Thinning

std::optional<SampledEvent> sample_next_event(const HawkesModel& model,
                                              std::span<const AgentIndex> eligible,
                                              const ExcitationState& state, Timestamp t_now,
                                              Timestamp horizon, Rng& rng) {
  if (t_now >= horizon || eligible.empty()) return std::nullopt;
  assert(t_now >= state.time());
  const double lag = static_cast<double>(t_now - state.time());
  const double span = static_cast<double>(horizon - t_now);
  std::vector<double> mu(eligible.size());

  auto excitation_at = [&](double s) {
    double total = 0;
    for (AgentIndex a : eligible) total += state.level_after(a, lag + s);
    return total;
  };

  // s counts seconds after t_now; each segment lies inside one hour bin, so
  // the baseline is constant there and the excitation only decays.
  double s = 0;
  for (std::int64_t hour = hour_index(t_now);; ++hour) {
    const double seg_end = std::min(static_cast<double>((hour + 1) * kSecondsPerHour - t_now), span);
    const Timestamp bin_time = hour * kSecondsPerHour;
    double mu_total = 0;
    for (std::size_t k = 0; k < eligible.size(); ++k) {
      mu[k] = model.baseline(eligible[k], bin_time);
      mu_total += mu[k];
    }
    double bound = mu_total + excitation_at(s);
    while (bound > 0) {
      s += rng.exponential(bound) * kHour;
      if (s > seg_end) break;
      const double u = rng.uniform() * bound;
      double cumulative = 0;
      for (std::size_t k = 0; k < eligible.size(); ++k) {
        cumulative += mu[k] + state.level_after(eligible[k], lag + s);
        if (u < cumulative) {
          assert(cumulative <= bound * (1 + 1e-9) + 1e-300);
          return SampledEvent{t_now + static_cast<Timestamp>(std::ceil(s)), eligible[k]};
        }
      }
      assert(cumulative <= bound * (1 + 1e-9) + 1e-300);
      bound = mu_total + excitation_at(s);
    }
    if (seg_end >= span) return std::nullopt;
    s = seg_end;
  }
}

std::optional<Timestamp> sample_next_activation(const HawkesModel& model, AgentIndex agent,
                                                const ExcitationState& state, Timestamp t_now,
                                                Timestamp horizon, Rng& rng) {
  const AgentIndex one[] = {agent};
  if (auto e = sample_next_event(model, one, state, t_now, horizon, rng)) return e->time;
  return std::nullopt;
}

std::optional<Timestamp> sample_next_activation(const HawkesModel& model, AgentIndex agent,
                                                const EventLog& history, Timestamp t_now,
                                                Timestamp horizon, Rng& rng) {
  const Timestamp origin = history.empty() ? t_now : std::min(t_now, history.events().front().timestamp);
  ExcitationState state(model, origin);
  state.replay(history, t_now + 1);
  state.advance_to(t_now);
  return sample_next_activation(model, agent, state, t_now, horizon, rng);
}

// ---------------------------------------------------------------------------
// Pure Hawkes baseline

ContactTable ContactTable::from_log(const EventLog& log) {
  ContactTable table;
  table.rows.resize(log.registry().index_bound());
  std::vector<std::map<AgentIndex, double>> counts(table.rows.size());
  for (const Edge& e : expand_edges(log)) counts[e.src][e.dst] += 1;
  for (std::size_t a = 0; a < counts.size(); ++a) {
    double total = 0;
    for (const auto& [r, n] : counts[a]) total += n;
    for (const auto& [r, n] : counts[a]) table.rows[a].emplace_back(r, n / total);
  }
  return table;
}

AgentIndex ContactTable::draw(AgentIndex agent, Rng& rng) const {
  const auto& row = rows[agent];
  const double u = rng.uniform();
  double cumulative = 0;
  for (const auto& [r, p] : row) {
    cumulative += p;
    if (u < cumulative) return r;
  }
  return row.back().first;
}

PureHawkesResult simulate_pure_hawkes(const HawkesModel& model, Timestamp t0, Timestamp t1,
                                      const EventLog& trigger_events,
                                      std::span<const AgentIndex> trigger_agents,
                                      const EventLog& history, const ContactTable& contacts,
                                      std::uint64_t seed) {
  if (t1 <= t0) throw InputError("simulate_pure_hawkes: empty window");
  model.validate();
  const auto& reg = history.registry();
  if (model.dimension() < static_cast<Eigen::Index>(reg.index_bound())) {
    throw InputError("simulate_pure_hawkes: model has fewer agents than the registry");
  }

  std::vector<AgentIndex> eligible;
  for (const auto& a : reg.agents()) {
    if (std::find(trigger_agents.begin(), trigger_agents.end(), a.index) == trigger_agents.end()) {
      eligible.push_back(a.index);
    }
  }
  std::vector<AgentIndex> everyone;
  for (const auto& a : reg.agents()) everyone.push_back(a.index);

  std::uint64_t next_id = 0;
  for (const Event& e : history) next_id = std::max(next_id, e.id + 1);
  for (const Event& e : trigger_events) next_id = std::max(next_id, e.id + 1);

  const Timestamp origin = history.empty() ? t0 - 1 : std::min(t0 - 1, history.events().front().timestamp);
  ExcitationState state(model, origin);
  state.replay(history, t0);

  std::vector<Event> triggers;
  for (const Event& e : trigger_events) {
    if (e.timestamp >= t0 && e.timestamp < t1) triggers.push_back(e);
  }

  Rng rng(seed, "pure-hawkes");
  Rng recipient_rng(seed, "pure-hawkes-recipients");
  PureHawkesResult result;
  std::vector<Event> out;
  Timestamp t_now = t0 - 1;
  std::size_t next_trigger = 0;
  for (;;) {
    const bool have_trigger = next_trigger < triggers.size();
    const Timestamp horizon = have_trigger ? std::min(triggers[next_trigger].timestamp, t1 - 1) : t1 - 1;
    if (t_now < horizon) {
      if (auto ev = sample_next_event(model, eligible, state, t_now, horizon, rng)) {
        Event e;
        e.id = next_id++;
        e.sender = ev->agent;
        e.timestamp = ev->time;
        if (contacts.has_contacts(ev->agent)) {
          e.recipients = {contacts.draw(ev->agent, recipient_rng)};
        } else {
          ++result.uniform_fallbacks;
          if (everyone.size() < 2) throw ComputationError("no possible recipient for agent " + reg.name(ev->agent));
          AgentIndex r;
          do {
            r = everyone[recipient_rng.below(everyone.size())];
          } while (r == ev->agent);
          e.recipients = {r};
        }
        e.thread = static_cast<std::int64_t>(e.id);
        state.record(e.sender, e.timestamp);
        t_now = e.timestamp;
        out.push_back(std::move(e));
        continue;
      }
    }
    if (!have_trigger) break;
    const Timestamp t = triggers[next_trigger].timestamp;
    while (next_trigger < triggers.size() && triggers[next_trigger].timestamp == t) {
      Event e = triggers[next_trigger++];
      e.kind = EventKind::trigger;
      state.record(e.sender, t);
      out.push_back(std::move(e));
    }
    t_now = std::max(t_now, t);
  }
  result.log = EventLog(reg, std::move(out));
  return result;
}

// ---------------------------------------------------------------------------
// Serialization

std::string model_to_json(const HawkesModel& model) {
  nlohmann::ordered_json j;
  j["agents"] = model.agents;
  auto& bases = j["baselines"] = nlohmann::ordered_json::array();
  for (const auto& b : model.baselines) {
    std::vector<double> flat(b.data(), b.data() + b.size());
    bases.push_back(flat);
  }
  if (model.diagonal_only) {
    std::vector<double> diag(static_cast<std::size_t>(model.dimension()));
    for (Eigen::Index i = 0; i < model.dimension(); ++i) diag[static_cast<std::size_t>(i)] = model.alpha(i, i);
    j["alpha"] = {{"diag", diag}};
  } else {
    auto& rows = j["alpha"] = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < model.dimension(); ++i) {
      std::vector<double> r(static_cast<std::size_t>(model.dimension()));
      for (Eigen::Index c = 0; c < model.dimension(); ++c) r[static_cast<std::size_t>(c)] = model.alpha(i, c);
      rows.push_back(r);
    }
  }
  j["beta_per_hour"] = model.beta_per_hour;
  j["diagonal_only"] = model.diagonal_only;
  return j.dump(2);
}

HawkesModel model_from_json(const std::string& text) {
  HawkesModel m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.agents = j.at("agents").get<std::vector<std::string>>();
    const auto d = static_cast<Eigen::Index>(m.agents.size());
    for (const auto& b : j.at("baselines")) {
      PeriodicBaseline base;
      std::vector<double> flat;
      if (!b.empty() && b.front().is_array()) {
        for (const auto& r : b) for (double x : r.get<std::vector<double>>()) flat.push_back(x);
      } else {
        flat = b.get<std::vector<double>>();
      }
      if (flat.size() != 168) throw InputError("model: each baseline needs 7x24 values");
      std::copy(flat.begin(), flat.end(), base.data());
      m.baselines.push_back(base);
    }
    m.alpha = Eigen::MatrixXd::Zero(d, d);
    const auto& a = j.at("alpha");
    if (a.is_object()) {
      const auto diag = a.at("diag").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(diag.size()) != d) throw InputError("model: alpha.diag size mismatch");
      for (Eigen::Index i = 0; i < d; ++i) m.alpha(i, i) = diag[static_cast<std::size_t>(i)];
    } else {
      if (static_cast<Eigen::Index>(a.size()) != d) throw InputError("model: alpha row count mismatch");
      for (Eigen::Index i = 0; i < d; ++i) {
        const auto r = a[static_cast<std::size_t>(i)].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(r.size()) != d) throw InputError("model: alpha column count mismatch");
        for (Eigen::Index c = 0; c < d; ++c) m.alpha(i, c) = r[static_cast<std::size_t>(c)];
      }
    }
    m.beta_per_hour = j.at("beta_per_hour").get<double>();
    m.diagonal_only = j.at("diagonal_only").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model JSON: ") + e.what());
  }
  m.validate();
  return m;
}

}  // namespace tnsim::hawkes
