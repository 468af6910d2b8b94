#include "sfqgate/ramp_optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <thread>

namespace sfq {

namespace {

constexpr double kClampMargin = 1e-6; // ns

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, int kind, int n, int r, int round) {
    std::uint64_t h = splitmix64(seed);
    for (int v : {kind, n, r, round}) h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
    return h;
}

// Indices of a deterministic subsample of size `budget` that always keeps index `keep`.
std::vector<std::size_t> subsample(std::size_t size, int budget, std::size_t keep, std::uint64_t seed) {
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    if (budget <= 0 || size <= static_cast<std::size_t>(budget)) return idx;
    std::swap(idx[0], idx[keep]);
    std::uint64_t state = seed;
    // Partial Fisher-Yates over positions 1..size-1.
    for (std::size_t i = 1; i < static_cast<std::size_t>(budget); ++i) {
        state = splitmix64(state);
        const std::size_t j = i + static_cast<std::size_t>(state % (size - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(static_cast<std::size_t>(budget));
    std::sort(idx.begin(), idx.end());
    return idx;
}

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
}

struct Trial {
    bool ok = false;
    double f = std::numeric_limits<double>::infinity();
    RealVector x;
};

// Runs BFGS from every start and returns the best trial (lowest f, earliest on ties).
Trial best_of(const RampProblem& problem, int r, const std::vector<std::vector<double>>& starts,
              const OptimizerSettings& settings) {
    std::vector<Trial> trials(starts.size());
    const numerics::Objective objective = [&problem, r](const RealVector& x) {
        return problem.cost(std::vector<double>(x.data(), x.data() + x.size()), r);
    };
    parallel_for(starts.size(), settings.threads, [&](std::size_t i) {
        try {
            const RealVector x0 = Eigen::Map<const RealVector>(starts[i].data(), static_cast<Eigen::Index>(starts[i].size()));
            const auto res = numerics::minimize(objective, x0, settings.minimizer);
            if (std::isfinite(res.f)) trials[i] = {true, res.f, res.x};
        } catch (const std::exception&) {
            trials[i].ok = false;
        }
    });
    Trial best;
    for (auto& t : trials) {
        if (t.ok && t.f < best.f) best = std::move(t);
    }
    return best;
}

// Minimizer step sizes in OptimizerSettings are given in qubit periods.
OptimizerSettings in_time_units(OptimizerSettings settings, double period) {
    settings.minimizer.gradient_step *= period;
    settings.minimizer.initial_step *= period;
    return settings;
}

} // namespace

void GateSpec::validate() const {
    if (!(theta_kick > 0.0)) throw DomainError("gate.theta_kick must be positive");
    if (!(theta_targ > 0.0 && theta_targ <= 2.0 * std::numbers::pi + 1e-12)) {
        throw DomainError("gate.theta_targ must lie in (0, 2*pi]");
    }
    if (clock_multiples.empty()) throw DomainError("gate.clocks must list at least one clock multiple");
    for (int m : clock_multiples) {
        if (m < 1) throw DomainError("gate.clocks entries must be positive");
    }
    if (n_min < 1 || n_max < n_min || n_max > kMaxRampPulses) {
        throw DomainError("gate pulse range must satisfy 1 <= n_min <= n_max <= 6");
    }
    if (r_min < 1 || r_max < r_min) throw DomainError("gate ramp range must satisfy 1 <= r_min <= r_max");
}

int GateSpec::train_search_limit() const {
    return static_cast<int>(std::ceil(theta_targ / theta_kick - 1e-9)) + 4;
}

GateSpec GateSpec::defaults_for(Coupling coupling) {
    GateSpec spec;
    spec.coupling = coupling;
    spec.theta_kick = coupling == Coupling::inductive ? 0.15 : 0.03;
    return spec;
}

RampProblem::RampProblem(const QubitModel& model, GateSpec spec)
    : model_(model), spec_(std::move(spec)), scanner_(model_, spec_.coupling, spec_.theta_kick, spec_.theta_targ) {
    spec_.validate();
}

std::vector<double> RampProblem::clamp(std::vector<double> times, int r_periods) const {
    const double upper = r_periods * model_.period - kClampMargin;
    for (double& t : times) {
        if (std::isnan(t)) t = 0.0;
        t = std::clamp(t, 0.0, upper);
    }
    std::sort(times.begin(), times.end());
    return times;
}

TrainChoice RampProblem::best_train_length(const std::vector<double>& ramp_times, int r_periods) const {
    const auto infidelities = scanner_.scan(ramp_times, r_periods, spec_.train_search_limit());
    TrainChoice best{1, std::numeric_limits<double>::infinity()};
    for (std::size_t k = 0; k < infidelities.size(); ++k) {
        if (infidelities[k] < best.infidelity) best = {static_cast<int>(k) + 1, infidelities[k]};
    }
    return best;
}

double RampProblem::cost(const std::vector<double>& times, int r_periods) const {
    return best_train_length(clamp(times, r_periods), r_periods).infidelity;
}

TrainChoice best_train_length(const Ramp& ramp, const GateSpec& spec, const QubitModel& model) {
    ramp.validate(model.period);
    return RampProblem(model, spec).best_train_length(ramp.times, ramp.r_periods);
}

double cost(const std::vector<double>& times, int n, int r, const GateSpec& spec, const QubitModel& model) {
    if (static_cast<int>(times.size()) != n) throw DomainError("cost: expected one time per ramp pulse");
    return RampProblem(model, spec).cost(times, r);
}

std::vector<std::vector<double>> initial_conditions(Coupling coupling, int n, int r, double period,
                                                    const RampResult* prev) {
    if (n < 1 || r < 1) throw DomainError("initial_conditions: n and r must be at least 1");
    std::vector<double> pool;
    for (int k = 0; k < r; ++k) {
        if (coupling == Coupling::capacitive) {
            pool.push_back(k * period + period / 4.0);
        } else {
            pool.push_back(k * period + period / 20.0);
            pool.push_back(k * period + period / 4.0);
            pool.push_back(k * period + 3.0 * period / 4.0);
        }
    }
    if (static_cast<int>(pool.size()) < n) {
        for (int k = 1; k <= n; ++k) pool.push_back(k * (r * period) / (n + 1));
    }
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

    std::vector<std::vector<double>> out;
    std::set<std::vector<double>> seen;
    auto add = [&](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        if (seen.insert(v).second) out.push_back(std::move(v));
    };

    if (prev != nullptr && static_cast<int>(prev->times_continuous.size()) == n - 1 && !prev->failed) {
        std::vector<double> warm = prev->times_continuous;
        warm.push_back((r - 1) * period);
        add(std::move(warm));
    }

    // Multisets of size n drawn from the pool, as nondecreasing index tuples.
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    const std::size_t m = pool.size();
    while (true) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < idx.size(); ++i) v[i] = pool[idx[i]];
        add(std::move(v));
        int pos = n - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - 1) --pos;
        if (pos < 0) break;
        const std::size_t next = idx[static_cast<std::size_t>(pos)] + 1;
        for (std::size_t i = static_cast<std::size_t>(pos); i < idx.size(); ++i) idx[i] = next;
    }
    return out;
}

RampResult neighborhood_refine(const RampProblem& problem, RampResult incumbent, const OptimizerSettings& settings) {
    if (incumbent.failed || incumbent.times_continuous.empty()) return incumbent;
    const int n = static_cast<int>(incumbent.times_continuous.size());
    const int r = incumbent.r_periods;
    const double jump = problem.period() / 6.0;
    std::size_t combos = 1;
    for (int i = 0; i < n; ++i) combos *= 3;

    for (int round = 0; round < settings.refine_max_rounds; ++round) {
        const auto picks = subsample(combos, settings.trial_budget, 0, stream_seed(settings.seed, 2, n, r, round));
        std::vector<std::vector<double>> starts;
        starts.reserve(picks.size());
        for (std::size_t code : picks) {
            std::vector<double> start = incumbent.times_continuous;
            for (int i = 0; i < n; ++i, code /= 3) {
                const int digit = static_cast<int>(code % 3);
                if (digit == 1) start[static_cast<std::size_t>(i)] -= jump;
                if (digit == 2) start[static_cast<std::size_t>(i)] += jump;
            }
            starts.push_back(std::move(start));
        }
        incumbent.trials += static_cast<int>(starts.size());
        const Trial best = best_of(problem, r, starts, in_time_units(settings, problem.period()));
        if (!best.ok || !(best.f < incumbent.infidelity_continuous - settings.refine_tolerance)) break;

        incumbent.times_continuous = problem.clamp(std::vector<double>(best.x.data(), best.x.data() + best.x.size()), r);
        const auto choice = problem.best_train_length(incumbent.times_continuous, r);
        incumbent.n_train = choice.n_train;
        incumbent.infidelity_continuous = choice.infidelity;
    }
    return incumbent;
}

void snap_result(const RampProblem& problem, RampResult& result) {
    result.snapped.clear();
    if (result.failed) return;
    const double period = problem.period();
    const Ramp ramp = Ramp::make(result.r_periods, result.times_continuous, period);
    for (int multiple : problem.spec().clock_multiples) {
        SnappedCell cell;
        const auto outcome = snap_to_clock(ramp, ClockGrid::make(multiple, period));
        if (const auto* snapped = std::get_if<SnappedRamp>(&outcome)) {
            const auto choice = problem.best_train_length(snapped->to_ramp(period).times, result.r_periods);
            cell.ramp = *snapped;
            cell.n_train = choice.n_train;
            cell.infidelity = choice.infidelity;
        } else {
            cell.discarded = std::get<DiscardReason>(outcome);
        }
        result.snapped[multiple] = cell;
    }
}

RampResult optimize_ramp(const RampProblem& problem, int n, int r, const RampResult* prev,
                         const OptimizerSettings& settings) {
    RampResult result;
    result.n_pulses = n;
    result.r_periods = r;
    const double period = problem.period();

    auto starts = initial_conditions(problem.spec().coupling, n, r, period, prev);
    const auto picks = subsample(starts.size(), settings.trial_budget, 0, stream_seed(settings.seed, 1, n, r, 0));
    std::vector<std::vector<double>> chosen;
    chosen.reserve(picks.size());
    for (std::size_t i : picks) chosen.push_back(std::move(starts[i]));
    result.trials = static_cast<int>(chosen.size());

    const Trial best = best_of(problem, r, chosen, in_time_units(settings, period));
    if (!best.ok) {
        result.failed = true;
        return result;
    }
    result.times_continuous = problem.clamp(std::vector<double>(best.x.data(), best.x.data() + best.x.size()), r);
    const auto choice = problem.best_train_length(result.times_continuous, r);
    result.n_train = choice.n_train;
    result.infidelity_continuous = choice.infidelity;

    result = neighborhood_refine(problem, std::move(result), settings);
    snap_result(problem, result);
    return result;
}

const RampResult* GateResult::find(int n, int r) const {
    for (const auto& cell : cells) {
        if (cell.n_pulses == n && cell.r_periods == r) return &cell;
    }
    return nullptr;
}

GateResult optimize_gate(const GateSpec& spec, const QubitModel& model, const OptimizerSettings& settings) {
    spec.validate();
    const RampProblem problem(model, spec);
    GateResult out;
    for (int r = spec.r_min; r <= spec.r_max; ++r) {
        for (int n = spec.n_min; n <= spec.n_max; ++n) {
            const RampResult* prev = out.find(n - 1, r - 1);
            // The warm start is copied because push_back may reallocate.
            std::optional<RampResult> warm;
            if (prev != nullptr) warm = *prev;
            out.cells.push_back(optimize_ramp(problem, n, r, warm ? &*warm : nullptr, settings));
        }
    }
    for (std::size_t i = 0; i < out.cells.size(); ++i) {
        const auto& cell = out.cells[i];
        if (cell.failed) continue;
        if (out.best_continuous < 0 ||
            cell.infidelity_continuous < out.cells[static_cast<std::size_t>(out.best_continuous)].infidelity_continuous) {
            out.best_continuous = static_cast<int>(i);
        }
        for (const auto& [multiple, snapped] : cell.snapped) {
            if (!snapped.ramp) continue;
            auto it = out.best_snapped.find(multiple);
            if (it == out.best_snapped.end() ||
                snapped.infidelity < out.cells[static_cast<std::size_t>(it->second)].snapped.at(multiple).infidelity) {
                out.best_snapped[multiple] = static_cast<int>(i);
            }
        }
    }
    return out;
}

std::optional<Schedule> schedule_from(const RampResult& cell, const GateSpec& spec, double period, int clock_multiple) {
    if (cell.failed) return std::nullopt;
    Schedule s;
    s.coupling = spec.coupling;
    s.theta_kick = spec.theta_kick;
    if (clock_multiple == 0) {
        s.ramp = Ramp::make(cell.r_periods, cell.times_continuous, period);
        s.n_train = cell.n_train;
        return s;
    }
    const auto it = cell.snapped.find(clock_multiple);
    if (it == cell.snapped.end() || !it->second.ramp) return std::nullopt;
    s.ramp = it->second.ramp->to_ramp(period);
    s.n_train = it->second.n_train;
    return s;
}

Schedule no_ramp_schedule(const GateSpec& spec, const QubitModel& model) {
    const RampProblem problem(model, spec);
    Schedule s;
    s.coupling = spec.coupling;
    s.theta_kick = spec.theta_kick;
    s.ramp = Ramp{1, {}};
    s.n_train = problem.best_train_length({}, 1).n_train;
    return s;
}

namespace {

template <class Row>
void fill_common(Row& row, const GateResult& result) {
    if (result.best_continuous >= 0) {
        const auto& best = result.cells[static_cast<std::size_t>(result.best_continuous)];
        row.best_continuous = best.infidelity_continuous;
        row.n_pulses = best.n_pulses;
        row.r_periods = best.r_periods;
        row.n_train = best.n_train;
    }
}

std::map<int, double> snapped_bests(const GateSpec& spec, const GateResult& result) {
    std::map<int, double> out;
    for (int m : spec.clock_multiples) {
        const auto it = result.best_snapped.find(m);
        out[m] = it == result.best_snapped.end() ? 1.0
                                                 : result.cells[static_cast<std::size_t>(it->second)].snapped.at(m).infidelity;
    }
    return out;
}

std::optional<ErrorBudget> fixed_ramp_budget(const GateResult& result, const GateSpec& spec, const QubitModel& model,
                                             int r, int multiple, const std::optional<CoherenceRates>& rates) {
    const RampResult* best = nullptr;
    for (const auto& cell : result.cells) {
        if (cell.r_periods != r) continue;
        const auto it = cell.snapped.find(multiple);
        if (it == cell.snapped.end() || !it->second.ramp) continue;
        if (best == nullptr || it->second.infidelity < best->snapped.at(multiple).infidelity) best = &cell;
    }
    if (best == nullptr) return std::nullopt;
    const auto schedule = schedule_from(*best, spec, model.period, multiple);
    return full_error_budget(model, *schedule, spec.theta_targ, rates);
}

} // namespace

std::vector<KickSweepRow> sweep_kick_angle(const GateSpec& templ, const std::vector<double>& kick_angles,
                                           const QubitModel& model, const OptimizerSettings& settings) {
    std::vector<KickSweepRow> rows;
    for (double angle : kick_angles) {
        GateSpec spec = templ;
        spec.theta_kick = angle;
        const auto result = optimize_gate(spec, model, settings);
        KickSweepRow row;
        row.theta_kick = angle;
        fill_common(row, result);
        row.best_snapped = snapped_bests(spec, result);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<TargetSweepRow> sweep_target_angle(const GateSpec& templ, const std::vector<double>& target_angles,
                                               const QubitModel& model, const OptimizerSettings& settings,
                                               const std::optional<CoherenceRates>& rates) {
    std::vector<TargetSweepRow> rows;
    const int finest = *std::max_element(templ.clock_multiples.begin(), templ.clock_multiples.end());
    for (double angle : target_angles) {
        GateSpec spec = templ;
        spec.theta_targ = angle;
        const auto result = optimize_gate(spec, model, settings);
        TargetSweepRow row;
        row.theta_targ = angle;
        fill_common(row, result);
        row.best_snapped = snapped_bests(spec, result);
        row.no_ramp = full_error_budget(model, no_ramp_schedule(spec, model), angle, rates);
        row.ramp_r1 = fixed_ramp_budget(result, spec, model, 1, finest, rates);
        row.ramp_r5 = fixed_ramp_budget(result, spec, model, 5, finest, rates);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace sfq
