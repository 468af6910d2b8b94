#include "sfqgate/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace sfq {

std::string_view to_string(Coupling c) {
    return c == Coupling::inductive ? "inductive" : "capacitive";
}

Coupling parse_coupling(std::string_view text) {
    if (text == "inductive" || text == "L") return Coupling::inductive;
    if (text == "capacitive" || text == "C") return Coupling::capacitive;
    throw DomainError("coupling must be 'inductive' or 'capacitive', got '" + std::string(text) + "'");
}

std::string_view to_string(DiscardReason r) {
    return r == DiscardReason::crowded_interval ? "more than two pulses between neighbouring ticks"
                                                : "no collision-free tick assignment";
}

Ramp Ramp::make(int r_periods, std::vector<double> times, double period) {
    std::sort(times.begin(), times.end());
    Ramp ramp{r_periods, std::move(times)};
    ramp.validate(period);
    return ramp;
}

void Ramp::validate(double period) const {
    if (r_periods < 1) throw DomainError("ramp length must be at least one period");
    if (static_cast<int>(times.size()) > kMaxRampPulses) {
        throw DomainError("a ramp holds at most " + std::to_string(kMaxRampPulses) + " pulses");
    }
    if (!std::is_sorted(times.begin(), times.end())) throw DomainError("ramp times must be sorted");
    const double end = r_periods * period;
    for (double t : times) {
        if (!(t >= 0.0 && t < end)) {
            std::ostringstream os;
            os << "ramp time " << t << " ns outside [0, " << end << ")";
            throw DomainError(os.str());
        }
    }
}

void Schedule::validate(double period) const {
    ramp.validate(period);
    if (n_train < 0) throw DomainError("n_train must be non-negative");
    if (!(theta_kick > 0.0)) throw DomainError("theta_kick must be positive");
}

ClockGrid ClockGrid::make(int multiple, double period) {
    if (multiple < 1) throw DomainError("clock multiple must be positive");
    if (!(period > 0.0)) throw DomainError("period must be positive");
    return {multiple, period / multiple};
}

Ramp SnappedRamp::to_ramp(double period) const {
    std::vector<double> times;
    times.reserve(ticks.size());
    for (int k : ticks) times.push_back(k * period / multiple);
    return Ramp::make(r_periods, std::move(times), period);
}

double total_duration(const Schedule& s, double period) {
    const int r = s.ramp.r_periods;
    const int periods = s.n_train >= 1 ? 2 * r + s.n_train - 1 : 2 * r;
    return periods * period;
}

std::vector<double> mirrored_kick_times(const Schedule& s, double period) {
    s.validate(period);
    const double duration = total_duration(s, period);
    const double train_start = s.ramp.r_periods * period;
    std::vector<double> out;
    out.reserve(2 * s.ramp.times.size() + s.n_train);
    for (double t : s.ramp.times) out.push_back(t);
    for (int k = 0; k < s.n_train; ++k) out.push_back(train_start + k * period);
    for (double t : s.ramp.times) out.push_back(duration - t);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> absolute_kick_times(const Schedule& s, double period) {
    std::vector<double> out = mirrored_kick_times(s, period);
    for (std::size_t k = 1; k < out.size(); ++k) {
        if (out[k] == out[k - 1]) {
            std::ostringstream os;
            os << "coincident kicks at t = " << out[k] << " ns";
            throw DomainError(os.str());
        }
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> tick_collisions(const std::vector<double>& times, const ClockGrid& grid) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (times[k] - times[k - 1] < grid.tick * (1.0 - 1e-9)) out.emplace_back(k - 1, k);
    }
    return out;
}

SnapOutcome snap_to_clock(const Ramp& ramp, const ClockGrid& grid) {
    const int n = ramp.size();
    const int limit = grid.multiple * ramp.r_periods;
    std::vector<int> lower(n), upper(n);
    std::map<int, int> interval_count;
    for (int i = 0; i < n; ++i) {
        const double u = ramp.times[i] / grid.tick;
        const double nearest = std::round(u);
        if (std::abs(u - nearest) < 1e-9) {
            lower[i] = upper[i] = static_cast<int>(nearest);
        } else {
            lower[i] = static_cast<int>(std::floor(u));
            upper[i] = lower[i] + 1;
            if (++interval_count[lower[i]] > 2) return DiscardReason::crowded_interval;
        }
        lower[i] = std::min(lower[i], limit - 1);
        upper[i] = std::min(upper[i], limit - 1);
    }

    // Exhaustive floor/ceiling search; the lowest mask wins ties, which favours earlier ticks.
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<int> best;
    std::vector<int> chosen(n);
    const double tie = 1e-9 * grid.tick;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        bool redundant = false;
        for (int i = 0; i < n; ++i) {
            const bool up = (mask >> i) & 1u;
            if (up && upper[i] == lower[i]) redundant = true;
            chosen[i] = up ? upper[i] : lower[i];
        }
        if (redundant) continue;
        std::vector<int> sorted = chosen;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
        double cost = 0.0;
        for (int i = 0; i < n; ++i) cost += std::abs(chosen[i] * grid.tick - ramp.times[i]);
        if (cost < best_cost - tie) {
            best_cost = cost;
            best = std::move(sorted);
        }
    }
    if (n > 0 && best.empty()) return DiscardReason::no_distinct_assignment;
    return SnappedRamp{ramp.r_periods, grid.multiple, std::move(best)};
}

cplx schedule_spectrum(const Schedule& s, double period, double omega) {
    cplx sum = 0.0;
    for (double t : absolute_kick_times(s, period)) sum += std::polar(1.0, omega * t);
    return sum;
}

} // namespace sfq
