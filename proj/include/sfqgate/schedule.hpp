// schedule.hpp: SFQ pulse schedules made of an on-ramp, a pulse train and the mirrored off-ramp.
//
// A schedule is stored as its on-ramp only. Kicks of the train sit at R*T + k*T and
// the off-ramp is the time mirror t -> D - t of the on-ramp, D being the gate duration.

#pragma once

#include "sfqgate/numerics.hpp"

#include <string_view>
#include <variant>
#include <vector>

namespace sfq {

enum class Coupling { inductive, capacitive };

std::string_view to_string(Coupling c);
Coupling parse_coupling(std::string_view text);

inline constexpr int kMaxRampPulses = 6;

struct Ramp {
    int r_periods = 1;
    std::vector<double> times; // ns, sorted, each in [0, r_periods*T)

    // Sorts the times and checks the invariants against period T.
    static Ramp make(int r_periods, std::vector<double> times, double period);
    void validate(double period) const;
    int size() const { return static_cast<int>(times.size()); }
};

struct Schedule {
    Ramp ramp;
    int n_train = 0;
    Coupling coupling = Coupling::inductive;
    double theta_kick = 0.15;

    void validate(double period) const;
};

struct ClockGrid {
    int multiple = 128;
    double tick = 0.0; // ns

    static ClockGrid make(int multiple, double period);
};

// A ramp whose pulses sit on clock ticks; ticks[i] * tick is the pulse time.
struct SnappedRamp {
    int r_periods = 1;
    int multiple = 128;
    std::vector<int> ticks; // ascending, distinct, each in [0, multiple*r_periods)

    Ramp to_ramp(double period) const;
    bool operator==(const SnappedRamp&) const = default;
};

enum class DiscardReason {
    crowded_interval,      // more than two pulses between neighbouring ticks
    no_distinct_assignment // every floor/ceiling choice puts two pulses on one tick
};

using SnapOutcome = std::variant<SnappedRamp, DiscardReason>;

std::string_view to_string(DiscardReason r);

double total_duration(const Schedule& s, double period);

// All kick times of the gate, ascending; coincident kicks are kept.
std::vector<double> mirrored_kick_times(const Schedule& s, double period);

// As mirrored_kick_times, but rejects exactly coincident kicks.
std::vector<double> absolute_kick_times(const Schedule& s, double period);

// Pairs of neighbouring kicks (indices into times) closer than one clock tick.
std::vector<std::pair<std::size_t, std::size_t>> tick_collisions(const std::vector<double>& times, const ClockGrid& grid);

SnapOutcome snap_to_clock(const Ramp& ramp, const ClockGrid& grid);

// Fourier amplitude of the kick comb: sum_k exp(i omega t_k).
cplx schedule_spectrum(const Schedule& s, double period, double omega);

} // namespace sfq
