// encoding.hpp: Compact control words for clock-snapped schedules.
//
// Word layout, most significant bit first:
//   [ ramp field | n_train | r - 1 ]
// The ramp field packs n_max slot symbols as one mixed-radix integer in base
// multiple * r_max + 1. Symbol 0 marks an absent pulse and symbol k + 1 the tick k;
// present slots come first in ascending order.

#pragma once

#include "sfqgate/schedule.hpp"

#include <string>
#include <vector>

namespace sfq {

struct EncodingParams {
    int n_max = 6;
    int r_max = 5;
    int clock_multiple = 128;
    int n_train_max = 31;

    void validate() const;
    int radix() const { return clock_multiple * r_max + 1; }
    static EncodingParams defaults_for(Coupling coupling);
};

struct BitLayout {
    int ramp_bits = 0;
    int train_bits = 0;
    int ramplen_bits = 0;
    int total() const { return ramp_bits + train_bits + ramplen_bits; }
    bool operator==(const BitLayout&) const = default;
};

BitLayout bit_cost(const EncodingParams& params);

struct EncodedSchedule {
    std::vector<bool> bits; // MSB first
    BitLayout layout;
    EncodingParams params;

    // Hexadecimal, MSB first, zero padded at the front to whole nibbles.
    std::string to_hex() const;
    static EncodedSchedule from_hex(const std::string& hex, const EncodingParams& params);
};

struct DecodedSchedule {
    std::vector<int> ticks; // ascending
    int r_periods = 1;
    int n_train = 0;
    bool operator==(const DecodedSchedule&) const = default;
};

EncodedSchedule encode(const std::vector<int>& ticks, int r_periods, int n_train, const EncodingParams& params);
DecodedSchedule decode(const EncodedSchedule& e);

// One flag per clock tick over the whole gate (ticks 0..D inclusive).
std::vector<bool> expand_to_pulse_stream(const std::vector<int>& ticks, int r_periods, int n_train, int clock_multiple);

// Same, for a ramp whose times must lie on the grid of `clock_multiple` ticks per period.
std::vector<bool> expand_to_pulse_stream(const Ramp& ramp, int n_train, int clock_multiple, double period);

} // namespace sfq
