#include "sfqgate/encoding.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace sfq {

namespace {

using boost::multiprecision::cpp_int;

int bit_length(const cpp_int& v) {
    return v == 0 ? 0 : static_cast<int>(boost::multiprecision::msb(v)) + 1;
}

cpp_int power(int base, int exponent) {
    cpp_int out = 1;
    for (int i = 0; i < exponent; ++i) out *= base;
    return out;
}

void append_bits(std::vector<bool>& bits, const cpp_int& value, int width) {
    for (int b = width - 1; b >= 0; --b) bits.push_back(boost::multiprecision::bit_test(value, static_cast<unsigned>(b)));
}

cpp_int read_bits(const std::vector<bool>& bits, std::size_t& pos, int width) {
    cpp_int value = 0;
    for (int b = 0; b < width; ++b) {
        value <<= 1;
        if (bits[pos++]) value |= 1;
    }
    return value;
}

} // namespace

void EncodingParams::validate() const {
    if (n_max < 1) throw DomainError("encoding: n_max must be positive");
    if (r_max < 1) throw DomainError("encoding: r_max must be positive");
    if (clock_multiple < 1) throw DomainError("encoding: clock_multiple must be positive");
    if (n_train_max < 1) throw DomainError("encoding: n_train_max must be positive");
}

EncodingParams EncodingParams::defaults_for(Coupling coupling) {
    EncodingParams p;
    p.n_train_max = coupling == Coupling::inductive ? 31 : 127;
    return p;
}

BitLayout bit_cost(const EncodingParams& params) {
    params.validate();
    BitLayout layout;
    // radix^n_max - 1 is the largest ramp word; radix is odd, so this is ceil(n_max log2 radix).
    layout.ramp_bits = bit_length(power(params.radix(), params.n_max) - 1);
    layout.train_bits = bit_length(cpp_int(params.n_train_max));
    layout.ramplen_bits = bit_length(cpp_int(params.r_max - 1));
    return layout;
}

std::string EncodedSchedule::to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    const std::size_t pad = (4 - bits.size() % 4) % 4;
    std::string out;
    int nibble = 0, filled = static_cast<int>(pad);
    for (bool b : bits) {
        nibble = (nibble << 1) | (b ? 1 : 0);
        if (++filled == 4) {
            out.push_back(digits[nibble]);
            nibble = 0;
            filled = 0;
        }
    }
    return out;
}

EncodedSchedule EncodedSchedule::from_hex(const std::string& hex, const EncodingParams& params) {
    EncodedSchedule e;
    e.params = params;
    e.layout = bit_cost(params);
    const std::size_t total = static_cast<std::size_t>(e.layout.total());
    if (hex.size() != (total + 3) / 4) {
        throw DomainError("encoding: expected " + std::to_string((total + 3) / 4) + " hex digits, got " +
                          std::to_string(hex.size()));
    }
    std::vector<bool> raw;
    for (char c : hex) {
        int v = 0;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else throw DomainError(std::string("encoding: invalid hex digit '") + c + "'");
        for (int b = 3; b >= 0; --b) raw.push_back(((v >> b) & 1) != 0);
    }
    const std::size_t pad = raw.size() - total;
    for (std::size_t i = 0; i < pad; ++i) {
        if (raw[i]) throw DomainError("encoding: padding bits must be zero");
    }
    e.bits.assign(raw.begin() + static_cast<std::ptrdiff_t>(pad), raw.end());
    return e;
}

EncodedSchedule encode(const std::vector<int>& ticks, int r_periods, int n_train, const EncodingParams& params) {
    const BitLayout layout = bit_cost(params);
    if (r_periods < 1 || r_periods > params.r_max) {
        throw DomainError("encode: r = " + std::to_string(r_periods) + " outside [1, " + std::to_string(params.r_max) + "]");
    }
    if (n_train < 0 || n_train > params.n_train_max) {
        throw DomainError("encode: n_train = " + std::to_string(n_train) + " outside [0, " +
                          std::to_string(params.n_train_max) + "]");
    }
    if (static_cast<int>(ticks.size()) > params.n_max) {
        throw DomainError("encode: " + std::to_string(ticks.size()) + " ramp pulses exceed n_max = " +
                          std::to_string(params.n_max));
    }
    std::vector<int> sorted = ticks;
    std::sort(sorted.begin(), sorted.end());
    const int limit = params.clock_multiple * r_periods;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] < 0 || sorted[i] >= limit) {
            throw DomainError("encode: tick " + std::to_string(sorted[i]) + " outside [0, " + std::to_string(limit) + ")");
        }
        if (i > 0 && sorted[i] == sorted[i - 1]) throw DomainError("encode: duplicate tick " + std::to_string(sorted[i]));
    }

    cpp_int word = 0;
    for (int slot = 0; slot < params.n_max; ++slot) {
        const int symbol = slot < static_cast<int>(sorted.size()) ? sorted[static_cast<std::size_t>(slot)] + 1 : 0;
        word = word * params.radix() + symbol;
    }

    EncodedSchedule e;
    e.layout = layout;
    e.params = params;
    e.bits.reserve(static_cast<std::size_t>(layout.total()));
    append_bits(e.bits, word, layout.ramp_bits);
    append_bits(e.bits, cpp_int(n_train), layout.train_bits);
    append_bits(e.bits, cpp_int(r_periods - 1), layout.ramplen_bits);
    return e;
}

DecodedSchedule decode(const EncodedSchedule& e) {
    const EncodingParams& params = e.params;
    const BitLayout layout = bit_cost(params);
    if (!(layout == e.layout)) throw DomainError("decode: layout does not match the encoding parameters");
    if (static_cast<int>(e.bits.size()) != layout.total()) {
        throw DomainError("decode: expected " + std::to_string(layout.total()) + " bits, got " + std::to_string(e.bits.size()));
    }
    std::size_t pos = 0;
    cpp_int word = read_bits(e.bits, pos, layout.ramp_bits);
    const cpp_int train = read_bits(e.bits, pos, layout.train_bits);
    const cpp_int ramplen = read_bits(e.bits, pos, layout.ramplen_bits);

    if (word >= power(params.radix(), params.n_max)) throw DomainError("decode: ramp field overflows the mixed-radix range");
    DecodedSchedule d;
    d.r_periods = static_cast<int>(ramplen) + 1;
    if (d.r_periods > params.r_max) {
        throw DomainError("decode: r = " + std::to_string(d.r_periods) + " exceeds r_max = " + std::to_string(params.r_max));
    }
    d.n_train = static_cast<int>(train);
    if (d.n_train > params.n_train_max) {
        throw DomainError("decode: n_train = " + std::to_string(d.n_train) + " exceeds n_train_max = " +
                          std::to_string(params.n_train_max));
    }

    std::vector<int> symbols(static_cast<std::size_t>(params.n_max));
    for (int slot = params.n_max - 1; slot >= 0; --slot) {
        symbols[static_cast<std::size_t>(slot)] = static_cast<int>(word % params.radix());
        word /= params.radix();
    }
    const int limit = params.clock_multiple * d.r_periods;
    bool absent_seen = false;
    for (int symbol : symbols) {
        if (symbol == 0) {
            absent_seen = true;
            continue;
        }
        if (absent_seen) throw DomainError("decode: present pulse after an absent slot (non-canonical word)");
        if (symbol > limit) {
            throw DomainError("decode: symbol " + std::to_string(symbol) + " beyond the ramp of " + std::to_string(limit) +
                              " ticks");
        }
        const int tick = symbol - 1;
        if (!d.ticks.empty() && tick <= d.ticks.back()) throw DomainError("decode: slots not strictly ascending (non-canonical word)");
        d.ticks.push_back(tick);
    }
    return d;
}

std::vector<bool> expand_to_pulse_stream(const std::vector<int>& ticks, int r_periods, int n_train, int clock_multiple) {
    if (clock_multiple < 1) throw DomainError("expand_to_pulse_stream: clock_multiple must be positive");
    if (r_periods < 1) throw DomainError("expand_to_pulse_stream: r must be at least 1");
    if (n_train < 0) throw DomainError("expand_to_pulse_stream: n_train must be non-negative");
    const int ramp_ticks = clock_multiple * r_periods;
    const int periods = n_train >= 1 ? 2 * r_periods + n_train - 1 : 2 * r_periods;
    const int duration = periods * clock_multiple;
    std::vector<bool> stream(static_cast<std::size_t>(duration) + 1, false);
    for (int t : ticks) {
        if (t < 0 || t >= ramp_ticks) {
            throw DomainError("expand_to_pulse_stream: tick " + std::to_string(t) + " outside [0, " + std::to_string(ramp_ticks) + ")");
        }
        if (stream[static_cast<std::size_t>(t)]) throw DomainError("expand_to_pulse_stream: duplicate tick " + std::to_string(t));
        stream[static_cast<std::size_t>(t)] = true;
        stream[static_cast<std::size_t>(duration - t)] = true;
    }
    for (int k = 0; k < n_train; ++k) stream[static_cast<std::size_t>(ramp_ticks + k * clock_multiple)] = true;
    return stream;
}

std::vector<bool> expand_to_pulse_stream(const Ramp& ramp, int n_train, int clock_multiple, double period) {
    ramp.validate(period);
    if (clock_multiple < 1) throw DomainError("expand_to_pulse_stream: clock_multiple must be positive");
    std::vector<int> ticks;
    for (double t : ramp.times) {
        const double scaled = t * clock_multiple / period;
        const double nearest = std::round(scaled);
        if (std::abs(scaled - nearest) > 1e-9) {
            throw DomainError("expand_to_pulse_stream: pulse at " + std::to_string(t) + " ns is not on a clock tick");
        }
        ticks.push_back(static_cast<int>(nearest));
    }
    return expand_to_pulse_stream(ticks, ramp.r_periods, n_train, clock_multiple);
}

} // namespace sfq
