// ramp_optimizer.hpp: Multistart BFGS search over on-ramp pulse times.
//
// For each (pulses N, ramp length R) the clock constraint is relaxed and the ramp times
// are optimized as continuous variables, the train length being searched exhaustively
// inside the cost. The best continuous ramp is then refined by +-T/6 jumps and snapped
// to each requested SFQ clock grid.

#pragma once

#include "sfqgate/closed_dynamics.hpp"
#include "sfqgate/open_dynamics.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace sfq {

struct GateSpec {
    Coupling coupling = Coupling::inductive;
    double theta_kick = 0.15;
    double theta_targ = 3.141592653589793;
    std::vector<int> clock_multiples{32, 64, 128};
    int n_min = 1;
    int n_max = 6;
    int r_min = 1;
    int r_max = 5;

    void validate() const;
    // Largest train length searched: ceil(theta_targ / theta_kick) + 4.
    int train_search_limit() const;
    static GateSpec defaults_for(Coupling coupling);
};

struct OptimizerSettings {
    numerics::MinimizerOptions minimizer{}; // gradient_step and initial_step in qubit periods
    // Upper bound on BFGS starts per ensemble (initial conditions, or one refinement round);
    // 0 runs every start. Larger ensembles are subsampled deterministically from the seed.
    int trial_budget = 0;
    std::uint64_t seed = 0;
    int threads = 1;
    int refine_max_rounds = 20;
    double refine_tolerance = 1e-12;
};

struct SnappedCell {
    std::optional<SnappedRamp> ramp; // empty when discarded
    std::optional<DiscardReason> discarded;
    int n_train = 0;
    double infidelity = 1.0;
};

struct RampResult {
    int n_pulses = 0;
    int r_periods = 0;
    std::vector<double> times_continuous;
    int n_train = 0;
    double infidelity_continuous = 1.0;
    std::map<int, SnappedCell> snapped; // keyed by clock multiple
    bool failed = false;
    int trials = 0;
};

struct TrainChoice {
    int n_train = 0;
    double infidelity = 1.0;
};

// Cached evaluator for one gate specification.
class RampProblem {
public:
    RampProblem(const QubitModel& model, GateSpec spec);

    TrainChoice best_train_length(const std::vector<double>& ramp_times, int r_periods) const;
    // Clamps times into [0, r*T - 1e-6 ns] and returns the best-train infidelity.
    double cost(const std::vector<double>& times, int r_periods) const;
    std::vector<double> clamp(std::vector<double> times, int r_periods) const;

    const QubitModel& model() const { return model_; }
    const GateSpec& spec() const { return spec_; }
    double period() const { return model_.period; }

private:
    QubitModel model_;
    GateSpec spec_;
    TrainScanner scanner_;
};

TrainChoice best_train_length(const Ramp& ramp, const GateSpec& spec, const QubitModel& model);

double cost(const std::vector<double>& times, int n, int r, const GateSpec& spec, const QubitModel& model);

std::vector<std::vector<double>> initial_conditions(Coupling coupling, int n, int r, double period,
                                                    const RampResult* prev);

RampResult optimize_ramp(const RampProblem& problem, int n, int r, const RampResult* prev,
                         const OptimizerSettings& settings);

RampResult neighborhood_refine(const RampProblem& problem, RampResult incumbent, const OptimizerSettings& settings);

// Snaps the continuous ramp onto every clock in the spec and re-searches the train length.
void snap_result(const RampProblem& problem, RampResult& result);

struct GateResult {
    std::vector<RampResult> cells; // r ascending, then n ascending
    int best_continuous = -1;
    std::map<int, int> best_snapped; // clock multiple -> cell index (absent if every cell was discarded)

    const RampResult* find(int n, int r) const;
};

GateResult optimize_gate(const GateSpec& spec, const QubitModel& model, const OptimizerSettings& settings);

// A schedule built from a result cell; clock_multiple 0 selects the continuous ramp.
std::optional<Schedule> schedule_from(const RampResult& cell, const GateSpec& spec, double period, int clock_multiple);

// Train-only gate (R = 1, empty ramp) with the best train length.
Schedule no_ramp_schedule(const GateSpec& spec, const QubitModel& model);

struct KickSweepRow {
    double theta_kick = 0.0;
    double best_continuous = 1.0;
    int n_pulses = 0, r_periods = 0, n_train = 0;
    std::map<int, double> best_snapped; // clock multiple -> infidelity (1.0 when nothing survived)
};

struct TargetSweepRow {
    double theta_targ = 0.0;
    double best_continuous = 1.0;
    int n_pulses = 0, r_periods = 0, n_train = 0;
    std::map<int, double> best_snapped;
    ErrorBudget no_ramp;
    std::optional<ErrorBudget> ramp_r1; // best snapped R = 1 cell at the finest clock
    std::optional<ErrorBudget> ramp_r5; // best snapped R = 5 cell at the finest clock
};

std::vector<KickSweepRow> sweep_kick_angle(const GateSpec& templ, const std::vector<double>& kick_angles,
                                           const QubitModel& model, const OptimizerSettings& settings);

std::vector<TargetSweepRow> sweep_target_angle(const GateSpec& templ, const std::vector<double>& target_angles,
                                               const QubitModel& model, const OptimizerSettings& settings,
                                               const std::optional<CoherenceRates>& rates);

} // namespace sfq
