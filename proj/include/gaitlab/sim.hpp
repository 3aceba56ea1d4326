#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitlab/csv.hpp"
#include "gaitlab/gait.hpp"
#include "gaitlab/kinematics.hpp"
#include "gaitlab/rng.hpp"

namespace gaitlab {

// Quasi-static simulation of the hub-supported biped. The hub keeps the body
// level (pitch identically zero) and removes balance, so locomotion reduces
// to stance-foot geometry: whichever foot vertex sits deepest in the hip
// frame carries the body, and while that contact persists it is pinned to
// the world (no slip) — the body advances by the opposite of the contact
// point's motion in the hip frame. Stance or vertex changes contribute zero
// progress for that step.

struct EvaluationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RewardWeights {
    double w_joints = 3.5e-4;  // per radian of summed joint travel
    double w_angle = 5.0;      // per radian of mean |body pitch|
    double step_cost = 0.5;    // flat cost per gait period
};

struct SimConfig {
    double period_s = 1.0;
    int steps_per_period = 100;  // >= 10
    int periods = 12;
    RewardWeights weights;
    double fitness_noise_std = 0.0;  // optional evaluation noise; 0 = off
};

struct BodyState {
    double x_m = 0.0;            // forward progress along the ground
    double hip_height_mm = 0.0;  // hip above the ground plane
    double pitch_rad = 0.0;      // identically 0: the hub holds the body level
};

enum class ContactVertex { Heel, Toe, Tip };

inline const char* contact_vertex_name(ContactVertex v) {
    switch (v) {
        case ContactVertex::Heel: return "heel";
        case ContactVertex::Toe: return "toe";
        default: return "tip";
    }
}

struct ContactState {
    int stance_leg = -1;  // -1 before the first resolve
    ContactVertex vertex = ContactVertex::Tip;
    double contact_x_mm = 0.0;  // stance vertex x in the hip frame
    double depth_mm = 0.0;      // stance vertex y in the hip frame
};

// Depth ties below this are fp noise (a levelled sole reports heel and toe
// equal to ~1e-13 mm) and are broken by the stated preferences instead of
// the raw comparison.
inline constexpr double kDepthTieTolMm = 1e-9;

struct PeriodOutcome {
    double delta_pos_m = 0.0;      // forward progress over the period
    double delta_joints_rad = 0.0; // summed |joint motion|, all actuated joints, both legs
    double angle_body_rad = 0.0;   // mean |pitch| over the period
    double reward = 0.0;
};

inline double period_reward(double delta_pos_m, double delta_joints_rad, double angle_body_rad,
                            const RewardWeights& w) {
    return delta_pos_m - w.w_joints * delta_joints_rad - w.w_angle * angle_body_rad - w.step_cost;
}

namespace detail {

struct VertexDepth {
    ContactVertex vertex = ContactVertex::Tip;
    double x = 0.0;
    double depth = 0.0;
};

// Deepest candidate vertex of one leg. A heel/toe tie keeps the sticky
// vertex (the one carrying stance last step) when given, otherwise the toe.
inline VertexDepth lowest_vertex(const LegLandmarks& lm, MorphologyKind kind,
                                 std::optional<ContactVertex> sticky) {
    if (kind == MorphologyKind::NoFoot) return {ContactVertex::Tip, lm.ankle.x, lm.ankle.y};
    const VertexDepth heel{ContactVertex::Heel, lm.heel.x, lm.heel.y};
    const VertexDepth toe{ContactVertex::Toe, lm.toe.x, lm.toe.y};
    if (std::abs(heel.depth - toe.depth) <= kDepthTieTolMm) {
        if (sticky == ContactVertex::Heel) return heel;
        return toe;
    }
    return heel.depth > toe.depth ? heel : toe;
}

}  // namespace detail

// Stance resolution: the leg whose lowest foot vertex is deepest carries the
// body, and the hip height is set so that vertex sits on the ground plane.
// Depth ties prefer the leg currently in Ground state, then leg 0.
inline std::pair<ContactState, double> resolve_contact(
    const LegLandmarks& leg0, const LegLandmarks& leg1, MorphologyKind kind,
    const std::array<GaitState, 2>& states,
    const std::optional<ContactState>& prev = std::nullopt) {
    const auto sticky = [&](int leg) -> std::optional<ContactVertex> {
        if (prev && prev->stance_leg == leg) return prev->vertex;
        return std::nullopt;
    };
    const detail::VertexDepth v0 = detail::lowest_vertex(leg0, kind, sticky(0));
    const detail::VertexDepth v1 = detail::lowest_vertex(leg1, kind, sticky(1));

    int leg;
    if (std::abs(v0.depth - v1.depth) <= kDepthTieTolMm) {
        const bool g0 = states[0] == GaitState::Ground;
        const bool g1 = states[1] == GaitState::Ground;
        leg = (g1 && !g0) ? 1 : 0;
    } else {
        leg = v0.depth > v1.depth ? 0 : 1;
    }
    const detail::VertexDepth& v = leg == 0 ? v0 : v1;
    ContactState c;
    c.stance_leg = leg;
    c.vertex = v.vertex;
    c.contact_x_mm = v.x;
    c.depth_mm = v.depth;
    return {c, v.depth};
}

struct StepResult {
    double dpos_m = 0.0;
    double djoints_rad = 0.0;
};

class WalkerSim {
  public:
    explicit WalkerSim(const Morphology& morph) : morph_(morph) {}

    // Seeds joints and contact at the starting pose; counts no deltas.
    void reset(const std::array<JointAngles, 2>& commands, const std::array<GaitState, 2>& states) {
        const auto lm0 = forward_kinematics(commands[0], morph_.geometry, morph_.kind);
        const auto lm1 = forward_kinematics(commands[1], morph_.geometry, morph_.kind);
        auto [contact, height] = resolve_contact(lm0, lm1, morph_.kind, states);
        body_ = BodyState{};
        body_.hip_height_mm = height;
        contact_ = contact;
        joints_ = commands;
        initialized_ = true;
    }

    // Applies the commands instantaneously, re-resolves contact, and
    // advances the body by the no-slip pin when stance leg and vertex are
    // both unchanged.
    StepResult step(const std::array<JointAngles, 2>& commands,
                    const std::array<GaitState, 2>& states) {
        if (!initialized_) throw std::logic_error("WalkerSim::step before reset");
        const auto lm0 = forward_kinematics(commands[0], morph_.geometry, morph_.kind);
        const auto lm1 = forward_kinematics(commands[1], morph_.geometry, morph_.kind);
        auto [contact, height] = resolve_contact(lm0, lm1, morph_.kind, states, contact_);

        StepResult r;
        if (contact.stance_leg == contact_.stance_leg && contact.vertex == contact_.vertex) {
            r.dpos_m = -(contact.contact_x_mm - contact_.contact_x_mm) / 1000.0;
        }
        for (int leg = 0; leg < 2; ++leg) {
            r.djoints_rad += std::abs(commands[leg].hip - joints_[leg].hip);
            r.djoints_rad += std::abs(commands[leg].knee - joints_[leg].knee);
            if (morph_.ankle_actuated()) {
                r.djoints_rad += std::abs(commands[leg].ankle - joints_[leg].ankle);
            }
        }
        body_.x_m += r.dpos_m;
        body_.hip_height_mm = height;
        contact_ = contact;
        joints_ = commands;
        return r;
    }

    const Morphology& morphology() const { return morph_; }
    const BodyState& body() const { return body_; }
    const ContactState& contact() const { return contact_; }
    const std::array<JointAngles, 2>& joints() const { return joints_; }

  private:
    Morphology morph_;
    BodyState body_;
    ContactState contact_;
    std::array<JointAngles, 2> joints_{};
    bool initialized_ = false;
};

struct TraceRow {
    int step = 0;
    double time_s = 0.0;
    double phase = 0.0;
    double body_x_m = 0.0;
    double hip_height_mm = 0.0;
    int stance_leg = 0;
    ContactVertex vertex = ContactVertex::Tip;
    std::array<JointAngles, 2> joints{};
    double step_dpos_m = 0.0;
};

using Trace = std::vector<TraceRow>;

struct EvalResult {
    double fitness = 0.0;
    std::vector<PeriodOutcome> periods;
};

// Fitness of one gait: periods * steps_per_period command steps from phase
// 0, one Eq-style reward per period, fitness = sum of the period rewards.
// Deterministic for identical (genome, morphology, config); the seed only
// feeds the optional evaluation noise.
inline EvalResult evaluate_gait(const GaitGenome& genome, const Morphology& morph,
                                const SimConfig& cfg, std::uint64_t seed = 0,
                                Trace* trace = nullptr) {
    if (cfg.steps_per_period < 10) throw std::invalid_argument("steps_per_period must be >= 10");
    if (cfg.periods < 1) throw std::invalid_argument("periods must be >= 1");
    const GaitParameters params = denormalize(genome, morph.kind);

    const auto commands_at = [&](double cycle_phase, std::array<JointAngles, 2>& cmd,
                                 std::array<GaitState, 2>& st) {
        for (int leg = 0; leg < 2; ++leg) {
            const double lp = leg_phase(cycle_phase, leg);
            st[leg] = foot_target(lp, params).state;
            cmd[leg] = joint_commands({lp, cfg.period_s}, params, morph);
        }
    };

    EvalResult result;
    WalkerSim sim(morph);
    const int spp = cfg.steps_per_period;
    const double dt = cfg.period_s / spp;
    try {
        std::array<JointAngles, 2> cmd;
        std::array<GaitState, 2> st;
        commands_at(0.0, cmd, st);
        sim.reset(cmd, st);

        double acc_pos = 0.0, acc_joints = 0.0, acc_pitch = 0.0;
        for (int k = 1; k <= cfg.periods * spp; ++k) {
            const double phase = static_cast<double>(k % spp) / spp;
            commands_at(phase, cmd, st);
            const StepResult r = sim.step(cmd, st);
            acc_pos += r.dpos_m;
            acc_joints += r.djoints_rad;
            acc_pitch += std::abs(sim.body().pitch_rad);
            if (trace) {
                trace->push_back({k, k * dt, phase, sim.body().x_m, sim.body().hip_height_mm,
                                  sim.contact().stance_leg, sim.contact().vertex, sim.joints(),
                                  r.dpos_m});
            }
            if (k % spp == 0) {
                PeriodOutcome outcome;
                outcome.delta_pos_m = acc_pos;
                outcome.delta_joints_rad = acc_joints;
                outcome.angle_body_rad = acc_pitch / spp;
                outcome.reward = period_reward(outcome.delta_pos_m, outcome.delta_joints_rad,
                                               outcome.angle_body_rad, cfg.weights);
                result.periods.push_back(outcome);
                acc_pos = acc_joints = acc_pitch = 0.0;
            }
        }
    } catch (const UnreachableTarget& e) {
        throw EvaluationFailed(std::string("gait evaluation hit an unreachable target: ") +
                               e.what());
    }
    for (const PeriodOutcome& p : result.periods) result.fitness += p.reward;
    if (cfg.fitness_noise_std > 0.0) {
        Rng rng(seed);
        result.fitness += cfg.fitness_noise_std * rng.gaussian();
    }
    return result;
}

// Trace CSV: one row per simulation step. Ankle columns only for the footed
// kinds.
inline void write_trace_csv(std::ostream& os, const Trace& trace, MorphologyKind kind) {
    const bool footed = kind != MorphologyKind::NoFoot;
    os << "step,time_s,phase,body_x_m,hip_height_mm,stance_leg,contact_vertex,leg0_hip_rad,"
          "leg0_knee_rad,";
    if (footed) os << "leg0_ankle_rad,";
    os << "leg1_hip_rad,leg1_knee_rad,";
    if (footed) os << "leg1_ankle_rad,";
    os << "step_dpos_m\n";
    for (const TraceRow& row : trace) {
        os << row.step << ',' << csv_double(row.time_s) << ',' << csv_double(row.phase) << ','
           << csv_double(row.body_x_m) << ',' << csv_double(row.hip_height_mm) << ','
           << row.stance_leg << ',' << contact_vertex_name(row.vertex);
        for (int leg = 0; leg < 2; ++leg) {
            os << ',' << csv_double(row.joints[leg].hip) << ',' << csv_double(row.joints[leg].knee);
            if (footed) os << ',' << csv_double(row.joints[leg].ankle);
        }
        os << ',' << csv_double(row.step_dpos_m) << '\n';
    }
}

}  // namespace gaitlab
