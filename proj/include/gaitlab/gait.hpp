#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitlab/geometry.hpp"
#include "gaitlab/kinematics.hpp"

namespace gaitlab {

// Open-loop gait controller: a normalized genome describes one walking
// pattern per leg. Each cycle is half ground stroke (straight line along the
// ground), half lift stroke (cubic Bezier back to the touchdown point); the
// two legs run 180 degrees out of phase. The active-ankle kind adds a
// bell-shaped ankle activation on top of the ground-parallel foot pose.

struct GenomeLengthMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Normalized gait parameters, every gene in [0,1].
using GaitGenome = std::vector<double>;

struct GeneSpec {
    const char* name;
    double lo;
    double hi;
};

// Gene order and physical ranges. Spline genes in mm, ankle activation in
// deg / deg-per-s / fraction of the lift duration.
inline constexpr std::array<GeneSpec, 9> kGeneTable = {{
    {"touch_down_x", 0.0, 235.0},
    {"touch_down_control_x", 0.0, 235.0},
    {"touch_down_control_y", 285.0, 325.0},
    {"lift_off_x", -235.0, 0.0},
    {"lift_off_control_x", -325.0, 0.0},
    {"lift_off_control_y", 285.0, 325.0},
    {"ankle_extension_amount", 0.0, 90.0},
    {"ankle_extension_speed", 0.0, 270.0},
    {"ankle_extension_offset", 0.0, 1.0},
}};

// Ground line depth below the hip. Touchdown/liftoff ride on this line; the
// lift-state control points (y in [285,325]) pull the foot up from it.
inline constexpr double kGroundLineY = 325.0;  // mm

inline constexpr int genome_length(MorphologyKind kind) {
    return kind == MorphologyKind::ActiveAnkle ? 9 : 6;
}

// Physical gait parameters for one leg.
struct GaitParameters {
    Vec2 touch_down;          // ground-stroke start, y == kGroundLineY
    Vec2 lift_off;            // ground-stroke end, y == kGroundLineY
    Vec2 touch_down_control;  // Bezier control shaping the approach to touchdown
    Vec2 lift_off_control;    // Bezier control shaping the departure from liftoff
    double ankle_amount = 0.0;  // peak ankle extension, deg
    double ankle_speed = 0.0;   // deg/s
    double ankle_offset = 0.0;  // kick onset as fraction of the lift duration
};

struct GaitPhase {
    double cycle_phase = 0.0;  // fraction of the cycle, [0,1)
    double period_s = 1.0;     // full cycle duration
};

enum class GaitState { Ground, Lift };

// Affine per-gene map onto the physical ranges. Non-active kinds get a zero
// ankle activation.
inline GaitParameters denormalize(const GaitGenome& genome, MorphologyKind kind) {
    const int want = genome_length(kind);
    if (static_cast<int>(genome.size()) != want) {
        throw GenomeLengthMismatch("genome has " + std::to_string(genome.size()) +
                                   " genes, morphology needs " + std::to_string(want));
    }
    const auto lerp_gene = [&](int i) {
        return kGeneTable[i].lo + (kGeneTable[i].hi - kGeneTable[i].lo) * genome[i];
    };
    GaitParameters p;
    p.touch_down = {lerp_gene(0), kGroundLineY};
    p.touch_down_control = {lerp_gene(1), lerp_gene(2)};
    p.lift_off = {lerp_gene(3), kGroundLineY};
    p.lift_off_control = {lerp_gene(4), lerp_gene(5)};
    if (kind == MorphologyKind::ActiveAnkle) {
        p.ankle_amount = lerp_gene(6);
        p.ankle_speed = lerp_gene(7);
        p.ankle_offset = lerp_gene(8);
    }
    return p;
}

// Leg 1 runs half a cycle ahead of leg 0.
inline double leg_phase(double cycle_phase, int leg_index) {
    return leg_index == 0 ? cycle_phase : std::fmod(cycle_phase + 0.5, 1.0);
}

// Cubic Bezier point.
inline Vec2 bezier_point(double s, Vec2 p0, Vec2 c0, Vec2 c1, Vec2 p1) {
    const double t = 1.0 - s;
    return (t * t * t) * p0 + (3.0 * t * t * s) * c0 + (3.0 * t * s * s) * c1 + (s * s * s) * p1;
}

struct FootTarget {
    Vec2 point;
    GaitState state;
};

// Calf-endpoint target for one leg at the given phase: [0,0.5) strokes
// linearly from touchdown to liftoff on the ground line, [0.5,1) swings back
// along the Bezier. Continuous at 0.5 and at the wrap by construction.
inline FootTarget foot_target(double phase, const GaitParameters& p) {
    phase -= std::floor(phase);
    if (phase < 0.5) {
        const double s = phase / 0.5;
        return {{p.touch_down.x + (p.lift_off.x - p.touch_down.x) * s, kGroundLineY},
                GaitState::Ground};
    }
    const double s = (phase - 0.5) / 0.5;
    return {bezier_point(s, p.lift_off, p.lift_off_control, p.touch_down_control, p.touch_down),
            GaitState::Lift};
}

// Ankle extension beyond the ground-parallel pose, in degrees. Zero in the
// ground state and before the kick onset; a bell with peak ankle_amount at
// u = 1 afterwards. Always in [0, ankle_amount].
inline double ankle_kick(GaitPhase phase, const GaitParameters& p) {
    const double cycle = phase.cycle_phase - std::floor(phase.cycle_phase);
    if (cycle < 0.5) return 0.0;
    const double tau = (cycle - 0.5) * phase.period_s;       // seconds into the lift state
    const double t0 = p.ankle_offset * phase.period_s / 2.0;  // kick onset
    if (tau < t0) return 0.0;
    const double u = p.ankle_speed * (tau - t0) / 3.0;
    const double bell = u * u * std::exp(1.0 - u * u);
    return std::min(p.ankle_amount * bell, p.ankle_amount);
}

// Per-leg joint setpoints at the given phase. Ankle: NoFoot none,
// StaticAnkle fixed at 90 degrees, ActiveAnkle ground-parallel plus the kick.
// Propagates UnreachableTarget from the IK.
inline JointAngles joint_commands(GaitPhase phase, const GaitParameters& p,
                                  const Morphology& morph) {
    const FootTarget target = foot_target(phase.cycle_phase, p);
    JointAngles angles = inverse_kinematics(target.point, morph.geometry);
    switch (morph.kind) {
        case MorphologyKind::NoFoot:
            angles.ankle = 0.0;
            break;
        case MorphologyKind::StaticAnkle:
            angles.ankle = kPi / 2.0;
            break;
        case MorphologyKind::ActiveAnkle:
            angles.ankle =
                ankle_parallel_angle(angles.hip, angles.knee) + deg2rad(ankle_kick(phase, p));
            break;
    }
    return angles;
}

}  // namespace gaitlab
