#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gaitlab/geometry.hpp"

namespace gaitlab {

// Planar 2-link leg (hip, knee) with an optional ankle-mounted foot, in the
// hip-centred frame (x forward, y down, mm).
//
// Angle conventions:
//   hip   — thigh angle from straight-down vertical, positive forward
//   knee  — interior flexion, calf rotated backward relative to the thigh
//           (bird-leg bend), in [0, pi); 0 = straight leg
//   ankle — interior calf-foot angle: the foot-forward direction is
//           dir(calf_angle + ankle), so pi/2 keeps the foot perpendicular
//           to the calf

struct UnreachableTarget : std::domain_error {
    using std::domain_error::domain_error;
};

struct LegGeometry {
    double thigh_len = 235.0;  // mm
    double calf_len = 235.0;   // mm
    double foot_drop = 40.0;   // ankle to sole, perpendicular, mm
    double heel_ext = 30.0;    // sole behind the ankle, mm
    double toe_ext = 80.0;     // sole ahead of the ankle, mm

    double max_reach() const { return thigh_len + calf_len; }
    double min_reach() const { return std::abs(thigh_len - calf_len); }
};

enum class MorphologyKind { NoFoot, StaticAnkle, ActiveAnkle };

struct Morphology {
    MorphologyKind kind = MorphologyKind::NoFoot;
    LegGeometry geometry;

    // Default build: legs sized to cover the whole controller workspace,
    // toe-dominant foot for the footed kinds.
    static Morphology standard(MorphologyKind kind) {
        Morphology m;
        m.kind = kind;
        if (kind == MorphologyKind::NoFoot) {
            m.geometry.foot_drop = 0.0;
            m.geometry.heel_ext = 0.0;
            m.geometry.toe_ext = 0.0;
        }
        return m;
    }

    bool has_foot() const { return kind != MorphologyKind::NoFoot; }
    bool ankle_actuated() const { return kind == MorphologyKind::ActiveAnkle; }
    int actuated_joint_count() const { return ankle_actuated() ? 3 : 2; }
    int genome_length() const { return kind == MorphologyKind::ActiveAnkle ? 9 : 6; }
};

struct JointAngles {
    double hip = 0.0;    // rad
    double knee = 0.0;   // rad, [0, pi)
    double ankle = 0.0;  // rad; meaningless for NoFoot
};

struct LegLandmarks {
    Vec2 knee;
    Vec2 ankle;  // calf endpoint; the bare tip for NoFoot
    Vec2 heel;
    Vec2 toe;
};

// Hip-frame positions of the leg landmarks. Total and branch-free.
inline LegLandmarks forward_kinematics(const JointAngles& angles, const LegGeometry& geom,
                                       MorphologyKind kind) {
    LegLandmarks lm;
    const double calf_angle = angles.hip - angles.knee;
    lm.knee = geom.thigh_len * dir_from_vertical(angles.hip);
    lm.ankle = lm.knee + geom.calf_len * dir_from_vertical(calf_angle);
    if (kind == MorphologyKind::NoFoot) {
        lm.heel = lm.ankle;
        lm.toe = lm.ankle;
        return lm;
    }
    const double foot_angle = calf_angle + angles.ankle;
    const Vec2 fwd = dir_from_vertical(foot_angle);
    const Vec2 down = dir_from_vertical(foot_angle - kPi / 2.0);
    const Vec2 sole = lm.ankle + geom.foot_drop * down;
    lm.heel = sole - geom.heel_ext * fwd;
    lm.toe = sole + geom.toe_ext * fwd;
    return lm;
}

// Hip/knee solution placing the calf endpoint on `target`, knee-backward
// branch. Throws UnreachableTarget outside the annulus
// |L1-L2| <= ||target|| <= L1+L2.
inline JointAngles inverse_kinematics(Vec2 target, const LegGeometry& geom) {
    const double l1 = geom.thigh_len;
    const double l2 = geom.calf_len;
    const double d2 = target.x * target.x + target.y * target.y;
    const double d = std::sqrt(d2);
    constexpr double kTol = 1e-9;  // mm; admits boundary targets
    if (d > geom.max_reach() + kTol || d < geom.min_reach() - kTol || d < 1e-12) {
        throw UnreachableTarget("target (" + std::to_string(target.x) + ", " +
                                std::to_string(target.y) + ") mm outside reach [" +
                                std::to_string(geom.min_reach()) + ", " +
                                std::to_string(geom.max_reach()) + "]");
    }
    const double cos_outer = std::clamp((l1 * l1 + l2 * l2 - d2) / (2.0 * l1 * l2), -1.0, 1.0);
    const double cos_gamma = std::clamp((l1 * l1 + d2 - l2 * l2) / (2.0 * l1 * d), -1.0, 1.0);
    JointAngles out;
    out.knee = kPi - std::acos(cos_outer);
    out.hip = std::atan2(target.x, target.y) + std::acos(cos_gamma);
    return out;
}

// Ankle angle that levels the sole (heel.y == toe.y) for the given hip/knee.
inline double ankle_parallel_angle(double hip, double knee) {
    return kPi / 2.0 - (hip - knee);
}

}  // namespace gaitlab
