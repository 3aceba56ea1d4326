#!/usr/bin/env python3
"""Independent straight-line reference for the no-foot walker stepping rules.

Produces the golden fitness / velocity expectations frozen into the C++
tests (test_sim.cpp, acceptance_main.cpp). Kept deliberately flat and
stdlib-only so it can be audited against the documented stepping rules
rather than against the C++ implementation.

Run: python3 reference_walker.py
"""

import math

THIGH = 235.0
CALF = 235.0
GROUND_Y = 325.0
TIE_TOL = 1e-9

# gene ranges: (lo, hi) in genome order
RANGES = [
    (0.0, 235.0),    # touch_down_x
    (0.0, 235.0),    # touch_down_control_x
    (285.0, 325.0),  # touch_down_control_y
    (-235.0, 0.0),   # lift_off_x
    (-325.0, 0.0),   # lift_off_control_x
    (285.0, 325.0),  # lift_off_control_y
]

W_JOINTS = 3.5e-4
W_ANGLE = 5.0
STEP_COST = 0.5


def denormalize(genes):
    v = [lo + (hi - lo) * g for (lo, hi), g in zip(RANGES, genes)]
    return {
        "touch_down": (v[0], GROUND_Y),
        "touch_down_control": (v[1], v[2]),
        "lift_off": (v[3], GROUND_Y),
        "lift_off_control": (v[4], v[5]),
    }


def bezier(s, p0, c0, c1, p1):
    t = 1.0 - s
    x = (t * t * t) * p0[0] + (3.0 * t * t * s) * c0[0] + (3.0 * t * s * s) * c1[0] + (s * s * s) * p1[0]
    y = (t * t * t) * p0[1] + (3.0 * t * t * s) * c0[1] + (3.0 * t * s * s) * c1[1] + (s * s * s) * p1[1]
    return (x, y)


def foot_target(phase, prm):
    """Ground stroke on [0,0.5): touchdown -> liftoff; lift on [0.5,1): bezier back."""
    phase -= math.floor(phase)
    if phase < 0.5:
        s = phase / 0.5
        x = prm["touch_down"][0] + (prm["lift_off"][0] - prm["touch_down"][0]) * s
        return (x, GROUND_Y), "ground"
    s = (phase - 0.5) / 0.5
    return bezier(s, prm["lift_off"], prm["lift_off_control"], prm["touch_down_control"],
                  prm["touch_down"]), "lift"


def inverse_kinematics(x, y):
    d2 = x * x + y * y
    d = math.sqrt(d2)
    if d > THIGH + CALF + 1e-9 or d < 1e-12:
        raise ValueError("unreachable target")
    cos_outer = max(-1.0, min(1.0, (THIGH * THIGH + CALF * CALF - d2) / (2.0 * THIGH * CALF)))
    cos_gamma = max(-1.0, min(1.0, (THIGH * THIGH + d2 - CALF * CALF) / (2.0 * THIGH * d)))
    knee = math.pi - math.acos(cos_outer)
    hip = math.atan2(x, y) + math.acos(cos_gamma)
    return hip, knee


def tip_position(hip, knee):
    kx = THIGH * math.sin(hip)
    ky = THIGH * math.cos(hip)
    calf_angle = hip - knee
    return (kx + CALF * math.sin(calf_angle), ky + CALF * math.cos(calf_angle))


def leg_phase(cycle, leg):
    return cycle if leg == 0 else math.fmod(cycle + 0.5, 1.0)


def pose_at(cycle, prm):
    """Per-leg (hip, knee), tip landmark and gait state at a cycle phase."""
    angles, tips, states = [], [], []
    for leg in (0, 1):
        p = leg_phase(cycle, leg)
        target, state = foot_target(p, prm)
        hip, knee = inverse_kinematics(*target)
        angles.append((hip, knee))
        tips.append(tip_position(hip, knee))
        states.append(state)
    return angles, tips, states


def resolve_stance(tips, states):
    d0, d1 = tips[0][1], tips[1][1]
    if abs(d0 - d1) <= TIE_TOL:
        if states[1] == "ground" and states[0] != "ground":
            return 1
        return 0
    return 0 if d0 > d1 else 1


def evaluate(genes, period=1.0, spp=100, periods=12):
    prm = denormalize(genes)
    angles, tips, states = pose_at(0.0, prm)
    stance = resolve_stance(tips, states)
    contact_x = tips[stance][0]
    body_x_m = 0.0

    rewards = []
    acc_pos = 0.0
    acc_joints = 0.0
    for k in range(1, periods * spp + 1):
        phase = (k % spp) / spp
        new_angles, new_tips, new_states = pose_at(phase, prm)
        new_stance = resolve_stance(new_tips, new_states)
        new_contact_x = new_tips[new_stance][0]

        dpos_m = 0.0
        if new_stance == stance:  # vertex is always the tip for no-foot
            dpos_m = -(new_contact_x - contact_x) / 1000.0
        djoints = 0.0
        for leg in (0, 1):
            djoints += abs(new_angles[leg][0] - angles[leg][0])
            djoints += abs(new_angles[leg][1] - angles[leg][1])

        body_x_m += dpos_m
        acc_pos += dpos_m
        acc_joints += djoints
        angles, tips, states, stance, contact_x = (new_angles, new_tips, new_states, new_stance,
                                                   new_contact_x)
        if k % spp == 0:
            rewards.append(acc_pos - W_JOINTS * acc_joints - W_ANGLE * 0.0 - STEP_COST)
            acc_pos = 0.0
            acc_joints = 0.0

    fitness = 0.0
    for r in rewards:
        fitness += r
    return fitness, body_x_m, rewards


def main():
    genes = [0.5] * 6
    fitness, body_x_m, rewards = evaluate(genes)
    velocity = body_x_m / 12.0
    print("all-0.5 no-foot genome, defaults (period 1.0 s, 100 steps/period, 12 periods):")
    print(f"  fitness      = {fitness:.17g}")
    print(f"  distance_m   = {body_x_m:.17g}")
    print(f"  velocity_mps = {velocity:.17g}")
    print(f"  period_1_reward = {rewards[0]:.17g}")
    print(f"  period_2_reward = {rewards[1]:.17g}")
    print(f"  rewards_2_to_12_equal = {all(abs(r - rewards[1]) < 1e-12 for r in rewards[1:])}")


if __name__ == "__main__":
    main()
