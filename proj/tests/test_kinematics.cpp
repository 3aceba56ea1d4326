#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gaitlab/kinematics.hpp"
#include "gaitlab/rng.hpp"

using namespace gaitlab;

namespace {

LegGeometry paper_scale_legs() {
    // the worked examples use 170/170 links
    LegGeometry g;
    g.thigh_len = 170.0;
    g.calf_len = 170.0;
    return g;
}

// Independent root-find: the ankle angle that levels the sole, solved by
// bisecting toe.y - heel.y from forward_kinematics over a in (0, pi).
double solve_parallel_ankle(double hip, double knee, const LegGeometry& geom) {
    const auto gap = [&](double ankle) {
        const LegLandmarks lm =
            forward_kinematics({hip, knee, ankle}, geom, MorphologyKind::ActiveAnkle);
        return lm.toe.y - lm.heel.y;
    };
    double lo = 1e-9, hi = kPi - 1e-9;
    double glo = gap(lo);
    REQUIRE(glo * gap(hi) < 0.0);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (glo * gap(mid) <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            glo = gap(lo);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("forward kinematics worked examples") {
    const LegGeometry legs170 = paper_scale_legs();

    SECTION("straight leg points straight down") {
        const auto lm = forward_kinematics({0.0, 0.0, 0.0}, legs170, MorphologyKind::NoFoot);
        CHECK(lm.ankle.x == 0.0);
        CHECK(lm.ankle.y == 340.0);
        CHECK(lm.toe.x == lm.ankle.x);  // tip stands in for heel/toe without a foot
        CHECK(lm.toe.y == lm.ankle.y);
    }

    SECTION("perpendicular foot under a straight calf") {
        LegGeometry g = legs170;
        g.foot_drop = 40.0;
        g.heel_ext = 30.0;
        g.toe_ext = 80.0;
        const auto lm =
            forward_kinematics({0.0, 0.0, deg2rad(90.0)}, g, MorphologyKind::StaticAnkle);
        CHECK_THAT(lm.toe.x, Catch::Matchers::WithinAbs(80.0, 1e-9));
        CHECK_THAT(lm.toe.y, Catch::Matchers::WithinAbs(380.0, 1e-9));
        CHECK_THAT(lm.heel.x, Catch::Matchers::WithinAbs(-30.0, 1e-9));
        CHECK_THAT(lm.heel.y, Catch::Matchers::WithinAbs(380.0, 1e-9));
    }

    SECTION("45 deg hip, 90 deg knee folds the tip under the hip") {
        // direct trigonometric oracle: tip at (0, 170*sqrt(2))
        const auto lm = forward_kinematics({deg2rad(45.0), deg2rad(90.0), 0.0}, legs170,
                                           MorphologyKind::NoFoot);
        CHECK_THAT(lm.ankle.x, Catch::Matchers::WithinAbs(0.0, 1e-9));
        CHECK_THAT(lm.ankle.y, Catch::Matchers::WithinAbs(170.0 * std::sqrt(2.0), 1e-9));
    }

    SECTION("deterministic: identical inputs give bit-identical outputs") {
        const JointAngles a{0.3123, 1.0321, 1.777};
        const auto lm1 = forward_kinematics(a, legs170, MorphologyKind::ActiveAnkle);
        const auto lm2 = forward_kinematics(a, legs170, MorphologyKind::ActiveAnkle);
        CHECK(lm1.toe.x == lm2.toe.x);
        CHECK(lm1.toe.y == lm2.toe.y);
        CHECK(lm1.heel.x == lm2.heel.x);
        CHECK(lm1.knee.y == lm2.knee.y);
    }
}

TEST_CASE("inverse kinematics worked examples") {
    const LegGeometry legs170 = paper_scale_legs();

    SECTION("full extension") {
        const JointAngles a = inverse_kinematics({0.0, 340.0}, legs170);
        CHECK_THAT(a.hip, Catch::Matchers::WithinAbs(0.0, 1e-9));
        CHECK_THAT(a.knee, Catch::Matchers::WithinAbs(0.0, 1e-9));
    }

    SECTION("law-of-cosines oracle at 170*sqrt(2)") {
        const JointAngles a = inverse_kinematics({0.0, 170.0 * std::sqrt(2.0)}, legs170);
        CHECK_THAT(a.knee, Catch::Matchers::WithinAbs(deg2rad(90.0), 1e-9));
        CHECK_THAT(a.hip, Catch::Matchers::WithinAbs(deg2rad(45.0), 1e-9));
    }

    SECTION("beyond max reach is unreachable") {
        CHECK_THROWS_AS(inverse_kinematics({0.0, 400.0}, legs170), UnreachableTarget);
    }
}

TEST_CASE("FK(IK(p)) round-trip over the reachable annulus") {
    Rng rng(20240517);
    for (const LegGeometry& geom : {paper_scale_legs(), Morphology::standard(
                                                            MorphologyKind::NoFoot).geometry}) {
        for (int i = 0; i < 1000; ++i) {
            const double r = rng.uniform(geom.min_reach() + 1.0, geom.max_reach() - 1e-6);
            const double theta = rng.uniform(-kPi, kPi);
            const Vec2 target{r * std::sin(theta), r * std::cos(theta)};
            const JointAngles a = inverse_kinematics(target, geom);
            CHECK(a.knee >= 0.0);
            CHECK(a.knee < kPi);
            const auto lm = forward_kinematics(a, geom, MorphologyKind::NoFoot);
            REQUIRE(distance(lm.ankle, target) < 1e-6);
        }
    }
}

TEST_CASE("ankle angle that levels the sole") {
    const Morphology active = Morphology::standard(MorphologyKind::ActiveAnkle);

    SECTION("vertical calf wants a perpendicular foot") {
        CHECK_THAT(ankle_parallel_angle(0.0, 0.0), Catch::Matchers::WithinAbs(deg2rad(90.0), 1e-12));
    }

    SECTION("30 deg hip, straight knee") {
        const double a = ankle_parallel_angle(deg2rad(30.0), 0.0);
        CHECK_THAT(a, Catch::Matchers::WithinAbs(deg2rad(60.0), 1e-12));
        CHECK_THAT(a, Catch::Matchers::WithinAbs(
                          solve_parallel_ankle(deg2rad(30.0), 0.0, active.geometry), 1e-9));
    }

    SECTION("numeric oracle agrees for 10/20 deg") {
        const double hip = deg2rad(10.0), knee = deg2rad(20.0);
        const double a = ankle_parallel_angle(hip, knee);
        CHECK_THAT(a, Catch::Matchers::WithinAbs(solve_parallel_ankle(hip, knee, active.geometry),
                                                 1e-9));
    }

    SECTION("levels the sole everywhere") {
        Rng rng(7);
        for (int i = 0; i < 200; ++i) {
            const double hip = rng.uniform(-1.2, 1.2);
            const double knee = rng.uniform(0.0, 2.0);
            const double ankle = ankle_parallel_angle(hip, knee);
            const auto lm = forward_kinematics({hip, knee, ankle}, active.geometry,
                                               MorphologyKind::ActiveAnkle);
            REQUIRE(std::abs(lm.heel.y - lm.toe.y) < 1e-9);
        }
    }
}

TEST_CASE("morphology bookkeeping") {
    CHECK(Morphology::standard(MorphologyKind::NoFoot).genome_length() == 6);
    CHECK(Morphology::standard(MorphologyKind::StaticAnkle).genome_length() == 6);
    CHECK(Morphology::standard(MorphologyKind::ActiveAnkle).genome_length() == 9);
    CHECK(Morphology::standard(MorphologyKind::NoFoot).actuated_joint_count() == 2);
    CHECK(Morphology::standard(MorphologyKind::StaticAnkle).actuated_joint_count() == 2);
    CHECK(Morphology::standard(MorphologyKind::ActiveAnkle).actuated_joint_count() == 3);
    CHECK(Morphology::standard(MorphologyKind::NoFoot).geometry.foot_drop == 0.0);
    // legs must cover the whole controller workspace
    const LegGeometry g = Morphology::standard(MorphologyKind::ActiveAnkle).geometry;
    CHECK(g.max_reach() >= std::hypot(325.0, 325.0));
}
