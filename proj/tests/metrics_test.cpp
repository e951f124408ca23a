/* Copyright (c) 2026 The icsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "icsim/configs.hpp"
#include "icsim/metrics.hpp"
#include "icsim/sim.hpp"

namespace {

using icsim::AttackScenario;
using icsim::ContractViolation;
using icsim::CriticalStateSpec;
using icsim::DegenerateDenominator;
using icsim::DualState;
using icsim::ExtremumKind;
using icsim::InsufficientTrace;
using icsim::OperatingCurve;
using icsim::PlantIndex;
using icsim::SimulationTrace;
using icsim::ThreatCapability;
using icsim::VulnerableState;
using icsim::WorstCaseResult;

OperatingCurve make_curve(const std::string& metric, double t0, double dt,
                          const std::vector<double>& values)
{
    OperatingCurve c;
    c.metric = metric;
    for (size_t i = 0; i < values.size(); ++i) {
        c.times_s.push_back(t0 + static_cast<double>(i) * dt);
    }
    c.values = values;
    return c;
}

// mm of level change per second for a flow in m^3/hr through an area in m^2.
double mm_per_s(double q_m3ph, double area_m2) { return q_m3ph / (3.6 * area_m2); }

const PlantIndex& toy_index()
{
    static const icsim::PlantModel model = icsim::toy_plant();
    static const PlantIndex ix = PlantIndex::build(model);
    return ix;
}

DualState toy_initial()
{
    return icsim::initial_state_from(toy_index(), icsim::toy_initial_sensor_values(),
                                     icsim::toy_initial_actuator_states());
}

SimulationTrace toy_run(const AttackScenario& scenario, double horizon, double dt = 1.0)
{
    return icsim::run(toy_index(), toy_initial(), scenario, dt, horizon);
}

// ---------------------------------------------------------------------------
// impact_ratio
// ---------------------------------------------------------------------------

TEST(ImpactRatio, IdenticalCurvesGiveExactlyZero)
{
    std::mt19937 rng(41u);
    std::vector<double> values;
    for (int i = 0; i <= 100; ++i) {
        values.push_back(0.5 + std::uniform_real_distribution<double>(0.0, 2.0)(rng));
    }
    const OperatingCurve c = make_curve("F2", 0.0, 1.0, values);
    EXPECT_EQ(icsim::impact_ratio(c, c, 0.0, 100.0), 0.0);
}

TEST(ImpactRatio, StepDropToZeroAtMidWindowIsMinusHalf)
{
    // Constant 1.0 versus a drop to zero at t = 50 with the boundary sample
    // at the trapezoidal midpoint value 0.5: areas are exactly 100 and 50.
    std::vector<double> normal(101, 1.0), degraded(101, 1.0);
    degraded[50] = 0.5;
    for (size_t i = 51; i < degraded.size(); ++i) {
        degraded[i] = 0.0;
    }
    const OperatingCurve n = make_curve("FIT-101", 0.0, 1.0, normal);
    const OperatingCurve d = make_curve("FIT-101", 0.0, 1.0, degraded);
    EXPECT_EQ(icsim::impact_ratio(n, d, 0.0, 100.0), -0.5);
}

TEST(ImpactRatio, DoublingGivesPlusOne)
{
    const OperatingCurve n = make_curve("FIT-101", 0.0, 1.0, std::vector<double>(101, 1.0));
    const OperatingCurve d = make_curve("FIT-101", 0.0, 1.0, std::vector<double>(101, 2.0));
    EXPECT_DOUBLE_EQ(icsim::impact_ratio(n, d, 0.0, 100.0), 1.0);
}

TEST(ImpactRatio, ScaleInvariance)
{
    std::mt19937 rng(17u);
    std::uniform_real_distribution<double> dist(0.1, 3.0);
    std::vector<double> nv, dv;
    for (int i = 0; i <= 60; ++i) {
        nv.push_back(dist(rng));
        dv.push_back(dist(rng));
    }
    const OperatingCurve n = make_curve("m", 0.0, 0.5, nv);
    const OperatingCurve d = make_curve("m", 0.0, 0.5, dv);
    const double base = icsim::impact_ratio(n, d, 0.0, 30.0);
    for (double c : {0.25, 3.0, 1e6}) {
        auto scale = [c](OperatingCurve curve) {
            for (double& v : curve.values) {
                v *= c;
            }
            return curve;
        };
        EXPECT_NEAR(icsim::impact_ratio(scale(n), scale(d), 0.0, 30.0), base, 1e-12);
    }
}

TEST(ImpactRatio, WindowSubsetsSelectTheirOwnAreas)
{
    // Degradation confined to [50, 100): a window before it sees ratio 0.
    std::vector<double> normal(101, 2.0), degraded(101, 2.0);
    for (size_t i = 51; i < degraded.size(); ++i) {
        degraded[i] = 1.0;
    }
    degraded[50] = 1.5;
    const OperatingCurve n = make_curve("m", 0.0, 1.0, normal);
    const OperatingCurve d = make_curve("m", 0.0, 1.0, degraded);
    // The interval [49,50] already tapers toward the boundary sample, so the
    // clean window ends at 49.
    EXPECT_EQ(icsim::impact_ratio(n, d, 0.0, 49.0), 0.0);
    EXPECT_LT(icsim::impact_ratio(n, d, 50.0, 100.0), 0.0);
}

TEST(ImpactRatio, GridAndWindowViolations)
{
    const OperatingCurve a = make_curve("m", 0.0, 1.0, std::vector<double>(11, 1.0));
    const OperatingCurve b = make_curve("m", 0.0, 2.0, std::vector<double>(11, 1.0));
    const OperatingCurve shifted = make_curve("m", 0.5, 1.0, std::vector<double>(11, 1.0));
    const OperatingCurve other = make_curve("other", 0.0, 1.0, std::vector<double>(11, 1.0));
    EXPECT_THROW(icsim::impact_ratio(a, b, 0.0, 10.0), ContractViolation);
    EXPECT_THROW(icsim::impact_ratio(a, shifted, 0.0, 10.0), ContractViolation);
    EXPECT_THROW(icsim::impact_ratio(a, other, 0.0, 10.0), ContractViolation);
    // Window endpoints must be grid points, ordered, and inside the curve.
    EXPECT_THROW(icsim::impact_ratio(a, a, 0.25, 10.0), ContractViolation);
    EXPECT_THROW(icsim::impact_ratio(a, a, 0.0, 10.5), ContractViolation);
    EXPECT_THROW(icsim::impact_ratio(a, a, 10.0, 0.0), ContractViolation);
    EXPECT_THROW(icsim::impact_ratio(a, a, 0.0, 11.0), ContractViolation);
    // Non-uniform grid.
    OperatingCurve warped = a;
    warped.times_s[5] = 5.5;
    EXPECT_THROW(icsim::impact_ratio(warped, warped, 0.0, 10.0), ContractViolation);
}

TEST(ImpactRatio, ZeroNormalAreaIsDegenerateDenominator)
{
    const OperatingCurve n = make_curve("m", 0.0, 1.0, std::vector<double>(11, 0.0));
    const OperatingCurve d = make_curve("m", 0.0, 1.0, std::vector<double>(11, 1.0));
    EXPECT_THROW(icsim::impact_ratio(n, d, 0.0, 10.0), DegenerateDenominator);
}

TEST(ImpactRatio, CurveExtractionReadsPhysicalRealm)
{
    // Under a sensor spoof the cyber reading lies, but the operating curve
    // reflects the true delivered flow.
    const double horizon = 300.0;
    AttackScenario spoof{"s", {icsim::sensor_spoof("L1", 100.0, 0.0, horizon)}};
    const SimulationTrace trace = toy_run(spoof, horizon);
    const OperatingCurve f2 = icsim::operating_curve(toy_index(), trace, "F2");
    ASSERT_EQ(f2.times_s.size(), trace.samples.size());
    EXPECT_EQ(f2.metric, "F2");
    // Spoofed-low level latches fill mode: pump-out stays off, so F2 == 0.
    EXPECT_EQ(*std::max_element(f2.values.begin(), f2.values.end()), 0.0);
    EXPECT_THROW(icsim::operating_curve(toy_index(), trace, "nope"), ContractViolation);
}

// ---------------------------------------------------------------------------
// time_to_critical_state
// ---------------------------------------------------------------------------

TEST(TimeToCriticalState, AlreadyViolatingAtAttackStartIsZero)
{
    // Start the toy tank at its overflow level: the initial sample already
    // carries an overflow event.
    auto ix = std::cref(toy_index());
    DualState init = toy_initial();
    init.tank_levels[0] = 900.0;
    const SimulationTrace trace =
        icsim::run(ix, init, AttackScenario{"none", {}}, 1.0, 50.0);
    const auto ttcs =
        icsim::time_to_critical_state(ix, trace, CriticalStateSpec::tank_overflow("T1"), 0.0);
    ASSERT_TRUE(ttcs.has_value());
    EXPECT_EQ(*ttcs, 0.0);
}

TEST(TimeToCriticalState, ToyDrainMatchesClosedForm)
{
    // Force drain: inflow off, outflow on. Underflow level 50 is reached
    // from 500 after (500-50)/rate seconds.
    const double horizon = 1200.0;
    AttackScenario drain{"drain",
                         {icsim::command_spoof("Pump_in", "off", 0.0, horizon),
                          icsim::command_spoof("Pump_out", "on", 0.0, horizon)}};
    const SimulationTrace trace = toy_run(drain, horizon);
    const double expected = (500.0 - 50.0) / mm_per_s(1.14, 0.5);
    const auto ttcs = icsim::time_to_critical_state(
        toy_index(), trace, CriticalStateSpec::tank_underflow("T1"), 0.0);
    ASSERT_TRUE(ttcs.has_value());
    EXPECT_NEAR(*ttcs, expected, 1.0 + 1e-9);
}

TEST(TimeToCriticalState, MeasuredFromAttackCommencement)
{
    const double horizon = 1500.0;
    AttackScenario drain{"drain",
                         {icsim::command_spoof("Pump_in", "off", 200.0, horizon),
                          icsim::command_spoof("Pump_out", "on", 200.0, horizon)}};
    const SimulationTrace trace = toy_run(drain, horizon);
    const auto from_attack = icsim::time_to_critical_state(
        toy_index(), trace, CriticalStateSpec::tank_underflow("T1"), 200.0);
    const auto from_zero = icsim::time_to_critical_state(
        toy_index(), trace, CriticalStateSpec::tank_underflow("T1"), 0.0);
    ASSERT_TRUE(from_attack.has_value());
    ASSERT_TRUE(from_zero.has_value());
    // Before the attack the inflow pump is on, so the level climbs for
    // 200 s before the forced drain begins; the drain then has the extra
    // headroom to cover on its way down to the 50 mm underflow mark.
    const double rate = mm_per_s(1.14, 0.5);
    const double expected = (500.0 + 200.0 * rate - 50.0) / rate;
    EXPECT_NEAR(*from_attack, expected, 1.0 + 1e-9);
    // Measuring from t = 0 instead shifts the answer by exactly the delay.
    EXPECT_DOUBLE_EQ(*from_zero, *from_attack + 200.0);
}

TEST(TimeToCriticalState, NotReachedIsEncodedAsAbsent)
{
    const SimulationTrace trace = toy_run(AttackScenario{"none", {}}, 100.0);
    EXPECT_FALSE(icsim::time_to_critical_state(toy_index(), trace,
                                               CriticalStateSpec::tank_overflow("T1"), 0.0)
                     .has_value());
}

TEST(TimeToCriticalState, ZeroFlowNeedsTheFullSustainWindow)
{
    // Hand-built trace for F2: a 6 s dip below epsilon is not enough for a
    // 10 s sustain requirement; the later permanent outage is detected at
    // its first sample.
    const PlantIndex& ix = toy_index();
    const size_t f2 = ix.sensor_pos.at("F2");
    SimulationTrace trace;
    trace.dt = 1.0;
    DualState proto = toy_initial();
    auto value_at = [&](int t) {
        if (t >= 20 && t <= 25) {
            return 0.005; // short dip, 6 samples
        }
        if (t >= 40) {
            return 0.0; // permanent outage
        }
        return 1.0;
    };
    for (int t = 0; t <= 60; ++t) {
        DualState s = proto;
        s.time = t;
        s.physical_sensors[f2] = value_at(t);
        trace.samples.push_back(s);
    }
    const auto ttcs = icsim::time_to_critical_state(
        ix, trace, CriticalStateSpec::zero_flow("F2", 0.01, 10.0), 0.0);
    ASSERT_TRUE(ttcs.has_value());
    EXPECT_EQ(*ttcs, 40.0);

    // Truncate so the outage window no longer fits: not reached.
    SimulationTrace shorter = trace;
    shorter.samples.resize(50); // last time 49 < 40 + 10
    EXPECT_FALSE(icsim::time_to_critical_state(
                     ix, shorter, CriticalStateSpec::zero_flow("F2", 0.01, 10.0), 0.0)
                     .has_value());
    // One more sample and the window closes exactly at the trace end.
    SimulationTrace exact = trace;
    exact.samples.resize(51); // last time 50 == 40 + 10
    EXPECT_TRUE(icsim::time_to_critical_state(
                    ix, exact, CriticalStateSpec::zero_flow("F2", 0.01, 10.0), 0.0)
                    .has_value());
}

TEST(TimeToCriticalState, AnyPredicateOfTheDisjunctionCounts)
{
    const double horizon = 1200.0;
    AttackScenario drain{"drain",
                         {icsim::command_spoof("Pump_in", "off", 0.0, horizon),
                          icsim::command_spoof("Pump_out", "on", 0.0, horizon)}};
    const SimulationTrace trace = toy_run(drain, horizon);
    CriticalStateSpec spec;
    spec.predicates = {
        CriticalStateSpec::tank_overflow("T1").predicates[0],  // never fires
        CriticalStateSpec::tank_underflow("T1").predicates[0], // fires at ~710 s
        CriticalStateSpec::zero_flow("F1", 0.01, 10.0).predicates[0], // fires at 1 s
    };
    const auto ttcs = icsim::time_to_critical_state(toy_index(), trace, spec, 0.0);
    ASSERT_TRUE(ttcs.has_value());
    // The initial sample still shows the pre-attack inflow; the forced-off
    // command lands on the first step, so F1 reads zero from t = 1 on.
    EXPECT_EQ(*ttcs, 1.0);
}

TEST(TimeToCriticalState, ValidationErrors)
{
    const SimulationTrace trace = toy_run(AttackScenario{"none", {}}, 50.0);
    const PlantIndex& ix = toy_index();
    EXPECT_THROW(
        icsim::time_to_critical_state(ix, trace, CriticalStateSpec::tank_overflow("T9"), 0.0),
        ContractViolation);
    EXPECT_THROW(
        icsim::time_to_critical_state(ix, trace, CriticalStateSpec::zero_flow("L1"), 0.0),
        ContractViolation);
    EXPECT_THROW(icsim::time_to_critical_state(
                     ix, trace, CriticalStateSpec::zero_flow("F2", -1.0, 10.0), 0.0),
                 ContractViolation);
    EXPECT_THROW(icsim::time_to_critical_state(ix, trace,
                                               CriticalStateSpec::tank_overflow("T1"), 999.0),
                 ContractViolation);
}

// ---------------------------------------------------------------------------
// find_vulnerable_states
// ---------------------------------------------------------------------------

TEST(FindVulnerableStates, ToyCycleBandsAreRecovered)
{
    const SimulationTrace trace = toy_run(AttackScenario{"none", {}}, 5000.0);
    const auto [high, low] = icsim::find_vulnerable_states(toy_index(), trace, "T1");
    const double step = mm_per_s(1.14, 0.5); // level change per 1 s sample
    EXPECT_EQ(high.kind, ExtremumKind::High);
    EXPECT_EQ(low.kind, ExtremumKind::Low);
    EXPECT_EQ(high.tank, "T1");
    const double high_level = high.snapshot.tank_levels[0];
    const double low_level = low.snapshot.tank_levels[0];
    // The controller reacts one sample after the threshold crossing, so each
    // extremum overshoots its band edge by less than one step.
    EXPECT_GE(high_level, 800.0);
    EXPECT_LE(high_level, 800.0 + step + 1e-9);
    EXPECT_LE(low_level, 200.0);
    EXPECT_GE(low_level, 200.0 - step - 1e-9);
}

TEST(FindVulnerableStates, SnapshotsAreTakenAtFirstAttainment)
{
    const SimulationTrace trace = toy_run(AttackScenario{"none", {}}, 5000.0);
    const auto [high, low] = icsim::find_vulnerable_states(toy_index(), trace, "T1");
    // Each snapshot is a real sample of the trace at its own reported time,
    // and no earlier steady-region sample attains the extremum.
    auto sample_at = [&](double t) {
        const size_t i = static_cast<size_t>(t / trace.dt + 0.5);
        return trace.samples.at(i);
    };
    EXPECT_EQ(sample_at(high.snapshot.time).tank_levels[0], high.snapshot.tank_levels[0]);
    EXPECT_EQ(sample_at(low.snapshot.time).tank_levels[0], low.snapshot.tank_levels[0]);
    EXPECT_LT(high.snapshot.time, low.snapshot.time + 5000.0); // sanity
    for (const DualState& s : trace.samples) {
        if (s.time >= high.snapshot.time) {
            break;
        }
        EXPECT_LT(s.tank_levels[0], high.snapshot.tank_levels[0] + 1e-9);
    }
}

TEST(FindVulnerableStates, ConstantTraceIsInsufficient)
{
    // All actuators forced off: the level never moves.
    const double horizon = 2000.0;
    AttackScenario freeze{"freeze",
                          {icsim::command_spoof("Pump_in", "off", 0.0, horizon),
                           icsim::command_spoof("Pump_out", "off", 0.0, horizon)}};
    const SimulationTrace trace = toy_run(freeze, horizon);
    EXPECT_THROW(icsim::find_vulnerable_states(toy_index(), trace, "T1"), InsufficientTrace);
}

TEST(FindVulnerableStates, SingleSweepIsInsufficient)
{
    // A pure drain has no reversal at all.
    const double horizon = 700.0;
    AttackScenario drain{"drain",
                         {icsim::command_spoof("Pump_in", "off", 0.0, horizon),
                          icsim::command_spoof("Pump_out", "on", 0.0, horizon)}};
    const SimulationTrace trace = toy_run(drain, horizon);
    EXPECT_THROW(icsim::find_vulnerable_states(toy_index(), trace, "T1"), InsufficientTrace);
    EXPECT_THROW(icsim::find_vulnerable_states(toy_index(), trace, "T9"), ContractViolation);
}

// ---------------------------------------------------------------------------
// worst_case_ttcs
// ---------------------------------------------------------------------------

TEST(WorstCaseTtcs, ToyOverflowWitnessIsTheLowSpoof)
{
    const SimulationTrace normal = toy_run(AttackScenario{"none", {}}, 5000.0);
    const auto [high, low] = icsim::find_vulnerable_states(toy_index(), normal, "T1");
    const WorstCaseResult result =
        icsim::worst_case_ttcs(toy_index(), low, ThreatCapability{{"L1"}, {}},
                               CriticalStateSpec::tank_overflow("T1"), 3000.0);
    EXPECT_EQ(result.scenario_name, "spoof:L1:low");
    ASSERT_TRUE(result.ttcs_s.has_value());
    // Spoofing the level at the low threshold latches fill mode; the tank
    // rises from the low vulnerable level to the 900 mm overflow mark.
    const double expected = (900.0 - low.snapshot.tank_levels[0]) / mm_per_s(1.14, 0.5);
    EXPECT_NEAR(*result.ttcs_s, expected, 1.0 + 1e-9);
    // The family for one sensor with two named thresholds has two members,
    // reported in name order.
    ASSERT_EQ(result.evaluated.size(), 2u);
    EXPECT_EQ(result.evaluated[0].scenario_name, "spoof:L1:high");
    EXPECT_EQ(result.evaluated[1].scenario_name, "spoof:L1:low");
    EXPECT_FALSE(result.evaluated[0].ttcs_s.has_value()); // high spoof drains instead
}

TEST(WorstCaseTtcs, EqualsBruteForceReenumeration)
{
    const SimulationTrace normal = toy_run(AttackScenario{"none", {}}, 5000.0);
    const auto [high, low] = icsim::find_vulnerable_states(toy_index(), normal, "T1");
    const ThreatCapability cap{{"L1", "F1", "F2"}, {"Pump_in", "Pump_out"}};
    const CriticalStateSpec spec = CriticalStateSpec::tank_underflow("T1");
    const double horizon = 3000.0;

    const WorstCaseResult result =
        icsim::worst_case_ttcs(toy_index(), high, cap, spec, horizon);

    // Independent enumeration, deliberately in a different order.
    struct Probe {
        std::string name;
        AttackScenario scenario;
    };
    std::vector<Probe> probes;
    for (const char* actuator : {"Pump_out", "Pump_in"}) {
        const icsim::FlowElementKind kind = icsim::FlowElementKind::Pump;
        for (bool enable : {true, false}) {
            const std::string label = icsim::state_label(kind, enable);
            probes.push_back({std::string("force:") + actuator + ":" + label,
                              AttackScenario{std::string("force:") + actuator + ":" + label,
                                             {icsim::command_spoof(actuator, label, 0.0,
                                                                   horizon)}}});
        }
    }
    for (const auto& [name, value] : toy_index().model->thresholds) {
        const std::string sensor = name.substr(0, name.find('.'));
        const std::string shortn = name.substr(name.find('.') + 1);
        probes.push_back({"spoof:" + sensor + ":" + shortn,
                          AttackScenario{"spoof:" + sensor + ":" + shortn,
                                         {icsim::sensor_spoof(sensor, value, 0.0, horizon)}}});
    }
    DualState init = high.snapshot;
    init.time = 0.0;
    std::optional<double> best;
    std::string best_name;
    for (const Probe& p : probes) {
        const SimulationTrace t = icsim::run(toy_index(), init, p.scenario, 1.0, horizon);
        const auto ttcs = icsim::time_to_critical_state(toy_index(), t, spec, 0.0);
        if (!ttcs) {
            continue;
        }
        if (!best || *ttcs < *best || (*ttcs == *best && p.name < best_name)) {
            best = ttcs;
            best_name = p.name;
        }
    }
    ASSERT_TRUE(best.has_value());
    ASSERT_TRUE(result.ttcs_s.has_value());
    EXPECT_EQ(*result.ttcs_s, *best);
    EXPECT_EQ(result.scenario_name, best_name);
    // F1/F2 have no named thresholds, so the family is 2 spoofs + 4 forces.
    EXPECT_EQ(result.evaluated.size(), 6u);
}

TEST(WorstCaseTtcs, IrrelevantSensorOnlyCapabilityIsNotReached)
{
    const SimulationTrace normal = toy_run(AttackScenario{"none", {}}, 5000.0);
    const auto [high, low] = icsim::find_vulnerable_states(toy_index(), normal, "T1");
    // F1 has no named thresholds: the canonical family is empty.
    const WorstCaseResult result =
        icsim::worst_case_ttcs(toy_index(), low, ThreatCapability{{"F1"}, {}},
                               CriticalStateSpec::tank_overflow("T1"), 2000.0);
    EXPECT_FALSE(result.ttcs_s.has_value());
    EXPECT_TRUE(result.scenario_name.empty());
    EXPECT_TRUE(result.evaluated.empty());
}

TEST(WorstCaseTtcs, CapabilityAndSpecAreValidated)
{
    const SimulationTrace normal = toy_run(AttackScenario{"none", {}}, 5000.0);
    const auto [high, low] = icsim::find_vulnerable_states(toy_index(), normal, "T1");
    EXPECT_THROW(icsim::worst_case_ttcs(toy_index(), low, ThreatCapability{{}, {}},
                                        CriticalStateSpec::tank_overflow("T1"), 1000.0),
                 ContractViolation);
    EXPECT_THROW(icsim::worst_case_ttcs(toy_index(), low, ThreatCapability{{"nope"}, {}},
                                        CriticalStateSpec::tank_overflow("T1"), 1000.0),
                 ContractViolation);
    EXPECT_THROW(icsim::worst_case_ttcs(toy_index(), low, ThreatCapability{{"L1"}, {}},
                                        CriticalStateSpec::tank_overflow("T9"), 1000.0),
                 ContractViolation);
    EXPECT_THROW(icsim::worst_case_ttcs(toy_index(), low, ThreatCapability{{"L1"}, {}},
                                        CriticalStateSpec::tank_overflow("T1"), 0.0),
                 ContractViolation);
}

TEST(WorstCaseTtcs, TtcsIsAntitoneInAttackSeverity)
{
    // Adding a disabling primitive to an attack never delays the critical
    // state on the toy model.
    const double horizon = 2000.0;
    const CriticalStateSpec spec = CriticalStateSpec::tank_underflow("T1");
    const auto ttcs_of = [&](const AttackScenario& sc) {
        const SimulationTrace t = toy_run(sc, horizon);
        const auto v = icsim::time_to_critical_state(toy_index(), t, spec, 0.0);
        return v ? *v : std::numeric_limits<double>::infinity();
    };
    AttackScenario base{"base", {icsim::sensor_spoof("L1", 800.0, 0.0, horizon)}};
    AttackScenario harder = base;
    harder.name = "harder";
    harder.primitives.push_back(icsim::command_spoof("Pump_in", "off", 0.0, horizon));
    EXPECT_LE(ttcs_of(harder), ttcs_of(base));

    AttackScenario weak{"weak", {icsim::command_spoof("Pump_in", "off", 0.0, horizon)}};
    AttackScenario strong = weak;
    strong.name = "strong";
    strong.primitives.push_back(icsim::command_spoof("Pump_out", "on", 0.0, horizon));
    EXPECT_LE(ttcs_of(strong), ttcs_of(weak));
    EXPECT_EQ(ttcs_of(weak), std::numeric_limits<double>::infinity());
    EXPECT_LT(ttcs_of(strong), std::numeric_limits<double>::infinity());
}

} // namespace
