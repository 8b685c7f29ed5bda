//! End-to-end runs through the public API.

use flee_core::sim::DamageModel;
use flee_core::{
    build_mapping, failure_probability, min_code_distance, plan_flight, simulate, simulate_with,
    sweep, CreEvent, HalfwayConvention, PhysicalParams, ReliabilityParams, ScenarioKind,
    SimOptions, StrikeScenario, SweepParameter, SweepSpec,
};

#[test]
fn solver_result_matches_the_sweep_row() {
    let p = PhysicalParams::reference();
    let spec = SweepSpec {
        parameter: SweepParameter::L,
        values: vec![1.0, 5.0, 10.0],
        scenarios: ScenarioKind::BOTH.to_vec(),
        convention: HalfwayConvention::Literal,
        d_max: 500,
    };
    let res = sweep(&spec, &p).unwrap();
    assert_eq!(res.rows.len(), 6);
    for row in &res.rows {
        let direct = min_code_distance(
            &PhysicalParams { l: row.value, ..p },
            &StrikeScenario::new(row.scenario, HalfwayConvention::Literal),
            500,
        );
        assert_eq!(row.min_d, direct);
    }
}

#[test]
fn strike_on_a_tiled_mapping_is_survived() {
    let p = PhysicalParams::reference().with_d(69);
    let m = build_mapping(3, 3, &p).unwrap();
    let target = &m.qubits[m.qubits.len() / 2];
    let event = CreEvent::new(target.qubit.midpoint_mm(p.l), 0);
    let plan = plan_flight(&m, &event, &p).unwrap();
    assert!(plan.flight(target.id).is_some(), "struck qubit must move");
    assert!(plan.max_steps() <= 3);

    let opts = SimOptions {
        model: DamageModel::EscapeAxis,
        dwell: None,
    };
    let out = simulate_with(&m, &[event], &p, &plan, &opts);
    assert!(out.all_survived(), "{:?}", out.destroyed_at);
}

#[test]
fn unmoved_qubits_are_lost_to_a_full_front() {
    let p = PhysicalParams::reference().with_d(9);
    let m = build_mapping(1, 1, &p).unwrap();
    let event = CreEvent::new(m.qubits[0].qubit.midpoint_mm(p.l), 0);
    let out = simulate(&m, &event, &p, &flee_core::MovePlan::empty(0));
    assert_eq!(out.losses(), m.qubits.len());
}

#[test]
fn reliability_is_bounded_by_its_limits() {
    for d in [2, 3, 5, 9] {
        let short = ReliabilityParams::new(0.1, 1e-9, d, 0.04).unwrap();
        let long = ReliabilityParams::new(0.1, 1e9, d, 0.04).unwrap();
        assert!((failure_probability(&short) - 0.04).abs() < 1e-6);
        assert!((failure_probability(&long) - 1.0).abs() < 1e-9);
    }
}
