use polariton_core::grid::{MomentumGrid, SpatialGrid};
use polariton_core::propagation::{
    dark_fraction_and_coupling_scale, run_plan, run_protocol, slow_light_delay, ControlSchedule, Profile,
    ProtocolOptions, ProtocolPlan, PulseSpec, Stage,
};
use polariton_core::spectra::{band_structure, formulas, Scheme};
use polariton_core::{Exec, PhysicalParams};

#[test]
fn balanced_hold_decays_at_dark_branch_rate() {
    let p = PhysicalParams::stationary(1.0, 1.0, 1.0, 2.0).with_gamma(0.5);
    let k0 = 0.3;
    let bands = band_structure(&p, &MomentumGrid::symmetric(k0, 3).unwrap(), Scheme::Stationary, Exec::Sequential)
        .unwrap();
    let rate = -bands.dark()[2].im;
    assert!(rate > 0.0);

    let grid = SpatialGrid::new(512.0, 1024).unwrap();
    let input = PulseSpec::new(0.0, 40.0).with_carrier(k0).prepare(&p, &grid, 1.0, 1.0, Exec::Parallel).unwrap();
    let duration = 1.0 / rate;
    let sched = ControlSchedule::constant(duration, 1.0, 1.0);
    let r = run_protocol(&p, &sched, &input, &ProtocolOptions::default()).unwrap();

    let measured = -r.retrieved_norm.ln() / (2.0 * duration);
    assert!(((measured - rate) / rate).abs() < 0.2, "{measured} vs {rate}");
    assert!(r.trace.windows(2).all(|w| w[1].norm <= w[0].norm * (1.0 + 1e-12)));
}

#[test]
fn swapping_controls_reverses_motion() {
    let p = PhysicalParams::stationary(1.0, 2.0, 1.0, 0.0);
    let grid = SpatialGrid::new(256.0, 512).unwrap();
    let sched = ControlSchedule::new(vec![
        Stage::new(40.0, Profile::constant(2.0), Profile::constant(1.0)),
        Stage::new(40.0, Profile::constant(1.0), Profile::constant(2.0)).fast(),
    ])
    .unwrap();
    let r = run_plan(&p, &grid, &sched, &PulseSpec::new(0.0, 8.0), &ProtocolOptions::default()).unwrap();
    let v: Vec<f64> = r.stages.iter().map(|s| (s.centroid_end - s.centroid_start) / (s.t_end - s.t_start)).collect();
    let expected = formulas::stationary_speed(&p);
    assert!(v[0] > 0.0 && v[1] < 0.0, "{v:?}");
    assert!((v[0] - expected).abs() < 0.05 * expected, "{} vs {expected}", v[0]);
}

#[test]
fn constant_single_control_moves_at_eit_speed() {
    let p = PhysicalParams::eit(1.0, 1.5, 0.0);
    let grid = SpatialGrid::new(512.0, 1024).unwrap();
    let duration = 200.0;
    let sched = ControlSchedule::constant(duration, 1.5, 0.0);
    let r = run_plan(&p, &grid, &sched, &PulseSpec::new(-150.0, 20.0), &ProtocolOptions::default()).unwrap();
    let s = &r.stages[0];
    let v = (s.centroid_end - s.centroid_start) / duration;
    let expected = formulas::eit_speed(&p);
    assert!(((v - expected) / expected).abs() < 0.01, "{v} vs {expected}");
}

#[test]
fn narrower_bandwidth_tracks_group_delay_better() {
    let p = PhysicalParams::eit(2.0, 1.0, 0.0);
    let grid = SpatialGrid::new(1024.0, 2048).unwrap();
    let errors: Vec<f64> = [3.0, 6.0, 20.0]
        .iter()
        .map(|&w| slow_light_delay(&p, &grid, &PulseSpec::new(-300.0, w), 60.0, Exec::Parallel).unwrap().relative_error)
        .collect();
    assert!(errors.windows(2).all(|e| e[1] < e[0]), "{errors:?}");
}

#[test]
fn broadband_pulse_is_flagged() {
    let p = PhysicalParams::eit(2.0, 1.0, 0.0);
    let grid = SpatialGrid::new(256.0, 512).unwrap();
    let r = slow_light_delay(&p, &grid, &PulseSpec::new(-60.0, 2.0), 10.0, Exec::Parallel).unwrap();
    assert!(r.warning.is_some());
}

#[test]
fn stored_pulse_round_trip() {
    let p = PhysicalParams::eit(1.0, 1.0, 0.0);
    let grid = SpatialGrid::new(256.0, 512).unwrap();
    let plan = ProtocolPlan {
        output_time: 40.0,
        ..ProtocolPlan::new(1.0, 30.0, 20.0)
    };
    let sched = plan.schedule().unwrap();
    let r = run_plan(&p, &grid, &sched, &PulseSpec::new(-60.0, 8.0), &ProtocolOptions::default()).unwrap();

    let hold = r.stage("hold").unwrap();
    let (spin, _) = dark_fraction_and_coupling_scale(&p).unwrap();
    let photonic = hold.mean_photonic_fraction.unwrap();
    assert!((photonic - (1.0 - spin)).abs() < 1e-2, "{photonic}");
    assert!(r.right_moving_fraction >= 0.99, "{}", r.right_moving_fraction);
    assert!(r.retrieval_efficiency <= 1.0 + 1e-8);
    assert!(r.retrieval_efficiency > 0.9, "{}", r.retrieval_efficiency);
    assert!(r.max_norm_deviation < 1e-8);
}

#[test]
fn slower_ramps_retrieve_more() {
    let p = PhysicalParams::eit(1.0, 1.0, 0.0);
    let grid = SpatialGrid::new(256.0, 512).unwrap();
    let effs: Vec<f64> = [1.0, 4.0, 16.0]
        .iter()
        .map(|&ramp| {
            let plan = ProtocolPlan {
                output_time: 30.0,
                ..ProtocolPlan::new(1.0, ramp, 10.0)
            };
            let sched = plan.schedule().unwrap();
            run_plan(&p, &grid, &sched, &PulseSpec::new(-40.0, 8.0), &ProtocolOptions::default())
                .unwrap()
                .retrieval_efficiency
        })
        .collect();
    assert!(effs.windows(2).all(|e| e[1] > e[0]), "{effs:?}");
}

#[test]
fn parallel_and_sequential_runs_agree_bitwise() {
    let p = PhysicalParams::stationary(1.0, 1.2, 0.4, 1.0);
    let grid = SpatialGrid::new(128.0, 256).unwrap();
    let sched = ControlSchedule::constant(10.0, 1.2, 0.4);
    let run = |exec| {
        let opts = ProtocolOptions { exec, ..Default::default() };
        run_plan(&p, &grid, &sched, &PulseSpec::new(0.0, 6.0), &opts).unwrap().final_state.unwrap()
    };
    assert_eq!(run(Exec::Parallel), run(Exec::Sequential));
}
