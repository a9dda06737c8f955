use proptest::prelude::*;
use proptest::strategy::Strategy as _;
use wsntrack_cli::records::*;
use wsntrack_core::protocols::{Group, GroupAssignment};
use wsntrack_core::topology::NodeRole;
use wsntrack_core::{run, NodeId, SimConfig, Strategy};

fn round_trip<T: Table + PartialEq + std::fmt::Debug>(rows: &[T]) -> Vec<T> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows).unwrap();
    read_rows(buf.as_slice()).unwrap()
}

#[test]
fn run_outputs_reparse_exactly() {
    let cfg = SimConfig {
        duration_s: 40.0,
        noise_sigma_db: 2.0,
        ..SimConfig::default()
    };
    for s in Strategy::ALL {
        let report = run(&cfg, s).unwrap();
        let m = metrics_rows(&report);
        assert_eq!(round_trip(&m), m);
        let e = energy_rows(&report);
        assert_eq!(round_trip(&e), e);
        let l = localization_rows(&report);
        assert_eq!(round_trip(&l), l);
        let g = group_rows(&report.groups);
        assert_eq!(round_trip(&g), g);
        let c = vec![compare_row(&report)];
        assert_eq!(round_trip(&c), c);
        let w = sweep_rows("targets", 10.0, &report);
        assert_eq!(round_trip(&w), w);
    }
}

#[test]
fn headers_follow_fixed_column_order() {
    let mut buf = Vec::new();
    write_rows::<_, MetricsRow>(&mut buf, &[]).unwrap();
    assert_eq!(
        String::from_utf8(buf).unwrap(),
        "round,strategy,local_msgs,group_msgs,global_msgs,sink_msgs,drops,energy_consumed_total\n"
    );
    let row = EnergyRow {
        node_id: 3,
        class: NodeRole::Reference,
        tx_count: 1,
        rx_count: 2,
        consumed_mah: 0.5,
        remaining_mah: 26.5,
        est_lifetime_s: f64::INFINITY,
    };
    let mut buf = Vec::new();
    write_rows(&mut buf, &[row]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(
        text,
        "node_id,class,tx_count,rx_count,consumed_mAh,remaining_mAh,est_lifetime_s\n\
         3,reference,1,2,0.5,26.5,inf\n"
    );
}

#[test]
fn failed_localization_written_as_fail() {
    let rows = vec![
        LocalizationRow {
            round: 1,
            target_id: 4,
            error_m: None,
        },
        LocalizationRow {
            round: 1,
            target_id: 5,
            error_m: Some(0.25),
        },
    ];
    let mut buf = Vec::new();
    write_rows(&mut buf, &rows).unwrap();
    assert_eq!(
        String::from_utf8(buf.clone()).unwrap(),
        "round,target_id,error_m\n1,4,FAIL\n1,5,0.25\n"
    );
    assert_eq!(
        read_rows::<_, LocalizationRow>(buf.as_slice()).unwrap(),
        rows
    );
}

#[test]
fn group_members_space_separated() {
    let a = GroupAssignment {
        round: 2,
        groups: vec![
            Group {
                leader: NodeId(9),
                members: vec![NodeId(3), NodeId(11)],
                fallback: false,
            },
            Group {
                leader: NodeId(4),
                members: vec![],
                fallback: false,
            },
        ],
    };
    let rows = group_rows(&[a]);
    let mut buf = Vec::new();
    write_rows(&mut buf, &rows).unwrap();
    assert_eq!(
        String::from_utf8(buf).unwrap(),
        "round,leader_id,member_ids\n2,9,3 11\n2,4,\n"
    );
}

proptest! {
    #[test]
    fn any_float_survives(
        vals in prop::collection::vec(prop_oneof![any::<f64>().prop_filter("nan", |v| !v.is_nan()),
            Just(f64::INFINITY), Just(-0.0)], 1..20),
        fail in prop::collection::vec(any::<bool>(), 1..20),
    ) {
        let rows: Vec<LocalizationRow> = vals
            .iter()
            .zip(fail.iter().cycle())
            .enumerate()
            .map(|(i, (&v, &f))| LocalizationRow {
                round: i as u32,
                target_id: 7,
                error_m: (!f).then_some(v),
            })
            .collect();
        let back = round_trip(&rows);
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            prop_assert_eq!(a.error_m.map(f64::to_bits), b.error_m.map(f64::to_bits));
        }
    }

    #[test]
    fn sweep_rows_survive(setting in -1e9f64..1e9, value in any::<f64>(), seed: u64) {
        prop_assume!(!value.is_nan());
        let rows = vec![SweepRow {
            variable: "frequency".into(),
            setting,
            strategy: Strategy::Decentralized,
            metric: "sink_msgs".into(),
            value,
            seed,
        }];
        prop_assert_eq!(round_trip(&rows), rows);
    }
}
