//! A seven-node network small enough to convert by hand.

use std::collections::BTreeMap;

use coopcast::convert::convert;
use coopcast::net::{Network, NodeId, Point2D};
use coopcast::{check_cooperative, check_noncooperative, Schedule};

fn network() -> Network {
    let pts = [
        (0.0, 0.0),
        (-2.0, -2.0),
        (4.0, 3.0),
        (7.0, 4.0),
        (4.0, 0.0),
        (4.0, -1.0),
        (5.0, -6.0),
    ];
    Network::new(
        pts.iter().map(|&(x, y)| Point2D::new(x, y)).collect(),
        2.0,
        NodeId(0),
    )
    .unwrap()
}

fn coop() -> Schedule {
    Schedule::new(
        [0, 2, 4, 5]
            .into_iter()
            .map(|u| (NodeId(u), 100.0))
            .collect(),
    )
}

#[test]
fn hand_conversion() {
    let net = network();
    let coop = coop();
    assert!(check_cooperative(&net, &coop).unwrap().all_delivered);

    let (out, trace) = convert(&net, &coop).unwrap();

    let responsible: BTreeMap<NodeId, NodeId> = [(1, 0), (2, 0), (3, 2), (4, 2), (5, 4), (6, 5)]
        .into_iter()
        .map(|(a, b)| (NodeId(a), NodeId(b)))
        .collect();
    assert_eq!(trace.responsible, responsible);

    let radius_sq: BTreeMap<usize, f64> = [
        (1, 8.0),
        (2, 25.0),
        (3, 10.0),
        (4, 9.0),
        (5, 1.0),
        (6, 26.0),
    ]
    .into();
    for (&c, d) in &trace.disks {
        assert_eq!(d.radius_sq, radius_sq[&c.0], "node {c}");
        assert!((d.radius - radius_sq[&c.0].sqrt()).abs() < 1e-12);
    }

    assert_eq!(trace.selected, vec![NodeId(6), NodeId(3), NodeId(1)]);
    let winners: BTreeMap<NodeId, NodeId> = [(6, 0), (3, 2), (1, 0)]
        .into_iter()
        .map(|(a, b)| (NodeId(a), NodeId(b)))
        .collect();
    assert_eq!(trace.winners, winners);

    // Node 0 wins twice and keeps the larger of (5 r)^2 = 650 and 200.
    assert_eq!(out.entries, vec![(NodeId(0), 650.0), (NodeId(2), 250.0)]);
    assert!(check_noncooperative(&net, &out).unwrap().all_delivered);
}

#[test]
fn trace_round_trips_through_json() {
    let net = network();
    let (_, trace) = convert(&net, &coop()).unwrap();
    let text = serde_json::to_string(&trace).unwrap();
    let back: coopcast::ConversionTrace = serde_json::from_str(&text).unwrap();
    assert_eq!(back, trace);
}
