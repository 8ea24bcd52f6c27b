//! Browser bindings for the demo page. Every export returns a JSON string;
//! the `*_json` functions hold the logic so it can be tested natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use coopcast::algos::{self, GridCoopParams};
use coopcast::analysis;
use coopcast::broadcast::{check_with_tolerance, DeliveryMode, DELIVERY_TOLERANCE};
use coopcast::convert::convert;
use coopcast::net::{
    sample_placement, GridNetwork, Network, NodeId, PlacementKind, PlacementSpec, SourceRule,
};

fn placement(kind: &str, n: usize) -> Result<PlacementKind, String> {
    Ok(match kind {
        "uniform-disk" => PlacementKind::UniformDisk { n, radius: 1.0 },
        "gaussian" => PlacementKind::Gaussian { n, sigma: 0.5 },
        "clustered" => PlacementKind::Clustered {
            n,
            clusters: 4,
            sigma: 0.08,
        },
        "grid" => {
            let m = ((n as f64).sqrt().round() as usize).max(2);
            PlacementKind::Grid {
                m,
                d: 1.0 / m as f64,
            }
        }
        other => return Err(format!("unknown placement {other:?}")),
    })
}

fn positions(net: &Network) -> Value {
    json!(net
        .positions()
        .iter()
        .map(|p| [p.x, p.y])
        .collect::<Vec<_>>())
}

/// Samples a network, builds the greedy-filling schedule and converts it.
/// The result carries everything needed to draw the disks and both schedules.
pub fn conversion_demo_json(kind: &str, n: usize, alpha: f64, seed: u64) -> Result<String, String> {
    let spec = PlacementSpec {
        kind: placement(kind, n)?,
        seed,
    };
    let net =
        sample_placement(&spec, alpha, SourceRule::RandomUniform).map_err(|e| e.to_string())?;
    let coop = algos::greedy_filling(&net);
    let (converted, trace) = convert(&net, &coop).map_err(|e| e.to_string())?;
    let disks: Vec<Value> = trace
        .disks
        .values()
        .map(|d| {
            json!({
                "center": d.center,
                "radius": d.radius,
                "responsible": trace.responsible[&d.center],
                "selected": trace.selected.contains(&d.center),
            })
        })
        .collect();
    let doc = json!({
        "source": net.source(),
        "positions": positions(&net),
        "coop": coop.entries,
        "coop_total": coop.total_power(),
        "converted": converted.entries,
        "converted_total": converted.total_power(),
        "disks": disks,
        "selected": trace.selected,
        "winners": trace.winners.iter().map(|(c, w)| [c.0, w.0]).collect::<Vec<_>>(),
    });
    Ok(doc.to_string())
}

/// The row construction on an `m x m` grid at `alpha = 2`. `spacing = 0`
/// picks the largest spacing that still delivers.
pub fn grid_rows_demo_json(
    m: usize,
    spacing: usize,
    borders: bool,
    source: usize,
) -> Result<String, String> {
    let grid = GridNetwork::new(m, 1.0, 2.0, NodeId(source)).map_err(|e| e.to_string())?;
    let l = if spacing == 0 {
        algos::max_feasible_spacing(&grid, borders).map_err(|e| e.to_string())?
    } else {
        spacing
    };
    let sched =
        algos::grid_coop_rows(&grid, GridCoopParams::new(l, borders)).map_err(|e| e.to_string())?;
    let report = check_with_tolerance(
        grid.network(),
        &sched,
        DeliveryMode::Cooperative,
        DELIVERY_TOLERANCE,
    )
    .map_err(|e| e.to_string())?;
    let mut received = vec![Value::Null; m * m];
    for nd in &report.per_node {
        received[nd.node.0] = json!(if nd.received.is_finite() {
            nd.received
        } else {
            -1.0
        });
    }
    let all = algos::grid_all_nodes(&grid).total_power();
    let doc = json!({
        "m": m,
        "spacing": l,
        "source": source,
        "order": sched.entries.iter().map(|e| e.0).collect::<Vec<_>>(),
        "received": received,
        "delivered": report.all_delivered,
        "coop_total": sched.total_power(),
        "all_nodes_total": all,
        "gain": all / sched.total_power(),
        "coop_lower_bound": analysis::grid_coop_lower_bound(m, 1.0, 2.0).map_err(|e| e.to_string())?,
    });
    Ok(doc.to_string())
}

/// Lattice sums for grid sides 2..=80 and the brightening constants.
pub fn analysis_curves_json(alpha: f64, gamma: f64) -> Result<String, String> {
    let zeta: Vec<Value> = (2..=80usize)
        .map(|m| analysis::zeta_alpha(m * m, alpha).map(|z| json!([m, z])))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let beta = analysis::beta_constants(alpha, gamma)
        .map(|b| json!({"beta": b.beta, "beta1": b.beta1, "beta2": b.beta2}))
        .unwrap_or(Value::Null);
    Ok(json!({"alpha": alpha, "gamma": gamma, "zeta": zeta, "beta": beta}).to_string())
}

#[wasm_bindgen]
pub fn conversion_demo(kind: &str, n: u32, alpha: f64, seed: u32) -> Result<String, JsError> {
    conversion_demo_json(kind, n as usize, alpha, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn grid_rows_demo(m: u32, spacing: u32, borders: bool, source: u32) -> Result<String, JsError> {
    grid_rows_demo_json(m as usize, spacing as usize, borders, source as usize)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn analysis_curves(alpha: f64, gamma: f64) -> Result<String, JsError> {
    analysis_curves_json(alpha, gamma).map_err(|e| JsError::new(&e))
}
