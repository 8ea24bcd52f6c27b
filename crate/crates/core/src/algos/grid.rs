use serde::{Deserialize, Serialize};

use crate::broadcast::{self, DeliveryMode, Schedule, DELIVERY_TOLERANCE};
use crate::error::{Error, Result};
use crate::net::{GridNetwork, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCoopParams {
    /// Spacing between transmitting rows.
    pub spacing: usize,
    /// Rows `0` and `m - 1` transmit as well.
    pub include_border_rows: bool,
    /// The source's column relays the message vertically before the
    /// transmitting rows spread it horizontally.
    pub vertical_relay: bool,
}

impl GridCoopParams {
    pub fn new(spacing: usize, include_border_rows: bool) -> Self {
        GridCoopParams {
            spacing,
            include_border_rows,
            vertical_relay: true,
        }
    }
}

/// Columns (or rows) of a line of `m`, nearest to `start` first; at equal
/// distance the lower index goes first.
fn outward(m: usize, start: usize) -> impl Iterator<Item = usize> {
    let start = start as isize;
    std::iter::once(start)
        .chain((1..m as isize).flat_map(move |k| [start - k, start + k]))
        .filter(move |&i| i >= 0 && i < m as isize)
        .map(|i| i as usize)
}

/// Every node transmits `d^alpha`, in breadth-first order over the lattice
/// from the source (Manhattan distance, then id).
pub fn grid_all_nodes(grid: &GridNetwork) -> Schedule {
    let net = grid.network();
    let m = grid.side();
    let (sr, sc) = grid.row_col(net.source());
    let p = grid.spacing().powf(net.alpha());
    let mut ids: Vec<NodeId> = net.nodes().collect();
    ids.sort_by_key(|&u| {
        let (r, c) = (u.0 / m, u.0 % m);
        (r.abs_diff(sr) + c.abs_diff(sc), u.0)
    });
    Schedule::new(ids.into_iter().map(|u| (u, p)).collect())
}

/// The row-based cooperative construction.
///
/// Order: the source, then the source's row outward from the source, then
/// (with `vertical_relay`) the source's column outward, then every
/// transmitting row by distance from the source row, each spreading outward
/// from the source's column. Transmitting rows are the rows at a multiple
/// of `spacing` from the source row, plus the border rows when enabled.
/// Every transmitter uses `d^alpha`.
///
/// Delivery is not guaranteed for arbitrary spacing; check it with
/// [`broadcast::check_cooperative`] or use [`max_feasible_spacing`].
pub fn grid_coop_rows(grid: &GridNetwork, params: GridCoopParams) -> Result<Schedule> {
    let m = grid.side();
    let l = params.spacing;
    if l == 0 {
        return Err(Error::InvalidParameter("row spacing must be >= 1".into()));
    }
    let net = grid.network();
    let (sr, sc) = grid.row_col(net.source());
    let p = grid.spacing().powf(net.alpha());

    let mut listed = vec![false; net.len()];
    let mut entries = Vec::new();
    let mut push = |u: NodeId, entries: &mut Vec<(NodeId, f64)>| {
        if !std::mem::replace(&mut listed[u.0], true) {
            entries.push((u, p));
        }
    };

    for c in outward(m, sc) {
        push(grid.id(sr, c), &mut entries);
    }
    if params.vertical_relay {
        for r in outward(m, sr) {
            push(grid.id(r, sc), &mut entries);
        }
    }
    let rows = outward(m, sr).filter(|&r| {
        r != sr
            && (r.abs_diff(sr) % l == 0 || (params.include_border_rows && (r == 0 || r == m - 1)))
    });
    for r in rows {
        for c in outward(m, sc) {
            push(grid.id(r, c), &mut entries);
        }
    }
    Ok(Schedule::new(entries))
}

/// Largest spacing whose construction delivers cooperatively, by a full
/// linear scan over `1..=m-1` (delivery is not known to be monotone in the
/// spacing). Spacings of `m - 1` and above list the same rows once the
/// border rows transmit, so the scan stops at `m - 1`.
pub fn max_feasible_spacing(grid: &GridNetwork, include_border_rows: bool) -> Result<usize> {
    max_feasible_spacing_with(grid, GridCoopParams::new(1, include_border_rows))
}

/// As [`max_feasible_spacing`], taking the remaining construction flags from
/// `base` (its `spacing` is ignored).
pub fn max_feasible_spacing_with(grid: &GridNetwork, base: GridCoopParams) -> Result<usize> {
    let mut best = None;
    for l in 1..=grid.side().saturating_sub(1).max(1) {
        let sched = grid_coop_rows(grid, GridCoopParams { spacing: l, ..base })?;
        if broadcast::delivers_with_tolerance(
            grid.network(),
            &sched,
            DeliveryMode::Cooperative,
            DELIVERY_TOLERANCE,
        )? {
            best = Some(l);
        }
    }
    best.ok_or_else(|| Error::Invariant("no row spacing delivers, not even 1".into()))
}
