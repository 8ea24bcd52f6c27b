//! Conversion of a cooperative schedule into a non-cooperative one.
//!
//! For every non-source node `u`, `R(u)` is the closest node transmitting
//! before `u`, and `D_u` is the closed disk around `u` through `R(u)`. A
//! greedy largest-first pass picks pairwise non-overlapping disks. Each
//! picked disk `D_i` hands power `(5 r_i)^alpha` to its winner: the earliest
//! transmitter among the responsible nodes of all not-larger disks touching
//! `D_i`. Winners keep their cooperative order.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::broadcast::{self, DeliveryMode, Schedule};
use crate::error::{Error, Result};
use crate::net::{pow_from_sq, Network, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: NodeId,
    pub radius: f64,
    /// Squared radius, kept alongside so powers derive from exact values.
    pub radius_sq: f64,
}

impl Disk {
    /// Closed disks: touching counts as overlapping.
    pub fn overlaps(&self, other: &Disk, net: &Network) -> bool {
        net.dist(self.center, other.center) <= self.radius + other.radius
    }

    /// `(5 r)^alpha`.
    pub fn winner_power(&self, alpha: f64) -> f64 {
        pow_from_sq(25.0 * self.radius_sq, alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConversionTrace {
    pub responsible: BTreeMap<NodeId, NodeId>,
    pub disks: BTreeMap<NodeId, Disk>,
    /// Centers of the selected disks, in selection order.
    pub selected: Vec<NodeId>,
    pub s_sets: BTreeMap<NodeId, BTreeSet<NodeId>>,
    pub winners: BTreeMap<NodeId, NodeId>,
    pub powers: BTreeMap<NodeId, f64>,
}

impl ConversionTrace {
    pub fn selected_disks(&self) -> impl Iterator<Item = &Disk> + '_ {
        self.selected.iter().map(|c| &self.disks[c])
    }

    /// `sum over selected disks of (5 r)^alpha`, the bound on the converted total.
    pub fn power_bound(&self, alpha: f64) -> f64 {
        self.selected_disks().map(|d| d.winner_power(alpha)).sum()
    }
}

/// Position of every node in the cooperative order; silent nodes share
/// `usize::MAX` and come last.
fn rank_of(net: &Network, coop: &Schedule) -> Result<Vec<usize>> {
    coop.validate(net)?;
    let mut rank = vec![usize::MAX; net.len()];
    for (k, (u, _)) in coop.transmitters().enumerate() {
        rank[u.0] = k;
    }
    Ok(rank)
}

/// `R(u)` for every non-source node: the closest earlier transmitter, ties
/// going to the one that transmits first.
pub fn responsible_map(net: &Network, coop: &Schedule) -> Result<BTreeMap<NodeId, NodeId>> {
    let rank = rank_of(net, coop)?;
    let transmitters: Vec<NodeId> = coop.transmitters().map(|(u, _)| u).collect();
    let mut out = BTreeMap::new();
    for u in net.nodes().filter(|&u| u != net.source()) {
        let earlier = &transmitters[..rank[u.0].min(transmitters.len())];
        let mut best: Option<(f64, NodeId)> = None;
        for &v in earlier {
            let d = net.dist_sq(u, v);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, v));
            }
        }
        match best {
            Some((_, v)) => {
                out.insert(u, v);
            }
            None => return Err(Error::NoEarlierTransmitter(u)),
        }
    }
    Ok(out)
}

pub fn build_disks(
    net: &Network,
    responsible: &BTreeMap<NodeId, NodeId>,
) -> BTreeMap<NodeId, Disk> {
    responsible
        .iter()
        .map(|(&u, &r)| {
            let radius_sq = net.dist_sq(u, r);
            (
                u,
                Disk {
                    center: u,
                    radius: radius_sq.sqrt(),
                    radius_sq,
                },
            )
        })
        .collect()
}

/// Greedy largest-first selection of pairwise non-overlapping disks; equal
/// radii go to the smaller center id.
pub fn select_independent(net: &Network, disks: &BTreeMap<NodeId, Disk>) -> Vec<NodeId> {
    let mut order: Vec<&Disk> = disks.values().collect();
    order.sort_by(|a, b| b.radius.total_cmp(&a.radius).then(a.center.cmp(&b.center)));
    let mut chosen: Vec<&Disk> = Vec::new();
    for d in order {
        if !chosen.iter().any(|c| c.overlaps(d, net)) {
            chosen.push(d);
        }
    }
    chosen.into_iter().map(|d| d.center).collect()
}

/// `S_i` and `w_i` for the selected disk centered at `center`.
pub fn winner_of(
    net: &Network,
    coop: &Schedule,
    disks: &BTreeMap<NodeId, Disk>,
    responsible: &BTreeMap<NodeId, NodeId>,
    center: NodeId,
) -> Result<(BTreeSet<NodeId>, NodeId)> {
    let rank = rank_of(net, coop)?;
    winner_with_rank(net, &rank, disks, responsible, center)
}

fn winner_with_rank(
    net: &Network,
    rank: &[usize],
    disks: &BTreeMap<NodeId, Disk>,
    responsible: &BTreeMap<NodeId, NodeId>,
    center: NodeId,
) -> Result<(BTreeSet<NodeId>, NodeId)> {
    let own = disks
        .get(&center)
        .ok_or_else(|| Error::Invariant(format!("no disk around node {center}")))?;
    let s_set: BTreeSet<NodeId> = disks
        .values()
        .filter(|d| d.radius <= own.radius && d.overlaps(own, net))
        .map(|d| responsible[&d.center])
        .collect();
    let winner = s_set
        .iter()
        .copied()
        .min_by_key(|u| rank[u.0])
        .ok_or_else(|| Error::Invariant(format!("empty S set for disk around {center}")))?;
    if rank[winner.0] == usize::MAX {
        return Err(Error::Invariant(format!(
            "winner {winner} does not transmit"
        )));
    }
    Ok((s_set, winner))
}

/// Winner powers: each selected disk raises its winner to at least `(5r)^alpha`.
pub fn assign_powers(
    selected: &[NodeId],
    winners: &BTreeMap<NodeId, NodeId>,
    disks: &BTreeMap<NodeId, Disk>,
    alpha: f64,
) -> BTreeMap<NodeId, f64> {
    let mut powers = BTreeMap::new();
    for center in selected {
        let w = winners[center];
        let p = disks[center].winner_power(alpha);
        let slot = powers.entry(w).or_insert(0.0f64);
        *slot = slot.max(p);
    }
    powers
}

/// Converts `coop` and checks the result delivers without cooperation.
pub fn convert(net: &Network, coop: &Schedule) -> Result<(Schedule, ConversionTrace)> {
    convert_with(net, coop, true)
}

pub fn convert_with(
    net: &Network,
    coop: &Schedule,
    verify: bool,
) -> Result<(Schedule, ConversionTrace)> {
    broadcast::check_cooperative(net, coop)?.into_result()?;

    let rank = rank_of(net, coop)?;
    let responsible = responsible_map(net, coop)?;
    let disks = build_disks(net, &responsible);
    let selected = select_independent(net, &disks);

    let mut s_sets = BTreeMap::new();
    let mut winners = BTreeMap::new();
    for &c in &selected {
        let (s, w) = winner_with_rank(net, &rank, &disks, &responsible, c)?;
        s_sets.insert(c, s);
        winners.insert(c, w);
    }
    let powers = assign_powers(&selected, &winners, &disks, net.alpha());

    let mut entries: Vec<(NodeId, f64)> = powers.iter().map(|(&u, &p)| (u, p)).collect();
    entries.sort_by_key(|&(u, _)| rank[u.0]);
    let out = Schedule::new(entries);

    if verify {
        let report = broadcast::check_with_tolerance(net, &out, DeliveryMode::NonCooperative, 0.0)?;
        if let Some(node) = report.first_failure {
            return Err(Error::ConversionNotDelivering {
                node,
                received: report.received_at(node).unwrap_or(0.0),
            });
        }
    }

    Ok((
        out,
        ConversionTrace {
            responsible,
            disks,
            selected,
            s_sets,
            winners,
            powers,
        },
    ))
}
