//! Broadcast schedules and the two delivery models.
//!
//! A [`Schedule`] lists `(node, power)` pairs; list order is transmission
//! order. Nodes that are not listed, or are listed with power 0, do not
//! transmit and come after every transmitter in the order.
//!
//! * Cooperative (energy accumulation): a node decodes when the sum of the
//!   powers it received from all earlier transmissions reaches the threshold.
//! * Non-cooperative: some single earlier transmission must reach the
//!   threshold on its own.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{Network, NodeId};

/// Slack allowed below the threshold when comparing accumulated powers.
pub const DELIVERY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub entries: Vec<(NodeId, f64)>,
}

impl Schedule {
    pub fn new(entries: Vec<(NodeId, f64)>) -> Self {
        Schedule { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Merges repeated entries of a node into its first position, summing
    /// their powers.
    pub fn normalize(&self) -> Schedule {
        let mut slot: HashMap<NodeId, usize> = HashMap::with_capacity(self.entries.len());
        let mut out: Vec<(NodeId, f64)> = Vec::with_capacity(self.entries.len());
        for &(node, power) in &self.entries {
            match slot.get(&node) {
                Some(&i) => out[i].1 += power,
                None => {
                    slot.insert(node, out.len());
                    out.push((node, power));
                }
            }
        }
        Schedule { entries: out }
    }

    pub fn total_power(&self) -> f64 {
        self.entries.iter().map(|&(_, p)| p).sum()
    }

    /// Nodes with positive power, in transmission order.
    pub fn transmitters(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.entries.iter().copied().filter(|&(_, p)| p > 0.0)
    }

    pub fn power_of(&self, u: NodeId) -> f64 {
        self.entries
            .iter()
            .filter(|&&(v, _)| v == u)
            .map(|&(_, p)| p)
            .sum()
    }

    /// Every entry's power multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Schedule {
        Schedule {
            entries: self.entries.iter().map(|&(u, p)| (u, p * factor)).collect(),
        }
    }

    /// Checks the schedule against `net`: known nodes, finite non-negative
    /// powers, and at most one entry per node.
    pub fn validate(&self, net: &Network) -> Result<()> {
        let mut seen = vec![false; net.len()];
        for &(node, power) in &self.entries {
            if !net.contains(node) {
                return Err(Error::UnknownNode(node));
            }
            if !power.is_finite() || power < 0.0 {
                return Err(Error::InvalidPower { node, power });
            }
            if std::mem::replace(&mut seen[node.0], true) {
                return Err(Error::NotNormalized(node));
            }
        }
        Ok(())
    }
}

pub fn normalize(sched: &Schedule) -> Schedule {
    sched.normalize()
}

pub fn total_power(sched: &Schedule) -> f64 {
    sched.total_power()
}

/// Cooperation gain `pn / pc`.
pub fn gain(pn: f64, pc: f64) -> Result<f64> {
    if !(pc > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cooperative power must be positive, got {pc}"
        )));
    }
    Ok(pn / pc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeliveryMode {
    Cooperative,
    NonCooperative,
}

impl DeliveryMode {
    pub fn name(self) -> &'static str {
        match self {
            DeliveryMode::Cooperative => "cooperative",
            DeliveryMode::NonCooperative => "non-cooperative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeDelivery {
    pub node: NodeId,
    pub received: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeliveryReport {
    pub mode: DeliveryMode,
    /// Transmitters in schedule order, then non-transmitters by id.
    pub per_node: Vec<NodeDelivery>,
    pub all_delivered: bool,
    pub first_failure: Option<NodeId>,
}

impl DeliveryReport {
    pub fn received_at(&self, u: NodeId) -> Option<f64> {
        self.per_node
            .iter()
            .find(|d| d.node == u)
            .map(|d| d.received)
    }

    /// Turns a failed report into an error naming the first failing node.
    pub fn into_result(self) -> Result<Self> {
        match self.first_failure {
            None => Ok(self),
            Some(node) => {
                let received = self.received_at(node).unwrap_or(0.0);
                Err(Error::DeliveryFailed {
                    mode: self.mode.name(),
                    node,
                    received,
                })
            }
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node", "received", "ok"])?;
        for d in &self.per_node {
            w.write_record([
                d.node.to_string(),
                format!("{:e}", d.received),
                d.ok.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Transmission order plus the remaining (silent) nodes.
struct Ordering {
    transmitters: Vec<(NodeId, f64)>,
    silent: Vec<NodeId>,
}

fn ordering(net: &Network, sched: &Schedule) -> Result<Ordering> {
    sched.validate(net)?;
    let transmitters: Vec<(NodeId, f64)> = sched.transmitters().collect();
    let mut is_tx = vec![false; net.len()];
    for &(u, _) in &transmitters {
        is_tx[u.0] = true;
    }
    let silent = net.nodes().filter(|u| !is_tx[u.0]).collect();
    Ok(Ordering {
        transmitters,
        silent,
    })
}

fn received_from(net: &Network, mode: DeliveryMode, earlier: &[(NodeId, f64)], v: NodeId) -> f64 {
    let powers = earlier.iter().map(|&(u, p)| net.received(u, v, p));
    match mode {
        DeliveryMode::Cooperative => powers.sum(),
        DeliveryMode::NonCooperative => powers.fold(0.0, f64::max),
    }
}

pub fn check_with_tolerance(
    net: &Network,
    sched: &Schedule,
    mode: DeliveryMode,
    tolerance: f64,
) -> Result<DeliveryReport> {
    let order = ordering(net, sched)?;
    let floor = net.threshold() - tolerance;
    let mut per_node = Vec::with_capacity(net.len());
    let mut push = |node: NodeId, received: f64| {
        let ok = node == net.source() || received >= floor;
        per_node.push(NodeDelivery { node, received, ok });
    };
    for (k, &(v, _)) in order.transmitters.iter().enumerate() {
        push(v, received_from(net, mode, &order.transmitters[..k], v));
    }
    for &v in &order.silent {
        push(v, received_from(net, mode, &order.transmitters, v));
    }
    let first_failure = per_node.iter().find(|d| !d.ok).map(|d| d.node);
    Ok(DeliveryReport {
        mode,
        all_delivered: first_failure.is_none(),
        first_failure,
        per_node,
    })
}

/// Like [`check_with_tolerance`] but stops at the first failing node.
pub fn delivers_with_tolerance(
    net: &Network,
    sched: &Schedule,
    mode: DeliveryMode,
    tolerance: f64,
) -> Result<bool> {
    let order = ordering(net, sched)?;
    let floor = net.threshold() - tolerance;
    let ok = |v: NodeId, earlier: &[(NodeId, f64)]| {
        v == net.source() || received_from(net, mode, earlier, v) >= floor
    };
    let tx_ok = order
        .transmitters
        .iter()
        .enumerate()
        .all(|(k, &(v, _))| ok(v, &order.transmitters[..k]));
    Ok(tx_ok && order.silent.iter().all(|&v| ok(v, &order.transmitters)))
}

pub fn check_cooperative(net: &Network, sched: &Schedule) -> Result<DeliveryReport> {
    check_with_tolerance(net, sched, DeliveryMode::Cooperative, DELIVERY_TOLERANCE)
}

pub fn check_noncooperative(net: &Network, sched: &Schedule) -> Result<DeliveryReport> {
    check_with_tolerance(net, sched, DeliveryMode::NonCooperative, DELIVERY_TOLERANCE)
}
