use serde::{Deserialize, Serialize};

use crate::broadcast::Schedule;
use crate::convert::ConversionTrace;
use crate::error::{Error, Result};
use crate::net::{pow_from_sq, Network, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    /// Center of the selected disk the bucket belongs to.
    pub owner: NodeId,
    /// `(r/2)^alpha` for the disk's radius `r`.
    pub capacity: f64,
    pub fill: f64,
}

impl Bucket {
    pub fn is_full(&self) -> bool {
        self.fill >= self.capacity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransferScenario {
    AllFull,
    SomeUnfilled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferOutcome {
    /// One per selected disk, in selection order.
    pub buckets: Vec<Bucket>,
    pub scenario: TransferScenario,
    /// Scaled power no bucket took.
    pub leftover: f64,
    /// Scaled cooperative power that entered the procedure.
    pub offered: f64,
    pub iterations: usize,
}

/// Pours the cooperative schedule's power, multiplied by `scale`, into one
/// bucket per selected disk.
///
/// A transmitter `v` may only feed the disks it is not strictly inside,
/// nearest first (ties by id). In iteration `j` every transmitter with power
/// left offers all of it to its `j`-th candidate; a full bucket declines and
/// a bucket never takes more than it has room for.
pub fn power_transfer(
    net: &Network,
    coop: &Schedule,
    trace: &ConversionTrace,
    scale: f64,
) -> Result<TransferOutcome> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "scale must be positive, got {scale}"
        )));
    }
    coop.validate(net)?;
    let alpha = net.alpha();

    let mut buckets: Vec<Bucket> = trace
        .selected_disks()
        .map(|d| Bucket {
            owner: d.center,
            capacity: pow_from_sq(d.radius_sq / 4.0, alpha),
            fill: 0.0,
        })
        .collect();

    struct Giver {
        remaining: f64,
        candidates: Vec<usize>,
    }
    let mut givers: Vec<Giver> = coop
        .transmitters()
        .map(|(v, p)| {
            let mut candidates: Vec<usize> = trace
                .selected_disks()
                .enumerate()
                .filter(|(_, d)| net.dist_sq(v, d.center) >= d.radius_sq)
                .map(|(k, _)| k)
                .collect();
            candidates.sort_by(|&a, &b| {
                let (ca, cb) = (buckets[a].owner, buckets[b].owner);
                net.dist_sq(v, ca)
                    .total_cmp(&net.dist_sq(v, cb))
                    .then(ca.cmp(&cb))
            });
            Giver {
                remaining: scale * p,
                candidates,
            }
        })
        .collect();
    let offered: f64 = givers.iter().map(|g| g.remaining).sum();

    let rounds = givers.iter().map(|g| g.candidates.len()).max().unwrap_or(0);
    let mut iterations = 0;
    for j in 0..rounds {
        if buckets.iter().all(Bucket::is_full) || givers.iter().all(|g| g.remaining <= 0.0) {
            break;
        }
        iterations += 1;
        for g in givers.iter_mut() {
            let Some(&k) = g.candidates.get(j) else {
                continue;
            };
            let b = &mut buckets[k];
            if g.remaining <= 0.0 || b.is_full() {
                continue;
            }
            let room = b.capacity - b.fill;
            if g.remaining >= room {
                g.remaining -= room;
                b.fill = b.capacity;
            } else {
                b.fill += g.remaining;
                g.remaining = 0.0;
            }
        }
    }

    let scenario = if buckets.iter().all(Bucket::is_full) {
        TransferScenario::AllFull
    } else {
        TransferScenario::SomeUnfilled
    };
    Ok(TransferOutcome {
        buckets,
        scenario,
        leftover: givers.iter().map(|g| g.remaining).sum(),
        offered,
        iterations,
    })
}
