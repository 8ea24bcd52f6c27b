use crate::broadcast::{Schedule, DELIVERY_TOLERANCE};
use crate::net::{Network, NodeId};

/// Greedy filling: repeatedly pick the (decoded transmitter, undecoded node)
/// pair whose top-up to the threshold costs the least additional power,
/// spend it, and let every node accumulate the spill-over.
///
/// Each round decodes at least its target, so there are at most `n - 1`
/// rounds of `O(n)` work. The result is a normalized cooperative schedule
/// ordered by first spend.
pub fn greedy_filling(net: &Network) -> Schedule {
    let n = net.len();
    let th = net.threshold();
    let floor = th - DELIVERY_TOLERANCE;
    let src = net.source();

    let mut energy = vec![0.0f64; n];
    let mut decoded = vec![false; n];
    let mut power = vec![0.0f64; n];
    let mut first_spend: Vec<NodeId> = Vec::new();
    // Closest decoded node (as d^alpha) for every undecoded node.
    let mut best: Vec<(f64, NodeId)> = vec![(f64::INFINITY, src); n];

    let mut newly = vec![src];
    decoded[src.0] = true;
    let mut remaining = n - 1;

    while remaining > 0 {
        for &x in &newly {
            for w in 0..n {
                if !decoded[w] {
                    let dp = net.dist_pow(x, NodeId(w));
                    if dp < best[w].0 {
                        best[w] = (dp, x);
                    }
                }
            }
        }
        newly.clear();

        let (target, cost) = (0..n)
            .filter(|&v| !decoded[v])
            .map(|v| (v, (th - energy[v]).max(0.0) * best[v].0))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("undecoded nodes remain");
        let t = best[target].1;

        if power[t.0] == 0.0 && cost > 0.0 {
            first_spend.push(t);
        }
        power[t.0] += cost;
        for w in 0..n {
            if !decoded[w] {
                energy[w] += cost / net.dist_pow(t, NodeId(w));
            }
        }
        for w in 0..n {
            if !decoded[w] && (w == target || energy[w] >= floor) {
                decoded[w] = true;
                remaining -= 1;
                newly.push(NodeId(w));
            }
        }
    }

    Schedule::new(first_spend.into_iter().map(|u| (u, power[u.0])).collect())
}
