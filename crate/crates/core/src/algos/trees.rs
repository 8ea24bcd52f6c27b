use std::collections::VecDeque;

use crate::broadcast::Schedule;
use crate::net::{Network, NodeId};

/// Lists the transmitters of a rooted tree in BFS order from the source.
fn bfs_schedule(net: &Network, parent: &[Option<NodeId>], power: &[f64]) -> Schedule {
    let n = net.len();
    let mut children: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for (v, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            children[p.0].push(NodeId(v));
        }
    }
    let mut entries = Vec::new();
    let mut queue = VecDeque::from([net.source()]);
    while let Some(u) = queue.pop_front() {
        if power[u.0] > 0.0 {
            entries.push((u, power[u.0]));
        }
        queue.extend(children[u.0].iter().copied());
    }
    Schedule::new(entries)
}

/// Broadcast Incremental Power: grow the covered set from the source, each
/// step adding the node that is cheapest to reach by raising the power of
/// an already covered node.
pub fn bip(net: &Network) -> Schedule {
    let n = net.len();
    let src = net.source();
    let mut covered = vec![false; n];
    let mut parent: Vec<Option<NodeId>> = vec![None; n];
    let mut power = vec![0.0f64; n];
    // Cheapest incremental cost to each uncovered node, and who pays it.
    let mut best: Vec<(f64, NodeId)> = vec![(f64::INFINITY, src); n];

    let offer = |t: NodeId, power: &[f64], covered: &[bool], best: &mut Vec<(f64, NodeId)>| {
        for v in 0..n {
            if !covered[v] {
                let cost = (net.dist_pow(t, NodeId(v)) - power[t.0]).max(0.0);
                if cost < best[v].0 || (cost == best[v].0 && t < best[v].1) {
                    best[v] = (cost, t);
                }
            }
        }
    };

    covered[src.0] = true;
    offer(src, &power, &covered, &mut best);
    for _ in 1..n {
        let v = (0..n)
            .filter(|&v| !covered[v])
            .min_by(|&a, &b| best[a].0.total_cmp(&best[b].0).then(a.cmp(&b)))
            .expect("uncovered nodes remain");
        let t = best[v].1;
        power[t.0] = power[t.0].max(net.dist_pow(t, NodeId(v)));
        covered[v] = true;
        parent[v] = Some(t);
        // Raising t lowers its cost to everyone; v is a new potential relay.
        offer(t, &power, &covered, &mut best);
        offer(NodeId(v), &power, &covered, &mut best);
    }
    bfs_schedule(net, &parent, &power)
}

/// Euclidean MST rooted at the source (Prim); each node transmits just far
/// enough to reach its farthest child.
pub fn mst_broadcast(net: &Network) -> Schedule {
    let n = net.len();
    let src = net.source();
    let mut in_tree = vec![false; n];
    let mut parent: Vec<Option<NodeId>> = vec![None; n];
    let mut link: Vec<(f64, NodeId)> = vec![(f64::INFINITY, src); n];
    let mut power = vec![0.0f64; n];

    in_tree[src.0] = true;
    let mut last = src;
    for _ in 1..n {
        for v in 0..n {
            if !in_tree[v] {
                let d = net.dist_sq(last, NodeId(v));
                if d < link[v].0 {
                    link[v] = (d, last);
                }
            }
        }
        let v = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| link[a].0.total_cmp(&link[b].0).then(a.cmp(&b)))
            .expect("nodes outside the tree remain");
        let p = link[v].1;
        in_tree[v] = true;
        parent[v] = Some(p);
        power[p.0] = power[p.0].max(net.dist_pow(p, NodeId(v)));
        last = NodeId(v);
    }
    bfs_schedule(net, &parent, &power)
}

/// The source alone, loud enough to reach the farthest node.
pub fn single_transmission(net: &Network) -> Schedule {
    let src = net.source();
    let p = net
        .nodes()
        .filter(|&v| v != src)
        .map(|v| net.dist_pow(src, v))
        .fold(0.0, f64::max);
    Schedule::new(vec![(src, p)])
}
