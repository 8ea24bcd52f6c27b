//! Node placements and the simplified path-loss model.
//!
//! A [`Network`] is an immutable set of node positions with a path-loss
//! exponent, a decoding threshold and a source. The link gain between two
//! distinct nodes is `d^-alpha`.

use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Retries before a colliding sampled node is reported as an error.
pub const MAX_PLACEMENT_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i)
    }
}

/// A point in the plane, serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2D { x, y }
    }

    pub fn dist_sq(&self, other: &Point2D) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: &Point2D) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point2D {
    fn from(p: [f64; 2]) -> Self {
        Point2D::new(p[0], p[1])
    }
}

impl From<Point2D> for [f64; 2] {
    fn from(p: Point2D) -> Self {
        [p.x, p.y]
    }
}

/// `(d^2)^(alpha/2)`, i.e. `d^alpha` computed from a squared distance.
///
/// Working from squared distances keeps integer-lattice values exact.
#[inline]
pub fn pow_from_sq(dist_sq: f64, alpha: f64) -> f64 {
    if alpha == 2.0 {
        dist_sq
    } else {
        dist_sq.powf(0.5 * alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkDoc", into = "NetworkDoc")]
pub struct Network {
    positions: Vec<Point2D>,
    alpha: f64,
    threshold: f64,
    source: NodeId,
}

#[derive(Serialize, Deserialize)]
struct NetworkDoc {
    alpha: f64,
    #[serde(default = "default_threshold")]
    threshold: f64,
    source: usize,
    positions: Vec<Point2D>,
}

fn default_threshold() -> f64 {
    1.0
}

impl TryFrom<NetworkDoc> for Network {
    type Error = Error;

    fn try_from(doc: NetworkDoc) -> Result<Self> {
        Network::with_threshold(doc.positions, doc.alpha, doc.threshold, NodeId(doc.source))
    }
}

impl From<Network> for NetworkDoc {
    fn from(net: Network) -> Self {
        NetworkDoc {
            alpha: net.alpha,
            threshold: net.threshold,
            source: net.source.0,
            positions: net.positions,
        }
    }
}

impl Network {
    /// Builds a network with decoding threshold 1.
    pub fn new(positions: Vec<Point2D>, alpha: f64, source: NodeId) -> Result<Self> {
        Network::with_threshold(positions, alpha, 1.0, source)
    }

    pub fn with_threshold(
        positions: Vec<Point2D>,
        alpha: f64,
        threshold: f64,
        source: NodeId,
    ) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::InvalidNetwork(format!(
                "need at least 2 nodes, got {}",
                positions.len()
            )));
        }
        if !alpha.is_finite() || alpha < 1.0 {
            return Err(Error::InvalidNetwork(format!(
                "path loss exponent must be finite and >= 1, got {alpha}"
            )));
        }
        if !threshold.is_finite() || threshold <= 0.0 {
            return Err(Error::InvalidNetwork(format!(
                "decoding threshold must be positive, got {threshold}"
            )));
        }
        if source.0 >= positions.len() {
            return Err(Error::UnknownNode(source));
        }
        if let Some(i) = positions.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidNetwork(format!(
                "node {i} has non-finite coordinates"
            )));
        }
        if let Some((a, b)) = find_coincident(&positions) {
            return Err(Error::InvalidNetwork(format!("nodes {a} and {b} coincide")));
        }
        Ok(Network {
            positions,
            alpha,
            threshold,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn positions(&self) -> &[Point2D] {
        &self.positions
    }

    pub fn position(&self, u: NodeId) -> Point2D {
        self.positions[u.0]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.positions.len()).map(NodeId)
    }

    pub fn contains(&self, u: NodeId) -> bool {
        u.0 < self.positions.len()
    }

    /// Same placement with a different source.
    pub fn with_source(&self, source: NodeId) -> Result<Network> {
        if !self.contains(source) {
            return Err(Error::UnknownNode(source));
        }
        Ok(Network {
            source,
            ..self.clone()
        })
    }

    /// Same placement with a different path-loss exponent.
    pub fn with_alpha(&self, alpha: f64) -> Result<Network> {
        Network::with_threshold(self.positions.clone(), alpha, self.threshold, self.source)
    }

    pub fn dist_sq(&self, u: NodeId, v: NodeId) -> f64 {
        self.positions[u.0].dist_sq(&self.positions[v.0])
    }

    pub fn dist(&self, u: NodeId, v: NodeId) -> f64 {
        self.dist_sq(u, v).sqrt()
    }

    /// `d_{u,v}^alpha`: the power `u` needs so that `v` receives exactly 1.
    pub fn dist_pow(&self, u: NodeId, v: NodeId) -> f64 {
        pow_from_sq(self.dist_sq(u, v), self.alpha)
    }

    /// Link gain `h_{u,v} = d_{u,v}^-alpha`.
    ///
    /// Panics if `u == v`: the model never has a node receive from itself.
    pub fn link_gain(&self, u: NodeId, v: NodeId) -> f64 {
        assert_ne!(u, v, "link gain is undefined for a node and itself");
        1.0 / self.dist_pow(u, v)
    }

    /// Power received at `v` when `u` transmits with `power`.
    #[inline]
    pub fn received(&self, u: NodeId, v: NodeId, power: f64) -> f64 {
        power / self.dist_pow(u, v)
    }

    pub fn max_pairwise_dist(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, p) in self.positions.iter().enumerate() {
            for q in &self.positions[i + 1..] {
                best = best.max(p.dist_sq(q));
            }
        }
        best.sqrt()
    }

    pub fn min_pairwise_dist(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, p) in self.positions.iter().enumerate() {
            for q in &self.positions[i + 1..] {
                best = best.min(p.dist_sq(q));
            }
        }
        best.sqrt()
    }
}

/// Free function form of [`Network::link_gain`].
pub fn link_gain(net: &Network, u: NodeId, v: NodeId) -> f64 {
    net.link_gain(u, v)
}

fn find_coincident(positions: &[Point2D]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..positions.len()).collect();
    order.sort_by(|&a, &b| {
        let (p, q) = (positions[a], positions[b]);
        p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y))
    });
    order.windows(2).find_map(|w| {
        let (p, q) = (positions[w[0]], positions[w[1]]);
        (p.x == q.x && p.y == q.y).then(|| (w[0].min(w[1]), w[0].max(w[1])))
    })
}

/// An `m x m` lattice with spacing `d`. Node `(i, j)` has id `i*m + j` and
/// sits at `(i*d, j*d)`; "row `i`" is the set of nodes sharing the first index.
#[derive(Debug, Clone, PartialEq)]
pub struct GridNetwork {
    net: Network,
    m: usize,
    d: f64,
}

impl GridNetwork {
    pub fn new(m: usize, d: f64, alpha: f64, source: NodeId) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid side must be >= 2, got {m}"
            )));
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid spacing must be positive, got {d}"
            )));
        }
        if source.0 >= m * m {
            return Err(Error::UnknownNode(source));
        }
        let positions = (0..m * m)
            .map(|id| Point2D::new((id / m) as f64 * d, (id % m) as f64 * d))
            .collect();
        Ok(GridNetwork {
            net: Network::new(positions, alpha, source)?,
            m,
            d,
        })
    }

    /// Recognizes a network laid out exactly as [`GridNetwork::new`] would
    /// lay it out (up to a translation).
    pub fn from_network(net: &Network) -> Result<Self> {
        let n = net.len();
        let m = (n as f64).sqrt().round() as usize;
        if m * m != n || m < 2 {
            return Err(Error::NotAGrid(format!("{n} nodes is not a square >= 4")));
        }
        let origin = net.positions[0];
        let d = net.positions[1].y - origin.y;
        if !(d > 0.0) {
            return Err(Error::NotAGrid(
                "nodes 0 and 1 are not one spacing apart".into(),
            ));
        }
        let tol = 1e-9 * d * m as f64;
        for (id, p) in net.positions.iter().enumerate() {
            let ex = origin.x + (id / m) as f64 * d;
            let ey = origin.y + (id % m) as f64 * d;
            if (p.x - ex).abs() > tol || (p.y - ey).abs() > tol {
                return Err(Error::NotAGrid(format!("node {id} is off the lattice")));
            }
        }
        Ok(GridNetwork {
            net: net.clone(),
            m,
            d,
        })
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn into_network(self) -> Network {
        self.net
    }

    pub fn side(&self) -> usize {
        self.m
    }

    pub fn spacing(&self) -> f64 {
        self.d
    }

    pub fn id(&self, row: usize, col: usize) -> NodeId {
        NodeId(row * self.m + col)
    }

    pub fn row_col(&self, u: NodeId) -> (usize, usize) {
        (u.0 / self.m, u.0 % self.m)
    }

    pub fn with_source(&self, source: NodeId) -> Result<Self> {
        Ok(GridNetwork {
            net: self.net.with_source(source)?,
            ..self.clone()
        })
    }
}

/// Builds an `m x m` grid with spacing `d`, path-loss exponent 2.
pub fn build_grid(m: usize, d: f64, source: NodeId) -> Result<Network> {
    Ok(GridNetwork::new(m, d, 2.0, source)?.into_network())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PlacementKind {
    Grid {
        m: usize,
        d: f64,
    },
    UniformDisk {
        n: usize,
        radius: f64,
    },
    Gaussian {
        n: usize,
        sigma: f64,
    },
    Clustered {
        n: usize,
        clusters: usize,
        sigma: f64,
    },
}

impl PlacementKind {
    pub fn name(&self) -> &'static str {
        match self {
            PlacementKind::Grid { .. } => "grid",
            PlacementKind::UniformDisk { .. } => "uniform-disk",
            PlacementKind::Gaussian { .. } => "gaussian",
            PlacementKind::Clustered { .. } => "clustered",
        }
    }

    pub fn node_count(&self) -> usize {
        match *self {
            PlacementKind::Grid { m, .. } => m * m,
            PlacementKind::UniformDisk { n, .. }
            | PlacementKind::Gaussian { n, .. }
            | PlacementKind::Clustered { n, .. } => n,
        }
    }

    /// The same placement family resized to `n` nodes. Grids need `n` to be
    /// a perfect square.
    pub fn with_nodes(&self, n: usize) -> Result<PlacementKind> {
        Ok(match self.clone() {
            PlacementKind::Grid { d, .. } => {
                let m = (n as f64).sqrt().round() as usize;
                if m * m != n {
                    return Err(Error::InvalidParameter(format!(
                        "grid placements need a square node count, got {n}"
                    )));
                }
                PlacementKind::Grid { m, d }
            }
            PlacementKind::UniformDisk { radius, .. } => PlacementKind::UniformDisk { n, radius },
            PlacementKind::Gaussian { sigma, .. } => PlacementKind::Gaussian { n, sigma },
            PlacementKind::Clustered {
                clusters, sigma, ..
            } => PlacementKind::Clustered { n, clusters, sigma },
        })
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            PlacementKind::Grid { m, d } => {
                if m < 2 || !(d > 0.0) {
                    return bad(format!("grid needs m >= 2 and d > 0, got m={m}, d={d}"));
                }
            }
            PlacementKind::UniformDisk { n, radius } => {
                if n < 2 || !(radius > 0.0) {
                    return bad(format!(
                        "uniform disk needs n >= 2 and radius > 0, got n={n}, radius={radius}"
                    ));
                }
            }
            PlacementKind::Gaussian { n, sigma } => {
                if n < 2 || !(sigma > 0.0) {
                    return bad(format!(
                        "gaussian needs n >= 2 and sigma > 0, got n={n}, sigma={sigma}"
                    ));
                }
            }
            PlacementKind::Clustered { n, clusters, sigma } => {
                if n < 2 || clusters == 0 || !(sigma > 0.0) {
                    return bad(format!(
                        "clustered needs n >= 2, clusters >= 1 and sigma > 0, got n={n}, clusters={clusters}, sigma={sigma}"
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementSpec {
    pub kind: PlacementKind,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceRule {
    Fixed(NodeId),
    RandomUniform,
}

impl Default for SourceRule {
    fn default() -> Self {
        SourceRule::Fixed(NodeId(0))
    }
}

/// The generator behind every sampled placement: ChaCha8 seeded from a `u64`.
pub fn placement_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Samples a network. The RNG stream is consumed in a fixed order: cluster
/// centers (clustered only), then node positions in id order, then the
/// source when it is drawn at random.
pub fn sample_placement(
    spec: &PlacementSpec,
    alpha: f64,
    source_rule: SourceRule,
) -> Result<Network> {
    spec.kind.validate()?;
    let mut rng = placement_rng(spec.seed);
    let positions = match spec.kind {
        PlacementKind::Grid { m, d } => (0..m * m)
            .map(|id| Point2D::new((id / m) as f64 * d, (id % m) as f64 * d))
            .collect(),
        PlacementKind::UniformDisk { n, radius } => {
            sample_distinct(n, &mut rng, |rng| uniform_in_disk(rng, radius))?
        }
        PlacementKind::Gaussian { n, sigma } => {
            let normal =
                Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            sample_distinct(n, &mut rng, |rng| {
                Point2D::new(normal.sample(rng), normal.sample(rng))
            })?
        }
        PlacementKind::Clustered { n, clusters, sigma } => {
            let normal =
                Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            let centers: Vec<Point2D> = (0..clusters)
                .map(|_| uniform_in_disk(&mut rng, 1.0))
                .collect();
            sample_distinct(n, &mut rng, |rng| {
                let c = centers[rng.random_range(0..centers.len())];
                Point2D::new(c.x + normal.sample(rng), c.y + normal.sample(rng))
            })?
        }
    };
    let n = positions.len();
    let source = match source_rule {
        SourceRule::Fixed(s) => s,
        SourceRule::RandomUniform => NodeId(rng.random_range(0..n)),
    };
    Network::new(positions, alpha, source)
}

fn uniform_in_disk<R: Rng>(rng: &mut R, radius: f64) -> Point2D {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    Point2D::new(r * theta.cos(), r * theta.sin())
}

fn sample_distinct<R: Rng>(
    n: usize,
    rng: &mut R,
    mut draw: impl FnMut(&mut R) -> Point2D,
) -> Result<Vec<Point2D>> {
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    for index in 0..n {
        let mut attempts = 0;
        loop {
            let p = draw(rng);
            attempts += 1;
            if p.is_finite() && seen.insert((p.x.to_bits(), p.y.to_bits())) {
                out.push(p);
                break;
            }
            if attempts > MAX_PLACEMENT_RETRIES {
                return Err(Error::PlacementCollision { index, attempts });
            }
        }
    }
    Ok(out)
}
