//! Finite balls in the `d`-regular tree, stored with directed edges and a
//! reversal involution, plus edge colorings.
//!
//! Vertices are numbered breadth first from the center. For an edge-centered
//! ball vertex 0 is `u0`, vertex 1 is `v0`, and each endpoint serves as the
//! other's parent. Colors are `0..d` internally and `1..=d` in JSON.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CenterKind {
    Vertex,
    Edge,
}

impl fmt::Display for CenterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CenterKind::Vertex => "vertex",
            CenterKind::Edge => "edge",
        })
    }
}

impl FromStr for CenterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vertex" => Ok(CenterKind::Vertex),
            "edge" => Ok(CenterKind::Edge),
            other => Err(Error::Input(format!(
                "center must be `vertex` or `edge`, not `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DirectedEdge {
    pub id: usize,
    pub origin: usize,
    pub target: usize,
    pub reverse: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeBall {
    d: usize,
    radius: usize,
    center: CenterKind,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    side: Vec<usize>,
    edges: Vec<DirectedEdge>,
    out: Vec<Vec<usize>>,
    coloring: Option<Vec<usize>>,
}

/// Vertex count of a ball, saturating on overflow.
pub fn ball_vertex_count(d: usize, radius: usize, center: CenterKind) -> u128 {
    let d = d as u128;
    let mut level = match center {
        CenterKind::Vertex => 1u128,
        CenterKind::Edge => 2,
    };
    let mut total = level;
    for k in 0..radius {
        let branching = if k == 0 && center == CenterKind::Vertex {
            d
        } else {
            d.saturating_sub(1)
        };
        level = level.saturating_mul(branching);
        total = total.saturating_add(level);
    }
    total
}

/// The uncolored radius-`radius` ball around a vertex or an edge.
pub fn build_ball(d: usize, radius: usize, center: CenterKind, caps: &Caps) -> Result<TreeBall> {
    if d < 3 {
        return Err(Error::Input(format!("tree balls need d >= 3, got {d}")));
    }
    caps.check_ball_vertices(ball_vertex_count(d, radius, center))?;

    let mut ball = TreeBall {
        d,
        radius,
        center,
        parent: Vec::new(),
        depth: Vec::new(),
        side: Vec::new(),
        edges: Vec::new(),
        out: Vec::new(),
        coloring: None,
    };
    let mut frontier = match center {
        CenterKind::Vertex => {
            ball.push_vertex(None, 0, 0);
            vec![0]
        }
        CenterKind::Edge => {
            ball.push_vertex(Some(1), 0, 0);
            ball.push_vertex(Some(0), 0, 1);
            ball.link(0, 1);
            vec![0, 1]
        }
    };
    for k in 0..radius {
        let mut next = Vec::new();
        for &v in &frontier {
            let children = if ball.parent[v].is_none() { d } else { d - 1 };
            for _ in 0..children {
                let c = ball.push_vertex(Some(v), k + 1, ball.side[v]);
                ball.link(v, c);
                next.push(c);
            }
        }
        frontier = next;
    }
    Ok(ball)
}

impl TreeBall {
    fn push_vertex(&mut self, parent: Option<usize>, depth: usize, side: usize) -> usize {
        self.parent.push(parent);
        self.depth.push(depth);
        self.side.push(side);
        self.out.push(Vec::new());
        self.parent.len() - 1
    }

    fn link(&mut self, from: usize, to: usize) {
        let id = self.edges.len();
        self.edges.push(DirectedEdge {
            id,
            origin: from,
            target: to,
            reverse: id + 1,
        });
        self.edges.push(DirectedEdge {
            id: id + 1,
            origin: to,
            target: from,
            reverse: id,
        });
        self.out[from].push(id);
        self.out[to].push(id + 1);
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn center(&self) -> CenterKind {
        self.center
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn edges(&self) -> &[DirectedEdge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &DirectedEdge {
        &self.edges[id]
    }

    /// Edges with origin `v`: parent edge first, then children in order.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// Distance from the center (from the nearer endpoint for edge balls).
    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// 0 for vertices on `u0`'s side of an edge ball, 1 on `v0`'s side.
    pub fn side(&self, v: usize) -> usize {
        self.side[v]
    }

    pub fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let p = self.parent[v];
        self.out[v]
            .iter()
            .map(|&e| self.edges[e].target)
            .filter(move |&t| Some(t) != p)
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.out[v].len() == self.d
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count())
            .filter(|&v| self.is_interior(v))
            .collect()
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.out[a]
            .iter()
            .copied()
            .find(|&e| self.edges[e].target == b)
    }

    pub fn is_colored(&self) -> bool {
        self.coloring.is_some()
    }

    pub fn color(&self, e: usize) -> Option<usize> {
        self.coloring.as_ref().map(|c| c[e])
    }

    /// The edge leaving `v` with color `c`.
    pub fn edge_with_color(&self, v: usize, c: usize) -> Option<usize> {
        let coloring = self.coloring.as_ref()?;
        self.out[v].iter().copied().find(|&e| coloring[e] == c)
    }

    pub fn with_coloring(&self, colors: Vec<usize>) -> Result<TreeBall> {
        if colors.len() != self.edges.len() {
            return Err(Error::Input(format!(
                "coloring has {} entries for {} directed edges",
                colors.len(),
                self.edges.len()
            )));
        }
        Ok(TreeBall {
            coloring: Some(colors),
            ..self.clone()
        })
    }

    /// Copy with a single edge recolored.
    pub fn with_color(&self, e: usize, color: usize) -> Result<TreeBall> {
        let mut colors = self
            .coloring
            .clone()
            .ok_or_else(|| Error::Input("ball is uncolored".into()))?;
        if e >= colors.len() {
            return Err(Error::Input(format!("no edge {e}")));
        }
        colors[e] = color;
        self.with_coloring(colors)
    }

    /// The coloring `c(g, g x_i) = i` of the free product of `d` copies of
    /// `Z/2`, restricted to this ball.
    pub fn legal_coloring(&self) -> TreeBall {
        let mut colors = vec![usize::MAX; self.edges.len()];
        let mut order: Vec<usize> = (0..self.vertex_count()).collect();
        order.sort_by_key(|&v| self.depth[v]);
        if self.center == CenterKind::Edge {
            colors[0] = 0;
            colors[1] = 0;
        }
        for v in order {
            let incoming = self.parent[v]
                .and_then(|p| self.edge_between(v, p))
                .map(|e| colors[e]);
            let mut free = (0..self.d).filter(|&c| Some(c) != incoming);
            for &e in &self.out[v] {
                let t = self.edges[e].target;
                if Some(t) == self.parent[v] {
                    continue;
                }
                let c = free.next().expect("at most d edges per vertex");
                colors[e] = c;
                colors[self.edges[e].reverse] = c;
            }
        }
        TreeBall {
            coloring: Some(colors),
            ..self.clone()
        }
    }

    pub fn check_coloring(&self) -> ColoringReport {
        let Some(colors) = &self.coloring else {
            return ColoringReport::fail(
                false,
                ColoringWitness {
                    reason: WitnessReason::Uncolored,
                    vertex: None,
                    edge: None,
                },
            );
        };
        for v in 0..self.vertex_count() {
            let mut seen = vec![false; self.d];
            for &e in &self.out[v] {
                let c = colors[e];
                if c >= self.d {
                    return ColoringReport::fail(
                        false,
                        ColoringWitness {
                            reason: WitnessReason::ColorOutOfRange,
                            vertex: Some(v),
                            edge: Some(e),
                        },
                    );
                }
                if std::mem::replace(&mut seen[c], true) {
                    return ColoringReport::fail(
                        false,
                        ColoringWitness {
                            reason: WitnessReason::RepeatedColor,
                            vertex: Some(v),
                            edge: Some(e),
                        },
                    );
                }
            }
        }
        for e in &self.edges {
            if colors[e.id] != colors[e.reverse] {
                return ColoringReport::fail(
                    true,
                    ColoringWitness {
                        reason: WitnessReason::ReverseMismatch,
                        vertex: Some(e.origin),
                        edge: Some(e.id),
                    },
                );
            }
        }
        ColoringReport {
            valid: true,
            legal: true,
            witness: None,
        }
    }

    /// Colors around every vertex are distinct elements of `0..d`.
    pub fn is_valid_coloring(&self) -> bool {
        self.check_coloring().valid
    }

    /// Valid, and every edge has the color of its reverse.
    pub fn is_legal(&self) -> bool {
        self.check_coloring().legal
    }

    pub fn to_json(&self) -> BallJson {
        BallJson {
            d: self.d,
            radius: self.radius,
            center: self.center,
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    id: e.id,
                    origin: e.origin,
                    reverse: e.reverse,
                    color: self.color(e.id).map(|c| c + 1),
                })
                .collect(),
        }
    }

    /// Reads the JSON form, which must describe the canonical ball for its
    /// `(d, radius, center)`; colors may be arbitrary.
    pub fn from_json(json: &BallJson, caps: &Caps) -> Result<TreeBall> {
        let ball = build_ball(json.d, json.radius, json.center, caps)?;
        if json.edges.len() != ball.edges.len() {
            return Err(Error::Input(format!(
                "expected {} directed edges, found {}",
                ball.edges.len(),
                json.edges.len()
            )));
        }
        let colored = json.edges.iter().filter(|e| e.color.is_some()).count();
        if colored != 0 && colored != json.edges.len() {
            return Err(Error::Input(format!(
                "{colored} of {} edges are colored; color all or none",
                json.edges.len()
            )));
        }
        let mut colors = Vec::with_capacity(colored);
        for (k, (e, mine)) in json.edges.iter().zip(&ball.edges).enumerate() {
            if (e.id, e.origin, e.reverse) != (mine.id, mine.origin, mine.reverse) {
                return Err(Error::Input(format!(
                    "edge entry {k} is {{id {}, origin {}, reverse {}}} but the ball has {{id {}, origin {}, reverse {}}}",
                    e.id, e.origin, e.reverse, mine.id, mine.origin, mine.reverse
                )));
            }
            match e.color {
                Some(0) => return Err(Error::Input(format!("edge {}: colors start at 1", e.id))),
                Some(c) => colors.push(c - 1),
                None => {}
            }
        }
        if colored == 0 {
            Ok(ball)
        } else {
            ball.with_coloring(colors)
        }
    }

    pub fn from_json_str(text: &str, caps: &Caps) -> Result<TreeBall> {
        let json: BallJson =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("ball JSON: {e}")))?;
        TreeBall::from_json(&json, caps)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallJson {
    pub d: usize,
    pub radius: usize,
    pub center: CenterKind,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub id: usize,
    pub origin: usize,
    pub reverse: usize,
    pub color: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessReason {
    Uncolored,
    ColorOutOfRange,
    RepeatedColor,
    ReverseMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColoringWitness {
    pub reason: WitnessReason,
    pub vertex: Option<usize>,
    pub edge: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColoringReport {
    pub valid: bool,
    pub legal: bool,
    pub witness: Option<ColoringWitness>,
}

impl ColoringReport {
    fn fail(valid: bool, witness: ColoringWitness) -> Self {
        ColoringReport {
            valid,
            legal: false,
            witness: Some(witness),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(d: usize, r: usize, c: CenterKind) -> TreeBall {
        build_ball(d, r, c, &Caps::default()).unwrap()
    }

    #[test]
    fn counts() {
        let b = ball(3, 1, CenterKind::Vertex);
        assert_eq!(b.vertex_count(), 4);
        assert_eq!(b.edges().len(), 6);
        assert_eq!(ball(3, 2, CenterKind::Vertex).vertex_count(), 10);
        let b = ball(4, 3, CenterKind::Vertex);
        for k in 1..=3 {
            let n = (0..b.vertex_count()).filter(|&v| b.depth(v) == k).count();
            assert_eq!(n, 4 * 3usize.pow(k as u32 - 1));
        }
        let e = ball(3, 2, CenterKind::Edge);
        assert_eq!(e.vertex_count(), 14);
        assert_eq!(ball_vertex_count(3, 2, CenterKind::Edge), 14);
        assert!(e.is_interior(0) && e.is_interior(1));
        assert_eq!(
            ball(3, 0, CenterKind::Edge).interior_vertices(),
            Vec::<usize>::new()
        );
        for (d, r, c) in [(3, 3, CenterKind::Vertex), (5, 2, CenterKind::Edge)] {
            assert_eq!(
                ball(d, r, c).vertex_count() as u128,
                ball_vertex_count(d, r, c)
            );
        }
    }

    #[test]
    fn caps_and_degree() {
        let caps = Caps {
            ball_vertices: 50,
            ..Caps::default()
        };
        assert!(matches!(
            build_ball(3, 5, CenterKind::Vertex, &caps),
            Err(Error::Resource(_))
        ));
        assert!(build_ball(2, 1, CenterKind::Vertex, &caps).is_err());
    }

    #[test]
    fn legal_coloring_is_legal_and_deterministic() {
        let b = ball(3, 1, CenterKind::Vertex).legal_coloring();
        let mut center: Vec<usize> = b
            .out_edges(0)
            .iter()
            .map(|&e| b.color(e).unwrap())
            .collect();
        center.sort();
        assert_eq!(center, vec![0, 1, 2]);
        for (d, r, c) in [
            (3, 2, CenterKind::Vertex),
            (4, 2, CenterKind::Edge),
            (5, 3, CenterKind::Vertex),
        ] {
            let x = ball(d, r, c).legal_coloring();
            assert!(x.is_valid_coloring() && x.is_legal());
            assert_eq!(x, ball(d, r, c).legal_coloring());
        }
    }

    #[test]
    fn broken_colorings_have_witnesses() {
        let b = ball(3, 2, CenterKind::Vertex).legal_coloring();
        // swap the colors of two edges at vertex 1 only
        let (e1, e2) = (b.out_edges(1)[1], b.out_edges(1)[2]);
        let swapped = b
            .with_color(e1, b.color(e2).unwrap())
            .unwrap()
            .with_color(e2, b.color(e1).unwrap())
            .unwrap();
        let report = swapped.check_coloring();
        assert!(report.valid && !report.legal);
        assert_eq!(
            report.witness.unwrap().reason,
            WitnessReason::ReverseMismatch
        );

        let ones = b.with_coloring(vec![0; b.edges().len()]).unwrap();
        let report = ones.check_coloring();
        assert!(!report.valid);
        assert_eq!(
            report.witness.as_ref().unwrap().reason,
            WitnessReason::RepeatedColor
        );
        assert_eq!(report.witness.unwrap().vertex, Some(0));
        assert!(!ball(3, 1, CenterKind::Vertex).is_valid_coloring());
    }

    #[test]
    fn json_round_trip() {
        let b = ball(3, 2, CenterKind::Edge).legal_coloring();
        let text = serde_json::to_string(&b.to_json()).unwrap();
        assert_eq!(TreeBall::from_json_str(&text, &Caps::default()).unwrap(), b);
        let plain = ball(3, 1, CenterKind::Vertex);
        let text = serde_json::to_string(&plain.to_json()).unwrap();
        assert_eq!(
            TreeBall::from_json_str(&text, &Caps::default()).unwrap(),
            plain
        );
        let mut bad = b.to_json();
        bad.edges[3].origin = 7;
        assert!(TreeBall::from_json(&bad, &Caps::default()).is_err());
    }
}
