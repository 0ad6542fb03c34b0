//! Lightning bolts for two directions.
//!
//! A bolt is a sequence of points whose consecutive differences are
//! alternately perpendicular to `a¹` and `a²`: consecutive points share
//! alternately their `a¹`-level and their `a²`-level.
//!
//! Internally a configuration is viewed as a bipartite multigraph whose
//! vertices are the distinct `a¹`-levels and `a²`-levels and whose edges are
//! the points (point `x` joins level `a¹·x` to level `a²·x`). Bolts are trails
//! in that graph, closed bolts are cycles and orbits are connected components.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::incidence::{build_incidence, IncidenceStructure, PointConfig};
use crate::measure::{dot, Direction, DiscreteMeasure, Point};
use crate::rational::{self, Rational};

/// Which of the two level relations links a pair of consecutive bolt points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Link {
    /// Shared `a¹`-level.
    First,
    /// Shared `a²`-level.
    Second,
}

impl Link {
    pub fn other(self) -> Link {
        match self {
            Link::First => Link::Second,
            Link::Second => Link::First,
        }
    }

    fn index(self) -> usize {
        match self {
            Link::First => 0,
            Link::Second => 1,
        }
    }

    /// Link between points `j` and `j + 1` of a bolt starting with `first`.
    pub fn at(first: Link, j: usize) -> Link {
        if j % 2 == 0 {
            first
        } else {
            first.other()
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoltGraph {
    cfg: PointConfig,
    incidence: IncidenceStructure,
}

pub fn build_bolt_graph(points: Vec<Point>, a1: Direction, a2: Direction) -> Result<BoltGraph> {
    if a1.dim() == a2.dim() && a1.is_parallel_to(&a2) {
        return Err(Error::ParallelDirections);
    }
    let cfg = PointConfig::new(points, vec![a1, a2])?;
    let incidence = build_incidence(&cfg);
    Ok(BoltGraph { cfg, incidence })
}

impl BoltGraph {
    pub fn points(&self) -> &[Point] {
        self.cfg.points()
    }

    pub fn directions(&self) -> (&Direction, &Direction) {
        (&self.cfg.dirs()[0], &self.cfg.dirs()[1])
    }

    pub fn len(&self) -> usize {
        self.cfg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cfg.is_empty()
    }

    /// All pairs `j < j'` related by `link`, sorted.
    pub fn edges(&self, link: Link) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .incidence
            .groups(link.index())
            .iter()
            .flat_map(|g| {
                let m = &g.members;
                (0..m.len()).flat_map(move |a| (a + 1..m.len()).map(move |b| (m[a].min(m[b]), m[a].max(m[b]))))
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Points sharing the `link` level of point `j`, excluding `j`.
    pub fn neighbors(&self, j: usize, link: Link) -> Vec<usize> {
        let i = link.index();
        let g = &self.incidence.groups(i)[self.incidence.group_of(i, j)];
        g.members.iter().copied().filter(|&m| m != j).collect()
    }

    fn level_vertices(&self, j: usize) -> (usize, usize) {
        let s1 = self.incidence.level_count(0);
        (self.incidence.group_of(0, j), s1 + self.incidence.group_of(1, j))
    }

    fn level_vertex_count(&self) -> usize {
        self.incidence.level_count(0) + self.incidence.level_count(1)
    }
}

/// A finite bolt; `first_link` relates `points[0]` and `points[1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bolt {
    pub points: Vec<Point>,
    pub first_link: Link,
}

impl Bolt {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks distinctness of consecutive points and strict alternation.
    /// With `closed` the wrap-around pair must continue the alternation too.
    pub fn check(&self, a1: &Direction, a2: &Direction, closed: bool) -> Result<()> {
        let dirs = [a1, a2];
        let n = self.points.len();
        let pairs = if closed { n } else { n.saturating_sub(1) };
        if closed && n % 2 != 0 {
            return Err(Error::InvalidParameter("closed bolt must have even length".into()));
        }
        for j in 0..pairs {
            let (p, q) = (&self.points[j], &self.points[(j + 1) % n]);
            let a = dirs[Link::at(self.first_link, j).index()];
            if p == q || a.project(p)? != a.project(q)? {
                return Err(Error::InvalidParameter(format!("bolt link {j} breaks alternation")));
            }
        }
        Ok(())
    }
}

/// A closed bolt found inside a graph, with the indices of its points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedBolt {
    pub indices: Vec<usize>,
    pub bolt: Bolt,
}

impl ClosedBolt {
    /// `Σ (−1)^{j+1} δ_{pʲ}`, which annihilates both directions.
    pub fn alternating_measure(&self) -> DiscreteMeasure {
        let n = self.bolt.len();
        bolt_measure(&self.bolt, n).expect("closed bolt is nonempty").scale(&rational::int(n as i64))
    }
}

/// Finds a closed bolt, i.e. a cycle of the level multigraph. The search is
/// exhaustive and runs in near-linear time: points are added in index order
/// and the first point closing a cycle is reported together with the forest
/// path between its two levels.
pub fn find_closed_bolt(graph: &BoltGraph) -> Option<ClosedBolt> {
    let v = graph.level_vertex_count();
    let mut dsu = Dsu::new(v);
    let mut forest: Vec<Vec<(usize, usize)>> = vec![Vec::new(); v];
    for j in 0..graph.len() {
        let (u, w) = graph.level_vertices(j);
        if dsu.union(u, w) {
            forest[u].push((w, j));
            forest[w].push((u, j));
            continue;
        }
        // Path u = w0, w1, …, wr = w in the forest, through points f1…fr.
        let path = forest_path(&forest, u, w);
        let mut order: Vec<usize> = path[1..].to_vec();
        order.push(j);
        order.push(path[0]);
        let points = order.iter().map(|&i| graph.points()[i].clone()).collect();
        return Some(ClosedBolt { indices: order, bolt: Bolt { points, first_link: Link::First } });
    }
    None
}

fn forest_path(forest: &[Vec<(usize, usize)>], from: usize, to: usize) -> Vec<usize> {
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; forest.len()];
    let mut seen = vec![false; forest.len()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &(y, e) in &forest[x] {
            if !seen[y] {
                seen[y] = true;
                prev[y] = Some((x, e));
                queue.push_back(y);
            }
        }
    }
    let mut edges = Vec::new();
    let mut cur = to;
    while let Some((p, e)) = prev[cur] {
        edges.push(e);
        cur = p;
    }
    edges.reverse();
    edges
}

/// Equivalence classes of "lie on a common bolt", sorted by smallest member.
pub fn orbits(graph: &BoltGraph) -> Vec<Vec<usize>> {
    let mut dsu = Dsu::new(graph.level_vertex_count());
    for j in 0..graph.len() {
        let (u, w) = graph.level_vertices(j);
        dsu.union(u, w);
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut slot: Vec<Option<usize>> = vec![None; graph.level_vertex_count()];
    for j in 0..graph.len() {
        let root = dsu.find(graph.level_vertices(j).0);
        match slot[root] {
            Some(c) => classes[c].push(j),
            None => {
                slot[root] = Some(classes.len());
                classes.push(vec![j]);
            }
        }
    }
    classes
}

/// `μₙ = (1/n) Σ_{j=1}^{n} (−1)^{j+1} δ_{pʲ}`.
pub fn bolt_measure(bolt: &Bolt, n: usize) -> Result<DiscreteMeasure> {
    if n == 0 {
        return Err(Error::InvalidParameter("bolt measure needs n ≥ 1".into()));
    }
    if n > bolt.len() {
        return Err(Error::BoltTooShort { requested: n, available: bolt.len() });
    }
    let w = rational::ratio(1, n as i64);
    DiscreteMeasure::from_atoms(
        bolt.points[..n].iter().enumerate().map(|(j, p)| (p.clone(), if j % 2 == 0 { w.clone() } else { -w.clone() })),
    )
}

/// Produces the next bolt vertex from the previous one.
pub trait BoltRule: Send + Sync {
    /// `link` is the relation the new point must share with `prev`; `dir` is
    /// the corresponding direction.
    fn next(&self, prev: &Point, link: Link, dir: &Direction) -> Result<Point, String>;
}

/// Planar rule: the next point is where the level line of `prev` meets one of
/// two fixed lines, alternating between them (the target is the line `prev`
/// does not lie on; `line_a` when `prev` is on neither).
#[derive(Clone, Debug)]
pub struct LineShuttle {
    /// Lines `{x : n·x = c}` as `(n, c)`.
    pub line_a: (Vec<Rational>, Rational),
    pub line_b: (Vec<Rational>, Rational),
}

impl BoltRule for LineShuttle {
    fn next(&self, prev: &Point, _link: Link, dir: &Direction) -> Result<Point, String> {
        if prev.dim() != 2 || dir.dim() != 2 {
            return Err("line shuttle is planar".into());
        }
        let on_a = dot(&self.line_a.0, prev.coords()) == self.line_a.1;
        let (normal, offset) = if on_a { &self.line_b } else { &self.line_a };
        let a = dir.coords();
        let level = dot(a, prev.coords());
        // Solve [a; n] x = [level; offset].
        let det = &a[0] * &normal[1] - &a[1] * &normal[0];
        if det.is_zero() {
            return Err("level line is parallel to the target line".into());
        }
        let x = (&level * &normal[1] - &a[1] * offset) / &det;
        let y = (&a[0] * offset - &normal[0] * &level) / &det;
        Ok(Point::new(vec![x, y]).expect("two coordinates"))
    }
}

/// Rule-based infinite bolt: a seed prefix extended by a [`BoltRule`].
#[derive(Clone)]
pub struct BoltGenerator {
    pub a1: Direction,
    pub a2: Direction,
    pub seed: Vec<Point>,
    pub first_link: Link,
    pub rule: Arc<dyn BoltRule>,
}

impl fmt::Debug for BoltGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoltGenerator")
            .field("a1", &self.a1)
            .field("a2", &self.a2)
            .field("seed", &self.seed)
            .field("first_link", &self.first_link)
            .finish_non_exhaustive()
    }
}

impl BoltGenerator {
    /// The first `n` points, validated link by link.
    pub fn generate(&self, n: usize) -> Result<Bolt> {
        let dirs = [&self.a1, &self.a2];
        let mut points: Vec<Point> = Vec::with_capacity(n);
        for step in 0..n {
            let p = if step < self.seed.len() {
                self.seed[step].clone()
            } else {
                let link = Link::at(self.first_link, step - 1);
                self.rule
                    .next(&points[step - 1], link, dirs[link.index()])
                    .map_err(|reason| Error::GeneratorStalled { step, reason })?
            };
            if step > 0 {
                let prev = &points[step - 1];
                let a = dirs[Link::at(self.first_link, step - 1).index()];
                if &p == prev {
                    return Err(Error::GeneratorStalled { step, reason: "repeated point".into() });
                }
                if a.project(&p)? != a.project(prev)? {
                    return Err(Error::GeneratorStalled { step, reason: "level not shared".into() });
                }
            }
            points.push(p);
        }
        Ok(Bolt { points, first_link: self.first_link })
    }
}

/// A probe test function, evaluated exactly.
#[derive(Clone)]
pub enum ProbeTest {
    /// `g₁(a¹·x) + g₂(a²·x)`; subject to the `(2/n)(‖g₁‖ + ‖g₂‖)` bound.
    Ridge {
        name: String,
        g1: Arc<dyn Fn(&Rational) -> Rational + Send + Sync>,
        g2: Arc<dyn Fn(&Rational) -> Rational + Send + Sync>,
    },
    General { name: String, f: Arc<dyn Fn(&Point) -> Rational + Send + Sync> },
}

impl ProbeTest {
    pub fn name(&self) -> &str {
        match self {
            ProbeTest::Ridge { name, .. } | ProbeTest::General { name, .. } => name,
        }
    }

    /// Coordinate function `x ↦ x_i`.
    pub fn coordinate(name: &str, i: usize) -> Self {
        ProbeTest::General { name: name.into(), f: Arc::new(move |x: &Point| x.coords()[i].clone()) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRow {
    pub n: usize,
    pub test_name: String,
    pub abs_integral: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeVerdict {
    ConsistentWithZero,
    NotConsistent,
}

impl fmt::Display for ProbeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProbeVerdict::ConsistentWithZero => "consistent-with-zero",
            ProbeVerdict::NotConsistent => "not-consistent",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    /// Ordered by `n`, then by test index.
    pub rows: Vec<ProbeRow>,
    /// Per test: whether the ridge bound held for every `n` (`None` for general tests).
    pub ridge_bound_held: Vec<Option<bool>>,
    /// Per test: `|∫ f dμ_N|`.
    pub final_values: Vec<f64>,
    pub verdict: ProbeVerdict,
}

impl ProbeReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,test_name,abs_integral\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{:e}\n", r.n, r.test_name, r.abs_integral));
        }
        out
    }
}

/// Tabulates `|∫ f dμₙ|` for `n = 1…n_max` along a generated bolt.
///
/// A finite table cannot establish weak* convergence; the verdict only says
/// whether the evidence is consistent with `μₙ → 0`: every ridge test obeys
/// `|∫(g₁+g₂) dμₙ| ≤ (2/n)(‖g₁‖ + ‖g₂‖)` (sup norms over the levels of the
/// first `n` points) and every general test ends below `threshold`.
pub fn weak_star_probe(gen: &BoltGenerator, tests: &[ProbeTest], n_max: usize, threshold: f64) -> Result<ProbeReport> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("probe needs N ≥ 1".into()));
    }
    let bolt = gen.generate(n_max)?;
    let levels1: Vec<Rational> = bolt.points.iter().map(|p| dot(gen.a1.coords(), p.coords())).collect();
    let levels2: Vec<Rational> = bolt.points.iter().map(|p| dot(gen.a2.coords(), p.coords())).collect();

    let mut per_test: Vec<Vec<f64>> = Vec::with_capacity(tests.len());
    let mut ridge_bound_held = Vec::with_capacity(tests.len());
    for test in tests {
        let mut sum = Rational::zero();
        let mut values = Vec::with_capacity(n_max);
        let mut held = true;
        let (mut sup1, mut sup2) = (Rational::zero(), Rational::zero());
        for j in 0..n_max {
            let v = match test {
                ProbeTest::Ridge { g1, g2, .. } => {
                    let (v1, v2) = (g1(&levels1[j]), g2(&levels2[j]));
                    sup1 = sup1.max(v1.abs());
                    sup2 = sup2.max(v2.abs());
                    v1 + v2
                }
                ProbeTest::General { f, .. } => f(&bolt.points[j]),
            };
            if j % 2 == 0 {
                sum += v;
            } else {
                sum -= v;
            }
            // |S_n / n| ≤ (2/n)(‖g₁‖ + ‖g₂‖)  ⇔  |S_n| ≤ 2(‖g₁‖ + ‖g₂‖)
            if matches!(test, ProbeTest::Ridge { .. }) && sum.abs() > rational::int(2) * (&sup1 + &sup2) {
                held = false;
            }
            let n = rational::int(j as i64 + 1);
            values.push(rational::to_f64(&(sum.abs() / n)));
        }
        ridge_bound_held.push(matches!(test, ProbeTest::Ridge { .. }).then_some(held));
        per_test.push(values);
    }

    let mut rows = Vec::with_capacity(n_max * tests.len());
    for j in 0..n_max {
        for (t, test) in tests.iter().enumerate() {
            rows.push(ProbeRow { n: j + 1, test_name: test.name().to_string(), abs_integral: per_test[t][j] });
        }
    }
    let final_values: Vec<f64> = per_test.iter().map(|v| v[n_max - 1]).collect();
    let ok = tests.iter().enumerate().all(|(t, test)| match test {
        ProbeTest::Ridge { .. } => ridge_bound_held[t] == Some(true),
        ProbeTest::General { .. } => final_values[t] < threshold,
    });
    let verdict = if ok { ProbeVerdict::ConsistentWithZero } else { ProbeVerdict::NotConsistent };
    Ok(ProbeReport { rows, ridge_bound_held, final_values, verdict })
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    /// False when already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::rational::{int, ratio};

    fn grid2() -> BoltGraph {
        let pts = [[0, 0], [0, 1], [1, 0], [1, 1]].iter().map(|p| Point::from_ints(p)).collect();
        build_bolt_graph(pts, Direction::axis(2, 0), Direction::axis(2, 1)).unwrap()
    }

    fn orbit_graph(n: usize) -> BoltGraph {
        let gen = presets::paper_orbit();
        let bolt = gen.generate(n).unwrap();
        build_bolt_graph(bolt.points, gen.a1.clone(), gen.a2.clone()).unwrap()
    }

    #[test]
    fn grid_graph_is_an_alternating_four_cycle() {
        let g = grid2();
        assert_eq!(g.edges(Link::First), vec![(0, 1), (2, 3)]);
        assert_eq!(g.edges(Link::Second), vec![(0, 2), (1, 3)]);
        let cb = find_closed_bolt(&g).unwrap();
        assert_eq!(cb.indices, vec![0, 1, 3, 2]);
        let (a1, a2) = g.directions();
        cb.bolt.check(a1, a2, true).unwrap();
        assert!(cb.alternating_measure().is_annihilating(&[a1.clone(), a2.clone()]).unwrap());
    }

    #[test]
    fn orbit_truncation_is_a_path() {
        let g = orbit_graph(10);
        let e1 = g.edges(Link::First);
        let e2 = g.edges(Link::Second);
        assert_eq!(e1, vec![(0, 1), (2, 3), (4, 5), (6, 7), (8, 9)]);
        assert_eq!(e2, vec![(1, 2), (3, 4), (5, 6), (7, 8)]);
        assert!(find_closed_bolt(&g).is_none());
        assert_eq!(orbits(&g), vec![(0..10).collect::<Vec<_>>()]);
    }

    #[test]
    fn general_position_is_edgeless() {
        let pts = [[0, 0], [1, 5], [3, 2]].iter().map(|p| Point::from_ints(p)).collect();
        let g = build_bolt_graph(pts, Direction::axis(2, 0), Direction::axis(2, 1)).unwrap();
        assert!(g.edges(Link::First).is_empty() && g.edges(Link::Second).is_empty());
        assert_eq!(orbits(&g).len(), 3);
        assert!(find_closed_bolt(&g).is_none());
    }

    #[test]
    fn single_point_has_no_closed_bolt() {
        let g = build_bolt_graph(vec![Point::from_ints(&[1, 1])], Direction::axis(2, 0), Direction::axis(2, 1)).unwrap();
        assert!(find_closed_bolt(&g).is_none());
    }

    #[test]
    fn parallel_directions_rejected() {
        let a = Direction::from_ints(&[1, 2]).unwrap();
        let b = Direction::from_ints(&[-2, -4]).unwrap();
        assert!(matches!(build_bolt_graph(vec![Point::from_ints(&[0, 0])], a, b), Err(Error::ParallelDirections)));
    }

    #[test]
    fn two_disjoint_grids_give_two_orbits() {
        let pts = [[0, 0], [0, 1], [1, 0], [1, 1], [5, 7], [5, 8], [6, 7], [6, 8]]
            .iter()
            .map(|p| Point::from_ints(p))
            .collect();
        let g = build_bolt_graph(pts, Direction::axis(2, 0), Direction::axis(2, 1)).unwrap();
        assert_eq!(orbits(&g), vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
    }

    #[test]
    fn shared_pair_in_three_dimensions_is_a_closed_bolt() {
        let pts = vec![Point::from_ints(&[0, 0, 0]), Point::from_ints(&[0, 0, 1])];
        let g = build_bolt_graph(pts, Direction::axis(3, 0), Direction::axis(3, 1)).unwrap();
        let cb = find_closed_bolt(&g).unwrap();
        assert_eq!(cb.bolt.len(), 2);
        assert!(cb.alternating_measure().is_annihilating(&[Direction::axis(3, 0), Direction::axis(3, 1)]).unwrap());
    }

    #[test]
    fn bolt_measures() {
        let bolt = presets::paper_orbit().generate(6).unwrap();
        assert_eq!(bolt_measure(&bolt, 1).unwrap(), DiscreteMeasure::dirac(bolt.points[0].clone()));
        let mu4 = bolt_measure(&bolt, 4).unwrap();
        for (j, p) in bolt.points[..4].iter().enumerate() {
            let w = mu4.atoms().iter().find(|(q, _)| q == p).unwrap().1.clone();
            assert_eq!(w, if j % 2 == 0 { ratio(1, 4) } else { ratio(-1, 4) });
        }
        for n in 1..=6 {
            assert_eq!(bolt_measure(&bolt, n).unwrap().total_variation(), int(1));
        }
        assert!(matches!(bolt_measure(&bolt, 7), Err(Error::BoltTooShort { requested: 7, available: 6 })));
    }

    #[test]
    fn constant_test_alternates() {
        let gen = presets::paper_orbit();
        let tests = [ProbeTest::General { name: "c".into(), f: Arc::new(|_: &Point| int(3)) }];
        let rep = weak_star_probe(&gen, &tests, 20, 1.0).unwrap();
        for r in &rep.rows {
            let expected = if r.n % 2 == 1 { 3.0 / r.n as f64 } else { 0.0 };
            assert_eq!(r.abs_integral, expected);
        }
    }

    #[test]
    fn stalled_generator_reports_step() {
        let gen = BoltGenerator {
            a1: Direction::from_ints(&[1, 1]).unwrap(),
            a2: Direction::from_ints(&[1, -1]).unwrap(),
            seed: vec![Point::from_ints(&[0, 0])],
            first_link: Link::First,
            // Both target lines pass through the origin: the first step stays put.
            rule: Arc::new(LineShuttle {
                line_a: (vec![int(1), int(0)], int(0)),
                line_b: (vec![int(1), int(-3)], int(0)),
            }),
        };
        assert!(matches!(gen.generate(3), Err(Error::GeneratorStalled { step: 1, .. })));
    }
}
