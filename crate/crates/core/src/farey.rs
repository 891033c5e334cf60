//! The Farey graph: vertices are rationals plus ∞, with an edge wherever two
//! reduced fractions a/b, c/d satisfy ad − bc = ±1.
//!
//! Successive convergents of a negative continued fraction are always
//! adjacent here (the unimodularity of the recurrence), so every fraction
//! walks a path ⟨∞, v₀, v₁, …⟩ through the graph. Watching that walk is a
//! useful diagnostic: a convergent fraction's path settles down, while a
//! divergent one keeps returning to the same few vertices. Drawing edges as
//! hyperbolic geodesics — semicircles on the real axis, vertical rays to ∞ —
//! gives the classical picture, rendered here to SVG with exact rational
//! coordinates until the final pixel rounding.

use std::collections::HashMap;
use std::fmt::Write as _;

use num::{BigInt, BigRational, One, Signed};

use crate::error::{Error, Result};
use crate::moebius::convergents;
use crate::rational::{round_half_even, ExtendedRational};
use crate::stream::CoefficientStream;

/// Whether two distinct vertices share an edge: |ad − bc| = 1 on the
/// reduced forms a/b and c/d (with ∞ = 1/0). Equal vertices give 0.
pub fn is_adjacent(u: &ExtendedRational, v: &ExtendedRational) -> bool {
    let det = u.numerator() * v.denominator() - u.denominator() * v.numerator();
    det.abs().is_one()
}

/// A walk through the graph; consecutive vertices are adjacent whenever the
/// path came from [`path_from_stream`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FareyPath {
    vertices: Vec<ExtendedRational>,
}

impl FareyPath {
    pub fn from_vertices(vertices: Vec<ExtendedRational>) -> Self {
        FareyPath { vertices }
    }

    pub fn vertices(&self) -> &[ExtendedRational] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Consecutive vertex pairs, in walk order.
    pub fn edges(&self) -> impl Iterator<Item = (&ExtendedRational, &ExtendedRational)> {
        self.vertices.windows(2).map(|w| (&w[0], &w[1]))
    }
}

/// The walk of the first `n` convergents: ∞ followed by v₀ … v_{n−1}.
pub fn path_from_stream(stream: &CoefficientStream, n: usize) -> Result<FareyPath> {
    let seq = convergents(stream, n)?;
    let mut vertices = Vec::with_capacity(n + 1);
    vertices.push(ExtendedRational::infinity());
    vertices.extend(seq.values().iter().cloned());
    Ok(FareyPath { vertices })
}

/// Visit counts per vertex, in first-visit order. A path that keeps coming
/// back to the same few vertices is oscillating rather than converging;
/// [`RevisitHistogram::top_two`] names the two most-visited vertices, and
/// [`RevisitHistogram::vertices_with_at_least`] counts how many vertices
/// were revisited heavily.
#[derive(Clone, Debug)]
pub struct RevisitHistogram {
    counts: Vec<(ExtendedRational, usize)>,
}

impl RevisitHistogram {
    /// `(vertex, visits)` pairs in first-visit order.
    pub fn counts(&self) -> &[(ExtendedRational, usize)] {
        &self.counts
    }

    pub fn count_of(&self, vertex: &ExtendedRational) -> usize {
        self.counts
            .iter()
            .find(|(v, _)| v == vertex)
            .map_or(0, |(_, c)| *c)
    }

    /// Up to two vertices, most-visited first; ties go to the vertex seen
    /// earlier on the path, so the result is deterministic.
    pub fn top_two(&self) -> Vec<ExtendedRational> {
        let mut order: Vec<usize> = (0..self.counts.len()).collect();
        order.sort_by(|&a, &b| self.counts[b].1.cmp(&self.counts[a].1).then(a.cmp(&b)));
        order
            .into_iter()
            .take(2)
            .map(|i| self.counts[i].0.clone())
            .collect()
    }

    /// How many distinct vertices were visited at least `n` times.
    pub fn vertices_with_at_least(&self, n: usize) -> usize {
        self.counts.iter().filter(|(_, c)| *c >= n).count()
    }
}

pub fn revisit_histogram(path: &FareyPath) -> RevisitHistogram {
    let mut index: HashMap<ExtendedRational, usize> = HashMap::new();
    let mut counts: Vec<(ExtendedRational, usize)> = Vec::new();
    for v in path.vertices() {
        match index.get(v) {
            Some(&i) => counts[i].1 += 1,
            None => {
                index.insert(v.clone(), counts.len());
                counts.push((v.clone(), 1));
            }
        }
    }
    RevisitHistogram { counts }
}

/// The hyperbolic line between two boundary points of the upper half-plane.
#[derive(Clone, Debug, PartialEq)]
pub enum GeodesicArc {
    /// Both endpoints finite: the upper half of the circle centred midway.
    Semicircle {
        center: BigRational,
        radius: BigRational,
    },
    /// One endpoint is ∞: a vertical half-line above the other.
    VerticalRay { x: BigRational },
}

pub fn geodesic(u: &ExtendedRational, v: &ExtendedRational) -> Result<GeodesicArc> {
    if u == v {
        return Err(Error::DegenerateGeodesic);
    }
    match (u.to_rational(), v.to_rational()) {
        (Some(a), Some(b)) => {
            let two = BigRational::from_integer(BigInt::from(2));
            Ok(GeodesicArc::Semicircle {
                center: (&a + &b) / &two,
                radius: (a - b).abs() / two,
            })
        }
        (Some(x), None) | (None, Some(x)) => Ok(GeodesicArc::VerticalRay { x }),
        (None, None) => unreachable!("equal vertices were rejected"),
    }
}

/// A window [x_min, x_max] × [0, height] of the upper half-plane and the
/// pixel raster it maps onto. The map is affine; every coordinate stays
/// rational until [`round_half_even`] picks the pixel.
#[derive(Clone, Debug)]
pub struct Viewport {
    pub x_min: BigRational,
    pub x_max: BigRational,
    pub height: BigRational,
    pub width_px: u32,
    pub height_px: u32,
    pub labels: bool,
}

impl Viewport {
    pub fn new(
        x_min: BigRational,
        x_max: BigRational,
        height: BigRational,
        width_px: u32,
        height_px: u32,
    ) -> Result<Self> {
        let v = Viewport {
            x_min,
            x_max,
            height,
            width_px,
            height_px,
            labels: false,
        };
        v.validate()?;
        Ok(v)
    }

    pub fn with_labels(mut self, labels: bool) -> Self {
        self.labels = labels;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.x_min >= self.x_max
            || !self.height.is_positive()
            || self.width_px == 0
            || self.height_px == 0
        {
            return Err(Error::DegenerateViewport);
        }
        Ok(())
    }

    /// A window that shows every edge of `path`: the finite vertices with a
    /// one-sixteenth margin on either side, tall enough for the largest
    /// semicircle.
    pub fn fit(path: &FareyPath, width_px: u32, height_px: u32) -> Result<Self> {
        let finite: Vec<BigRational> = path
            .vertices()
            .iter()
            .filter_map(|v| v.to_rational())
            .collect();
        let one = BigRational::one();
        let (mut lo, mut hi) = match (finite.iter().min(), finite.iter().max()) {
            (Some(lo), Some(hi)) => (lo.clone(), hi.clone()),
            _ => (-one.clone(), one.clone()),
        };
        if lo == hi {
            lo -= &one;
            hi += &one;
        }
        let margin = (&hi - &lo) / BigRational::from_integer(BigInt::from(16));
        let mut height = one;
        for (u, v) in path.edges() {
            if let Ok(GeodesicArc::Semicircle { radius, .. }) = geodesic(u, v) {
                let needed = &radius + &margin;
                if needed > height {
                    height = needed;
                }
            }
        }
        Viewport::new(&lo - &margin, &hi + &margin, height, width_px, height_px)
    }

    fn x_px(&self, x: &BigRational) -> BigInt {
        let span = &self.x_max - &self.x_min;
        let w = BigRational::from_integer(BigInt::from(self.width_px));
        round_half_even(&((x - &self.x_min) / span * w))
    }

    fn x_len(&self, r: &BigRational) -> BigInt {
        let span = &self.x_max - &self.x_min;
        let w = BigRational::from_integer(BigInt::from(self.width_px));
        round_half_even(&(r / span * w))
    }

    fn y_len(&self, r: &BigRational) -> BigInt {
        let h = BigRational::from_integer(BigInt::from(self.height_px));
        round_half_even(&(r / &self.height * h))
    }
}

/// Renders the path's edges as geodesics, one element per edge in walk
/// order (revisited edges are drawn again — multiplicity is information).
/// Vertical rays are clipped at the window top; semicircles wider than the
/// window run off its sides and are clipped by the SVG viewport itself.
pub fn render_svg(path: &FareyPath, viewport: &Viewport) -> Result<String> {
    viewport.validate()?;
    let w = viewport.width_px;
    let h = viewport.height_px;
    let baseline = h; // y = 0 sits on the bottom edge
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(
        svg,
        "  <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        svg,
        "  <line class=\"axis\" x1=\"0\" y1=\"{baseline}\" x2=\"{w}\" y2=\"{baseline}\" \
         stroke=\"#999999\" stroke-width=\"1\"/>"
    );
    for (u, v) in path.edges() {
        match geodesic(u, v)? {
            GeodesicArc::Semicircle { center, radius } => {
                let xl = viewport.x_px(&(&center - &radius));
                let xr = viewport.x_px(&(&center + &radius));
                let rx = viewport.x_len(&radius);
                let ry = viewport.y_len(&radius);
                let _ = writeln!(
                    svg,
                    "  <path class=\"edge\" d=\"M {xl},{baseline} A {rx},{ry} 0 0,1 {xr},{baseline}\" \
                     fill=\"none\" stroke=\"#1a6fb0\" stroke-width=\"1.5\"/>"
                );
            }
            GeodesicArc::VerticalRay { x } => {
                let xp = viewport.x_px(&x);
                let _ = writeln!(
                    svg,
                    "  <line class=\"edge\" x1=\"{xp}\" y1=\"{baseline}\" x2=\"{xp}\" y2=\"0\" \
                     stroke=\"#1a6fb0\" stroke-width=\"1.5\"/>"
                );
            }
        }
    }
    if viewport.labels {
        let mut seen: Vec<&ExtendedRational> = Vec::new();
        for vertex in path.vertices() {
            if seen.contains(&vertex) {
                continue;
            }
            seen.push(vertex);
            if vertex.is_infinite() {
                let x = w / 2;
                let _ = writeln!(
                    svg,
                    "  <text class=\"label\" x=\"{x}\" y=\"14\" text-anchor=\"middle\" \
                     font-size=\"12\">∞</text>"
                );
            } else {
                let x = viewport.x_px(&vertex.to_rational().expect("finite vertex"));
                let y = baseline.saturating_sub(6);
                let _ = writeln!(
                    svg,
                    "  <text class=\"label\" x=\"{x}\" y=\"{y}\" text-anchor=\"middle\" \
                     font-size=\"12\">{vertex}</text>"
                );
            }
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Lossless JSON export: every vertex as exact numerator/denominator
/// strings (∞ is 1/0); edges are the consecutive pairs, left implicit.
pub fn path_to_json(path: &FareyPath) -> String {
    let vertices: Vec<serde_json::Value> = path
        .vertices()
        .iter()
        .map(|v| {
            serde_json::json!({
                "num": v.numerator().to_string(),
                "den": v.denominator().to_string(),
            })
        })
        .collect();
    serde_json::json!({ "vertices": vertices }).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn er(n: i64, d: i64) -> ExtendedRational {
        ExtendedRational::new(BigInt::from(n), BigInt::from(d)).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn ep(prefix: &[i64], period: &[i64]) -> CoefficientStream {
        CoefficientStream::eventually_periodic(
            prefix.iter().map(|&n| BigInt::from(n)).collect::<Vec<_>>(),
            period.iter().map(|&n| BigInt::from(n)).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn adjacency_is_the_determinant_condition() {
        assert!(is_adjacent(&er(0, 1), &ExtendedRational::infinity()));
        assert!(is_adjacent(&er(1, 2), &er(1, 3)));
        assert!(!is_adjacent(&er(1, 1), &er(1, 3)));
        assert!(!is_adjacent(&er(1, 2), &er(1, 2)));
    }

    #[test]
    fn oscillating_path_walks_the_triangle() {
        let path = path_from_stream(&ep(&[1], &[1]), 6).unwrap();
        let expected: Vec<ExtendedRational> = vec![
            ExtendedRational::infinity(),
            er(1, 1),
            er(0, 1),
            ExtendedRational::infinity(),
            er(1, 1),
            er(0, 1),
            ExtendedRational::infinity(),
        ];
        assert_eq!(path.vertices(), &expected[..]);
        for (u, v) in path.edges() {
            assert!(is_adjacent(u, v));
        }
    }

    #[test]
    fn convergent_path_marches_toward_the_limit() {
        let path = path_from_stream(&ep(&[2], &[2]), 3).unwrap();
        let expected = [ExtendedRational::infinity(), er(2, 1), er(3, 2), er(4, 3)];
        assert_eq!(path.vertices(), &expected[..]);

        let single = path_from_stream(&CoefficientStream::finite([5i64]), 1).unwrap();
        assert_eq!(
            single.vertices(),
            &[ExtendedRational::infinity(), er(5, 1)][..]
        );
    }

    #[test]
    fn short_finite_streams_cannot_make_deep_paths() {
        assert!(path_from_stream(&CoefficientStream::finite([5i64]), 3).is_err());
    }

    #[test]
    fn histogram_counts_revisits_in_first_visit_order() {
        let path = path_from_stream(&ep(&[1], &[1]), 6).unwrap();
        let hist = revisit_histogram(&path);
        assert_eq!(hist.count_of(&ExtendedRational::infinity()), 3);
        assert_eq!(hist.count_of(&er(1, 1)), 2);
        assert_eq!(hist.count_of(&er(0, 1)), 2);
        assert_eq!(hist.top_two(), vec![ExtendedRational::infinity(), er(1, 1)]);
        assert_eq!(hist.vertices_with_at_least(2), 3);
    }

    #[test]
    fn distinct_convergents_leave_a_flat_histogram() {
        let path = path_from_stream(&ep(&[9], &[4]), 50).unwrap();
        let hist = revisit_histogram(&path);
        assert_eq!(hist.counts().len(), 51);
        assert!(hist.counts().iter().all(|(_, c)| *c == 1));

        let tiny = path_from_stream(&CoefficientStream::finite([5i64]), 1).unwrap();
        let hist = revisit_histogram(&tiny);
        assert_eq!(hist.count_of(&ExtendedRational::infinity()), 1);
        assert_eq!(hist.count_of(&er(5, 1)), 1);
    }

    #[test]
    fn divergent_oscillation_revisits_heavily() {
        let path = path_from_stream(&ep(&[1], &[1]), 500).unwrap();
        let hist = revisit_histogram(&path);
        assert!(hist.vertices_with_at_least(10) >= 2);
    }

    #[test]
    fn geodesics_match_the_textbook_shapes() {
        assert_eq!(
            geodesic(&er(0, 1), &er(1, 1)).unwrap(),
            GeodesicArc::Semicircle {
                center: rat(1, 2),
                radius: rat(1, 2)
            }
        );
        assert_eq!(
            geodesic(&er(2, 1), &ExtendedRational::infinity()).unwrap(),
            GeodesicArc::VerticalRay { x: rat(2, 1) }
        );
        assert_eq!(
            geodesic(&er(-1, 1), &er(2, 1)).unwrap(),
            GeodesicArc::Semicircle {
                center: rat(1, 2),
                radius: rat(3, 2)
            }
        );
        assert!(matches!(
            geodesic(&er(1, 2), &er(1, 2)),
            Err(Error::DegenerateGeodesic)
        ));
    }

    fn test_viewport() -> Viewport {
        Viewport::new(rat(-2, 1), rat(2, 1), rat(2, 1), 400, 200).unwrap()
    }

    #[test]
    fn svg_draws_one_element_per_edge() {
        let path = FareyPath::from_vertices(vec![
            ExtendedRational::infinity(),
            er(1, 1),
            er(0, 1),
        ]);
        let svg = render_svg(&path, &test_viewport()).unwrap();
        assert_eq!(svg.matches("class=\"edge\"").count(), 2);
        // Ray above x = 1 maps to pixel column 300 in a [-2, 2] window.
        assert!(svg.contains("x1=\"300\" y1=\"200\" x2=\"300\" y2=\"0\""));
        // The (0, 1) semicircle spans pixels 200..300 with radii 50.
        assert!(svg.contains("M 200,200 A 50,50 0 0,1 300,200"));
    }

    #[test]
    fn revisited_edges_are_drawn_each_time() {
        let path = path_from_stream(&ep(&[1], &[1]), 6).unwrap();
        let svg = render_svg(&path, &test_viewport()).unwrap();
        let geometries: Vec<&str> = svg
            .lines()
            .filter(|l| l.contains("class=\"edge\""))
            .collect();
        assert_eq!(geometries.len(), 6);
        let mut distinct = geometries.clone();
        distinct.sort();
        distinct.dedup();
        assert_eq!(distinct.len(), 3);
    }

    #[test]
    fn labels_are_optional_and_infinity_sits_at_the_top() {
        let empty = FareyPath::from_vertices(Vec::new());
        let svg = render_svg(&empty, &test_viewport()).unwrap();
        assert_eq!(svg.matches("<text").count(), 0);

        let path = FareyPath::from_vertices(vec![
            ExtendedRational::infinity(),
            er(1, 1),
            er(0, 1),
        ]);
        let svg = render_svg(&path, &test_viewport().with_labels(true)).unwrap();
        assert_eq!(svg.matches("<text").count(), 3);
        assert!(svg.contains(">∞</text>"));
        assert!(svg.contains("y=\"14\""));
    }

    #[test]
    fn degenerate_viewports_are_rejected() {
        assert!(matches!(
            Viewport::new(rat(1, 1), rat(1, 1), rat(1, 1), 100, 100),
            Err(Error::DegenerateViewport)
        ));
        assert!(matches!(
            Viewport::new(rat(0, 1), rat(1, 1), rat(1, 1), 0, 100),
            Err(Error::DegenerateViewport)
        ));
        assert!(matches!(
            Viewport::new(rat(0, 1), rat(1, 1), rat(-1, 1), 100, 100),
            Err(Error::DegenerateViewport)
        ));
    }

    #[test]
    fn fitted_viewports_cover_the_path() {
        let path = path_from_stream(&ep(&[2], &[2]), 8).unwrap();
        let vp = Viewport::fit(&path, 640, 320).unwrap();
        for v in path.vertices() {
            if let Some(x) = v.to_rational() {
                assert!(vp.x_min <= x && x <= vp.x_max);
            }
        }
        for (u, v) in path.edges() {
            if let Ok(GeodesicArc::Semicircle { radius, .. }) = geodesic(u, v) {
                assert!(radius <= vp.height);
            }
        }
    }

    #[test]
    fn json_export_is_exact_and_ordered() {
        let path = FareyPath::from_vertices(vec![ExtendedRational::infinity(), er(3, 2)]);
        let json: serde_json::Value = serde_json::from_str(&path_to_json(&path)).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "vertices": [
                    {"num": "1", "den": "0"},
                    {"num": "3", "den": "2"},
                ]
            })
        );
    }
}
