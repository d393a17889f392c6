//! Hexagonal cluster lattice, Poisson sampling and nearest-neighbor
//! queries.
//!
//! Cluster centers form a triangular lattice with nearest-neighbor
//! spacing `2*rho`, where `rho` is the apothem of the hexagonal cluster
//! region (`rho^2 = 1/(2*sqrt(3)*eta)`, area `1/eta`). Hexagons are never
//! materialized as polygons; membership and boundary distances go through
//! [`hex_depth`], the maximum projection onto the six neighbor
//! directions.

use alloc::vec::Vec;

use libm::{atan2, cos, sin, sqrt};

use crate::error::Error;
use crate::rng::SplitMix64;
use crate::Result;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Unit vectors from a cluster center toward its six nearest neighbors,
/// at angles 0, 60, ..., 300 degrees.
pub const NEIGHBOR_DIRS: [(f64, f64); 6] = [
    (1.0, 0.0),
    (0.5, SQRT3 / 2.0),
    (-0.5, SQRT3 / 2.0),
    (-1.0, 0.0),
    (-0.5, -SQRT3 / 2.0),
    (0.5, -SQRT3 / 2.0),
];

/// A point in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        debug_assert!(x.is_finite() && y.is_finite());
        Point { x, y }
    }

    #[inline]
    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        sqrt(self.dist2(other))
    }
}

/// Depth of `p` inside the hexagon family centered at `center`:
/// the maximum projection of `p - center` onto the six neighbor
/// directions. `p` lies in the hexagon of apothem `a` iff the depth is
/// `<= a`, and an interior point sits at distance `a - depth` from the
/// boundary.
#[inline]
pub fn hex_depth(p: Point, center: Point) -> f64 {
    let dx = p.x - center.x;
    let dy = p.y - center.y;
    let mut m = f64::NEG_INFINITY;
    for &(ux, uy) in NEIGHBOR_DIRS.iter() {
        let d = dx * ux + dy * uy;
        if d > m {
            m = d;
        }
    }
    m
}

/// Cluster-center lattice: the central cluster at the origin plus
/// `rings` concentric rings (ring `r` holds `6r` centers).
#[derive(Debug, Clone)]
pub struct HexLattice {
    eta: f64,
    rho: f64,
    rings: u32,
    centers: Vec<Point>,
    axial: Vec<(i32, i32)>,
    /// Dense axial -> index table, offset by `rings` in each coordinate.
    axial_index: Vec<Option<u32>>,
}

/// Builds the cluster lattice for density `eta` with the given number of
/// rings around the central cluster.
pub fn build_lattice(eta: f64, rings: u32) -> Result<HexLattice> {
    HexLattice::build(eta, rings)
}

impl HexLattice {
    pub fn build(eta: f64, rings: u32) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::Parameter {
                key: "eta",
                message: alloc::format!("cluster density must be positive, got {eta}"),
            });
        }
        let rho = sqrt(1.0 / (2.0 * SQRT3 * eta));
        let mut axial = Vec::with_capacity(1 + 3 * rings as usize * (rings as usize + 1));
        axial.push((0, 0));
        // Axial step directions, one full turn per ring.
        const STEPS: [(i32, i32); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
        for r in 1..=rings as i32 {
            let (mut q, mut s) = (0, -r); // start below the origin, walk counterclockwise
            for &(dq, ds) in STEPS.iter() {
                for _ in 0..r {
                    axial.push((q, s));
                    q += dq;
                    s += ds;
                }
            }
        }
        let side = 2 * rings as usize + 1;
        let mut axial_index = alloc::vec![None; side * side];
        let mut centers = Vec::with_capacity(axial.len());
        for (idx, &(q, s)) in axial.iter().enumerate() {
            centers.push(Self::axial_to_point(q, s, rho));
            let key = (q + rings as i32) as usize * side + (s + rings as i32) as usize;
            axial_index[key] = Some(idx as u32);
        }
        Ok(HexLattice { eta, rho, rings, centers, axial, axial_index })
    }

    #[inline]
    fn axial_to_point(q: i32, s: i32, rho: f64) -> Point {
        let qf = q as f64;
        let sf = s as f64;
        Point { x: 2.0 * rho * (qf + 0.5 * sf), y: 2.0 * rho * (SQRT3 / 2.0) * sf }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Hexagon apothem; `rho^2 = 1/(2*sqrt(3)*eta)`.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rings(&self) -> u32 {
        self.rings
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn axial(&self) -> &[(i32, i32)] {
        &self.axial
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Index of the lattice center nearest to `p` (Euclidean argmin over
    /// the stored centers, ties to the lowest index).
    pub fn nearest_center(&self, p: Point) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, c) in self.centers.iter().enumerate() {
            let d = p.dist2(c);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Index of the cluster region containing `p`, or `None` if `p`'s
    /// nearest center on the infinite lattice lies beyond the stored
    /// rings. O(1) via cube rounding of fractional axial coordinates.
    pub fn locate(&self, p: Point) -> Option<usize> {
        let sf = p.y / (SQRT3 * self.rho);
        let qf = p.x / (2.0 * self.rho) - 0.5 * sf;
        // Cube-round (q, s, -q-s) to the nearest lattice cell.
        let tf = -qf - sf;
        let mut q = libm::round(qf);
        let mut s = libm::round(sf);
        let t = libm::round(tf);
        let dq = (q - qf).abs();
        let ds = (s - sf).abs();
        let dt = (t - tf).abs();
        if dq > ds && dq > dt {
            q = -s - t;
        } else if ds > dt {
            s = -q - t;
        }
        let q = q as i32;
        let s = s as i32;
        let r = self.rings as i32;
        if q.abs() > r || s.abs() > r || (q + s).abs() > r {
            return None;
        }
        let side = 2 * self.rings as usize + 1;
        let key = (q + r) as usize * side + (s + r) as usize;
        self.axial_index[key].map(|i| i as usize)
    }
}

/// Free-function form of [`HexLattice::nearest_center`].
pub fn nearest_center(p: Point, lattice: &HexLattice) -> usize {
    lattice.nearest_center(p)
}

/// Finite simulation window: a set of cluster regions of a lattice.
#[derive(Debug, Clone)]
pub struct StudyRegion {
    lattice: HexLattice,
    members: Vec<bool>,
    bbox: (Point, Point),
}

impl StudyRegion {
    /// Window covering every cluster region of the lattice.
    pub fn full(lattice: HexLattice) -> Self {
        let n = lattice.len();
        Self::with_members(lattice, alloc::vec![true; n])
    }

    pub fn with_members(lattice: HexLattice, members: Vec<bool>) -> Self {
        debug_assert_eq!(members.len(), lattice.len());
        let circ = 2.0 * lattice.rho() / SQRT3;
        let mut lo = Point { x: f64::INFINITY, y: f64::INFINITY };
        let mut hi = Point { x: f64::NEG_INFINITY, y: f64::NEG_INFINITY };
        for (c, &m) in lattice.centers().iter().zip(&members) {
            if !m {
                continue;
            }
            lo.x = lo.x.min(c.x - circ);
            lo.y = lo.y.min(c.y - circ);
            hi.x = hi.x.max(c.x + circ);
            hi.y = hi.y.max(c.y + circ);
        }
        StudyRegion { lattice, members, bbox: (lo, hi) }
    }

    pub fn lattice(&self) -> &HexLattice {
        &self.lattice
    }

    pub fn member_count(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    /// Exact window area: member count times the cluster area `1/eta`.
    pub fn area(&self) -> f64 {
        self.member_count() as f64 / self.lattice.eta()
    }

    /// Cluster index containing `p`, restricted to member regions.
    pub fn locate(&self, p: Point) -> Option<usize> {
        self.lattice.locate(p).filter(|&i| self.members[i])
    }

    pub fn contains(&self, p: Point) -> bool {
        self.locate(p).is_some()
    }
}

/// Samples a homogeneous Poisson point process of density `lambda` on
/// the study region: a Poisson number of uniform candidates over the
/// bounding box, keeping those whose nearest lattice center is a member.
pub fn sample_ppp(lambda: f64, region: &StudyRegion, rng: &mut SplitMix64) -> Vec<Point> {
    if region.member_count() == 0 {
        return Vec::new();
    }
    let (lo, hi) = region.bbox;
    let box_area = (hi.x - lo.x) * (hi.y - lo.y);
    let n = rng.poisson(lambda * box_area);
    let mut points = Vec::with_capacity((lambda * region.area() * 1.1) as usize + 8);
    for _ in 0..n {
        let p = Point { x: rng.uniform_in(lo.x, hi.x), y: rng.uniform_in(lo.y, hi.y) };
        if region.contains(p) {
            points.push(p);
        }
    }
    points
}

/// Uniform sample over the hexagon of the given apothem, by rejection
/// from the circumscribed disk of radius `2*apothem/sqrt(3)`.
pub fn sample_uniform_hexagon(center: Point, apothem: f64, rng: &mut SplitMix64) -> Point {
    debug_assert!(apothem > 0.0);
    let circ = 2.0 * apothem / SQRT3;
    loop {
        let r = circ * sqrt(rng.uniform());
        let phi = rng.uniform_in(0.0, 2.0 * core::f64::consts::PI);
        let p = Point { x: center.x + r * cos(phi), y: center.y + r * sin(phi) };
        if hex_depth(p, center) <= apothem {
            return p;
        }
    }
}

/// Nearest base station to `u`: `(index, distance)`, ties to the lowest
/// index.
pub fn nearest_bs(u: Point, bss: &[Point]) -> Result<(usize, f64)> {
    if bss.is_empty() {
        return Err(Error::DegenerateRealization(alloc::string::String::from(
            "no base stations in window",
        )));
    }
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for (i, b) in bss.iter().enumerate() {
        let d = u.dist2(b);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    Ok((best, sqrt(best_d)))
}

/// Angular sector index of `p` around `center`, splitting the plane into
/// `k` equal sectors starting at angle zero. Equal-area bins on any
/// hexagon centered at `center`; used for uniformity checks.
pub fn angular_sector(p: Point, center: Point, k: usize) -> usize {
    let ang = atan2(p.y - center.y, p.x - center.x);
    let tau = 2.0 * core::f64::consts::PI;
    let frac = (ang + tau) % tau / tau;
    ((frac * k as f64) as usize).min(k - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_SQRT3: f64 = 2.0 * SQRT3;

    #[test]
    fn lattice_single_cluster() {
        // eta = 1/(2*sqrt(3)) gives rho = 1.
        let lat = build_lattice(1.0 / TWO_SQRT3, 0).unwrap();
        assert!((lat.rho() - 1.0).abs() < 1e-12);
        assert_eq!(lat.len(), 1);
        assert_eq!(lat.centers()[0], Point::ORIGIN);
    }

    #[test]
    fn lattice_one_ring_spacing() {
        let lat = build_lattice(1.0 / TWO_SQRT3, 1).unwrap();
        assert_eq!(lat.len(), 7);
        for c in &lat.centers()[1..] {
            assert!((c.dist(&Point::ORIGIN) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lattice_two_rings() {
        let lat = build_lattice(1.0 / 16.0, 2).unwrap();
        assert!((lat.rho() * lat.rho() - 16.0 / TWO_SQRT3).abs() < 1e-9);
        assert_eq!(lat.len(), 19);
    }

    #[test]
    fn lattice_rejects_bad_eta() {
        assert!(build_lattice(0.0, 1).is_err());
        assert!(build_lattice(-1.0, 1).is_err());
    }

    #[test]
    fn apothem_law() {
        let mut rng = SplitMix64::new(1);
        for _ in 0..100 {
            let eta = 10f64.powf(rng.uniform_in(-3.0, 3.0));
            let lat = build_lattice(eta, 0).unwrap();
            assert!((TWO_SQRT3 * lat.rho() * lat.rho() * eta - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ring_counts_and_neighbor_spacing() {
        let lat = build_lattice(0.37, 3).unwrap();
        assert_eq!(lat.len(), 1 + 3 * 3 * 4);
        // Minimum pairwise spacing is exactly 2*rho.
        let mut min_d = f64::INFINITY;
        for i in 0..lat.len() {
            for j in (i + 1)..lat.len() {
                min_d = min_d.min(lat.centers()[i].dist(&lat.centers()[j]));
            }
        }
        assert!((min_d - 2.0 * lat.rho()).abs() < 1e-12);
    }

    #[test]
    fn nearest_center_examples() {
        let lat = build_lattice(1.0 / TWO_SQRT3, 1).unwrap();
        for (i, &c) in lat.centers().iter().enumerate() {
            assert_eq!(lat.nearest_center(c), i);
        }
        // Midpoint between centers 0 and 1: tie goes to index 0.
        let c1 = lat.centers()[1];
        let mid = Point { x: c1.x / 2.0, y: c1.y / 2.0 };
        assert_eq!(lat.nearest_center(mid), 0);
    }

    #[test]
    fn locate_matches_brute_force() {
        let lat = build_lattice(0.2, 3).unwrap();
        let mut rng = SplitMix64::new(9);
        let span = 7.0 * lat.rho();
        let mut checked = 0;
        for _ in 0..100_000 {
            let p = Point { x: rng.uniform_in(-span, span), y: rng.uniform_in(-span, span) };
            let brute = lat.nearest_center(p);
            match lat.locate(p) {
                Some(idx) => {
                    assert_eq!(idx, brute, "at {p:?}");
                    checked += 1;
                }
                // Outside the stored rings; the brute-force point must
                // then lie on the outermost ring boundary region.
                None => assert!(hex_depth(p, lat.centers()[brute]) >= lat.rho() - 1e-9),
            }
        }
        assert!(checked > 50_000);
    }

    #[test]
    fn hex_depth_examples() {
        let lat = build_lattice(1.0 / TWO_SQRT3, 0).unwrap();
        let rho = lat.rho();
        assert_eq!(hex_depth(Point::ORIGIN, Point::ORIGIN), 0.0);
        for &(ux, uy) in NEIGHBOR_DIRS.iter() {
            let p = Point { x: rho * ux, y: rho * uy };
            assert!((hex_depth(p, Point::ORIGIN) - rho).abs() < 1e-12);
        }
    }

    // Independent membership test: intersection of the six half-planes.
    fn in_hexagon_halfplanes(p: Point, center: Point, a: f64) -> bool {
        NEIGHBOR_DIRS
            .iter()
            .all(|&(ux, uy)| (p.x - center.x) * ux + (p.y - center.y) * uy <= a)
    }

    #[test]
    fn depth_consistency_with_halfplane_membership() {
        let mut rng = SplitMix64::new(21);
        let a = 1.3;
        for _ in 0..50_000 {
            let p = Point { x: rng.uniform_in(-2.0, 2.0), y: rng.uniform_in(-2.0, 2.0) };
            assert_eq!(hex_depth(p, Point::ORIGIN) <= a, in_hexagon_halfplanes(p, Point::ORIGIN, a));
        }
    }

    #[test]
    fn uniform_hexagon_membership_and_mean() {
        let lat = build_lattice(0.5, 0).unwrap();
        let a = lat.rho();
        let mut rng = SplitMix64::new(13);
        let n = 100_000;
        let (mut sx, mut sy) = (0.0, 0.0);
        for _ in 0..n {
            let p = sample_uniform_hexagon(Point::ORIGIN, a, &mut rng);
            assert!(hex_depth(p, Point::ORIGIN) <= a);
            sx += p.x;
            sy += p.y;
        }
        // Coordinate std dev in a hexagon of apothem a is ~0.456a.
        let se = 0.456 * a / (n as f64).sqrt();
        assert!((sx / n as f64).abs() < 3.0 * se);
        assert!((sy / n as f64).abs() < 3.0 * se);
    }

    #[test]
    fn uniform_hexagon_acceptance_rate() {
        // hexagon area / circumscribed disk area = 3*sqrt(3)/(2*pi).
        let mut rng = SplitMix64::new(17);
        let a = 2.0;
        let circ = 2.0 * a / SQRT3;
        let n = 200_000;
        let mut accepted = 0u64;
        for _ in 0..n {
            let r = circ * sqrt(rng.uniform());
            let phi = rng.uniform_in(0.0, 2.0 * core::f64::consts::PI);
            let p = Point { x: r * cos(phi), y: r * sin(phi) };
            if hex_depth(p, Point::ORIGIN) <= a {
                accepted += 1;
            }
        }
        let rate = accepted as f64 / n as f64;
        let target = 3.0 * SQRT3 / (2.0 * core::f64::consts::PI);
        assert!((rate - target).abs() / target < 0.01, "rate = {rate}, target = {target}");
    }

    #[test]
    fn ppp_count_moments() {
        // Unit-area window, lambda = 10: count mean and variance both 10.
        let lat = build_lattice(1.0, 0).unwrap();
        let region = StudyRegion::full(lat);
        assert!((region.area() - 1.0).abs() < 1e-12);
        let mut rng = SplitMix64::new(29);
        let reps = 20_000;
        let (mut sum, mut sum2) = (0.0, 0.0);
        for _ in 0..reps {
            let k = sample_ppp(10.0, &region, &mut rng).len() as f64;
            sum += k;
            sum2 += k * k;
        }
        let m = sum / reps as f64;
        let var = sum2 / reps as f64 - m * m;
        let se = (10.0 / reps as f64).sqrt();
        assert!((m - 10.0).abs() < 4.0 * se, "mean = {m}");
        assert!((var - 10.0).abs() < 0.6, "var = {var}");
    }

    #[test]
    fn ppp_empty_region() {
        let lat = build_lattice(5.0, 1).unwrap();
        let n = lat.len();
        let region = StudyRegion::with_members(lat, alloc::vec![false; n]);
        let mut rng = SplitMix64::new(31);
        assert!(sample_ppp(5.0, &region, &mut rng).is_empty());
    }

    #[test]
    fn ppp_spatial_uniformity_chi_square() {
        // Single hexagon of area 50, lambda = 2, pooled over 1e4 draws;
        // six equal-area angular sectors. Chi-square(5 dof) 1% critical
        // value is 15.086.
        let lat = build_lattice(1.0 / 50.0, 0).unwrap();
        let region = StudyRegion::full(lat.clone());
        let mut rng = SplitMix64::new(37);
        let mut bins = [0u64; 6];
        for _ in 0..10_000 {
            for p in sample_ppp(2.0, &region, &mut rng) {
                bins[angular_sector(p, Point::ORIGIN, 6)] += 1;
            }
        }
        let total: u64 = bins.iter().sum();
        let expected = total as f64 / 6.0;
        let chi2: f64 =
            bins.iter().map(|&b| (b as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 15.086, "chi2 = {chi2}, bins = {bins:?}");
    }

    #[test]
    fn nearest_bs_examples() {
        let bss = [Point::new(3.0, 0.0)];
        let (i, d) = nearest_bs(Point::ORIGIN, &bss).unwrap();
        assert_eq!(i, 0);
        assert!((d - 3.0).abs() < 1e-12);

        let bss = [Point::new(1.0, 1.0), Point::new(-2.0, 0.5)];
        let (i, d) = nearest_bs(Point::new(1.0, 1.0), &bss).unwrap();
        assert_eq!(i, 0);
        assert_eq!(d, 0.0);

        assert!(nearest_bs(Point::ORIGIN, &[]).is_err());
    }
}
