//! One network realization: BS zones, antenna gains, served mobiles,
//! power control and the co-channel interferer set under intra-cluster
//! interference nulling.

use alloc::string::String;
use alloc::vec::Vec;

use libm::{cos, pow, sin, sqrt};

use crate::error::Error;
use crate::geometry::{hex_depth, sample_ppp, sample_uniform_hexagon, HexLattice, Point, StudyRegion};
use crate::rng::SplitMix64;
use crate::Result;

/// Sub-channel zone of a BS inside its cluster region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    Interior,
    Edge,
}

/// How a BS's served-mobile link distance is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkMode {
    /// `Pr(L >= tau) = exp(-pi*lambda*tau^2)`, the law used throughout
    /// the analysis; the mobile is placed at a uniform angle.
    Rayleigh,
    /// The mobile is rejection-sampled uniformly from the BS's cell
    /// (clipped to the window); exposes the model-vs-analysis gap.
    ExactCell,
}

/// Side-lobe gain law toward unintended mobiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SidelobeMode {
    /// Worst case: `G = delta` exactly. Consumes no randomness, so
    /// scaling `delta` under a shared seed rescales interference exactly.
    Constant,
    /// `G` uniform on `(delta/2, delta]`.
    Uniform,
}

/// Where the tagged mobile is placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MobileMode {
    /// At the central cluster center exactly.
    Center,
    /// Uniform over the central cluster-interior hexagon.
    Typical,
}

/// All model constants plus simulation controls.
#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    /// BS density.
    pub lambda: f64,
    /// Cluster density; `K = lambda/eta` BSs per cluster on average.
    pub eta: f64,
    /// Interior fraction of each cluster, in (0, 1].
    pub nu: f64,
    /// Path-loss exponent, > 2.
    pub alpha: f64,
    /// Main-lobe response bounds, `0 < delta1 <= delta2`.
    pub delta1: f64,
    pub delta2: f64,
    /// Side-lobe response cap, > 0.
    pub delta: f64,
    /// Required receive SIR, > 0.
    pub theta: f64,
    /// Nulling capacity: a BS can null up to `m - 1` unintended mobiles.
    /// `None` means unlimited (complete intra-cluster nulling).
    pub m_antennas: Option<u32>,
    /// Rings of cluster regions around the central cluster.
    pub rings: u32,
    pub link_mode: LinkMode,
    pub sidelobe_mode: SidelobeMode,
    /// Root seed; every trial stream derives from it.
    pub seed: u64,
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        fn positive(key: &'static str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Parameter { key, message: alloc::format!("must be positive, got {v}") })
            }
        }
        positive("lambda", self.lambda)?;
        positive("eta", self.eta)?;
        positive("delta1", self.delta1)?;
        positive("delta2", self.delta2)?;
        positive("delta", self.delta)?;
        positive("theta", self.theta)?;
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return Err(Error::Parameter {
                key: "alpha",
                message: String::from(
                    "path-loss exponent must exceed 2 (far-field interference diverges)",
                ),
            });
        }
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(Error::Parameter {
                key: "nu",
                message: alloc::format!("interior fraction must lie in (0, 1], got {}", self.nu),
            });
        }
        if self.delta1 > self.delta2 {
            return Err(Error::Parameter {
                key: "delta1",
                message: alloc::format!(
                    "main-lobe lower bound {} exceeds upper bound {}",
                    self.delta1, self.delta2
                ),
            });
        }
        if let Some(m) = self.m_antennas {
            if m == 0 {
                return Err(Error::Parameter {
                    key: "m_antennas",
                    message: String::from("antenna count must be at least 1"),
                });
            }
        }
        Ok(())
    }

    /// Average number of BSs per cluster.
    pub fn k(&self) -> f64 {
        self.lambda / self.eta
    }

    /// Same model with `eta` set so that `K = lambda/eta` equals `k`.
    pub fn with_k(&self, k: f64) -> SimParams {
        SimParams { eta: self.lambda / k, ..self.clone() }
    }
}

/// One base station of a realization.
#[derive(Debug, Clone)]
pub struct BsRecord {
    pub position: Point,
    /// Index of the cluster region containing the BS.
    pub cluster: usize,
    pub zone: Zone,
    /// Main-lobe response `W` toward the served mobile.
    pub mainlobe_gain: f64,
    /// Served mobile location (the tagged mobile for the serving BS).
    pub mobile: Option<Point>,
    /// Distance `L` to the served mobile.
    pub link_distance: f64,
    /// Transmit power `L^alpha / W`; the served mobile receives unit power.
    pub tx_power: f64,
}

/// One accepted network realization.
#[derive(Debug, Clone)]
pub struct Topology {
    pub bss: Vec<BsRecord>,
    pub target_mobile: Point,
    pub serving_bs: usize,
}

/// Interior iff the depth within the BS's own cluster region is at most
/// `sqrt(nu) * rho`.
pub fn classify_zone(position: Point, lattice: &HexLattice, nu: f64) -> Zone {
    let center_idx = lattice.locate(position).unwrap_or_else(|| lattice.nearest_center(position));
    let depth = hex_depth(position, lattice.centers()[center_idx]);
    if depth <= sqrt(nu) * lattice.rho() {
        Zone::Interior
    } else {
        Zone::Edge
    }
}

/// Main-lobe response `W`, uniform on `[delta1, delta2]`. Uniform puts
/// positive mass near `delta1`, which the tail law requires.
#[inline]
pub fn draw_mainlobe_gain(params: &SimParams, rng: &mut SplitMix64) -> f64 {
    params.delta1 + (params.delta2 - params.delta1) * rng.uniform()
}

/// Side-lobe response `G` toward an unintended mobile; `0 < G <= delta`.
#[inline]
pub fn sidelobe_gain(params: &SimParams, rng: &mut SplitMix64) -> f64 {
    match params.sidelobe_mode {
        SidelobeMode::Constant => params.delta,
        SidelobeMode::Uniform => params.delta / 2.0 + (params.delta / 2.0) * rng.uniform_open(),
    }
}

/// Transmit power `L^alpha / W` of the power-control rule.
pub fn tx_power(link_distance: f64, alpha: f64, mainlobe_gain: f64) -> Result<f64> {
    if !(mainlobe_gain > 0.0) {
        return Err(Error::Parameter {
            key: "mainlobe_gain",
            message: alloc::format!("must be positive, got {mainlobe_gain}"),
        });
    }
    if link_distance < 0.0 {
        return Err(Error::Parameter {
            key: "link_distance",
            message: alloc::format!("must be non-negative, got {link_distance}"),
        });
    }
    Ok(pow_alpha(link_distance, alpha) / mainlobe_gain)
}

#[inline]
fn pow_alpha(x: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        let x2 = x * x;
        x2 * x2
    } else {
        pow(x, alpha)
    }
}

/// `d2^(-alpha/2)`, i.e. the path loss at squared distance `d2`.
#[inline]
pub fn path_loss_from_dist2(d2: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        1.0 / (d2 * d2)
    } else {
        pow(d2, -0.5 * alpha)
    }
}

const PLACEMENT_BUDGET: u32 = 10_000;
const PLACEMENT_PER_RADIUS: u32 = 200;

/// Uniform sample from the Voronoi cell of `bs_index` clipped to the
/// window. Candidates are drawn uniformly from a disk around the BS whose
/// radius starts at `2/sqrt(pi*lambda)` and doubles whenever a batch of
/// candidates is exhausted without an acceptance.
pub fn place_served_mobile(
    bs_index: usize,
    positions: &[Point],
    region: &StudyRegion,
    lambda: f64,
    rng: &mut SplitMix64,
) -> Result<Point> {
    let bs = positions[bs_index];
    let mut r_cap = 2.0 / sqrt(core::f64::consts::PI * lambda);
    let mut since_grow = 0u32;
    for _ in 0..PLACEMENT_BUDGET {
        let r = r_cap * sqrt(rng.uniform());
        let phi = rng.uniform_in(0.0, 2.0 * core::f64::consts::PI);
        let p = Point { x: bs.x + r * cos(phi), y: bs.y + r * sin(phi) };
        since_grow += 1;
        if region.contains(p) {
            let mut nearest = true;
            let d2 = p.dist2(&bs);
            for (j, q) in positions.iter().enumerate() {
                if j != bs_index && p.dist2(q) < d2 {
                    nearest = false;
                    break;
                }
            }
            if nearest {
                return Ok(p);
            }
        }
        if since_grow >= PLACEMENT_PER_RADIUS {
            r_cap *= 2.0;
            since_grow = 0;
        }
    }
    Err(Error::RealizationRejected(String::from("mobile placement budget exhausted")))
}

/// Builds one realization and applies the acceptance rule: the tagged
/// mobile must be served by an interior BS of the central cluster.
///
/// Returns `RealizationRejected` when the acceptance rule fails or a
/// placement budget runs out; callers count such trials toward the
/// acceptance rate and exclude them from estimates.
pub fn build_topology(
    params: &SimParams,
    region: &StudyRegion,
    mode: MobileMode,
    rng: &mut SplitMix64,
) -> Result<Topology> {
    let lattice = region.lattice();
    let rho = lattice.rho();
    let interior_apothem = sqrt(params.nu) * rho;

    let positions = sample_ppp(params.lambda, region, rng);
    let target = match mode {
        MobileMode::Center => Point::ORIGIN,
        MobileMode::Typical => sample_uniform_hexagon(Point::ORIGIN, interior_apothem, rng),
    };
    let (serving, serving_l) = match crate::geometry::nearest_bs(target, &positions) {
        Ok(v) => v,
        Err(_) => {
            return Err(Error::RealizationRejected(String::from("empty realization")));
        }
    };
    // Acceptance: serving BS lies in the interior zone of the central
    // cluster (the cluster whose center is the origin, index 0).
    let serving_cluster = lattice.locate(positions[serving]);
    if serving_cluster != Some(0)
        || hex_depth(positions[serving], lattice.centers()[0]) > interior_apothem
    {
        return Err(Error::RealizationRejected(String::from(
            "tagged mobile not served by a central-cluster interior BS",
        )));
    }

    let mut bss = Vec::with_capacity(positions.len());
    for (i, &pos) in positions.iter().enumerate() {
        let cluster = lattice.locate(pos).expect("sampled point lies in the window");
        let depth = hex_depth(pos, lattice.centers()[cluster]);
        let zone = if depth <= interior_apothem { Zone::Interior } else { Zone::Edge };
        let w = draw_mainlobe_gain(params, rng);
        let (mobile, l) = if i == serving {
            (Some(target), serving_l)
        } else {
            match params.link_mode {
                LinkMode::Rayleigh => {
                    let l = rng.rayleigh_link(params.lambda);
                    let phi = rng.uniform_in(0.0, 2.0 * core::f64::consts::PI);
                    (Some(Point { x: pos.x + l * cos(phi), y: pos.y + l * sin(phi) }), l)
                }
                LinkMode::ExactCell => {
                    let m = place_served_mobile(i, &positions, region, params.lambda, rng)?;
                    (Some(m), m.dist(&pos))
                }
            }
        };
        let p = tx_power(l, params.alpha, w)?;
        bss.push(BsRecord {
            position: pos,
            cluster,
            zone,
            mainlobe_gain: w,
            mobile,
            link_distance: l,
            tx_power: p,
        });
    }

    Ok(Topology { bss, target_mobile: target, serving_bs: serving })
}

/// Co-channel interferers for the tagged mobile, as `(bs index, gain)`.
///
/// Interior BSs of other clusters contribute a side-lobe draw. Interior
/// BSs of the central cluster other than the serving BS are nulled (gain
/// 0) when the nulling capacity covers all co-cluster served mobiles;
/// with finite `m_antennas` each BS nulls its `m - 1` nearest co-cluster
/// mobiles and the tagged mobile receives a side-lobe draw if it is not
/// among them. Edge BSs transmit on the other sub-channel and never
/// appear.
pub fn co_channel_interferers(
    topo: &Topology,
    params: &SimParams,
    rng: &mut SplitMix64,
) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for (i, bs) in topo.bss.iter().enumerate() {
        if i == topo.serving_bs || bs.zone != Zone::Interior {
            continue;
        }
        if bs.cluster != 0 {
            out.push((i, sidelobe_gain(params, rng)));
            continue;
        }
        let nulled = match params.m_antennas {
            None => true,
            Some(m) => target_is_nulled(topo, i, m),
        };
        if nulled {
            out.push((i, 0.0));
        } else {
            out.push((i, sidelobe_gain(params, rng)));
        }
    }
    out
}

/// Whether BS `bs_index` (central-cluster interior) steers a null toward
/// the tagged mobile: true iff the tagged mobile is among the `m - 1`
/// nearest mobiles served by its cooperative co-cluster BSs.
fn target_is_nulled(topo: &Topology, bs_index: usize, m: u32) -> bool {
    let capacity = (m - 1) as usize;
    if capacity == 0 {
        return false;
    }
    let bs = &topo.bss[bs_index];
    let target_d2 = topo.target_mobile.dist2(&bs.position);
    // Count co-cluster served mobiles strictly nearer than the tagged
    // mobile (owner index breaks exact ties).
    let mut nearer = 0usize;
    let mut total = 1usize; // the tagged mobile itself
    for (j, other) in topo.bss.iter().enumerate() {
        if j == bs_index || j == topo.serving_bs {
            continue;
        }
        if other.cluster != 0 || other.zone != Zone::Interior {
            continue;
        }
        if let Some(mob) = other.mobile {
            total += 1;
            let d2 = mob.dist2(&bs.position);
            if d2 < target_d2 || (d2 == target_d2 && j < topo.serving_bs) {
                nearer += 1;
            }
        }
    }
    let _ = total;
    nearer < capacity
}
