//! Distributional checks of the two distance laws the analysis rests
//! on: the Rayleigh-type nearest-BS distance CCDF and the hexagon
//! boundary-distance CCDF.

use hexcov_core::geometry::{build_lattice, hex_depth, sample_uniform_hexagon, Point, StudyRegion};
use hexcov_core::montecarlo::sample_guarded_nearest_distance;
use hexcov_core::netmodel::{LinkMode, SidelobeMode, SimParams};
use hexcov_core::rng::SplitMix64;
use hexcov_core::stats::ks_statistic;
use hexcov_core::theory::{boundary_distance_ccdf, nearest_distance_ccdf};

fn params() -> SimParams {
    SimParams {
        lambda: 1.0,
        eta: 0.25,
        nu: 0.25,
        alpha: 4.0,
        delta1: 1.0,
        delta2: 1.0,
        delta: 0.1,
        theta: 1.0,
        m_antennas: None,
        rings: 3,
        link_mode: LinkMode::Rayleigh,
        sidelobe_mode: SidelobeMode::Constant,
        seed: 7,
    }
}

#[test]
fn nearest_bs_distance_follows_rayleigh_law() {
    let p = params();
    let lattice = build_lattice(p.eta, p.rings).unwrap();
    let region = StudyRegion::full(lattice);
    let mut rng = SplitMix64::new(p.seed);
    let n = 100_000;
    let mut samples = Vec::with_capacity(n);
    while samples.len() < n {
        if let Some(l) = sample_guarded_nearest_distance(&p, &region, &mut rng) {
            samples.push(l);
        }
    }
    let d = ks_statistic(&mut samples, |tau| 1.0 - nearest_distance_ccdf(p.lambda, tau));
    assert!(d < 0.01, "KS = {d}");
}

#[test]
fn hexagon_boundary_distance_law() {
    let mut rng = SplitMix64::new(11);
    for &nu in &[0.25f64, 0.5, 1.0] {
        let lattice = build_lattice(0.25, 0).unwrap();
        let rho = lattice.rho();
        let a = nu.sqrt() * rho;
        let n = 100_000;
        let mut samples: Vec<f64> = (0..n)
            .map(|_| a - hex_depth(sample_uniform_hexagon(Point::ORIGIN, a, &mut rng), Point::ORIGIN))
            .collect();
        let d = ks_statistic(&mut samples, |x| {
            1.0 - boundary_distance_ccdf(nu, rho, x.clamp(0.0, a)).unwrap()
        });
        assert!(d < 0.01, "nu = {nu}: KS = {d}");
    }
}
