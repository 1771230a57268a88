//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use chebycert::{MonomialBasis, SampleSet};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

#[derive(Clone, Debug)]
pub struct Instance {
    pub label: String,
    pub samples: SampleSet<f64>,
    pub degree: u32,
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

// coordinates on a 1/1000 lattice so the data are short decimals
fn coordinate(rng: &mut StdRng) -> f64 {
    rng.gen_range(-1000..=1000) as f64 / 1000.0
}

fn random_points(rng: &mut StdRng, d: usize, n: usize) -> Vec<Vec<f64>> {
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n);
    while points.len() < n {
        let p: Vec<f64> = (0..d).map(|_| coordinate(rng)).collect();
        if !points.contains(&p) {
            points.push(p);
        }
    }
    points
}

/// A target function drawn from a few smooth and non-smooth families.
fn random_values(rng: &mut StdRng, points: &[Vec<f64>], degree: u32) -> (String, Vec<f64>) {
    let d = points[0].len();
    let w: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let dot = |p: &[f64]| p.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
    match rng.gen_range(0..5) {
        0 => {
            let basis = MonomialBasis::build(d, degree + 1).unwrap();
            let c: Vec<f64> = basis
                .exponents()
                .iter()
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let vals = points
                .iter()
                .map(|p| {
                    basis
                        .exponents()
                        .iter()
                        .zip(&c)
                        .map(|(e, ci)| ci * e.eval(p))
                        .sum()
                })
                .collect();
            ("poly".into(), vals)
        }
        1 => {
            let phase = rng.gen_range(0.0..3.0);
            (
                "sin".into(),
                points.iter().map(|p| (dot(p) + phase).sin()).collect(),
            )
        }
        2 => (
            "exp".into(),
            points.iter().map(|p| (dot(p) / 2.0).exp()).collect(),
        ),
        3 => {
            let c = rng.gen_range(-0.5..0.5);
            (
                "abs".into(),
                points.iter().map(|p| (dot(p) - c).abs()).collect(),
            )
        }
        _ => (
            "noise".into(),
            points.iter().map(|_| rng.gen_range(-1.0..1.0)).collect(),
        ),
    }
}

pub fn random_instance(rng: &mut StdRng, d: usize, degree: u32, n: usize) -> Instance {
    let points = random_points(rng, d, n);
    let (family, values) = random_values(rng, &points, degree);
    Instance {
        label: format!("{family} d={d} m={degree} n={n}"),
        samples: SampleSet::new(points, values).unwrap(),
        degree,
    }
}

/// `count` instances with d in `dims`, m in `degrees` and 5..=30 points, at
/// least two more points than basis functions.
pub fn corpus(seed: u64, count: usize, dims: &[usize], degrees: &[u32]) -> Vec<Instance> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let d = *dims.choose(&mut rng).unwrap();
            let m = *degrees.choose(&mut rng).unwrap();
            let k = MonomialBasis::build(d, m).unwrap().exponents().len();
            let n = rng.gen_range((k + 2).max(5)..=30);
            random_instance(&mut rng, d, m, n)
        })
        .collect()
}
