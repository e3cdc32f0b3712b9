//! Writes a synthetic table with the Cleveland heart-disease layout to stdout.
//!
//! 303 rows, 14 comma-separated fields, raw labels 0..4 with the public file's class
//! counts (164/55/36/35/13) and six `?` cells (four in `ca`, two in `thal`).
//! Attribute values are drawn from class-conditional distributions, so the table
//! carries real signal but is not clinical data.
//!
//!     cargo run --example synthetic_cleveland > tests/fixtures/cleveland_synthetic.data

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const SEED: u64 = 20_110_905;
const CLASS_COUNTS: [usize; 5] = [164, 55, 36, 35, 13];

fn normal(rng: &mut ChaCha8Rng, mean: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    Normal::new(mean, sd).unwrap().sample(rng).clamp(lo, hi)
}

fn pick(rng: &mut ChaCha8Rng, values: &[f64], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random_range(0.0..total);
    for (v, w) in values.iter().zip(weights) {
        if u < *w {
            return *v;
        }
        u -= w;
    }
    *values.last().unwrap()
}

fn bernoulli(rng: &mut ChaCha8Rng, p: f64) -> f64 {
    f64::from(u8::from(rng.random_bool(p.clamp(0.0, 1.0))))
}

fn row(rng: &mut ChaCha8Rng, label: usize) -> [f64; 14] {
    let s = label as f64;
    let sick = label > 0;
    let age = normal(rng, 51.0 + 2.5 * s, 8.0, 29.0, 77.0).round();
    let sex = bernoulli(rng, 0.55 + if sick { 0.25 } else { 0.0 });
    let cp = if sick {
        pick(rng, &[1.0, 2.0, 3.0, 4.0], &[0.05, 0.08, 0.15, 0.72])
    } else {
        pick(rng, &[1.0, 2.0, 3.0, 4.0], &[0.10, 0.25, 0.42, 0.23])
    };
    let trestbps = normal(rng, 129.0 + 2.5 * s, 17.0, 94.0, 200.0).round();
    let chol = normal(rng, 242.0 + 5.0 * s, 48.0, 126.0, 564.0).round();
    let fbs = bernoulli(rng, 0.13 + 0.02 * s);
    let restecg = pick(
        rng,
        &[0.0, 1.0, 2.0],
        &[0.55 - 0.05 * s, 0.02, 0.43 + 0.05 * s],
    );
    let thalach = normal(rng, 159.0 - 9.0 * s, 17.0, 71.0, 202.0).round();
    let exang = bernoulli(rng, 0.12 + 0.15 * s);
    let oldpeak = (normal(rng, 0.5 + 0.65 * s, 0.6, 0.0, 6.2) * 10.0).round() / 10.0;
    let slope = match label {
        0 => pick(rng, &[1.0, 2.0, 3.0], &[0.65, 0.30, 0.05]),
        1 => pick(rng, &[1.0, 2.0, 3.0], &[0.35, 0.55, 0.10]),
        _ => pick(rng, &[1.0, 2.0, 3.0], &[0.15, 0.70, 0.15]),
    };
    let ca = match label {
        0 => pick(rng, &[0.0, 1.0, 2.0, 3.0], &[0.80, 0.13, 0.05, 0.02]),
        1 => pick(rng, &[0.0, 1.0, 2.0, 3.0], &[0.45, 0.35, 0.15, 0.05]),
        2 => pick(rng, &[0.0, 1.0, 2.0, 3.0], &[0.20, 0.30, 0.35, 0.15]),
        _ => pick(rng, &[0.0, 1.0, 2.0, 3.0], &[0.10, 0.20, 0.35, 0.35]),
    };
    let thal = if sick {
        pick(rng, &[3.0, 6.0, 7.0], &[0.28, 0.09, 0.63])
    } else {
        pick(rng, &[3.0, 6.0, 7.0], &[0.79, 0.04, 0.17])
    };
    [
        age, sex, cp, trestbps, chol, fbs, restecg, thalach, exang, oldpeak, slope, ca, thal, s,
    ]
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut labels: Vec<usize> = CLASS_COUNTS
        .iter()
        .enumerate()
        .flat_map(|(label, &n)| std::iter::repeat_n(label, n))
        .collect();
    labels.shuffle(&mut rng);

    let rows: Vec<[f64; 14]> = labels.iter().map(|&l| row(&mut rng, l)).collect();

    let mut holes: Vec<usize> = (0..rows.len()).collect();
    holes.shuffle(&mut rng);
    let missing_ca = &holes[..4];
    let missing_thal = &holes[4..6];

    for (i, r) in rows.iter().enumerate() {
        let fields: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(col, v)| {
                if (col == 11 && missing_ca.contains(&i))
                    || (col == 12 && missing_thal.contains(&i))
                {
                    "?".to_string()
                } else {
                    format!("{v:.1}")
                }
            })
            .collect();
        println!("{}", fields.join(","));
    }
}
