#![allow(dead_code)]

use std::fmt::Write;
use std::path::Path;

use heston_gof_core::mc::StreamRng;

/// Daily closes from a Heston variance chain stepped ten times per day.
pub fn heston_closes(n: usize, seed: u64) -> Vec<f64> {
    let (gamma, theta, k, drift): (f64, f64, f64, f64) = (0.045, 8.6e-5, 2.4e-3, 3e-4);
    let sub = 10;
    let dt = 1.0 / sub as f64;
    let mut rng = StreamRng::new(seed, 0);
    let mut v = theta;
    let mut price = 100.0f64;
    let mut closes = Vec::with_capacity(n);
    for _ in 0..n {
        closes.push(price);
        let mut r = 0.0;
        for _ in 0..sub {
            let (z1, z2) = (rng.normal(), rng.normal());
            let vp = v.max(0.0);
            r += drift * dt - 0.5 * vp * dt + (vp * dt).sqrt() * z1;
            v = (v - gamma * (v - theta) * dt + k * (vp * dt).sqrt() * z2).max(0.0);
        }
        price *= r.exp();
    }
    closes
}

/// Closes from i.i.d. normal daily log-returns.
pub fn gaussian_closes(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = StreamRng::new(seed, 1);
    let mut price = 100.0f64;
    (0..n)
        .map(|_| {
            let p = price;
            price *= (2e-4 + 0.01 * rng.normal()).exp();
            p
        })
        .collect()
}

pub fn write_prices(path: &Path, closes: &[f64]) {
    let start = chrono::NaiveDate::from_ymd_opt(1982, 1, 4).unwrap();
    let mut text = String::from("date,close\n");
    for (i, c) in closes.iter().enumerate() {
        let d = start + chrono::Days::new(i as u64);
        writeln!(text, "{},{c:.6}", d.format("%Y-%m-%d")).unwrap();
    }
    std::fs::write(path, text).unwrap();
}
