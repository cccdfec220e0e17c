//! Chi-square test on equal-expected-frequency bins.

use alloc::vec::Vec;

use crate::density::Distribution;
use crate::error::{domain, Error, Result};

/// Bins covering the whole real line, each with its expected count.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BinPartition {
    /// `bins + 1` edges, first `-inf`, last `+inf`.
    pub edges: Vec<f64>,
    pub expected: Vec<f64>,
}

impl BinPartition {
    pub fn bins(&self) -> usize {
        self.expected.len()
    }

    /// Index of the bin `[edge_b, edge_{b+1})` holding `x`.
    pub fn locate(&self, x: f64) -> usize {
        let interior = &self.edges[1..self.edges.len() - 1];
        interior.partition_point(|&e| e <= x)
    }
}

/// Smallest number of bins for which the test is reported.
pub const MIN_BINS: usize = 4;

/// `floor(N / per_bin)` bins with edges at the model quantiles `j / bins`.
pub fn equal_freq_bins<D: Distribution + ?Sized>(model: &D, n: usize, per_bin: usize) -> Result<BinPartition> {
    if per_bin == 0 {
        return Err(Error::Invalid("per_bin must be at least 1".into()));
    }
    let bins = n / per_bin;
    if bins < MIN_BINS {
        return Err(Error::InsufficientData {
            needed: MIN_BINS * per_bin,
            got: n,
        });
    }
    let mut edges = Vec::with_capacity(bins + 1);
    edges.push(f64::NEG_INFINITY);
    for j in 1..bins {
        let e = model.quantile(j as f64 / bins as f64)?;
        let last = *edges.last().unwrap();
        if !(e > last) {
            return Err(Error::Invalid(alloc::format!(
                "model quantiles not strictly increasing at bin {j}"
            )));
        }
        edges.push(e);
    }
    edges.push(f64::INFINITY);
    let expected = alloc::vec![n as f64 / bins as f64; bins];
    Ok(BinPartition { edges, expected })
}

/// The same edges with expected counts `n (F(e_{b+1}) - F(e_b))` under `model`.
pub fn expected_under<D: Distribution + ?Sized>(partition: &BinPartition, model: &D, n: usize) -> Result<BinPartition> {
    let cdf: Vec<f64> = partition
        .edges
        .iter()
        .map(|&e| if e == f64::NEG_INFINITY { 0.0 } else if e == f64::INFINITY { 1.0 } else { model.cdf(e) })
        .collect();
    let expected: Vec<f64> = cdf.windows(2).map(|w| n as f64 * (w[1] - w[0])).collect();
    if let Some(b) = expected.iter().position(|&e| !(e > 0.0)) {
        return Err(Error::Invalid(alloc::format!("model assigns no mass to bin {b}")));
    }
    Ok(BinPartition {
        edges: partition.edges.clone(),
        expected,
    })
}

/// `(sum_b (O_b - E_b)^2 / E_b, bins)`.
pub fn chi2_statistic(sample: &[f64], partition: &BinPartition) -> (f64, usize) {
    let mut observed = alloc::vec![0usize; partition.bins()];
    for &x in sample {
        observed[partition.locate(x)] += 1;
    }
    let stat = observed
        .iter()
        .zip(&partition.expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    (stat, partition.bins())
}

/// Upper tail `Q(df/2, chi2/2)` of the chi-square distribution.
pub fn chi2_pvalue(chi2: f64, df: usize) -> Result<f64> {
    if df < 1 {
        return Err(domain("df", df as f64, "degrees of freedom must be >= 1"));
    }
    if !(chi2 >= 0.0) {
        return Err(domain("chi2", chi2, "statistic must be >= 0"));
    }
    Ok(regularized_gamma_q(0.5 * df as f64, 0.5 * chi2))
}

/// Upper regularised incomplete gamma `Q(a, x) = Gamma(a, x) / Gamma(a)`.
///
/// Series for the lower function when `x < a + 1/2` (i.e. `chi2 < df + 1`),
/// modified Lentz continued fraction otherwise.
pub fn regularized_gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let log_prefactor = a * x.ln() - x - libm::lgamma(a);
    if x < a + 0.5 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..100_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        (1.0 - sum * log_prefactor.exp()).clamp(0.0, 1.0)
    } else {
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..100_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (log_prefactor.exp() * h).clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Gaussian;
    use proptest::prelude::*;

    struct Uniform;
    impl Distribution for Uniform {
        fn pdf(&self, x: f64) -> f64 {
            if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 }
        }
        fn cdf(&self, x: f64) -> f64 {
            x.clamp(0.0, 1.0)
        }
        fn quantile(&self, q: f64) -> Result<f64> {
            Ok(q)
        }
        fn param_count(&self) -> usize {
            0
        }
    }

    #[test]
    fn bin_arithmetic() {
        let p = equal_freq_bins(&Uniform, 1010, 5).unwrap();
        assert_eq!(p.bins(), 202);
        assert!(p.expected.iter().all(|&e| e == 5.0));
        assert_eq!(p.edges[0], f64::NEG_INFINITY);
        assert_eq!(*p.edges.last().unwrap(), f64::INFINITY);
        assert!(matches!(equal_freq_bins(&Uniform, 10, 5), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn normal_quartile_edges() {
        let p = equal_freq_bins(&Gaussian::new(0.0, 1.0).unwrap(), 20, 5).unwrap();
        assert_eq!(p.bins(), 4);
        let want = [-0.674_489_750_196_081_7, 0.0, 0.674_489_750_196_081_7];
        for (e, w) in p.edges[1..4].iter().zip(want) {
            assert!((e - w).abs() < 1e-12);
        }
    }

    #[test]
    fn reweighting_keeps_edges() {
        let g = Gaussian::new(0.0, 1.0).unwrap();
        let p = equal_freq_bins(&g, 100, 5).unwrap();
        let same = expected_under(&p, &g, 100).unwrap();
        for e in &same.expected {
            assert!((e - 5.0).abs() < 1e-9);
        }
        let shifted = expected_under(&p, &Gaussian::new(0.5, 1.0).unwrap(), 100).unwrap();
        assert_eq!(shifted.edges, p.edges);
        assert!((shifted.expected.iter().sum::<f64>() - 100.0).abs() < 1e-9);
        assert!(shifted.expected[0] < 5.0 && shifted.expected[19] > 5.0);
        assert!(expected_under(&p, &Uniform, 100).is_err());
    }

    #[test]
    fn statistic_by_hand() {
        let part = BinPartition {
            edges: alloc::vec![f64::NEG_INFINITY, 0.0, f64::INFINITY],
            expected: alloc::vec![5.0, 5.0],
        };
        let sample = [-1.0, -2.0, -3.0, -4.0, 1.0, 2.0, 3.0, 4.0, 5.0, 0.0];
        let (c, bins) = chi2_statistic(&sample, &part);
        assert_eq!(bins, 2);
        assert!((c - 0.4).abs() < 1e-15);
        let even = [-1.0, -2.0, -3.0, -4.0, -5.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(chi2_statistic(&even, &part).0, 0.0);
    }

    #[test]
    fn pvalue_closed_forms() {
        assert_eq!(chi2_pvalue(0.0, 3).unwrap(), 1.0);
        assert!((chi2_pvalue(2.0, 2).unwrap() - (-1.0f64).exp()).abs() < 1e-10);
        // df = 2: Q = exp(-x/2) on both sides of the series/fraction switch
        for &x in &[0.3, 2.9, 3.1, 10.0, 60.0] {
            assert!((chi2_pvalue(x, 2).unwrap() - (-x / 2.0).exp()).abs() < 1e-12);
        }
        // df = 1: Q = erfc(sqrt(x/2))
        for &x in &[0.1, 1.0, 1.9, 2.1, 7.0, 30.0] {
            let want = libm::erfc((x / 2.0f64).sqrt());
            assert!((chi2_pvalue(x, 1).unwrap() - want).abs() < 1e-12, "{x}");
        }
        assert!(chi2_pvalue(1.0, 0).is_err());
    }

    #[test]
    fn tail_matches_reference_values() {
        // scipy.stats.chi2.sf
        let cases = [
            (255.0, 198, 0.0038974325752980784),
            (61.0, 47, 0.08247994816414514),
            (29.1, 22, 0.14202781555276858),
            (10.4, 9, 0.3190835021426139),
            (1790.0, 1010, 3.1083736368986355e-46),
        ];
        for (x, df, want) in cases {
            let got = chi2_pvalue(x, df).unwrap();
            assert!((got - want).abs() <= 1e-9 * want, "{x} {df}: {got}");
        }
    }

    #[test]
    fn self_sampled_mean_matches_dof() {
        let g = Gaussian::new(0.01, 0.2).unwrap();
        let n = 10_000;
        let part = equal_freq_bins(&g, n, 5).unwrap();
        let seeds = 20;
        let mut total = 0.0;
        for seed in 0..seeds {
            let mut rng = crate::mc::StreamRng::new(seed, 3);
            let xs: Vec<f64> = (0..n).map(|_| 0.01 + 0.2 * rng.normal()).collect();
            total += chi2_statistic(&xs, &part).0;
        }
        let mean = total / seeds as f64;
        let dof = (part.bins() - 1) as f64;
        assert!((mean / dof - 1.0).abs() < 0.02, "{mean} vs {dof}");
    }

    proptest! {
        #[test]
        fn pvalue_monotone(a in 0.0f64..300.0, b in 0.0f64..300.0, df in 1usize..200) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(chi2_pvalue(hi, df).unwrap() <= chi2_pvalue(lo, df).unwrap() + 1e-12);
        }

        #[test]
        fn every_point_counted_once(xs in proptest::collection::vec(-4.0f64..4.0, 20..300)) {
            let part = equal_freq_bins(&Gaussian::new(0.0, 1.0).unwrap(), xs.len(), 5).unwrap();
            let mut counts = alloc::vec![0usize; part.bins()];
            for &x in &xs {
                counts[part.locate(x)] += 1;
            }
            prop_assert_eq!(counts.iter().sum::<usize>(), xs.len());
            let mass: f64 = part.edges.windows(2).map(|w| {
                let g = Gaussian::new(0.0, 1.0).unwrap();
                g.cdf(w[1]) - g.cdf(w[0])
            }).sum();
            prop_assert!((mass - 1.0).abs() < 1e-9);
            for (b, w) in part.edges.windows(2).enumerate() {
                let g = Gaussian::new(0.0, 1.0).unwrap();
                prop_assert!((g.cdf(w[1]) - g.cdf(w[0]) - part.expected[b] / xs.len() as f64).abs() < 1e-9);
            }
        }
    }
}
