use hurstlab::synthesis::{generate_fbm, generate_fgn, FgnSpec};
use hurstlab::transform::{dwt_samples, max_level, ndwt_samples, WaveletFilter};
use proptest::prelude::*;

fn signal(n: usize, seed: u64) -> Vec<f64> {
    generate_fgn(&FgnSpec::new(0.6, n, 1.0, seed).unwrap())
        .unwrap()
        .into_samples()
}

// Haar detail at scale s written out directly: a scaled difference of two
// adjacent block sums of length 2^{s-1}, indices taken mod n.
fn haar_detail_brute(x: &[f64], s: u32, k: usize) -> f64 {
    let n = x.len();
    let m = 1usize << (s - 1);
    let left: f64 = (0..m).map(|i| x[(k + i) % n]).sum();
    let right: f64 = (0..m).map(|i| x[(k + m + i) % n]).sum();
    (left - right) / 2f64.powf(s as f64 / 2.0)
}

// Equivalent-filter NDWT: detail at scale s as one circular correlation with
// the cascade of dilated filters, built by explicit convolution.
fn cascade_detail(x: &[f64], f: &WaveletFilter, s: usize) -> Vec<f64> {
    let mut taps: Vec<(usize, f64)> = vec![(0, 1.0)];
    for stage in 1..=s {
        let step = 1usize << (stage - 1);
        let h = if stage == s { &f.high } else { &f.low };
        let mut next = std::collections::BTreeMap::<usize, f64>::new();
        for &(off, w) in &taps {
            for (i, c) in h.iter().enumerate() {
                *next.entry(off + i * step).or_default() += w * c;
            }
        }
        taps = next.into_iter().collect();
    }
    let n = x.len();
    (0..n)
        .map(|k| taps.iter().map(|&(o, w)| w * x[(k + o) % n]).sum())
        .collect()
}

#[test]
fn haar_levels_match_block_differences() {
    let x = signal(256, 1);
    let d = ndwt_samples(&x, &WaveletFilter::haar(), 8).unwrap();
    for s in 1..=8u32 {
        let level = d.detail_at_scale(s as usize).unwrap();
        for k in [0, 1, 77, 200, 255] {
            assert!(
                (level[k] - haar_detail_brute(&x, s, k)).abs() < 1e-12,
                "s={s} k={k}"
            );
        }
    }
    // d_k is proportional to x_k - x_{k+1} at the finest scale.
    let fine = d.level(7).unwrap();
    assert!((fine[3] - (x[3] - x[4]) / 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn daubechies_levels_match_equivalent_filters() {
    let x = signal(128, 2);
    for order in [2, 4, 7] {
        let f = WaveletFilter::daubechies(order).unwrap();
        let d = ndwt_samples(&x, &f, 4).unwrap();
        for s in 1..=4 {
            let want = cascade_detail(&x, &f, s);
            let got = d.detail_at_scale(s).unwrap();
            for (a, b) in got.iter().zip(&want) {
                assert!((a - b).abs() < 1e-11, "db{order} s={s}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn dwt_is_the_decimated_ndwt() {
    let x = signal(512, 3);
    for f in [WaveletFilter::haar(), WaveletFilter::daubechies(3).unwrap()] {
        let nd = ndwt_samples(&x, &f, 6).unwrap();
        let d = dwt_samples(&x, &f, 6).unwrap();
        for s in 1..=6 {
            let full = nd.detail_at_scale(s).unwrap();
            let dec = d.detail_at_scale(s).unwrap();
            assert_eq!(dec.len(), 512 >> s);
            for (m, v) in dec.iter().enumerate() {
                assert!((v - full[m << s]).abs() < 1e-12, "{} s={s} m={m}", f.name);
            }
        }
    }
}

#[test]
fn ndwt_energy_splits_by_scale() {
    // Each orthonormal a trous stage doubles the energy of its input.
    let x = signal(1024, 4);
    let e: f64 = x.iter().map(|v| v * v).sum();
    for f in [WaveletFilter::haar(), WaveletFilter::daubechies(5).unwrap()] {
        let depth = 9;
        let d = ndwt_samples(&x, &f, depth).unwrap();
        let mut total = d.coarse().iter().map(|v| v * v).sum::<f64>() / (1u64 << depth) as f64;
        for s in 1..=depth {
            total += d
                .detail_at_scale(s)
                .unwrap()
                .iter()
                .map(|v| v * v)
                .sum::<f64>()
                / (1u64 << s) as f64;
        }
        assert!((total - e).abs() < 1e-10 * e, "{}", f.name);
    }
}

#[test]
fn level_indexing_follows_dyadic_ceiling() {
    assert_eq!(max_level(2048), 11);
    assert_eq!(max_level(2049), 12);
    assert_eq!(max_level(1000), 10);
    let d = ndwt_samples(&signal(1000, 5), &WaveletFilter::haar(), 6).unwrap();
    assert_eq!(d.j_max(), 10);
    assert_eq!(d.levels().collect::<Vec<_>>(), vec![4, 5, 6, 7, 8, 9]);
    assert_eq!(d.scale_of(9), Some(1));
    assert_eq!(d.level(3), None);
    // Non-dyadic lengths are fine for the NDWT but not the DWT.
    assert_eq!(
        dwt_samples(&signal(1000, 5), &WaveletFilter::haar(), 4)
            .unwrap_err()
            .category(),
        "non-dyadic-length"
    );
}

#[test]
fn shape_errors() {
    let x = signal(64, 6);
    let haar = WaveletFilter::haar();
    assert_eq!(
        ndwt_samples(&x, &haar, 7).unwrap_err().category(),
        "depth-exceeds-j"
    );
    assert_eq!(
        ndwt_samples(&x, &haar, 0).unwrap_err().category(),
        "invalid-parameter"
    );
    let db10 = WaveletFilter::daubechies(10).unwrap();
    assert_eq!(
        ndwt_samples(&x[..16], &db10, 2).unwrap_err().category(),
        "signal-shorter-than-filter"
    );
}

#[test]
fn fbm_level_variance_ratio_matches_discrete_oracle() {
    // Exact Var(d_s) for the Haar detail of discrete fBm, from the fBm
    // covariance 0.5 (a^{2H} + b^{2H} - |a - b|^{2H}).
    fn exact_var(h: f64, s: u32) -> f64 {
        let m = 1usize << (s - 1);
        let w: Vec<f64> = (0..2 * m)
            .map(|i| if i < m { 1.0 } else { -1.0 } / 2f64.powf(s as f64 / 2.0))
            .collect();
        let cov = |a: f64, b: f64| {
            0.5 * (a.powf(2.0 * h) + b.powf(2.0 * h) - (a - b).abs().powf(2.0 * h))
        };
        let mut v = 0.0;
        for (i, wi) in w.iter().enumerate() {
            for (j, wj) in w.iter().enumerate() {
                v += wi * wj * cov(i as f64 + 1.0, j as f64 + 1.0);
            }
        }
        v
    }
    let h = 0.3;
    let n = 2048;
    let mut energy = [0.0f64; 6];
    let mut count = [0usize; 6];
    for seed in 0..60 {
        let path = generate_fbm(&FgnSpec::new(h, n, 1.0, seed).unwrap())
            .unwrap()
            .into_samples();
        let d = ndwt_samples(&path, &WaveletFilter::haar(), 5).unwrap();
        for s in 1..=5 {
            // Skip coefficients whose support wraps around the end.
            let interior = &d.detail_at_scale(s).unwrap()[..=n - (1 << s)];
            energy[s] += interior.iter().map(|v| v * v).sum::<f64>();
            count[s] += interior.len();
        }
    }
    for s in 1..5u32 {
        let i = s as usize;
        let got = (energy[i + 1] / count[i + 1] as f64) / (energy[i] / count[i] as f64);
        let want = exact_var(h, s + 1) / exact_var(h, s);
        assert!((got / want - 1.0).abs() < 0.05, "s={s}: {got} vs {want}");
    }
}

proptest! {
    #[test]
    fn haar_details_of_linear_ramps_are_constant(a in -5.0f64..5.0, b in -5.0f64..5.0) {
        // Away from the wrap, a ramp's detail depends only on the slope.
        let n = 128;
        let x: Vec<f64> = (0..n).map(|i| a + b * i as f64).collect();
        let d = ndwt_samples(&x, &WaveletFilter::haar(), 4).unwrap();
        for s in 1..=4usize {
            let level = d.detail_at_scale(s).unwrap();
            let m = (1usize << (s - 1)) as f64;
            let want = -b * m * m / 2f64.powf(s as f64 / 2.0);
            for v in &level[..n - (1 << s)] {
                prop_assert!((v - want).abs() < 1e-9 * (1.0 + want.abs()));
            }
        }
    }
}
