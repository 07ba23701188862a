//! Statistics of the PPP UE count across seeds.

use hexwatt::topology::{build_hex_grid, default_region, place_ues, NetworkConfig};

#[test]
fn poisson_count_mean_and_variance() {
    let plan = build_hex_grid(&NetworkConfig::default()).unwrap();
    let region = default_region(&plan).unwrap();
    // Low density keeps 10^4 placements cheap; the count law is the same.
    let density = 20.0;
    let lambda = density * region.area_km2;
    let counts: Vec<f64> = (0..10_000u64)
        .map(|s| place_ues(&region, density, 1.5, s).unwrap().len() as f64)
        .collect();
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
    // 5 standard errors on the mean, and on the variance (≈ λ·sqrt(2/n)).
    assert!((mean - lambda).abs() < 5.0 * (lambda / n).sqrt(), "mean {mean} vs {lambda}");
    assert!((var - lambda).abs() < 5.0 * lambda * (2.0 / n).sqrt(), "var {var} vs {lambda}");
}

#[test]
fn full_density_count_is_near_expectation() {
    let plan = build_hex_grid(&NetworkConfig::default()).unwrap();
    let region = default_region(&plan).unwrap();
    let lambda = 1256.0 * region.area_km2;
    let counts: Vec<f64> = (0..200u64).map(|s| place_ues(&region, 1256.0, 1.5, s).unwrap().len() as f64).collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    assert!((mean - lambda).abs() < 5.0 * (lambda / 200.0).sqrt());
}
