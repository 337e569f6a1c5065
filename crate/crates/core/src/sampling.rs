//! Low-discrepancy sample points inside a chart domain.

use crate::chart::Chart;

const PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];

/// Radical inverse of `index` in `base` (van der Corput).
pub fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    let mut scale = inv;
    while index > 0 {
        out += (index % b) as f64 * scale;
        index /= b;
        scale *= inv;
    }
    inv = out;
    inv
}

/// The `index`-th Halton point in `[0,1)^dim`.
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    (0..dim).map(|d| radical_inverse(index, PRIMES[d])).collect()
}

/// `count` Halton points mapped into the chart box, skipping any that fall
/// within the chart margin of a singular locus. `seed` offsets the sequence.
pub fn chart_samples(chart: &Chart, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    let mut index = seed.wrapping_mul(7919).wrapping_add(1);
    let mut guard = 0usize;
    while out.len() < count {
        let u = halton(index, chart.dim);
        index += 1;
        guard += 1;
        assert!(guard < 1000 * count.max(1), "chart {} rejects every sample", chart.name);
        let x: Vec<f64> = u
            .iter()
            .zip(&chart.domain)
            .map(|(t, iv)| {
                // keep a margin inside closed, non-periodic ends
                let (lo, hi) = if iv.periodic {
                    (iv.lo, iv.hi)
                } else {
                    (iv.lo + chart.margin, iv.hi - chart.margin)
                };
                lo + t * (hi - lo)
            })
            .collect();
        if chart.check_point(&x).is_ok() {
            out.push(x);
        }
    }
    out
}

/// `count` Halton points in the interval `[lo, hi]` (one-dimensional).
pub fn interval_samples(lo: f64, hi: f64, count: usize, seed: u64) -> Vec<f64> {
    let start = seed.wrapping_mul(7919).wrapping_add(1);
    (0..count as u64)
        .map(|i| lo + radical_inverse(start + i, 2) * (hi - lo))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn van_der_corput_base_two() {
        let v: Vec<f64> = (1..5).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(v, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn halton_points_in_unit_cube() {
        for i in 0..200 {
            assert!(halton(i, 4).iter().all(|v| (0.0..1.0).contains(v)));
        }
    }
}
