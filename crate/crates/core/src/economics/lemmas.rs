use super::Partition;

/// Reallocation that repairs a cap-violating partition.
///
/// Picks `a₁ = argmax s_i/β_i` over the violating set `{i : s_i > β_i·s₀}`
/// (ties to the smallest index) and replaces `(s₀, s_{a₁})` by
/// `(1/(β+1), β/(β+1))·(s₀ + s_{a₁})` with `β = β_{a₁}`. The flag is false
/// and the input comes back unchanged when nothing violates.
pub fn lemma2_transform(s: &Partition, beta: &[f64]) -> (Partition, bool) {
    assert_eq!(s.chains(), beta.len(), "partition and β disagree on M");
    let s0 = s.shared();
    let mut pick: Option<(usize, f64)> = None;
    for (i, &b) in beta.iter().enumerate() {
        let si = s.chain(i + 1);
        if si > b * s0 {
            let ratio = if b > 0.0 { si / b } else { f64::INFINITY };
            if pick.map_or(true, |(_, r)| ratio > r) {
                pick = Some((i + 1, ratio));
            }
        }
    }
    let Some((a, _)) = pick else {
        return (s.clone(), false);
    };
    let b = beta[a - 1];
    let pool = s0 + s.chain(a);
    let mut out = s.clone();
    let slots = out.slots_mut();
    slots[0] = pool / (b + 1.0);
    slots[a] = pool * b / (b + 1.0);
    (out, true)
}

/// `F(x) = −Σ_{i≥1} β_i·x_i/(k·β_i + x_i)`, with `x = (x₀, x₁, …, x_n)`.
pub fn lemma1_objective(x: &[f64], k: f64, beta: &[f64]) -> f64 {
    assert_eq!(x.len(), beta.len() + 1);
    -beta
        .iter()
        .zip(&x[1..])
        .map(|(b, xi)| if *xi == 0.0 { 0.0 } else { b * xi / (k * b + xi) })
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economics::{total_utility, UtilityParams};
    use crate::multichain::MarketWeights;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn transform_examples() {
        let (t, applied) = lemma2_transform(&Partition::new(vec![2.0, 6.0]), &[1.0]);
        assert!(applied);
        assert_eq!(t.slots(), &[4.0, 4.0]);

        let (t, applied) = lemma2_transform(&Partition::new(vec![0.0, 6.0, 0.0]), &[0.5, 0.5]);
        assert!(applied);
        assert!(t.is_admissible(6.0) && t.shared() > 0.0);

        let ok = Partition::new(vec![4.0, 1.0, 2.0]);
        assert_eq!(lemma2_transform(&ok, &[0.5, 0.5]), (ok.clone(), false));
    }

    #[test]
    fn transform_example_raises_utility() {
        let b = MarketWeights::new(vec![100.0]).unwrap();
        let p = UtilityParams::static_cap();
        let s = Partition::new(vec![2.0, 6.0]);
        let (t, _) = lemma2_transform(&s, b.beta());
        // B=100: before 2/102·100, after 4/104·100
        let before = total_utility(&s, &b, &p).unwrap();
        let after = total_utility(&t, &b, &p).unwrap();
        assert!((before - 200.0 / 102.0).abs() < 1e-12);
        assert!((after - 400.0 / 104.0).abs() < 1e-12);
    }

    #[test]
    fn transform_can_lose_under_joined_normalization() {
        // β = 1/2, ‖B‖ = 2: s₁ = 1.2 exceeds β·s₀ = 1 but fits under the
        // joined cap (√2), so the transform gives up counted space.
        let b = MarketWeights::new(vec![1.0, 1.0]).unwrap();
        let s = Partition::new(vec![2.0, 1.2, 0.0]);
        let (t, applied) = lemma2_transform(&s, b.beta());
        assert!(applied);
        let p = UtilityParams::exact();
        assert!(total_utility(&t, &b, &p).unwrap() < total_utility(&s, &b, &p).unwrap());
    }

    #[test]
    fn lemma1_example_and_minimality() {
        assert_eq!(lemma1_objective(&[1.0, 1.0], 1.0, &[1.0]), -0.5);

        let beta = [0.2, 0.3, 0.5];
        let (c, k) = (4.0, 10.0);
        let hat: Vec<f64> = std::iter::once(c / 2.0).chain(beta.iter().map(|b| b * c / 2.0)).collect();
        let f_hat = lemma1_objective(&hat, k, &beta);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut checked = 0;
        while checked < 10_000 {
            let e: Vec<f64> = (0..4).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let sum: f64 = e.iter().sum();
            let x: Vec<f64> = e.iter().map(|v| c * v / sum).collect();
            if (1..4).all(|i| x[i] <= beta[i - 1] * x[0]) {
                assert!(f_hat <= lemma1_objective(&x, k, &beta) + 1e-15);
                checked += 1;
            }
        }
    }

    #[test]
    fn lemma1_permutation_symmetry() {
        let x = [2.0, 0.2, 0.6, 1.2];
        let beta = [0.1, 0.3, 0.6];
        let xp = [2.0, 1.2, 0.2, 0.6];
        let bp = [0.6, 0.1, 0.3];
        assert!((lemma1_objective(&x, 3.0, &beta) - lemma1_objective(&xp, 3.0, &bp)).abs() < 1e-15);
    }
}
