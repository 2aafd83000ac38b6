use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::multichain::{joined_cap, CapRule, MarketWeights};

use super::{Partition, UtilityParams};

/// Closed-form optimum `(c/2, (c/2)·β)`.
pub fn optimal_partition(c: f64, market: &MarketWeights) -> Partition {
    let half = c / 2.0;
    let mut s = Vec::with_capacity(market.len() + 1);
    s.push(half);
    s.extend(market.beta().iter().map(|b| half * b));
    Partition::new(s)
}

/// `total_utility` specialised for repeated evaluation over one market.
struct Objective<'a> {
    b: &'a [f64],
    beta: &'a [f64],
    norm: f64,
    p: UtilityParams,
}

impl<'a> Objective<'a> {
    fn new(market: &'a MarketWeights, p: &UtilityParams) -> Self {
        Objective {
            b: market.weights(),
            beta: market.beta(),
            norm: market.norm(),
            p: *p,
        }
    }

    fn cap(&self, s0: f64, k: usize) -> f64 {
        match self.p.cap_rule {
            CapRule::Joined => joined_cap(s0, self.b[k], self.norm, self.p.cap_slack),
            CapRule::Static => (1.0 + self.p.cap_slack) * self.beta[k] * s0,
        }
    }

    fn caps(&self, s0: f64) -> Vec<f64> {
        (0..self.b.len()).map(|k| self.cap(s0, k)).collect()
    }

    fn with_caps(&self, chains: &[f64], caps: &[f64]) -> f64 {
        let mut u = 0.0;
        for k in 0..self.b.len() {
            let e = chains[k].min(caps[k]);
            if e > 0.0 {
                u += self.b[k] * e / (self.b[k] + e);
            }
        }
        self.p.r * self.p.omega * u
    }

    fn eval(&self, s: &[f64]) -> f64 {
        self.with_caps(&s[1..], &self.caps(s[0]))
    }
}

/// Visits every composition of `total` into `parts.len()` nonnegative parts
/// in lexicographic order.
fn compositions(parts: &mut [u32], total: u32, visit: &mut impl FnMut(&[u32])) {
    fn rec(parts: &mut [u32], i: usize, left: u32, visit: &mut impl FnMut(&[u32])) {
        if i + 1 == parts.len() {
            parts[i] = left;
            visit(parts);
            return;
        }
        for v in 0..=left {
            parts[i] = v;
            rec(parts, i + 1, left - v, visit);
        }
    }
    if parts.is_empty() {
        if total == 0 {
            visit(parts);
        }
        return;
    }
    rec(parts, 0, total, visit);
}

/// Best grid point of `𝒟_c` with step `c/n`. Ties keep the
/// lexicographically first point.
fn grid_search(c: f64, n: u32, obj: &Objective) -> (f64, Vec<f64>) {
    let m = obj.b.len();
    let step = c / n as f64;
    let per_s0: Vec<(f64, Vec<u32>)> = (0..=n)
        .into_par_iter()
        .map(|a0| {
            let caps = obj.caps(a0 as f64 * step);
            let mut parts = vec![0u32; m];
            let mut chains = vec![0.0; m];
            let mut best = (f64::NEG_INFINITY, Vec::new());
            compositions(&mut parts, n - a0, &mut |pt| {
                for (x, &q) in chains.iter_mut().zip(pt) {
                    *x = q as f64 * step;
                }
                let u = obj.with_caps(&chains, &caps);
                if u > best.0 {
                    best = (u, pt.to_vec());
                }
            });
            let mut point = vec![a0];
            point.extend(best.1);
            (best.0, point)
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for (u, pt) in per_s0 {
        if u > best.0 {
            best = (u, pt);
        }
    }
    (best.0, best.1.iter().map(|&q| q as f64 * step).collect())
}

/// Pairwise mass transfers `s_j → s_i` of size `h`, halving `h` whenever no
/// transfer improves, until `h` drops below `1e-13·c`.
fn refine(mut s: Vec<f64>, mut h: f64, c: f64, obj: &Objective) -> (f64, Vec<f64>) {
    let mut u = obj.eval(&s);
    let n = s.len();
    while h > 1e-13 * c {
        let mut improved = true;
        let mut sweeps = 0;
        while improved && sweeps < 10_000 {
            improved = false;
            sweeps += 1;
            for i in 0..n {
                for j in 0..n {
                    if i == j || s[j] <= 0.0 {
                        continue;
                    }
                    let d = h.min(s[j]);
                    let mut t = s.clone();
                    t[i] += d;
                    t[j] -= d;
                    let v = obj.eval(&t);
                    if v > u {
                        s = t;
                        u = v;
                        improved = true;
                    }
                }
            }
        }
        h /= 2.0;
    }
    (u, s)
}

/// Euclidean projection onto `{x ≥ 0, Σx = c}`.
fn project_simplex(v: &[f64], c: f64) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, &x) in u.iter().enumerate() {
        acc += x;
        let t = (acc - c) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

fn gradient_ascent(start: Vec<f64>, c: f64, obj: &Objective) -> (f64, Vec<f64>) {
    let mut s = start;
    let mut u = obj.eval(&s);
    let mut eta = 0.1 * c;
    let eps = 1e-7 * c;
    for _ in 0..2_000 {
        let grad: Vec<f64> = (0..s.len())
            .map(|i| {
                let mut a = s.clone();
                let mut b = s.clone();
                a[i] += eps;
                b[i] = (b[i] - eps).max(0.0);
                (obj.eval(&a) - obj.eval(&b)) / (a[i] - b[i])
            })
            .collect();
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        let cand = project_simplex(
            &s.iter().zip(&grad).map(|(x, g)| x + eta * g / norm).collect::<Vec<_>>(),
            c,
        );
        let v = obj.eval(&cand);
        if v > u {
            s = cand;
            u = v;
        } else {
            eta /= 2.0;
            if eta < 1e-12 * c {
                break;
            }
        }
    }
    (u, s)
}

/// Numeric maximizer of `total_utility` over `𝒟_c`, independent of the
/// closed form.
///
/// For `M ≤ 4` the whole simplex grid with step `c·resolution` is scanned;
/// larger `M` runs projected-gradient ascent from 20 random starts. Either
/// result is then polished by pairwise coordinate transfers. Deterministic
/// for fixed inputs and `seed`.
pub fn numeric_optimum(c: f64, market: &MarketWeights, p: &UtilityParams, resolution: f64, seed: u64) -> Partition {
    assert!(c > 0.0 && resolution > 0.0 && resolution <= 1.0);
    let obj = Objective::new(market, p);
    let m = market.len();
    let n = (1.0 / resolution).round().max(1.0) as u32;
    let step = c / n as f64;
    let start = if m <= 4 {
        grid_search(c, n, &obj).1
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = (f64::NEG_INFINITY, Vec::new());
        for _ in 0..20 {
            let e: Vec<f64> = (0..=m).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let sum: f64 = e.iter().sum();
            let x0 = e.iter().map(|x| c * x / sum).collect();
            let (u, s) = gradient_ascent(x0, c, &obj);
            if u > best.0 {
                best = (u, s);
            }
        }
        best.1
    };
    let (_, s) = refine(start, step, c, &obj);
    Partition::new(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economics::total_utility;

    fn m(b: &[f64]) -> MarketWeights {
        MarketWeights::new(b.to_vec()).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(optimal_partition(4.0, &m(&[100.0, 100.0])).slots(), &[2.0, 1.0, 1.0]);
        assert_eq!(optimal_partition(2.0, &m(&[7.0])).slots(), &[1.0, 1.0]);
        let b = m(&[3.0, 5.0, 11.0]);
        for c in [0.5, 3.0, 1e6] {
            let s = optimal_partition(c, &b);
            assert!(s.is_admissible(c));
            for k in 1..=3 {
                assert_eq!(s.chain(k), b.beta_k(k) * s.shared());
            }
            let norm = s.normalized();
            let ref_norm = optimal_partition(1.0, &b).normalized();
            for (a, r) in norm.iter().zip(ref_norm) {
                assert!((a - r).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn fast_objective_agrees_with_total_utility() {
        let b = m(&[40.0, 25.0, 9.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in [UtilityParams::default(), UtilityParams::exact(), UtilityParams::static_cap()] {
            let obj = Objective::new(&b, &p);
            for _ in 0..200 {
                let s: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..20.0)).collect();
                let want = total_utility(&Partition::new(s.clone()), &b, &p).unwrap();
                assert!((obj.eval(&s) - want).abs() <= 1e-12 * want.max(1.0));
            }
        }
    }

    #[test]
    fn compositions_enumerates_all() {
        let mut count = 0;
        let mut last: Option<Vec<u32>> = None;
        compositions(&mut [0u32; 3], 5, &mut |p| {
            assert_eq!(p.iter().sum::<u32>(), 5);
            if let Some(l) = &last {
                assert!(l.as_slice() < p);
            }
            last = Some(p.to_vec());
            count += 1;
        });
        assert_eq!(count, 21);
    }

    #[test]
    fn projection_lands_on_simplex() {
        let x = project_simplex(&[3.0, -1.0, 0.5], 2.0);
        assert!((x.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        assert!(x.iter().all(|v| *v >= 0.0));
        assert_eq!(project_simplex(&[1.0, 1.0], 2.0), vec![1.0, 1.0]);
    }

    #[test]
    fn numeric_matches_spec_examples() {
        let p = UtilityParams::static_cap();
        let s = numeric_optimum(2.0, &m(&[100.0]), &p, 1.0 / 200.0, 0);
        assert!(s.max_abs_diff(&Partition::new(vec![1.0, 1.0])) <= 2.0 * 2.0 / 200.0);
        let s = numeric_optimum(4.0, &m(&[300.0, 100.0]), &p, 1.0 / 200.0, 0);
        assert!(s.max_abs_diff(&Partition::new(vec![2.0, 1.5, 0.5])) <= 2.0 * 4.0 / 200.0);
    }

    #[test]
    fn numeric_dominates_random_points() {
        let b = m(&[50.0, 20.0]);
        let p = UtilityParams::exact();
        let c = 6.0;
        let best = total_utility(&numeric_optimum(c, &b, &p, 1.0 / 100.0, 0), &b, &p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10_000 {
            let e: Vec<f64> = (0..3).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let sum: f64 = e.iter().sum();
            let s = Partition::new(e.iter().map(|x| c * x / sum).collect());
            assert!(total_utility(&s, &b, &p).unwrap() <= best + 1e-12);
        }
    }

    #[test]
    fn gradient_path_for_many_chains() {
        let b = m(&[10.0, 20.0, 30.0, 40.0, 50.0, 60.0]);
        let p = UtilityParams::static_cap();
        let c = 3.0;
        let s = numeric_optimum(c, &b, &p, 1.0 / 200.0, 5);
        let closed = optimal_partition(c, &b);
        assert!(s.max_abs_diff(&closed) <= 2.0 * c / 200.0, "{s:?}");
        let again = numeric_optimum(c, &b, &p, 1.0 / 200.0, 5);
        assert_eq!(s, again);
    }
}
