//! Small dense helpers shared by quadrature and the flow integrator.

/// Determinant of a square matrix given as a list of rows (or columns).
pub fn det(rows: &[Vec<f64>]) -> f64 {
    let k = rows.len();
    let mut a: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    det_in_place(&mut a, k)
}

/// Determinant of a row-major `k x k` matrix; destroys `a`.
pub fn det_in_place(a: &mut [f64], k: usize) -> f64 {
    debug_assert_eq!(a.len(), k * k);
    let mut d = 1.0;
    for col in 0..k {
        let mut piv = col;
        let mut best = a[col * k + col].abs();
        for r in col + 1..k {
            let v = a[r * k + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            for c in 0..k {
                a.swap(col * k + c, piv * k + c);
            }
            d = -d;
        }
        let p = a[col * k + col];
        d *= p;
        for r in col + 1..k {
            let f = a[r * k + col] / p;
            if f != 0.0 {
                for c in col + 1..k {
                    a[r * k + c] -= f * a[col * k + c];
                }
            }
        }
    }
    d
}

/// Neumaier compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        iter.into_iter().for_each(|x| s.add(x));
        s
    }
}

/// Gauss–Legendre nodes and weights mapped to `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let n = std::num::NonZeroUsize::new(n.max(1)).expect("nonzero");
    let rule = gauss_quad::GaussLegendre::new(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut pts: Vec<(f64, f64)> =
        rule.into_iter().map(|(x, w)| (mid + half * x, half * w)).collect();
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    pts
}

/// Numerical rank from singular values: count of values above `rel * max`.
pub fn numerical_rank(m: &nalgebra::DMatrix<f64>, rel: f64) -> (usize, Vec<f64>) {
    if m.nrows() == 0 || m.ncols() == 0 {
        return (0, Vec::new());
    }
    let sv = m.clone().svd(false, false).singular_values;
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let largest = s.first().copied().unwrap_or(0.0);
    if largest == 0.0 {
        return (0, s);
    }
    let rank = s.iter().filter(|&&v| v > rel * largest).count();
    (rank, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_of_permutation_and_scaling() {
        let m = vec![vec![0.0, 2.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 3.0]];
        assert!((det(&m) + 6.0).abs() < 1e-14);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s: CompensatedSum = [1e16, 1.0, -1e16].into_iter().collect();
        assert_eq!(s.value(), 1.0);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(4, 0.0, 2.0);
        let v: f64 = rule.iter().map(|(x, w)| w * x.powi(7)).sum();
        assert!((v - 2f64.powi(8) / 8.0).abs() < 1e-11);
    }
}
