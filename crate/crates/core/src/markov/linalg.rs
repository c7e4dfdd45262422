//! Dense LU with partial pivoting, used by the stationary solver.

/// Solves `a x = b` in place. Returns `None` if a pivot falls below
/// `pivot_tol` relative to the largest entry of `a`.
pub(crate) fn lu_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, pivot_tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for k in 0..n {
        let (p, pv) = (k..n)
            .map(|i| (i, a[i][k].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pv <= pivot_tol * scale {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        let pivot_row = a[k].clone();
        let inv = 1.0 / pivot_row[k];
        for i in (k + 1)..n {
            let f = a[i][k] * inv;
            if f == 0.0 {
                continue;
            }
            let row = &mut a[i];
            for j in k..n {
                row[j] -= f * pivot_row[j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = ((k + 1)..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}
