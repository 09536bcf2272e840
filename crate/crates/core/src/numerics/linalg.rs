use super::scaled::ScaledReal;

/// Determinant by Gaussian elimination with full pivoting.
pub fn determinant(mut m: Vec<Vec<ScaledReal>>) -> ScaledReal {
    let n = m.len();
    assert!(m.iter().all(|row| row.len() == n), "determinant of a non-square matrix");
    if n == 0 {
        return ScaledReal::one(64);
    }
    let prec = m.iter().flatten().map(ScaledReal::prec).max().unwrap_or(64);
    let mut det = ScaledReal::one(prec);
    for col in 0..n {
        let (pr, pc) = pivot(&m, col);
        if m[pr][pc].is_zero() {
            return ScaledReal::zero(prec);
        }
        if pr != col {
            m.swap(pr, col);
            det = -det;
        }
        if pc != col {
            for row in m.iter_mut() {
                row.swap(pc, col);
            }
            det = -det;
        }
        let p = m[col][col].clone();
        det = &det * &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &p;
            let (top, bottom) = m.split_at_mut(r);
            for (x, y) in bottom[0][col + 1..].iter_mut().zip(&top[col][col + 1..]) {
                *x = &*x - &(&factor * y);
            }
        }
    }
    det
}

fn pivot(m: &[Vec<ScaledReal>], start: usize) -> (usize, usize) {
    let mut best = (start, start);
    let mut best_abs = m[start][start].abs();
    for (r, row) in m.iter().enumerate().skip(start) {
        for (c, v) in row.iter().enumerate().skip(start) {
            let a = v.abs();
            if a > best_abs {
                best_abs = a;
                best = (r, c);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> Vec<Vec<ScaledReal>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| ScaledReal::from_f64(128, x)).collect())
            .collect()
    }

    #[test]
    fn small_determinants() {
        assert_eq!(determinant(mat(&[&[3.0]])).to_f64(), 3.0);
        assert_eq!(determinant(mat(&[&[1.0, 2.0], &[3.0, 4.0]])).to_f64(), -2.0);
        let d = determinant(mat(&[&[2.0, -1.0, 0.0], &[-1.0, 2.0, -1.0], &[0.0, -1.0, 2.0]]));
        assert!((d.to_f64() - 4.0).abs() < 1e-30);
        assert!(determinant(mat(&[&[1.0, 2.0], &[2.0, 4.0]])).to_f64().abs() < 1e-35);
        assert_eq!(determinant(mat(&[&[0.0, 1.0], &[1.0, 0.0]])).to_f64(), -1.0);
    }

    #[test]
    fn permutation_signs() {
        let d = determinant(mat(&[&[0.0, 0.0, 5.0], &[0.0, 7.0, 0.0], &[2.0, 0.0, 0.0]]));
        assert_eq!(d.to_f64(), -70.0);
    }
}
