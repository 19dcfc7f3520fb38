use crate::error::{Error, Result};

use super::matrix::{ComplexMatrix, C64};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations, ascending.
///
/// Each rotation first removes the phase of the pivot `a[p][q]` with a diagonal
/// unitary, then applies the usual real symmetric Jacobi rotation.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("{}x{} is not square", m.rows(), m.cols())));
    }
    let dev = m.hermitian_deviation();
    if dev > 1e-10 {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.rows();
    let mut a: Vec<C64> = m.as_slice().to_vec();
    // symmetrize away rounding noise
    for i in 0..n {
        a[i * n + i] = C64::new(a[i * n + i].re, 0.0);
        for j in i + 1..n {
            let v = (a[i * n + j] + a[j * n + i].conj()) * 0.5;
            a[i * n + j] = v;
            a[j * n + i] = v.conj();
        }
    }
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, n, p, q);
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(eig)
}

fn rotate(a: &mut [C64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let b = apq.norm();
    if b < 1e-300 {
        return;
    }
    let e = apq / b;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * b);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J = D R with D = diag(1, conj(e)) on (p, q):
    //   J[p][p] = c, J[p][q] = s, J[q][p] = -s conj(e), J[q][q] = c conj(e)
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -e.conj() * s;
    let jqq = e.conj() * c;

    // A <- A J (columns)
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * jpp + akq * jqp;
        a[k * n + q] = akp * jpq + akq * jqq;
    }
    // A <- J† A (rows)
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = jpp.conj() * apk + jqp.conj() * aqk;
        a[q * n + k] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[p * n + q] = C64::new(0.0, 0.0);
    a[q * n + p] = C64::new(0.0, 0.0);
    a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
    a[q * n + q] = C64::new(a[q * n + q].re, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_y_has_eigenvalues_plus_minus_one() {
        let y = ComplexMatrix::from_rows([
            [C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
            [C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        ]);
        let e = hermitian_eigenvalues(&y).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_hermitian_3x3() {
        // eigenvalues 1, 2, 4 conjugated by a complex unitary
        let d = ComplexMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(4.0, 0.0)]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = ComplexMatrix::from_rows([
            [C64::new(s, 0.0), C64::new(0.0, s), C64::new(0.0, 0.0)],
            [C64::new(0.0, s), C64::new(s, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.6, 0.8)],
        ]);
        let m = u.matmul(&d).unwrap().matmul(&u.adjoint()).unwrap();
        let e = hermitian_eigenvalues(&m).unwrap();
        for (got, want) in e.iter().zip([1.0, 2.0, 4.0]) {
            assert!((got - want).abs() < 1e-12, "{e:?}");
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows([[1.0, 2.0], [0.0, 1.0]]);
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::NotHermitian(_))));
    }
}
