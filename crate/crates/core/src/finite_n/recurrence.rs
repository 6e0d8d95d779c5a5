//! Recurrence coefficients of the monic orthogonal polynomials,
//! z P_n = P_{n+1} + β_n P_n + γ²_n P_{n−1}, from the moments.

use rug::Complex;

use super::FiniteNError;

#[derive(Clone, Debug)]
pub struct Recurrence {
    /// h_0 … h_{n_max}
    pub h: Vec<Complex>,
    /// γ²_0 (unused, zero) … γ²_{n_max}
    pub gamma2: Vec<Complex>,
    /// β_0 … β_{n_max}
    pub beta: Vec<Complex>,
}

fn is_negligible(z: &Complex) -> bool {
    z.real().is_zero() && z.imag().is_zero()
}

/// Chebyshev's algorithm (recursive bordering of the Hankel matrix); needs
/// c_0 … c_{2 n_max + 1}.
pub fn recurrence_from_moments(moments: &[Complex], n_max: usize) -> Result<Recurrence, FiniteNError> {
    let need = 2 * n_max + 2;
    if moments.len() < need {
        return Err(FiniteNError::TooFewMoments { have: moments.len(), need });
    }
    let bits = moments[0].prec().0;
    let zero = Complex::new(bits);
    let len = need;
    // σ_{k−1,·} and σ_{k,·}, indexed by l
    let mut prev: Vec<Complex> = vec![zero.clone(); len];
    let mut cur: Vec<Complex> = moments[..len].to_vec();
    if is_negligible(&cur[0]) {
        return Err(FiniteNError::Singular { n: 0 });
    }
    let mut h = vec![cur[0].clone()];
    let mut gamma2 = vec![zero.clone()];
    let mut beta = vec![Complex::with_val(bits, &cur[1] / &cur[0])];
    for k in 1..=n_max {
        let mut next = vec![zero.clone(); len];
        for l in k..(len - k) {
            let t1 = Complex::with_val(bits, &beta[k - 1] * &cur[l]);
            let t2 = Complex::with_val(bits, &gamma2[k - 1] * &prev[l]);
            next[l] = Complex::with_val(bits, &cur[l + 1] - &t1) - t2;
        }
        if is_negligible(&next[k]) {
            return Err(FiniteNError::Singular { n: k });
        }
        let g = Complex::with_val(bits, &next[k] / &cur[k - 1]);
        let b = Complex::with_val(bits, &next[k + 1] / &next[k]) - Complex::with_val(bits, &cur[k] / &cur[k - 1]);
        h.push(next[k].clone());
        gamma2.push(g);
        beta.push(b);
        prev = cur;
        cur = next;
    }
    Ok(Recurrence { h, gamma2, beta })
}

/// Direct route: determinants D_n of the Hankel matrices and the monic P_n
/// coefficients from a linear solve at each size.
#[derive(Clone, Debug)]
pub struct HankelRoute {
    /// D_{−1} = 1, D_0, … stored with D_{n−1} at index n.
    pub det: Vec<Complex>,
    /// coeffs[n][i] is the z^i coefficient of P_n (leading 1 omitted).
    pub coeffs: Vec<Vec<Complex>>,
    pub h: Vec<Complex>,
    /// γ²_n = h_n / h_{n−1}
    pub gamma2: Vec<Complex>,
    /// γ²_n from the z^(n−1) coefficients of the three-term recurrence.
    pub gamma2_three_term: Vec<Complex>,
    pub beta: Vec<Complex>,
}

/// LU with partial pivoting; returns the determinant and solves `m x = rhs`.
fn lu_solve(mut m: Vec<Vec<Complex>>, mut rhs: Vec<Complex>) -> Option<(Complex, Vec<Complex>)> {
    let n = rhs.len();
    let bits = if n > 0 { rhs[0].prec().0 } else { 64 };
    let mut det = Complex::with_val(bits, 1);
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| {
            let na = m[a][col].clone().abs().real().clone();
            let nb = m[b][col].clone().abs().real().clone();
            na.partial_cmp(&nb).unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if is_negligible(&m[pivot][col]) {
            return None;
        }
        if pivot != col {
            m.swap(pivot, col);
            rhs.swap(pivot, col);
            det = -det;
        }
        det *= &m[col][col];
        for row in (col + 1)..n {
            let f = Complex::with_val(bits, &m[row][col] / &m[col][col]);
            for k in col..n {
                let t = Complex::with_val(bits, &f * &m[col][k]);
                m[row][k] -= t;
            }
            let t = Complex::with_val(bits, &f * &rhs[col]);
            rhs[row] -= t;
        }
    }
    let mut x = vec![Complex::new(bits); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for k in (row + 1)..n {
            acc -= Complex::with_val(bits, &m[row][k] * &x[k]);
        }
        x[row] = acc / &m[row][row];
    }
    Some((det, x))
}

pub fn hankel_route(moments: &[Complex], n_max: usize) -> Result<HankelRoute, FiniteNError> {
    let need = 2 * n_max + 2;
    if moments.len() < need {
        return Err(FiniteNError::TooFewMoments { have: moments.len(), need });
    }
    let bits = moments[0].prec().0;
    let mut det = vec![Complex::with_val(bits, 1)];
    let mut coeffs = vec![Vec::new()];
    for n in 1..=(n_max + 1) {
        let m: Vec<Vec<Complex>> = (0..n).map(|i| (0..n).map(|k| moments[i + k].clone()).collect()).collect();
        let rhs: Vec<Complex> = (0..n).map(|i| -moments[i + n].clone()).collect();
        let (d, x) = lu_solve(m, rhs).ok_or(FiniteNError::Singular { n: n - 1 })?;
        det.push(d);
        coeffs.push(x);
    }
    let h: Vec<Complex> = (0..=n_max).map(|n| Complex::with_val(bits, &det[n + 1] / &det[n])).collect();
    let zero = Complex::new(bits);
    let mut gamma2 = vec![zero.clone()];
    let mut gamma2_three_term = vec![zero.clone()];
    let mut beta = Vec::new();
    let coeff = |n: usize, i: isize| -> Complex {
        if i < 0 {
            zero.clone()
        } else if i as usize == n {
            Complex::with_val(bits, 1)
        } else {
            coeffs[n][i as usize].clone()
        }
    };
    for n in 0..=n_max {
        let ni = n as isize;
        let b = coeff(n, ni - 1) - coeff(n + 1, ni);
        if n >= 1 {
            gamma2.push(Complex::with_val(bits, &h[n] / &h[n - 1]));
            let g = coeff(n, ni - 2) - coeff(n + 1, ni - 1) - Complex::with_val(bits, &b * &coeff(n, ni - 1));
            gamma2_three_term.push(g);
        }
        beta.push(b);
    }
    Ok(HankelRoute { det, coeffs, h, gamma2, gamma2_three_term, beta })
}
