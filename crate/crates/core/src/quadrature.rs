//! Gauss–Legendre rules at arbitrary MPFR precision.

use rug::float::Constant;
use rug::{Complex, Float};

#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<Float>,
    weights: Vec<Float>,
    bits: u32,
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: &Float) -> (Float, Float) {
    let bits = x.prec();
    let mut p0 = Float::with_val(bits, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let kf = k as u32;
        let p2 = (Float::with_val(bits, x * &p1) * (2 * kf - 1) - Float::with_val(bits, &p0 * (kf - 1))) / kf;
        p0 = p1;
        p1 = p2;
    }
    // (1 − x²) P_n' = n (P_{n−1} − x P_n)
    let one_minus = Float::with_val(bits, 1) - Float::with_val(bits, x.square_ref());
    let d = (Float::with_val(bits, &p0 - Float::with_val(bits, x * &p1)) * n as u32) / one_minus;
    (p1, d)
}

impl GaussLegendre {
    pub fn new(n: usize, bits: u32) -> Self {
        assert!(n >= 1);
        let pi = Float::with_val(bits, Constant::Pi);
        let tol = Float::with_val(bits, Float::i_exp(1, 8 - bits as i32));
        let mut nodes = vec![Float::new(bits); n];
        let mut weights = vec![Float::new(bits); n];
        for i in 0..n.div_ceil(2) {
            let guess = Float::with_val(bits, &pi * (4 * i as u32 + 3)) / (4 * n as u32 + 2);
            let mut x = guess.cos();
            for _ in 0..200 {
                let (p, d) = legendre(n, &x);
                let dx = p / &d;
                x -= &dx;
                if dx.abs() < tol {
                    break;
                }
            }
            let (_, d) = legendre(n, &x);
            let w = Float::with_val(bits, 2)
                / (Float::with_val(bits, 1) - Float::with_val(bits, x.square_ref()))
                / Float::with_val(bits, d.square_ref());
            nodes[i] = x.clone();
            weights[i] = w.clone();
            nodes[n - 1 - i] = -x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = Float::new(bits);
        }
        Self { nodes, weights, bits }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Nodes and weights transplanted to `[lo, hi]`.
    pub fn mapped(&self, lo: &Float, hi: &Float) -> Vec<(Float, Float)> {
        let half = Float::with_val(self.bits, hi - lo) / 2u32;
        let mid = Float::with_val(self.bits, hi + lo) / 2u32;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| (Float::with_val(self.bits, x * &half) + &mid, Float::with_val(self.bits, w * &half)))
            .collect()
    }

    pub fn integrate(&self, lo: &Float, hi: &Float, f: impl Fn(&Float) -> Float) -> Float {
        self.mapped(lo, hi).iter().fold(Float::new(self.bits), |acc, (x, w)| acc + f(x) * w)
    }

    pub fn integrate_complex(&self, lo: &Float, hi: &Float, f: impl Fn(&Float) -> Complex) -> Complex {
        self.mapped(lo, hi)
            .iter()
            .fold(Complex::new(self.bits), |acc, (x, w)| acc + f(x) * w)
    }

    /// Composite rule over `panels` equal pieces of `[lo, hi]`.
    pub fn integrate_composite(&self, lo: &Float, hi: &Float, panels: usize, f: impl Fn(&Float) -> Float) -> Float {
        let width = Float::with_val(self.bits, hi - lo) / panels as u32;
        (0..panels).fold(Float::new(self.bits), |acc, k| {
            let a = Float::with_val(self.bits, &width * k as u32) + lo;
            let b = Float::with_val(self.bits, &a + &width);
            acc + self.integrate(&a, &b, &f)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    #[test]
    fn weights_sum_to_two() {
        let g = GaussLegendre::new(21, 300);
        let s = g.integrate(&Float::with_val(300, -1), &Float::with_val(300, 1), |_| Float::with_val(300, 1));
        assert!(Float::with_val(300, s - 2u32).abs() < Float::with_val(300, Float::i_exp(1, -280)));
    }

    #[test]
    fn polynomial_exactness() {
        // ∫₀¹ x^39 = 1/40 with 20 nodes
        let g = GaussLegendre::new(20, 300);
        let s = g.integrate(&Float::new(300), &Float::with_val(300, 1), |x| Float::with_val(300, (x).pow(39u32)));
        let err = Float::with_val(300, s - Float::with_val(300, 1) / 40u32).abs();
        assert!(err < Float::with_val(300, Float::i_exp(1, -280)));
    }

    #[test]
    fn gaussian_integral() {
        let bits = 400;
        let g = GaussLegendre::new(40, bits);
        let lim = Float::with_val(bits, 12);
        let s = g.integrate_composite(&Float::with_val(bits, -&lim), &lim, 12, |x| (-Float::with_val(bits, x.square_ref())).exp());
        let exact = Float::with_val(bits, Constant::Pi).sqrt();
        assert!(Float::with_val(bits, s - exact).abs() < 1e-60);
    }
}
