//! Brute-force Wick enumeration for p cubic vertices: every perfect matching of
//! the 3p labelled half-edges, classified by connectivity and genus.

use std::collections::BTreeMap;

use crate::parallel::Execution;

pub const MAX_VERTICES: usize = 6;
const UNMATCHED: u8 = u8::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WickError {
    #[error("p = {0} must be even and positive")]
    OddOrZero(usize),
    #[error("p = {0} exceeds the exhaustive limit {MAX_VERTICES}")]
    TooLarge(usize),
    #[error("malformed matching: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct PairingTally {
    pub p: usize,
    pub total_pairings: u64,
    pub connected_by_genus: BTreeMap<u32, u64>,
    pub disconnected: u64,
}

impl PairingTally {
    fn empty(p: usize) -> Self {
        Self { p, ..Default::default() }
    }

    fn merge(&mut self, other: &PairingTally) {
        self.total_pairings += other.total_pairings;
        self.disconnected += other.disconnected;
        for (g, n) in &other.connected_by_genus {
            *self.connected_by_genus.entry(*g).or_default() += n;
        }
    }

    fn record(&mut self, outcome: Option<u32>) {
        self.total_pairings += 1;
        match outcome {
            Some(g) => *self.connected_by_genus.entry(g).or_default() += 1,
            None => self.disconnected += 1,
        }
    }

    pub fn connected(&self, g: u32) -> u64 {
        self.connected_by_genus.get(&g).copied().unwrap_or(0)
    }

    /// (3p − 1)!!
    pub fn expected_total(&self) -> u64 {
        double_factorial_odd(3 * self.p as u64 - 1)
    }
}

pub fn double_factorial_odd(n: u64) -> u64 {
    (1..=n).rev().step_by(2).product()
}

/// Cyclic successor of a half-edge within its vertex.
#[inline]
fn sigma(h: usize) -> usize {
    3 * (h / 3) + (h + 1) % 3
}

/// `None` if disconnected, else the genus from p + f − 3p/2 − 2 = −2g.
fn classify(p: usize, mate: &[u8]) -> Option<u32> {
    let n = 3 * p;
    // connectivity over vertices
    let mut reached: u32 = 1;
    let mut frontier: u32 = 1;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        for leg in 0..3 {
            let w = mate[3 * v + leg] as usize / 3;
            if reached & (1 << w) == 0 {
                reached |= 1 << w;
                frontier |= 1 << w;
            }
        }
    }
    if reached.count_ones() as usize != p {
        return None;
    }
    // faces: cycles of σ∘α
    let mut seen: u64 = 0;
    let mut faces = 0i64;
    for start in 0..n {
        if seen & (1 << start) != 0 {
            continue;
        }
        faces += 1;
        let mut h = start;
        while seen & (1 << h) == 0 {
            seen |= 1 << h;
            h = sigma(mate[h] as usize);
        }
    }
    let euler = p as i64 + faces - (3 * p as i64) / 2;
    let two_g = 2 - euler;
    debug_assert!(two_g >= 0 && two_g % 2 == 0);
    Some((two_g / 2) as u32)
}

/// Classifies one matching given as the partner of every half-edge.
pub fn genus_of_pairing(p: usize, matching: &[usize]) -> Result<(bool, Option<u32>), WickError> {
    let n = 3 * p;
    if p == 0 || n > 64 {
        return Err(WickError::Malformed(format!("unsupported vertex count {p}")));
    }
    if matching.len() != n {
        return Err(WickError::Malformed(format!("expected {n} entries, got {}", matching.len())));
    }
    for (h, &m) in matching.iter().enumerate() {
        if m >= n {
            return Err(WickError::Malformed(format!("half-edge {h} paired with {m}")));
        }
        if m == h {
            return Err(WickError::Malformed(format!("half-edge {h} is a fixed point")));
        }
        if matching[m] != h {
            return Err(WickError::Malformed(format!("not an involution at {h}")));
        }
    }
    let mate: Vec<u8> = matching.iter().map(|&m| m as u8).collect();
    let g = classify(p, &mate);
    Ok((g.is_some(), g))
}

fn lowest_unmatched(mate: &[u8]) -> Option<usize> {
    mate.iter().position(|&m| m == UNMATCHED)
}

fn descend(p: usize, mate: &mut [u8], tally: &mut PairingTally) {
    let Some(a) = lowest_unmatched(mate) else {
        tally.record(classify(p, mate));
        return;
    };
    for b in (a + 1)..mate.len() {
        if mate[b] != UNMATCHED {
            continue;
        }
        mate[a] = b as u8;
        mate[b] = a as u8;
        descend(p, mate, tally);
        mate[a] = UNMATCHED;
        mate[b] = UNMATCHED;
    }
}

/// Partial matchings after the first `depth` canonical choices.
fn prefixes(n: usize, depth: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![UNMATCHED; n]];
    for _ in 0..depth {
        let mut next = Vec::new();
        for mate in &out {
            let Some(a) = lowest_unmatched(mate) else {
                next.push(mate.clone());
                continue;
            };
            for b in (a + 1)..n {
                if mate[b] == UNMATCHED {
                    let mut m = mate.clone();
                    m[a] = b as u8;
                    m[b] = a as u8;
                    next.push(m);
                }
            }
        }
        out = next;
    }
    out
}

pub fn enumerate(p: usize, exec: Execution) -> Result<PairingTally, WickError> {
    if p == 0 || p % 2 == 1 {
        return Err(WickError::OddOrZero(p));
    }
    if p > MAX_VERTICES {
        return Err(WickError::TooLarge(p));
    }
    let tasks = prefixes(3 * p, 2);
    let parts = exec.map(&tasks, |prefix| {
        let mut mate = prefix.clone();
        let mut tally = PairingTally::empty(p);
        descend(p, &mut mate, &mut tally);
        tally
    });
    let mut total = PairingTally::empty(p);
    for part in &parts {
        total.merge(part);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_vertices() {
        let t = enumerate(2, Execution::Sequential).unwrap();
        assert_eq!(t.connected(0), 12);
        assert_eq!(t.connected(1), 3);
        assert_eq!(t.disconnected, 0);
        assert_eq!(t.total_pairings, 15);
    }

    #[test]
    fn four_vertices() {
        let t = enumerate(4, Execution::Auto).unwrap();
        assert_eq!(t.connected(0), 5184);
        assert_eq!(t.connected(1), 4536);
        assert_eq!(t.connected(2), 0);
        assert_eq!(t.disconnected, 3 * 15 * 15);
        assert_eq!(t.total_pairings, t.expected_total());
        assert_eq!(t, enumerate(4, Execution::Sequential).unwrap());
    }

    #[test]
    fn bad_vertex_counts() {
        assert_eq!(enumerate(3, Execution::Sequential), Err(WickError::OddOrZero(3)));
        assert_eq!(enumerate(0, Execution::Sequential), Err(WickError::OddOrZero(0)));
        assert_eq!(enumerate(8, Execution::Sequential), Err(WickError::TooLarge(8)));
    }

    #[test]
    fn parallel_legs() {
        // leg i of vertex 0 to leg i of vertex 1
        let (conn, g) = genus_of_pairing(2, &[3, 4, 5, 0, 1, 2]).unwrap();
        assert!(conn);
        assert!(g.unwrap() <= 1);
        // leg i to leg 2 − i reverses orientation
        let (_, g2) = genus_of_pairing(2, &[5, 4, 3, 2, 1, 0]).unwrap();
        assert_ne!(g, g2);
    }

    #[test]
    fn malformed_matchings() {
        assert!(genus_of_pairing(2, &[0, 4, 5, 3, 1, 2]).is_err());
        assert!(genus_of_pairing(2, &[3, 4, 5, 0, 2, 1]).is_err());
        assert!(genus_of_pairing(2, &[3, 4, 5]).is_err());
    }

    #[test]
    fn split_matching_is_disconnected() {
        let m = [3, 4, 5, 0, 1, 2, 9, 10, 11, 6, 7, 8];
        assert_eq!(genus_of_pairing(4, &m).unwrap(), (false, None));
    }
}
