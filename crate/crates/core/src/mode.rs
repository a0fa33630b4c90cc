//! Integer Fourier modes `ν ∈ Z^d`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

/// A Fourier mode. Ordering is lexicographic on the components.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mode(SmallVec<[i32; 4]>);

impl Mode {
    pub fn zero(d: usize) -> Self {
        Mode(SmallVec::from_elem(0, d))
    }

    pub fn from_slice(v: &[i32]) -> Self {
        Mode(SmallVec::from_slice(v))
    }

    /// Unit vector `e_j` in dimension `d`.
    pub fn unit(d: usize, j: usize) -> Self {
        let mut m = Self::zero(d);
        m.0[j] = 1;
        m
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// ℓ¹ norm, the mode magnitude used throughout.
    pub fn l1(&self) -> usize {
        self.0.iter().map(|c| c.unsigned_abs() as usize).sum()
    }

    /// `ω·ν`.
    pub fn dot(&self, omega: &[f64]) -> f64 {
        self.0.iter().zip(omega).map(|(&n, &w)| n as f64 * w).sum()
    }

    /// `ν·ψ` for a real phase.
    pub fn phase(&self, psi: &[f64]) -> f64 {
        self.dot(psi)
    }

    /// True if the first nonzero component is positive.
    pub fn is_positive_half(&self) -> bool {
        self.0.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
    }
}

impl Add for &Mode {
    type Output = Mode;
    fn add(self, rhs: &Mode) -> Mode {
        Mode(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Mode {
    type Output = Mode;
    fn sub(self, rhs: &Mode) -> Mode {
        Mode(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Mode {
    type Output = Mode;
    fn neg(self) -> Mode {
        Mode(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Debug for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// All modes with `|ν|₁ = n`, sorted.
pub fn shell(d: usize, n: usize) -> Vec<Mode> {
    let mut out = Vec::new();
    let mut cur = vec![0i32; d];
    fill_shell(&mut cur, 0, n as i32, &mut out);
    out.sort();
    out
}

fn fill_shell(cur: &mut Vec<i32>, pos: usize, remaining: i32, out: &mut Vec<Mode>) {
    let d = cur.len();
    if pos == d - 1 {
        if remaining == 0 {
            cur[pos] = 0;
            out.push(Mode::from_slice(cur));
        } else {
            for s in [-remaining, remaining] {
                cur[pos] = s;
                out.push(Mode::from_slice(cur));
            }
        }
        return;
    }
    for a in 0..=remaining {
        let signs: &[i32] = if a == 0 { &[0] } else { &[-1, 1] };
        for &sg in signs {
            cur[pos] = sg * a;
            fill_shell(cur, pos + 1, remaining - a, out);
        }
    }
}

/// All modes with `|ν|₁ ≤ n`, sorted.
pub fn ball(d: usize, n: usize) -> Vec<Mode> {
    let mut out: Vec<Mode> = (0..=n).flat_map(|k| shell(d, k)).collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shell_counts() {
        // |{ν ∈ Z² : |ν|₁ = n}| = 4n for n ≥ 1
        for n in 1..6 {
            assert_eq!(shell(2, n).len(), 4 * n);
        }
        assert_eq!(shell(3, 0).len(), 1);
        assert_eq!(shell(1, 3).len(), 2);
        // 3-D: 4n² + 2
        assert_eq!(shell(3, 2).len(), 18);
    }

    #[test]
    fn ball_is_sorted_and_unique() {
        let b = ball(2, 4);
        assert_eq!(b.len(), 2 * 16 + 2 * 4 + 1);
        for w in b.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn arithmetic() {
        let a = Mode::from_slice(&[1, -2]);
        let b = Mode::from_slice(&[3, 1]);
        assert_eq!(&a + &b, Mode::from_slice(&[4, -1]));
        assert_eq!(&a - &b, Mode::from_slice(&[-2, -3]));
        assert_eq!(-&a, Mode::from_slice(&[-1, 2]));
        assert!(a.is_positive_half());
        assert!(!(-&a).is_positive_half());
        assert_eq!(a.l1(), 3);
        assert!(b.is_positive_half());
        assert!((a.dot(&[1.0, 0.5]) - 0.0).abs() < 1e-15);
    }
}
