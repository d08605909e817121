//! Lower bounds on random and averaged Dehn functions of `Z^d`.
//!
//! A word over `{±e_1, ..., ±e_d}` (plus a lazy letter) is closed by a
//! shortest word for the inverse of its endpoint, projected to the first two
//! coordinates, and the total winding of the projected loop is used as the
//! abelianized area. Only this lower bound is computed; no disc fillings.

use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Hypergeometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, sample_seed};
use crate::stats::{Summary, Welford};
use crate::walk::{close_loop, LatticeKind, Vertex, WalkPath};
use crate::winding::total_winding_of;

/// Lazy letter: counts towards the length, moves nowhere.
pub const LAZY: i8 = 0;

/// A word over the generators of `Z^d`. Letter `±(i + 1)` is `±e_{i+1}`;
/// [`LAZY`] is the lazy step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Word {
    pub d: usize,
    pub letters: Vec<i8>,
}

impl Word {
    pub fn new(d: usize, letters: Vec<i8>) -> Result<Self> {
        if d < 2 {
            return Err(Error::arg("d", "dimension must be at least 2"));
        }
        if d > i8::MAX as usize {
            return Err(Error::arg("d", "dimension too large"));
        }
        if let Some(l) = letters.iter().find(|l| l.unsigned_abs() as usize > d) {
            return Err(Error::arg("letters", format!("letter {l} outside Z^{d}")));
        }
        Ok(Word { d, letters })
    }

    /// Uniform word of length `n` over the `2d` generators.
    pub fn random(n: usize, d: usize, seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        let letters = (0..n)
            .map(|_| {
                let g = rng.random_range(0..2 * d) as i8;
                if g % 2 == 0 {
                    g / 2 + 1
                } else {
                    -(g / 2 + 1)
                }
            })
            .collect();
        Word::new(d, letters)
    }

    /// Length, lazy letters included.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Sum of the letters in `Z^d`.
    pub fn endpoint(&self) -> Vec<i64> {
        let mut x = vec![0i64; self.d];
        for &l in &self.letters {
            if l != LAZY {
                x[l.unsigned_abs() as usize - 1] += l.signum() as i64;
            }
        }
        x
    }

    /// Vertices of the projection to the first two coordinates, with
    /// stationary steps contracted.
    pub fn projected_vertices(&self) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = vec![[0, 0]];
        let mut cur = [0i64, 0];
        for &l in &self.letters {
            let s = l.signum() as i64;
            match l.unsigned_abs() {
                1 => cur[0] += s,
                2 => cur[1] += s,
                _ => continue,
            }
            v.push(cur);
        }
        v
    }
}

/// `x` with a shortest word representing `-x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosingWord {
    pub x: Vec<i64>,
    pub word: Word,
}

/// Shortest word for `-x`, axis by axis in order.
pub fn min_word(x: &[i64]) -> Result<ClosingWord> {
    let mut letters = Vec::new();
    for (i, &c) in x.iter().enumerate() {
        let g = (i + 1) as i8;
        let l = if c > 0 { -g } else { g };
        letters.extend(std::iter::repeat_n(l, c.unsigned_abs() as usize));
    }
    Ok(ClosingWord {
        x: x.to_vec(),
        word: Word::new(x.len(), letters)?,
    })
}

/// Total winding of the projection of a closed word.
fn projected_area(word: &Word) -> Result<f64> {
    let path = WalkPath::from_vertices(LatticeKind::Square, word.projected_vertices())?;
    let area = total_winding_of(&close_loop(path))?;
    Ok(area.to_f64())
}

/// `max(0, total winding of the projected loop w v - 4 l(v)^2)` where `v`
/// is the shortest closing word of `w`.
pub fn rnd_dehn_lower(word: &Word) -> Result<f64> {
    if word.d < 2 {
        return Err(Error::arg("d", "dimension must be at least 2"));
    }
    let closing = min_word(&word.endpoint())?;
    let l = closing.word.len() as f64;
    let mut closed = word.clone();
    closed.letters.extend(closing.word.letters);
    Ok((projected_area(&closed)? - 4.0 * l * l).max(0.0))
}

/// `rnd_dehn_lower` over `samples` uniform words of length `n` in `Z^d`;
/// word `i` has seed `sample_seed(seed, i)`.
pub fn rnd_dehn_estimate(n: usize, d: usize, samples: usize, seed: u64) -> Result<Summary> {
    let mut w = Welford::new();
    for i in 0..samples {
        w.push(rnd_dehn_lower(&Word::random(
            n,
            d,
            sample_seed(seed, i as u64),
        )?)?);
    }
    Ok(w.summary())
}

fn check_parity(n: usize) -> Result<()> {
    if n % 2 == 1 {
        return Err(Error::arg("n", "closed walks on Z^2 have even length"));
    }
    Ok(())
}

/// Uniform closed word of even length `n` in `Z^2`.
///
/// The number of closed words with `k` letters `±e_1` of each sign is
/// `C(n, n/2) C(n/2, k)^2`, so `k` is hypergeometric; the letters are then
/// shuffled uniformly.
pub fn bridge_word(n: usize, seed: u64) -> Result<Word> {
    check_parity(n)?;
    let mut rng = rng_from_seed(seed);
    let m = (n / 2) as u64;
    let k = if m == 0 {
        0
    } else {
        Hypergeometric::new(2 * m, m, m)
            .map_err(|e| Error::Internal(e.to_string()))?
            .sample(&mut rng) as usize
    };
    let m = m as usize;
    let mut letters = Vec::with_capacity(n);
    for (l, c) in [(1i8, k), (-1, k), (2, m - k), (-2, m - k)] {
        letters.extend(std::iter::repeat_n(l, c));
    }
    letters.shuffle(&mut rng);
    Word::new(2, letters)
}

/// Mean total winding of uniform closed walks of length `n` on `Z^2`;
/// sample `i` has seed `sample_seed(seed, i)`.
pub fn avg_dehn_lower(n: usize, samples: usize, seed: u64) -> Result<Summary> {
    check_parity(n)?;
    let mut w = Welford::new();
    for i in 0..samples {
        w.push(projected_area(&bridge_word(
            n,
            sample_seed(seed, i as u64),
        )?)?);
    }
    Ok(w.summary())
}

/// Exact mean total winding over all closed walks of length `n` on `Z^2`,
/// by enumeration (`4^n` words, so small `n` only).
pub fn avg_dehn_exact(n: usize) -> Result<BigRational> {
    check_parity(n)?;
    if n > 16 {
        return Err(Error::arg("n", "enumeration is limited to n <= 16"));
    }
    let mut total = BigRational::zero();
    let mut count = 0u64;
    let mut letters = vec![0i8; n];
    for code in 0..1u64 << (2 * n) {
        let (mut x, mut y) = (0i64, 0i64);
        for (j, l) in letters.iter_mut().enumerate() {
            *l = [1, -1, 2, -2][((code >> (2 * j)) & 3) as usize];
            match *l {
                1 => x += 1,
                -1 => x -= 1,
                2 => y += 1,
                _ => y -= 1,
            }
        }
        if x != 0 || y != 0 {
            continue;
        }
        let word = Word::new(2, letters.clone())?;
        let path = WalkPath::from_vertices(LatticeKind::Square, word.projected_vertices())?;
        total += total_winding_of(&close_loop(path))?.basis;
        count += 1;
    }
    Ok(total / BigRational::from_integer(count.into()))
}

/// Rejection sampler for closed walks: draws uniform words until one
/// closes. Exact but slow; acceptance is about `2 / (pi n)`.
pub fn bridge_word_rejection(n: usize, seed: u64) -> Result<Word> {
    check_parity(n)?;
    for attempt in 0.. {
        let w = Word::random(n, 2, sample_seed(seed, attempt))?;
        if w.endpoint().iter().all(|c| *c == 0) {
            return Ok(w);
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_word_examples() {
        assert!(min_word(&[0, 0]).unwrap().word.is_empty());
        let c = min_word(&[2, -1]).unwrap();
        assert_eq!(c.word.len(), 3);
        assert_eq!(c.word.endpoint(), vec![-2, 1]);
        assert_eq!(c.word.letters, vec![-1, -1, 2]);
    }

    #[test]
    fn min_word_property() {
        let mut rng = rng_from_seed(4);
        for _ in 0..10_000 {
            let d = rng.random_range(2..6);
            let x: Vec<i64> = (0..d).map(|_| rng.random_range(-50..=50)).collect();
            let c = min_word(&x).unwrap();
            let neg: Vec<i64> = x.iter().map(|v| -v).collect();
            assert_eq!(c.word.endpoint(), neg);
            assert_eq!(c.word.len() as i64, x.iter().map(|v| v.abs()).sum::<i64>());
        }
    }

    #[test]
    fn unit_square_and_out_and_back() {
        let sq = Word::new(2, vec![1, 2, -1, -2]).unwrap();
        assert_eq!(rnd_dehn_lower(&sq).unwrap(), 1.0);
        let back = Word::new(2, vec![1, 1, 2, -2, -1, -1]).unwrap();
        assert_eq!(rnd_dehn_lower(&back).unwrap(), 0.0);
        assert!(Word::new(1, vec![1]).is_err());
    }

    #[test]
    fn lazy_and_higher_letters_are_contracted() {
        let w = Word::new(3, vec![1, LAZY, 3, 2, -3, -1, LAZY, -2]).unwrap();
        assert_eq!(w.len(), 8);
        assert_eq!(
            w.projected_vertices(),
            vec![[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]]
        );
        assert_eq!(rnd_dehn_lower(&w).unwrap(), 1.0);
    }

    #[test]
    fn relabeling_upper_axes_is_invisible() {
        let w = Word::random(400, 4, 8).unwrap();
        let swapped = Word::new(
            4,
            w.letters
                .iter()
                .map(|&l| match l.unsigned_abs() {
                    3 => 4 * l.signum(),
                    4 => 3 * l.signum(),
                    _ => l,
                })
                .collect(),
        )
        .unwrap();
        assert_eq!(
            rnd_dehn_lower(&w).unwrap(),
            rnd_dehn_lower(&swapped).unwrap()
        );
    }

    #[test]
    fn closed_words_give_total_winding() {
        for seed in 0..20 {
            let w = bridge_word(60, seed).unwrap();
            assert_eq!(rnd_dehn_lower(&w).unwrap(), projected_area(&w).unwrap());
        }
    }

    #[test]
    fn small_enumerations() {
        assert!(avg_dehn_exact(2).unwrap().is_zero());
        assert_eq!(
            avg_dehn_exact(4).unwrap(),
            BigRational::new(2.into(), 9.into())
        );
        assert!(avg_dehn_exact(3).is_err());
        assert!(avg_dehn_lower(5, 1, 0).is_err());
    }

    #[test]
    fn bridge_words_close() {
        for seed in 0..100 {
            let w = bridge_word(50, seed).unwrap();
            assert_eq!(w.len(), 50);
            assert_eq!(w.endpoint(), vec![0, 0]);
        }
        assert!(bridge_word(0, 1).unwrap().is_empty());
    }
}
