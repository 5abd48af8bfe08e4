use std::fmt;

use serde::{Deserialize, Serialize};

/// Signed generator index: `+(i+1)` is generator `i`, `-(i+1)` its inverse.
pub type Letter = i32;

#[inline]
pub fn letter(gen: usize, inverse: bool) -> Letter {
    let l = gen as Letter + 1;
    if inverse {
        -l
    } else {
        l
    }
}

#[inline]
pub fn gen_of(l: Letter) -> usize {
    (l.unsigned_abs() - 1) as usize
}

/// Column of a coset table for a letter: `2i` for `x_i`, `2i+1` for `x_i^-1`.
#[inline]
pub fn column_of(l: Letter) -> usize {
    2 * gen_of(l) + usize::from(l < 0)
}

/// A freely reduced word in a free group.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word{:?}", self.0)
    }
}

/// Free reduction of an arbitrary letter sequence.
pub fn free_reduce(letters: &[Letter]) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        assert!(l != 0, "letter 0 is not a generator");
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: &[Letter]) -> Self {
        free_reduce(letters)
    }

    pub fn gen(i: usize) -> Self {
        Word(vec![letter(i, false)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        for &l in &other.0 {
            if v.last() == Some(&-l) {
                v.pop();
            } else {
                v.push(l);
            }
        }
        Word(v)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        (0..e.unsigned_abs()).fold(Word::empty(), |acc, _| acc.mul(&base))
    }

    /// `y x y^-1`
    pub fn conjugate_by(&self, y: &Word) -> Word {
        y.mul(self).mul(&y.inverse())
    }

    /// `[x, y] = x y x^-1 y^-1`
    pub fn commutator(x: &Word, y: &Word) -> Word {
        x.mul(y).mul(&x.inverse()).mul(&y.inverse())
    }

    pub fn cyclically_reduce(&self) -> Word {
        let v = &self.0;
        let (mut i, mut j) = (0usize, v.len());
        while j > i + 1 && v[i] == -v[j - 1] {
            i += 1;
            j -= 1;
        }
        Word(v[i..j].to_vec())
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self, n_gens: usize) -> Vec<i64> {
        let mut out = vec![0i64; n_gens];
        for &l in &self.0 {
            out[gen_of(l)] += l.signum() as i64;
        }
        out
    }

    /// Substitute each generator by a word.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Word::empty();
        for &l in &self.0 {
            let w = &images[gen_of(l)];
            out = if l > 0 { out.mul(w) } else { out.mul(&w.inverse()) };
        }
        out
    }

    pub fn max_gen(&self) -> Option<usize> {
        self.0.iter().map(|&l| gen_of(l)).max()
    }

    pub fn format(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut k = 0;
        while k < self.0.len() {
            let l = self.0[k];
            let mut run = 1;
            while k + run < self.0.len() && self.0[k + run] == l {
                run += 1;
            }
            let name = &names[gen_of(l)];
            let e = if l < 0 { -(run as i64) } else { run as i64 };
            parts.push(if e == 1 { name.clone() } else { format!("{name}^{e}") });
            k += run;
        }
        parts.join(" ")
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        free_reduce(&v)
    }
}

/// Default generator names `a, b, ..., z, x26, x27, ...`.
pub fn default_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("x{i}")
            }
        })
        .collect()
}
