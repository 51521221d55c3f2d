//! Sign words, tree labels and the `RLL` reduction.
//!
//! A [`SignWord`] stores the draws `X(3), X(4), ...` 0-based; [`INDEX_OFFSET`]
//! converts a storage position to the time index used in the recurrence.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::params::ModelCase;

/// Time index of the first stored letter.
pub const INDEX_OFFSET: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    R,
    L,
}

impl Letter {
    pub fn flipped(self) -> Letter {
        match self {
            Letter::R => Letter::L,
            Letter::L => Letter::R,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::R => 'R',
            Letter::L => 'L',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SignWord {
    pub letters: Vec<Letter>,
}

impl SignWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        SignWord { letters }
    }

    pub fn empty() -> Self {
        SignWord::default()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Word whose bits, most significant first, read `1 = R`.
    pub fn from_bits(bits: u64, len: usize) -> Self {
        let letters = (0..len)
            .map(|i| {
                if (bits >> (len - 1 - i)) & 1 == 1 {
                    Letter::R
                } else {
                    Letter::L
                }
            })
            .collect();
        SignWord { letters }
    }

    pub fn count(&self, letter: Letter) -> usize {
        self.letters.iter().filter(|&&l| l == letter).count()
    }

    pub fn concat(&self, other: &SignWord) -> SignWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        SignWord { letters }
    }

    /// Path in the tree where every left step follows a right step.
    pub fn is_r_path(&self) -> bool {
        self.letters.first() == Some(&Letter::R)
            && !self.letters.windows(2).any(|w| w == [Letter::L, Letter::L])
    }

    pub fn check_r_path(&self) -> Result<()> {
        if self.is_r_path() {
            Ok(())
        } else {
            Err(Error::InvalidPath(format!(
                "`{self}` must start with R and contain no LL"
            )))
        }
    }
}

impl fmt::Display for SignWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for SignWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .trim()
            .chars()
            .map(|ch| match ch {
                'R' | 'r' => Ok(Letter::R),
                'L' | 'l' => Ok(Letter::L),
                other => Err(Error::Parse(format!("`{other}` is not R or L"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SignWord { letters })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeKind {
    T,
    Ttilde,
    Rtree,
}

/// Labels `g1 = g2 = 1` followed by the label after each step.
pub fn label_trace(word: &SignWord, tree: TreeKind) -> Result<Vec<BigInt>> {
    if tree == TreeKind::Rtree {
        word.check_r_path()?;
    }
    let mut out = Vec::with_capacity(word.len() + 2);
    out.push(BigInt::one());
    out.push(BigInt::one());
    for (i, &l) in word.letters.iter().enumerate() {
        let father = &out[i + 1];
        let grand = &out[i];
        let next = match l {
            Letter::R => father + grand,
            Letter::L => {
                let d = father - grand;
                if tree == TreeKind::Ttilde {
                    d.abs()
                } else {
                    d
                }
            }
        };
        out.push(next);
    }
    Ok(out)
}

/// Last label of [`label_trace`].
pub fn final_label(word: &SignWord, tree: TreeKind) -> Result<BigInt> {
    Ok(label_trace(word, tree)?
        .pop()
        .expect("trace is never empty"))
}

/// 2x2 integer matrix acting on row vectors from the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mat2(pub [[i64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1, 0], [0, 1]]);
    /// Right step `(x, y) -> (y, x + y)`.
    pub const A: Mat2 = Mat2([[0, 1], [1, 1]]);
    /// Left step `(x, y) -> (y, y - x)`.
    pub const B: Mat2 = Mat2([[0, -1], [1, 1]]);
    pub const C: Mat2 = Mat2([[0, 1], [1, -1]]);

    pub fn of(letter: Letter) -> Mat2 {
        match letter {
            Letter::R => Mat2::A,
            Letter::L => Mat2::B,
        }
    }

    pub fn product(word: &SignWord) -> Mat2 {
        word.letters
            .iter()
            .fold(Mat2::IDENTITY, |acc, &l| acc * Mat2::of(l))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = self.0;
        let b = o.0;
        let mut m = [[0i64; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(m)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        let a = self.0;
        Mat2([[-a[0][0], -a[0][1]], [-a[1][0], -a[1][1]]])
    }
}

/// `(1, 1)` right-multiplied by `A` for each `R` and `B` for each `L`.
///
/// The second component is the last label of the word in `T`, the first
/// component the one before it.
pub fn label_via_matrices(word: &SignWord) -> (BigInt, BigInt) {
    let mut x = BigInt::one();
    let mut y = BigInt::one();
    for &l in &word.letters {
        let next = match l {
            Letter::R => &x + &y,
            Letter::L => &y - &x,
        };
        x = std::mem::replace(&mut y, next);
    }
    (x, y)
}

/// Streaming form of the reduction, one letter at a time.
#[derive(Debug, Clone)]
pub struct Reducer {
    case: ModelCase,
    letters: Vec<Letter>,
    append_times: Vec<usize>,
    prev_deleted: bool,
    steps: usize,
    deletions: usize,
    flips: usize,
}

impl Reducer {
    pub fn new(case: ModelCase) -> Self {
        Reducer {
            case,
            letters: Vec::new(),
            append_times: Vec::new(),
            prev_deleted: false,
            steps: 0,
            deletions: 0,
            flips: 0,
        }
    }

    pub fn with_capacity(case: ModelCase, cap: usize) -> Self {
        let mut r = Reducer::new(case);
        r.letters.reserve(cap);
        r.append_times.reserve(cap);
        r
    }

    /// Feeds the next raw letter; returns whether an `RLL` suffix was removed.
    pub fn push(&mut self, x: Letter) -> bool {
        let letter = if self.case == ModelCase::Linear && self.prev_deleted {
            self.flips += 1;
            x.flipped()
        } else {
            x
        };
        let time = self.steps + INDEX_OFFSET;
        self.steps += 1;
        self.letters.push(letter);
        self.append_times.push(time);
        let n = self.letters.len();
        let deleted = n >= 3 && self.letters[n - 3..] == [Letter::R, Letter::L, Letter::L];
        if deleted {
            self.letters.truncate(n - 3);
            self.append_times.truncate(n - 3);
            self.deletions += 1;
        }
        self.prev_deleted = deleted;
        deleted
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn append_times(&self) -> &[usize] {
        &self.append_times
    }

    pub fn deletions(&self) -> usize {
        self.deletions
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn flips(&self) -> usize {
        self.flips
    }
}

/// Result of reducing a raw word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedWord {
    pub letters: SignWord,
    /// Reduced length after each raw letter.
    pub lengths: Vec<usize>,
    pub deletions: usize,
    pub flips: usize,
    /// Time index at which the letter now at each position was appended.
    pub n_of_k: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStats {
    /// `R`s left in the reduced word.
    pub s: usize,
    /// `R`s deleted, one per removed suffix.
    pub d: usize,
    pub k: usize,
    pub n: usize,
}

pub fn reduce(word: &SignWord, case: ModelCase) -> (ReducedWord, ReductionStats) {
    let mut red = Reducer::with_capacity(case, word.len());
    let mut lengths = Vec::with_capacity(word.len());
    for &x in &word.letters {
        red.push(x);
        lengths.push(red.letters.len());
    }
    let letters = SignWord::new(red.letters);
    let stats = ReductionStats {
        s: letters.count(Letter::R),
        d: red.deletions,
        k: letters.len(),
        n: word.len(),
    };
    let reduced = ReducedWord {
        letters,
        lengths,
        deletions: red.deletions,
        flips: red.flips,
        n_of_k: red.append_times,
    };
    (reduced, stats)
}

/// Every intermediate reduced word, one per raw letter.
pub fn reduce_trace(word: &SignWord, case: ModelCase) -> Vec<SignWord> {
    let mut red = Reducer::new(case);
    word.letters
        .iter()
        .map(|&x| {
            red.push(x);
            SignWord::new(red.letters.clone())
        })
        .collect()
}

/// The raw sequence value: `F(n)` read in `T` (linear) or `T~` (non-linear).
pub fn sequence_value(word: &SignWord, case: ModelCase) -> BigInt {
    let tree = match case {
        ModelCase::Linear => TreeKind::T,
        ModelCase::NonLinear => TreeKind::Ttilde,
    };
    final_label(word, tree).expect("T and T~ accept every word")
}

/// Whether the reduced word reads the same value as the raw word: `|F(n)|`
/// in `T` for the linear case, `F~(n)` in `T~` for the non-linear one.
pub fn reduction_is_sound(word: &SignWord, case: ModelCase) -> bool {
    let (reduced, _) = reduce(word, case);
    let direct = sequence_value(word, case);
    let via = sequence_value(&reduced.letters, case);
    match case {
        ModelCase::Linear => via.abs() == direct.abs(),
        ModelCase::NonLinear => via == direct,
    }
}

/// Removes a leading `L` together with the two letters after it.
///
/// The labels after those three letters are back to `(±1, ±1)`, so later
/// label ratios are unaffected.
pub fn strip_leading_l(reduced: &ReducedWord) -> Result<ReducedWord> {
    match reduced.letters.letters.first() {
        Some(Letter::L) => {}
        _ => return Ok(reduced.clone()),
    }
    if reduced.letters.len() < 3 {
        return Err(Error::TooShort(format!(
            "`{}` has fewer than three letters",
            reduced.letters
        )));
    }
    let mut out = reduced.clone();
    out.letters.letters.drain(..3);
    out.n_of_k.drain(..3);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NDCoefficients {
    pub n: BigUint,
    pub d: BigUint,
}

/// Coefficients with `label(y) = d(y)·a + n(y)·b` after a preceding edge
/// labelled `(a, b)`.
pub fn nd_coefficients(y: &SignWord) -> Result<NDCoefficients> {
    if y.is_empty() {
        return Ok(NDCoefficients {
            n: BigUint::one(),
            d: BigUint::zero(),
        });
    }
    y.check_r_path()?;
    let (mut n_prev, mut n_cur) = (BigUint::one(), BigUint::one());
    let (mut d_prev, mut d_cur) = (BigUint::zero(), BigUint::one());
    for &l in &y.letters[1..] {
        let (n_next, d_next) = match l {
            Letter::R => (&n_cur + &n_prev, &d_cur + &d_prev),
            Letter::L => (&n_cur - &n_prev, &d_cur - &d_prev),
        };
        n_prev = std::mem::replace(&mut n_cur, n_next);
        d_prev = std::mem::replace(&mut d_cur, d_next);
    }
    Ok(NDCoefficients { n: n_cur, d: d_cur })
}
