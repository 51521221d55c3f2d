//! Pieces, blocks and continued fractions of R-paths, and exact
//! Stern-Brocot interval algebra on `[0, ∞]`.
//!
//! Numerators and denominators are `u64`; descending more than ~90 levels
//! along the Fibonacci path overflows and panics.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::words::{Letter, SignWord};

/// Nonnegative rational in lowest terms, `1/0` standing for `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtendedRational {
    pub num: u64,
    pub den: u64,
}

impl ExtendedRational {
    pub const ZERO: ExtendedRational = ExtendedRational { num: 0, den: 1 };
    pub const ONE: ExtendedRational = ExtendedRational { num: 1, den: 1 };
    pub const INFINITY: ExtendedRational = ExtendedRational { num: 1, den: 0 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 && den == 0 {
            return Err(Error::Domain("0/0 is not an extended rational".into()));
        }
        let g = num.gcd(&den);
        Ok(ExtendedRational {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(n: u64) -> Self {
        ExtendedRational { num: n, den: 1 }
    }

    pub fn is_infinite(&self) -> bool {
        self.den == 0
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        if self.den == 0 {
            f64::INFINITY
        } else {
            self.num as f64 / self.den as f64
        }
    }

    /// `(a + c) / (b + d)`, already in lowest terms for Stern-Brocot neighbours.
    pub fn mediant(&self, other: &ExtendedRational) -> ExtendedRational {
        ExtendedRational {
            num: self.num.checked_add(other.num).expect("numerator overflow"),
            den: self
                .den
                .checked_add(other.den)
                .expect("denominator overflow"),
        }
    }

    pub fn recip(&self) -> ExtendedRational {
        ExtendedRational {
            num: self.den,
            den: self.num,
        }
    }
}

impl PartialOrd for ExtendedRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.num as u128 * other.den as u128;
        let r = other.num as u128 * self.den as u128;
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            _ => l.cmp(&r),
        }
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for ExtendedRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("`{s}` is not a nonnegative fraction"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n = n.trim().parse::<u64>().map_err(|_| bad())?;
                let d = d.trim().parse::<u64>().map_err(|_| bad())?;
                ExtendedRational::new(n, d)
            }
            None => Ok(ExtendedRational::integer(s.parse().map_err(|_| bad())?)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Piece {
    R,
    RL,
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Piece::R => f.write_str("R"),
            Piece::RL => f.write_str("RL"),
        }
    }
}

/// Continued fraction `[a1, ..., al]` (leading) or `[0; a1, ..., al]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    pub leading: bool,
    pub quotients: Vec<u64>,
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = self
            .quotients
            .iter()
            .map(|q| q.to_string())
            .collect::<Vec<_>>()
            .join(",");
        if self.leading {
            write!(f, "[{body}]")
        } else {
            write!(f, "[0;{body}]")
        }
    }
}

pub fn pieces(y: &SignWord) -> Result<Vec<Piece>> {
    y.check_r_path()?;
    let l = &y.letters;
    let mut out = Vec::new();
    let mut i = 0;
    while i < l.len() {
        if l.get(i + 1) == Some(&Letter::L) {
            out.push(Piece::RL);
            i += 2;
        } else {
            out.push(Piece::R);
            i += 1;
        }
    }
    Ok(out)
}

/// Block sizes, last block first, with a cut between equal neighbours.
pub fn blocks(y: &SignWord) -> Result<ContinuedFraction> {
    let ps = pieces(y)?;
    Ok(blocks_of_pieces(&ps))
}

fn blocks_of_pieces(ps: &[Piece]) -> ContinuedFraction {
    let mut sizes = Vec::new();
    let mut run = 1u64;
    for w in ps.windows(2) {
        if w[0] == w[1] {
            sizes.push(run);
            run = 1;
        } else {
            run += 1;
        }
    }
    sizes.push(run);
    sizes.reverse();
    ContinuedFraction {
        leading: ps.last() == Some(&Piece::R),
        quotients: sizes,
    }
}

fn eval_quotients(leading: bool, qs: &[u64]) -> ExtendedRational {
    // value of [qs] as num/den, evaluated from the innermost quotient
    let (mut num, mut den) = (1u64, 0u64);
    for &a in qs.iter().rev() {
        let n = a
            .checked_mul(num)
            .and_then(|x| x.checked_add(den))
            .expect("continued fraction overflow");
        den = num;
        num = n;
    }
    let v = ExtendedRational { num, den };
    if leading {
        v
    } else {
        v.recip()
    }
}

pub fn cf_eval(cf: &ContinuedFraction) -> ExtendedRational {
    eval_quotients(cf.leading, &cf.quotients)
}

/// `g(k) / g(k-1)` for the R-tree path `R y`.
///
/// `y` is empty or itself an R-path, so that its R-tree labels exist.
pub fn q_of_path(y: &SignWord) -> Result<ExtendedRational> {
    if !y.is_empty() {
        y.check_r_path()?;
    }
    let ry = SignWord::new(vec![Letter::R]).concat(y);
    Ok(cf_eval(&blocks(&ry)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// `[a/b, c/d]` with `ad - bc = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SternBrocotInterval {
    pub lo: ExtendedRational,
    pub hi: ExtendedRational,
    pub rank: u32,
}

impl SternBrocotInterval {
    pub fn root() -> Self {
        SternBrocotInterval {
            lo: ExtendedRational::ZERO,
            hi: ExtendedRational::INFINITY,
            rank: 0,
        }
    }

    /// `a·d - b·c`; `-1` for every valid interval.
    pub fn determinant(&self) -> i128 {
        self.lo.num as i128 * self.hi.den as i128 - self.lo.den as i128 * self.hi.num as i128
    }

    pub fn mediant(&self) -> ExtendedRational {
        self.lo.mediant(&self.hi)
    }

    pub fn child(&self, side: Side) -> SternBrocotInterval {
        let m = self.mediant();
        match side {
            Side::Left => SternBrocotInterval {
                lo: self.lo,
                hi: m,
                rank: self.rank + 1,
            },
            Side::Right => SternBrocotInterval {
                lo: m,
                hi: self.hi,
                rank: self.rank + 1,
            },
        }
    }

    pub fn contains(&self, x: &ExtendedRational) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn touches_zero(&self) -> bool {
        self.lo.is_zero()
    }

    pub fn touches_infinity(&self) -> bool {
        self.hi.is_infinite()
    }

    /// Image under `x -> 1/x`, a Stern-Brocot interval of the same rank.
    pub fn reciprocal(&self) -> SternBrocotInterval {
        SternBrocotInterval {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
            rank: self.rank,
        }
    }
}

impl fmt::Display for SternBrocotInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

pub fn sb_children(iv: &SternBrocotInterval) -> (SternBrocotInterval, SternBrocotInterval) {
    (iv.child(Side::Left), iv.child(Side::Right))
}

/// Left/right moves from the root down to `[lo, hi]`.
pub fn sb_path(lo: ExtendedRational, hi: ExtendedRational) -> Result<Vec<Side>> {
    let unreachable = || Error::UnreachableInterval(format!("{lo}..{hi}"));
    if lo.num as i128 * hi.den as i128 - lo.den as i128 * hi.num as i128 != -1 {
        return Err(unreachable());
    }
    let mut cur = SternBrocotInterval::root();
    let mut path = Vec::new();
    while cur.lo != lo || cur.hi != hi {
        let m = cur.mediant();
        let side = if hi <= m {
            Side::Left
        } else if lo >= m {
            Side::Right
        } else {
            return Err(unreachable());
        };
        path.push(side);
        cur = cur.child(side);
    }
    Ok(path)
}

/// Closure of the set of `q` values of R-paths ending with `s`.
pub fn interval_of_suffix(s: &SignWord) -> Result<SternBrocotInterval> {
    if s.is_empty() {
        return Ok(SternBrocotInterval::root());
    }
    if !s.is_r_path() {
        return Err(Error::InvalidSuffix(format!(
            "`{s}` must start with R and contain no LL"
        )));
    }
    let ps = pieces(s)?;
    let cf = blocks_of_pieces(&ps);
    let l = cf.quotients.len();
    let a = eval_quotients(cf.leading, &cf.quotients[..l - 1]);
    let b = eval_quotients(cf.leading, &cf.quotients);
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    Ok(SternBrocotInterval {
        lo,
        hi,
        rank: ps.len() as u32,
    })
}

/// Descent chain towards a point.
#[derive(Debug, Clone, PartialEq)]
pub struct SbLocation {
    /// Nested intervals of ranks `0..=k`, each containing the point.
    pub chain: Vec<SternBrocotInterval>,
    /// Rank at which the point first appears as an endpoint (it is the
    /// mediant of the last interval of the chain).
    pub terminal_rank: Option<u32>,
}

pub fn sb_locate(x: &ExtendedRational, depth: u32) -> SbLocation {
    let mut cur = SternBrocotInterval::root();
    let mut chain = vec![cur];
    while cur.rank < depth {
        let m = cur.mediant();
        match x.cmp(&m) {
            Ordering::Equal => {
                return SbLocation {
                    chain,
                    terminal_rank: Some(cur.rank + 1),
                }
            }
            Ordering::Less => cur = cur.child(Side::Left),
            Ordering::Greater => cur = cur.child(Side::Right),
        }
        chain.push(cur);
    }
    let terminal_rank = (x.cmp(&cur.mediant()) == Ordering::Equal).then_some(cur.rank + 1);
    SbLocation {
        chain,
        terminal_rank,
    }
}

/// Floating-point variant of [`sb_locate`] for irrational targets.
pub fn sb_locate_real(x: f64, depth: u32) -> SbLocation {
    let mut cur = SternBrocotInterval::root();
    let mut chain = vec![cur];
    while cur.rank < depth {
        let m = cur.mediant();
        let lhs = x * m.den as f64;
        let rhs = m.num as f64;
        if lhs == rhs {
            return SbLocation {
                chain,
                terminal_rank: Some(cur.rank + 1),
            };
        }
        cur = cur.child(if lhs < rhs { Side::Left } else { Side::Right });
        chain.push(cur);
    }
    SbLocation {
        chain,
        terminal_rank: None,
    }
}
