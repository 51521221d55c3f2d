//! The Stern-Brocot measure `nu_alpha` on `[0, ∞]`: adaptive leaf
//! partitions, certified integrals of `log x`, exact rational identities, the
//! question-mark function and the Furstenberg measure on the full line.
//!
//! `nu_alpha` gives `[0, 1]` mass `1 - alpha` and `[1, ∞]` mass `alpha`; below
//! that, a rank-`r` interval hands the fraction `alpha` of its mass to its left
//! child when `r` is odd and to its right child when `r` is even.

mod chi;
mod furstenberg;

pub use chi::{ChiTable, CURVATURE, GRID_HALF_WIDTH};
pub use furstenberg::{
    furstenberg_residual, furstenberg_residual_exact, nu_f_build, nu_f_mass_exact, SignedInterval,
    SignedLineMeasure,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io;

use crate::cfrac::{sb_path, ExtendedRational, Side, SternBrocotInterval};
use crate::error::{Error, Result};

/// Deepest rank whose endpoints are guaranteed to fit the `u64` interval type
/// and to be exact in `f64`.
pub const MAX_RANK: u32 = 72;

/// When leaves are split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementPolicy {
    /// Leaves heavier than this are split.
    pub mass_threshold: f64,
    /// Leaves at this rank are never split.
    pub max_rank: u32,
    /// Leaves touching 0 or ∞ are split while their tail bound exceeds this.
    pub tail_tolerance: f64,
    /// Grid step of the [`ChiTable`] used by [`integrate_log`].
    pub grid_step: f64,
}

impl Default for RefinementPolicy {
    fn default() -> Self {
        RefinementPolicy {
            mass_threshold: 1e-6,
            max_rank: 64,
            tail_tolerance: 1e-10,
            grid_step: 1.0 / 128.0,
        }
    }
}

impl RefinementPolicy {
    pub fn with_mass_threshold(mut self, eps: f64) -> Self {
        self.mass_threshold = eps;
        self
    }

    pub fn with_max_rank(mut self, rank: u32) -> Self {
        self.max_rank = rank;
        self
    }

    pub fn with_grid_step(mut self, h: f64) -> Self {
        self.grid_step = h;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_rank > MAX_RANK {
            return Err(Error::Policy(format!(
                "max rank {} exceeds {MAX_RANK}",
                self.max_rank
            )));
        }
        if !(self.mass_threshold >= 0.0) || !self.mass_threshold.is_finite() {
            return Err(Error::Policy(format!(
                "mass threshold {} must be finite and nonnegative",
                self.mass_threshold
            )));
        }
        if self.mass_threshold == 0.0 && self.max_rank > 24 {
            return Err(Error::Policy(
                "a zero mass threshold needs a max rank of at most 24".into(),
            ));
        }
        if !(self.tail_tolerance > 0.0) {
            return Err(Error::Policy("tail tolerance must be positive".into()));
        }
        if !(self.grid_step > 0.0 && self.grid_step <= 1.0) {
            return Err(Error::Policy(format!(
                "grid step {} is not in (0, 1]",
                self.grid_step
            )));
        }
        Ok(())
    }
}

/// How a parent's mass is shared between its children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitRule {
    /// The rule of `nu_alpha` on the positive half-line.
    Standard,
    /// The negative half-line rule (alpha and 1 - alpha exchanged, left meaning
    /// more negative), expressed on mirror images `x -> -x`.
    Exchanged,
}

impl SplitRule {
    /// Fraction of a rank-`rank` interval's mass that its left child receives.
    pub fn left_share(self, alpha: f64, rank: u32) -> f64 {
        if self.left_gets_alpha(rank) {
            alpha
        } else {
            1.0 - alpha
        }
    }

    pub fn left_gets_alpha(self, rank: u32) -> bool {
        let odd = rank % 2 == 1;
        match self {
            SplitRule::Standard => odd,
            // On the negative side the more negative child gets 1 - alpha at
            // odd ranks and alpha at even ranks; that child is the right one
            // of the mirror image.
            SplitRule::Exchanged => {
                let more_negative_gets_alpha = !odd;
                !more_negative_gets_alpha
            }
        }
    }
}

/// Shape of the conditional law of a leaf `[a/b, c/d]`: with `Z ~ nu_alpha`,
/// the point is `(a + cZ)/(b + dZ)` for `Even` and `(aZ + c)/(bZ + d)` for
/// `Odd`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LeafKind {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureLeaf {
    pub interval: SternBrocotInterval,
    /// Number of factors `alpha` in the mass.
    pub exp_r: u32,
    /// Number of factors `1 - alpha` in the mass.
    pub exp_rl: u32,
    pub mass: f64,
    pub kind: LeafKind,
}

impl MeasureLeaf {
    /// Endpoints `a/b` and `c/d` as floats.
    pub fn abcd(&self) -> (f64, f64, f64, f64) {
        let iv = &self.interval;
        (
            iv.lo.num as f64,
            iv.lo.den as f64,
            iv.hi.num as f64,
            iv.hi.den as f64,
        )
    }

    pub fn is_extreme(&self) -> bool {
        self.interval.touches_zero() || self.interval.touches_infinity()
    }

    /// Upper bound on `∫ |log x - log y| dnu` over the leaf for any node `y` of
    /// an extreme leaf, from the geometric decay along the boundary chain.
    pub fn tail_bound(&self, alpha: f64) -> f64 {
        self.mass * extreme_tail_series(alpha, self.interval.rank)
    }
}

/// `Σ_{j>=0} M^j log(r + j + 2)` with `M = max(alpha, 1 - alpha)`.
fn extreme_tail_series(alpha: f64, rank: u32) -> f64 {
    let m = alpha.max(1.0 - alpha);
    let mut sum = 0.0;
    let mut pow = 1.0;
    for j in 0..200_000u32 {
        let term = pow * ((rank + j) as f64 + 2.0).ln();
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        pow *= m;
    }
    sum
}

fn root_leaf(rule: SplitRule) -> MeasureLeaf {
    MeasureLeaf {
        interval: SternBrocotInterval::root(),
        exp_r: 0,
        exp_rl: 0,
        mass: 1.0,
        kind: kind_at(rule, 0),
    }
}

fn kind_at(rule: SplitRule, rank: u32) -> LeafKind {
    if rule.left_gets_alpha(rank) {
        LeafKind::Odd
    } else {
        LeafKind::Even
    }
}

fn children(alpha: f64, rule: SplitRule, leaf: &MeasureLeaf) -> (MeasureLeaf, MeasureLeaf) {
    let r = leaf.interval.rank;
    let left_alpha = rule.left_gets_alpha(r);
    let make = |side: Side, gets_alpha: bool| MeasureLeaf {
        interval: leaf.interval.child(side),
        exp_r: leaf.exp_r + gets_alpha as u32,
        exp_rl: leaf.exp_rl + (!gets_alpha) as u32,
        mass: leaf.mass * if gets_alpha { alpha } else { 1.0 - alpha },
        kind: kind_at(rule, r + 1),
    };
    (make(Side::Left, left_alpha), make(Side::Right, !left_alpha))
}

/// Depth-first, left-to-right walk over the leaves of the partition defined
/// by `split`, never going below `max_rank`.
pub fn visit_leaves_by(
    alpha: f64,
    rule: SplitRule,
    max_rank: u32,
    mut split: impl FnMut(&MeasureLeaf) -> bool,
    mut visit: impl FnMut(&MeasureLeaf),
) {
    let mut stack = vec![root_leaf(rule)];
    while let Some(leaf) = stack.pop() {
        if leaf.interval.rank < max_rank && split(&leaf) {
            let (l, r) = children(alpha, rule, &leaf);
            stack.push(r);
            stack.push(l);
        } else {
            visit(&leaf);
        }
    }
}

pub(crate) fn visit_leaves(
    alpha: f64,
    rule: SplitRule,
    policy: &RefinementPolicy,
    split: impl FnMut(&MeasureLeaf) -> bool,
    visit: impl FnMut(&MeasureLeaf),
) {
    visit_leaves_by(alpha, rule, policy.max_rank, split, visit)
}

/// The split test of a policy.
pub fn policy_splits(alpha: f64, policy: &RefinementPolicy, leaf: &MeasureLeaf) -> bool {
    leaf.mass > policy.mass_threshold
        || (leaf.is_extreme() && leaf.tail_bound(alpha) > policy.tail_tolerance)
}

/// A finite partition of `[0, ∞]` into Stern-Brocot leaves with their masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafMeasure {
    pub alpha: f64,
    pub rule: SplitRule,
    pub policy: RefinementPolicy,
    /// Ordered left to right.
    pub leaves: Vec<MeasureLeaf>,
}

fn check_alpha_open(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "alpha = {alpha} is not in (0, 1); alpha = 1 is a point mass"
        )))
    }
}

/// Refines `nu_alpha` under `policy`. Any `alpha` in `(0, 1)` is accepted;
/// values below 1/2 give the mirror-image measures.
pub fn refine_nu_alpha(alpha: f64, policy: RefinementPolicy) -> Result<LeafMeasure> {
    refine_with_rule(alpha, SplitRule::Standard, policy)
}

pub fn refine_with_rule(
    alpha: f64,
    rule: SplitRule,
    policy: RefinementPolicy,
) -> Result<LeafMeasure> {
    check_alpha_open(alpha)?;
    policy.validate()?;
    let mut leaves = Vec::new();
    visit_leaves(
        alpha,
        rule,
        &policy,
        |l| policy_splits(alpha, &policy, l),
        |l| leaves.push(*l),
    );
    Ok(LeafMeasure {
        alpha,
        rule,
        policy,
        leaves,
    })
}

impl LeafMeasure {
    pub fn total_mass(&self) -> f64 {
        self.leaves.iter().map(|l| l.mass).sum()
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    /// CSV with header `lo_num,lo_den,hi_num,hi_den,rank,expR,expRL,mass`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "lo_num", "lo_den", "hi_num", "hi_den", "rank", "expR", "expRL", "mass",
        ])?;
        for l in &self.leaves {
            let iv = &l.interval;
            w.write_record([
                iv.lo.num.to_string(),
                iv.lo.den.to_string(),
                iv.hi.num.to_string(),
                iv.hi.den.to_string(),
                iv.rank.to_string(),
                l.exp_r.to_string(),
                l.exp_rl.to_string(),
                format!("{:e}", l.mass),
            ])?;
        }
        w.flush()
    }
}

/// Bracket of `E[log x | leaf]`, given a bracket of `E[log Z]`.
pub fn leaf_log_bracket(leaf: &MeasureLeaf, table: &ChiTable, mean_log: (f64, f64)) -> (f64, f64) {
    let (a, b, c, d) = leaf.abcd();
    let (j_lo, j_hi) = mean_log;
    match leaf.kind {
        LeafKind::Even => {
            if a == 0.0 && d == 0.0 {
                (j_lo, j_hi)
            } else if a == 0.0 {
                let (pl, ph) = table.psi(d);
                (j_lo - ph, j_hi - pl)
            } else if d == 0.0 {
                let (pl, ph) = table.psi(1.0 / a);
                let base = a.ln();
                (base + pl, base + ph)
            } else {
                let (il, ih) = table.integral(d.ln() - b.ln(), c.ln() - a.ln());
                let base = a.ln() - b.ln();
                (base + il, base + ih)
            }
        }
        LeafKind::Odd => {
            if a == 0.0 && d == 0.0 {
                (-j_hi, -j_lo)
            } else if a == 0.0 {
                let (pl, ph) = table.psi(1.0 / d);
                let base = -d.ln();
                (base - ph, base - pl)
            } else if d == 0.0 {
                let (pl, ph) = table.psi(a);
                (pl - j_hi, ph - j_lo)
            } else {
                let (il, ih) = table.integral(a.ln() - c.ln(), b.ln() - d.ln());
                let base = c.ln() - d.ln();
                (base - ih, base - il)
            }
        }
    }
}

/// A certified integral: the true value lies in `value ± error_bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certified {
    pub value: f64,
    pub error_bound: f64,
}

impl Certified {
    fn from_bracket(lo: f64, hi: f64) -> Self {
        let value = 0.5 * (lo + hi);
        let error_bound = 0.5 * (hi - lo) + f64::EPSILON * value.abs();
        Certified { value, error_bound }
    }

    pub fn lo(&self) -> f64 {
        self.value - self.error_bound
    }

    pub fn hi(&self) -> f64 {
        self.value + self.error_bound
    }
}

/// `∫ log x dnu` split at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogIntegral {
    pub total: Certified,
    pub below1: Certified,
    pub above1: Certified,
    pub leaves: usize,
}

/// Neumaier-compensated sums of the bracket ends.
#[derive(Default)]
struct Acc {
    lo: f64,
    lo_c: f64,
    hi: f64,
    hi_c: f64,
    abs: f64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl Acc {
    fn add(&mut self, m: f64, (lo, hi): (f64, f64)) {
        neumaier(&mut self.lo, &mut self.lo_c, m * lo);
        neumaier(&mut self.hi, &mut self.hi_c, m * hi);
        self.abs += m * (lo.abs() + hi.abs());
    }

    fn merged(&self, other: &Acc) -> Acc {
        Acc {
            lo: self.lo + other.lo,
            lo_c: self.lo_c + other.lo_c,
            hi: self.hi + other.hi,
            hi_c: self.hi_c + other.hi_c,
            abs: self.abs + other.abs,
        }
    }
}

fn finish(acc: &Acc) -> Certified {
    // per-leaf evaluation error of a few ulps plus the compensated-sum error
    let pad = 1e-15 * acc.abs;
    Certified::from_bracket(acc.lo + acc.lo_c - pad, acc.hi + acc.hi_c + pad)
}

fn integrate_leaves<'a>(
    leaves: impl Iterator<Item = &'a MeasureLeaf>,
    table: &ChiTable,
) -> LogIntegral {
    let j = table.mean_log();
    let (mut below, mut above) = (Acc::default(), Acc::default());
    let mut n = 0;
    for leaf in leaves {
        let br = leaf_log_bracket(leaf, table, j);
        if leaf.interval.hi <= ExtendedRational::ONE {
            below.add(leaf.mass, br);
        } else {
            above.add(leaf.mass, br);
        }
        n += 1;
    }
    LogIntegral {
        total: finish(&below.merged(&above)),
        below1: finish(&below),
        above1: finish(&above),
        leaves: n,
    }
}

/// Certified `∫ log x dnu` over a materialised leaf set.
pub fn integrate_log_with(measure: &LeafMeasure, table: &ChiTable) -> Result<LogIntegral> {
    if (table.alpha - measure.alpha).abs() > 0.0 {
        return Err(Error::Domain(format!(
            "table built for alpha = {} used with alpha = {}",
            table.alpha, measure.alpha
        )));
    }
    Ok(integrate_leaves(measure.leaves.iter(), table))
}

/// Same as [`integrate_log_with`] without materialising the leaves.
pub fn integrate_log_streaming(
    alpha: f64,
    rule: SplitRule,
    policy: &RefinementPolicy,
    table: &ChiTable,
) -> Result<LogIntegral> {
    check_alpha_open(alpha)?;
    policy.validate()?;
    let j = table.mean_log();
    let (mut below, mut above) = (Acc::default(), Acc::default());
    let mut n = 0;
    visit_leaves(
        alpha,
        rule,
        policy,
        |l| policy_splits(alpha, policy, l),
        |leaf| {
            let br = leaf_log_bracket(leaf, table, j);
            if leaf.interval.hi <= ExtendedRational::ONE {
                below.add(leaf.mass, br);
            } else {
                above.add(leaf.mass, br);
            }
            n += 1;
        },
    );
    Ok(LogIntegral {
        total: finish(&below.merged(&above)),
        below1: finish(&below),
        above1: finish(&above),
        leaves: n,
    })
}

/// `(value, error_bound)` of `∫₀^∞ log x dnu_alpha`.
pub fn integrate_log(measure: &LeafMeasure) -> Result<(f64, f64)> {
    let table = ChiTable::build(measure.alpha, measure.policy.grid_step)?;
    let r = integrate_log_with(measure, &table)?;
    Ok((r.total.value, r.total.error_bound))
}

/// `(∫₀¹ log x dnu, ∫₁^∞ log x dnu)`.
pub fn integrate_split(measure: &LeafMeasure) -> Result<(f64, f64)> {
    let table = ChiTable::build(measure.alpha, measure.policy.grid_step)?;
    let r = integrate_log_with(measure, &table)?;
    Ok((r.below1.value, r.above1.value))
}

/// First-order rule: `log` of the mediant on every leaf.
///
/// The bound charges `mass · (log hi - log lo)` to interior leaves and the
/// geometric tail series to the two extreme leaves. It converges only like
/// the mass threshold, so it serves as an independent cross-check of
/// [`integrate_log`].
pub fn integrate_log_mediant(measure: &LeafMeasure) -> Certified {
    let mut value = 0.0;
    let mut bound = 0.0;
    for leaf in &measure.leaves {
        let m = leaf.interval.mediant();
        value += leaf.mass * ((m.num as f64).ln() - (m.den as f64).ln());
        bound += if leaf.is_extreme() {
            leaf.tail_bound(measure.alpha)
        } else {
            let (a, b, c, d) = leaf.abcd();
            leaf.mass * ((c / d).ln() - (a / b).ln())
        };
    }
    Certified {
        value,
        error_bound: bound,
    }
}

/// `∬ log((x + y + xy)/(x + y + 1)) dnu(x) dnu(y)` by the mediant rule on
/// all leaf pairs.
pub fn product_log_ratio(measure: &LeafMeasure) -> f64 {
    let u: Vec<f64> = measure
        .leaves
        .iter()
        .map(|l| {
            let m = l.interval.mediant();
            m.den as f64 / (m.num as f64 + m.den as f64)
        })
        .collect();
    let w: Vec<f64> = measure.leaves.iter().map(|l| l.mass).collect();
    // with u = 1/(1+x), v = 1/(1+y): (x + y + xy)/(x + y + 1) = (1 - uv)/(u + v - uv)
    let f = |a: f64, b: f64| (-a * b).ln_1p() - (a + b - a * b).ln();
    let rows: Vec<f64> = (0..u.len())
        .into_par_iter()
        .map(|i| {
            let mut s = 0.5 * w[i] * f(u[i], u[i]);
            for j in 0..i {
                s += w[j] * f(u[i], u[j]);
            }
            2.0 * w[i] * s
        })
        .collect();
    rows.iter().sum()
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact `nu_alpha([lo, hi])` for a Stern-Brocot interval.
pub fn mass_of_interval(alpha: &BigRational, iv: &SternBrocotInterval) -> Result<BigRational> {
    mass_exact_with_rule(alpha, SplitRule::Standard, iv.lo, iv.hi)
}

pub(crate) fn mass_exact_with_rule(
    alpha: &BigRational,
    rule: SplitRule,
    lo: ExtendedRational,
    hi: ExtendedRational,
) -> Result<BigRational> {
    let path = sb_path(lo, hi)?;
    let one = rat(1);
    let beta = &one - alpha;
    let mut mass = one;
    for (rank, side) in path.iter().enumerate() {
        let left_alpha = rule.left_gets_alpha(rank as u32);
        let gets_alpha = (*side == Side::Left) == left_alpha;
        mass *= if gets_alpha { alpha } else { &beta };
    }
    Ok(mass)
}

/// Floating-point counterpart of [`mass_of_interval`].
pub fn mass_of_interval_f64(
    alpha: f64,
    rule: SplitRule,
    lo: ExtendedRational,
    hi: ExtendedRational,
) -> Result<f64> {
    let path = sb_path(lo, hi)?;
    Ok(path
        .iter()
        .enumerate()
        .map(|(rank, side)| {
            let gets_alpha = (*side == Side::Left) == rule.left_gets_alpha(rank as u32);
            if gets_alpha {
                alpha
            } else {
                1.0 - alpha
            }
        })
        .product())
}

/// Every Stern-Brocot interval of rank `0..=max_rank`, breadth first.
pub fn intervals_up_to(max_rank: u32) -> Vec<SternBrocotInterval> {
    let mut out = vec![SternBrocotInterval::root()];
    let mut level = vec![SternBrocotInterval::root()];
    for _ in 0..max_rank {
        level = level
            .iter()
            .flat_map(|iv| [iv.child(Side::Left), iv.child(Side::Right)])
            .collect();
        out.extend_from_slice(&level);
    }
    out
}

/// Largest defect of the two change-of-variable identities over all
/// intervals of rank at most `max_rank`:
/// `nu([(a-b)/a, (c-d)/c]) = ((1-alpha)/alpha) nu([a/b, c/d])` for `a >= b`,
/// and `nu([d/(c+d), b/(a+b)]) = (1-alpha) nu([a/b, c/d])`.
pub fn change_of_variable_residual(alpha: &BigRational, max_rank: u32) -> Result<BigRational> {
    let zero = BigRational::zero();
    if !(alpha > &zero && alpha < &rat(1)) {
        return Err(Error::Domain(format!("alpha = {alpha} is not in (0, 1)")));
    }
    let beta = rat(1) - alpha;
    let ratio = &beta / alpha;
    let mut worst = zero;
    for iv in intervals_up_to(max_rank) {
        let (a, b, c, d) = (iv.lo.num, iv.lo.den, iv.hi.num, iv.hi.den);
        let nu = mass_of_interval(alpha, &iv)?;
        if iv.rank >= 1 && a >= b {
            let lo = ExtendedRational::new(a - b, a)?;
            let hi = ExtendedRational::new(c - d, c)?;
            let lhs = mass_exact_with_rule(alpha, SplitRule::Standard, lo, hi)?;
            worst = worst.max((lhs - &ratio * &nu).abs());
        }
        let lo = ExtendedRational::new(d, c + d)?;
        let hi = ExtendedRational::new(b, a + b)?;
        let lhs = mass_exact_with_rule(alpha, SplitRule::Standard, lo, hi)?;
        worst = worst.max((lhs - &beta * &nu).abs());
    }
    Ok(worst)
}

/// Minkowski's function as `2 nu_{1/2}([0, x])`, exactly.
pub fn question_mark(x: &ExtendedRational) -> Result<BigRational> {
    if *x > ExtendedRational::ONE {
        return Err(Error::Domain(format!("{x} is not in [0, 1]")));
    }
    if x.is_zero() {
        return Ok(BigRational::zero());
    }
    if *x == ExtendedRational::ONE {
        return Ok(rat(1));
    }
    // descend inside [0, 1], collecting every left child lying below x
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut cur = SternBrocotInterval::root().child(Side::Left);
    let mut child_mass = &half * &half;
    let mut acc = BigRational::zero();
    loop {
        match x.cmp(&cur.mediant()) {
            std::cmp::Ordering::Equal => {
                acc += &child_mass;
                return Ok(acc * rat(2));
            }
            std::cmp::Ordering::Greater => {
                acc += &child_mass;
                cur = cur.child(Side::Right);
            }
            std::cmp::Ordering::Less => cur = cur.child(Side::Left),
        }
        child_mass = &child_mass * &half;
    }
}
