//! Exact maximization oracles over compacts built from a finite candidate cell list.
//!
//! * exhaustive: every subset, ties broken by the lexicographically smallest cell set;
//! * grouped: every subset, summing `|f|` over its 8-components;
//! * naive: every family of pairwise separated blocks (set partitions);
//! * branch and bound: exact for `f = Σ cᵢ·gᵢ` with every `gᵢ` monotone.

use std::collections::{HashMap, HashSet};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::grid::{label_finite, CellSet, GridRegion, Pos, N8};
use crate::measures::{monotone_decomposition, Fun};
use crate::par;
use crate::value::Rational;

/// Largest candidate list the naive partition oracle accepts.
pub const NAIVE_LIMIT: usize = 11;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Found {
    pub value: Rational,
    /// One compact for signed searches; the positive and negative groups (or the full block
    /// family, for the naive oracle) for total-variation searches.
    pub witness: Vec<GridRegion>,
    /// Search nodes or subsets visited.
    pub visited: u64,
}

pub(crate) fn compact(level: u32, cells: Vec<Pos>) -> GridRegion {
    let mut cells = cells;
    cells.sort_unstable();
    GridRegion::closed(CellSet::from_sorted(level, cells, false))
}

pub(crate) fn eval_compact(f: &Fun, k: &GridRegion) -> Result<Rational> {
    f.eval(k)?.as_finite().ok_or_else(|| {
        Error::Precondition(format!("{} is infinite on the compact {k}", f.meta().name))
    })
}

fn subset(cells: &[Pos], mask: u64) -> Vec<Pos> {
    cells
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &c)| c)
        .collect()
}

fn check_budget(n: usize, budget: usize) -> Result<()> {
    if n > budget || n >= 63 {
        Err(Error::SearchBudgetExceeded { cells: n, budget })
    } else {
        Ok(())
    }
}

/// Pick the best `(value, cells)` with ties going to the lexicographically smallest cells.
fn pick_best(cands: Vec<(Rational, Vec<Pos>, Vec<GridRegion>)>) -> Option<(Rational, Vec<GridRegion>)> {
    let mut best: Option<(Rational, Vec<Pos>, Vec<GridRegion>)> = None;
    for c in cands {
        let better = match &best {
            None => true,
            Some((v, s, _)) => c.0 > *v || (c.0 == *v && c.1 < *s),
        };
        if better {
            best = Some(c);
        }
    }
    best.map(|(v, _, w)| (v, w))
}

/// `max f(K(S))` over all subsets `S` of `cells`.
pub fn exhaustive_signed(f: &Fun, level: u32, cells: &[Pos], budget: usize) -> Result<Found> {
    check_budget(cells.len(), budget)?;
    let n = 1u64 << cells.len();
    let vals = par::map_range(n, |m| {
        let s = subset(cells, m);
        let k = compact(level, s.clone());
        eval_compact(f, &k).map(|v| (v, s, vec![k]))
    });
    let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
    let (value, witness) = pick_best(vals).expect("at least the empty set");
    Ok(Found { value, witness, visited: n })
}

/// Sign-grouped total variation: `max Σ |f(C)|` over subsets, `C` ranging over the
/// 8-components of the subset. Witness: the positive and the negative group.
pub fn grouped_total(f: &Fun, level: u32, cells: &[Pos], budget: usize) -> Result<Found> {
    check_budget(cells.len(), budget)?;
    let n = 1u64 << cells.len();
    let vals = par::map_range(n, |m| -> Result<_> {
        let s = subset(cells, m);
        let mut sum = Rational::zero();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for comp in label_finite(&s, &N8) {
            let v = eval_compact(f, &compact(level, comp.clone()))?;
            sum += v.abs();
            if v.is_positive() {
                pos.extend(comp);
            } else if v.is_negative() {
                neg.extend(comp);
            }
        }
        Ok((sum, s, vec![compact(level, pos), compact(level, neg)]))
    });
    let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
    let (value, witness) = pick_best(vals).expect("at least the empty set");
    Ok(Found { value, witness, visited: n })
}

fn adjacent8(a: Pos, b: Pos) -> bool {
    a != b && (a.0 - b.0).abs() <= 1 && (a.1 - b.1).abs() <= 1
}

struct Naive<'a> {
    f: &'a Fun,
    level: u32,
    cells: &'a [Pos],
    labels: Vec<usize>,
    memo: HashMap<u64, Rational>,
    best: Option<(Rational, Vec<usize>)>,
    visited: u64,
}

impl Naive<'_> {
    fn block_value(&mut self, mask: u64) -> Result<Rational> {
        if let Some(v) = self.memo.get(&mask) {
            return Ok(*v);
        }
        let v = eval_compact(self.f, &compact(self.level, subset(self.cells, mask)))?.abs();
        self.memo.insert(mask, v);
        Ok(v)
    }

    fn finish(&mut self) -> Result<()> {
        self.visited += 1;
        let blocks = self.labels.iter().copied().max().unwrap_or(0);
        let mut masks = vec![0u64; blocks + 1];
        for (i, &l) in self.labels.iter().enumerate() {
            masks[l] |= 1 << i;
        }
        let mut sum = Rational::zero();
        for &m in &masks[1..] {
            sum += self.block_value(m)?;
        }
        if self.best.as_ref().map_or(true, |(b, _)| sum > *b) {
            self.best = Some((sum, self.labels.clone()));
        }
        Ok(())
    }

    fn go(&mut self, i: usize, used: usize) -> Result<()> {
        if i == self.cells.len() {
            return self.finish();
        }
        for l in 0..=used + 1 {
            let clash = l > 0
                && (0..i).any(|j| {
                    let lj = self.labels[j];
                    lj > 0 && lj != l && adjacent8(self.cells[i], self.cells[j])
                });
            if clash {
                continue;
            }
            self.labels.push(l);
            self.go(i + 1, used.max(l))?;
            self.labels.pop();
        }
        Ok(())
    }
}

/// Total variation by explicit enumeration of all families of pairwise disjoint compacts
/// (set partitions of a subset of `cells` into mutually 8-separated blocks).
pub fn naive_total(f: &Fun, level: u32, cells: &[Pos]) -> Result<Found> {
    check_budget(cells.len(), NAIVE_LIMIT)?;
    let mut st = Naive {
        f,
        level,
        cells,
        labels: Vec::with_capacity(cells.len()),
        memo: HashMap::new(),
        best: None,
        visited: 0,
    };
    st.go(0, 0)?;
    let (value, labels) = st.best.expect("the empty family");
    let blocks = labels.iter().copied().max().unwrap_or(0);
    let witness = (1..=blocks)
        .map(|b| {
            let cs = cells
                .iter()
                .zip(&labels)
                .filter(|(_, &l)| l == b)
                .map(|(&c, _)| c)
                .collect();
            compact(level, cs)
        })
        .collect();
    Ok(Found { value, witness, visited: st.visited })
}

/// Candidate order for branching: cells carrying an atom first, then lexicographic.
fn branch_order(f: &Fun, parts: &[(Rational, Fun)], level: u32, cells: &[Pos]) -> Vec<Pos> {
    let present: HashSet<Pos> = cells.iter().copied().collect();
    let mut atoms: Vec<Pos> = f
        .atoms()
        .iter()
        .chain(parts.iter().flat_map(|(_, g)| g.atoms()).collect::<Vec<_>>().iter())
        .map(|p| p.cell_at(level))
        .filter(|c| present.contains(c))
        .collect();
    atoms.sort_unstable();
    atoms.dedup();
    let atom_set: HashSet<Pos> = atoms.iter().copied().collect();
    atoms.extend(cells.iter().filter(|c| !atom_set.contains(c)));
    atoms
}

struct Parts {
    coeffs: Vec<Rational>,
    fns: Vec<Fun>,
}

impl Parts {
    fn eval(&self, level: u32, cells: &[Pos]) -> Result<Vec<Rational>> {
        let k = compact(level, cells.to_vec());
        self.fns.iter().map(|g| eval_compact(g, &k)).collect()
    }

    fn combine(&self, vals: &[Rational]) -> Rational {
        self.coeffs.iter().zip(vals).map(|(c, v)| c * v).sum()
    }

    /// `Σ_{c>0} c·hi + Σ_{c<0} c·lo`.
    fn bound(&self, lo: &[Rational], hi: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if c.is_positive() { c * hi[i] } else { c * lo[i] })
            .sum()
    }
}

fn decompose(f: &Fun) -> Result<(Parts, Vec<(Rational, Fun)>)> {
    let parts = monotone_decomposition(f).ok_or_else(|| {
        Error::Precondition(format!("{} has no monotone decomposition", f.meta().name))
    })?;
    Ok((
        Parts {
            coeffs: parts.iter().map(|p| p.0).collect(),
            fns: parts.iter().map(|p| p.1.clone()).collect(),
        },
        parts,
    ))
}

struct SignedSearch<'a> {
    parts: &'a Parts,
    level: u32,
    order: &'a [Pos],
    best: Rational,
    best_set: Vec<Pos>,
    visited: u64,
}

impl SignedSearch<'_> {
    fn offer(&mut self, v: Rational, set: impl FnOnce() -> Vec<Pos>) {
        if v > self.best {
            self.best = v;
            self.best_set = set();
        }
    }

    fn go(&mut self, i: usize, inc: &mut Vec<Pos>, lo: Vec<Rational>, hi: Vec<Rational>) -> Result<()> {
        self.visited += 1;
        let (order, level) = (self.order, self.level);
        let fmin = self.parts.combine(&lo);
        self.offer(fmin, || inc.clone());
        let fmax = self.parts.combine(&hi);
        self.offer(fmax, || inc.iter().chain(&order[i..]).copied().collect());
        if i == order.len() || self.parts.bound(&lo, &hi) <= self.best {
            return Ok(());
        }
        inc.push(order[i]);
        let lo_in = self.parts.eval(level, inc)?;
        self.go(i + 1, inc, lo_in, hi)?;
        inc.pop();
        let rest: Vec<Pos> = inc.iter().chain(&order[i + 1..]).copied().collect();
        let hi_out = self.parts.eval(level, &rest)?;
        self.go(i + 1, inc, lo, hi_out)
    }
}

/// Exact `max f(K(S))` by branch and bound over a monotone decomposition of `f`.
pub fn branch_bound_signed(f: &Fun, level: u32, cells: &[Pos]) -> Result<Found> {
    let (parts, raw) = decompose(f)?;
    let order = branch_order(f, &raw, level, cells);
    let lo = parts.eval(level, &[])?;
    let hi = parts.eval(level, &order)?;
    let mut st = SignedSearch {
        parts: &parts,
        level,
        order: &order,
        best: parts.combine(&lo),
        best_set: Vec::new(),
        visited: 0,
    };
    st.go(0, &mut Vec::new(), lo, hi)?;
    Ok(Found { value: st.best, witness: vec![compact(level, st.best_set)], visited: st.visited })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Label {
    Plus,
    Minus,
    Out,
}

struct Pair<'a> {
    parts: &'a Parts,
    level: u32,
    order: &'a [Pos],
    best: Rational,
    best_sets: (Vec<Pos>, Vec<Pos>),
    visited: u64,
}

fn touches(c: Pos, set: &HashSet<Pos>) -> bool {
    N8.iter().any(|&(dx, dy)| set.contains(&(c.0 + dx, c.1 + dy)))
}

impl Pair<'_> {
    fn go(&mut self, i: usize, plus: &mut Vec<Pos>, minus: &mut Vec<Pos>) -> Result<()> {
        self.visited += 1;
        let (order, level, parts) = (self.order, self.level, self.parts);
        let plus_set: HashSet<Pos> = plus.iter().copied().collect();
        let minus_set: HashSet<Pos> = minus.iter().copied().collect();
        let rest = &order[i..];
        let plus_max: Vec<Pos> =
            plus.iter().chain(rest.iter().filter(|&&c| !touches(c, &minus_set))).copied().collect();
        let minus_max: Vec<Pos> =
            minus.iter().chain(rest.iter().filter(|&&c| !touches(c, &plus_set))).copied().collect();
        let p_lo = parts.eval(level, plus)?;
        let p_hi = parts.eval(level, &plus_max)?;
        let m_lo = parts.eval(level, minus)?;
        let m_hi = parts.eval(level, &minus_max)?;
        let (fp_lo, fp_hi) = (parts.combine(&p_lo), parts.combine(&p_hi));
        let (fm_lo, fm_hi) = (parts.combine(&m_lo), parts.combine(&m_hi));
        for (v, p, m) in [
            (fp_lo - fm_lo, &*plus, &*minus),
            (fp_hi - fm_lo, &plus_max, &*minus),
            (fp_lo - fm_hi, &*plus, &minus_max),
        ] {
            if v > self.best {
                self.best = v;
                self.best_sets = (p.to_vec(), m.to_vec());
            }
        }
        if i == order.len() {
            return Ok(());
        }
        // plus side is f, minus side is −f, each bounded via the monotone parts
        let bound = parts.bound(&p_lo, &p_hi) - parts.bound(&m_hi, &m_lo);
        if bound <= self.best {
            return Ok(());
        }
        let c = order[i];
        for label in [Label::Plus, Label::Minus, Label::Out] {
            match label {
                Label::Plus if !touches(c, &minus_set) => {
                    plus.push(c);
                    self.go(i + 1, plus, minus)?;
                    plus.pop();
                }
                Label::Minus if !touches(c, &plus_set) => {
                    minus.push(c);
                    self.go(i + 1, plus, minus)?;
                    minus.pop();
                }
                Label::Out => self.go(i + 1, plus, minus)?,
                _ => {}
            }
        }
        Ok(())
    }
}

/// Exact total variation `max f(K⁺) − f(K⁻)` over pairs of disjoint compacts, by branch and
/// bound over a monotone decomposition. Equals the sign-grouped maximum for functions
/// additive on disjoint compacts.
pub fn branch_bound_total(f: &Fun, level: u32, cells: &[Pos]) -> Result<Found> {
    let (parts, raw) = decompose(f)?;
    let order = branch_order(f, &raw, level, cells);
    let mut st = Pair {
        parts: &parts,
        level,
        order: &order,
        best: Rational::zero(),
        best_sets: (Vec::new(), Vec::new()),
        visited: 0,
    };
    st.go(0, &mut Vec::new(), &mut Vec::new())?;
    let (p, m) = std::mem::take(&mut st.best_sets);
    Ok(Found {
        value: st.best,
        witness: vec![compact(level, p), compact(level, m)],
        visited: st.visited,
    })
}
