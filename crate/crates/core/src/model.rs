//! The curve model: a schedule of direction-change generations and the tree
//! of normalized difference shapes.
//!
//! Inside one coarse dyadic interval every consecutive difference of a given
//! generation is the same polynomial up to the scalar `2^-n`, so the model
//! stores one normalized density `g_w` per word `w` over `{L, R}` instead of
//! one polynomial per dyadic point. A word gains one letter at each
//! direction-change generation `n_r`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::rational::{ceil_log2, int, pow2};
use crate::exact::{Polynomial, Rational};
use crate::omega::OmegaSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    /// Lower parameter half; density `2(1 - U) g`.
    L,
    /// Upper parameter half; density `2 U g`.
    R,
}

impl Side {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Side::R
        } else {
            Side::L
        }
    }

    pub fn bit(self) -> bool {
        self == Side::R
    }
}

/// Path from the root of the shape tree, one letter per direction change.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Side>);

impl Word {
    pub fn root() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sides(&self) -> &[Side] {
        &self.0
    }

    pub fn child(&self, side: Side) -> Self {
        let mut v = self.0.clone();
        v.push(side);
        Word(v)
    }

    /// All words of length `len` in breadth-first (lexicographic, `L < R`) order.
    pub fn all_of_len(len: usize) -> impl Iterator<Item = Word> {
        (0u64..(1u64 << len)).map(move |bits| {
            Word(
                (0..len)
                    .map(|pos| Side::from_bit(bits >> (len - 1 - pos) & 1 == 1))
                    .collect(),
            )
        })
    }
}

impl From<Vec<Side>> for Word {
    fn from(v: Vec<Side>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                Side::L => "L",
                Side::R => "R",
            })?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.chars()
            .map(|c| match c {
                'L' => Ok(Side::L),
                'R' => Ok(Side::R),
                other => Err(format!("invalid letter `{other}` in word `{s}`")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Word)
    }
}

/// One node of the shape tree: a density `g` with unit mass on `[0, 1]` and
/// its cumulative `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeNode {
    pub word: Word,
    pub g: Polynomial,
    pub u: Polynomial,
    pub children: Option<Box<(ShapeNode, ShapeNode)>>,
}

impl ShapeNode {
    /// `g = 1`, `U = x`.
    pub fn root() -> Self {
        Self::from_density(Word::root(), Polynomial::one())
    }

    pub fn from_density(word: Word, g: Polynomial) -> Self {
        let u = g.antiderivative();
        Self {
            word,
            g,
            u,
            children: None,
        }
    }

    pub fn depth(&self) -> usize {
        self.word.len()
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    pub fn child(&self, side: Side) -> Option<&ShapeNode> {
        self.children.as_deref().map(|(l, r)| match side {
            Side::L => l,
            Side::R => r,
        })
    }

    /// Follows `path` (relative to this node).
    pub fn descend(&self, path: &[Side]) -> Option<&ShapeNode> {
        path.iter().try_fold(self, |node, &s| node.child(s))
    }

    fn descend_mut(&mut self, path: &[Side]) -> Option<&mut ShapeNode> {
        let mut node = self;
        for &s in path {
            let (l, r) = node.children.as_deref_mut()?;
            node = match s {
                Side::L => l,
                Side::R => r,
            };
        }
        Some(node)
    }

    /// Attaches the two split children.
    pub fn split(&mut self) -> Result<()> {
        let (l, r) = split_density(self)?;
        self.children = Some(Box::new((l, r)));
        Ok(())
    }

    /// Nodes of this subtree in breadth-first order.
    pub fn bfs(&self) -> Vec<&ShapeNode> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            if let Some((l, r)) = out[i].children.as_deref() {
                out.push(l);
                out.push(r);
            }
            i += 1;
        }
        out
    }
}

/// Splits a node's density into its two children:
/// `g_L = 2(1 - U) g` (lower half) and `g_R = 2 U g` (upper half).
/// Both children again have unit mass.
pub fn split_density(node: &ShapeNode) -> Result<(ShapeNode, ShapeNode)> {
    if !node.is_leaf() {
        return Err(Error::AlreadySplit(node.word.to_string()));
    }
    let two_u = node.u.scale(&int(2));
    let left = &(&Polynomial::constant(int(2)) - &two_u) * &node.g;
    let right = &two_u * &node.g;
    Ok((
        ShapeNode::from_density(node.word.child(Side::L), left),
        ShapeNode::from_density(node.word.child(Side::R), right),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScheduleEntry {
    pub r: u32,
    pub k: u32,
    pub n: u32,
}

/// Direction-change generations: `n_r = n_{r-1} + k_r + 1` with `n_0 = 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Schedule {
    entries: Vec<ScheduleEntry>,
}

impl Schedule {
    pub fn from_ks(ks: &[u32]) -> Result<Self> {
        let mut s = Schedule::default();
        for &k in ks {
            s.push(k)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, k: u32) -> Result<()> {
        if k == 0 {
            return Err(Error::Precondition("k_r must be at least 1".into()));
        }
        let n = self
            .last_generation()
            .checked_add(k + 1)
            .ok_or_else(|| Error::ResourceLimit("generation number overflow".into()))?;
        self.entries.push(ScheduleEntry {
            r: self.entries.len() as u32 + 1,
            k,
            n,
        });
        Ok(())
    }

    pub fn entries(&self) -> &[ScheduleEntry] {
        &self.entries
    }

    pub fn levels(&self) -> u32 {
        self.entries.len() as u32
    }

    /// `n_r`, with `n_0 = 0`. Panics if `r` is beyond the schedule.
    pub fn n(&self, r: u32) -> u32 {
        if r == 0 {
            0
        } else {
            self.entries[r as usize - 1].n
        }
    }

    pub fn k(&self, r: u32) -> u32 {
        self.entries[r as usize - 1].k
    }

    pub fn last_generation(&self) -> u32 {
        self.entries.last().map_or(0, |e| e.n)
    }

    /// `Some(r)` if `generation == n_r`.
    pub fn level_at(&self, generation: u32) -> Option<u32> {
        self.entries
            .binary_search_by_key(&generation, |e| e.n)
            .ok()
            .map(|i| i as u32 + 1)
    }

    /// Number of direction changes at or before `generation`.
    pub fn changes_through(&self, generation: u32) -> usize {
        self.entries.partition_point(|e| e.n <= generation)
    }
}

/// Caps that turn runaway degree or coefficient growth into an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildLimits {
    pub max_degree: usize,
    pub max_coeff_bits: u64,
}

impl Default for BuildLimits {
    fn default() -> Self {
        Self {
            max_degree: 256,
            max_coeff_bits: 1 << 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveModel {
    pub omega: OmegaSpec,
    pub schedule: Schedule,
    pub root: ShapeNode,
}

impl CurveModel {
    /// Number of direction-change generations built.
    pub fn levels(&self) -> u32 {
        self.schedule.levels()
    }

    pub fn node(&self, word: &Word) -> Option<&ShapeNode> {
        self.root.descend(word.sides())
    }

    pub fn node_mut(&mut self, word: &Word) -> Option<&mut ShapeNode> {
        self.root.descend_mut(word.sides())
    }

    /// Nodes of the given depth in breadth-first word order.
    pub fn nodes_at_depth(&self, depth: usize) -> Vec<&ShapeNode> {
        self.root
            .bfs()
            .into_iter()
            .filter(|n| n.depth() == depth)
            .collect()
    }

    pub fn nodes(&self) -> Vec<&ShapeNode> {
        self.root.bfs()
    }

    /// Largest `n` for which every generation-`n` dyadic is defined.
    pub fn max_generation(&self) -> u32 {
        self.schedule.last_generation()
    }

    /// Same shapes and ω, different schedule. Used for negative controls.
    pub fn with_schedule(&self, schedule: Schedule) -> Result<Self> {
        if schedule.levels() != self.levels() {
            return Err(Error::Consistency(format!(
                "schedule has {} levels, model has {}",
                schedule.levels(),
                self.levels()
            )));
        }
        Ok(Self {
            omega: self.omega.clone(),
            schedule,
            root: self.root.clone(),
        })
    }

    /// `(max degree, max coefficient bits)` over the densities of one depth.
    pub fn depth_stats(&self, depth: usize) -> (usize, u64) {
        self.nodes_at_depth(depth)
            .iter()
            .map(|n| {
                (
                    n.g.degree().unwrap_or(0),
                    n.g.max_coeff_bits().max(n.u.max_coeff_bits()),
                )
            })
            .fold((0, 0), |(d, b), (d2, b2)| (d.max(d2), b.max(b2)))
    }
}

/// Largest ratio any split part of `nodes` forces onto `2^{k_r - r}`.
///
/// For each node `w` and each part `P ∈ {U_w G_w, (1 - U_w) G_w}` with
/// `G_w = prev_mass · g_w` this is the maximum of
/// `sup_bound_unit(P^{(m)}) / ω_m` over `1 <= m <= deg P` and
/// `sup_bound_disc(P, r)`.
pub fn split_requirement(
    r: u32,
    nodes: &[&ShapeNode],
    prev_mass: &Rational,
    omega: &OmegaSpec,
) -> Rational {
    let radius = int(r as i64);
    let mut worst = Rational::zero();
    for node in nodes {
        let big_g = node.g.scale(prev_mass);
        let upper = &node.u * &big_g;
        let lower = &big_g - &upper;
        for part in [&upper, &lower] {
            let disc = part.sup_bound_disc(&radius);
            if disc > worst {
                worst = disc;
            }
            for m in 1..=part.degree().unwrap_or(0) {
                let ratio = part.derivative(m).sup_bound_unit() / omega.omega(m);
                if ratio > worst {
                    worst = ratio;
                }
            }
        }
    }
    worst
}

/// Smallest `k_r >= 1` such that every split part of the depth-`(r-1)` nodes
/// has all derivative coefficient-sum bounds `<= 2^{k_r - r} ω_m` on `[0, 1]`
/// and disc bound `<= 2^{k_r - r}` on the disc of radius `r`.
pub fn choose_k(r: u32, nodes: &[&ShapeNode], prev_mass: &Rational, omega: &OmegaSpec) -> u32 {
    assert!(r >= 1);
    let worst = split_requirement(r, nodes, prev_mass, omega);
    if worst.is_zero() {
        return 1;
    }
    let k = r as i64 + ceil_log2(&worst);
    k.max(1) as u32
}

/// Whether a given `k` satisfies the split-part inequalities at level `r`.
pub fn split_conditions_hold(
    r: u32,
    k: u32,
    nodes: &[&ShapeNode],
    prev_mass: &Rational,
    omega: &OmegaSpec,
) -> bool {
    split_requirement(r, nodes, prev_mass, omega) <= pow2(k as i64 - r as i64)
}

pub fn build_model(omega: OmegaSpec, levels: u32) -> Result<CurveModel> {
    build_model_with_limits(omega, levels, BuildLimits::default())
}

pub fn build_model_with_limits(
    omega: OmegaSpec,
    levels: u32,
    limits: BuildLimits,
) -> Result<CurveModel> {
    if levels == 0 {
        return Err(Error::Precondition("at least one level is required".into()));
    }
    omega.validate()?;
    let mut model = CurveModel {
        omega,
        schedule: Schedule::default(),
        root: ShapeNode::root(),
    };
    for r in 1..=levels {
        let depth = r as usize - 1;
        let prev_mass = pow2(-(model.schedule.n(r - 1) as i64));
        let k = {
            let nodes = model.nodes_at_depth(depth);
            choose_k(r, &nodes, &prev_mass, &model.omega)
        };
        model.schedule.push(k)?;

        for word in Word::all_of_len(depth).collect::<Vec<_>>() {
            let node = model
                .node_mut(&word)
                .expect("tree is complete down to the current depth");
            node.split()?;
            let (l, rt) = node.children.as_deref().expect("just split");
            for child in [l, rt] {
                let degree = child.u.degree().unwrap_or(0);
                let bits = child.g.max_coeff_bits().max(child.u.max_coeff_bits());
                if degree > limits.max_degree {
                    return Err(Error::ResourceLimit(format!(
                        "shape `{}` has degree {degree} > cap {}",
                        child.word, limits.max_degree
                    )));
                }
                if bits > limits.max_coeff_bits {
                    return Err(Error::ResourceLimit(format!(
                        "shape `{}` has {bits}-bit coefficients > cap {}",
                        child.word, limits.max_coeff_bits
                    )));
                }
            }
        }
    }
    debug_assert!(model.root.u.eval(&Rational::one()).is_one());
    Ok(model)
}
