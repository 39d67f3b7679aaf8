//! Root systems and Weyl groups driven by a Cartan matrix.
//!
//! Weights are written in the basis of fundamental weights, so the pairing of
//! a weight with the `i`-th simple coroot is just its `i`-th coordinate. Row
//! `i` of the Cartan matrix holds the simple root `αᵢ` in the same basis,
//! i.e. `cartan[i][j] = ⟨αᵢ, αⱼ∨⟩`.
//!
//! All arithmetic is checked; overflow surfaces as [`LieError::Overflow`].

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("simple root index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("weight has {found} coordinates, root system has rank {rank}")]
    RankMismatch { found: usize, rank: usize },
    #[error("weight {0} is not dominant")]
    NotDominant(Weight),
    #[error("invalid Cartan matrix: {0}")]
    InvalidCartan(String),
    #[error("integer overflow in exact arithmetic")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, LieError>;

/// Integer weight in fundamental-weight coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        Weight(coords.into())
    }

    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    /// The `i`-th fundamental weight.
    pub fn fundamental(rank: usize, i: usize) -> Self {
        let mut w = vec![0; rank];
        w[i] = 1;
        Weight(w)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn checked_add(&self, other: &Weight) -> Result<Weight> {
        zip_checked(self, other, i64::checked_add)
    }

    pub fn checked_sub(&self, other: &Weight) -> Result<Weight> {
        zip_checked(self, other, i64::checked_sub)
    }

    pub fn checked_neg(&self) -> Result<Weight> {
        self.0
            .iter()
            .map(|c| c.checked_neg().ok_or(LieError::Overflow))
            .collect::<Result<Vec<_>>>()
            .map(Weight)
    }

    /// All pairings with simple coroots are nonnegative.
    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }
}

fn zip_checked(a: &Weight, b: &Weight, op: fn(i64, i64) -> Option<i64>) -> Result<Weight> {
    if a.rank() != b.rank() {
        return Err(LieError::RankMismatch {
            found: b.rank(),
            rank: a.rank(),
        });
    }
    a.0.iter()
        .zip(&b.0)
        .map(|(&x, &y)| op(x, y).ok_or(LieError::Overflow))
        .collect::<Result<Vec<_>>>()
        .map(Weight)
}

impl fmt::Display for Weight {
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

/// Element of the Weyl group, stored as a reduced word in simple reflections.
///
/// The word `[i1, .., ik]` denotes `s_{i1} ∘ .. ∘ s_{ik}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeylElement {
    pub word: Vec<usize>,
}

impl WeylElement {
    pub fn identity() -> Self {
        WeylElement { word: Vec::new() }
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    /// Linear action on weights.
    pub fn act(&self, roots: &RootSystem, weight: &Weight) -> Result<Weight> {
        self.word
            .iter()
            .rev()
            .try_fold(weight.clone(), |w, &i| roots.reflect(&w, i))
    }

    /// Dot action `w·λ = w(λ+ρ) − ρ`.
    pub fn dot_act(&self, roots: &RootSystem, weight: &Weight) -> Result<Weight> {
        let shifted = weight.checked_add(&roots.rho)?;
        self.act(roots, &shifted)?.checked_sub(&roots.rho)
    }
}

/// Outcome of moving a weight into the dominant chamber under the dot action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DotResult {
    /// `λ+ρ` lies on a reflection wall.
    Singular,
    /// `dominant` was reached from the input by exactly `length` dot reflections.
    Regular { dominant: Weight, length: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSystem {
    rank: usize,
    cartan: Vec<Vec<i64>>,
    /// Half the squared length of each simple root, normalized to coprime integers.
    symmetrizer: Vec<i64>,
    /// Positive roots in simple-root coordinates, sorted by height then lexicographically.
    positive_roots: Vec<Vec<i64>>,
    rho: Weight,
}

impl RootSystem {
    /// Builds the root system of a finite type from its Cartan matrix.
    pub fn from_cartan(cartan: Vec<Vec<i64>>) -> Result<Self> {
        let rank = cartan.len();
        if rank == 0 {
            return Err(LieError::InvalidCartan("empty matrix".into()));
        }
        for (i, row) in cartan.iter().enumerate() {
            if row.len() != rank {
                return Err(LieError::InvalidCartan(format!("row {i} has wrong length")));
            }
            for (j, &c) in row.iter().enumerate() {
                if i == j && c != 2 {
                    return Err(LieError::InvalidCartan(format!(
                        "diagonal entry ({i},{i}) is {c}"
                    )));
                }
                if i != j && c > 0 {
                    return Err(LieError::InvalidCartan(format!(
                        "off-diagonal entry ({i},{j}) is positive"
                    )));
                }
                if i != j && (c == 0) != (cartan[j][i] == 0) {
                    return Err(LieError::InvalidCartan(format!(
                        "entries ({i},{j}) and ({j},{i}) disagree on vanishing"
                    )));
                }
            }
        }
        let symmetrizer = symmetrizer(&cartan)?;
        let mut roots = RootSystem {
            rank,
            cartan,
            symmetrizer,
            positive_roots: Vec::new(),
            rho: Weight(vec![1; rank]),
        };
        roots.positive_roots = roots.generate_positive_roots()?;
        Ok(roots)
    }

    /// `G2` with the long root second: `[[2,-1],[-3,2]]`.
    pub fn g2() -> Self {
        Self::from_cartan(vec![vec![2, -1], vec![-3, 2]]).expect("G2 Cartan matrix is valid")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn rho(&self) -> &Weight {
        &self.rho
    }

    pub fn symmetrizer(&self) -> &[i64] {
        &self.symmetrizer
    }

    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.positive_roots
    }

    /// Expresses a root given in simple-root coordinates in fundamental-weight coordinates.
    pub fn root_to_weight(&self, root: &[i64]) -> Result<Weight> {
        let mut w = vec![0i64; self.rank];
        for (i, &c) in root.iter().enumerate() {
            for (j, slot) in w.iter_mut().enumerate() {
                let term = c.checked_mul(self.cartan[i][j]).ok_or(LieError::Overflow)?;
                *slot = slot.checked_add(term).ok_or(LieError::Overflow)?;
            }
        }
        Ok(Weight(w))
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.rank {
            return Err(LieError::IndexOutOfRange {
                index: i,
                rank: self.rank,
            });
        }
        Ok(())
    }

    fn check_weight(&self, weight: &Weight) -> Result<()> {
        if weight.rank() != self.rank {
            return Err(LieError::RankMismatch {
                found: weight.rank(),
                rank: self.rank,
            });
        }
        Ok(())
    }

    /// `⟨λ, αᵢ∨⟩`.
    pub fn pairing(&self, weight: &Weight, i: usize) -> Result<i64> {
        self.check_index(i)?;
        self.check_weight(weight)?;
        Ok(weight.0[i])
    }

    /// `sᵢ(λ) = λ − ⟨λ, αᵢ∨⟩ αᵢ`.
    pub fn reflect(&self, weight: &Weight, i: usize) -> Result<Weight> {
        let p = self.pairing(weight, i)?;
        weight
            .0
            .iter()
            .zip(&self.cartan[i])
            .map(|(&x, &a)| {
                p.checked_mul(a)
                    .and_then(|pa| x.checked_sub(pa))
                    .ok_or(LieError::Overflow)
            })
            .collect::<Result<Vec<_>>>()
            .map(Weight)
    }

    /// `sᵢ·λ = sᵢ(λ+ρ) − ρ`.
    pub fn dot_reflect(&self, weight: &Weight, i: usize) -> Result<Weight> {
        self.check_weight(weight)?;
        let shifted = weight.checked_add(&self.rho)?;
        self.reflect(&shifted, i)?.checked_sub(&self.rho)
    }

    /// Moves `λ` into the dominant chamber under the dot action, always reflecting
    /// in the smallest index with a negative pairing.
    pub fn make_dominant_dot(&self, weight: &Weight) -> Result<DotResult> {
        self.check_weight(weight)?;
        let mut mu = weight.checked_add(&self.rho)?;
        let mut length = 0usize;
        loop {
            if mu.0.contains(&0) {
                return Ok(DotResult::Singular);
            }
            match mu.0.iter().position(|&c| c < 0) {
                None => {
                    return Ok(DotResult::Regular {
                        dominant: mu.checked_sub(&self.rho)?,
                        length,
                    })
                }
                Some(i) => {
                    mu = self.reflect(&mu, i)?;
                    length += 1;
                    // Each reflection at a negative pairing lowers the length by one,
                    // so the walk ends after at most |Φ⁺| steps.
                    assert!(
                        length <= self.positive_roots.len(),
                        "dot walk failed to terminate"
                    );
                }
            }
        }
    }

    /// Weyl dimension formula `∏ (λ+ρ, α) / (ρ, α)` over positive roots, computed exactly.
    pub fn weyl_dim(&self, weight: &Weight) -> Result<u64> {
        self.check_weight(weight)?;
        if !weight.is_dominant() {
            return Err(LieError::NotDominant(weight.clone()));
        }
        let shifted = weight.checked_add(&self.rho)?;
        let (mut num, mut den) = (1i128, 1i128);
        for root in &self.positive_roots {
            let mut a = 0i128;
            let mut b = 0i128;
            for (i, &c) in root.iter().enumerate() {
                let scale = c as i128 * self.symmetrizer[i] as i128;
                a = (shifted.0[i] as i128)
                    .checked_mul(scale)
                    .and_then(|t| a.checked_add(t))
                    .ok_or(LieError::Overflow)?;
                b += scale;
            }
            num = num.checked_mul(a).ok_or(LieError::Overflow)?;
            den = den.checked_mul(b).ok_or(LieError::Overflow)?;
            let g = gcd(num, den);
            num /= g;
            den /= g;
        }
        if den != 1 {
            return Err(LieError::InvalidCartan(format!(
                "Weyl dimension formula left a remainder ({num}/{den})"
            )));
        }
        u64::try_from(num).map_err(|_| LieError::Overflow)
    }

    /// Every element of the (finite) Weyl group, with shortest words, in
    /// breadth-first order.
    pub fn enumerate_weyl(&self) -> Result<Vec<WeylElement>> {
        let mut seen: HashMap<Weight, ()> = HashMap::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        queue.push_back((WeylElement::identity(), self.rho.clone()));
        seen.insert(self.rho.clone(), ());
        while let Some((elem, image)) = queue.pop_front() {
            for i in 0..self.rank {
                let next = self.reflect(&image, i)?;
                if seen.contains_key(&next) {
                    continue;
                }
                seen.insert(next.clone(), ());
                let mut word = Vec::with_capacity(elem.word.len() + 1);
                word.push(i);
                word.extend_from_slice(&elem.word);
                queue.push_back((WeylElement { word }, next));
            }
            out.push(elem);
        }
        Ok(out)
    }

    fn generate_positive_roots(&self) -> Result<Vec<Vec<i64>>> {
        // Orbit of the simple roots under the simple reflections, in root coordinates.
        let simple: Vec<Vec<i64>> = (0..self.rank)
            .map(|i| {
                let mut r = vec![0; self.rank];
                r[i] = 1;
                r
            })
            .collect();
        let mut all: Vec<Vec<i64>> = simple.clone();
        let mut queue: VecDeque<Vec<i64>> = simple.into();
        while let Some(root) = queue.pop_front() {
            for i in 0..self.rank {
                let mut pairing = 0i64;
                for (j, &c) in root.iter().enumerate() {
                    pairing = c
                        .checked_mul(self.cartan[j][i])
                        .and_then(|t| pairing.checked_add(t))
                        .ok_or(LieError::Overflow)?;
                }
                let mut next = root.clone();
                next[i] = next[i].checked_sub(pairing).ok_or(LieError::Overflow)?;
                if !all.contains(&next) {
                    if all.len() > 10_000 {
                        return Err(LieError::InvalidCartan("root system is not finite".into()));
                    }
                    all.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        let mut positive: Vec<Vec<i64>> = all
            .into_iter()
            .filter(|r| r.iter().all(|&c| c >= 0))
            .collect();
        positive.sort_by_key(|r| (r.iter().sum::<i64>(), r.clone()));
        Ok(positive)
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    if a == 0 {
        1
    } else {
        a
    }
}

/// Integers `dᵢ` with `cartan[i][j]·dⱼ` symmetric, scaled to be coprime.
fn symmetrizer(cartan: &[Vec<i64>]) -> Result<Vec<i64>> {
    let rank = cartan.len();
    // Rationals as (num, den); propagate along the Dynkin diagram.
    let mut d: Vec<Option<(i64, i64)>> = vec![None; rank];
    for start in 0..rank {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some((1, 1));
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let (n, m) = d[i].unwrap();
            for j in 0..rank {
                if i == j || cartan[i][j] == 0 {
                    continue;
                }
                // cartan[i][j] d_j = cartan[j][i] d_i
                let cand = (n * cartan[j][i], m * cartan[i][j]);
                match d[j] {
                    None => {
                        d[j] = Some(cand);
                        queue.push_back(j);
                    }
                    Some((p, q)) => {
                        if p * cand.1 != q * cand.0 {
                            return Err(LieError::InvalidCartan(
                                "matrix is not symmetrizable".into(),
                            ));
                        }
                    }
                }
            }
        }
    }
    let d: Vec<(i64, i64)> = d
        .into_iter()
        .map(|x| {
            let (p, q) = x.unwrap();
            if q < 0 {
                (-p, -q)
            } else {
                (p, q)
            }
        })
        .collect();
    let lcm_den = d
        .iter()
        .fold(1i128, |acc, &(_, q)| acc / gcd(acc, q as i128) * q as i128);
    let ints: Vec<i128> = d
        .iter()
        .map(|&(p, q)| p as i128 * (lcm_den / q as i128))
        .collect();
    let g = ints.iter().fold(
        0i128,
        |acc, &x| if acc == 0 { x.abs() } else { gcd(acc, x) },
    );
    ints.into_iter()
        .map(|x| i64::try_from(x / g).map_err(|_| LieError::Overflow))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(a: i64, b: i64) -> Weight {
        Weight::new(vec![a, b])
    }

    #[test]
    fn pairing_with_fundamental_weights() {
        let g2 = RootSystem::g2();
        assert_eq!(g2.pairing(&Weight::fundamental(2, 0), 0).unwrap(), 1);
        assert_eq!(g2.pairing(&Weight::fundamental(2, 0), 1).unwrap(), 0);
        for i in 0..2 {
            assert_eq!(g2.pairing(g2.rho(), i).unwrap(), 1);
        }
        assert_eq!(
            g2.pairing(&w(0, 0), 2),
            Err(LieError::IndexOutOfRange { index: 2, rank: 2 })
        );
    }

    #[test]
    fn reflections_fix_what_they_should() {
        let g2 = RootSystem::g2();
        assert_eq!(g2.reflect(&w(0, 1), 0).unwrap(), w(0, 1));
        assert_eq!(g2.reflect(&w(0, 0), 1).unwrap(), w(0, 0));
        // s_i(0) = −α_i under the dot action
        assert_eq!(g2.dot_reflect(&w(0, 0), 0).unwrap(), w(-2, 1));
        assert_eq!(g2.dot_reflect(&w(0, 0), 1).unwrap(), w(3, -2));
        assert_eq!(g2.dot_reflect(&w(-1, -1), 1).unwrap(), w(-1, -1));
        assert!(g2.reflect(&w(0, 0), 5).is_err());
    }

    #[test]
    fn g2_roots_and_group() {
        let g2 = RootSystem::g2();
        assert_eq!(g2.symmetrizer(), &[1, 3]);
        let roots = g2.positive_roots();
        assert_eq!(roots.len(), 6);
        assert!(roots.contains(&vec![1, 0]) && roots.contains(&vec![0, 1]));
        assert!(roots.contains(&vec![3, 2]));
        let mut sum = Weight::zero(2);
        for r in roots {
            sum = sum.checked_add(&g2.root_to_weight(r).unwrap()).unwrap();
        }
        assert_eq!(sum, w(2, 2));

        let group = g2.enumerate_weyl().unwrap();
        assert_eq!(group.len(), 12);
        assert_eq!(group.iter().filter(|e| e.length() == 0).count(), 1);
        assert_eq!(group.iter().map(|e| e.length()).max(), Some(6));
    }

    #[test]
    fn weyl_dimensions() {
        let g2 = RootSystem::g2();
        assert_eq!(g2.weyl_dim(&w(0, 0)).unwrap(), 1);
        assert_eq!(g2.weyl_dim(&w(1, 0)).unwrap(), 7);
        assert_eq!(g2.weyl_dim(&w(0, 1)).unwrap(), 14);
        assert_eq!(g2.weyl_dim(&w(2, 0)).unwrap(), 27);
        assert_eq!(g2.weyl_dim(&w(1, 1)).unwrap(), 64);
        assert!(matches!(
            g2.weyl_dim(&w(-1, 0)),
            Err(LieError::NotDominant(_))
        ));
    }

    #[test]
    fn dot_dominance_basics() {
        let g2 = RootSystem::g2();
        assert_eq!(
            g2.make_dominant_dot(&w(0, 0)).unwrap(),
            DotResult::Regular {
                dominant: w(0, 0),
                length: 0
            }
        );
        assert_eq!(
            g2.make_dominant_dot(&w(-1, -1)).unwrap(),
            DotResult::Singular
        );
        assert_eq!(
            g2.make_dominant_dot(&w(-2, -2)).unwrap(),
            DotResult::Regular {
                dominant: w(0, 0),
                length: 6
            }
        );
    }

    #[test]
    fn overflow_is_an_error() {
        let g2 = RootSystem::g2();
        assert_eq!(g2.reflect(&w(i64::MAX, 0), 0), Err(LieError::Overflow));
        assert_eq!(
            g2.make_dominant_dot(&w(i64::MAX, 0)),
            Err(LieError::Overflow)
        );
        assert_eq!(
            g2.weyl_dim(&w(i64::MAX / 2, i64::MAX / 2)),
            Err(LieError::Overflow)
        );
    }

    #[test]
    fn other_types_build() {
        let a2 = RootSystem::from_cartan(vec![vec![2, -1], vec![-1, 2]]).unwrap();
        assert_eq!(a2.positive_roots().len(), 3);
        assert_eq!(a2.enumerate_weyl().unwrap().len(), 6);
        assert_eq!(a2.weyl_dim(&w(1, 0)).unwrap(), 3);
        let b2 = RootSystem::from_cartan(vec![vec![2, -2], vec![-1, 2]]).unwrap();
        assert_eq!(b2.enumerate_weyl().unwrap().len(), 8);
        assert!(RootSystem::from_cartan(vec![vec![2, 1], vec![-1, 2]]).is_err());
        assert!(RootSystem::from_cartan(vec![vec![3]]).is_err());
    }
}
