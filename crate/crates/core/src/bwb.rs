//! Borel–Weil–Bott cohomology of line bundles on the G2 flag variety `F = G/B`,
//! in the Picard coordinates `a·h + b·H`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::lie::{DotResult, LieError, RootSystem, Weight};

/// Line bundle class `O(a·h + b·H)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LineClass {
    /// Coefficient of `h`.
    pub a: i64,
    /// Coefficient of `H`.
    pub b: i64,
}

impl LineClass {
    pub const ZERO: LineClass = LineClass::new(0, 0);
    pub const H_SMALL: LineClass = LineClass::new(1, 0);
    pub const H_BIG: LineClass = LineClass::new(0, 1);

    pub const fn new(a: i64, b: i64) -> Self {
        LineClass { a, b }
    }

    pub fn checked_add(self, other: LineClass) -> Option<LineClass> {
        Some(LineClass::new(
            self.a.checked_add(other.a)?,
            self.b.checked_add(other.b)?,
        ))
    }

    pub fn checked_neg(self) -> Option<LineClass> {
        Some(LineClass::new(self.a.checked_neg()?, self.b.checked_neg()?))
    }

    pub fn checked_scale(self, k: i64) -> Option<LineClass> {
        Some(LineClass::new(
            self.a.checked_mul(k)?,
            self.b.checked_mul(k)?,
        ))
    }
}

// Unchecked operators are only used on small literal classes.
impl Add for LineClass {
    type Output = LineClass;
    fn add(self, o: LineClass) -> LineClass {
        self.checked_add(o).expect("line class overflow")
    }
}

impl Sub for LineClass {
    type Output = LineClass;
    fn sub(self, o: LineClass) -> LineClass {
        self + (-o)
    }
}

impl Neg for LineClass {
    type Output = LineClass;
    fn neg(self) -> LineClass {
        self.checked_neg().expect("line class overflow")
    }
}

/// Canonical classes in the `(h, H)` basis.
pub mod canonical {
    use super::LineClass;
    pub const K_Q: LineClass = LineClass::new(-5, 0);
    pub const K_G: LineClass = LineClass::new(0, -3);
    pub const K_F: LineClass = LineClass::new(-2, -2);
    pub const K_M: LineClass = LineClass::new(-1, -1);
    /// Relative canonical class of `π: F → Q`.
    pub const OMEGA_F_Q: LineClass = LineClass::new(3, -2);
    /// Relative canonical class of `ρ: F → G`.
    pub const OMEGA_F_G: LineClass = LineClass::new(-2, 1);
    /// Class of the divisor `M ⊂ F`.
    pub const DIVISOR_M: LineClass = LineClass::new(1, 1);
}

fn write_term(f: &mut fmt::Formatter<'_>, coeff: i64, sym: &str, first: bool) -> fmt::Result {
    if coeff == 0 {
        return Ok(());
    }
    let sign = if coeff < 0 {
        "-"
    } else if first {
        ""
    } else {
        "+"
    };
    match coeff.unsigned_abs() {
        1 => write!(f, "{sign}{sym}"),
        n => write!(f, "{sign}{n}{sym}"),
    }
}

/// Positive term first, `h` first on ties: `3h-2H`, `H-2h`, `-h-H`, `0`.
impl fmt::Display for LineClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (0, 0) => write!(f, "0"),
            (a, b) if a < 0 && b > 0 => {
                write_term(f, b, "H", true)?;
                write_term(f, a, "h", false)
            }
            (a, b) => {
                write_term(f, a, "h", true)?;
                write_term(f, b, "H", a == 0)
            }
        }
    }
}

/// Finite map degree → positive dimension. Empty means acyclic.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CohomologyProfile(BTreeMap<i32, u64>);

impl CohomologyProfile {
    pub fn acyclic() -> Self {
        Self::default()
    }

    pub fn single(degree: i32, dim: u64) -> Self {
        let mut p = Self::default();
        p.add_at(degree, dim);
        p
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i32, u64)>) -> Self {
        let mut p = Self::default();
        for (d, n) in pairs {
            p.add_at(d, n);
        }
        p
    }

    pub fn is_acyclic(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, degree: i32) -> u64 {
        self.0.get(&degree).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (i32, u64)> + '_ {
        self.0.iter().map(|(&d, &n)| (d, n))
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.0.keys().copied()
    }

    pub fn total_dim(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn add_at(&mut self, degree: i32, dim: u64) {
        if dim == 0 {
            return;
        }
        *self.0.entry(degree).or_insert(0) += dim;
    }

    /// Removes `dim` from `degree`; callers guarantee it is present.
    pub fn sub_at(&mut self, degree: i32, dim: u64) {
        if dim == 0 {
            return;
        }
        let slot = self.0.get_mut(&degree).expect("degree present");
        *slot -= dim;
        if *slot == 0 {
            self.0.remove(&degree);
        }
    }

    pub fn add(&self, other: &CohomologyProfile) -> CohomologyProfile {
        let mut out = self.clone();
        for (d, n) in other.entries() {
            out.add_at(d, n);
        }
        out
    }

    /// Every degree `d` becomes `d + by`.
    pub fn shift_degrees(&self, by: i32) -> CohomologyProfile {
        CohomologyProfile(self.0.iter().map(|(&d, &n)| (d + by, n)).collect())
    }

    /// Alternating sum `Σ (−1)^d dim`.
    pub fn euler(&self) -> i128 {
        self.0
            .iter()
            .map(|(&d, &n)| {
                if d.rem_euclid(2) == 0 {
                    n as i128
                } else {
                    -(n as i128)
                }
            })
            .sum()
    }

    /// `H^1 = 1`, `H^0 = 7, H^1 = 2`, or `acyclic`.
    pub fn describe(&self, letter: &str) -> String {
        if self.is_acyclic() {
            return "acyclic".to_string();
        }
        self.0
            .iter()
            .map(|(d, n)| format!("{letter}^{d} = {n}"))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for CohomologyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (d, n)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}: {n}")?;
        }
        write!(f, "}}")
    }
}

/// Which fundamental weight carries `h` (the other carries `H`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PicCalibration {
    /// `h ↦ ω₁`, `H ↦ ω₂`.
    HFirst,
    /// `h ↦ ω₂`, `H ↦ ω₁`.
    HSecond,
}

impl PicCalibration {
    pub const ALL: [PicCalibration; 2] = [PicCalibration::HFirst, PicCalibration::HSecond];

    /// The assignment shipped with the engine.
    pub const SHIPPED: PicCalibration = PicCalibration::HFirst;

    pub fn swapped(self) -> Self {
        match self {
            PicCalibration::HFirst => PicCalibration::HSecond,
            PicCalibration::HSecond => PicCalibration::HFirst,
        }
    }

    pub fn weight(self, c: LineClass) -> Weight {
        match self {
            PicCalibration::HFirst => Weight::new(vec![c.a, c.b]),
            PicCalibration::HSecond => Weight::new(vec![c.b, c.a]),
        }
    }
}

impl fmt::Display for PicCalibration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PicCalibration::HFirst => write!(f, "h=omega1, H=omega2"),
            PicCalibration::HSecond => write!(f, "h=omega2, H=omega1"),
        }
    }
}

/// One of the three anchors that pin down the calibration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorCheck {
    pub name: &'static str,
    pub class: LineClass,
    pub expected: CohomologyProfile,
    pub found: CohomologyProfile,
}

impl AnchorCheck {
    pub fn pass(&self) -> bool {
        self.expected == self.found
    }
}

const MEMO_RADIUS: i64 = 12;
const MEMO_SIDE: usize = (2 * MEMO_RADIUS + 1) as usize;

/// The flag variety of G2 together with a Picard calibration.
#[derive(Debug)]
pub struct FlagVariety {
    roots: RootSystem,
    calibration: PicCalibration,
    memo: OnceLock<Vec<CohomologyProfile>>,
}

impl Clone for FlagVariety {
    fn clone(&self) -> Self {
        FlagVariety::new(self.roots.clone(), self.calibration)
    }
}

impl Default for FlagVariety {
    fn default() -> Self {
        Self::g2()
    }
}

impl FlagVariety {
    pub fn new(roots: RootSystem, calibration: PicCalibration) -> Self {
        FlagVariety {
            roots,
            calibration,
            memo: OnceLock::new(),
        }
    }

    pub fn g2() -> Self {
        Self::new(RootSystem::g2(), PicCalibration::SHIPPED)
    }

    pub fn with_calibration(calibration: PicCalibration) -> Self {
        Self::new(RootSystem::g2(), calibration)
    }

    pub fn roots(&self) -> &RootSystem {
        &self.roots
    }

    pub fn calibration(&self) -> PicCalibration {
        self.calibration
    }

    /// Linear map `LineClass → Weight` fixed by the calibration.
    pub fn pic_weight(&self, c: LineClass) -> Weight {
        self.calibration.weight(c)
    }

    /// Borel–Weil–Bott: empty for singular weights, otherwise the Weyl module
    /// of the dominant representative placed in degree equal to the length.
    pub fn bott(&self, weight: &Weight) -> Result<CohomologyProfile, LieError> {
        match self.roots.make_dominant_dot(weight)? {
            DotResult::Singular => Ok(CohomologyProfile::acyclic()),
            DotResult::Regular { dominant, length } => {
                let dim = self.roots.weyl_dim(&dominant)?;
                Ok(CohomologyProfile::single(length as i32, dim))
            }
        }
    }

    fn memo(&self) -> &[CohomologyProfile] {
        self.memo.get_or_init(|| {
            let mut table = Vec::with_capacity(MEMO_SIDE * MEMO_SIDE);
            for a in -MEMO_RADIUS..=MEMO_RADIUS {
                for b in -MEMO_RADIUS..=MEMO_RADIUS {
                    let w = self.pic_weight(LineClass::new(a, b));
                    table.push(self.bott(&w).expect("small weights cannot overflow"));
                }
            }
            table
        })
    }

    /// `H^•(F, O(c))`.
    pub fn line_cohomology(&self, c: LineClass) -> Result<CohomologyProfile, LieError> {
        if c.a.abs() <= MEMO_RADIUS && c.b.abs() <= MEMO_RADIUS {
            let idx = (c.a + MEMO_RADIUS) as usize * MEMO_SIDE + (c.b + MEMO_RADIUS) as usize;
            return Ok(self.memo()[idx].clone());
        }
        self.bott(&self.pic_weight(c))
    }

    /// `χ(F, O(c))`.
    pub fn euler_line(&self, c: LineClass) -> Result<i128, LieError> {
        Ok(self.line_cohomology(c)?.euler())
    }

    /// Evaluates the three calibration anchors under this variety's calibration.
    pub fn anchor_checks(&self) -> Result<Vec<AnchorCheck>, LieError> {
        let anchors = [
            (
                "H^*(F,O(h)) is the 7-dimensional representation",
                LineClass::H_SMALL,
                CohomologyProfile::single(0, 7),
            ),
            (
                "H^*(F,O(H)) is the 14-dimensional representation",
                LineClass::H_BIG,
                CohomologyProfile::single(0, 14),
            ),
            (
                "H^*(F,O(3h-2H)) = k[-1]",
                canonical::OMEGA_F_Q,
                CohomologyProfile::single(1, 1),
            ),
        ];
        anchors
            .into_iter()
            .map(|(name, class, expected)| {
                Ok(AnchorCheck {
                    name,
                    class,
                    expected,
                    found: self.line_cohomology(class)?,
                })
            })
            .collect()
    }

    /// Finds the unique calibration passing every anchor.
    pub fn resolve_calibration(roots: &RootSystem) -> Result<PicCalibration, CalibrationError> {
        let passing: Vec<PicCalibration> = PicCalibration::ALL
            .into_iter()
            .filter(|&cal| {
                FlagVariety::new(roots.clone(), cal)
                    .anchor_checks()
                    .map(|checks| checks.iter().all(AnchorCheck::pass))
                    .unwrap_or(false)
            })
            .collect();
        match passing.as_slice() {
            [one] => Ok(*one),
            [] => Err(CalibrationError::NonePass),
            _ => Err(CalibrationError::Ambiguous),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CalibrationError {
    #[error("no Picard calibration passes the anchors")]
    NonePass,
    #[error("both Picard calibrations pass the anchors")]
    Ambiguous,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lc(a: i64, b: i64) -> LineClass {
        LineClass::new(a, b)
    }

    #[test]
    fn line_class_display() {
        assert_eq!(lc(3, -2).to_string(), "3h-2H");
        assert_eq!(lc(-2, 1).to_string(), "H-2h");
        assert_eq!(lc(-1, -1).to_string(), "-h-H");
        assert_eq!(lc(0, 0).to_string(), "0");
        assert_eq!(lc(0, -1).to_string(), "-H");
        assert_eq!(lc(1, 1).to_string(), "h+H");
        assert_eq!(lc(1, -1).to_string(), "h-H");
    }

    #[test]
    fn pic_weight_is_linear() {
        let f = FlagVariety::g2();
        assert_eq!(f.pic_weight(lc(0, 0)), Weight::zero(2));
        assert_eq!(f.pic_weight(lc(1, 1)), *f.roots().rho());
        assert_eq!(
            f.pic_weight(lc(-1, -1)),
            f.roots().rho().checked_neg().unwrap()
        );
        assert_eq!(f.pic_weight(lc(1, 0)), Weight::fundamental(2, 0));
    }

    #[test]
    fn bott_basics() {
        let f = FlagVariety::g2();
        assert_eq!(
            f.bott(&Weight::zero(2)).unwrap(),
            CohomologyProfile::single(0, 1)
        );
        assert!(f.bott(&Weight::new(vec![-1, -1])).unwrap().is_acyclic());
        assert_eq!(
            f.line_cohomology(lc(3, -2)).unwrap(),
            CohomologyProfile::single(1, 1)
        );
        assert_eq!(
            f.line_cohomology(lc(1, 0)).unwrap(),
            CohomologyProfile::single(0, 7)
        );
        assert_eq!(
            f.line_cohomology(lc(-2, -2)).unwrap(),
            CohomologyProfile::single(6, 1)
        );
        for t in -5..=5 {
            assert!(f.line_cohomology(lc(t, -1)).unwrap().is_acyclic());
        }
    }

    #[test]
    fn euler_values() {
        let f = FlagVariety::g2();
        assert_eq!(f.euler_line(lc(0, 1)).unwrap(), 14);
        assert_eq!(f.euler_line(lc(3, -2)).unwrap(), -1);
        assert_eq!(f.euler_line(lc(-1, -1)).unwrap(), 0);
    }

    #[test]
    fn memo_matches_direct_computation() {
        let f = FlagVariety::g2();
        for c in [lc(12, -12), lc(-12, 12), lc(13, 0), lc(0, -13)] {
            assert_eq!(
                f.line_cohomology(c).unwrap(),
                f.bott(&f.pic_weight(c)).unwrap()
            );
        }
    }

    #[test]
    fn calibration_is_unique() {
        let roots = RootSystem::g2();
        assert_eq!(
            FlagVariety::resolve_calibration(&roots),
            Ok(PicCalibration::SHIPPED)
        );
        let wrong = FlagVariety::with_calibration(PicCalibration::SHIPPED.swapped());
        assert!(wrong.anchor_checks().unwrap().iter().any(|c| !c.pass()));
    }

    #[test]
    fn profile_algebra() {
        let p = CohomologyProfile::from_pairs([(0, 2), (1, 1), (3, 0)]);
        assert_eq!(p.to_string(), "{0: 2, 1: 1}");
        assert_eq!(p.euler(), 1);
        assert_eq!(p.shift_degrees(-1).get(-1), 2);
        assert_eq!(p.describe("H"), "H^0 = 2, H^1 = 1");
        assert_eq!(CohomologyProfile::acyclic().describe("H"), "acyclic");
    }
}
