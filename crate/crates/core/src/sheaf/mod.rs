//! Filtered homogeneous bundles on F and their cohomology on F and on the divisor M.
//!
//! A bundle is modelled by the line-bundle factors of a filtration. Cohomology is
//! reported as `Determined` only when degree bookkeeping leaves no room for a
//! spectral-sequence differential.

pub mod expr;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bwb::{canonical, CohomologyProfile, FlagVariety, LineClass};
use crate::lie::LieError;
pub use expr::{parse_expr, parse_lin, Builtin, Expr, ParseError};

/// A bundle given by its filtration factors (subobject first) and a homological shift.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BundleRepr", into = "BundleRepr")]
pub struct FilteredBundle {
    expr: Expr,
    factors: Vec<LineClass>,
    shift: i32,
}

impl FilteredBundle {
    pub fn from_expr(expr: Expr) -> Self {
        let factors = expr.factors();
        FilteredBundle {
            expr,
            factors,
            shift: 0,
        }
    }

    pub fn parse(src: &str) -> Result<Self, ParseError> {
        parse_expr(src).map(Self::from_expr)
    }

    pub fn line(c: LineClass) -> Self {
        Self::from_expr(Expr::Line(c))
    }

    pub fn builtin(b: Builtin) -> Self {
        Self::from_expr(Expr::Named(b))
    }

    pub fn u() -> Self {
        Self::builtin(Builtin::U)
    }

    pub fn ud() -> Self {
        Self::builtin(Builtin::Ud)
    }

    pub fn k() -> Self {
        Self::builtin(Builtin::K)
    }

    pub fn kd() -> Self {
        Self::builtin(Builtin::Kd)
    }

    pub fn sprime() -> Self {
        Self::builtin(Builtin::Sprime)
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn name(&self) -> String {
        self.expr.to_string()
    }

    pub fn factors(&self) -> &[LineClass] {
        &self.factors
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn det(&self) -> LineClass {
        self.factors.iter().fold(LineClass::ZERO, |acc, &c| acc + c)
    }

    /// The same bundle placed `by` steps further in homological degree, i.e. `V[by]`.
    pub fn shifted(&self, by: i32) -> Self {
        FilteredBundle {
            shift: self.shift + by,
            ..self.clone()
        }
    }

    pub fn twist(&self, c: LineClass) -> Self {
        FilteredBundle {
            expr: self.expr.clone().twisted(c),
            factors: self.factors.iter().map(|&f| f + c).collect(),
            shift: self.shift,
        }
    }

    pub fn dual(&self) -> Self {
        FilteredBundle {
            expr: self.expr.clone().dual(),
            factors: self.factors.iter().rev().map(|&f| -f).collect(),
            shift: -self.shift,
        }
    }

    /// Raw tensor product: every pairwise sum of factors, no cancellation.
    pub fn tensor(&self, other: &FilteredBundle) -> Self {
        let factors = self
            .factors
            .iter()
            .flat_map(|&a| other.factors.iter().map(move |&b| a + b))
            .collect();
        FilteredBundle {
            expr: self.expr.clone().tensor(other.expr.clone()),
            factors,
            shift: self.shift + other.shift,
        }
    }

    /// `Hom(self, other)` as a bundle: `dual(self) ⊗ other`.
    pub fn hom(&self, other: &FilteredBundle) -> Self {
        self.dual().tensor(other)
    }

    /// Factor multiset and shift agree.
    pub fn same_model(&self, other: &FilteredBundle) -> bool {
        let mut a = self.factors.clone();
        let mut b = other.factors.clone();
        a.sort();
        b.sort();
        a == b && self.shift == other.shift
    }
}

/// Serialized form: the expression text and the shift.
#[derive(Serialize, Deserialize)]
struct BundleRepr {
    expr: String,
    #[serde(default)]
    shift: i32,
}

impl From<FilteredBundle> for BundleRepr {
    fn from(b: FilteredBundle) -> Self {
        BundleRepr {
            expr: b.expr.to_string(),
            shift: b.shift,
        }
    }
}

impl TryFrom<BundleRepr> for FilteredBundle {
    type Error = ParseError;

    fn try_from(r: BundleRepr) -> Result<Self, ParseError> {
        Ok(FilteredBundle::parse(&r.expr)?.shifted(r.shift))
    }
}

impl fmt::Display for FilteredBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.shift {
            0 => write!(f, "{}", self.expr),
            s => write!(f, "{}[{s}]", self.expr),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Determinacy {
    Determined,
    Ambiguous,
}

impl fmt::Display for Determinacy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Determinacy::Determined => write!(f, "Determined"),
            Determinacy::Ambiguous => write!(f, "Ambiguous"),
        }
    }
}

/// Outcome of the degree bookkeeping behind a cohomology computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterminacyReport {
    pub status: Determinacy,
    /// Maximal cancellation between adjacent degrees; equals `upper` when determined.
    pub lower: CohomologyProfile,
    /// Degreewise sum of the pieces.
    pub upper: CohomologyProfile,
    /// Human-readable descriptions of the pieces that could interact.
    pub conflicts: Vec<String>,
}

impl DeterminacyReport {
    pub fn determined(profile: CohomologyProfile) -> Self {
        DeterminacyReport {
            status: Determinacy::Determined,
            lower: profile.clone(),
            upper: profile,
            conflicts: Vec::new(),
        }
    }

    pub fn is_determined(&self) -> bool {
        self.status == Determinacy::Determined
    }
}

/// Combines the cohomology of filtration pieces. Two distinct pieces with nonzero
/// cohomology in adjacent degrees could be joined by a differential.
pub fn combine_pieces(
    pieces: &[(String, CohomologyProfile)],
) -> (CohomologyProfile, DeterminacyReport) {
    let mut upper = CohomologyProfile::acyclic();
    for (_, p) in pieces {
        upper = upper.add(p);
    }
    let mut conflicts = Vec::new();
    for (i, (ni, pi)) in pieces.iter().enumerate() {
        for (j, (nj, pj)) in pieces.iter().enumerate() {
            if i == j {
                continue;
            }
            for d in pi.degrees() {
                if pj.get(d + 1) > 0 {
                    conflicts.push(format!(
                        "{ni} in degree {d} against {nj} in degree {}",
                        d + 1
                    ));
                }
            }
        }
    }
    if conflicts.is_empty() {
        let report = DeterminacyReport::determined(upper.clone());
        return (upper, report);
    }
    let lower = cancel_adjacent(&upper);
    let report = DeterminacyReport {
        status: Determinacy::Ambiguous,
        lower,
        upper: upper.clone(),
        conflicts,
    };
    (upper, report)
}

/// Greedy cancellation from the lowest degree up; preserves the Euler characteristic.
fn cancel_adjacent(profile: &CohomologyProfile) -> CohomologyProfile {
    let mut out = profile.clone();
    let degrees: Vec<i32> = profile.degrees().collect();
    for d in degrees {
        let c = out.get(d).min(out.get(d + 1));
        out.sub_at(d, c);
        out.sub_at(d + 1, c);
    }
    out
}

/// Koszul restriction to M from `H(V(−h−H))` and `H(V)`.
///
/// The long exact sequence `H^d(V(−M)) → H^d(V) → H^d(V|M) → H^{d+1}(V(−M))` splits
/// when no degree carries both terms.
pub fn koszul_restrict(
    kernel: &(CohomologyProfile, DeterminacyReport),
    ambient: &(CohomologyProfile, DeterminacyReport),
) -> (CohomologyProfile, DeterminacyReport) {
    let (kp, kr) = kernel;
    let (ap, ar) = ambient;
    let assemble = |k: &CohomologyProfile, a: &CohomologyProfile| a.add(&k.shift_degrees(-1));
    let upper = assemble(&kr.upper, &ar.upper);
    let mut conflicts = Vec::new();
    if !kr.is_determined() {
        conflicts.push("twisted term V(-h-H) is ambiguous on F".to_string());
    }
    if !ar.is_determined() {
        conflicts.push("term V is ambiguous on F".to_string());
    }
    for d in kp.degrees() {
        if ap.get(d) > 0 {
            conflicts.push(format!("both terms nonzero in degree {d}"));
        }
    }
    if conflicts.is_empty() {
        let profile = assemble(kp, ap);
        return (profile.clone(), DeterminacyReport::determined(profile));
    }
    let mut lower = assemble(&kr.lower, &ar.lower);
    for d in kr.lower.degrees() {
        let c = kr.lower.get(d).min(ar.lower.get(d));
        lower.sub_at(d - 1, c);
        lower.sub_at(d, c);
    }
    let report = DeterminacyReport {
        status: Determinacy::Ambiguous,
        lower,
        upper: upper.clone(),
        conflicts,
    };
    (upper, report)
}

/// Rank-2 projective bundle pushforward of a line bundle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PushforwardResult {
    Zero,
    Object {
        rank: u64,
        det: LineClass,
        shift: i32,
        description: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fibration {
    /// `π: F → Q`, fiber coordinate `b`.
    Pi,
    /// `ρ: F → G`, fiber coordinate `a`.
    Rho,
}

/// Cohomology and Euler characteristics of filtered bundles on F and M.
#[derive(Debug, Clone, Default)]
pub struct SheafCalc {
    flag: FlagVariety,
}

impl SheafCalc {
    pub fn new(flag: FlagVariety) -> Self {
        SheafCalc { flag }
    }

    pub fn flag(&self) -> &FlagVariety {
        &self.flag
    }

    /// `H^•(F, V)`, combining the factors' Borel–Weil–Bott profiles.
    pub fn cohomology_f(
        &self,
        v: &FilteredBundle,
    ) -> Result<(CohomologyProfile, DeterminacyReport), LieError> {
        let mut pieces = Vec::new();
        for &c in v.factors() {
            let p = self.flag.line_cohomology(c)?;
            if !p.is_acyclic() {
                pieces.push((format!("O({c})"), p));
            }
        }
        let (p, mut r) = combine_pieces(&pieces);
        Ok(shift_result(&mut r, p, v.shift()))
    }

    /// `H^•(M, V|M)` via the two-term Koszul complex `V(−h−H) → V`.
    pub fn cohomology_m(
        &self,
        v: &FilteredBundle,
    ) -> Result<(CohomologyProfile, DeterminacyReport), LieError> {
        let kernel = self.cohomology_f(&v.twist(canonical::K_M))?;
        let ambient = self.cohomology_f(v)?;
        Ok(koszul_restrict(&kernel, &ambient))
    }

    pub fn ext_f(
        &self,
        a: &FilteredBundle,
        b: &FilteredBundle,
    ) -> Result<(CohomologyProfile, DeterminacyReport), LieError> {
        self.cohomology_f(&a.hom(b))
    }

    pub fn ext_m(
        &self,
        a: &FilteredBundle,
        b: &FilteredBundle,
    ) -> Result<(CohomologyProfile, DeterminacyReport), LieError> {
        self.cohomology_m(&a.hom(b))
    }

    pub fn euler_f(&self, v: &FilteredBundle) -> Result<i128, LieError> {
        let mut total = 0i128;
        for &c in v.factors() {
            total += self.flag.euler_line(c)?;
        }
        Ok(if v.shift().rem_euclid(2) == 0 {
            total
        } else {
            -total
        })
    }

    pub fn euler_m(&self, v: &FilteredBundle) -> Result<i128, LieError> {
        Ok(self.euler_f(v)? - self.euler_f(&v.twist(canonical::K_M))?)
    }

    /// `χ(A, B) = Σ (−1)^i dim Ext^i_M(A, B)`.
    pub fn euler_pairing_m(
        &self,
        a: &FilteredBundle,
        b: &FilteredBundle,
    ) -> Result<i128, LieError> {
        self.euler_m(&a.hom(b))
    }
}

fn shift_result(
    r: &mut DeterminacyReport,
    p: CohomologyProfile,
    shift: i32,
) -> (CohomologyProfile, DeterminacyReport) {
    // H^d(V[s]) = H^{d+s}(V)
    r.lower = r.lower.shift_degrees(-shift);
    r.upper = r.upper.shift_degrees(-shift);
    (p.shift_degrees(-shift), r.clone())
}

fn sym_det_coeff(n: i64) -> i64 {
    n * (n + 1) / 2
}

/// Pushforward of `O(c)` along `π` or `ρ`.
pub fn pushforward_line(direction: Fibration, c: LineClass) -> PushforwardResult {
    // (fiber, base, det of the dual tautological bundle, base unit, names)
    let (fiber, base, det_dual, unit, sub, dual_name) = match direction {
        Fibration::Pi => (
            c.b,
            c.a,
            LineClass::new(3, 0),
            LineClass::H_SMALL,
            "K",
            "Kd",
        ),
        Fibration::Rho => (c.a, c.b, LineClass::new(0, 1), LineClass::H_BIG, "U", "Ud"),
    };
    let base_twist = unit.checked_scale(base).expect("line class overflow");
    let suffix = if base == 0 {
        String::new()
    } else {
        format!("({base_twist})")
    };
    if fiber == -1 {
        return PushforwardResult::Zero;
    }
    if fiber >= 0 {
        let n = fiber;
        let det = det_dual.checked_scale(sym_det_coeff(n)).expect("overflow")
            + base_twist.checked_scale(n + 1).expect("overflow");
        let core = match n {
            0 => "O".to_string(),
            1 => dual_name.to_string(),
            _ => format!("Sym^{n} {dual_name}"),
        };
        let description = if n == 0 && base != 0 {
            format!("O({base_twist})")
        } else {
            format!("{core}{suffix}")
        };
        return PushforwardResult::Object {
            rank: (n + 1) as u64,
            det,
            shift: 0,
            description,
        };
    }
    let n = -fiber - 2;
    let det_sub = -det_dual;
    let det = det_sub
        .checked_scale(sym_det_coeff(n) + n + 1)
        .expect("overflow")
        + base_twist.checked_scale(n + 1).expect("overflow");
    let core = match n {
        0 => format!("det({sub})"),
        1 => format!("{sub} * det({sub})"),
        _ => format!("Sym^{n} {sub} * det({sub})"),
    };
    PushforwardResult::Object {
        rank: (n + 1) as u64,
        det,
        shift: 1,
        description: format!("{core}{suffix}[-1]"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lc(a: i64, b: i64) -> LineClass {
        LineClass::new(a, b)
    }

    fn calc() -> SheafCalc {
        SheafCalc::default()
    }

    fn p(pairs: &[(i32, u64)]) -> CohomologyProfile {
        CohomologyProfile::from_pairs(pairs.iter().copied())
    }

    #[test]
    fn builtin_bookkeeping() {
        assert_eq!(FilteredBundle::u().det(), lc(0, -1));
        assert_eq!(FilteredBundle::k().det(), lc(-3, 0));
        assert_eq!(
            FilteredBundle::u().dual().factors(),
            FilteredBundle::ud().factors()
        );
        assert_eq!(
            FilteredBundle::kd().dual().factors(),
            FilteredBundle::k().factors()
        );
        assert!(FilteredBundle::u().same_model(&FilteredBundle::ud().twist(lc(0, -1))));
        assert!(FilteredBundle::kd().same_model(&FilteredBundle::k().twist(lc(3, 0))));
        let s = FilteredBundle::sprime();
        assert_eq!(s.rank(), 4);
        assert_eq!(
            s.det(),
            FilteredBundle::u().det() + FilteredBundle::ud().twist(lc(-1, 0)).det()
        );
    }

    #[test]
    fn twist_dual_tensor() {
        let udh = FilteredBundle::ud().twist(lc(-1, 0));
        assert_eq!(udh.factors(), &[lc(-2, 1), lc(0, 0)]);
        let v = FilteredBundle::sprime();
        assert_eq!(v.twist(LineClass::ZERO), v);
        assert_eq!(v.twist(lc(2, -3)).twist(lc(-2, 3)).factors(), v.factors());
        assert_eq!(v.dual().dual().factors(), v.factors());
        assert_eq!(v.dual().det(), -v.det());
        let uu = FilteredBundle::u().tensor(&FilteredBundle::u().twist(lc(1, 0)));
        let mut f = uu.factors().to_vec();
        f.sort();
        assert_eq!(f, vec![lc(-1, 0), lc(1, -1), lc(1, -1), lc(3, -2)]);
        assert_eq!(
            v.tensor(&FilteredBundle::line(LineClass::ZERO)).factors(),
            v.factors()
        );
        assert_eq!(v.tensor(&uu).rank(), 16);
    }

    #[test]
    fn cohomology_on_f() {
        let c = calc();
        let uh = FilteredBundle::u().twist(lc(1, 0));
        assert_eq!(
            c.cohomology_f(&uh).unwrap(),
            (p(&[(0, 1)]), DeterminacyReport::determined(p(&[(0, 1)])))
        );
        let uu = FilteredBundle::u().tensor(&uh);
        let (prof, rep) = c.cohomology_f(&uu).unwrap();
        assert_eq!(prof, p(&[(1, 1)]));
        assert!(rep.is_determined());
        let (prof, rep) = c
            .cohomology_f(&FilteredBundle::line(LineClass::ZERO))
            .unwrap();
        assert_eq!(prof, p(&[(0, 1)]));
        assert!(rep.is_determined());
    }

    #[test]
    fn cohomology_on_m() {
        let c = calc();
        let uh = FilteredBundle::u().twist(lc(1, 0));
        let (prof, rep) = c.cohomology_m(&uh).unwrap();
        assert_eq!(prof, p(&[(0, 1)]));
        assert!(rep.is_determined());
        for l in [lc(1, -1), lc(3, -1)] {
            let (prof, rep) = c.cohomology_m(&FilteredBundle::line(l)).unwrap();
            assert!(prof.is_acyclic() && rep.is_determined(), "{l}");
        }
    }

    #[test]
    fn ext_on_m() {
        let c = calc();
        let udh = FilteredBundle::ud().twist(lc(-1, 0));
        let (prof, rep) = c.ext_m(&udh, &FilteredBundle::u()).unwrap();
        assert_eq!(prof, p(&[(1, 1)]));
        assert!(rep.is_determined());
        let (prof, rep) = c
            .ext_m(&udh, &FilteredBundle::line(LineClass::ZERO))
            .unwrap();
        assert_eq!(prof, p(&[(0, 1)]));
        assert!(rep.is_determined());
        let o1 = FilteredBundle::line(lc(1, 0));
        let (prof, rep) = c.ext_m(&o1, &o1).unwrap();
        assert_eq!(prof, p(&[(0, 1)]));
        assert!(rep.is_determined());
    }

    #[test]
    fn shifts_move_ext_degrees() {
        let c = calc();
        let o = FilteredBundle::line(LineClass::ZERO);
        let (prof, _) = c.ext_m(&o, &o.shifted(1)).unwrap();
        assert_eq!(prof, p(&[(-1, 1)]));
        let (prof, _) = c.ext_m(&o.shifted(1), &o).unwrap();
        assert_eq!(prof, p(&[(1, 1)]));
        assert_eq!(c.euler_pairing_m(&o, &o.shifted(1)).unwrap(), -1);
    }

    #[test]
    fn euler_values() {
        let c = calc();
        assert_eq!(
            c.euler_m(&FilteredBundle::line(LineClass::ZERO)).unwrap(),
            1
        );
        assert_eq!(c.euler_m(&FilteredBundle::line(lc(1, 0))).unwrap(), 7);
        let o = FilteredBundle::line(LineClass::ZERO);
        assert_eq!(
            c.euler_pairing_m(&FilteredBundle::line(lc(1, 0)), &o)
                .unwrap(),
            0
        );
    }

    #[test]
    fn ambiguous_reports_bounds() {
        let c = calc();
        let end_u = FilteredBundle::u().hom(&FilteredBundle::u());
        let (prof, rep) = c.cohomology_f(&end_u).unwrap();
        assert_eq!(rep.status, Determinacy::Ambiguous);
        assert_eq!(rep.upper, prof);
        assert_eq!(rep.lower.euler(), prof.euler());
        assert!(!rep.conflicts.is_empty());
    }

    #[test]
    fn pushforwards() {
        let kd = pushforward_line(Fibration::Pi, lc(0, 1));
        assert_eq!(
            kd,
            PushforwardResult::Object {
                rank: 2,
                det: lc(3, 0),
                shift: 0,
                description: "Kd".into()
            }
        );
        assert_eq!(
            pushforward_line(Fibration::Pi, lc(0, -1)),
            PushforwardResult::Zero
        );
        let PushforwardResult::Object {
            rank, det, shift, ..
        } = pushforward_line(Fibration::Pi, lc(0, -2))
        else {
            panic!("nonzero expected")
        };
        assert_eq!((rank, det, shift), (1, lc(-3, 0), 1));
        let PushforwardResult::Object {
            rank,
            det,
            description,
            ..
        } = pushforward_line(Fibration::Rho, lc(1, 0))
        else {
            panic!("nonzero expected")
        };
        assert_eq!((rank, det, description.as_str()), (2, lc(0, 1), "Ud"));
        assert_eq!(
            pushforward_line(Fibration::Rho, lc(-1, 5)),
            PushforwardResult::Zero
        );
        let PushforwardResult::Object { det, shift, .. } =
            pushforward_line(Fibration::Rho, lc(-2, 0))
        else {
            panic!("nonzero expected")
        };
        assert_eq!((det, shift), (lc(0, -1), 1));
    }
}
