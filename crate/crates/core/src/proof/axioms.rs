//! Cited facts and the logged fallback used when factor-level bookkeeping is ambiguous.
//!
//! The fallback has two parts. Bundles that are pullbacks along `ρ` (or `π`) twisted
//! by a relative class are split into blocks `Ud^m(kH) ⊗ O(th)`; each block is pushed
//! forward to the base and looked up in the exceptional collection on `G`. Objects
//! produced by mutations are handled through the pieces they were built from.

use crate::bwb::{canonical, CohomologyProfile, LineClass};
use crate::lie::LieError;
use crate::mutation::{direct_ext, CollectionObject, ExtEvidence, ExtResolver, Justification};
use crate::sheaf::{
    combine_pieces, koszul_restrict, Builtin, DeterminacyReport, Expr, FilteredBundle, SheafCalc,
};

/// Which projection a block presentation is relative to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Base {
    /// Blocks `Ud^m(kH)(th)`.
    Grassmannian,
    /// Blocks `Kd^m(kh)(sH)`.
    Quadric,
}

/// `dual^m ⊗ O(k·base) ⊗ O(t·fiber)` for the tautological bundle of `base`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block {
    pub m: i64,
    pub k: i64,
    pub t: i64,
}

impl Block {
    fn add(self, o: Block) -> Block {
        Block {
            m: self.m + o.m,
            k: self.k + o.k,
            t: self.t + o.t,
        }
    }

    fn describe(self, base: Base) -> String {
        let (taut, unit, fiber) = match base {
            Base::Grassmannian => ("Ud", (0, 1), (1, 0)),
            Base::Quadric => ("Kd", (1, 0), (0, 1)),
        };
        let twist = LineClass::new(
            unit.0 * self.k + fiber.0 * self.t,
            unit.1 * self.k + fiber.1 * self.t,
        );
        let core = match self.m {
            0 => "O".to_string(),
            1 => taut.to_string(),
            m => format!("{taut}^{m}"),
        };
        if twist == LineClass::ZERO {
            core
        } else {
            format!("{core}({twist})")
        }
    }

    fn bundle(self, base: Base) -> FilteredBundle {
        let (taut, twist) = match base {
            Base::Grassmannian => (Builtin::Ud, LineClass::new(self.t, self.k)),
            Base::Quadric => (Builtin::Kd, LineClass::new(self.k, self.t)),
        };
        let mut e = Expr::Line(LineClass::ZERO);
        for _ in 0..self.m {
            e = e.tensor(Expr::Named(taut));
        }
        FilteredBundle::from_expr(e.twisted(twist))
    }
}

/// Block presentation of an expression, when every piece is a pullback twisted by a relative class.
pub fn blocks(expr: &Expr, base: Base) -> Option<Vec<Block>> {
    let b = |m, k, t| Block { m, k, t };
    Some(match expr {
        Expr::Line(c) => match base {
            Base::Grassmannian => vec![b(0, c.b, c.a)],
            Base::Quadric => vec![b(0, c.a, c.b)],
        },
        Expr::Named(n) => match (base, n) {
            (Base::Grassmannian, Builtin::U) => vec![b(1, -1, 0)],
            (Base::Grassmannian, Builtin::Ud) => vec![b(1, 0, 0)],
            (Base::Grassmannian, Builtin::Sprime) => vec![b(1, -1, 0), b(1, 0, -1)],
            (Base::Quadric, Builtin::K) => vec![b(1, -3, 0)],
            (Base::Quadric, Builtin::Kd) => vec![b(1, 0, 0)],
            (Base::Quadric, Builtin::Sprime) => vec![b(0, -1, 0), b(1, -2, 0), b(0, 0, 0)],
            _ => return None,
        },
        Expr::Dual(inner) => {
            // Ud^∨ = Ud(−H) and Kd^∨ = Kd(−3h).
            let det = match base {
                Base::Grassmannian => 1,
                Base::Quadric => 3,
            };
            blocks(inner, base)?
                .into_iter()
                .map(|x| b(x.m, -x.k - det * x.m, -x.t))
                .collect()
        }
        Expr::Twist(inner, c) => {
            let (dk, dt) = match base {
                Base::Grassmannian => (c.b, c.a),
                Base::Quadric => (c.a, c.b),
            };
            blocks(inner, base)?
                .into_iter()
                .map(|x| b(x.m, x.k + dk, x.t + dt))
                .collect()
        }
        Expr::Tensor(parts) => {
            let mut acc = vec![b(0, 0, 0)];
            for p in parts {
                let pb = blocks(p, base)?;
                acc = acc
                    .iter()
                    .flat_map(|x| pb.iter().map(move |y| x.add(*y)))
                    .collect();
            }
            acc
        }
    })
}

/// The exceptional collection on `G`, each member written as `Ud^e(jH)`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct AxiomTable {
    pub grassmannian: Vec<(i64, i64)>,
}

impl Default for AxiomTable {
    fn default() -> Self {
        // O(−H), U = Ud(−H), O, Ud, O(H), Ud(H)
        AxiomTable {
            grassmannian: vec![(0, -1), (1, -1), (0, 0), (1, 0), (0, 1), (1, 1)],
        }
    }
}

impl AxiomTable {
    fn member_name(e: i64, j: i64) -> String {
        Block { m: e, k: j, t: 0 }.describe(Base::Grassmannian)
    }

    /// `H^•(G, Ud^m(kH))` when it equals `Hom(A, B)` for members `A`, `B` of the collection.
    pub fn lookup(&self, m: i64, k: i64) -> Option<(CohomologyProfile, String)> {
        let g = &self.grassmannian;
        for (ia, &(ea, ja)) in g.iter().enumerate() {
            for (ib, &(eb, jb)) in g.iter().enumerate() {
                // A^∨ ⊗ B = Ud^{ea+eb}((jb − ja − ea)H)
                if ea + eb != m || jb - ja - ea != k || ia < ib {
                    continue;
                }
                let a = Self::member_name(ea, ja);
                let b = Self::member_name(eb, jb);
                let profile = if ia == ib {
                    CohomologyProfile::single(0, 1)
                } else {
                    CohomologyProfile::acyclic()
                };
                let why = if ia == ib {
                    "exceptional"
                } else {
                    "semiorthogonal"
                };
                return Some((
                    profile,
                    format!("Ext(G; {a}, {b}) from the collection on G ({why})"),
                ));
            }
        }
        None
    }
}

type Resolved = Option<(CohomologyProfile, Vec<String>)>;

/// Direct computation first, then the cited facts; every fallback use is logged in `detail`.
#[derive(Debug, Clone, Default)]
pub struct AxiomResolver {
    calc: SheafCalc,
    table: AxiomTable,
}

const MAX_DEPTH: usize = 4;

impl AxiomResolver {
    pub fn new(calc: SheafCalc, table: AxiomTable) -> Self {
        AxiomResolver { calc, table }
    }

    pub fn table(&self) -> &AxiomTable {
        &self.table
    }

    fn determined(r: &(CohomologyProfile, DeterminacyReport)) -> Option<CohomologyProfile> {
        r.1.is_determined().then(|| r.0.clone())
    }

    /// `H^•(F, block)`.
    fn block_on_f(&self, blk: Block, base: Base) -> Result<Resolved, LieError> {
        let direct = self.calc.cohomology_f(&blk.bundle(base))?;
        if let Some(p) = Self::determined(&direct) {
            return Ok(Some((p, Vec::new())));
        }
        let name = blk.describe(base);
        match base {
            Base::Grassmannian => {
                // ρ_*O(th) for t in −3..=1
                let (m, k, shift, rule) = match blk.t {
                    -1 => {
                        return Ok(Some((
                            CohomologyProfile::acyclic(),
                            vec![format!("{name}: rho_* O(-h) = 0")],
                        )))
                    }
                    0 => (blk.m, blk.k, 0, "rho_* O = O"),
                    1 => (blk.m + 1, blk.k, 0, "rho_* O(h) = Ud"),
                    -2 => (blk.m, blk.k - 1, 1, "rho_* O(-2h) = det U[-1]"),
                    -3 => (blk.m + 1, blk.k - 2, 1, "rho_* O(-3h) = U(-H)[-1]"),
                    _ => return Ok(None),
                };
                let base_blk = Block { m, k, t: 0 };
                let on_base = self.calc.cohomology_f(&base_blk.bundle(base))?;
                let mut detail = vec![format!("{name}: {rule}, base {}", base_blk.describe(base))];
                let profile = match Self::determined(&on_base) {
                    Some(p) => p,
                    None => match self.table.lookup(m, k) {
                        Some((p, why)) => {
                            detail.push(why);
                            p
                        }
                        None => return Ok(None),
                    },
                };
                Ok(Some((profile.shift_degrees(shift), detail)))
            }
            Base::Quadric => {
                let (k, shift, rule) = match blk.t {
                    -1 => {
                        return Ok(Some((
                            CohomologyProfile::acyclic(),
                            vec![format!("{name}: pi_* O(-H) = 0")],
                        )))
                    }
                    0 => (blk.k, 0, "pi_* O = O"),
                    -2 => (blk.k - 3, 1, "pi_* O(-2H) = det K[-1]"),
                    _ => return Ok(None),
                };
                let base_blk = Block { m: blk.m, k, t: 0 };
                let on_base = self.calc.cohomology_f(&base_blk.bundle(base))?;
                Ok(Self::determined(&on_base).map(|p| {
                    (
                        p.shift_degrees(shift),
                        vec![format!("{name}: {rule}, base {}", base_blk.describe(base))],
                    )
                }))
            }
        }
    }

    fn blocks_on_f(
        &self,
        bl: &[Block],
        base: Base,
    ) -> Result<Option<(CohomologyProfile, DeterminacyReport, Vec<String>)>, LieError> {
        let mut pieces = Vec::new();
        let mut detail = Vec::new();
        for &blk in bl {
            let Some((p, d)) = self.block_on_f(blk, base)? else {
                return Ok(None);
            };
            detail.extend(d);
            if !p.is_acyclic() {
                pieces.push((blk.describe(base), p));
            }
        }
        let (p, r) = combine_pieces(&pieces);
        Ok(Some((p, r, detail)))
    }

    fn twist_blocks(bl: &[Block], base: Base, c: LineClass) -> Vec<Block> {
        let (dk, dt) = match base {
            Base::Grassmannian => (c.b, c.a),
            Base::Quadric => (c.a, c.b),
        };
        bl.iter()
            .map(|x| Block {
                m: x.m,
                k: x.k + dk,
                t: x.t + dt,
            })
            .collect()
    }

    /// `H^•(M, V)` through block presentations relative to `base`.
    fn on_m_via_blocks(&self, v: &FilteredBundle, base: Base) -> Result<Resolved, LieError> {
        let Some(bl) = blocks(v.expr(), base) else {
            return Ok(None);
        };
        let shift = v.shift();
        let kernel_blocks = Self::twist_blocks(&bl, base, canonical::K_M);
        // Whole bundle: both Koszul terms, then the restriction rule.
        if let (Some((kp, kr, kd)), Some((ap, ar, ad))) = (
            self.blocks_on_f(&kernel_blocks, base)?,
            self.blocks_on_f(&bl, base)?,
        ) {
            let (p, r) = koszul_restrict(&(kp, kr), &(ap, ar));
            if r.is_determined() {
                let mut detail = kd;
                detail.extend(ad);
                return Ok(Some((p.shift_degrees(-shift), detail)));
            }
        }
        // Block by block on M, then the filtration rule on M.
        let mut pieces = Vec::new();
        let mut detail = Vec::new();
        for (&blk, &kblk) in bl.iter().zip(&kernel_blocks) {
            let (Some((kp, kd)), Some((ap, ad))) =
                (self.block_on_f(kblk, base)?, self.block_on_f(blk, base)?)
            else {
                return Ok(None);
            };
            let (p, r) = koszul_restrict(
                &(kp.clone(), DeterminacyReport::determined(kp)),
                &(ap.clone(), DeterminacyReport::determined(ap)),
            );
            if !r.is_determined() {
                return Ok(None);
            }
            detail.extend(kd);
            detail.extend(ad);
            if !p.is_acyclic() {
                pieces.push((blk.describe(base), p));
            }
        }
        let (p, r) = combine_pieces(&pieces);
        Ok(r.is_determined().then(|| (p.shift_degrees(-shift), detail)))
    }

    fn via_blocks(&self, a: &CollectionObject, b: &CollectionObject) -> Result<Resolved, LieError> {
        let hom = a.model.hom(&b.model);
        for base in [Base::Grassmannian, Base::Quadric] {
            if let Some((p, mut detail)) = self.on_m_via_blocks(&hom, base)? {
                let label = match base {
                    Base::Grassmannian => "pushforward to G",
                    Base::Quadric => "pushforward to Q",
                };
                detail.insert(0, format!("Ext({a}, {b}) by {label}"));
                return Ok(Some((p, detail)));
            }
        }
        Ok(None)
    }

    fn vanishes(
        &self,
        a: &CollectionObject,
        b: &CollectionObject,
        depth: usize,
    ) -> Result<Option<Vec<String>>, LieError> {
        Ok(match self.resolve(a, b, depth)? {
            Some((p, d)) if p.is_acyclic() => Some(d),
            _ => None,
        })
    }

    fn via_provenance(
        &self,
        a: &CollectionObject,
        b: &CollectionObject,
        depth: usize,
    ) -> Result<Resolved, LieError> {
        if a.same_as(b) && a.pieces().is_some() {
            return Ok(Some((
                CohomologyProfile::single(0, 1),
                vec![format!(
                    "{a} is a mutation of an exceptional pair, hence exceptional"
                )],
            )));
        }
        if let crate::mutation::Provenance::LeftMutation { through, .. } = &b.provenance {
            if a.same_as(through) {
                return Ok(Some((
                    CohomologyProfile::acyclic(),
                    vec![format!("Ext({a}, L_{a}(-)) = 0")],
                )));
            }
        }
        if let crate::mutation::Provenance::RightMutation { through, .. } = &a.provenance {
            if b.same_as(through) {
                return Ok(Some((
                    CohomologyProfile::acyclic(),
                    vec![format!("Ext(R_{b}(-), {b}) = 0")],
                )));
            }
        }
        if depth >= MAX_DEPTH {
            return Ok(None);
        }
        if let Some(pieces) = a.pieces() {
            let mut detail = vec![format!("{a} is built from {} and {}", pieces[0], pieces[1])];
            let mut all = true;
            for p in pieces {
                match self.vanishes(p, b, depth + 1)? {
                    Some(d) => detail.extend(d),
                    None => all = false,
                }
            }
            if all {
                return Ok(Some((CohomologyProfile::acyclic(), detail)));
            }
        }
        if let Some(pieces) = b.pieces() {
            let mut detail = vec![format!("{b} is built from {} and {}", pieces[0], pieces[1])];
            let mut all = true;
            for p in pieces {
                match self.vanishes(a, p, depth + 1)? {
                    Some(d) => detail.extend(d),
                    None => all = false,
                }
            }
            if all {
                return Ok(Some((CohomologyProfile::acyclic(), detail)));
            }
        }
        Ok(None)
    }

    fn resolve(
        &self,
        a: &CollectionObject,
        b: &CollectionObject,
        depth: usize,
    ) -> Result<Resolved, LieError> {
        let direct = self.calc.ext_m(&a.model, &b.model)?;
        if let Some(p) = Self::determined(&direct) {
            return Ok(Some((p, vec![format!("Ext({a}, {b}) direct")])));
        }
        if let Some(r) = self.via_blocks(a, b)? {
            return Ok(Some(r));
        }
        self.via_provenance(a, b, depth)
    }
}

impl ExtResolver for AxiomResolver {
    fn calc(&self) -> &SheafCalc {
        &self.calc
    }

    fn ext(&self, a: &CollectionObject, b: &CollectionObject) -> Result<ExtEvidence, LieError> {
        let direct = direct_ext(&self.calc, a, b)?;
        if direct.profile.is_some() {
            return Ok(direct);
        }
        let resolved = match self.via_blocks(a, b)? {
            Some(r) => Some(r),
            None => self.via_provenance(a, b, 0)?,
        };
        Ok(match resolved {
            Some((p, detail)) => {
                log::debug!("fallback decided Ext({a}, {b}) = {p}");
                ExtEvidence {
                    profile: Some(p),
                    justification: Justification::Axiom,
                    detail,
                    direct: direct.direct,
                }
            }
            None => direct,
        })
    }
}
