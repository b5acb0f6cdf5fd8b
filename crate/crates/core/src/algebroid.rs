//! Lie algebroids over a polynomial coordinate chart.
//!
//! An algebroid of rank `r` over `Q[x1..xn]` is given by its anchor
//! components `rho[a][i]` (coefficient of `d/dx_i` in `rho(e_a)`) and its
//! structure functions `c[a][b][c]` with `[e_a, e_b] = sum_c c[a][b][c] e_c`.
//! Brackets of general sections follow from the Leibniz rule.
//!
//! All frame and variable indices in this API are 0-based.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalars::{Poly, Rational};

/// A section of a rank-`m` bundle: one polynomial coefficient per frame
/// element.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Section(Vec<Poly>);

impl Section {
    pub fn new(coeffs: Vec<Poly>) -> Self {
        Section(coeffs)
    }

    pub fn zero(rank: usize, nvars: usize) -> Self {
        Section(vec![Poly::zero(nvars); rank])
    }

    /// The `i`-th frame section `e_i`.
    pub fn basis(i: usize, rank: usize, nvars: usize) -> Self {
        let mut s = Self::zero(rank, nvars);
        s.0[i] = Poly::one(nvars);
        s
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> &Poly {
        &self.0[i]
    }

    pub fn into_coeffs(self) -> Vec<Poly> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Poly::is_zero)
    }

    /// Pointwise product with a function.
    pub fn scale(&self, f: &Poly) -> Section {
        Section(self.0.iter().map(|c| c * f).collect())
    }

    pub fn scale_rat(&self, c: &Rational) -> Section {
        Section(self.0.iter().map(|p| p.scale(c)).collect())
    }

    /// `self += f * other`.
    pub fn add_scaled(&mut self, f: &Poly, other: &Section) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            if !b.is_zero() {
                *a += &(f * b);
            }
        }
    }

    pub fn add_assign(&mut self, other: &Section) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    pub fn sub_assign(&mut self, other: &Section) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a -= b;
        }
    }
}

impl Add<&Section> for &Section {
    type Output = Section;
    fn add(self, rhs: &Section) -> Section {
        assert_eq!(self.rank(), rhs.rank(), "section rank mismatch");
        Section(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&Section> for &Section {
    type Output = Section;
    fn sub(self, rhs: &Section) -> Section {
        assert_eq!(self.rank(), rhs.rank(), "section rank mismatch");
        Section(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Section {
    type Output = Section;
    fn neg(self) -> Section {
        Section(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Section{self}")
    }
}

/// An auxiliary vector bundle `E` over the same base, trivialised by a frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VectorBundle {
    rank: usize,
}

impl VectorBundle {
    pub fn new(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Invalid(
                "vector bundle rank must be at least 1".into(),
            ));
        }
        Ok(VectorBundle { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// Where a form (or connection) takes its values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    /// The trivial line bundle `M x R`.
    Scalar,
    /// The algebroid `A` itself.
    Algebroid,
    Bundle(VectorBundle),
}

impl Target {
    /// Fiber dimension, given the algebroid rank.
    pub fn rank(&self, algebroid_rank: usize) -> usize {
        match self {
            Target::Scalar => 1,
            Target::Algebroid => algebroid_rank,
            Target::Bundle(b) => b.rank(),
        }
    }

    pub fn bundle(rank: usize) -> Result<Target> {
        Ok(Target::Bundle(VectorBundle::new(rank)?))
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Scalar => write!(f, "scalar"),
            Target::Algebroid => write!(f, "A"),
            Target::Bundle(b) => write!(f, "E{}", b.rank()),
        }
    }
}

/// A Lie algebroid given by anchor and structure functions over a frame.
#[derive(Clone, PartialEq, Eq)]
pub struct Algebroid {
    nvars: usize,
    rank: usize,
    anchor: Vec<Vec<Poly>>,
    /// Dense `rank^3` table, antisymmetric in the first two slots.
    structure: Vec<Poly>,
}

/// One structure-function entry `c_{ab}^c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureEntry {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub value: Poly,
}

impl Algebroid {
    /// Assembles an algebroid from raw tables. Entries with `a > b` are
    /// stored as the negated `(b, a)` entry; repeated pairs accumulate.
    /// No Lie-axiom validation happens here, see [`Algebroid::validate`].
    pub fn new(
        nvars: usize,
        rank: usize,
        anchor: Vec<Vec<Poly>>,
        structure: impl IntoIterator<Item = StructureEntry>,
    ) -> Result<Self> {
        if anchor.len() != rank {
            return Err(Error::LengthMismatch {
                what: "anchor rows",
                expected: rank,
                found: anchor.len(),
            });
        }
        for row in &anchor {
            if row.len() != nvars {
                return Err(Error::LengthMismatch {
                    what: "anchor row",
                    expected: nvars,
                    found: row.len(),
                });
            }
            check_vars(row, nvars)?;
        }
        let mut table = vec![Poly::zero(nvars); rank * rank * rank];
        for StructureEntry { a, b, c, value } in structure {
            for (what, i) in [("structure a", a), ("structure b", b), ("structure c", c)] {
                if i >= rank {
                    return Err(Error::IndexOutOfRange {
                        what,
                        index: i,
                        bound: rank,
                    });
                }
            }
            if a == b {
                return Err(Error::Invalid(format!(
                    "structure entry with a = b = {a} (must vanish by antisymmetry)"
                )));
            }
            check_vars(std::slice::from_ref(&value), nvars)?;
            let (lo, hi, v) = if a < b { (a, b, value) } else { (b, a, -value) };
            table[(lo * rank + hi) * rank + c] += &v;
            table[(hi * rank + lo) * rank + c] -= &v;
        }
        Ok(Algebroid {
            nvars,
            rank,
            anchor,
            structure: table,
        })
    }

    /// A Lie algebra over a point: `n = 0`, zero anchor.
    pub fn lie_algebra(rank: usize, structure: &[(usize, usize, usize, Rational)]) -> Result<Self> {
        let entries = structure.iter().map(|(a, b, c, v)| StructureEntry {
            a: *a,
            b: *b,
            c: *c,
            value: Poly::constant(v.clone(), 0),
        });
        Self::new(0, rank, vec![Vec::new(); rank], entries)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `rho_a^i`: the `d/dx_i` component of `rho(e_a)`.
    pub fn anchor(&self, a: usize, i: usize) -> &Poly {
        &self.anchor[a][i]
    }

    pub fn anchor_rows(&self) -> &[Vec<Poly>] {
        &self.anchor
    }

    /// `c_{ab}^c`.
    pub fn structure(&self, a: usize, b: usize, c: usize) -> &Poly {
        &self.structure[(a * self.rank + b) * self.rank + c]
    }

    /// Nonzero `c_{ab}^c` with `a < b`.
    pub fn structure_entries(&self) -> Vec<StructureEntry> {
        let mut out = Vec::new();
        for a in 0..self.rank {
            for b in a + 1..self.rank {
                for c in 0..self.rank {
                    let v = self.structure(a, b, c);
                    if !v.is_zero() {
                        out.push(StructureEntry {
                            a,
                            b,
                            c,
                            value: v.clone(),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn zero_section(&self) -> Section {
        Section::zero(self.rank, self.nvars)
    }

    pub fn basis(&self, a: usize) -> Section {
        Section::basis(a, self.rank, self.nvars)
    }

    /// `[e_a, e_b]` as a section.
    pub fn frame_bracket(&self, a: usize, b: usize) -> Section {
        Section::new(
            (0..self.rank)
                .map(|c| self.structure(a, b, c).clone())
                .collect(),
        )
    }

    pub(crate) fn check_section(&self, x: &Section) -> Result<()> {
        if x.rank() != self.rank {
            return Err(Error::BundleMismatch(format!(
                "section has {} components, algebroid rank is {}",
                x.rank(),
                self.rank
            )));
        }
        check_vars(x.coeffs(), self.nvars)
    }

    pub(crate) fn check_poly(&self, f: &Poly) -> Result<()> {
        check_vars(std::slice::from_ref(f), self.nvars)
    }

    /// `rho(e_a) f`.
    pub fn anchor_frame(&self, a: usize, f: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (i, rho) in self.anchor[a].iter().enumerate() {
            if rho.is_zero() {
                continue;
            }
            let d = f.partial(i).expect("variable index in range");
            if !d.is_zero() {
                out += &(rho * &d);
            }
        }
        out
    }

    /// `rho(X) f = sum_a X^a sum_i rho_a^i df/dx_i`.
    pub fn anchor_apply(&self, x: &Section, f: &Poly) -> Result<Poly> {
        self.check_section(x)?;
        self.check_poly(f)?;
        let mut out = Poly::zero(self.nvars);
        for (a, xa) in x.coeffs().iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            out += &(xa * &self.anchor_frame(a, f));
        }
        Ok(out)
    }

    /// Bracket of general sections, extended from the frame by the Leibniz
    /// rule: `[X,Y]^c = sum f^a g^b c_ab^c + rho(X) g^c - rho(Y) f^c`.
    pub fn bracket(&self, x: &Section, y: &Section) -> Result<Section> {
        self.check_section(x)?;
        self.check_section(y)?;
        let mut out = self.zero_section().into_coeffs();
        for (a, xa) in x.coeffs().iter().enumerate() {
            for (b, yb) in y.coeffs().iter().enumerate() {
                if a == b || xa.is_zero() || yb.is_zero() {
                    continue;
                }
                let w = xa * yb;
                for (c, slot) in out.iter_mut().enumerate() {
                    let s = self.structure(a, b, c);
                    if !s.is_zero() {
                        *slot += &(&w * s);
                    }
                }
            }
        }
        for (c, slot) in out.iter_mut().enumerate() {
            *slot += &self.anchor_apply(x, y.coeff(c))?;
            *slot -= &self.anchor_apply(y, x.coeff(c))?;
        }
        Ok(Section::new(out))
    }

    /// Checks Jacobi on frame triples and the anchor-morphism identity on
    /// frame pairs against each coordinate function. Together with the
    /// Leibniz construction of [`Algebroid::bracket`] these imply the Lie
    /// algebroid axioms on all sections.
    pub fn validate(&self) -> ValidationReport {
        let mut jacobi = Vec::new();
        for a in 0..self.rank {
            for b in a + 1..self.rank {
                for c in b + 1..self.rank {
                    let (ea, eb, ec) = (self.basis(a), self.basis(b), self.basis(c));
                    let br = |x: &Section, y: &Section| self.bracket(x, y).expect("frame sections");
                    let mut sum = br(&br(&ea, &eb), &ec);
                    sum.add_assign(&br(&br(&eb, &ec), &ea));
                    sum.add_assign(&br(&br(&ec, &ea), &eb));
                    jacobi.push(JacobiCheck {
                        triple: (a, b, c),
                        residual: sum,
                    });
                }
            }
        }
        let mut anchor = Vec::new();
        for a in 0..self.rank {
            for b in a + 1..self.rank {
                let bracket = self.frame_bracket(a, b);
                for i in 0..self.nvars {
                    let g = Poly::var(i, self.nvars).expect("coordinate in range");
                    let lhs = self.anchor_apply(&bracket, &g).expect("frame section");
                    let rhs = &self.anchor_frame(a, &self.anchor_frame(b, &g))
                        - &self.anchor_frame(b, &self.anchor_frame(a, &g));
                    anchor.push(AnchorCheck {
                        pair: (a, b),
                        coordinate: i,
                        residual: &lhs - &rhs,
                    });
                }
            }
        }
        ValidationReport { jacobi, anchor }
    }

    /// `so(3)`: `[e1,e2] = e3`, `[e2,e3] = e1`, `[e3,e1] = e2`.
    pub fn so3() -> Self {
        let one = Rational::from_integer(1.into());
        Self::lie_algebra(
            3,
            &[
                (0, 1, 2, one.clone()),
                (1, 2, 0, one.clone()),
                (2, 0, 1, one),
            ],
        )
        .expect("so(3) tables")
    }

    /// The two-dimensional non-abelian Lie algebra, `[e1,e2] = e2`.
    pub fn aff1() -> Self {
        Self::lie_algebra(2, &[(0, 1, 1, Rational::from_integer(1.into()))]).expect("aff(1) tables")
    }

    /// Three-dimensional Heisenberg algebra, `[e1,e2] = e3`.
    pub fn heisenberg() -> Self {
        Self::lie_algebra(3, &[(0, 1, 2, Rational::from_integer(1.into()))])
            .expect("Heisenberg tables")
    }

    /// Abelian Lie algebra of the given rank over a point.
    pub fn abelian(rank: usize) -> Self {
        Self::lie_algebra(rank, &[]).expect("abelian tables")
    }

    /// Tangent algebroid of `R^n` in the coordinate frame.
    pub fn tangent(n: usize) -> Self {
        let anchor = (0..n)
            .map(|a| (0..n).map(|i| Poly::integer((a == i) as i64, n)).collect())
            .collect();
        Self::new(n, n, anchor, []).expect("tangent tables")
    }

    /// Action algebroid of `aff(1)` on the line: `rho(e1) = d/dx`,
    /// `rho(e2) = x d/dx`, `[e1,e2] = e1`.
    pub fn aff1_action() -> Self {
        let x = Poly::var(0, 1).expect("one variable");
        let anchor = vec![vec![Poly::one(1)], vec![x]];
        let entries = [StructureEntry {
            a: 0,
            b: 1,
            c: 0,
            value: Poly::one(1),
        }];
        Self::new(1, 2, anchor, entries).expect("aff(1) action tables")
    }

    /// Named example algebroids used by the verification suites.
    pub fn zoo() -> Vec<(&'static str, Algebroid)> {
        vec![
            ("so3", Self::so3()),
            ("aff1", Self::aff1()),
            ("heisenberg", Self::heisenberg()),
            ("tangent1", Self::tangent(1)),
            ("tangent2", Self::tangent(2)),
            ("aff1-action", Self::aff1_action()),
        ]
    }
}

fn check_vars(polys: &[Poly], nvars: usize) -> Result<()> {
    match polys.iter().find(|p| p.nvars() != nvars) {
        Some(p) => Err(Error::VariableMismatch {
            left: nvars,
            right: p.nvars(),
        }),
        None => Ok(()),
    }
}

impl fmt::Debug for Algebroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebroid")
            .field("nvars", &self.nvars)
            .field("rank", &self.rank)
            .field("anchor", &self.anchor)
            .field("structure", &self.structure_entries())
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiCheck {
    pub triple: (usize, usize, usize),
    /// `[[e_a,e_b],e_c] + cyclic`.
    pub residual: Section,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorCheck {
    pub pair: (usize, usize),
    pub coordinate: usize,
    /// `rho([e_a,e_b]) x_i - [rho(e_a), rho(e_b)] x_i`.
    pub residual: Poly,
}

/// Outcome of [`Algebroid::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub jacobi: Vec<JacobiCheck>,
    pub anchor: Vec<AnchorCheck>,
}

impl ValidationReport {
    pub fn jacobi_ok(&self) -> bool {
        self.jacobi.iter().all(|c| c.residual.is_zero())
    }

    pub fn anchor_ok(&self) -> bool {
        self.anchor.iter().all(|c| c.residual.is_zero())
    }

    pub fn passes(&self) -> bool {
        self.jacobi_ok() && self.anchor_ok()
    }

    /// First frame triple violating Jacobi, if any.
    pub fn jacobi_witness(&self) -> Option<&JacobiCheck> {
        self.jacobi.iter().find(|c| !c.residual.is_zero())
    }

    pub fn anchor_witness(&self) -> Option<&AnchorCheck> {
        self.anchor.iter().find(|c| !c.residual.is_zero())
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = |ok: bool| if ok { "pass" } else { "fail" };
        write!(
            f,
            "jacobi: {}, anchor-morphism: {}",
            status(self.jacobi_ok()),
            status(self.anchor_ok())
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    fn x(n: usize) -> Poly {
        Poly::var(0, n).unwrap()
    }

    #[test]
    fn tangent_anchor_is_coordinate_field() {
        let t = Algebroid::tangent(2);
        let f = &Poly::var(0, 2).unwrap() * &Poly::var(1, 2).unwrap();
        assert_eq!(
            t.anchor_apply(&t.basis(0), &f).unwrap(),
            Poly::var(1, 2).unwrap()
        );
    }

    #[test]
    fn lie_algebra_anchor_vanishes() {
        let g = Algebroid::so3();
        let f = Poly::integer(7, 0);
        assert!(g.anchor_apply(&g.basis(1), &f).unwrap().is_zero());
    }

    #[test]
    fn action_algebroid_anchor() {
        let a = Algebroid::aff1_action();
        let x2 = &x(1) * &x(1);
        assert_eq!(a.anchor_apply(&a.basis(1), &x2).unwrap(), x2.scale(&rat(2)));
    }

    #[test]
    fn so3_frame_bracket() {
        let g = Algebroid::so3();
        assert_eq!(g.bracket(&g.basis(0), &g.basis(1)).unwrap(), g.basis(2));
        assert_eq!(g.bracket(&g.basis(2), &g.basis(0)).unwrap(), g.basis(1));
    }

    #[test]
    fn vector_field_bracket_on_the_line() {
        // [x d, d] = -d
        let t = Algebroid::tangent(1);
        let xd = Section::new(vec![x(1)]);
        let d = t.basis(0);
        assert_eq!(t.bracket(&xd, &d).unwrap(), -&d);
    }

    #[test]
    fn zoo_validates() {
        for (name, a) in Algebroid::zoo() {
            assert!(a.validate().passes(), "{name}");
        }
        for n in 0..=3 {
            assert!(Algebroid::tangent(n).validate().passes());
        }
    }

    #[test]
    fn broken_jacobi_is_reported() {
        // [e1,e2] = e3, [e1,e3] = e1: Jacobi sum on (1,2,3) is -e3.
        let one = rat(1);
        let g = Algebroid::lie_algebra(3, &[(0, 1, 2, one.clone()), (0, 2, 0, one)]).unwrap();
        let report = g.validate();
        assert!(!report.jacobi_ok());
        assert!(report.anchor_ok());
        let w = report.jacobi_witness().unwrap();
        assert_eq!(w.triple, (0, 1, 2));
        assert_eq!(w.residual, -&g.basis(2));
        assert_eq!(report.to_string(), "jacobi: fail, anchor-morphism: pass");
    }

    #[test]
    fn cyclic_three_dimensional_brackets_always_satisfy_jacobi() {
        // Rescaling c_12^3 of so(3) keeps the cyclic shape, whose Jacobi
        // sum vanishes identically.
        let one = rat(1);
        let g = Algebroid::lie_algebra(
            3,
            &[(0, 1, 2, rat(2)), (1, 2, 0, one.clone()), (2, 0, 1, one)],
        )
        .unwrap();
        assert!(g.validate().passes());
    }

    #[test]
    fn broken_anchor_is_reported() {
        // aff(1) action with the wrong bracket sign.
        let xx = x(1);
        let anchor = vec![vec![Poly::one(1)], vec![xx]];
        let entries = [StructureEntry {
            a: 0,
            b: 1,
            c: 0,
            value: Poly::integer(-1, 1),
        }];
        let a = Algebroid::new(1, 2, anchor, entries).unwrap();
        let r = a.validate();
        assert!(r.jacobi_ok());
        assert!(!r.anchor_ok());
        assert_eq!(r.anchor_witness().unwrap().pair, (0, 1));
    }

    #[test]
    fn structure_index_out_of_range() {
        let e = [StructureEntry {
            a: 0,
            b: 1,
            c: 2,
            value: Poly::one(0),
        }];
        assert!(matches!(
            Algebroid::new(0, 2, vec![vec![], vec![]], e),
            Err(Error::IndexOutOfRange {
                what: "structure c",
                ..
            })
        ));
    }

    #[test]
    fn section_rank_mismatch_is_an_error() {
        let g = Algebroid::aff1();
        let bad = Section::zero(3, 0);
        assert!(matches!(
            g.bracket(&bad, &g.basis(0)),
            Err(Error::BundleMismatch(_))
        ));
        assert!(g.anchor_apply(&bad, &Poly::zero(0)).is_err());
    }
}
