//! A-connections on bundles: covariant derivative, torsion and its
//! symmetrization, curvature, and the covariant exterior derivative.

use std::fmt;
use std::sync::Arc;

use crate::algebroid::{Algebroid, Section, Target};
use crate::error::{Error, Result};
use crate::scalars::{ratio, Poly};
use crate::vforms::{enumerate_shuffles, MultiIndex, VForm};

/// One Christoffel symbol: `nabla_{e_a} e_alpha = sum_beta Gamma_{a alpha}^beta e_beta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChristoffelEntry {
    pub a: usize,
    pub alpha: usize,
    pub beta: usize,
    pub value: Poly,
}

/// An A-connection on a trivialised bundle, stored by its Christoffel
/// table. The operator is always derived from the table through the Leibniz
/// rule, so the connection axioms hold by construction.
#[derive(Clone, PartialEq, Eq)]
pub struct Connection {
    algebroid: Arc<Algebroid>,
    bundle: Target,
    fiber: usize,
    /// Dense `rank * fiber * fiber` table indexed `[a][alpha][beta]`.
    christoffel: Vec<Poly>,
}

impl Connection {
    pub fn zero(algebroid: Arc<Algebroid>, bundle: Target) -> Self {
        let fiber = bundle.rank(algebroid.rank());
        let christoffel = vec![Poly::zero(algebroid.nvars()); algebroid.rank() * fiber * fiber];
        Connection {
            algebroid,
            bundle,
            fiber,
            christoffel,
        }
    }

    /// Builds a connection from Christoffel entries; omitted entries are
    /// zero and repeated entries accumulate.
    pub fn new(
        algebroid: Arc<Algebroid>,
        bundle: Target,
        entries: impl IntoIterator<Item = ChristoffelEntry>,
    ) -> Result<Self> {
        let mut conn = Self::zero(algebroid, bundle);
        let (r, m) = (conn.algebroid.rank(), conn.fiber);
        for ChristoffelEntry {
            a,
            alpha,
            beta,
            value,
        } in entries
        {
            for (what, i, bound) in [
                ("christoffel a", a, r),
                ("christoffel alpha", alpha, m),
                ("christoffel beta", beta, m),
            ] {
                if i >= bound {
                    return Err(Error::IndexOutOfRange {
                        what,
                        index: i,
                        bound,
                    });
                }
            }
            conn.algebroid.check_poly(&value)?;
            let slot = conn.slot(a, alpha, beta);
            conn.christoffel[slot] += &value;
        }
        Ok(conn)
    }

    /// The canonical flat connection `nabla^rho_X f = rho(X) f` on the
    /// trivial line bundle.
    pub fn anchor_connection(algebroid: Arc<Algebroid>) -> Self {
        Self::zero(algebroid, Target::Scalar)
    }

    fn slot(&self, a: usize, alpha: usize, beta: usize) -> usize {
        (a * self.fiber + alpha) * self.fiber + beta
    }

    pub fn algebroid(&self) -> &Arc<Algebroid> {
        &self.algebroid
    }

    pub fn bundle(&self) -> Target {
        self.bundle
    }

    pub fn fiber(&self) -> usize {
        self.fiber
    }

    pub fn christoffel(&self, a: usize, alpha: usize, beta: usize) -> &Poly {
        &self.christoffel[self.slot(a, alpha, beta)]
    }

    /// Nonzero Christoffel entries in `(a, alpha, beta)` order.
    pub fn entries(&self) -> Vec<ChristoffelEntry> {
        let mut out = Vec::new();
        for a in 0..self.algebroid.rank() {
            for alpha in 0..self.fiber {
                for beta in 0..self.fiber {
                    let v = self.christoffel(a, alpha, beta);
                    if !v.is_zero() {
                        out.push(ChristoffelEntry {
                            a,
                            alpha,
                            beta,
                            value: v.clone(),
                        });
                    }
                }
            }
        }
        out
    }

    pub(crate) fn same_algebroid(&self, other: &Connection) -> bool {
        Arc::ptr_eq(&self.algebroid, &other.algebroid) || self.algebroid == other.algebroid
    }

    fn check_bundle_section(&self, s: &Section) -> Result<()> {
        if s.rank() != self.fiber {
            return Err(Error::BundleMismatch(format!(
                "section has {} components, connection bundle has rank {}",
                s.rank(),
                self.fiber
            )));
        }
        Ok(())
    }

    pub(crate) fn check_form(&self, form: &VForm) -> Result<()> {
        form.check_source(&self.algebroid)?;
        if form.target() != self.bundle {
            return Err(Error::BundleMismatch(format!(
                "form takes values in {}, connection acts on {}",
                form.target(),
                self.bundle
            )));
        }
        Ok(())
    }

    /// `nabla_{e_a} s`.
    pub fn cov_frame(&self, a: usize, s: &Section) -> Section {
        let mut out: Vec<Poly> = s
            .coeffs()
            .iter()
            .map(|c| self.algebroid.anchor_frame(a, c))
            .collect();
        for (alpha, sa) in s.coeffs().iter().enumerate() {
            if sa.is_zero() {
                continue;
            }
            for (beta, slot) in out.iter_mut().enumerate() {
                let g = self.christoffel(a, alpha, beta);
                if !g.is_zero() {
                    *slot += &(sa * g);
                }
            }
        }
        Section::new(out)
    }

    /// `(nabla_X s)^beta = sum_a X^a (rho(e_a) s^beta + sum_alpha s^alpha Gamma_{a alpha}^beta)`.
    pub fn cov_deriv(&self, x: &Section, s: &Section) -> Result<Section> {
        self.algebroid.check_section(x)?;
        self.check_bundle_section(s)?;
        let mut out = Section::zero(self.fiber, self.algebroid.nvars());
        for (a, xa) in x.coeffs().iter().enumerate() {
            if !xa.is_zero() {
                out.add_scaled(xa, &self.cov_frame(a, s));
            }
        }
        Ok(out)
    }

    fn require_on_algebroid(&self) -> Result<()> {
        if self.bundle != Target::Algebroid {
            return Err(Error::BundleMismatch(format!(
                "torsion needs a connection on A, this one acts on {}",
                self.bundle
            )));
        }
        Ok(())
    }

    /// `T(X,Y) = nabla_X Y - nabla_Y X - [X,Y]` as an A-valued 2-form.
    pub fn torsion(&self) -> Result<VForm> {
        self.require_on_algebroid()?;
        let alg = &self.algebroid;
        let comps = MultiIndex::all(alg.rank(), 2).into_iter().map(|idx| {
            let (a, b) = (idx.entries()[0], idx.entries()[1]);
            let mut t = &self.cov_frame(a, &alg.basis(b)) - &self.cov_frame(b, &alg.basis(a));
            t.sub_assign(&alg.frame_bracket(a, b));
            (idx, t)
        });
        VForm::from_components(alg, 2, Target::Algebroid, comps)
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion().map(|t| t.is_zero()).unwrap_or(false)
    }

    /// `nabla'_X Y = nabla_X Y - T(X,Y)/2`, which is torsion-free.
    pub fn symmetrize(&self) -> Result<Connection> {
        let torsion = self.torsion()?;
        let half = ratio(1, 2);
        let mut out = self.clone();
        for (idx, t) in torsion.components() {
            let (a, b) = (idx.entries()[0], idx.entries()[1]);
            for (c, tc) in t.coeffs().iter().enumerate() {
                let h = tc.scale(&half);
                let ab = out.slot(a, b, c);
                let ba = out.slot(b, a, c);
                out.christoffel[ab] -= &h;
                out.christoffel[ba] += &h;
            }
        }
        Ok(out)
    }

    /// Curvature components from `R(X,Y)s = nabla_X nabla_Y s - nabla_Y nabla_X s - nabla_[X,Y] s`
    /// evaluated on frame pairs and frame sections.
    pub fn curvature(&self) -> CurvatureTensor {
        let alg = &self.algebroid;
        let (r, m, n) = (alg.rank(), self.fiber, alg.nvars());
        let mut comps = vec![Poly::zero(n); r * r * m * m];
        for a in 0..r {
            for b in a + 1..r {
                let bracket = alg.frame_bracket(a, b);
                for alpha in 0..m {
                    let e = Section::basis(alpha, m, n);
                    let mut v = self.cov_frame(a, &self.cov_frame(b, &e));
                    v.sub_assign(&self.cov_frame(b, &self.cov_frame(a, &e)));
                    v.sub_assign(&self.cov_deriv(&bracket, &e).expect("frame bracket"));
                    for (beta, vb) in v.coeffs().iter().enumerate() {
                        comps[((a * r + b) * m + alpha) * m + beta] = vb.clone();
                        comps[((b * r + a) * m + alpha) * m + beta] = -vb;
                    }
                }
            }
        }
        CurvatureTensor {
            rank: r,
            fiber: m,
            nvars: n,
            comps,
        }
    }

    /// Covariant exterior derivative `d^nabla` on forms with values in this
    /// connection's bundle.
    pub fn d_nabla(&self, phi: &VForm) -> Result<VForm> {
        self.check_form(phi)?;
        let degree = phi.degree() + 1;
        if phi.degree() < 0 {
            return Ok(phi.zero_like(degree));
        }
        let p = phi.degree() as usize;
        let alg = &self.algebroid;
        let first = enumerate_shuffles(&[1, p]);
        let second = (p >= 1).then(|| enumerate_shuffles(&[2, p - 1]));
        Ok(VForm::build(phi, degree, phi.target(), |idx| {
            let mut acc = phi.zero_value();
            let mut rest = Vec::with_capacity(p);
            for sh in first.iter() {
                rest.clear();
                rest.extend(sh.perm[1..].iter().map(|&t| idx[t]));
                let Some(v) = phi.get(&rest) else { continue };
                let d = self.cov_frame(idx[sh.perm[0]], v);
                if sh.sign == 1 {
                    acc.add_assign(&d);
                } else {
                    acc.sub_assign(&d);
                }
            }
            for sh in second.iter().flat_map(|s| s.iter()) {
                rest.clear();
                rest.extend(sh.perm[2..].iter().map(|&t| idx[t]));
                let (a, b) = (idx[sh.perm[0]], idx[sh.perm[1]]);
                for c in 0..alg.rank() {
                    let coef = alg.structure(a, b, c);
                    if coef.is_zero() {
                        continue;
                    }
                    if let Some((sign, v)) = phi.signed_front(c, &rest) {
                        // minus the shuffle sum
                        let f = if sign * sh.sign == 1 {
                            -coef
                        } else {
                            coef.clone()
                        };
                        acc.add_scaled(&f, v);
                    }
                }
            }
            acc
        }))
    }

    /// `sum_{Sh_{2,p}} sign * R(Z_s1, Z_s2)(phi(Z_s3, ...))`, built from the
    /// curvature table.
    pub fn curvature_action(&self, phi: &VForm) -> Result<VForm> {
        self.check_form(phi)?;
        let degree = phi.degree() + 2;
        if phi.degree() < 0 {
            return Ok(phi.zero_like(degree));
        }
        let p = phi.degree() as usize;
        let curv = self.curvature();
        let shuffles = enumerate_shuffles(&[2, p]);
        Ok(VForm::build(phi, degree, phi.target(), |idx| {
            let mut acc = phi.zero_value();
            let mut rest = Vec::with_capacity(p);
            for sh in shuffles.iter() {
                rest.clear();
                rest.extend(sh.perm[2..].iter().map(|&t| idx[t]));
                let Some(v) = phi.get(&rest) else { continue };
                let w = curv.apply_frame(idx[sh.perm[0]], idx[sh.perm[1]], v);
                if sh.sign == 1 {
                    acc.add_assign(&w);
                } else {
                    acc.sub_assign(&w);
                }
            }
            acc
        }))
    }

    /// Whether `d^nabla d^nabla phi` equals the curvature action on `phi`.
    pub fn d_nabla_squared_check(&self, phi: &VForm) -> Result<bool> {
        let dd = self.d_nabla(&self.d_nabla(phi)?)?;
        Ok(dd == self.curvature_action(phi)?)
    }
}

impl fmt::Debug for Connection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Connection")
            .field("bundle", &self.bundle)
            .field("christoffel", &self.entries())
            .finish()
    }
}

/// `R` as an element of `Omega^2(A, End E)`, stored as one `fiber x fiber`
/// matrix per ordered frame pair: `R(e_a, e_b) e_alpha = sum_beta R[a][b][alpha][beta] e_beta`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CurvatureTensor {
    rank: usize,
    fiber: usize,
    nvars: usize,
    comps: Vec<Poly>,
}

impl CurvatureTensor {
    pub fn component(&self, a: usize, b: usize, alpha: usize, beta: usize) -> &Poly {
        &self.comps[((a * self.rank + b) * self.fiber + alpha) * self.fiber + beta]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    /// `R(e_a, e_b) s`.
    pub fn apply_frame(&self, a: usize, b: usize, s: &Section) -> Section {
        let mut out = Section::zero(self.fiber, self.nvars).into_coeffs();
        for (alpha, sa) in s.coeffs().iter().enumerate() {
            if sa.is_zero() {
                continue;
            }
            for (beta, slot) in out.iter_mut().enumerate() {
                let c = self.component(a, b, alpha, beta);
                if !c.is_zero() {
                    *slot += &(sa * c);
                }
            }
        }
        Section::new(out)
    }

    /// `R(X, Y) s` by tensorial expansion of the table.
    pub fn apply(&self, x: &Section, y: &Section, s: &Section) -> Section {
        let mut out = Section::zero(self.fiber, self.nvars);
        for (a, xa) in x.coeffs().iter().enumerate() {
            for (b, yb) in y.coeffs().iter().enumerate() {
                if a == b || xa.is_zero() || yb.is_zero() {
                    continue;
                }
                out.add_scaled(&(xa * yb), &self.apply_frame(a, b, s));
            }
        }
        out
    }
}

/// `(nabla_X s)(Z_1..Z_p) = nabla^E_X(s(Z_1..Z_p)) - sum_t s(.., nabla^A_X Z_t, ..)`.
pub fn nabla_x_form(
    conn_a: &Connection,
    conn_e: &Connection,
    x: &Section,
    s: &VForm,
) -> Result<VForm> {
    conn_a.require_on_algebroid()?;
    if !conn_a.same_algebroid(conn_e) {
        return Err(Error::BundleMismatch(
            "connections over different algebroids".into(),
        ));
    }
    conn_e.check_form(s)?;
    conn_a.algebroid.check_section(x)?;
    if s.degree() < 0 {
        return Ok(s.clone());
    }
    let alg = &conn_a.algebroid;
    let moved: Vec<Section> = (0..alg.rank())
        .map(|c| conn_a.cov_deriv(x, &alg.basis(c)).expect("frame section"))
        .collect();
    Ok(VForm::build(s, s.degree(), s.target(), |idx| {
        let mut acc = match s.get(idx) {
            Some(v) => conn_e.cov_deriv(x, v).expect("bundle section"),
            None => s.zero_value(),
        };
        for (t, &c) in idx.iter().enumerate() {
            acc.sub_assign(&s.value_with_slot(idx, t, &moved[c]));
        }
        acc
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::FormSampler;
    use crate::scalars::rat;

    fn arc(a: Algebroid) -> Arc<Algebroid> {
        Arc::new(a)
    }

    #[test]
    fn zero_connection_over_a_point() {
        let g = arc(Algebroid::so3());
        let c = Connection::zero(g.clone(), Target::bundle(2).unwrap());
        let s = Section::new(vec![Poly::integer(3, 0), Poly::integer(-1, 0)]);
        assert!(c.cov_deriv(&g.basis(0), &s).unwrap().is_zero());
    }

    #[test]
    fn coordinate_derivative_on_the_line() {
        let t = arc(Algebroid::tangent(1));
        let c = Connection::zero(t.clone(), Target::Algebroid);
        let xe = Section::new(vec![Poly::var(0, 1).unwrap()]);
        assert_eq!(c.cov_deriv(&t.basis(0), &xe).unwrap(), t.basis(0));
    }

    #[test]
    fn leibniz_axiom() {
        for (_, g) in Algebroid::zoo() {
            let g = arc(g);
            let mut s = FormSampler::new(&g, 4);
            let conn = s.connection(g.clone(), Target::bundle(2).unwrap());
            let (x, f) = (s.section(), s.poly());
            let sec = s.bundle_section(2);
            let lhs = conn.cov_deriv(&x, &sec.scale(&f)).unwrap();
            let mut rhs = sec.scale(&g.anchor_apply(&x, &f).unwrap());
            rhs.add_assign(&conn.cov_deriv(&x, &sec).unwrap().scale(&f));
            assert_eq!(lhs, rhs);
            // C-infinity linear in X
            let lhs = conn.cov_deriv(&x.scale(&f), &sec).unwrap();
            assert_eq!(lhs, conn.cov_deriv(&x, &sec).unwrap().scale(&f));
        }
    }

    #[test]
    fn so3_torsion_and_symmetrization() {
        let g = arc(Algebroid::so3());
        let c = Connection::zero(g.clone(), Target::Algebroid);
        let t = c.torsion().unwrap();
        assert_eq!(t.value(&[0, 1]), -&g.basis(2));
        let sym = c.symmetrize().unwrap();
        assert!(sym.torsion().unwrap().is_zero());
        assert_eq!(
            sym.cov_deriv(&g.basis(0), &g.basis(1)).unwrap(),
            g.basis(2).scale_rat(&ratio(1, 2))
        );
        assert_eq!(sym.christoffel(0, 1, 2), &Poly::constant(ratio(1, 2), 0));
    }

    #[test]
    fn tangent_zero_connection_is_torsion_free() {
        for n in 1..=3 {
            let t = arc(Algebroid::tangent(n));
            let c = Connection::zero(t, Target::Algebroid);
            assert!(c.is_torsion_free());
            assert_eq!(c.symmetrize().unwrap(), c);
        }
    }

    #[test]
    fn symmetrize_is_a_projection() {
        for (_, g) in Algebroid::zoo() {
            let g = arc(g);
            let mut s = FormSampler::new(&g, 8);
            let c = s.connection(g.clone(), Target::Algebroid);
            let once = c.symmetrize().unwrap();
            assert!(once.is_torsion_free());
            assert_eq!(once.symmetrize().unwrap(), once);
        }
    }

    #[test]
    fn torsion_needs_connection_on_a() {
        let g = arc(Algebroid::so3());
        let c = Connection::zero(g, Target::Scalar);
        assert!(matches!(c.torsion(), Err(Error::BundleMismatch(_))));
        assert!(c.symmetrize().is_err());
    }

    #[test]
    fn flat_examples() {
        for (_, g) in Algebroid::zoo() {
            let g = arc(g);
            assert!(Connection::anchor_connection(g.clone())
                .curvature()
                .is_zero());
        }
        let g = arc(Algebroid::so3());
        assert!(Connection::zero(g, Target::Algebroid).symmetrize().is_ok());
        for n in 1..=3 {
            let t = arc(Algebroid::tangent(n));
            assert!(Connection::zero(t, Target::Algebroid).curvature().is_zero());
        }
    }

    #[test]
    fn so3_symmetric_connection_curvature() {
        // nabla'_X Y = [X,Y]/2 gives R(X,Y)Z = -[[X,Y],Z]/4
        let g = arc(Algebroid::so3());
        let c = Connection::zero(g.clone(), Target::Algebroid)
            .symmetrize()
            .unwrap();
        let r = c.curvature();
        assert!(r.apply_frame(0, 1, &g.basis(2)).is_zero());
        assert_eq!(
            r.apply_frame(0, 1, &g.basis(0)),
            g.basis(1).scale_rat(&ratio(-1, 4))
        );
        assert_eq!(
            r.apply_frame(0, 1, &g.basis(1)),
            g.basis(0).scale_rat(&ratio(1, 4))
        );
    }

    #[test]
    fn curvature_is_tensorial() {
        for (_, g) in Algebroid::zoo() {
            let g = arc(g);
            let mut s = FormSampler::new(&g, 21);
            let c = s.connection(g.clone(), Target::bundle(2).unwrap());
            let r = c.curvature();
            let (x, y, sec) = (s.section(), s.section(), s.bundle_section(2));
            let direct = {
                let mut v = c.cov_deriv(&x, &c.cov_deriv(&y, &sec).unwrap()).unwrap();
                v.sub_assign(&c.cov_deriv(&y, &c.cov_deriv(&x, &sec).unwrap()).unwrap());
                v.sub_assign(&c.cov_deriv(&g.bracket(&x, &y).unwrap(), &sec).unwrap());
                v
            };
            assert_eq!(r.apply(&x, &y, &sec), direct);
        }
    }

    #[test]
    fn torsion_is_tensorial() {
        for (_, g) in Algebroid::zoo() {
            let g = arc(g);
            let mut s = FormSampler::new(&g, 22);
            let c = s.connection(g.clone(), Target::Algebroid);
            let t = c.torsion().unwrap();
            let (x, y) = (s.section(), s.section());
            let mut direct = &c.cov_deriv(&x, &y).unwrap() - &c.cov_deriv(&y, &x).unwrap();
            direct.sub_assign(&g.bracket(&x, &y).unwrap());
            assert_eq!(t.eval(&[x, y]).unwrap(), direct);
        }
    }

    #[test]
    fn chevalley_eilenberg_differential_on_so3() {
        let g = arc(Algebroid::so3());
        let rho = Connection::anchor_connection(g.clone());
        let d = rho.d_nabla(&VForm::dual(&g, 2).unwrap()).unwrap();
        let expected =
            crate::vforms::wedge(&VForm::dual(&g, 0).unwrap(), &VForm::dual(&g, 1).unwrap())
                .unwrap()
                .neg();
        assert_eq!(d, expected);
    }

    #[test]
    fn de_rham_on_the_line() {
        let t = arc(Algebroid::tangent(1));
        let rho = Connection::anchor_connection(t.clone());
        let x = VForm::function(&t, Poly::var(0, 1).unwrap()).unwrap();
        let d = rho.d_nabla(&x).unwrap();
        assert_eq!(d, VForm::dual(&t, 0).unwrap());
    }

    #[test]
    fn d_nabla_on_sections_is_covariant_derivative() {
        for (_, g) in Algebroid::zoo() {
            let g = arc(g);
            let mut s = FormSampler::new(&g, 30);
            let c = s.connection(g.clone(), Target::bundle(2).unwrap());
            let sec = s.bundle_section(2);
            let form = VForm::section(&g, Target::bundle(2).unwrap(), sec.clone()).unwrap();
            let d = c.d_nabla(&form).unwrap();
            let z = s.section();
            assert_eq!(
                d.eval(std::slice::from_ref(&z)).unwrap(),
                c.cov_deriv(&z, &sec).unwrap()
            );
        }
    }

    #[test]
    fn d_squared_is_curvature_action() {
        for (_, g) in Algebroid::zoo() {
            let g = arc(g);
            let mut s = FormSampler::new(&g, 12);
            let c = s.connection(g.clone(), Target::bundle(2).unwrap());
            let rho = Connection::anchor_connection(g.clone());
            for p in 0..=g.rank() {
                let phi = s.form(p, Target::bundle(2).unwrap());
                assert!(c.d_nabla_squared_check(&phi).unwrap());
                let w = s.form(p, Target::Scalar);
                assert!(rho.d_nabla(&rho.d_nabla(&w).unwrap()).unwrap().is_zero());
            }
        }
        let g = arc(Algebroid::so3());
        let flat = Connection::zero(g.clone(), Target::bundle(2).unwrap());
        let mut s = FormSampler::new(&g, 1);
        let phi = s.form(1, Target::bundle(2).unwrap());
        assert!(flat
            .d_nabla(&flat.d_nabla(&phi).unwrap())
            .unwrap()
            .is_zero());
    }

    #[test]
    fn nabla_x_on_sections_and_constants() {
        let g = arc(Algebroid::aff1_action());
        let mut s = FormSampler::new(&g, 3);
        let ca = s
            .connection(g.clone(), Target::Algebroid)
            .symmetrize()
            .unwrap();
        let ce = s.connection(g.clone(), Target::bundle(1).unwrap());
        let x = s.section();
        let sec = s.bundle_section(1);
        let form = VForm::section(&g, Target::bundle(1).unwrap(), sec.clone()).unwrap();
        let got = nabla_x_form(&ca, &ce, &x, &form).unwrap();
        assert_eq!(
            got.get(&[]).cloned().unwrap_or_else(|| got.zero_value()),
            ce.cov_deriv(&x, &sec).unwrap()
        );

        let h = arc(Algebroid::abelian(2));
        let za = Connection::zero(h.clone(), Target::Algebroid);
        let ze = Connection::zero(h.clone(), Target::Scalar);
        let w = VForm::dual(&h, 1).unwrap().scale(&rat(3));
        assert!(nabla_x_form(&za, &ze, &h.basis(0), &w).unwrap().is_zero());
    }

    #[test]
    fn bundle_mismatch_in_d_nabla() {
        let g = arc(Algebroid::so3());
        let c = Connection::zero(g.clone(), Target::bundle(2).unwrap());
        assert!(matches!(
            c.d_nabla(&VForm::dual(&g, 0).unwrap()),
            Err(Error::BundleMismatch(_))
        ));
        let other = arc(Algebroid::aff1());
        let w = VForm::dual(&other, 0).unwrap();
        assert!(Connection::anchor_connection(g).d_nabla(&w).is_err());
    }

    #[test]
    fn christoffel_index_checked() {
        let g = arc(Algebroid::aff1());
        let e = [ChristoffelEntry {
            a: 0,
            alpha: 2,
            beta: 0,
            value: Poly::one(0),
        }];
        assert!(Connection::new(g, Target::Algebroid, e).is_err());
    }
}
