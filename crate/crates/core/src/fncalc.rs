//! Covariant Lie derivatives, the covariant operators `nabla_phi`, the
//! extended curvature `R(phi, psi)`, and the Frölicher–Nijenhuis bracket of
//! algebroid-valued forms.
//!
//! With `phi` of degree `k`:
//!
//! ```text
//! L_phi      = [i_phi, d]          = i_phi d + (-1)^k d i_phi
//! nabla_phi  = L_phi - (-1)^k i_{d phi}
//! [phi, psi] = L_phi psi - (-1)^{kl} L_psi phi      (any torsion-free nabla on A)
//! ```

use std::fmt;
use std::sync::Arc;

use crate::algebroid::{Algebroid, Section, StructureEntry, Target, ValidationReport};
use crate::connections::Connection;
use crate::error::{Error, Result};
use crate::scalars::{rat, ratio, sign_pow, Poly, Rational};
use crate::vforms::{enumerate_shuffles, insert, wedge, VForm};

/// Covariant Lie derivative `L_phi s = i_phi d s + (-1)^k d i_phi s`, where
/// `d` is the covariant exterior derivative of `conn_e`.
pub fn lie_deriv(conn_e: &Connection, phi: &VForm, s: &VForm) -> Result<VForm> {
    conn_e.check_form(s)?;
    phi.check_source(conn_e.algebroid())?;
    let first = insert(phi, &conn_e.d_nabla(s)?)?;
    let second = conn_e.d_nabla(&insert(phi, s)?)?;
    first.checked_add(&second.scale(&rat(sign_pow(phi.degree()))))
}

fn require_torsion_free(conn_a: &Connection) -> Result<()> {
    if conn_a.bundle() != Target::Algebroid {
        return Err(Error::BundleMismatch(format!(
            "expected a connection on A, found one on {}",
            conn_a.bundle()
        )));
    }
    if !conn_a.is_torsion_free() {
        return Err(Error::Torsionful);
    }
    Ok(())
}

/// `nabla_phi s = L_phi s - (-1)^p i_{d phi} s`, with `d phi` taken with the
/// torsion-free `conn_a` and `L_phi` with `conn_e`.
pub fn cov_phi(conn_a: &Connection, conn_e: &Connection, phi: &VForm, s: &VForm) -> Result<VForm> {
    require_torsion_free(conn_a)?;
    if !conn_a.same_algebroid(conn_e) {
        return Err(Error::BundleMismatch(
            "connections over different algebroids".into(),
        ));
    }
    let d_phi = conn_a.d_nabla(phi)?;
    cov_phi_with(conn_e, phi, &d_phi, s)
}

fn cov_phi_with(conn_e: &Connection, phi: &VForm, d_phi: &VForm, s: &VForm) -> Result<VForm> {
    let lie = lie_deriv(conn_e, phi, s)?;
    let correction = insert(d_phi, s)?;
    lie.checked_sub(&correction.scale(&rat(sign_pow(phi.degree()))))
}

/// `R(phi, psi)(Y_1..Y_{k+l+1}) = sum_{Sh_{k,l,1}} sign * R(phi(..), psi(..)) Y_last`
/// for the curvature of `conn_a`.
pub fn r_extended(conn_a: &Connection, phi: &VForm, psi: &VForm) -> Result<VForm> {
    if conn_a.bundle() != Target::Algebroid {
        return Err(Error::BundleMismatch(
            "curvature extension needs a connection on A".into(),
        ));
    }
    for f in [phi, psi] {
        if f.target() != Target::Algebroid {
            return Err(Error::NotAlgebroidValued);
        }
        f.check_source(conn_a.algebroid())?;
    }
    let degree = phi.degree() + psi.degree() + 1;
    if phi.degree() < 0 || psi.degree() < 0 {
        return Ok(phi.zero_like(degree));
    }
    let (k, l) = (phi.degree() as usize, psi.degree() as usize);
    let alg = conn_a.algebroid();
    let curv = conn_a.curvature();
    let shuffles = enumerate_shuffles(&[k, l, 1]);
    Ok(VForm::build(phi, degree, Target::Algebroid, |idx| {
        let mut acc = phi.zero_value();
        let mut left = Vec::with_capacity(k);
        let mut mid = Vec::with_capacity(l);
        for sh in shuffles.iter() {
            left.clear();
            mid.clear();
            left.extend(sh.perm[..k].iter().map(|&t| idx[t]));
            mid.extend(sh.perm[k..k + l].iter().map(|&t| idx[t]));
            let (Some(x), Some(y)) = (phi.get(&left), psi.get(&mid)) else {
                continue;
            };
            let v = curv.apply(x, y, &alg.basis(idx[sh.perm[k + l]]));
            if sh.sign == 1 {
                acc.add_assign(&v);
            } else {
                acc.sub_assign(&v);
            }
        }
        acc
    }))
}

/// Frölicher–Nijenhuis bracket `L_phi psi - (-1)^{kl} L_psi phi` computed
/// with a torsion-free connection on `A`.
pub fn fn_bracket(conn_a: &Connection, phi: &VForm, psi: &VForm) -> Result<VForm> {
    require_torsion_free(conn_a)?;
    for f in [phi, psi] {
        if f.target() != Target::Algebroid {
            return Err(Error::NotAlgebroidValued);
        }
    }
    let a = lie_deriv(conn_a, phi, psi)?;
    let b = lie_deriv(conn_a, psi, phi)?;
    a.checked_sub(&b.scale(&rat(sign_pow(phi.degree() * psi.degree()))))
}

/// The torsion-free connection obtained by symmetrizing the zero connection.
pub fn default_connection(algebroid: Arc<Algebroid>) -> Connection {
    Connection::zero(algebroid, Target::Algebroid)
        .symmetrize()
        .expect("connection on A")
}

/// [`fn_bracket`] with [`default_connection`].
pub fn fn_bracket_default(algebroid: Arc<Algebroid>, phi: &VForm, psi: &VForm) -> Result<VForm> {
    fn_bracket(&default_connection(algebroid), phi, psi)
}

fn require_endomorphism(n: &VForm) -> Result<()> {
    if n.target() != Target::Algebroid {
        return Err(Error::NotAlgebroidValued);
    }
    if n.degree() != 1 {
        return Err(Error::DegreeMismatch(format!(
            "expected a (1,1)-tensor, found a form of degree {}",
            n.degree()
        )));
    }
    Ok(())
}

/// Nijenhuis torsion `[N, N] / 2`.
pub fn nijenhuis(conn_a: &Connection, n: &VForm) -> Result<VForm> {
    require_endomorphism(n)?;
    Ok(fn_bracket(conn_a, n, n)?.scale(&ratio(1, 2)))
}

/// Candidate deformed algebroid together with its validation report.
#[derive(Clone, Debug)]
pub struct Deformation {
    pub algebroid: Algebroid,
    pub report: ValidationReport,
}

/// Deforms `A` by a (1,1)-tensor `N`:
/// `[X,Y]_N = [NX,Y] + [X,NY] - N[X,Y]`, `rho_N = rho ∘ N`.
///
/// The result is always returned; whether it is a Lie algebroid is recorded
/// in the report.
pub fn deform(algebroid: &Algebroid, n: &VForm) -> Result<Deformation> {
    require_endomorphism(n)?;
    n.check_source(algebroid)?;
    let (r, nv) = (algebroid.rank(), algebroid.nvars());
    let apply = |y: &Section| n.eval(std::slice::from_ref(y)).expect("section of A");
    let images: Vec<Section> = (0..r).map(|a| apply(&algebroid.basis(a))).collect();
    let anchor = images
        .iter()
        .map(|img| {
            (0..nv)
                .map(|i| {
                    let mut acc = Poly::zero(nv);
                    for (b, nb) in img.coeffs().iter().enumerate() {
                        acc += &(nb * algebroid.anchor(b, i));
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut entries = Vec::new();
    for a in 0..r {
        for b in a + 1..r {
            let (ea, eb) = (algebroid.basis(a), algebroid.basis(b));
            let mut v = algebroid.bracket(&images[a], &eb)?;
            v.add_assign(&algebroid.bracket(&ea, &images[b])?);
            v.sub_assign(&apply(&algebroid.frame_bracket(a, b)));
            for (c, value) in v.into_coeffs().into_iter().enumerate() {
                if !value.is_zero() {
                    entries.push(StructureEntry { a, b, c, value });
                }
            }
        }
    }
    let deformed = Algebroid::new(nv, r, anchor, entries)?;
    let report = deformed.validate();
    Ok(Deformation {
        algebroid: deformed,
        report,
    })
}

/// A graded operator on `Omega^*(A, E)` with a known degree.
///
/// Commutators are graded: `[D1, D2] = D1 D2 - (-1)^{d1 d2} D2 D1`.
#[derive(Clone)]
pub struct GradedOperator<'a> {
    kind: Kind<'a>,
    degree: isize,
}

#[derive(Clone)]
enum Kind<'a> {
    Insertion(VForm),
    DNabla(&'a Connection),
    LieDeriv {
        conn_e: &'a Connection,
        phi: VForm,
    },
    CovPhi {
        conn_e: &'a Connection,
        phi: VForm,
        d_phi: VForm,
    },
    Epsilon(VForm),
    Commutator(Box<GradedOperator<'a>>, Box<GradedOperator<'a>>),
    Sum(Vec<(Rational, GradedOperator<'a>)>),
}

impl<'a> GradedOperator<'a> {
    pub fn insertion(phi: VForm) -> Result<Self> {
        if phi.target() != Target::Algebroid {
            return Err(Error::NotAlgebroidValued);
        }
        let degree = phi.degree() - 1;
        Ok(GradedOperator {
            kind: Kind::Insertion(phi),
            degree,
        })
    }

    pub fn d_nabla(conn_e: &'a Connection) -> Self {
        GradedOperator {
            kind: Kind::DNabla(conn_e),
            degree: 1,
        }
    }

    pub fn lie_deriv(conn_e: &'a Connection, phi: VForm) -> Result<Self> {
        if phi.target() != Target::Algebroid {
            return Err(Error::NotAlgebroidValued);
        }
        let degree = phi.degree();
        Ok(GradedOperator {
            kind: Kind::LieDeriv { conn_e, phi },
            degree,
        })
    }

    /// `nabla_phi`; fails unless `conn_a` is torsion-free.
    pub fn cov_phi(conn_a: &Connection, conn_e: &'a Connection, phi: VForm) -> Result<Self> {
        require_torsion_free(conn_a)?;
        if !conn_a.same_algebroid(conn_e) {
            return Err(Error::BundleMismatch(
                "connections over different algebroids".into(),
            ));
        }
        let d_phi = conn_a.d_nabla(&phi)?;
        let degree = phi.degree();
        Ok(GradedOperator {
            kind: Kind::CovPhi { conn_e, phi, d_phi },
            degree,
        })
    }

    /// `epsilon_omega = omega ∧ -` for a scalar form.
    pub fn epsilon(omega: VForm) -> Result<Self> {
        if omega.target() != Target::Scalar {
            return Err(Error::NotScalar);
        }
        let degree = omega.degree();
        Ok(GradedOperator {
            kind: Kind::Epsilon(omega),
            degree,
        })
    }

    pub fn commutator(a: GradedOperator<'a>, b: GradedOperator<'a>) -> Self {
        let degree = a.degree + b.degree;
        GradedOperator {
            kind: Kind::Commutator(Box::new(a), Box::new(b)),
            degree,
        }
    }

    /// Weighted sum of operators of one common degree.
    pub fn sum(terms: Vec<(Rational, GradedOperator<'a>)>) -> Result<Self> {
        let degree = terms.first().map_or(0, |(_, t)| t.degree);
        if let Some((_, bad)) = terms.iter().find(|(_, t)| t.degree != degree) {
            return Err(Error::DegreeMismatch(format!(
                "operator sum mixes degrees {degree} and {}",
                bad.degree
            )));
        }
        Ok(GradedOperator {
            kind: Kind::Sum(terms),
            degree,
        })
    }

    pub fn degree(&self) -> isize {
        self.degree
    }

    pub fn apply(&self, s: &VForm) -> Result<VForm> {
        match &self.kind {
            Kind::Insertion(phi) => insert(phi, s),
            Kind::DNabla(conn) => conn.d_nabla(s),
            Kind::LieDeriv { conn_e, phi } => lie_deriv(conn_e, phi, s),
            Kind::CovPhi { conn_e, phi, d_phi } => cov_phi_with(conn_e, phi, d_phi, s),
            Kind::Epsilon(omega) => wedge(omega, s),
            Kind::Commutator(a, b) => {
                let ab = a.apply(&b.apply(s)?)?;
                let ba = b.apply(&a.apply(s)?)?;
                ab.checked_sub(&ba.scale(&rat(sign_pow(a.degree * b.degree))))
            }
            Kind::Sum(terms) => {
                let mut out = s.zero_like(s.degree() + self.degree);
                for (c, op) in terms {
                    out = out.checked_add(&op.apply(s)?.scale(c))?;
                }
                Ok(out)
            }
        }
    }
}

impl fmt::Debug for GradedOperator<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Insertion(phi) => write!(f, "i[{phi}]"),
            Kind::DNabla(_) => write!(f, "d"),
            Kind::LieDeriv { phi, .. } => write!(f, "L[{phi}]"),
            Kind::CovPhi { phi, .. } => write!(f, "nabla[{phi}]"),
            Kind::Epsilon(omega) => write!(f, "eps[{omega}]"),
            Kind::Commutator(a, b) => write!(f, "[{a:?}, {b:?}]"),
            Kind::Sum(terms) => {
                write!(f, "(")?;
                for (i, (c, t)) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{c}*{t:?}")?;
                }
                write!(f, ")")
            }
        }
    }
}
