//! Brute-force reimplementations that share nothing with the main code
//! paths beyond the scalar tower and raw table access. Forms are expanded to
//! dense tensors over all frame tuples, and every shuffle sum is replaced by
//! a full alternation over the symmetric group divided by the block
//! factorials.

use crate::algebroid::{Algebroid, Section, Target};
use crate::connections::Connection;
use crate::error::{Error, Result};
use crate::scalars::{rat, Poly, Rational};
use crate::vforms::{MultiIndex, VForm};

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// All permutations of `0..m` with their signs, by repeated insertion.
fn permutations(m: usize) -> Vec<(Vec<usize>, i64)> {
    let mut perms: Vec<(Vec<usize>, i64)> = vec![(Vec::new(), 1)];
    for v in 0..m {
        let mut next = Vec::with_capacity(perms.len() * (v + 1));
        for (p, s) in &perms {
            // inserting v at position i passes over len - i larger-index slots
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, v);
                let moved = p.len() - i;
                next.push((q, if moved % 2 == 0 { *s } else { -*s }));
            }
        }
        perms = next;
    }
    perms
}

/// Dense tensor: one fiber vector per ordered frame tuple.
#[derive(Clone)]
struct Dense {
    degree: isize,
    rank: usize,
    fiber: usize,
    nvars: usize,
    data: Vec<Vec<Poly>>,
}

impl Dense {
    fn zero(degree: isize, rank: usize, fiber: usize, nvars: usize) -> Dense {
        let len = if degree < 0 {
            0
        } else {
            rank.pow(degree as u32)
        };
        Dense {
            degree,
            rank,
            fiber,
            nvars,
            data: vec![vec![Poly::zero(nvars); fiber]; len],
        }
    }

    fn tuples(&self) -> Vec<Vec<usize>> {
        if self.degree < 0 {
            return Vec::new();
        }
        let k = self.degree as usize;
        (0..self.data.len())
            .map(|mut code| {
                let mut t = vec![0; k];
                for slot in t.iter_mut().rev() {
                    *slot = code % self.rank;
                    code /= self.rank;
                }
                t
            })
            .collect()
    }

    fn code(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &i| acc * self.rank + i)
    }

    fn at(&self, tuple: &[usize]) -> &[Poly] {
        &self.data[self.code(tuple)]
    }

    fn is_trivially_zero(&self) -> bool {
        self.degree < 0 || self.degree as usize > self.rank
    }

    fn from_form(form: &VForm) -> Dense {
        let mut out = Dense::zero(form.degree(), form.rank(), form.fiber(), form.nvars());
        if out.is_trivially_zero() {
            return out;
        }
        for t in out.tuples() {
            // bubble sort, tracking parity
            let mut sorted = t.clone();
            let mut sign = 1i64;
            let mut repeated = false;
            for i in 0..sorted.len() {
                for j in 0..sorted.len() - 1 - i {
                    if sorted[j] > sorted[j + 1] {
                        sorted.swap(j, j + 1);
                        sign = -sign;
                    } else if sorted[j] == sorted[j + 1] {
                        repeated = true;
                    }
                }
            }
            if repeated || sorted.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            if let Some(v) = form.get(&sorted) {
                let code = out.code(&t);
                out.data[code] = v.coeffs().iter().map(|p| p.scale(&rat(sign))).collect();
            }
        }
        out
    }

    fn to_form(&self, algebroid: &Algebroid, target: Target) -> VForm {
        if self.is_trivially_zero() {
            return VForm::zero(algebroid, self.degree, target);
        }
        let k = self.degree as usize;
        let comps = MultiIndex::all(self.rank, k).into_iter().map(|idx| {
            let v = Section::new(self.at(idx.entries()).to_vec());
            (idx, v)
        });
        VForm::from_components(algebroid, k, target, comps).expect("dense components")
    }
}

fn anchor_frame(algebroid: &Algebroid, a: usize, f: &Poly) -> Poly {
    let mut out = Poly::zero(algebroid.nvars());
    for i in 0..algebroid.nvars() {
        out += &(algebroid.anchor(a, i) * &f.partial(i).expect("variable"));
    }
    out
}

fn anchor_section(algebroid: &Algebroid, x: &[Poly], f: &Poly) -> Poly {
    let mut out = Poly::zero(algebroid.nvars());
    for (a, xa) in x.iter().enumerate() {
        out += &(xa * &anchor_frame(algebroid, a, f));
    }
    out
}

fn bracket_sections(algebroid: &Algebroid, x: &[Poly], y: &[Poly]) -> Vec<Poly> {
    let r = algebroid.rank();
    (0..r)
        .map(|c| {
            let mut v = Poly::zero(algebroid.nvars());
            for (a, xa) in x.iter().enumerate() {
                for (b, yb) in y.iter().enumerate() {
                    v += &(&(xa * yb) * algebroid.structure(a, b, c));
                }
            }
            v += &anchor_section(algebroid, x, &y[c]);
            v -= &anchor_section(algebroid, y, &x[c]);
            v
        })
        .collect()
}

fn cov_sections(conn: &Connection, x: &[Poly], s: &[Poly]) -> Vec<Poly> {
    let alg = conn.algebroid();
    (0..conn.fiber())
        .map(|beta| {
            let mut v = anchor_section(alg, x, &s[beta]);
            for (a, xa) in x.iter().enumerate() {
                for (alpha, sa) in s.iter().enumerate() {
                    v += &(&(xa * sa) * conn.christoffel(a, alpha, beta));
                }
            }
            v
        })
        .collect()
}

fn frame(algebroid: &Algebroid, a: usize) -> Vec<Poly> {
    algebroid.basis(a).into_coeffs()
}

/// `(1/(p! k!)) sum_{S_{p+k}} sign * psi(phi(Z..), Z..)` on dense tensors.
fn insert_dense(phi: &Dense, psi: &Dense) -> Dense {
    let degree = phi.degree + psi.degree - 1;
    let mut out = Dense::zero(degree, psi.rank, psi.fiber, psi.nvars);
    if phi.degree < 0 || psi.degree <= 0 || out.is_trivially_zero() {
        return out;
    }
    let (p, k) = (phi.degree as usize, psi.degree as usize - 1);
    let weight = Rational::new(1.into(), (factorial(p) * factorial(k)).into());
    let perms = permutations(p + k);
    for t in out.tuples() {
        let mut acc = vec![Poly::zero(psi.nvars); psi.fiber];
        for (perm, sign) in &perms {
            let z: Vec<usize> = perm.iter().map(|&i| t[i]).collect();
            let x = phi.at(&z[..p]);
            for (c, xc) in x.iter().enumerate() {
                if xc.is_zero() {
                    continue;
                }
                let mut args = vec![c];
                args.extend_from_slice(&z[p..]);
                for (slot, v) in acc.iter_mut().zip(psi.at(&args)) {
                    let term = xc * v;
                    if *sign == 1 {
                        *slot += &term;
                    } else {
                        *slot -= &term;
                    }
                }
            }
        }
        let code = out.code(&t);
        out.data[code] = acc.iter().map(|q| q.scale(&weight)).collect();
    }
    out
}

/// Scalar de Rham differential of the algebroid on dense tensors.
fn d_dense(algebroid: &Algebroid, omega: &Dense) -> Dense {
    let degree = omega.degree + 1;
    let mut out = Dense::zero(degree, omega.rank, 1, omega.nvars);
    if omega.degree < 0 || out.is_trivially_zero() {
        return out;
    }
    let p = omega.degree as usize;
    let perms = permutations(p + 1);
    let w1 = Rational::new(1.into(), factorial(p).into());
    let w2 = if p >= 1 {
        Rational::new(1.into(), (2 * factorial(p - 1)).into())
    } else {
        rat(0)
    };
    for t in out.tuples() {
        let mut first = Poly::zero(omega.nvars);
        let mut second = Poly::zero(omega.nvars);
        for (perm, sign) in &perms {
            let z: Vec<usize> = perm.iter().map(|&i| t[i]).collect();
            let term = anchor_frame(algebroid, z[0], &omega.at(&z[1..])[0]);
            if *sign == 1 {
                first += &term;
            } else {
                first -= &term;
            }
            if p >= 1 {
                for c in 0..algebroid.rank() {
                    let coef = algebroid.structure(z[0], z[1], c);
                    if coef.is_zero() {
                        continue;
                    }
                    let mut args = vec![c];
                    args.extend_from_slice(&z[2..]);
                    let term = coef * &omega.at(&args)[0];
                    if *sign == 1 {
                        second += &term;
                    } else {
                        second -= &term;
                    }
                }
            }
        }
        let code = out.code(&t);
        out.data[code] = vec![&first.scale(&w1) - &second.scale(&w2)];
    }
    out
}

fn sub_dense(a: &Dense, b: &Dense) -> Dense {
    let mut out = a.clone();
    for (x, y) in out.data.iter_mut().zip(&b.data) {
        for (p, q) in x.iter_mut().zip(y) {
            *p -= q;
        }
    }
    out
}

fn add_dense(a: &Dense, b: &Dense) -> Dense {
    let mut out = a.clone();
    for (x, y) in out.data.iter_mut().zip(&b.data) {
        for (p, q) in x.iter_mut().zip(y) {
            *p += q;
        }
    }
    out
}

fn neg_dense(a: &Dense) -> Dense {
    let mut out = a.clone();
    for x in out.data.iter_mut() {
        for p in x.iter_mut() {
            *p = -&*p;
        }
    }
    out
}

fn signed(e: isize, a: Dense) -> Dense {
    if e.rem_euclid(2) == 0 {
        a
    } else {
        neg_dense(&a)
    }
}

/// `L_phi omega = i_phi d omega + (-1)^k d i_phi omega` on scalar forms.
fn lie_dense(algebroid: &Algebroid, phi: &Dense, omega: &Dense) -> Dense {
    let a = insert_dense(phi, &d_dense(algebroid, omega));
    let b = d_dense(algebroid, &insert_dense(phi, omega));
    add_dense(&a, &signed(phi.degree, b))
}

/// Insertion by full alternation; must agree exactly with
/// [`crate::vforms::insert`].
pub fn insert_bruteforce(phi: &VForm, psi: &VForm, algebroid: &Algebroid) -> Result<VForm> {
    if phi.target() != Target::Algebroid {
        return Err(Error::NotAlgebroidValued);
    }
    let out = insert_dense(&Dense::from_form(phi), &Dense::from_form(psi));
    Ok(out.to_form(algebroid, psi.target()))
}

/// Scalar differential by full alternation.
pub fn d_scalar_bruteforce(algebroid: &Algebroid, omega: &VForm) -> Result<VForm> {
    if omega.target() != Target::Scalar {
        return Err(Error::NotScalar);
    }
    Ok(d_dense(algebroid, &Dense::from_form(omega)).to_form(algebroid, Target::Scalar))
}

/// Extracts `K = [phi, psi]` from the defining operator identity
/// `[L_phi, i_psi] = i_K - (-1)^{k(l-1)} L_{i_psi phi}` on scalar forms by
/// reading `K(e_I)^c = (O e^c)(e_I)` for
/// `O = [L_phi, i_psi] + (-1)^{k(l-1)} L_{i_psi phi}`.
///
/// On scalar forms the Lie derivative only involves the anchor connection;
/// `conn_a` is required to be torsion-free to match the main bracket's
/// contract.
pub fn fn_extract(conn_a: &Connection, phi: &VForm, psi: &VForm) -> Result<VForm> {
    if conn_a.bundle() != Target::Algebroid {
        return Err(Error::BundleMismatch("expected a connection on A".into()));
    }
    if !conn_a.torsion()?.is_zero() {
        return Err(Error::Torsionful);
    }
    if phi.target() != Target::Algebroid || psi.target() != Target::Algebroid {
        return Err(Error::NotAlgebroidValued);
    }
    let alg = conn_a.algebroid();
    let (k, l) = (phi.degree(), psi.degree());
    let (dphi, dpsi) = (Dense::from_form(phi), Dense::from_form(psi));
    let psi_phi = insert_dense(&dpsi, &dphi);
    let degree = k + l;
    let r = alg.rank();
    let mut out = Dense::zero(degree, r, r, alg.nvars());
    if out.is_trivially_zero() {
        return Ok(out.to_form(alg, Target::Algebroid));
    }
    let sign = k * (l - 1);
    for c in 0..r {
        let mut ec = Dense::zero(1, r, 1, alg.nvars());
        ec.data[c] = vec![Poly::one(alg.nvars())];
        let a = lie_dense(alg, &dphi, &insert_dense(&dpsi, &ec));
        let b = insert_dense(&dpsi, &lie_dense(alg, &dphi, &ec));
        let comm = sub_dense(&a, &signed(sign, b));
        let o = add_dense(&comm, &signed(sign, lie_dense(alg, &psi_phi, &ec)));
        for (slot, v) in out.data.iter_mut().zip(&o.data) {
            slot[c] = v[0].clone();
        }
    }
    Ok(out.to_form(alg, Target::Algebroid))
}

/// `R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z` straight
/// from the Christoffel table.
pub fn curvature_direct(conn: &Connection, x: &Section, y: &Section, s: &Section) -> Section {
    let alg = conn.algebroid();
    let (x, y, s) = (x.coeffs(), y.coeffs(), s.coeffs());
    let xy = cov_sections(conn, x, &cov_sections(conn, y, s));
    let yx = cov_sections(conn, y, &cov_sections(conn, x, s));
    let br = cov_sections(conn, &bracket_sections(alg, x, y), s);
    Section::new(
        xy.iter()
            .zip(&yx)
            .zip(&br)
            .map(|((a, b), c)| &(a - b) - c)
            .collect(),
    )
}

/// Extended curvature by full alternation over `S_{k+l+1}` divided by `k! l!`,
/// with the curvature evaluated by [`curvature_direct`].
pub fn r_extended_bruteforce(conn_a: &Connection, phi: &VForm, psi: &VForm) -> Result<VForm> {
    if phi.target() != Target::Algebroid || psi.target() != Target::Algebroid {
        return Err(Error::NotAlgebroidValued);
    }
    let alg = conn_a.algebroid();
    let (k, l) = (phi.degree(), psi.degree());
    let r = alg.rank();
    let mut out = Dense::zero(k + l + 1, r, r, alg.nvars());
    if k < 0 || l < 0 || out.is_trivially_zero() {
        return Ok(out.to_form(alg, Target::Algebroid));
    }
    let (k, l) = (k as usize, l as usize);
    let (dphi, dpsi) = (Dense::from_form(phi), Dense::from_form(psi));
    let perms = permutations(k + l + 1);
    let weight = Rational::new(1.into(), (factorial(k) * factorial(l)).into());
    for t in out.tuples() {
        let mut acc = Section::zero(r, alg.nvars());
        for (perm, sign) in &perms {
            let z: Vec<usize> = perm.iter().map(|&i| t[i]).collect();
            let x = Section::new(dphi.at(&z[..k]).to_vec());
            let y = Section::new(dpsi.at(&z[k..k + l]).to_vec());
            let v = curvature_direct(conn_a, &x, &y, &Section::new(frame(alg, z[k + l])));
            if *sign == 1 {
                acc.add_assign(&v);
            } else {
                acc.sub_assign(&v);
            }
        }
        let code = out.code(&t);
        out.data[code] = acc.scale_rat(&weight).into_coeffs();
    }
    Ok(out.to_form(alg, Target::Algebroid))
}

/// Classical Nijenhuis torsion
/// `N_J(X,Y) = [JX,JY] - J[JX,Y] - J[X,JY] + J^2[X,Y]` on frame pairs.
pub fn nijenhuis_classical(algebroid: &Algebroid, j: &VForm) -> Result<VForm> {
    if j.target() != Target::Algebroid || j.degree() != 1 {
        return Err(Error::DegreeMismatch("expected a (1,1)-tensor".into()));
    }
    let dj = Dense::from_form(j);
    let apply = |x: &[Poly]| -> Vec<Poly> {
        let mut out = vec![Poly::zero(algebroid.nvars()); algebroid.rank()];
        for (a, xa) in x.iter().enumerate() {
            for (slot, v) in out.iter_mut().zip(dj.at(&[a])) {
                *slot += &(xa * v);
            }
        }
        out
    };
    let r = algebroid.rank();
    let comps = MultiIndex::all(r, 2).into_iter().map(|idx| {
        let (x, y) = (
            frame(algebroid, idx.entries()[0]),
            frame(algebroid, idx.entries()[1]),
        );
        let (jx, jy) = (apply(&x), apply(&y));
        let t1 = bracket_sections(algebroid, &jx, &jy);
        let t2 = apply(&bracket_sections(algebroid, &jx, &y));
        let t3 = apply(&bracket_sections(algebroid, &x, &jy));
        let t4 = apply(&apply(&bracket_sections(algebroid, &x, &y)));
        let v: Vec<Poly> = (0..r)
            .map(|c| &(&(&t1[c] - &t2[c]) - &t3[c]) + &t4[c])
            .collect();
        (idx, Section::new(v))
    });
    VForm::from_components(algebroid, 2, Target::Algebroid, comps)
}

/// Jacobi sum `[[X,Y],Z] + cyclic` for general sections.
pub fn jacobi_sum(algebroid: &Algebroid, x: &Section, y: &Section, z: &Section) -> Section {
    let br = |a: &[Poly], b: &[Poly]| bracket_sections(algebroid, a, b);
    let (x, y, z) = (x.coeffs(), y.coeffs(), z.coeffs());
    let a = br(&br(x, y), z);
    let b = br(&br(y, z), x);
    let c = br(&br(z, x), y);
    Section::new(
        (0..algebroid.rank())
            .map(|i| &(&a[i] + &b[i]) + &c[i])
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fncalc::{default_connection, fn_bracket, r_extended};
    use crate::random::FormSampler;
    use crate::vforms::insert;
    use std::sync::Arc;

    #[test]
    fn permutation_signs() {
        let perms = permutations(3);
        assert_eq!(perms.len(), 6);
        for (p, s) in perms {
            let inv = (0..3)
                .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            assert_eq!(s, if inv % 2 == 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn insert_bruteforce_matches_shuffles_on_so3() {
        let g = Algebroid::so3();
        let mut s = FormSampler::new(&g, 17);
        for p in 0..=3 {
            for k in 0..=3 {
                if p + k > 4 {
                    continue;
                }
                let phi = s.form(p, Target::Algebroid);
                let psi = s.form(k + 1, Target::bundle(2).unwrap());
                assert_eq!(
                    insert_bruteforce(&phi, &psi, &g).unwrap(),
                    insert(&phi, &psi).unwrap()
                );
            }
        }
    }

    #[test]
    fn bruteforce_identity_insertion_doubles_two_forms() {
        let g = Algebroid::heisenberg();
        let mut s = FormSampler::new(&g, 3);
        let psi = s.form(2, Target::Scalar);
        let got = insert_bruteforce(&VForm::identity(&g), &psi, &g).unwrap();
        assert_eq!(got, psi.scale(&rat(2)));
        let zero = VForm::zero(&g, 2, Target::Scalar);
        assert!(insert_bruteforce(&VForm::identity(&g), &zero, &g)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn extraction_of_sections_is_the_bracket() {
        for (_, g) in Algebroid::zoo() {
            let g = Arc::new(g);
            let conn = default_connection(g.clone());
            let mut s = FormSampler::new(&g, 1);
            let (x, y) = (s.section(), s.section());
            let fx = VForm::section(&g, Target::Algebroid, x.clone()).unwrap();
            let fy = VForm::section(&g, Target::Algebroid, y.clone()).unwrap();
            let k = fn_extract(&conn, &fx, &fy).unwrap();
            assert_eq!(
                k,
                VForm::section(&g, Target::Algebroid, g.bracket(&x, &y).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn extraction_matches_bracket_and_is_graded_antisymmetric() {
        let g = Arc::new(Algebroid::aff1_action());
        let mut s = FormSampler::new(&g, 31);
        let conn = s.torsion_free(g.clone());
        for k in 0..=2usize {
            for l in 0..=2usize {
                let phi = s.form(k, Target::Algebroid);
                let psi = s.form(l, Target::Algebroid);
                let a = fn_extract(&conn, &phi, &psi).unwrap();
                assert_eq!(a, fn_bracket(&conn, &phi, &psi).unwrap());
                let b = fn_extract(&conn, &psi, &phi).unwrap();
                let sign = if (k * l) % 2 == 0 { -1 } else { 1 };
                assert_eq!(a, b.scale(&rat(sign)));
            }
        }
    }

    #[test]
    fn extraction_rejects_torsion() {
        let g = Arc::new(Algebroid::so3());
        let c = Connection::zero(g.clone(), Target::Algebroid);
        let id = VForm::identity(&g);
        assert_eq!(fn_extract(&c, &id, &id), Err(Error::Torsionful));
    }

    #[test]
    fn r_extended_matches_bruteforce() {
        let g = Arc::new(Algebroid::so3());
        let conn = default_connection(g.clone());
        // e^1 ⊗ e_1 against e_2
        let phi = crate::vforms::wedge(
            &VForm::dual(&g, 0).unwrap(),
            &VForm::section(&g, Target::Algebroid, g.basis(0)).unwrap(),
        )
        .unwrap();
        let psi = VForm::section(&g, Target::Algebroid, g.basis(1)).unwrap();
        let main = r_extended(&conn, &phi, &psi).unwrap();
        assert_eq!(main, r_extended_bruteforce(&conn, &phi, &psi).unwrap());
        assert!(!main.is_zero());
    }

    #[test]
    fn classical_nijenhuis_of_aff1_complex_structure() {
        let g = Algebroid::aff1();
        let j = crate::vforms::wedge(
            &VForm::dual(&g, 0).unwrap(),
            &VForm::section(&g, Target::Algebroid, g.basis(1)).unwrap(),
        )
        .unwrap()
        .checked_sub(
            &crate::vforms::wedge(
                &VForm::dual(&g, 1).unwrap(),
                &VForm::section(&g, Target::Algebroid, g.basis(0)).unwrap(),
            )
            .unwrap(),
        )
        .unwrap();
        assert!(nijenhuis_classical(&g, &j).unwrap().is_zero());
    }

    #[test]
    fn jacobi_sum_detects_failure() {
        let one = rat(1);
        let g = Algebroid::lie_algebra(3, &[(0, 1, 2, one.clone()), (0, 2, 0, one)]).unwrap();
        let j = jacobi_sum(&g, &g.basis(0), &g.basis(1), &g.basis(2));
        assert_eq!(j, -&g.basis(2));
    }
}
