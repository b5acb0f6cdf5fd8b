//! Vector-valued forms `Omega^k(A, E)` stored by frame components, with the
//! shuffle machinery, the module action `omega ∧ phi` and the insertion
//! operator `i_phi`.

use std::borrow::Borrow;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::algebroid::{Algebroid, Section, Target};
use crate::error::{Error, Result};
use crate::scalars::{Poly, Rational};

/// Strictly increasing list of 0-based frame indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMultiIndex(entries));
        }
        Ok(MultiIndex(entries))
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All increasing `k`-subsets of `0..n` in lexicographic order.
    pub fn all(n: usize, k: usize) -> Vec<MultiIndex> {
        combinations(n, k).into_iter().map(MultiIndex).collect()
    }
}

impl Borrow<[usize]> for MultiIndex {
    fn borrow(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", e + 1)?;
        }
        write!(f, ")")
    }
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for i in start..=n.saturating_sub(need) {
            if i >= n {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// A permutation of `0..m` that is increasing on each block of a profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shuffle {
    /// `perm[i]` is the image of `i` (0-based `sigma(i+1) - 1`).
    pub perm: Vec<usize>,
    /// Parity of `perm`, `+1` or `-1`.
    pub sign: i64,
}

type ShuffleCache = RwLock<HashMap<Vec<usize>, Arc<[Shuffle]>>>;

/// Shuffles for a block profile such as `[k, s]` or `[k, l, s]`.
///
/// Lists `m! / (k1! k2! ...)` permutations, lexicographic in the block
/// choices. Results are memoised per profile.
pub fn enumerate_shuffles(profile: &[usize]) -> Arc<[Shuffle]> {
    static CACHE: OnceLock<ShuffleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.read().expect("shuffle cache").get(profile) {
        return hit.clone();
    }
    let m: usize = profile.iter().sum();
    let mut out = Vec::new();
    let remaining: Vec<usize> = (0..m).collect();
    fill_blocks(profile, &remaining, &mut Vec::with_capacity(m), &mut out);
    let shuffles: Arc<[Shuffle]> = out.into();
    cache
        .write()
        .expect("shuffle cache")
        .insert(profile.to_vec(), shuffles.clone());
    shuffles
}

fn fill_blocks(
    blocks: &[usize],
    remaining: &[usize],
    prefix: &mut Vec<usize>,
    out: &mut Vec<Shuffle>,
) {
    let Some((&k, rest)) = blocks.split_first() else {
        out.push(Shuffle {
            sign: permutation_sign(prefix),
            perm: prefix.clone(),
        });
        return;
    };
    for choice in combinations(remaining.len(), k) {
        let start = prefix.len();
        prefix.extend(choice.iter().map(|&i| remaining[i]));
        let left: Vec<usize> = remaining
            .iter()
            .enumerate()
            .filter(|(i, _)| !choice.contains(i))
            .map(|(_, &v)| v)
            .collect();
        fill_blocks(rest, &left, prefix, out);
        prefix.truncate(start);
    }
}

fn permutation_sign(perm: &[usize]) -> i64 {
    let mut inversions = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sorts an index list, returning the sign of the sorting permutation, or
/// `None` when an index repeats.
pub(crate) fn sort_signed(idx: &[usize]) -> Option<(i64, Vec<usize>)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && v[j - 1] == v[j] {
            return None;
        }
    }
    Some((sign, v))
}

/// An element of `Omega^k(A, E)`: components on increasing frame tuples.
///
/// Absent components are zero. Forms of degree above the rank, and of
/// negative degree (produced transiently by operator compositions), have no
/// components at all.
#[derive(Clone, PartialEq, Eq)]
pub struct VForm {
    degree: isize,
    rank: usize,
    nvars: usize,
    target: Target,
    components: BTreeMap<MultiIndex, Section>,
}

impl VForm {
    pub fn zero(algebroid: &Algebroid, degree: isize, target: Target) -> Self {
        VForm {
            degree,
            rank: algebroid.rank(),
            nvars: algebroid.nvars(),
            target,
            components: BTreeMap::new(),
        }
    }

    /// The zero form of the same shape as `self`, at another degree.
    pub fn zero_like(&self, degree: isize) -> Self {
        VForm {
            degree,
            rank: self.rank,
            nvars: self.nvars,
            target: self.target,
            components: BTreeMap::new(),
        }
    }

    pub fn from_components<I>(
        algebroid: &Algebroid,
        degree: usize,
        target: Target,
        components: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Section)>,
    {
        let mut form = Self::zero(algebroid, degree as isize, target);
        let fiber = form.fiber();
        for (idx, value) in components {
            if idx.len() != degree {
                return Err(Error::DegreeMismatch(format!(
                    "multi-index {idx} has length {}, form degree is {degree}",
                    idx.len()
                )));
            }
            if let Some(&bad) = idx.entries().iter().find(|&&i| i >= form.rank) {
                return Err(Error::IndexOutOfRange {
                    what: "frame",
                    index: bad,
                    bound: form.rank,
                });
            }
            if value.rank() != fiber {
                return Err(Error::LengthMismatch {
                    what: "form value",
                    expected: fiber,
                    found: value.rank(),
                });
            }
            if let Some(p) = value.coeffs().iter().find(|p| p.nvars() != form.nvars) {
                return Err(Error::VariableMismatch {
                    left: form.nvars,
                    right: p.nvars(),
                });
            }
            form.accumulate(idx, &value);
        }
        Ok(form)
    }

    /// A degree-0 form, i.e. a section of the target.
    pub fn section(algebroid: &Algebroid, target: Target, s: Section) -> Result<Self> {
        Self::from_components(algebroid, 0, target, [(MultiIndex(Vec::new()), s)])
    }

    /// A function viewed as a scalar 0-form.
    pub fn function(algebroid: &Algebroid, f: Poly) -> Result<Self> {
        Self::section(algebroid, Target::Scalar, Section::new(vec![f]))
    }

    /// The identity endomorphism as an element of `Omega^1(A, A)`.
    pub fn identity(algebroid: &Algebroid) -> Self {
        let comps = (0..algebroid.rank()).map(|a| (MultiIndex(vec![a]), algebroid.basis(a)));
        Self::from_components(algebroid, 1, Target::Algebroid, comps).expect("identity components")
    }

    /// The dual frame 1-form `e^c`.
    pub fn dual(algebroid: &Algebroid, c: usize) -> Result<Self> {
        if c >= algebroid.rank() {
            return Err(Error::IndexOutOfRange {
                what: "frame",
                index: c,
                bound: algebroid.rank(),
            });
        }
        let one = Section::new(vec![Poly::one(algebroid.nvars())]);
        Self::from_components(algebroid, 1, Target::Scalar, [(MultiIndex(vec![c]), one)])
    }

    pub(crate) fn build<F>(like: &VForm, degree: isize, target: Target, mut f: F) -> VForm
    where
        F: FnMut(&[usize]) -> Section,
    {
        let mut out = like.zero_like(degree);
        out.target = target;
        if degree < 0 {
            return out;
        }
        for idx in MultiIndex::all(out.rank, degree as usize) {
            let v = f(idx.entries());
            if !v.is_zero() {
                out.components.insert(idx, v);
            }
        }
        out
    }

    fn accumulate(&mut self, idx: MultiIndex, value: &Section) {
        let slot = self
            .components
            .entry(idx)
            .or_insert_with(|| Section::zero(value.rank(), self.nvars));
        slot.add_assign(value);
        self.components.retain(|_, v| !v.is_zero());
    }

    pub fn degree(&self) -> isize {
        self.degree
    }

    /// Rank of the source algebroid.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn target(&self) -> Target {
        self.target
    }

    /// Fiber dimension of the target.
    pub fn fiber(&self) -> usize {
        self.target.rank(self.rank)
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Nonzero components in lexicographic multi-index order.
    pub fn components(&self) -> impl Iterator<Item = (&MultiIndex, &Section)> {
        self.components.iter()
    }

    pub fn zero_value(&self) -> Section {
        Section::zero(self.fiber(), self.nvars)
    }

    /// Component on an increasing index tuple.
    pub fn get(&self, idx: &[usize]) -> Option<&Section> {
        self.components.get(idx)
    }

    /// Value on an arbitrary frame tuple, with the alternating sign.
    pub fn value(&self, idx: &[usize]) -> Section {
        match self.signed(idx) {
            Some((1, v)) => v.clone(),
            Some((_, v)) => -v,
            None => self.zero_value(),
        }
    }

    /// Signed lookup of an arbitrary frame tuple.
    pub(crate) fn signed(&self, idx: &[usize]) -> Option<(i64, &Section)> {
        if idx.len() as isize != self.degree {
            return None;
        }
        let (sign, sorted) = sort_signed(idx)?;
        self.components.get(sorted.as_slice()).map(|v| (sign, v))
    }

    /// Lookup of `(e_c, e_J)` with `J` increasing.
    pub(crate) fn signed_front(&self, c: usize, rest: &[usize]) -> Option<(i64, &Section)> {
        let pos = rest.partition_point(|&j| j < c);
        if rest.get(pos) == Some(&c) {
            return None;
        }
        let mut key = Vec::with_capacity(rest.len() + 1);
        key.extend_from_slice(&rest[..pos]);
        key.push(c);
        key.extend_from_slice(&rest[pos..]);
        let sign = if pos % 2 == 0 { 1 } else { -1 };
        self.components.get(key.as_slice()).map(|v| (sign, v))
    }

    /// Value on a frame tuple whose slot `t` is replaced by a general
    /// section `x`, expanded by multilinearity.
    pub(crate) fn value_with_slot(&self, idx: &[usize], t: usize, x: &Section) -> Section {
        let mut out = self.zero_value();
        let mut args = idx.to_vec();
        for (d, xd) in x.coeffs().iter().enumerate() {
            if xd.is_zero() {
                continue;
            }
            args[t] = d;
            if let Some((sign, v)) = self.signed(&args) {
                let f = if sign == 1 { xd.clone() } else { -xd };
                out.add_scaled(&f, v);
            }
        }
        out
    }

    fn check_compatible(&self, other: &VForm) -> Result<()> {
        if self.rank != other.rank || self.nvars != other.nvars {
            return Err(Error::BundleMismatch(
                "forms over different algebroids".into(),
            ));
        }
        if self.target != other.target {
            return Err(Error::BundleMismatch(format!(
                "targets {} and {} differ",
                self.target, other.target
            )));
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub(crate) fn check_source(&self, algebroid: &Algebroid) -> Result<()> {
        if self.rank != algebroid.rank() || self.nvars != algebroid.nvars() {
            return Err(Error::BundleMismatch(format!(
                "form over a rank-{} algebroid in {} variables used with a rank-{} algebroid in {} variables",
                self.rank,
                self.nvars,
                algebroid.rank(),
                algebroid.nvars()
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &VForm) -> Result<VForm> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (idx, v) in &other.components {
            out.add_at(idx, v, false);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &VForm) -> Result<VForm> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (idx, v) in &other.components {
            out.add_at(idx, v, true);
        }
        Ok(out)
    }

    fn add_at(&mut self, idx: &MultiIndex, v: &Section, negate: bool) {
        let zero = self.zero_value();
        let slot = self.components.entry(idx.clone()).or_insert(zero);
        if negate {
            slot.sub_assign(v);
        } else {
            slot.add_assign(v);
        }
        if slot.is_zero() {
            self.components.remove(idx);
        }
    }

    /// `sum c_i * form_i`; all forms must share degree and target.
    pub fn combination<'a, I>(like: &VForm, terms: I) -> Result<VForm>
    where
        I: IntoIterator<Item = (Rational, &'a VForm)>,
    {
        let mut out = like.zero_like(like.degree);
        for (c, f) in terms {
            out = out.checked_add(&f.scale(&c))?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> VForm {
        let mut out = self.zero_like(self.degree);
        out.target = self.target;
        for (idx, v) in &self.components {
            let w = v.scale_rat(c);
            if !w.is_zero() {
                out.components.insert(idx.clone(), w);
            }
        }
        out
    }

    pub fn neg(&self) -> VForm {
        self.scale(&-Rational::from_integer(1.into()))
    }

    /// Pointwise product with a function.
    pub fn scale_poly(&self, f: &Poly) -> VForm {
        let mut out = self.zero_like(self.degree);
        out.target = self.target;
        for (idx, v) in &self.components {
            let w = v.scale(f);
            if !w.is_zero() {
                out.components.insert(idx.clone(), w);
            }
        }
        out
    }

    /// Evaluation on general sections of `A`, by multilinear expansion over
    /// the frame.
    pub fn eval(&self, args: &[Section]) -> Result<Section> {
        if self.degree < 0 || args.len() != self.degree as usize {
            return Err(Error::DegreeMismatch(format!(
                "form of degree {} evaluated on {} arguments",
                self.degree,
                args.len()
            )));
        }
        for a in args {
            if a.rank() != self.rank {
                return Err(Error::BundleMismatch(format!(
                    "argument has {} components, algebroid rank is {}",
                    a.rank(),
                    self.rank
                )));
            }
        }
        let mut out = self.zero_value();
        let mut idx = Vec::with_capacity(args.len());
        self.eval_rec(args, &mut idx, &Poly::one(self.nvars), &mut out);
        Ok(out)
    }

    fn eval_rec(&self, args: &[Section], idx: &mut Vec<usize>, weight: &Poly, out: &mut Section) {
        let j = idx.len();
        if j == args.len() {
            if let Some((sign, v)) = self.signed(idx) {
                let w = if sign == 1 { weight.clone() } else { -weight };
                out.add_scaled(&w, v);
            }
            return;
        }
        for i in 0..self.rank {
            let c = args[j].coeff(i);
            if c.is_zero() || idx.contains(&i) {
                continue;
            }
            idx.push(i);
            self.eval_rec(args, idx, &(weight * c), out);
            idx.pop();
        }
    }

    /// Short human-readable rendering used in reports.
    pub fn summary(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for VForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "deg={} target={} {{", self.degree, self.target)?;
        for (i, (idx, v)) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{idx}: {v}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for VForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VForm({self})")
    }
}

/// `omega ∧ phi` for a scalar form `omega`; this is also `epsilon_omega(phi)`.
pub fn wedge(omega: &VForm, phi: &VForm) -> Result<VForm> {
    if omega.target != Target::Scalar {
        return Err(Error::NotScalar);
    }
    if omega.rank != phi.rank || omega.nvars != phi.nvars {
        return Err(Error::BundleMismatch(
            "forms over different algebroids".into(),
        ));
    }
    let degree = omega.degree + phi.degree;
    if omega.degree < 0 || phi.degree < 0 {
        return Ok(phi.zero_like(degree));
    }
    let (k, p) = (omega.degree as usize, phi.degree as usize);
    let shuffles = enumerate_shuffles(&[k, p]);
    Ok(VForm::build(phi, degree, phi.target, |idx| {
        let mut acc = phi.zero_value();
        let mut left = Vec::with_capacity(k);
        let mut right = Vec::with_capacity(p);
        for sh in shuffles.iter() {
            left.clear();
            right.clear();
            left.extend(sh.perm[..k].iter().map(|&t| idx[t]));
            right.extend(sh.perm[k..].iter().map(|&t| idx[t]));
            let (Some(w), Some(v)) = (omega.get(&left), phi.get(&right)) else {
                continue;
            };
            let f = if sh.sign == 1 {
                w.coeff(0).clone()
            } else {
                -w.coeff(0)
            };
            acc.add_scaled(&f, v);
        }
        acc
    }))
}

/// The insertion operator `i_phi psi` for `phi` in `Omega^p(A, A)`:
///
/// ```text
/// (i_phi psi)(Z_1..Z_{p+k}) = sum_{Sh_{p,k}} sign * psi(phi(Z_s1..Z_sp), Z_s(p+1)..)
/// ```
///
/// On a 0-form the result is zero, of degree `p - 1`.
pub fn insert(phi: &VForm, psi: &VForm) -> Result<VForm> {
    if phi.target != Target::Algebroid {
        return Err(Error::NotAlgebroidValued);
    }
    if phi.rank != psi.rank || phi.nvars != psi.nvars {
        return Err(Error::BundleMismatch(
            "forms over different algebroids".into(),
        ));
    }
    let degree = phi.degree + psi.degree - 1;
    if phi.degree < 0 || psi.degree <= 0 {
        return Ok(psi.zero_like(degree));
    }
    let (p, k) = (phi.degree as usize, psi.degree as usize - 1);
    let shuffles = enumerate_shuffles(&[p, k]);
    Ok(VForm::build(psi, degree, psi.target, |idx| {
        let mut acc = psi.zero_value();
        let mut left = Vec::with_capacity(p);
        let mut right = Vec::with_capacity(k);
        for sh in shuffles.iter() {
            left.clear();
            right.clear();
            left.extend(sh.perm[..p].iter().map(|&t| idx[t]));
            right.extend(sh.perm[p..].iter().map(|&t| idx[t]));
            let Some(x) = phi.get(&left) else { continue };
            for (c, xc) in x.coeffs().iter().enumerate() {
                if xc.is_zero() {
                    continue;
                }
                if let Some((sign, v)) = psi.signed_front(c, &right) {
                    let f = if sign * sh.sign == 1 { xc.clone() } else { -xc };
                    acc.add_scaled(&f, v);
                }
            }
        }
        acc
    }))
}
