//! Super differential polynomials with exact rational coefficients.
//!
//! The algebra is generated by variables `u_i` of fixed parity together with
//! all their derivatives `u_i^(m) = D^m(u_i)` under an odd derivation `D`.
//! Products are supercommutative: transposing two odd factors flips the
//! sign, and the square of an odd factor is zero.  Every polynomial is kept
//! in a canonical normal form (factors of each monomial sorted by variable
//! index, then derivative order) so that equality is literal equality of the
//! term maps.

use crate::Rat;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Parity of a homogeneous element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_u64(n: u64) -> Parity {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn as_u64(self) -> u64 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }
}

impl std::ops::Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_u64(self.as_u64() + rhs.as_u64())
    }
}

/// A generator of the differential superalgebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variable {
    pub index: u32,
    pub parity: Parity,
}

impl Variable {
    pub fn new(index: u32, parity: Parity) -> Self {
        Variable { index, parity }
    }
}

/// The derivative `D^m(u_i)`, the actual indeterminates of the polynomial
/// ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DerivedVar {
    pub var: Variable,
    pub order: u32,
}

impl DerivedVar {
    pub fn new(var: Variable, order: u32) -> Self {
        DerivedVar { var, order }
    }

    pub fn parity(&self) -> Parity {
        Parity::from_u64(self.var.parity.as_u64() + self.order as u64)
    }

    pub fn raised(&self) -> DerivedVar {
        DerivedVar {
            var: self.var,
            order: self.order + 1,
        }
    }

    fn key(&self) -> (u32, u32) {
        (self.var.index, self.order)
    }
}

impl PartialOrd for DerivedVar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DerivedVar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

/// Factor list of a monomial: strictly increasing in the `(index, order)`
/// order, odd factors with multiplicity exactly one.
pub type Factors = Vec<(DerivedVar, u32)>;

/// A single canonical monomial with its coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: Rat,
    pub factors: Factors,
}

/// Registry of variable names and parities; index equals position.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarSet {
    names: Vec<String>,
    parities: Vec<Parity>,
}

impl VarSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, parity: Parity) -> Variable {
        let index = self.names.len() as u32;
        self.names.push(name.into());
        self.parities.push(parity);
        Variable { index, parity }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn var(&self, index: u32) -> Variable {
        Variable {
            index,
            parity: self.parities[index as usize],
        }
    }

    pub fn name(&self, index: u32) -> &str {
        &self.names[index as usize]
    }

    pub fn lookup(&self, name: &str) -> Option<Variable> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.var(i as u32))
    }

    pub fn vars(&self) -> impl Iterator<Item = Variable> + '_ {
        (0..self.names.len() as u32).map(|i| self.var(i))
    }
}

/// Homogeneity classification of a polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityKind {
    Zero,
    Homogeneous(Parity),
    Mixed,
}

/// Element of the superalgebra of super differential polynomials.
///
/// Terms are kept in a canonical map from factor lists to nonzero rational
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SPoly {
    terms: BTreeMap<Factors, Rat>,
}

/// Sorts an arbitrarily ordered factor list, tracking the Koszul sign and
/// annihilating squares of odd factors.  Returns `None` when the monomial
/// vanishes.
fn canonicalize(mut list: Vec<(DerivedVar, u32)>) -> Option<(Factors, i32)> {
    let mut sign = 1i32;
    // insertion sort; block (dv1, m1) crossing (dv2, m2) costs
    // (-1)^{p1 p2 m1 m2}
    for i in 1..list.len() {
        let mut j = i;
        while j > 0 && list[j - 1].0 > list[j].0 {
            let (a, b) = (list[j - 1], list[j]);
            if a.0.parity().is_odd()
                && b.0.parity().is_odd()
                && (a.1 % 2 == 1)
                && (b.1 % 2 == 1)
            {
                sign = -sign;
            }
            list.swap(j - 1, j);
            j -= 1;
        }
    }
    // coalesce equal factors
    let mut out: Factors = Vec::with_capacity(list.len());
    for (dv, m) in list {
        if m == 0 {
            continue;
        }
        if let Some(last) = out.last_mut() {
            if last.0 == dv {
                last.1 += m;
                if dv.parity().is_odd() && last.1 > 1 {
                    return None;
                }
                continue;
            }
        }
        if dv.parity().is_odd() && m > 1 {
            return None;
        }
        out.push((dv, m));
    }
    Some((out, sign))
}

impl SPoly {
    pub fn zero() -> Self {
        SPoly::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = SPoly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn var(v: Variable) -> Self {
        Self::derived(v, 0)
    }

    pub fn derived(v: Variable, order: u32) -> Self {
        let mut p = SPoly::zero();
        p.add_term(vec![(DerivedVar::new(v, order), 1)], Rat::one());
        p
    }

    pub fn monomial(coeff: Rat, list: Vec<(DerivedVar, u32)>) -> Self {
        let mut p = SPoly::zero();
        if let Some((factors, sign)) = canonicalize(list) {
            p.add_term(factors, coeff * Rat::from_integer(sign.into()));
        }
        p
    }

    fn add_term(&mut self, factors: Factors, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(factors);
        match entry {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms.iter().map(|(f, c)| Monomial {
            coeff: c.clone(),
            factors: f.clone(),
        })
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn constant_term(&self) -> Rat {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn scale(&self, c: &Rat) -> SPoly {
        if c.is_zero() {
            return SPoly::zero();
        }
        SPoly {
            terms: self
                .terms
                .iter()
                .map(|(f, v)| (f.clone(), v.clone() * c))
                .collect(),
        }
    }

    pub fn parity_kind(&self) -> ParityKind {
        let mut found: Option<Parity> = None;
        for f in self.terms.keys() {
            let p = monomial_parity(f);
            match found {
                None => found = Some(p),
                Some(q) if q == p => {}
                Some(_) => return ParityKind::Mixed,
            }
        }
        match found {
            None => ParityKind::Zero,
            Some(p) => ParityKind::Homogeneous(p),
        }
    }

    /// Splits into (even, odd) parts.
    pub fn parity_parts(&self) -> (SPoly, SPoly) {
        let mut even = SPoly::zero();
        let mut odd = SPoly::zero();
        for (f, c) in &self.terms {
            match monomial_parity(f) {
                Parity::Even => even.add_term(f.clone(), c.clone()),
                Parity::Odd => odd.add_term(f.clone(), c.clone()),
            }
        }
        (even, odd)
    }

    /// Largest derivative order of `var` occurring in the polynomial.
    pub fn max_order(&self, var: u32) -> Option<u32> {
        self.terms
            .keys()
            .flat_map(|f| f.iter())
            .filter(|(dv, _)| dv.var.index == var)
            .map(|(dv, _)| dv.order)
            .max()
    }

    /// Indices of the variables occurring in the polynomial.
    pub fn variables(&self) -> std::collections::BTreeSet<u32> {
        self.terms
            .keys()
            .flat_map(|f| f.iter())
            .map(|(dv, _)| dv.var.index)
            .collect()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|f| f.iter().map(|(_, m)| *m).sum())
            .max()
            .unwrap_or(0)
    }

    /// Supercommutative product.
    pub fn multiply(&self, other: &SPoly) -> SPoly {
        let mut out = SPoly::zero();
        for (fa, ca) in &self.terms {
            for (fb, cb) in &other.terms {
                // merge two sorted factor lists, counting odd-odd crossings
                let mut sign = 1i32;
                let mut merged: Factors = Vec::with_capacity(fa.len() + fb.len());
                let mut ia = 0;
                let mut ib = 0;
                // parity weight of the tail of fa not yet consumed
                let mut zero = false;
                let odd_tail: Vec<u32> = {
                    // odd_tail[i] = number of odd factor copies in fa[i..]
                    let mut v = vec![0u32; fa.len() + 1];
                    for i in (0..fa.len()).rev() {
                        v[i] = v[i + 1]
                            + if fa[i].0.parity().is_odd() { fa[i].1 } else { 0 };
                    }
                    v
                };
                while ia < fa.len() || ib < fb.len() {
                    let take_a = match (fa.get(ia), fb.get(ib)) {
                        (Some(a), Some(b)) => a.0 <= b.0,
                        (Some(_), None) => true,
                        (None, Some(_)) => false,
                        (None, None) => unreachable!(),
                    };
                    if take_a {
                        push_factor(&mut merged, fa[ia], &mut zero);
                        ia += 1;
                    } else {
                        let (dv, m) = fb[ib];
                        // dv crosses every remaining odd copy of fa
                        if dv.parity().is_odd() && m % 2 == 1 && odd_tail[ia] % 2 == 1 {
                            sign = -sign;
                        }
                        push_factor(&mut merged, (dv, m), &mut zero);
                        ib += 1;
                    }
                    if zero {
                        break;
                    }
                }
                if zero {
                    continue;
                }
                out.add_term(merged, ca.clone() * cb * Rat::from_integer(sign.into()));
            }
        }
        out
    }

    /// The odd derivation `D`.
    pub fn apply_d(&self) -> SPoly {
        let mut out = SPoly::zero();
        for (f, c) in &self.terms {
            let mut prefix_odd = 0u32;
            for (j, (dv, m)) in f.iter().enumerate() {
                let mut list: Vec<(DerivedVar, u32)> = Vec::with_capacity(f.len() + 1);
                list.extend_from_slice(&f[..j]);
                list.push((*dv, m - 1));
                list.push((dv.raised(), 1));
                list.extend_from_slice(&f[j + 1..]);
                if let Some((factors, sign)) = canonicalize(list) {
                    let s = if prefix_odd % 2 == 1 { -1 } else { 1 };
                    out.add_term(
                        factors,
                        c.clone()
                            * Rat::from_integer((*m as i64).into())
                            * Rat::from_integer((sign * s).into()),
                    );
                }
                if dv.parity().is_odd() {
                    prefix_odd += m;
                }
            }
        }
        out
    }

    pub fn apply_d_n(&self, n: u32) -> SPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.apply_d();
        }
        p
    }

    /// Partial derivative with respect to the indeterminate `u_i^(m)`.
    /// A derivation of parity `p(u_i) + m`.
    pub fn partial(&self, dv: DerivedVar) -> SPoly {
        let p_deriv = dv.parity();
        let mut out = SPoly::zero();
        for (f, c) in &self.terms {
            let mut prefix_odd = 0u32;
            for (j, (g, m)) in f.iter().enumerate() {
                if *g == dv {
                    let mut list: Vec<(DerivedVar, u32)> = Vec::with_capacity(f.len());
                    list.extend_from_slice(&f[..j]);
                    list.push((*g, m - 1));
                    list.extend_from_slice(&f[j + 1..]);
                    if let Some((factors, sign)) = canonicalize(list) {
                        let s = if p_deriv.is_odd() && prefix_odd % 2 == 1 {
                            -1
                        } else {
                            1
                        };
                        out.add_term(
                            factors,
                            c.clone()
                                * Rat::from_integer((*m as i64).into())
                                * Rat::from_integer((sign * s).into()),
                        );
                    }
                }
                if g.parity().is_odd() {
                    prefix_odd += m;
                }
            }
        }
        out
    }

    /// Variational derivative with respect to the generator `var`:
    /// the alternating sum of `D^m` of the partials.
    pub fn variational(&self, var: Variable) -> SPoly {
        let Some(max) = self.max_order(var.index) else {
            return SPoly::zero();
        };
        let mut out = SPoly::zero();
        for m in 0..=max {
            let part = self.partial(DerivedVar::new(var, m));
            if part.is_zero() {
                continue;
            }
            let exp = (m as u64) * var.parity.as_u64() + (m as u64) * (m as u64 + 1) / 2;
            let term = part.apply_d_n(m);
            if exp % 2 == 0 {
                out = &out + &term;
            } else {
                out = &out - &term;
            }
        }
        out
    }

    /// Substitutes `replacement` for the generator with index `var_index`
    /// (derivatives replaced by derivatives of the replacement).  The
    /// replacement must be parity-homogeneous of the variable's parity, or
    /// zero.
    pub fn substitute(&self, var_index: u32, replacement: &SPoly) -> SPoly {
        let mut out = SPoly::zero();
        let mut d_cache: BTreeMap<u32, SPoly> = BTreeMap::new();
        for (f, c) in &self.terms {
            let mut acc = SPoly::constant(c.clone());
            for (dv, m) in f {
                let piece = if dv.var.index == var_index {
                    let base = d_cache
                        .entry(dv.order)
                        .or_insert_with(|| replacement.apply_d_n(dv.order))
                        .clone();
                    let mut pow = SPoly::one();
                    for _ in 0..*m {
                        pow = pow.multiply(&base);
                    }
                    pow
                } else {
                    SPoly::monomial(Rat::one(), vec![(*dv, *m)])
                };
                acc = acc.multiply(&piece);
                if acc.is_zero() {
                    break;
                }
            }
            out = &out + &acc;
        }
        out
    }

    /// Leading monomial in the integration-by-parts order (largest factor
    /// first, compared lexicographically).

    /// Canonical representative modulo the image of `D`.
    ///
    /// Repeatedly rewrites the largest monomial whose leader `u_i^(m)`
    /// (`m >= 1`) occurs with multiplicity one and whose lowered leader
    /// `u_i^(m-1)` is even or absent, by subtracting a total derivative.
    pub fn functional_normal_form(&self) -> SPoly {
        let mut p = self.clone();
        loop {
            let mut candidate: Option<(Factors, Rat)> = None;
            for (f, c) in p.terms.iter().rev() {
                if !reducible(f) {
                    continue;
                }
                if let Some((best, _)) = &candidate {
                    if cmp_functional(f, best) == Ordering::Greater {
                        candidate = Some((f.clone(), c.clone()));
                    }
                } else {
                    candidate = Some((f.clone(), c.clone()));
                }
            }
            let Some((m_factors, m_coeff)) = candidate else {
                return p;
            };
            // primitive candidate: lower the leader by one order
            let mut list: Vec<(DerivedVar, u32)> = m_factors.clone();
            let (leader, _) = *list.last().unwrap();
            list.last_mut().unwrap().1 = 0;
            list.push((
                DerivedVar::new(leader.var, leader.order - 1),
                1,
            ));
            let (nf, _sign) = canonicalize(list).expect("primitive cannot vanish");
            let primitive = SPoly::monomial(Rat::one(), nf);
            let dn = primitive.apply_d();
            let lead_coeff = dn
                .terms
                .get(&m_factors)
                .expect("derivative of primitive must contain the reduced monomial")
                .clone();
            p = &p - &dn.scale(&(m_coeff / lead_coeff));
            debug_assert!(!p.terms.contains_key(&m_factors));
        }
    }
}

fn push_factor(merged: &mut Factors, (dv, m): (DerivedVar, u32), zero: &mut bool) {
    if m == 0 {
        return;
    }
    if let Some(last) = merged.last_mut() {
        if last.0 == dv {
            last.1 += m;
            if dv.parity().is_odd() && last.1 > 1 {
                *zero = true;
            }
            return;
        }
    }
    if dv.parity().is_odd() && m > 1 {
        *zero = true;
        return;
    }
    merged.push((dv, m));
}

fn monomial_parity(f: &Factors) -> Parity {
    Parity::from_u64(
        f.iter()
            .map(|(dv, m)| dv.parity().as_u64() * *m as u64)
            .sum(),
    )
}

/// Compares monomials by their descending factor sequences, largest factor
/// first; the monomial whose sequence is lexicographically larger wins.
fn cmp_functional(a: &Factors, b: &Factors) -> Ordering {
    let mut ia = a.iter().rev();
    let mut ib = b.iter().rev();
    loop {
        match (ia.next(), ib.next()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some((da, ma)), Some((db, mb))) => {
                match da.cmp(db).then(ma.cmp(mb)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
        }
    }
}

/// A monomial can be integrated by parts when its largest factor has
/// derivative order at least one and multiplicity one, and lowering it does
/// not square an odd factor already present.
fn reducible(f: &Factors) -> bool {
    let Some(&(leader, mult)) = f.last() else {
        return false;
    };
    if leader.order == 0 || mult != 1 {
        return false;
    }
    let lowered = DerivedVar::new(leader.var, leader.order - 1);
    if lowered.parity().is_odd() {
        !f.iter().any(|(dv, _)| *dv == lowered)
    } else {
        true
    }
}

/// Class of a polynomial modulo total derivatives, held by its canonical
/// integration-by-parts representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Functional {
    repr: SPoly,
}

impl Functional {
    pub fn new(p: &SPoly) -> Self {
        Functional {
            repr: p.functional_normal_form(),
        }
    }

    pub fn representative(&self) -> &SPoly {
        &self.repr
    }

    pub fn is_zero(&self) -> bool {
        self.repr.is_zero()
    }
}

/// Independent zero test for a functional: the constant term vanishes and
/// every variational derivative vanishes.  Used to cross-check the
/// integration-by-parts normal form.
pub fn vanishes_variationally(p: &SPoly, vars: &VarSet) -> bool {
    if !p.constant_term().is_zero() {
        return false;
    }
    vars.vars().all(|v| p.variational(v).is_zero())
}

impl std::ops::Add for &SPoly {
    type Output = SPoly;
    fn add(self, rhs: &SPoly) -> SPoly {
        let mut out = self.clone();
        for (f, c) in &rhs.terms {
            out.add_term(f.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &SPoly {
    type Output = SPoly;
    fn sub(self, rhs: &SPoly) -> SPoly {
        let mut out = self.clone();
        for (f, c) in &rhs.terms {
            out.add_term(f.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Neg for &SPoly {
    type Output = SPoly;
    fn neg(self) -> SPoly {
        self.scale(&-Rat::one())
    }
}

/// Helper for rendering rationals as `p` or `p/q`.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub struct SPolyDisplay<'a> {
    poly: &'a SPoly,
    vars: &'a VarSet,
}

impl SPoly {
    pub fn display<'a>(&'a self, vars: &'a VarSet) -> SPolyDisplay<'a> {
        SPolyDisplay { poly: self, vars }
    }
}

fn fmt_factor(dv: &DerivedVar, mult: u32, vars: &VarSet, out: &mut String) {
    out.push_str(vars.name(dv.var.index));
    match dv.order {
        0 => {}
        1 => out.push('\''),
        2 => out.push_str("''"),
        m => out.push_str(&format!("^({m})")),
    }
    if mult > 1 {
        out.push_str(&format!("^{mult}"));
    }
}

impl fmt::Display for SPolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (factors, coeff) in &self.poly.terms {
            let neg = coeff.is_negative();
            let abs = coeff.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut body = String::new();
            for (i, (dv, m)) in factors.iter().enumerate() {
                if i > 0 {
                    body.push('*');
                }
                fmt_factor(dv, *m, self.vars, &mut body);
            }
            if factors.is_empty() {
                write!(f, "{}", fmt_rat(&abs))?;
            } else if abs.is_one() {
                write!(f, "{body}")?;
            } else {
                write!(f, "{}*{body}", fmt_rat(&abs))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, ratio};

    fn setup() -> (VarSet, Variable, Variable) {
        let mut vs = VarSet::new();
        let u = vs.add("u", Parity::Even);
        let psi = vs.add("psi", Parity::Odd);
        (vs, u, psi)
    }

    #[test]
    fn odd_square_vanishes() {
        let (_, _, psi) = setup();
        let p = SPoly::var(psi);
        assert!(p.multiply(&p).is_zero());
    }

    #[test]
    fn odd_times_derivative_commutes() {
        // psi' is even when psi is odd, so psi*psi' = psi'*psi
        let (_, _, psi) = setup();
        let p = SPoly::var(psi);
        let dp = SPoly::derived(psi, 1);
        assert_eq!(p.multiply(&dp), dp.multiply(&p));
        assert!(!p.multiply(&dp).is_zero());
    }

    #[test]
    fn supercommutativity_sign() {
        let (_, _, psi) = setup();
        // two odd factors anticommute: psi * psi'' = - psi'' * psi
        let a = SPoly::var(psi);
        let b = SPoly::derived(psi, 2);
        assert_eq!(a.multiply(&b), -&b.multiply(&a));
    }

    #[test]
    fn d_is_odd_leibniz() {
        let (_, _, psi) = setup();
        // D(psi psi') = psi'psi' - psi psi''
        let p = SPoly::var(psi).multiply(&SPoly::derived(psi, 1));
        let d = p.apply_d();
        let psi1 = SPoly::derived(psi, 1);
        let psi2 = SPoly::derived(psi, 2);
        let expect = &psi1.multiply(&psi1) - &SPoly::var(psi).multiply(&psi2);
        assert_eq!(d, expect);
        assert!(SPoly::constant(rat(7)).apply_d().is_zero());
    }

    #[test]
    fn d_squared_is_even_derivation() {
        // the two cross terms of applying the odd Leibniz rule twice cancel,
        // so D^2(ab) = D^2(a) b + a D^2(b)
        let (_, u, psi) = setup();
        let a = SPoly::var(u).multiply(&SPoly::derived(psi, 1));
        let b = &SPoly::derived(u, 1) + &SPoly::var(psi).multiply(&SPoly::var(u));
        for a in [&a.parity_parts().0, &a.parity_parts().1] {
            let lhs = a.multiply(&b).apply_d_n(2);
            let rhs = &a.apply_d_n(2).multiply(&b) + &a.multiply(&b.apply_d_n(2));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn partial_matches_spec_cases() {
        let mut vs = VarSet::new();
        let u0 = vs.add("u0", Parity::Even);
        let u1 = vs.add("u1", Parity::Odd);
        // d(u0 u1')/d(u1') = u0
        let p = SPoly::var(u0).multiply(&SPoly::derived(u1, 1));
        let d = p.partial(DerivedVar::new(u1, 1));
        assert_eq!(d, SPoly::var(u0));
        // d(psi psi')/d(psi) = psi'
        let psi = u1;
        let q = SPoly::var(psi).multiply(&SPoly::derived(psi, 1));
        assert_eq!(q.partial(DerivedVar::new(psi, 0)), SPoly::derived(psi, 1));
    }

    #[test]
    fn commutator_of_partial_and_d() {
        // [d/du^(m), D] = d/du^(m-1) checked on a concrete polynomial
        let (_, _, psi) = setup();
        let p = SPoly::derived(psi, 2).multiply(&SPoly::var(psi));
        let dv1 = DerivedVar::new(psi, 1);
        // p(d/dpsi') is even, so the supercommutator is the plain one
        let lhs = &p.apply_d().partial(dv1) - &p.partial(dv1).apply_d();
        let rhs = p.partial(DerivedVar::new(psi, 0));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn variational_derivative_cases() {
        let (vs, u, psi) = setup();
        // delta(psi psi')/delta(psi) = 2 psi'
        let p = SPoly::var(psi).multiply(&SPoly::derived(psi, 1));
        assert_eq!(p.variational(psi), SPoly::derived(psi, 1).scale(&rat(2)));
        // delta(u^2)/delta(u) = 2u
        let q = SPoly::var(u).multiply(&SPoly::var(u));
        assert_eq!(q.variational(u), SPoly::var(u).scale(&rat(2)));
        // exactness: variational of D(anything) vanishes
        let r = SPoly::var(u)
            .multiply(&SPoly::derived(psi, 1))
            .multiply(&SPoly::derived(u, 2));
        let dr = r.apply_d();
        for v in vs.vars() {
            assert!(dr.variational(v).is_zero());
        }
    }

    #[test]
    fn functional_normal_form_basics() {
        let (vs, u, psi) = setup();
        // integral of a total derivative is zero
        let p = SPoly::var(psi).multiply(&SPoly::derived(psi, 1));
        assert!(p.apply_d().functional_normal_form().is_zero());
        // u'u = D(u^2)/2 integrates to zero
        let q = SPoly::derived(u, 1).multiply(&SPoly::var(u));
        assert!(q.functional_normal_form().is_zero());
        // psi psi' is not exact
        let nf = p.functional_normal_form();
        assert!(!nf.is_zero());
        assert!(vanishes_variationally(&p.apply_d(), &vs));
        assert!(!vanishes_variationally(&p, &vs));
    }

    #[test]
    fn functional_normal_form_respects_scaling() {
        let (_, u, _) = setup();
        let p = SPoly::derived(u, 4).multiply(&SPoly::var(u));
        let nf = p.functional_normal_form();
        // integrating by parts twice against the odd derivation picks up a
        // sign from the odd intermediate u''': u'''' u = -(u'')^2 mod DP,
        // confirmed by delta(u''''u + (u'')^2)/delta(u) = 0
        let expect = -&SPoly::derived(u, 2).multiply(&SPoly::derived(u, 2));
        assert_eq!(nf, expect);
        let sum = &p + &SPoly::derived(u, 2).multiply(&SPoly::derived(u, 2));
        assert!(sum.variational(u).is_zero());
    }

    #[test]
    fn display_roundtrip_shapes() {
        let (vs, u, psi) = setup();
        let p = &SPoly::derived(u, 3).scale(&ratio(1, 2))
            - &SPoly::var(psi).multiply(&SPoly::derived(psi, 1));
        let s = format!("{}", p.display(&vs));
        assert_eq!(s, "1/2*u^(3) - psi*psi'");
    }
}
