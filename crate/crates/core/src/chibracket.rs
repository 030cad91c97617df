//! The odd-indeterminate bracket calculus.
//!
//! A bracket specification lists the brackets between generators as
//! polynomials in an odd indeterminate `chi` satisfying
//! `D chi + chi D = -2 chi^2`.  The bracket of two arbitrary super
//! differential polynomials is produced by the closed-form master expansion
//! over partial derivatives of the arguments; the axioms (skew-symmetry,
//! Jacobi, compatibility of two structures) can be verified mechanically on
//! the generator table, which suffices for the whole algebra.

use crate::error::{Error, Result};
use crate::superpoly::{DerivedVar, Parity, ParityKind, SPoly, VarSet, Variable};
use crate::Rat;
use num::Zero;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Polynomial in the odd indeterminate with super-polynomial coefficients,
/// kept in the normal form `sum_n chi^n c_n` (coefficients to the right of
/// the powers).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChiPoly {
    coeffs: BTreeMap<u32, SPoly>,
}

impl ChiPoly {
    pub fn zero() -> Self {
        ChiPoly::default()
    }

    pub fn from_spoly(p: SPoly) -> Self {
        let mut c = ChiPoly::zero();
        c.add_coeff(0, p);
        c
    }

    pub fn from_coeffs(coeffs: Vec<(u32, SPoly)>) -> Self {
        let mut c = ChiPoly::zero();
        for (n, p) in coeffs {
            c.add_coeff(n, p);
        }
        c
    }

    fn add_coeff(&mut self, n: u32, p: SPoly) {
        if p.is_zero() {
            return;
        }
        match self.coeffs.entry(n) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &p;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, n: u32) -> SPoly {
        self.coeffs.get(&n).cloned().unwrap_or_else(SPoly::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (u32, &SPoly)> {
        self.coeffs.iter().map(|(n, p)| (*n, p))
    }

    pub fn max_power(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn scale(&self, c: &Rat) -> ChiPoly {
        if c.is_zero() {
            return ChiPoly::zero();
        }
        ChiPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(n, p)| (*n, p.scale(c)))
                .collect(),
        }
    }

    /// Left multiplication by the indeterminate.
    pub fn mul_chi(&self) -> ChiPoly {
        ChiPoly {
            coeffs: self.coeffs.iter().map(|(n, p)| (n + 1, p.clone())).collect(),
        }
    }

    /// Action of the odd derivation on the module of chi-polynomials:
    /// `D(chi^n c) = (-1)^n chi^n D(c)`, plus `-2 chi^(n+1) c` for odd `n`.
    pub fn apply_d(&self) -> ChiPoly {
        let mut out = ChiPoly::zero();
        for (n, p) in &self.coeffs {
            let dp = p.apply_d();
            if *n % 2 == 0 {
                out.add_coeff(*n, dp);
            } else {
                out.add_coeff(*n, -&dp);
                out.add_coeff(*n + 1, p.scale(&crate::rat(-2)));
            }
        }
        out
    }

    /// One application of the operator `chi + D`.
    pub fn apply_chi_plus_d(&self) -> ChiPoly {
        let mut out = self.mul_chi();
        for (n, p) in self.apply_d().coeffs {
            out.add_coeff(n, p);
        }
        out
    }

    pub fn apply_chi_plus_d_n(&self, n: u32) -> ChiPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.apply_chi_plus_d();
        }
        p
    }

    /// One application of `chi + D` where the derivation passes chi powers
    /// with a bare parity sign and no quadratic correction.  This is the
    /// effective operator inside the right-arrow composite: there the
    /// derivation acts on the far factor only, and the two chi-corrections
    /// cancel.
    pub fn apply_chi_plus_d_anticomm(&self) -> ChiPoly {
        let mut out = self.mul_chi();
        for (n, p) in &self.coeffs {
            let dp = p.apply_d();
            if *n % 2 == 0 {
                out.add_coeff(*n, dp);
            } else {
                out.add_coeff(*n, -&dp);
            }
        }
        out
    }

    /// One application of the operator `-D - chi`.
    pub fn apply_minus_d_minus_chi(&self) -> ChiPoly {
        let mut out = ChiPoly::zero();
        for (n, p) in self.mul_chi().coeffs {
            out.add_coeff(n, -&p);
        }
        for (n, p) in self.apply_d().coeffs {
            out.add_coeff(n, -&p);
        }
        out
    }

    /// Multiplication by a super polynomial from the left; the factor must
    /// cross each chi power.
    pub fn left_mul(&self, s: &SPoly) -> ChiPoly {
        let (even, odd) = s.parity_parts();
        let mut out = ChiPoly::zero();
        for (n, p) in &self.coeffs {
            if !even.is_zero() {
                out.add_coeff(*n, even.multiply(p));
            }
            if !odd.is_zero() {
                let t = odd.multiply(p);
                if *n % 2 == 0 {
                    out.add_coeff(*n, t);
                } else {
                    out.add_coeff(*n, -&t);
                }
            }
        }
        out
    }

    /// Multiplication by a super polynomial from the right (no crossings).
    pub fn right_mul(&self, s: &SPoly) -> ChiPoly {
        ChiPoly {
            coeffs: self
                .coeffs
                .iter()
                .filter_map(|(n, p)| {
                    let t = p.multiply(s);
                    (!t.is_zero()).then_some((*n, t))
                })
                .collect(),
        }
    }

    pub fn display(&self, vars: &VarSet) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (n, p)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            match n {
                0 => {
                    let _ = write!(out, "{}", p.display(vars));
                }
                1 => {
                    let _ = write!(out, "X*({})", p.display(vars));
                }
                _ => {
                    let _ = write!(out, "X^{}*({})", n, p.display(vars));
                }
            }
        }
        out
    }
}

impl std::ops::Add for &ChiPoly {
    type Output = ChiPoly;
    fn add(self, rhs: &ChiPoly) -> ChiPoly {
        let mut out = self.clone();
        for (n, p) in &rhs.coeffs {
            out.add_coeff(*n, p.clone());
        }
        out
    }
}

impl std::ops::Sub for &ChiPoly {
    type Output = ChiPoly;
    fn sub(self, rhs: &ChiPoly) -> ChiPoly {
        let mut out = self.clone();
        for (n, p) in &rhs.coeffs {
            out.add_coeff(*n, -p);
        }
        out
    }
}

/// How to reinterpret the indeterminate of an existing bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiShift {
    /// Substitute `chi -> -chi - D` (skew-symmetry transport).
    MinusChiMinusD,
    /// Substitute `chi -> chi + D` acting to the right without arrow signs.
    PlusChiPlusD,
}

/// Reinterprets `sum chi^n c_n` with the indeterminate replaced by an
/// operator acting on the coefficients.
pub fn shift_chi(p: &ChiPoly, mode: ChiShift) -> ChiPoly {
    let mut out = ChiPoly::zero();
    for (n, c) in p.coeffs() {
        let mut term = ChiPoly::from_spoly(c.clone());
        for _ in 0..n {
            term = match mode {
                ChiShift::MinusChiMinusD => term.apply_minus_d_minus_chi(),
                ChiShift::PlusChiPlusD => term.apply_chi_plus_d(),
            };
        }
        out = &out + &term;
    }
    out
}

/// The right-arrow composite `{a_(chi+D) b}_-> target`: each coefficient of
/// the generator bracket acts after `(chi+D)^n` has been applied to the
/// target, with the arrow sign `(-1)^{n (p(a)+p(b))}`.
/// Product of two chi-polynomials: the right factor's coefficients cross
/// the left factor's chi powers... the left COEFFICIENTS cross the right
/// factor's powers.  `(chi^a g)(chi^b d) = (-1)^{b p(g)} chi^{a+b} (g d)`.
pub fn chi_mul(lhs: &ChiPoly, rhs: &ChiPoly) -> ChiPoly {
    let mut out = ChiPoly::zero();
    for (a, g) in lhs.coeffs() {
        let (ge, go) = g.parity_parts();
        for (b, d) in rhs.coeffs() {
            if !ge.is_zero() {
                out.add_coeff(a + b, ge.multiply(d));
            }
            if !go.is_zero() {
                let t = go.multiply(d);
                out.add_coeff(a + b, if b % 2 == 1 { -&t } else { t });
            }
        }
    }
    out
}

/// The right-arrow composite `{x_(chi+D) y}_-> z` realized through the
/// skew transport: flipping the bracket, multiplying by the target and
/// flipping back.  `entry` is the bracket `{x chi y}` and `target` stands to
/// the right of the composite.
pub fn arrow_apply(entry: &ChiPoly, target: &ChiPoly) -> ChiPoly {
    let flipped = shift_chi(entry, ChiShift::MinusChiMinusD);
    shift_chi(&chi_mul(&flipped, target), ChiShift::MinusChiMinusD)
}

/// Generator bracket table defining a SUSY PVA structure on the algebra of
/// super differential polynomials in the listed generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketSpec {
    generators: Vec<Variable>,
    table: BTreeMap<(u32, u32), ChiPoly>,
}

impl BracketSpec {
    pub fn new(generators: Vec<Variable>) -> Self {
        BracketSpec {
            generators,
            table: BTreeMap::new(),
        }
    }

    pub fn generators(&self) -> &[Variable] {
        &self.generators
    }

    /// Inserts a generator bracket after checking the parity constraint:
    /// the coefficient of `chi^n` in `{u_i chi u_j}` must have parity
    /// `p(u_i)+p(u_j)+n+1`.
    pub fn try_set_entry(&mut self, i: Variable, j: Variable, p: ChiPoly) -> Result<()> {
        for (n, c) in p.coeffs() {
            let want =
                Parity::from_u64(i.parity.as_u64() + j.parity.as_u64() + n as u64 + 1);
            match c.parity_kind() {
                ParityKind::Zero => {}
                ParityKind::Homogeneous(p) if p == want => {}
                _ => {
                    return Err(Error::ParityMismatch(format!(
                        "bracket entry ({}, {}) at chi^{n}",
                        i.index, j.index
                    )))
                }
            }
        }
        if !p.is_zero() {
            self.table.insert((i.index, j.index), p);
        }
        Ok(())
    }

    pub fn set_entry(&mut self, i: Variable, j: Variable, p: ChiPoly) {
        self.try_set_entry(i, j, p).unwrap();
    }

    pub fn entry(&self, i: u32, j: u32) -> ChiPoly {
        self.table.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn has_generator(&self, index: u32) -> bool {
        self.generators.iter().any(|v| v.index == index)
    }

    /// Completes missing `(j, i)` entries from `(i, j)` by skew-symmetry.
    /// Used when ingesting half-filled user tables.
    pub fn complete_by_skew(&mut self) {
        let pairs: Vec<(u32, u32)> = self.table.keys().copied().collect();
        for (i, j) in pairs {
            if self.table.contains_key(&(j, i)) {
                continue;
            }
            let pi = self.generator(i).parity;
            let pj = self.generator(j).parity;
            let flipped = shift_chi(&self.entry(i, j), ChiShift::MinusChiMinusD);
            let sign = if pi.is_odd() && pj.is_odd() {
                crate::rat(-1)
            } else {
                crate::rat(1)
            };
            self.table.insert((j, i), flipped.scale(&sign));
        }
    }

    fn generator(&self, index: u32) -> Variable {
        *self
            .generators
            .iter()
            .find(|v| v.index == index)
            .expect("generator index")
    }

    /// Entrywise sum of two bracket structures on the same generators.
    pub fn sum(&self, other: &BracketSpec) -> BracketSpec {
        assert_eq!(self.generators, other.generators);
        let mut out = BracketSpec::new(self.generators.clone());
        let keys: std::collections::BTreeSet<(u32, u32)> = self
            .table
            .keys()
            .chain(other.table.keys())
            .copied()
            .collect();
        for (i, j) in keys {
            let s = &self.entry(i, j) + &other.entry(i, j);
            if !s.is_zero() {
                out.table.insert((i, j), s);
            }
        }
        out
    }
}

fn check_vars_known(spec: &BracketSpec, p: &SPoly, what: &str) -> Result<()> {
    for idx in p.variables() {
        if !spec.has_generator(idx) {
            return Err(Error::UnknownVariable(format!("#{idx} in {what}")));
        }
    }
    Ok(())
}

/// Evaluates the bracket of two arbitrary polynomials from the generator
/// table by the closed-form master expansion.
pub fn master_bracket(spec: &BracketSpec, a: &SPoly, b: &SPoly) -> Result<ChiPoly> {
    check_vars_known(spec, a, "left argument")?;
    check_vars_known(spec, b, "right argument")?;
    let mut out = ChiPoly::zero();
    let (ae, ao) = a.parity_parts();
    let (be, bo) = b.parity_parts();
    for (pa, ah) in [(Parity::Even, ae), (Parity::Odd, ao)] {
        if ah.is_zero() {
            continue;
        }
        for (pb, bh) in [(Parity::Even, &be), (Parity::Odd, &bo)] {
            if bh.is_zero() {
                continue;
            }
            out = &out + &master_bracket_homogeneous(spec, &ah, pa, bh, pb);
        }
    }
    Ok(out)
}

fn master_bracket_homogeneous(
    spec: &BracketSpec,
    a: &SPoly,
    pa: Parity,
    b: &SPoly,
    pb: Parity,
) -> ChiPoly {
    let mut out = ChiPoly::zero();
    for ui in spec.generators() {
        let Some(max_m) = a.max_order(ui.index) else {
            continue;
        };
        let pi = ui.parity.as_u64();
        for m in 0..=max_m {
            let a_im = a.partial(DerivedVar::new(*ui, m));
            if a_im.is_zero() {
                continue;
            }
            let target = ChiPoly::from_spoly(a_im.clone());
            for uj in spec.generators() {
                let Some(max_n) = b.max_order(uj.index) else {
                    continue;
                };
                let entry = spec.entry(ui.index, uj.index);
                if entry.is_zero() {
                    continue;
                }
                let pj = uj.parity.as_u64();
                // {u_i^(m) chi u_j}: left sesquilinearity contributes chi^m
                let mut lifted = entry;
                for _ in 0..m {
                    lifted = lifted.mul_chi();
                }
                for n in 0..=max_n {
                    let b_jn = b.partial(DerivedVar::new(*uj, n));
                    if !b_jn.is_zero() {
                        let m64 = m as u64;
                        let n64 = n as u64;
                        // sign of the master expansion over derivative-level
                        // partials
                        let s = pb.as_u64() * (pa.as_u64() + 1)
                            + (pb.as_u64() + pi + m64) * (pj + n64);
                        let term = arrow_apply(&lifted, &target).left_mul(&b_jn);
                        if s % 2 == 0 {
                            out = &out + &term;
                        } else {
                            out = &out - &term;
                        }
                    }
                    // {u_i^(m) chi u_j^(n+1)}: right sesquilinearity
                    if n < max_n {
                        lifted = &lifted.apply_d() + &lifted.mul_chi();
                        if (pi + m as u64) % 2 == 0 {
                            lifted = lifted.scale(&crate::rat(-1));
                        }
                    }
                }
            }
        }
    }
    out
}

/// The derivation attached to a local functional: `{h chi a}` evaluated at
/// `chi = 0`.  Depends on `h` only through its class modulo total
/// derivatives.
pub fn hamiltonian_flow(spec: &BracketSpec, h: &SPoly, a: &SPoly) -> Result<SPoly> {
    Ok(master_bracket(spec, h, a)?.coeff(0))
}

/// Induced bracket on functionals: the class of `{a chi b}|_{chi=0}`.
pub fn induced_bracket(
    spec: &BracketSpec,
    a: &SPoly,
    b: &SPoly,
) -> Result<crate::superpoly::Functional> {
    Ok(crate::superpoly::Functional::new(
        &master_bracket(spec, a, b)?.coeff(0),
    ))
}

/// Outcome of an axiom check; failures carry printable witnesses.
#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub name: String,
    pub failures: Vec<String>,
    pub cases: usize,
}

impl CheckReport {
    pub fn is_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_pass() {
            write!(f, "{}: pass ({} cases)", self.name, self.cases)
        } else {
            writeln!(f, "{}: FAIL ({} cases)", self.name, self.cases)?;
            for line in &self.failures {
                writeln!(f, "  {line}")?;
            }
            Ok(())
        }
    }
}

/// Checks `{u_i chi u_j} = (-1)^{p_i p_j} {u_j (-chi-D) u_i}` on every
/// ordered generator pair; by the master expansion this propagates to the
/// whole algebra.
pub fn check_skew_symmetry(spec: &BracketSpec, vars: &VarSet) -> CheckReport {
    let mut report = CheckReport {
        name: "skew-symmetry".into(),
        ..Default::default()
    };
    for ui in spec.generators() {
        for uj in spec.generators() {
            report.cases += 1;
            let lhs = spec.entry(ui.index, uj.index);
            let flipped = shift_chi(&spec.entry(uj.index, ui.index), ChiShift::MinusChiMinusD);
            let sign = if ui.parity.is_odd() && uj.parity.is_odd() {
                crate::rat(-1)
            } else {
                crate::rat(1)
            };
            let residual = &lhs - &flipped.scale(&sign);
            if !residual.is_zero() {
                report.failures.push(format!(
                    "pair ({}, {}): residual {}",
                    vars.name(ui.index),
                    vars.name(uj.index),
                    residual.display(vars)
                ));
            }
        }
    }
    report
}

/// Polynomial in two odd indeterminates `chi`, `gamma` with
/// `chi gamma = -gamma chi`, normal-ordered with all `chi` powers first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TwoVarChiPoly {
    coeffs: BTreeMap<(u32, u32), SPoly>,
}

impl TwoVarChiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_coeff(&mut self, key: (u32, u32), p: SPoly) {
        if p.is_zero() {
            return;
        }
        match self.coeffs.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &p;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// Left multiplication by `chi + gamma`.
    fn mul_chi_plus_gamma(&self) -> TwoVarChiPoly {
        let mut out = TwoVarChiPoly::zero();
        for ((a, b), c) in &self.coeffs {
            out.add_coeff((a + 1, *b), c.clone());
            // gamma crosses chi^a
            let t = if a % 2 == 1 { -c } else { c.clone() };
            out.add_coeff((*a, b + 1), t);
        }
        out
    }

    pub fn display(&self, vars: &VarSet) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, ((a, b), c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            let _ = write!(out, "X^{a}*G^{b}*({})", c.display(vars));
        }
        out
    }
}

impl std::ops::Add for &TwoVarChiPoly {
    type Output = TwoVarChiPoly;
    fn add(self, rhs: &TwoVarChiPoly) -> TwoVarChiPoly {
        let mut out = self.clone();
        for (k, p) in &rhs.coeffs {
            out.add_coeff(*k, p.clone());
        }
        out
    }
}

impl std::ops::Sub for &TwoVarChiPoly {
    type Output = TwoVarChiPoly;
    fn sub(self, rhs: &TwoVarChiPoly) -> TwoVarChiPoly {
        let mut out = self.clone();
        for (k, p) in &rhs.coeffs {
            out.add_coeff(*k, -p);
        }
        out
    }
}

/// Jacobi residual on a generator triple, as a two-indeterminate polynomial.
pub fn jacobi_residual(
    spec: &BracketSpec,
    ui: Variable,
    uj: Variable,
    uk: Variable,
) -> Result<TwoVarChiPoly> {
    let a = SPoly::var(ui);
    let b = SPoly::var(uj);
    let c = SPoly::var(uk);
    let pa = ui.parity.as_u64();
    let pb = uj.parity.as_u64();

    // [a chi [b gamma c]]
    let mut lhs = TwoVarChiPoly::zero();
    for (n, cn) in master_bracket(spec, &b, &c)?.coeffs() {
        let outer = master_bracket(spec, &a, cn)?;
        for (m, d) in outer.coeffs() {
            // pull gamma^n out of the bracket, then move it past chi^m
            let exp = n as u64 * (pa + 1) + (n as u64) * (m as u64);
            let t = if exp % 2 == 1 { -d } else { d.clone() };
            lhs.add_coeff((m, n), t);
        }
    }

    // [[a chi b] (chi+gamma) c]
    let mut mid = TwoVarChiPoly::zero();
    for (l, el) in master_bracket(spec, &a, &b)?.coeffs() {
        let inner = master_bracket(spec, el, &c)?;
        for (q, fq) in inner.coeffs() {
            let mut tv = TwoVarChiPoly::zero();
            tv.add_coeff((0, 0), fq.clone());
            for _ in 0..q {
                tv = tv.mul_chi_plus_gamma();
            }
            for ((x, y), p) in tv.coeffs {
                let t = if l % 2 == 1 { -&p } else { p };
                mid.add_coeff((x + l, y), t);
            }
        }
    }

    // [b gamma [a chi c]]
    let mut rhs = TwoVarChiPoly::zero();
    for (n, gn) in master_bracket(spec, &a, &c)?.coeffs() {
        let inner = master_bracket(spec, &b, gn)?;
        for (m, h) in inner.coeffs() {
            let exp = n as u64 * (pb + 1);
            let t = if exp % 2 == 1 { -h } else { h.clone() };
            rhs.add_coeff((n, m), t);
        }
    }

    // residual = LHS - (-1)^{pa+1} MID - (-1)^{(pa+1)(pb+1)} RHS
    let mid_negative = (pa + 1) % 2 == 1;
    let rhs_negative = ((pa + 1) * (pb + 1)) % 2 == 1;
    let mut res = lhs;
    res = if mid_negative { &res + &mid } else { &res - &mid };
    res = if rhs_negative { &res + &rhs } else { &res - &rhs };
    Ok(res)
}

/// Verifies the Jacobi identity on every generator triple.
pub fn check_jacobi(spec: &BracketSpec, vars: &VarSet) -> Result<CheckReport> {
    let mut report = CheckReport {
        name: "jacobi".into(),
        ..Default::default()
    };
    for ui in spec.generators() {
        for uj in spec.generators() {
            for uk in spec.generators() {
                report.cases += 1;
                let res = jacobi_residual(spec, *ui, *uj, *uk)?;
                if !res.is_zero() {
                    report.failures.push(format!(
                        "triple ({}, {}, {}): residual {}",
                        vars.name(ui.index),
                        vars.name(uj.index),
                        vars.name(uk.index),
                        res.display(vars)
                    ));
                }
            }
        }
    }
    Ok(report)
}

/// Compatibility of two bracket structures: every linear combination must
/// satisfy the axioms.  The Jacobi residual of `spec1 + eps spec2` is
/// quadratic in `eps`; its coefficients are the residual of `spec1`, the
/// mixed residual, and the residual of `spec2`, all of which must vanish
/// identically.  The mixed coefficient is recovered exactly as
/// `residual(spec1+spec2) - residual(spec1) - residual(spec2)`.
pub fn check_compatibility(
    spec1: &BracketSpec,
    spec2: &BracketSpec,
    vars: &VarSet,
) -> Result<CheckReport> {
    let mut report = CheckReport {
        name: "compatibility".into(),
        ..Default::default()
    };
    let sum = spec1.sum(spec2);
    let skew = check_skew_symmetry(&sum, vars);
    report.cases += skew.cases;
    for f in skew.failures {
        report.failures.push(format!("eps-sum skew: {f}"));
    }
    for ui in spec1.generators() {
        for uj in spec1.generators() {
            for uk in spec1.generators() {
                report.cases += 1;
                let r1 = jacobi_residual(spec1, *ui, *uj, *uk)?;
                let r2 = jacobi_residual(spec2, *ui, *uj, *uk)?;
                let rs = jacobi_residual(&sum, *ui, *uj, *uk)?;
                let mixed = &(&rs - &r1) - &r2;
                for (label, r) in [("eps^0", &r1), ("eps^1", &mixed), ("eps^2", &r2)] {
                    if !r.is_zero() {
                        report.failures.push(format!(
                            "{label} jacobi on ({}, {}, {}): residual {}",
                            vars.name(ui.index),
                            vars.name(uj.index),
                            vars.name(uk.index),
                            r.display(vars)
                        ));
                    }
                }
            }
        }
    }
    Ok(report)
}

/// The even bracket extracted from the odd one:
/// `{a lambda b} = sum_n (-lambda)^n a_(2n+1) b` with `lambda = -chi^2`.
/// Returned as the list of `lambda^n` coefficients.
pub fn lambda_bracket(spec: &BracketSpec, a: &SPoly, b: &SPoly) -> Result<Vec<SPoly>> {
    let chi = master_bracket(spec, a, b)?;
    let top = chi.max_power().unwrap_or(0);
    let mut out = Vec::new();
    for n in 0..=(top / 2) {
        let c = chi.coeff(2 * n + 1);
        out.push(if n % 2 == 1 { -&c } else { c });
    }
    while out.last().is_some_and(SPoly::is_zero) {
        out.pop();
    }
    Ok(out)
}

pub mod oracle {
    //! Independent bracket evaluator built directly from the structure
    //! axioms: skew-symmetry transport, the two sesquilinearity rules and
    //! the right Leibniz rule.  It never touches the closed master
    //! expansion, so the two evaluation paths can verify each other.

    use super::*;
    use crate::superpoly::Factors;

    /// Bracket of two arbitrary polynomials by structural recursion.
    pub fn bracket(spec: &BracketSpec, a: &SPoly, b: &SPoly) -> Result<ChiPoly> {
        check_vars_known(spec, a, "left argument")?;
        check_vars_known(spec, b, "right argument")?;
        let mut out = ChiPoly::zero();
        for ma in a.terms() {
            for mb in b.terms() {
                let t = mono_bracket(spec, &ma.factors, &mb.factors)?;
                out = &out + &t.scale(&(ma.coeff.clone() * &mb.coeff));
            }
        }
        Ok(out)
    }

    fn degree(f: &Factors) -> u32 {
        f.iter().map(|(_, m)| *m).sum()
    }

    fn parity(f: &Factors) -> Parity {
        Parity::from_u64(
            f.iter()
                .map(|(dv, m)| dv.parity().as_u64() * *m as u64)
                .sum(),
        )
    }

    /// Removes one copy of the leftmost factor.
    fn split_first(f: &Factors) -> (DerivedVar, Factors) {
        let mut rest = f.clone();
        let dv = rest[0].0;
        if rest[0].1 == 1 {
            rest.remove(0);
        } else {
            rest[0].1 -= 1;
        }
        (dv, rest)
    }

    fn mono_bracket(spec: &BracketSpec, fa: &Factors, fb: &Factors) -> Result<ChiPoly> {
        match degree(fa) {
            0 => Ok(ChiPoly::zero()),
            1 => {
                let dv = fa[0].0;
                var_bracket(spec, dv, fb)
            }
            _ => peel_right(spec, fa, fb),
        }
    }

    /// Right Leibniz peeling of the second argument; the first argument is a
    /// product monomial and is only ever flipped against a single variable.
    fn peel_right(spec: &BracketSpec, fa: &Factors, fb: &Factors) -> Result<ChiPoly> {
        if degree(fb) == 0 {
            return Ok(ChiPoly::zero());
        }
        let (x, rest) = split_first(fb);
        // {A chi x R} = {A chi x} R + (-1)^{p(x) p(R)} {A chi R} x
        let head = flip_single(spec, fa, x)?;
        let mut out = head.right_mul(&SPoly::monomial(crate::rat(1), rest.clone()));
        if !rest.is_empty() {
            let tail = peel_right(spec, fa, &rest)?;
            let t = tail.right_mul(&SPoly::derived(x.var, x.order));
            let sign = x.parity().is_odd() && parity(&rest).is_odd();
            out = if sign { &out - &t } else { &out + &t };
        }
        Ok(out)
    }

    /// {A chi x} for a product monomial A and single variable x, via the
    /// skew transport of {x chi A}.
    fn flip_single(spec: &BracketSpec, fa: &Factors, x: DerivedVar) -> Result<ChiPoly> {
        let inner = var_bracket(spec, x, fa)?;
        let flipped = shift_chi(&inner, ChiShift::MinusChiMinusD);
        let sign = x.parity().is_odd() && parity(fa).is_odd();
        Ok(if sign {
            flipped.scale(&crate::rat(-1))
        } else {
            flipped
        })
    }

    /// {u^{(m)} chi B}: strip derivatives of the first argument by left
    /// sesquilinearity, then peel B by the right Leibniz rule.
    fn var_bracket(spec: &BracketSpec, dv: DerivedVar, fb: &Factors) -> Result<ChiPoly> {
        let mut out = gen_bracket(spec, dv.var, fb)?;
        for _ in 0..dv.order {
            out = out.mul_chi();
        }
        Ok(out)
    }

    fn gen_bracket(spec: &BracketSpec, u: Variable, fb: &Factors) -> Result<ChiPoly> {
        if degree(fb) == 0 {
            return Ok(ChiPoly::zero());
        }
        if degree(fb) == 1 {
            return Ok(gen_gen(spec, u, fb[0].0));
        }
        let (x, rest) = split_first(fb);
        let head = gen_gen(spec, u, x);
        let mut out = head.right_mul(&SPoly::monomial(crate::rat(1), rest.clone()));
        let tail = gen_bracket(spec, u, &rest)?;
        let t = tail.right_mul(&SPoly::derived(x.var, x.order));
        let sign = x.parity().is_odd() && parity(&rest).is_odd();
        out = if sign { &out - &t } else { &out + &t };
        Ok(out)
    }

    /// {u chi v^{(n)}} by right sesquilinearity from the generator table.
    fn gen_gen(spec: &BracketSpec, u: Variable, x: DerivedVar) -> ChiPoly {
        let mut out = spec.entry(u.index, x.var.index);
        for _ in 0..x.order {
            out = &out.apply_d() + &out.mul_chi();
            if u.parity == Parity::Even {
                out = out.scale(&crate::rat(-1));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, ratio};

    /// Neveu-Schwarz structure on one odd generator.
    pub fn ns_spec() -> (VarSet, BracketSpec, Variable) {
        let mut vs = VarSet::new();
        let psi = vs.add("psi", Parity::Odd);
        let mut spec = BracketSpec::new(vec![psi]);
        // central cocycle coefficient chosen so that the flow of the cubic
        // functional is the super KdV equation exactly; the cocycle does not
        // enter any axiom
        let entry = ChiPoly::from_coeffs(vec![
            (0, SPoly::derived(psi, 2)),
            (1, SPoly::derived(psi, 1).scale(&ratio(1, 2))),
            (2, SPoly::var(psi).scale(&ratio(-3, 2))),
            (5, SPoly::constant(ratio(1, 2))),
        ]);
        spec.set_entry(psi, psi, entry);
        (vs, spec, psi)
    }

    #[test]
    fn master_is_identity_on_generators() {
        let (_, spec, psi) = ns_spec();
        let got = master_bracket(&spec, &SPoly::var(psi), &SPoly::var(psi)).unwrap();
        assert_eq!(got, spec.entry(psi.index, psi.index));
    }

    #[test]
    fn ns_satisfies_skew_and_jacobi() {
        let (vs, spec, _) = ns_spec();
        assert!(check_skew_symmetry(&spec, &vs).is_pass());
        assert!(check_jacobi(&spec, &vs).unwrap().is_pass());
        assert!(check_compatibility(&spec, &spec, &vs).unwrap().is_pass());
    }

    #[test]
    fn perturbed_ns_fails_jacobi() {
        // moving the central term from chi^5 to chi^3 breaks the axioms
        let mut vs = VarSet::new();
        let psi = vs.add("psi", Parity::Odd);
        let mut spec = BracketSpec::new(vec![psi]);
        spec.set_entry(
            psi,
            psi,
            ChiPoly::from_coeffs(vec![
                (0, SPoly::derived(psi, 2)),
                (1, SPoly::derived(psi, 1).scale(&ratio(1, 2))),
                (2, SPoly::var(psi).scale(&ratio(-3, 2))),
                (3, SPoly::constant(rat(-1))),
            ]),
        );
        let skew = check_skew_symmetry(&spec, &vs);
        let jac = check_jacobi(&spec, &vs).unwrap();
        assert!(!(skew.is_pass() && jac.is_pass()));
    }

    #[test]
    fn ill_typed_bracket_entry_is_rejected() {
        // {u chi u} = u for even u breaks the parity constraint of the
        // bracket (an honest bracket entry has parity p+p+0+1 at chi^0);
        // the table is rejected before any axiom check
        let mut vs = VarSet::new();
        let u = vs.add("u", Parity::Even);
        let mut spec = BracketSpec::new(vec![u]);
        let err = spec.try_set_entry(u, u, ChiPoly::from_spoly(SPoly::var(u)));
        assert!(err.is_err());
    }

    #[test]
    fn skew_failure_is_reported_with_residual() {
        // a parity-consistent but wrong table: {psi chi psi} = psi'' has
        // skew residual 2 psi''
        let mut vs = VarSet::new();
        let psi = vs.add("psi", Parity::Odd);
        let mut spec = BracketSpec::new(vec![psi]);
        spec.set_entry(psi, psi, ChiPoly::from_spoly(SPoly::derived(psi, 2)));
        let report = check_skew_symmetry(&spec, &vs);
        assert!(!report.is_pass());
        assert!(report.failures[0].contains("2*psi''"), "{report}");
    }

    #[test]
    fn super_kdv_flow() {
        let (_, spec, psi) = ns_spec();
        let h = SPoly::var(psi).multiply(&SPoly::derived(psi, 1));
        let flow = hamiltonian_flow(&spec, &h, &SPoly::var(psi)).unwrap();
        let expect = &(&SPoly::derived(psi, 6)
            + &SPoly::derived(psi, 2)
                .multiply(&SPoly::derived(psi, 1))
                .scale(&rat(3)))
            + &SPoly::var(psi)
                .multiply(&SPoly::derived(psi, 3))
                .scale(&rat(3));
        assert_eq!(flow, expect);
    }

    #[test]
    fn sesquilinearity_holds() {
        let (_, spec, psi) = ns_spec();
        let a = SPoly::var(psi).multiply(&SPoly::derived(psi, 2));
        let b = SPoly::derived(psi, 1).multiply(&SPoly::var(psi));
        // {Da chi b} = chi {a chi b}
        let lhs = master_bracket(&spec, &a.apply_d(), &b).unwrap();
        let rhs = master_bracket(&spec, &a, &b).unwrap().mul_chi();
        assert_eq!(lhs, rhs);
        // {a chi Db} = (-1)^{p(a)+1} (D + chi) {a chi b}
        let lhs2 = master_bracket(&spec, &a, &b.apply_d()).unwrap();
        let base = master_bracket(&spec, &a, &b).unwrap();
        let shifted = &base.apply_d() + &base.mul_chi();
        // a = psi psi'' is even (odd times odd), so the sign is -1
        assert_eq!(lhs2, shifted.scale(&rat(-1)));
    }

    #[test]
    fn flow_is_insensitive_to_total_derivatives() {
        let (_, spec, psi) = ns_spec();
        let h = SPoly::var(psi).multiply(&SPoly::derived(psi, 1));
        let g = SPoly::derived(psi, 2).multiply(&SPoly::var(psi));
        let h2 = &h + &g.apply_d();
        let f1 = hamiltonian_flow(&spec, &h, &SPoly::var(psi)).unwrap();
        let f2 = hamiltonian_flow(&spec, &h2, &SPoly::var(psi)).unwrap();
        assert_eq!(f1, f2);
    }

    #[test]
    fn induced_bracket_self_bracket_vanishes() {
        let (_, spec, psi) = ns_spec();
        let h = SPoly::var(psi).multiply(&SPoly::derived(psi, 1));
        let br = induced_bracket(&spec, &h, &h).unwrap();
        assert!(br.is_zero());
    }

    #[test]
    fn unknown_variable_rejected() {
        let (_, spec, _) = ns_spec();
        let mut other = VarSet::new();
        let _ = other.add("psi", Parity::Odd);
        let stray = other.add("u", Parity::Even);
        assert!(master_bracket(&spec, &SPoly::var(stray), &SPoly::var(stray)).is_err());
    }

    #[test]
    fn skew_transport_of_ns_variant() {
        // the variant with central term -chi^5 is also skew-symmetric:
        // transporting {psi chi psi} through chi -> -chi-D returns the same
        // entry up to (-1)^{p p} = -1
        let mut vs = VarSet::new();
        let psi = vs.add("psi", Parity::Odd);
        let entry = ChiPoly::from_coeffs(vec![
            (0, SPoly::derived(psi, 2)),
            (1, SPoly::derived(psi, 1).scale(&ratio(1, 2))),
            (2, SPoly::var(psi).scale(&ratio(-3, 2))),
            (5, SPoly::constant(rat(-1))),
        ]);
        let transported = shift_chi(&entry, ChiShift::MinusChiMinusD);
        assert_eq!(entry, transported.scale(&rat(-1)));
    }

    #[test]
    fn double_skew_transport_is_identity() {
        let (_, spec, psi) = ns_spec();
        let e = spec.entry(psi.index, psi.index);
        let twice = shift_chi(&shift_chi(&e, ChiShift::MinusChiMinusD), ChiShift::MinusChiMinusD);
        assert_eq!(e, twice);
    }

    fn random_poly(
        rng: &mut impl rand::Rng,
        vars: &[Variable],
        max_deg: u32,
        max_ord: u32,
    ) -> SPoly {
        let mut out = SPoly::zero();
        let terms = rng.gen_range(1..=3);
        for _ in 0..terms {
            let deg = rng.gen_range(1..=max_deg);
            let mut list = Vec::new();
            for _ in 0..deg {
                let v = vars[rng.gen_range(0..vars.len())];
                let o = rng.gen_range(0..=max_ord);
                list.push((DerivedVar::new(v, o), 1u32));
            }
            let coeff = rat(rng.gen_range(-3..=3i64));
            out = &out + &SPoly::monomial(coeff, list);
        }
        out
    }

    #[test]
    fn master_agrees_with_axiom_recursion() {
        use rand::SeedableRng;
        let (_, spec, psi) = ns_spec();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let a = random_poly(&mut rng, &[psi], 3, 3);
            let b = random_poly(&mut rng, &[psi], 3, 3);
            let fast = master_bracket(&spec, &a, &b).unwrap();
            let slow = oracle::bracket(&spec, &a, &b).unwrap();
            assert_eq!(fast, slow, "mismatch on a={a:?} b={b:?}");
        }
    }

    #[test]
    fn lambda_reduction_satisfies_pva_skew() {
        // {a lambda b} = -(-1)^{p(a)p(b)} {b (-lambda-del) a} with del = D^2
        let (_, spec, psi) = ns_spec();
        let lam = lambda_bracket(&spec, &SPoly::var(psi), &SPoly::var(psi)).unwrap();
        // transport: sum_n (-lambda - del)^n c_n as a lambda-polynomial
        let mut transported: Vec<SPoly> = Vec::new();
        for (n, c) in lam.iter().enumerate() {
            let mut term: Vec<SPoly> = vec![c.clone()];
            for _ in 0..n {
                let mut next: Vec<SPoly> = vec![SPoly::zero(); term.len() + 1];
                for (k, t) in term.iter().enumerate() {
                    next[k] = &next[k] - &t.apply_d_n(2);
                    next[k + 1] = &next[k + 1] - t;
                }
                term = next;
            }
            for (k, t) in term.into_iter().enumerate() {
                if transported.len() <= k {
                    transported.resize(k + 1, SPoly::zero());
                }
                transported[k] = &transported[k] + &t;
            }
        }
        // p(psi) odd: the expected sign -(-1)^{1*1} is +1
        for k in 0..lam.len().max(transported.len()) {
            let l = lam.get(k).cloned().unwrap_or_else(SPoly::zero);
            let r = transported.get(k).cloned().unwrap_or_else(SPoly::zero);
            assert_eq!(l, r, "lambda^{k} coefficient mismatch");
        }
    }
}
