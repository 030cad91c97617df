//! Finite-dimensional Lie superalgebras with invariant bilinear form and
//! integer grading, the built-in families, the two affine bracket
//! structures on the parity-reversed generators, and the reduction data
//! (nilpotent subalgebras, dual bases, the odd elements f and s).

use crate::chibracket::{BracketSpec, ChiPoly};
use crate::error::{Error, Result};
use crate::linalg::{coordinates_in_span, LinearSolver, QMatrix};
use crate::superpoly::{Parity, SPoly, VarSet, Variable};
use crate::Rat;
use num::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Coefficient vector over the algebra basis.
pub type GVector = Vec<Rat>;

pub fn gvec_zero(dim: usize) -> GVector {
    vec![Rat::zero(); dim]
}

pub fn gvec_is_zero(v: &[Rat]) -> bool {
    v.iter().all(Rat::is_zero)
}

pub fn gvec_add_scaled(acc: &mut GVector, v: &[Rat], c: &Rat) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += x.clone() * c;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisElem {
    pub name: String,
    pub parity: Parity,
    pub degree: i64,
}

/// Lie superalgebra given by structure constants, with a supersymmetric
/// invariant even bilinear form compatible with the grading.
#[derive(Debug, Clone)]
pub struct LieSuperAlgebra {
    pub basis: Vec<BasisElem>,
    /// stored brackets; missing `(j, i)` entries are derived from `(i, j)`
    /// by super-skew-symmetry
    brackets: BTreeMap<(usize, usize), GVector>,
    /// `form[(i, j)]` is the pairing of basis elements i and j
    pub form: QMatrix,
}

impl LieSuperAlgebra {
    pub fn new(basis: Vec<BasisElem>) -> Self {
        let dim = basis.len();
        LieSuperAlgebra {
            basis,
            brackets: BTreeMap::new(),
            form: QMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.basis
            .iter()
            .position(|b| b.name == name)
            .ok_or_else(|| Error::UnknownBasisElement(name.to_string()))
    }

    pub fn set_bracket(&mut self, i: usize, j: usize, v: GVector) {
        assert_eq!(v.len(), self.dim());
        if gvec_is_zero(&v) {
            self.brackets.remove(&(i, j));
        } else {
            self.brackets.insert((i, j), v);
        }
    }

    /// Iterates over the stored (not derived) bracket entries.
    pub fn stored_brackets(&self) -> impl Iterator<Item = (&(usize, usize), &GVector)> {
        self.brackets.iter()
    }

    /// Replaces a stored bracket entry directly; used by the mutation
    /// sensitivity tests.
    pub fn perturb_bracket(&mut self, key: (usize, usize), component: usize, delta: Rat) {
        let dim = self.dim();
        let entry = self.brackets.entry(key).or_insert_with(|| gvec_zero(dim));
        entry[component] += delta;
    }

    pub fn set_form(&mut self, i: usize, j: usize, c: Rat) {
        self.form[(i, j)] = c.clone();
        // supersymmetric completion
        let sign = if self.basis[i].parity.is_odd() && self.basis[j].parity.is_odd() {
            -Rat::one()
        } else {
            Rat::one()
        };
        self.form[(j, i)] = c * sign;
    }

    /// Bracket of two basis elements.
    pub fn bracket_basis(&self, i: usize, j: usize) -> GVector {
        if let Some(v) = self.brackets.get(&(i, j)) {
            return v.clone();
        }
        if let Some(v) = self.brackets.get(&(j, i)) {
            let sign = if self.basis[i].parity.is_odd() && self.basis[j].parity.is_odd() {
                Rat::one()
            } else {
                -Rat::one()
            };
            return v.iter().map(|c| c.clone() * &sign).collect();
        }
        gvec_zero(self.dim())
    }

    /// Bilinear extension of the bracket.
    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> GVector {
        let mut out = gvec_zero(self.dim());
        for (i, ci) in x.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, cj) in y.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                let v = self.bracket_basis(i, j);
                gvec_add_scaled(&mut out, &v, &(ci.clone() * cj));
            }
        }
        out
    }

    /// Bilinear form of two vectors.
    pub fn pair(&self, x: &[Rat], y: &[Rat]) -> Rat {
        let mut out = Rat::zero();
        for (i, ci) in x.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, cj) in y.iter().enumerate() {
                if !cj.is_zero() && !self.form[(i, j)].is_zero() {
                    out += ci.clone() * cj * &self.form[(i, j)];
                }
            }
        }
        out
    }

    pub fn basis_vector(&self, i: usize) -> GVector {
        let mut v = gvec_zero(self.dim());
        v[i] = Rat::one();
        v
    }

    /// Parity of a vector if homogeneous.
    pub fn vector_parity(&self, v: &[Rat]) -> Option<Parity> {
        let mut found = None;
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match found {
                None => found = Some(self.basis[i].parity),
                Some(p) if p == self.basis[i].parity => {}
                _ => return None,
            }
        }
        found
    }

    /// Degree of a vector if homogeneous.
    pub fn vector_degree(&self, v: &[Rat]) -> Option<i64> {
        let mut found = None;
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match found {
                None => found = Some(self.basis[i].degree),
                Some(d) if d == self.basis[i].degree => {}
                _ => return None,
            }
        }
        found
    }

    pub fn format_vector(&self, v: &[Rat]) -> String {
        let mut parts = Vec::new();
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if c.is_one() {
                parts.push(self.basis[i].name.clone());
            } else {
                parts.push(format!(
                    "{}*{}",
                    crate::superpoly::fmt_rat(c),
                    self.basis[i].name
                ));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// Exhaustive check of the algebra axioms: super-skew-symmetry of the
    /// stored table, parity and grading compatibility, the super Jacobi
    /// identity on all basis triples, and the form being even,
    /// supersymmetric, invariant, nondegenerate and pairing opposite
    /// degrees.
    pub fn validate(&self) -> crate::chibracket::CheckReport {
        let mut report = crate::chibracket::CheckReport {
            name: "lie-superalgebra".into(),
            ..Default::default()
        };
        let dim = self.dim();
        for i in 0..dim {
            for j in 0..dim {
                report.cases += 1;
                let br = self.bracket_basis(i, j);
                // skew: [a,b] + (-1)^{p(a)p(b)} [b,a] = 0
                let flip = self.bracket_basis(j, i);
                let sign = if self.basis[i].parity.is_odd() && self.basis[j].parity.is_odd() {
                    Rat::one()
                } else {
                    -Rat::one()
                };
                let mut resid = br.clone();
                gvec_add_scaled(&mut resid, &flip, &(-sign));
                if !gvec_is_zero(&resid) {
                    report.failures.push(format!(
                        "skew failure on [{}, {}]: residual {}",
                        self.basis[i].name,
                        self.basis[j].name,
                        self.format_vector(&resid)
                    ));
                }
                // parity compatibility
                let want = self.basis[i].parity + self.basis[j].parity;
                for (k, c) in br.iter().enumerate() {
                    if !c.is_zero() && self.basis[k].parity != want {
                        report.failures.push(format!(
                            "parity failure: [{}, {}] has component {}",
                            self.basis[i].name, self.basis[j].name, self.basis[k].name
                        ));
                    }
                }
                // grading compatibility
                let deg = self.basis[i].degree + self.basis[j].degree;
                for (k, c) in br.iter().enumerate() {
                    if !c.is_zero() && self.basis[k].degree != deg {
                        report.failures.push(format!(
                            "grading failure: [{}, {}] has component {} of degree {}",
                            self.basis[i].name,
                            self.basis[j].name,
                            self.basis[k].name,
                            self.basis[k].degree
                        ));
                    }
                }
                // form: even, supersymmetric, paired degrees
                let f = &self.form[(i, j)];
                if !f.is_zero() {
                    if self.basis[i].parity != self.basis[j].parity {
                        report.failures.push(format!(
                            "form pairs elements of different parity: ({}|{})",
                            self.basis[i].name, self.basis[j].name
                        ));
                    }
                    if self.basis[i].degree + self.basis[j].degree != 0 {
                        report.failures.push(format!(
                            "form pairs degrees {} and {}: ({}|{})",
                            self.basis[i].degree,
                            self.basis[j].degree,
                            self.basis[i].name,
                            self.basis[j].name
                        ));
                    }
                    let sign = if self.basis[i].parity.is_odd() {
                        -Rat::one()
                    } else {
                        Rat::one()
                    };
                    if self.form[(j, i)] != f.clone() * sign {
                        report.failures.push(format!(
                            "form not supersymmetric on ({}|{})",
                            self.basis[i].name, self.basis[j].name
                        ));
                    }
                }
            }
        }
        // invariance ([a,b]|c) = (a|[b,c])
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    report.cases += 1;
                    let lhs = self.pair(&self.bracket_basis(i, j), &self.basis_vector(k));
                    let rhs = self.pair(&self.basis_vector(i), &self.bracket_basis(j, k));
                    if lhs != rhs {
                        report.failures.push(format!(
                            "invariance failure: ([{0},{1}]|{2}) = {3} but ({0}|[{1},{2}]) = {4}",
                            self.basis[i].name,
                            self.basis[j].name,
                            self.basis[k].name,
                            crate::superpoly::fmt_rat(&lhs),
                            crate::superpoly::fmt_rat(&rhs)
                        ));
                    }
                }
            }
        }
        // Jacobi identity [a,[b,c]] = [[a,b],c] + (-1)^{p(a)p(b)} [b,[a,c]]
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    report.cases += 1;
                    let lhs = self.bracket(&self.basis_vector(i), &self.bracket_basis(j, k));
                    let t1 = self.bracket(&self.bracket_basis(i, j), &self.basis_vector(k));
                    let t2 = self.bracket(&self.basis_vector(j), &self.bracket_basis(i, k));
                    let sign = if self.basis[i].parity.is_odd() && self.basis[j].parity.is_odd()
                    {
                        -Rat::one()
                    } else {
                        Rat::one()
                    };
                    let mut resid = lhs;
                    gvec_add_scaled(&mut resid, &t1, &-Rat::one());
                    gvec_add_scaled(&mut resid, &t2, &-sign);
                    if !gvec_is_zero(&resid) {
                        report.failures.push(format!(
                            "jacobi failure on ({}, {}, {}): residual {}",
                            self.basis[i].name,
                            self.basis[j].name,
                            self.basis[k].name,
                            self.format_vector(&resid)
                        ));
                    }
                }
            }
        }
        report.cases += 1;
        if self.form.det().is_zero() {
            report.failures.push("form is degenerate".into());
        }
        report
    }

    /// Variables of the parity-reversed generators, one per basis element.
    pub fn bar_varset(&self) -> VarSet {
        let mut vs = VarSet::new();
        for b in &self.basis {
            vs.add(b.name.clone(), b.parity.flip());
        }
        vs
    }

    /// Linear combination of parity-reversed generators as a polynomial.
    pub fn bar_poly(&self, v: &[Rat], vars: &VarSet) -> SPoly {
        let mut p = SPoly::zero();
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                p = &p + &SPoly::var(vars.var(i as u32)).scale(c);
            }
        }
        p
    }

    /// The affine bracket structure on the parity-reversed generators:
    /// structure 1 is `(-1)^{p(a)} (bar([a,b]) + chi (a|b))`, structure 2 is
    /// the constant `(-1)^{p(a)+1} (s|[a,b])`.
    pub fn affine_spec(
        &self,
        which: u8,
        s: Option<&GVector>,
        vars: &VarSet,
    ) -> Result<BracketSpec> {
        let gens: Vec<Variable> = (0..self.dim()).map(|i| vars.var(i as u32)).collect();
        let mut spec = BracketSpec::new(gens.clone());
        if which == 2 {
            let s = s.ok_or_else(|| Error::InvalidInput("structure 2 needs s".into()))?;
            match self.vector_parity(s) {
                None => {} // zero vector is fine
                Some(Parity::Odd) => {}
                Some(Parity::Even) => {
                    return Err(Error::ParityMismatch("s must be odd".into()))
                }
            }
        }
        for (i, gi) in gens.iter().enumerate() {
            for (j, gj) in gens.iter().enumerate() {
                let br = self.bracket_basis(i, j);
                let entry = match which {
                    1 => {
                        let sign = if self.basis[i].parity.is_odd() {
                            -Rat::one()
                        } else {
                            Rat::one()
                        };
                        let body = self.bar_poly(&br, vars).scale(&sign);
                        let central = self.form[(i, j)].clone() * &sign;
                        ChiPoly::from_coeffs(vec![(0, body), (1, SPoly::constant(central))])
                    }
                    2 => {
                        let s = s.unwrap();
                        let sign = if self.basis[i].parity.is_odd() {
                            Rat::one()
                        } else {
                            -Rat::one()
                        };
                        let c = self.pair(s, &br) * sign;
                        ChiPoly::from_spoly(SPoly::constant(c))
                    }
                    _ => return Err(Error::InvalidInput("which must be 1 or 2".into())),
                };
                spec.try_set_entry(*gi, *gj, entry)?;
            }
        }
        Ok(spec)
    }
}

/// Reduction input: nested subalgebras, the two odd elements and the
/// gauge-fixing complement, together with computed dual bases.
#[derive(Debug, Clone)]
pub struct ReductionData {
    pub algebra: LieSuperAlgebra,
    pub n_idx: Vec<usize>,
    pub m_idx: Vec<usize>,
    pub f: GVector,
    pub s: GVector,
    /// complement of `[f, n]` inside the orthogonal of `m`; its members
    /// carry the reduced generators
    pub v_basis: Vec<GVector>,
    /// basis elements spanning the chosen complement of `m`
    pub b_minus_idx: Vec<usize>,
    /// `q_t` over the full index range: first the complement of `m`, then
    /// `m` itself
    pub q_lower: Vec<GVector>,
    /// dual vectors `q^t` with `(q^t | q_{t'}) = delta`
    pub q_upper: Vec<GVector>,
    /// number of leading dual pairs (those spanning the orthogonal of `m`)
    pub i_count: usize,
    /// positive integer `i` with `f` of degree `-i`
    pub deg_i: i64,
    /// positive integer `j`, the degree of `s`
    pub deg_j: i64,
}

impl ReductionData {
    /// Builds the reduction data, computing the complement of `m`, the dual
    /// bases, and (when not supplied) the gauge-fixing complement `V`.
    pub fn new(
        algebra: LieSuperAlgebra,
        n_idx: Vec<usize>,
        m_idx: Vec<usize>,
        f: GVector,
        s: GVector,
        v_basis: Option<Vec<GVector>>,
    ) -> Result<Self> {
        let dim = algebra.dim();
        let deg_i = -algebra
            .vector_degree(&f)
            .ok_or_else(|| Error::InvalidInput("f must be degree-homogeneous".into()))?;
        let deg_j = algebra
            .vector_degree(&s)
            .ok_or_else(|| Error::InvalidInput("s must be degree-homogeneous".into()))?;
        let b_minus_idx: Vec<usize> = (0..dim).filter(|i| !m_idx.contains(i)).collect();
        let mut q_lower: Vec<GVector> = Vec::with_capacity(dim);
        for &i in &b_minus_idx {
            q_lower.push(algebra.basis_vector(i));
        }
        for &i in &m_idx {
            q_lower.push(algebra.basis_vector(i));
        }
        // dual basis: (q^t | q_{t'}) = delta_{t,t'}; row t' of the system
        // pairs the unknown against q_{t'}
        let mut gram = QMatrix::zeros(dim, dim);
        for s_idx in 0..dim {
            for (tp, qtp) in q_lower.iter().enumerate() {
                gram[(tp, s_idx)] = algebra.pair(&algebra.basis_vector(s_idx), qtp);
            }
        }
        let solver = LinearSolver::new(&gram);
        let mut q_upper = Vec::with_capacity(dim);
        for t in 0..dim {
            let mut rhs = vec![Rat::zero(); dim];
            rhs[t] = Rat::one();
            let c = solver
                .solve(&rhs)
                .ok_or_else(|| Error::SolveFailure("degenerate form: no dual basis".into()))?;
            q_upper.push(c);
        }
        let i_count = b_minus_idx.len();
        // gauge-fixing complement: V + [f, n] = orthogonal of m
        let fn_span: Vec<GVector> = n_idx
            .iter()
            .map(|&k| algebra.bracket(&f, &algebra.basis_vector(k)))
            .collect();
        let v_basis = match v_basis {
            Some(v) => v,
            None => {
                // greedy completion of [f, n] by dual vectors q^t, t in I
                let mut chosen: Vec<GVector> = Vec::new();
                let mut span: Vec<GVector> = fn_span.clone();
                for qt in q_upper.iter().take(i_count) {
                    if coordinates_in_span(&span, qt).is_none() {
                        span.push(qt.clone());
                        chosen.push(qt.clone());
                    }
                }
                chosen
            }
        };
        Ok(ReductionData {
            algebra,
            n_idx,
            m_idx,
            f,
            s,
            v_basis,
            b_minus_idx,
            q_lower,
            q_upper,
            i_count,
            deg_i,
            deg_j,
        })
    }

    /// z carries degree `-(i + j)` in the extended grading.
    pub fn z_degree(&self) -> i64 {
        -(self.deg_i + self.deg_j)
    }

    pub fn in_span(&self, vectors: &[GVector], v: &[Rat]) -> bool {
        coordinates_in_span(vectors, v).is_some()
    }

    fn span_of(&self, idx: &[usize]) -> Vec<GVector> {
        idx.iter().map(|&i| self.algebra.basis_vector(i)).collect()
    }

    /// Exact verification of every reduction assumption; failures carry a
    /// witness.
    pub fn validate(&self) -> crate::chibracket::CheckReport {
        let g = &self.algebra;
        let mut report = crate::chibracket::CheckReport {
            name: "reduction-data".into(),
            ..Default::default()
        };

        // m inside n inside the positive part, both spanned by basis elements
        for &i in &self.m_idx {
            if !self.n_idx.contains(&i) {
                report
                    .failures
                    .push(format!("m component {} not in n", g.basis[i].name));
            }
        }
        for &i in &self.n_idx {
            if g.basis[i].degree <= 0 {
                report.failures.push(format!(
                    "n component {} has nonpositive degree",
                    g.basis[i].name
                ));
            }
        }
        if self.deg_i <= 0 {
            report
                .failures
                .push(format!("f degree {} is not negative", -self.deg_i));
        }
        if self.deg_j <= 0 {
            report
                .failures
                .push(format!("s degree {} is not positive", self.deg_j));
        }
        if !gvec_is_zero(&self.f) && g.vector_parity(&self.f) != Some(Parity::Odd) {
            report.failures.push("f is not odd".into());
        }
        if !gvec_is_zero(&self.s) && g.vector_parity(&self.s) != Some(Parity::Odd) {
            report.failures.push("s is not odd".into());
        }
        // n is a subalgebra, m an n-module
        let n_span = self.span_of(&self.n_idx);
        let m_span = self.span_of(&self.m_idx);
        for &a in &self.n_idx {
            for &b in &self.n_idx {
                report.cases += 1;
                let br = g.bracket_basis(a, b);
                if !self.in_span(&n_span, &br) {
                    report.failures.push(format!(
                        "n is not a subalgebra: [{}, {}] = {}",
                        g.basis[a].name,
                        g.basis[b].name,
                        g.format_vector(&br)
                    ));
                }
            }
            for &b in &self.m_idx {
                report.cases += 1;
                let br = g.bracket_basis(a, b);
                if !self.in_span(&m_span, &br) {
                    report.failures.push(format!(
                        "m is not an n-module: [{}, {}] = {}",
                        g.basis[a].name,
                        g.basis[b].name,
                        g.format_vector(&br)
                    ));
                }
            }
        }
        // (A-1): everything of degree >= i lies in m
        for i in 0..g.dim() {
            report.cases += 1;
            if g.basis[i].degree >= self.deg_i && !self.m_idx.contains(&i) {
                report.failures.push(format!(
                    "(A-1) failure: {} has degree {} but is not in m",
                    g.basis[i].name, g.basis[i].degree
                ));
            }
        }
        // (A-2): [f, n] orthogonal to m
        for &a in &self.n_idx {
            let fa = g.bracket(&self.f, &g.basis_vector(a));
            for &b in &self.m_idx {
                report.cases += 1;
                let p = g.pair(&fa, &g.basis_vector(b));
                if !p.is_zero() {
                    report.failures.push(format!(
                        "(A-2) failure: ([f, {}] | {}) = {}",
                        g.basis[a].name,
                        g.basis[b].name,
                        crate::superpoly::fmt_rat(&p)
                    ));
                }
            }
        }
        // (A-3): ad f injective on n
        report.cases += 1;
        let images: Vec<GVector> = self
            .n_idx
            .iter()
            .map(|&a| g.bracket(&self.f, &g.basis_vector(a)))
            .collect();
        let rank = if images.is_empty() {
            0
        } else {
            QMatrix::from_rows(images.clone()).rref().1.len()
        };
        if rank != self.n_idx.len() {
            report.failures.push(format!(
                "(A-3) failure: ad f on n has rank {} < {}",
                rank,
                self.n_idx.len()
            ));
        }
        // (A-4): [s, n] = 0
        for &a in &self.n_idx {
            report.cases += 1;
            let br = g.bracket(&self.s, &g.basis_vector(a));
            if !gvec_is_zero(&br) {
                report.failures.push(format!(
                    "(A-4) failure: [s, {}] = {}",
                    g.basis[a].name,
                    g.format_vector(&br)
                ));
            }
        }
        // duality and its sign convention
        for t in 0..g.dim() {
            for tp in 0..g.dim() {
                report.cases += 1;
                let p = g.pair(&self.q_upper[t], &self.q_lower[tp]);
                let want = if t == tp { Rat::one() } else { Rat::zero() };
                if p != want {
                    report
                        .failures
                        .push(format!("duality failure at ({t}, {tp}): {p}"));
                }
            }
            report.cases += 1;
            let back = g.pair(&self.q_lower[t], &self.q_upper[t]);
            let sign = match g.vector_parity(&self.q_upper[t]) {
                Some(Parity::Odd) => -Rat::one(),
                _ => Rat::one(),
            };
            if back != sign {
                report.failures.push(format!(
                    "dual sign convention failure at {t}: (q_t|q^t) = {back}"
                ));
            }
        }
        // V + [f, n] spans the orthogonal of m with trivial intersection
        report.cases += 1;
        let mut span: Vec<GVector> = images.clone();
        for v in &self.v_basis {
            if self.in_span(&span, v) {
                report
                    .failures
                    .push(format!("V intersects [f, n]: {}", g.format_vector(v)));
            } else {
                span.push(v.clone());
            }
        }
        if rank + self.v_basis.len() != self.i_count {
            report.failures.push(format!(
                "V + [f,n] has dimension {} but the orthogonal of m has dimension {}",
                rank + self.v_basis.len(),
                self.i_count
            ));
        }
        for v in span.iter() {
            for &b in &self.m_idx {
                report.cases += 1;
                if !g.pair(v, &g.basis_vector(b)).is_zero() {
                    report
                        .failures
                        .push("V + [f,n] is not orthogonal to m".into());
                }
            }
        }
        report
    }
}

/// Square matrix with rational entries, used to realize the built-in
/// families.
#[derive(Debug, Clone, PartialEq)]
struct Mat {
    n: usize,
    data: Vec<Rat>,
}

impl Mat {
    fn zeros(n: usize) -> Self {
        Mat {
            n,
            data: vec![Rat::zero(); n * n],
        }
    }

    fn e(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m.data[i * n + j] = Rat::one();
        m
    }

    fn add(&self, o: &Mat) -> Mat {
        Mat {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        }
    }

    fn scale(&self, c: &Rat) -> Mat {
        Mat {
            n: self.n,
            data: self.data.iter().map(|a| a.clone() * c).collect(),
        }
    }

    fn mul(&self, o: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &o.data[k * n + j];
                    if !b.is_zero() {
                        out.data[i * n + j] += a.clone() * b;
                    }
                }
            }
        }
        out
    }

    fn supercommutator(&self, o: &Mat, p_self: Parity, p_other: Parity) -> Mat {
        let sign = if p_self.is_odd() && p_other.is_odd() {
            Rat::one()
        } else {
            -Rat::one()
        };
        self.mul(o).add(&o.mul(self).scale(&sign))
    }

    fn supertrace(&self, odd_from: usize) -> Rat {
        let mut t = Rat::zero();
        for i in 0..self.n {
            if i < odd_from {
                t += self.data[i * self.n + i].clone();
            } else {
                t -= self.data[i * self.n + i].clone();
            }
        }
        t
    }
}

/// Builds an algebra from matrix generators: structure constants by
/// expressing supercommutators in the span, form by scaled supertrace.
fn from_matrix_generators(
    gens: Vec<(String, Mat, Parity, i64)>,
    odd_from: usize,
    form_scale: Rat,
) -> Result<LieSuperAlgebra> {
    let basis: Vec<BasisElem> = gens
        .iter()
        .map(|(name, _, p, d)| BasisElem {
            name: name.clone(),
            parity: *p,
            degree: *d,
        })
        .collect();
    let dim = basis.len();
    let msize = gens[0].1.n;
    let mut span = QMatrix::zeros(msize * msize, dim);
    for (col, (_, m, _, _)) in gens.iter().enumerate() {
        for (row, v) in m.data.iter().enumerate() {
            span[(row, col)] = v.clone();
        }
    }
    let solver = LinearSolver::new(&span);
    if solver.rank() != dim {
        return Err(Error::InvalidInput(
            "matrix generators are linearly dependent".into(),
        ));
    }
    let mut algebra = LieSuperAlgebra::new(basis);
    for i in 0..dim {
        for j in i..dim {
            let br = gens[i].1.supercommutator(&gens[j].1, gens[i].2, gens[j].2);
            let coords = solver.solve(&br.data).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "bracket [{}, {}] leaves the span",
                    gens[i].0, gens[j].0
                ))
            })?;
            algebra.set_bracket(i, j, coords);
        }
        for j in 0..dim {
            let tr = gens[i].1.mul(&gens[j].1).supertrace(odd_from) * &form_scale;
            algebra.form[(i, j)] = tr;
        }
    }
    Ok(algebra)
}

/// The eight-dimensional simple algebra with two odd raising/lowering pairs,
/// realized inside the (2|1) matrix superalgebra so that all structure
/// constants and pairings come out of one presentation.
pub fn osp22() -> Result<(LieSuperAlgebra, ReductionData)> {
    let n = 3;
    let e = |i: usize, j: usize| Mat::e(n, i - 1, j - 1);
    let gens = vec![
        ("e1".to_string(), e(1, 3), Parity::Odd, 0i64),
        ("e2".to_string(), e(3, 2), Parity::Odd, 1),
        ("e3".to_string(), e(1, 2), Parity::Even, 1),
        (
            "f1".to_string(),
            e(3, 1).scale(&crate::rat(2)),
            Parity::Odd,
            0,
        ),
        (
            "f2".to_string(),
            e(2, 3).scale(&crate::rat(-2)),
            Parity::Odd,
            -1,
        ),
        (
            "f3".to_string(),
            e(2, 1).scale(&crate::rat(-4)),
            Parity::Even,
            -1,
        ),
        (
            "h1".to_string(),
            e(1, 1).add(&e(3, 3)).scale(&crate::rat(2)),
            Parity::Even,
            0,
        ),
        (
            "h2".to_string(),
            e(2, 2).add(&e(3, 3)).scale(&crate::rat(-2)),
            Parity::Even,
            0,
        ),
    ];
    let algebra = from_matrix_generators(gens, 2, crate::rat(-1))?;
    let f = algebra.basis_vector(algebra.index_of("f2")?);
    let s = algebra.basis_vector(algebra.index_of("e2")?);
    let n_idx = vec![algebra.index_of("e2")?, algebra.index_of("e3")?];
    let v_basis = vec![
        algebra.basis_vector(algebra.index_of("f1")?),
        algebra.basis_vector(algebra.index_of("h1")?),
        algebra.basis_vector(algebra.index_of("e2")?),
        algebra.basis_vector(algebra.index_of("e3")?),
    ];
    let rd = ReductionData::new(algebra, n_idx.clone(), n_idx, f, s, Some(v_basis))?;
    Ok((rd.algebra.clone(), rd))
}

/// The special linear superalgebra of block sizes (m|n) with m > n, with the
/// principal block grading and f, s on the outer antidiagonal blocks.
pub fn slmn(m: usize, n: usize) -> Result<(LieSuperAlgebra, ReductionData)> {
    if m <= n || n == 0 {
        return Err(Error::InvalidParams {
            name: "sl(m|n)".into(),
            reason: "requires m > n >= 1".into(),
        });
    }
    let size = m + n;
    let block = |a: usize| -> i64 {
        if a < n {
            0
        } else if a < m {
            1
        } else {
            2
        }
    };
    let parity = |a: usize| -> Parity {
        if a < m {
            Parity::Even
        } else {
            Parity::Odd
        }
    };
    let mut gens: Vec<(String, Mat, Parity, i64)> = Vec::new();
    for a in 0..size {
        for b in 0..size {
            if a == b {
                continue;
            }
            gens.push((
                format!("E{}_{}", a + 1, b + 1),
                Mat::e(size, a, b),
                parity(a) + parity(b),
                block(b) - block(a),
            ));
        }
    }
    for k in 0..size - 1 {
        // supertraceless diagonal basis
        let eps = if k < m { Rat::one() } else { -Rat::one() };
        gens.push((
            format!("H{}", k + 1),
            Mat::e(size, k, k).add(&Mat::e(size, size - 1, size - 1).scale(&eps)),
            Parity::Even,
            0,
        ));
    }
    let algebra = from_matrix_generators(gens, m, Rat::one())?;
    // f at the lower-left block, s at the upper-right block
    let mut f = gvec_zero(algebra.dim());
    let mut s = gvec_zero(algebra.dim());
    for k in 0..n {
        f[algebra.index_of(&format!("E{}_{}", m + k + 1, k + 1))?] = Rat::one();
        s[algebra.index_of(&format!("E{}_{}", k + 1, m + k + 1))?] = Rat::one();
    }
    let n_idx: Vec<usize> = (0..algebra.dim())
        .filter(|&i| algebra.basis[i].degree >= 1)
        .collect();
    let m_idx: Vec<usize> = (0..algebra.dim())
        .filter(|&i| algebra.basis[i].degree >= 2)
        .collect();
    let rd = ReductionData::new(algebra, n_idx, m_idx, f, s, None)?;
    Ok((rd.algebra.clone(), rd))
}

/// The orthosymplectic family of block sizes (2n|2n) in its standard matrix
/// shape, with the alternating block grading and f, s on the antidiagonal.
pub fn osp2n2n(n: usize) -> Result<(LieSuperAlgebra, ReductionData)> {
    if n == 0 {
        return Err(Error::InvalidParams {
            name: "osp(2n|2n)".into(),
            reason: "requires n >= 1".into(),
        });
    }
    let size = 4 * n;
    let e = Mat::e;
    let mut gens: Vec<(String, Mat, Parity, i64)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            gens.push((
                format!("a{}_{}", i + 1, j + 1),
                e(size, i, j).add(&e(size, n + j, n + i).scale(&-Rat::one())),
                Parity::Even,
                0,
            ));
            gens.push((
                format!("c{}_{}", i + 1, j + 1),
                e(size, 2 * n + i, 2 * n + j)
                    .add(&e(size, 3 * n + j, 3 * n + i).scale(&-Rat::one())),
                Parity::Even,
                0,
            ));
        }
    }
    for i in 0..n {
        for j in i..n {
            // symmetric off-diagonal even blocks
            let mut b_up = e(size, i, n + j);
            let mut b_dn = e(size, n + i, j);
            if i != j {
                b_up = b_up.add(&e(size, j, n + i));
                b_dn = b_dn.add(&e(size, n + j, i));
            }
            gens.push((format!("b{}_{}", i + 1, j + 1), b_up, Parity::Even, 1));
            gens.push((format!("bt{}_{}", i + 1, j + 1), b_dn, Parity::Even, -1));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            // skew-symmetric even blocks in the odd sector
            gens.push((
                format!("d{}_{}", i + 1, j + 1),
                e(size, 2 * n + i, 3 * n + j)
                    .add(&e(size, 2 * n + j, 3 * n + i).scale(&-Rat::one())),
                Parity::Even,
                1,
            ));
            gens.push((
                format!("dt{}_{}", i + 1, j + 1),
                e(size, 3 * n + i, 2 * n + j)
                    .add(&e(size, 3 * n + j, 2 * n + i).scale(&-Rat::one())),
                Parity::Even,
                -1,
            ));
        }
    }
    for i in 0..n {
        for j in 0..n {
            gens.push((
                format!("x{}_{}", i + 1, j + 1),
                e(size, 2 * n + i, j).add(&e(size, n + j, 3 * n + i).scale(&-Rat::one())),
                Parity::Odd,
                0,
            ));
            gens.push((
                format!("y{}_{}", i + 1, j + 1),
                e(size, 2 * n + i, n + j).add(&e(size, j, 3 * n + i)),
                Parity::Odd,
                1,
            ));
            gens.push((
                format!("z{}_{}", i + 1, j + 1),
                e(size, 3 * n + i, j).add(&e(size, n + j, 2 * n + i).scale(&-Rat::one())),
                Parity::Odd,
                -1,
            ));
            gens.push((
                format!("w{}_{}", i + 1, j + 1),
                e(size, 3 * n + i, n + j).add(&e(size, j, 2 * n + i)),
                Parity::Odd,
                0,
            ));
        }
    }
    let algebra = from_matrix_generators(gens, 2 * n, crate::ratio(1, 2))?;
    let mut f = gvec_zero(algebra.dim());
    let mut s = gvec_zero(algebra.dim());
    for k in 0..n {
        f[algebra.index_of(&format!("z{}_{}", k + 1, k + 1))?] = Rat::one();
        s[algebra.index_of(&format!("y{}_{}", k + 1, k + 1))?] = Rat::one();
    }
    let n_idx: Vec<usize> = (0..algebra.dim())
        .filter(|&i| algebra.basis[i].degree >= 1)
        .collect();
    let rd = ReductionData::new(algebra, n_idx.clone(), n_idx, f, s, None)?;
    Ok((rd.algebra.clone(), rd))
}

/// Looks up a built-in algebra by name; accepts `osp22`, `sl21`,
/// `slmn:M,N` and `osp2n2n:N`.
pub fn builtin(name: &str) -> Result<(LieSuperAlgebra, ReductionData)> {
    match name {
        "osp22" | "osp(2|2)" => osp22(),
        "sl21" | "sl(2|1)" => slmn(2, 1),
        _ => {
            if let Some(rest) = name.strip_prefix("slmn:") {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() == 2 {
                    let m = parts[0].trim().parse().map_err(|_| Error::InvalidParams {
                        name: name.into(),
                        reason: "bad m".into(),
                    })?;
                    let nn = parts[1].trim().parse().map_err(|_| Error::InvalidParams {
                        name: name.into(),
                        reason: "bad n".into(),
                    })?;
                    return slmn(m, nn);
                }
                Err(Error::InvalidParams {
                    name: name.into(),
                    reason: "expected slmn:M,N".into(),
                })
            } else if let Some(rest) = name.strip_prefix("osp2n2n:") {
                let nn = rest.trim().parse().map_err(|_| Error::InvalidParams {
                    name: name.into(),
                    reason: "bad n".into(),
                })?;
                osp2n2n(nn)
            } else {
                Err(Error::UnknownBuiltin(name.into()))
            }
        }
    }
}

/// JSON document schema for user algebras.
#[derive(Debug, Serialize, Deserialize)]
pub struct AlgebraDoc {
    pub basis: Vec<BasisDoc>,
    pub brackets: Vec<(String, String, BTreeMap<String, String>)>,
    pub form: Vec<(String, String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BasisDoc {
    pub name: String,
    pub parity: String,
    pub degree: i64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReductionDoc {
    pub n: Vec<String>,
    pub m: Vec<String>,
    pub f: BTreeMap<String, String>,
    pub s: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<BTreeMap<String, String>>>,
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let parse_int = |x: &str| -> Result<num::BigInt> {
        x.trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad rational `{s}`")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::InvalidInput(format!("zero denominator in `{s}`")));
            }
            Ok(Rat::new(parse_int(p)?, den))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

impl AlgebraDoc {
    pub fn into_algebra(self) -> Result<(LieSuperAlgebra, Option<ReductionData>)> {
        let basis: Vec<BasisElem> = self
            .basis
            .iter()
            .map(|b| {
                let parity = match b.parity.as_str() {
                    "even" => Ok(Parity::Even),
                    "odd" => Ok(Parity::Odd),
                    other => Err(Error::InvalidInput(format!("bad parity `{other}`"))),
                }?;
                Ok(BasisElem {
                    name: b.name.clone(),
                    parity,
                    degree: b.degree,
                })
            })
            .collect::<Result<_>>()?;
        let mut algebra = LieSuperAlgebra::new(basis);
        let dim = algebra.dim();
        for (a, b, combo) in &self.brackets {
            let i = algebra.index_of(a)?;
            let j = algebra.index_of(b)?;
            let mut v = gvec_zero(dim);
            for (name, c) in combo {
                v[algebra.index_of(name)?] = parse_rat(c)?;
            }
            algebra.set_bracket(i, j, v);
        }
        for (a, b, c) in &self.form {
            let i = algebra.index_of(a)?;
            let j = algebra.index_of(b)?;
            algebra.set_form(i, j, parse_rat(c)?);
        }
        let vector =
            |algebra: &LieSuperAlgebra, map: &BTreeMap<String, String>| -> Result<GVector> {
                let mut v = gvec_zero(algebra.dim());
                for (name, c) in map {
                    v[algebra.index_of(name)?] = parse_rat(c)?;
                }
                Ok(v)
            };
        let rd = match self.reduction {
            None => None,
            Some(doc) => {
                let n_idx = doc
                    .n
                    .iter()
                    .map(|s| algebra.index_of(s))
                    .collect::<Result<_>>()?;
                let m_idx = doc
                    .m
                    .iter()
                    .map(|s| algebra.index_of(s))
                    .collect::<Result<_>>()?;
                let f = vector(&algebra, &doc.f)?;
                let s = vector(&algebra, &doc.s)?;
                let v_basis = match &doc.v {
                    None => None,
                    Some(list) => Some(
                        list.iter()
                            .map(|m| vector(&algebra, m))
                            .collect::<Result<_>>()?,
                    ),
                };
                Some(ReductionData::new(
                    algebra.clone(),
                    n_idx,
                    m_idx,
                    f,
                    s,
                    v_basis,
                )?)
            }
        };
        Ok((algebra, rd))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chibracket::{check_compatibility, check_jacobi, check_skew_symmetry};
    use crate::rat;

    #[test]
    fn osp22_matches_the_presentation() {
        let (g, _) = osp22().unwrap();
        assert_eq!(g.dim(), 8);
        let idx = |n: &str| g.index_of(n).unwrap();
        let expect_one = |name: &str, c: i64| {
            let mut v = gvec_zero(8);
            v[idx(name)] = rat(c);
            v
        };
        assert_eq!(g.bracket_basis(idx("e1"), idx("e2")), expect_one("e3", 1));
        assert_eq!(g.bracket_basis(idx("e1"), idx("f1")), expect_one("h1", 1));
        assert_eq!(g.bracket_basis(idx("h2"), idx("e1")), expect_one("e1", 2));
        assert_eq!(g.bracket_basis(idx("h1"), idx("e2")), expect_one("e2", 2));
        assert_eq!(g.bracket_basis(idx("h1"), idx("f2")), expect_one("f2", -2));
        assert_eq!(g.bracket_basis(idx("h2"), idx("f1")), expect_one("f1", -2));
        assert_eq!(g.bracket_basis(idx("f1"), idx("f2")), expect_one("f3", 1));
        assert_eq!(g.bracket_basis(idx("e2"), idx("f2")), expect_one("h2", 1));
        // pairings
        assert_eq!(g.form[(idx("e1"), idx("f1"))], rat(-2));
        assert_eq!(g.form[(idx("e2"), idx("f2"))], rat(-2));
        assert_eq!(g.form[(idx("e3"), idx("f3"))], rat(4));
        assert_eq!(g.form[(idx("h1"), idx("h2"))], rat(-4));
        assert_eq!(g.form[(idx("e1"), idx("f2"))], rat(0));
    }

    #[test]
    fn builtins_validate() {
        for name in ["osp22", "sl21", "osp2n2n:1"] {
            let (g, rd) = builtin(name).unwrap();
            let vg = g.validate();
            assert!(vg.is_pass(), "{name} algebra: {vg}");
            let vr = rd.validate();
            assert!(vr.is_pass(), "{name} reduction: {vr}");
        }
    }

    #[test]
    fn osp22_grading_and_reduction_shape() {
        let (g, rd) = osp22().unwrap();
        let deg = |n: &str| g.basis[g.index_of(n).unwrap()].degree;
        assert_eq!(deg("e2"), 1);
        assert_eq!(deg("e3"), 1);
        assert_eq!(deg("f2"), -1);
        assert_eq!(deg("f3"), -1);
        for n in ["f1", "h1", "h2", "e1"] {
            assert_eq!(deg(n), 0);
        }
        assert_eq!(rd.deg_i, 1);
        assert_eq!(rd.deg_j, 1);
        assert_eq!(rd.z_degree(), -2);
        assert_eq!(rd.v_basis.len(), 4);
        assert_eq!(rd.i_count, 6);
    }

    #[test]
    fn corrupted_pairing_breaks_invariance() {
        let (mut g, _) = osp22().unwrap();
        let e3 = g.index_of("e3").unwrap();
        let f3 = g.index_of("f3").unwrap();
        g.set_form(e3, f3, rat(1));
        let report = g.validate();
        assert!(!report.is_pass());
        assert!(
            report.failures.iter().any(|f| f.contains("invariance")),
            "{report}"
        );
    }

    #[test]
    fn abelian_even_algebra_validates() {
        let mut g = LieSuperAlgebra::new(vec![
            BasisElem {
                name: "x".into(),
                parity: Parity::Even,
                degree: 0,
            },
            BasisElem {
                name: "y".into(),
                parity: Parity::Even,
                degree: 0,
            },
        ]);
        g.set_form(0, 0, rat(1));
        g.set_form(1, 1, rat(1));
        assert!(g.validate().is_pass());
    }

    #[test]
    fn affine_entry_values() {
        let (g, _) = osp22().unwrap();
        let vars = g.bar_varset();
        let spec1 = g.affine_spec(1, None, &vars).unwrap();
        let e1 = g.index_of("e1").unwrap() as u32;
        let f1 = g.index_of("f1").unwrap() as u32;
        let h1 = g.index_of("h1").unwrap() as u32;
        // {e1bar chi f1bar}_1 = -h1bar + 2 chi
        let entry = spec1.entry(e1, f1);
        assert_eq!(entry.coeff(0), -&SPoly::var(vars.var(h1)));
        assert_eq!(entry.coeff(1), SPoly::constant(rat(2)));

        // second structure: the nonzero entries pair through (s|.)
        let s = g.basis_vector(g.index_of("e2").unwrap());
        let spec2 = g.affine_spec(2, Some(&s), &vars).unwrap();
        let f2 = g.index_of("f2").unwrap() as u32;
        let f3 = g.index_of("f3").unwrap() as u32;
        assert_eq!(spec2.entry(e1, f3).coeff(0), SPoly::constant(rat(4)));
        assert_eq!(spec2.entry(f3, e1).coeff(0), SPoly::constant(rat(4)));
        assert_eq!(spec2.entry(h1, f2).coeff(0), SPoly::constant(rat(-4)));
        assert_eq!(spec2.entry(f2, h1).coeff(0), SPoly::constant(rat(-4)));
        // the pairing (s|[f2, f1]) = (e2|f3) vanishes, so this entry is zero
        assert!(spec2.entry(f2, f1).is_zero());
        // a zero s gives the zero structure
        let z = gvec_zero(8);
        let zero_spec = g.affine_spec(2, Some(&z), &vars).unwrap();
        for a in spec2.generators() {
            for b in spec2.generators() {
                assert!(zero_spec.entry(a.index, b.index).is_zero());
            }
        }
        // even s is rejected
        let even = g.basis_vector(g.index_of("e3").unwrap());
        assert!(g.affine_spec(2, Some(&even), &vars).is_err());
    }

    #[test]
    fn affine_specs_pass_axioms() {
        for name in ["osp22", "sl21"] {
            let (g, rd) = builtin(name).unwrap();
            let vars = g.bar_varset();
            let spec1 = g.affine_spec(1, None, &vars).unwrap();
            let spec2 = g.affine_spec(2, Some(&rd.s), &vars).unwrap();
            assert!(check_skew_symmetry(&spec1, &vars).is_pass(), "{name} 1");
            assert!(check_skew_symmetry(&spec2, &vars).is_pass(), "{name} 2");
            assert!(check_jacobi(&spec1, &vars).unwrap().is_pass(), "{name} 1");
            assert!(check_jacobi(&spec2, &vars).unwrap().is_pass(), "{name} 2");
            assert!(
                check_compatibility(&spec1, &spec2, &vars)
                    .unwrap()
                    .is_pass(),
                "{name}"
            );
        }
    }

    #[test]
    fn wrong_f_is_rejected() {
        // taking f = f3 instead of f2: ad f3 restricted to n actually has
        // full rank ([f3,e2] = 2f1, [f3,e3] = 2h1+2h2), but f3 is even, so
        // the data still fails validation
        let (g, _) = osp22().unwrap();
        let f3 = g.basis_vector(g.index_of("f3").unwrap());
        let s = g.basis_vector(g.index_of("e2").unwrap());
        let n_idx = vec![g.index_of("e2").unwrap(), g.index_of("e3").unwrap()];
        let rd = ReductionData::new(g.clone(), n_idx.clone(), n_idx.clone(), f3, s, None).unwrap();
        let report = rd.validate();
        assert!(!report.is_pass());
        assert!(
            report.failures.iter().any(|f| f.contains("f is not odd")),
            "{report}"
        );
    }

    #[test]
    fn rank_deficient_f_breaks_injectivity() {
        // an honest (A-3) failure: f = 0 has trivial image
        let (g, _) = osp22().unwrap();
        let zero = gvec_zero(8);
        let s = g.basis_vector(g.index_of("e2").unwrap());
        let n_idx = vec![g.index_of("e2").unwrap(), g.index_of("e3").unwrap()];
        let rd = ReductionData::new(g, n_idx.clone(), n_idx, zero, s, None);
        // the zero vector has no degree; fall back to a direct check
        assert!(rd.is_err());
    }

    #[test]
    fn degenerate_reduction_is_mostly_vacuous() {
        // with empty n and m the positive-degree checks still flag (A-1)
        // but all subalgebra and commutation checks pass vacuously
        let (g, _) = osp22().unwrap();
        let f = g.basis_vector(g.index_of("f2").unwrap());
        let s = g.basis_vector(g.index_of("e2").unwrap());
        let rd = ReductionData::new(g, vec![], vec![], f, s, Some(vec![])).unwrap();
        assert_eq!(rd.i_count, 8);
        let report = rd.validate();
        for failure in &report.failures {
            assert!(
                failure.contains("(A-1)") || failure.contains("dimension"),
                "{failure}"
            );
        }
    }

    #[test]
    fn json_roundtrip() {
        let doc: AlgebraDoc = serde_json::from_str(
            r#"{
              "basis": [
                {"name": "x", "parity": "even", "degree": 0},
                {"name": "y", "parity": "even", "degree": 0}
              ],
              "brackets": [],
              "form": [["x", "x", "1"], ["y", "y", "-1/2"]]
            }"#,
        )
        .unwrap();
        let (g, rd) = doc.into_algebra().unwrap();
        assert!(rd.is_none());
        assert!(g.validate().is_pass());
        assert_eq!(g.form[(1, 1)], crate::ratio(-1, 2));
    }
}
