//! The loop extension of the algebra: elements of g((z^{-1})) tensored with
//! super differential polynomials, truncated to a Laurent window in z, with
//! the kernel/image splitting of the squared odd element and its exact
//! inversion.

use crate::error::{Error, Result};
use crate::liesuper::{gvec_is_zero, gvec_zero, GVector, LieSuperAlgebra, ReductionData};
use crate::linalg::{LinearSolver, QMatrix};
use crate::superpoly::{SPoly, VarSet};
use crate::Rat;
use num::{One, Zero};
use std::collections::BTreeMap;

/// Laurent window for z powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZWindow {
    pub min: i64,
    pub max: i64,
}

impl ZWindow {
    pub fn new(min: i64, max: i64) -> Self {
        assert!(min <= max);
        ZWindow { min, max }
    }

    pub fn contains(&self, k: i64) -> bool {
        self.min <= k && k <= self.max
    }
}

/// Element of the loop algebra tensored with polynomials: a finite map from
/// (basis index, z power) to a polynomial coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LoopElem {
    entries: BTreeMap<(usize, i64), SPoly>,
}

impl LoopElem {
    pub fn zero() -> Self {
        Self::default()
    }

    /// A single basis element at a z power with coefficient 1.
    pub fn basis(idx: usize, z: i64) -> Self {
        let mut e = Self::zero();
        e.add_entry(idx, z, SPoly::one());
        e
    }

    /// Embeds an algebra vector at a z power with a polynomial coefficient.
    pub fn from_vector(v: &[Rat], z: i64, coeff: &SPoly) -> Self {
        let mut e = Self::zero();
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                e.add_entry(i, z, coeff.scale(c));
            }
        }
        e
    }

    pub fn add_entry(&mut self, idx: usize, z: i64, p: SPoly) {
        if p.is_zero() {
            return;
        }
        match self.entries.entry((idx, z)) {
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
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, i64, &SPoly)> {
        self.entries.iter().map(|(&(i, z), p)| (i, z, p))
    }

    pub fn entry(&self, idx: usize, z: i64) -> SPoly {
        self.entries
            .get(&(idx, z))
            .cloned()
            .unwrap_or_else(SPoly::zero)
    }

    pub fn z_powers(&self) -> std::collections::BTreeSet<i64> {
        self.entries.keys().map(|&(_, z)| z).collect()
    }

    pub fn scale(&self, c: &Rat) -> LoopElem {
        if c.is_zero() {
            return LoopElem::zero();
        }
        LoopElem {
            entries: self
                .entries
                .iter()
                .map(|(k, p)| (*k, p.scale(c)))
                .collect(),
        }
    }

    /// Multiplies every z power by z^shift.
    pub fn shift_z(&self, shift: i64) -> LoopElem {
        LoopElem {
            entries: self
                .entries
                .iter()
                .map(|(&(i, z), p)| ((i, z + shift), p.clone()))
                .collect(),
        }
    }

    /// Componentwise application of a polynomial map.
    pub fn map_coeffs(&self, f: impl Fn(&SPoly) -> SPoly) -> LoopElem {
        let mut out = LoopElem::zero();
        for (&(i, z), p) in &self.entries {
            out.add_entry(i, z, f(p));
        }
        out
    }

    /// The bracket `[D, x]`: each coefficient is differentiated with the
    /// sign of its algebra part's parity.
    pub fn d_bracket(&self, g: &LieSuperAlgebra) -> LoopElem {
        let mut out = LoopElem::zero();
        for (&(i, z), p) in &self.entries {
            let dp = p.apply_d();
            let t = if g.basis[i].parity.is_odd() { -&dp } else { dp };
            out.add_entry(i, z, t);
        }
        out
    }

    /// Componentwise second derivative (the even derivation).
    pub fn second_derivative(&self) -> LoopElem {
        self.map_coeffs(|p| p.apply_d_n(2))
    }

    /// Restriction to a single graded slot: components with
    /// `deg(basis) + z * z_deg = grade`.
    pub fn graded_component(&self, g: &LieSuperAlgebra, z_deg: i64, grade: i64) -> LoopElem {
        let mut out = LoopElem::zero();
        for (&(i, z), p) in &self.entries {
            if g.basis[i].degree + z * z_deg == grade {
                out.add_entry(i, z, p.clone());
            }
        }
        out
    }

    pub fn min_grade(&self, g: &LieSuperAlgebra, z_deg: i64) -> Option<i64> {
        self.entries
            .keys()
            .map(|&(i, z)| g.basis[i].degree + z * z_deg)
            .min()
    }

    pub fn max_grade(&self, g: &LieSuperAlgebra, z_deg: i64) -> Option<i64> {
        self.entries
            .keys()
            .map(|&(i, z)| g.basis[i].degree + z * z_deg)
            .max()
    }

    /// Drops all components of grade above the bound.
    pub fn truncate_grades_above(
        &self,
        g: &LieSuperAlgebra,
        z_deg: i64,
        bound: i64,
    ) -> LoopElem {
        let mut out = LoopElem::zero();
        for (&(i, z), p) in &self.entries {
            if g.basis[i].degree + z * z_deg <= bound {
                out.add_entry(i, z, p.clone());
            }
        }
        out
    }

    pub fn check_window(&self, w: ZWindow) -> Result<()> {
        for &(_, z) in self.entries.keys() {
            if !w.contains(z) {
                return Err(Error::WindowOverflow {
                    power: z,
                    min: w.min,
                    max: w.max,
                });
            }
        }
        Ok(())
    }

    pub fn display(&self, g: &LieSuperAlgebra, vars: &VarSet) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (&(i, z), p) in &self.entries {
            let zpart = match z {
                0 => String::new(),
                1 => "*z".into(),
                _ => format!("*z^{z}"),
            };
            parts.push(format!(
                "{}{} (x) ({})",
                g.basis[i].name,
                zpart,
                p.display(vars)
            ));
        }
        parts.join(" + ")
    }
}

impl std::ops::Add for &LoopElem {
    type Output = LoopElem;
    fn add(self, rhs: &LoopElem) -> LoopElem {
        let mut out = self.clone();
        for (&(i, z), p) in &rhs.entries {
            out.add_entry(i, z, p.clone());
        }
        out
    }
}

impl std::ops::Sub for &LoopElem {
    type Output = LoopElem;
    fn sub(self, rhs: &LoopElem) -> LoopElem {
        let mut out = self.clone();
        for (&(i, z), p) in &rhs.entries {
            out.add_entry(i, z, -p);
        }
        out
    }
}

/// The Lie bracket on the loop algebra tensored with polynomials:
/// `[a z^m (x) u, b z^n (x) v] = (-1)^{p(b) p(u)} [a,b] z^{m+n} (x) u v`.
pub fn loop_bracket(
    g: &LieSuperAlgebra,
    x: &LoopElem,
    y: &LoopElem,
    window: Option<ZWindow>,
) -> Result<LoopElem> {
    let mut out = LoopElem::zero();
    for (i, zi, u) in x.entries() {
        let (ue, uo) = u.parity_parts();
        for (j, zj, v) in y.entries() {
            let br = g.bracket_basis(i, j);
            if gvec_is_zero(&br) {
                continue;
            }
            let z = zi + zj;
            if let Some(w) = window {
                if !w.contains(z) {
                    return Err(Error::WindowOverflow {
                        power: z,
                        min: w.min,
                        max: w.max,
                    });
                }
            }
            let mut uv = SPoly::zero();
            if !ue.is_zero() {
                uv = &uv + &ue.multiply(v);
            }
            if !uo.is_zero() {
                let t = uo.multiply(v);
                uv = if g.basis[j].parity.is_odd() {
                    &uv - &t
                } else {
                    &uv + &t
                };
            }
            if uv.is_zero() {
                continue;
            }
            for (k, c) in br.iter().enumerate() {
                if !c.is_zero() {
                    out.add_entry(k, z, uv.scale(c));
                }
            }
        }
    }
    Ok(out)
}

/// The polynomial-valued pairing:
/// `(a z^m (x) u | b z^n (x) v) = (-1)^{p(b) p(u)} delta_{m+n,0} (a|b) u v`.
pub fn loop_pair(g: &LieSuperAlgebra, x: &LoopElem, y: &LoopElem) -> SPoly {
    let mut out = SPoly::zero();
    for (i, zi, u) in x.entries() {
        let (ue, uo) = u.parity_parts();
        for (j, zj, v) in y.entries() {
            if zi + zj != 0 {
                continue;
            }
            let c = &g.form[(i, j)];
            if c.is_zero() {
                continue;
            }
            let mut uv = SPoly::zero();
            if !ue.is_zero() {
                uv = &uv + &ue.multiply(v);
            }
            if !uo.is_zero() {
                let t = uo.multiply(v);
                uv = if g.basis[j].parity.is_odd() {
                    &uv - &t
                } else {
                    &uv + &t
                };
            }
            out = &out + &uv.scale(c);
        }
    }
    out
}

/// The square of the odd cyclic element: half the self-bracket of
/// `f + z s`.
pub fn lambda_squared(rd: &ReductionData) -> LoopElem {
    let g = &rd.algebra;
    let ff = g.bracket(&rd.f, &rd.f);
    let fs = g.bracket(&rd.f, &rd.s);
    let ss = g.bracket(&rd.s, &rd.s);
    let mut out = LoopElem::zero();
    for (i, c) in ff.iter().enumerate() {
        if !c.is_zero() {
            out.add_entry(i, 0, SPoly::constant(c.clone() / crate::rat(2)));
        }
    }
    for (i, c) in fs.iter().enumerate() {
        if !c.is_zero() {
            out.add_entry(i, 1, SPoly::constant(c.clone()));
        }
    }
    for (i, c) in ss.iter().enumerate() {
        if !c.is_zero() {
            out.add_entry(i, 2, SPoly::constant(c.clone() / crate::rat(2)));
        }
    }
    out
}

/// Kernel/image splitting of the adjoint action of the squared cyclic
/// element, with the exact inverse on the image and the center of the
/// kernel.
#[derive(Debug, Clone)]
pub struct LoopDecomposition {
    /// the single z power carried by the squared element
    pub z_shift: i64,
    /// algebra-level coefficient vector of the squared element
    pub core: GVector,
    pub kernel_basis: Vec<GVector>,
    pub image_basis: Vec<GVector>,
    pub center_basis: Vec<GVector>,
    /// coordinates of each basis direction in the combined kernel+image
    /// basis
    split_coords: Vec<Vec<Rat>>,
    /// image-coordinates of the preimage of each basis direction
    invert_coords: Vec<Option<Vec<Rat>>>,
}

/// Splits the algebra under the adjoint action of the squared cyclic
/// element.  The squared element must live in a single z power (true for
/// all built-in families); the decomposition is then z-independent and
/// valid in every window.
pub fn decompose(rd: &ReductionData) -> Result<LoopDecomposition> {
    let g = &rd.algebra;
    let dim = g.dim();
    let lam2 = lambda_squared(rd);
    let zs: Vec<i64> = lam2.z_powers().into_iter().collect();
    if zs.len() > 1 {
        return Err(Error::MixedZPowers(format!(
            "squared cyclic element spreads over z powers {zs:?}"
        )));
    }
    let z_shift = zs.first().copied().unwrap_or(0);
    let mut core = gvec_zero(dim);
    for (i, z, p) in lam2.entries() {
        debug_assert_eq!(z, z_shift);
        core[i] = p.constant_term();
    }
    // matrix of the adjoint action of the core on the algebra
    let mut ad = QMatrix::zeros(dim, dim);
    for j in 0..dim {
        let col = g.bracket(&core, &g.basis_vector(j));
        for i in 0..dim {
            ad[(i, j)] = col[i].clone();
        }
    }
    let kernel_basis = ad.kernel_basis();
    // image basis: independent columns of the adjoint matrix
    let mut image_basis: Vec<GVector> = Vec::new();
    {
        let mut span: Vec<GVector> = Vec::new();
        for j in 0..dim {
            let col = ad.column(j);
            if gvec_is_zero(&col) {
                continue;
            }
            if crate::linalg::coordinates_in_span(&span, &col).is_none() {
                span.push(col.clone());
                image_basis.push(col);
            }
        }
    }
    // semisimplicity certificate: kernel (+) image = everything
    if kernel_basis.len() + image_basis.len() != dim {
        return Err(Error::NotSemisimple(format!(
            "kernel dimension {} + image dimension {} != {}",
            kernel_basis.len(),
            image_basis.len(),
            dim
        )));
    }
    let mut combined = QMatrix::zeros(dim, dim);
    for (col, v) in kernel_basis.iter().chain(image_basis.iter()).enumerate() {
        for i in 0..dim {
            combined[(i, col)] = v[i].clone();
        }
    }
    let splitter = LinearSolver::new(&combined);
    if splitter.rank() != dim {
        return Err(Error::NotSemisimple(
            "kernel and image intersect nontrivially".into(),
        ));
    }
    // matrix of the adjoint action restricted to the image
    let mut restricted = QMatrix::zeros(dim, image_basis.len());
    for (col, v) in image_basis.iter().enumerate() {
        let img = g.bracket(&core, v);
        for i in 0..dim {
            restricted[(i, col)] = img[i].clone();
        }
    }
    let inverter = LinearSolver::new(&restricted);
    let mut split_coords = Vec::with_capacity(dim);
    let mut invert_coords = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut rhs = gvec_zero(dim);
        rhs[i] = Rat::one();
        split_coords.push(splitter.solve(&rhs).expect("full-rank splitter"));
        invert_coords.push(inverter.solve(&rhs));
    }
    // center of the kernel
    let mut center_basis = Vec::new();
    {
        let k = kernel_basis.len();
        if k > 0 {
            let mut rows: Vec<Vec<Rat>> = Vec::new();
            for w in &kernel_basis {
                // rows of the system [x, w] = 0 for x = sum c_a kernel_a
                for i in 0..dim {
                    let mut row = Vec::with_capacity(k);
                    for v in &kernel_basis {
                        row.push(g.bracket(v, w)[i].clone());
                    }
                    rows.push(row);
                }
            }
            let m = QMatrix::from_rows(rows);
            for coeffs in m.kernel_basis() {
                let mut x = gvec_zero(dim);
                for (a, c) in coeffs.iter().enumerate() {
                    crate::liesuper::gvec_add_scaled(&mut x, &kernel_basis[a], c);
                }
                center_basis.push(x);
            }
        }
    }
    Ok(LoopDecomposition {
        z_shift,
        core,
        kernel_basis,
        image_basis,
        center_basis,
        split_coords,
        invert_coords,
    })
}

impl LoopDecomposition {
    /// Splits a loop element into its kernel and image parts.
    pub fn split(&self, g: &LieSuperAlgebra, x: &LoopElem) -> (LoopElem, LoopElem) {
        let dim = g.dim();
        let kdim = self.kernel_basis.len();
        let mut kernel = LoopElem::zero();
        let mut image = LoopElem::zero();
        for (i, z, p) in x.entries() {
            let c = &self.split_coords[i];
            for (a, coeff) in c.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let target = if a < kdim {
                    &self.kernel_basis[a]
                } else {
                    &self.image_basis[a - kdim]
                };
                let scaled = p.scale(coeff);
                for (t, tc) in target.iter().enumerate() {
                    if !tc.is_zero() {
                        if a < kdim {
                            kernel.add_entry(t, z, scaled.scale(tc));
                        } else {
                            image.add_entry(t, z, scaled.scale(tc));
                        }
                    }
                }
            }
        }
        (kernel, image)
    }

    /// Solves `[squared element, result] = rhs` with the result in the
    /// image part; rejects right-hand sides with a kernel component.
    pub fn invert_ad_lambda_sq(
        &self,
        g: &LieSuperAlgebra,
        rhs: &LoopElem,
        vars: &VarSet,
    ) -> Result<LoopElem> {
        let (kernel_part, image_part) = self.split(g, rhs);
        if !kernel_part.is_zero() {
            return Err(Error::NotInImage(kernel_part.display(g, vars)));
        }
        let dim = g.dim();
        let mut out = LoopElem::zero();
        for (i, z, p) in image_part.entries() {
            let c = self.invert_coords[i]
                .as_ref()
                .ok_or_else(|| Error::NotInImage(format!("direction {i}")))?;
            for (a, coeff) in c.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let target = &self.image_basis[a];
                let scaled = p.scale(coeff);
                for (t, tc) in target.iter().enumerate() {
                    if !tc.is_zero() {
                        out.add_entry(t, z - self.z_shift, scaled.scale(tc));
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liesuper::osp22;
    use crate::rat;
    use crate::superpoly::Parity;

    #[test]
    fn bracket_of_constant_sections() {
        let (g, _) = osp22().unwrap();
        let f2 = g.index_of("f2").unwrap();
        let e2 = g.index_of("e2").unwrap();
        let h2 = g.index_of("h2").unwrap();
        // [f2 (x) 1, z e2 (x) 1] = z [f2, e2] = z h2
        let x = LoopElem::basis(f2, 0);
        let y = LoopElem::basis(e2, 1);
        let br = loop_bracket(&g, &x, &y, None).unwrap();
        let mut expect = LoopElem::zero();
        expect.add_entry(h2, 1, SPoly::one());
        assert_eq!(br, expect);
        let zero = loop_bracket(&g, &x, &LoopElem::zero(), None).unwrap();
        assert!(zero.is_zero());
        // window overflow reported
        let w = ZWindow::new(0, 0);
        assert!(matches!(
            loop_bracket(&g, &x, &y, Some(w)),
            Err(Error::WindowOverflow { .. })
        ));
    }

    #[test]
    fn lambda_squared_is_z_h2() {
        let (g, rd) = osp22().unwrap();
        let lam2 = lambda_squared(&rd);
        let h2 = g.index_of("h2").unwrap();
        let mut expect = LoopElem::zero();
        expect.add_entry(h2, 1, SPoly::one());
        assert_eq!(lam2, expect);
        // consistency: half the self-bracket of f + z s
        let mut lam = LoopElem::zero();
        lam = &lam + &LoopElem::from_vector(&rd.f, 0, &SPoly::one());
        lam = &lam + &LoopElem::from_vector(&rd.s, 1, &SPoly::one());
        let half = loop_bracket(&g, &lam, &lam, None)
            .unwrap()
            .scale(&crate::ratio(1, 2));
        assert_eq!(half, lam2);
    }

    #[test]
    fn decomposition_matches_expected_spans() {
        let (g, rd) = osp22().unwrap();
        let dec = decompose(&rd).unwrap();
        assert_eq!(dec.z_shift, 1);
        assert_eq!(dec.kernel_basis.len(), 4);
        assert_eq!(dec.image_basis.len(), 4);
        for name in ["f2", "h1", "h2", "e2"] {
            let v = g.basis_vector(g.index_of(name).unwrap());
            assert!(
                crate::linalg::coordinates_in_span(&dec.kernel_basis, &v).is_some(),
                "{name} not in kernel"
            );
        }
        for name in ["f3", "f1", "e1", "e3"] {
            let v = g.basis_vector(g.index_of(name).unwrap());
            assert!(
                crate::linalg::coordinates_in_span(&dec.image_basis, &v).is_some(),
                "{name} not in image"
            );
        }
        // center is the span of h2
        assert_eq!(dec.center_basis.len(), 1);
        let h2 = g.basis_vector(g.index_of("h2").unwrap());
        assert!(crate::linalg::coordinates_in_span(&dec.center_basis, &h2).is_some());
        for c in &dec.center_basis {
            for k in &dec.kernel_basis {
                assert!(gvec_is_zero(&g.bracket(c, k)));
            }
        }
    }

    #[test]
    fn split_and_recompose() {
        let (g, rd) = osp22().unwrap();
        let vars = g.bar_varset();
        let dec = decompose(&rd).unwrap();
        let mut x = LoopElem::zero();
        for i in 0..g.dim() {
            x.add_entry(i, -(i as i64 % 3), SPoly::var(vars.var(i as u32)));
        }
        let (k, im) = dec.split(&g, &x);
        assert_eq!(&(&k + &im), &x);
        // the kernel part commutes with the squared element
        let lam2 = lambda_squared(&rd);
        let br = loop_bracket(&g, &lam2, &k, None).unwrap();
        assert!(br.is_zero());
    }

    #[test]
    fn inversion_is_two_sided_on_the_image() {
        let (g, rd) = osp22().unwrap();
        let vars = g.bar_varset();
        let dec = decompose(&rd).unwrap();
        let e1 = g.index_of("e1").unwrap();
        // the adjoint action sends e1 (x) u to 2z e1 (x) u, so inversion
        // drops one z power and halves
        let mut rhs = LoopElem::zero();
        rhs.add_entry(e1, 0, SPoly::var(vars.var(0)));
        let x = dec.invert_ad_lambda_sq(&g, &rhs, &vars).unwrap();
        let mut expect = LoopElem::zero();
        expect.add_entry(e1, -1, SPoly::var(vars.var(0)).scale(&crate::ratio(1, 2)));
        assert_eq!(x, expect);
        // two-sided inverse on the image
        let lam2 = lambda_squared(&rd);
        let back = loop_bracket(&g, &lam2, &x, None).unwrap();
        assert_eq!(back, rhs);
        let y = {
            let mut y = LoopElem::zero();
            y.add_entry(g.index_of("f1").unwrap(), 2, SPoly::var(vars.var(3)));
            y
        };
        let fwd = loop_bracket(&g, &lam2, &y, None).unwrap();
        let inv = dec.invert_ad_lambda_sq(&g, &fwd, &vars).unwrap();
        assert_eq!(inv, y);
        // zero inverts to zero
        assert!(dec
            .invert_ad_lambda_sq(&g, &LoopElem::zero(), &vars)
            .unwrap()
            .is_zero());
        // kernel directions are rejected with the residue reported
        let mut bad = LoopElem::zero();
        bad.add_entry(g.index_of("h1").unwrap(), 0, SPoly::one());
        let err = dec.invert_ad_lambda_sq(&g, &bad, &vars);
        assert!(matches!(err, Err(Error::NotInImage(_))));
    }

    #[test]
    fn central_squared_element_has_zero_image() {
        // a 2-dimensional purely odd abelian algebra: the squared element
        // vanishes, the kernel is everything
        let mut g = LieSuperAlgebra::new(vec![
            crate::liesuper::BasisElem {
                name: "p".into(),
                parity: Parity::Odd,
                degree: 1,
            },
            crate::liesuper::BasisElem {
                name: "q".into(),
                parity: Parity::Odd,
                degree: -1,
            },
        ]);
        g.set_form(0, 1, rat(1));
        assert!(g.validate().is_pass());
        let f = g.basis_vector(1);
        let s = g.basis_vector(0);
        let rd =
            crate::liesuper::ReductionData::new(g, vec![], vec![], f, s, Some(vec![])).unwrap();
        let dec = decompose(&rd).unwrap();
        assert_eq!(dec.kernel_basis.len(), 2);
        assert!(dec.image_basis.is_empty());
    }

    #[test]
    fn graded_components_and_degree_additivity() {
        let (g, rd) = osp22().unwrap();
        let zdeg = rd.z_degree();
        let e2 = g.index_of("e2").unwrap();
        let f2 = g.index_of("f2").unwrap();
        // e2 z^{-1} has grade 1 + 2 = 3; f2 z^1 has grade -1 - 2 = -3
        let x = LoopElem::basis(e2, -1);
        let y = LoopElem::basis(f2, 1);
        assert_eq!(x.min_grade(&g, zdeg), Some(3));
        assert_eq!(y.max_grade(&g, zdeg), Some(-3));
        let br = loop_bracket(&g, &x, &y, None).unwrap();
        if !br.is_zero() {
            assert_eq!(br.min_grade(&g, zdeg), Some(0));
            assert_eq!(br.max_grade(&g, zdeg), Some(0));
        }
    }
}
