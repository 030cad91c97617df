//! The dressing recursion and the integrable hierarchy: conjugating the
//! spectral Lax operator into the kernel of the squared cyclic element,
//! extracting conserved densities by pairing against the center, building
//! the commuting Lax elements, and deriving the evolution equations through
//! both bracket structures.

use crate::chibracket::{hamiltonian_flow, master_bracket, BracketSpec, CheckReport};
use crate::dsred::{LaxOperator, ReductionWorld};
use crate::error::{Error, Result};
use crate::liesuper::{gvec_zero, GVector};
use crate::linalg::LinearSolver;
use crate::loopalg::{
    decompose, lambda_squared, loop_bracket, loop_pair, LoopDecomposition, LoopElem, ZWindow,
};
use crate::superpoly::{Functional, SPoly, Variable};
use crate::Rat;
use num::{One, Zero};

/// Exponential adjoint action truncated by grade.
fn exp_ad(
    world: &ReductionWorld,
    t: &LoopElem,
    y: &LoopElem,
    grade_bound: i64,
    window: ZWindow,
) -> Result<LoopElem> {
    let g = &world.rd.algebra;
    let zdeg = world.rd.z_degree();
    let mut result = y.truncate_grades_above(g, zdeg, grade_bound);
    let mut term = result.clone();
    let mut k: i64 = 1;
    while !term.is_zero() {
        term = loop_bracket(g, t, &term, None)?
            .scale(&crate::ratio(1, k))
            .truncate_grades_above(g, zdeg, grade_bound);
        result = &result + &term;
        k += 1;
        assert!(k < 256, "exponential did not terminate");
    }
    result.check_window(window)?;
    Ok(result)
}

/// `e^{ad T}(D + Y) - D` or `e^{ad T}(D^2 + Y) - D^2`: the adjoint action on
/// the loop part plus the chain coming from the bracket with the derivation
/// (`extra` is `[T, D]` or `[T, D^2]`).
fn exp_ad_with_derivation(
    world: &ReductionWorld,
    t: &LoopElem,
    y: &LoopElem,
    extra: &LoopElem,
    grade_bound: i64,
    window: ZWindow,
) -> Result<LoopElem> {
    let g = &world.rd.algebra;
    let zdeg = world.rd.z_degree();
    let mut yterm = y.truncate_grades_above(g, zdeg, grade_bound);
    let mut dterm = extra.truncate_grades_above(g, zdeg, grade_bound);
    let mut result = &yterm + &dterm;
    let mut k: i64 = 1;
    while !(yterm.is_zero() && dterm.is_zero()) {
        // yterm_k = (ad t)^k y / k!, dterm_k = (ad t)^k extra / (k+1)!
        yterm = loop_bracket(g, t, &yterm, None)?
            .scale(&crate::ratio(1, k))
            .truncate_grades_above(g, zdeg, grade_bound);
        dterm = loop_bracket(g, t, &dterm, None)?
            .scale(&crate::ratio(1, k + 1))
            .truncate_grades_above(g, zdeg, grade_bound);
        result = &result + &yterm;
        result = &result + &dterm;
        k += 1;
        assert!(k < 256, "exponential did not terminate");
    }
    result.check_window(window)?;
    Ok(result)
}

/// The spectral element `f + z s` as a loop element.
pub fn lambda_loop(world: &ReductionWorld) -> LoopElem {
    let rd = &world.rd;
    &LoopElem::from_vector(&rd.f, 0, &SPoly::one())
        + &LoopElem::from_vector(&rd.s, 1, &SPoly::one())
}

/// The curvature part of the squared spectral operator:
/// `half [L_s, L_s] = D^2 + U + Lambda^2 (x) 1` with
/// `U = [D, Q] + half [Q, Q] + [Q, Lambda (x) 1]`.
pub fn lax_curvature(world: &ReductionWorld, lax: &LaxOperator, window: ZWindow) -> Result<LoopElem> {
    let g = &world.rd.algebra;
    let q = &lax.q;
    let lam = lambda_loop(world);
    let mut u = q.d_bracket(g);
    u = &u + &loop_bracket(g, q, q, Some(window))?.scale(&crate::ratio(1, 2));
    u = &u + &loop_bracket(g, q, &lam, Some(window))?;
    Ok(u)
}

/// Output of the dressing recursion.
#[derive(Debug, Clone)]
pub struct DressingResult {
    /// image-valued conjugator, grades 1..=cutoff
    pub t_elem: LoopElem,
    /// kernel-valued curvature remainder
    pub h_elem: LoopElem,
    /// kernel-valued first-order remainder
    pub k_elem: LoopElem,
    pub cutoff: i64,
    /// grades up to which `k_elem` is exact
    pub k_valid: i64,
    /// grades up to which `h_elem` is exact
    pub h_valid: i64,
}

/// Grade-ascending dressing: solves for the conjugator making the squared
/// operator kernel-valued, then reads off the first-order remainder and
/// certifies it lies in the kernel.
pub fn dressing(
    world: &ReductionWorld,
    dec: &LoopDecomposition,
    lax: &LaxOperator,
    cutoff: i64,
    window: ZWindow,
) -> Result<DressingResult> {
    assert!(lax.include_s, "dressing acts on the spectral operator");
    let g = &world.rd.algebra;
    let zdeg = world.rd.z_degree();
    let two_i = 2 * world.rd.deg_i;
    let u = lax_curvature(world, lax, window)?;
    let lam2 = lambda_squared(&world.rd);
    let base = &u + &lam2;
    let grade_bound = cutoff - two_i;

    let mut t_elem = LoopElem::zero();
    for k in 1..=cutoff {
        let _t0 = std::time::Instant::now();
        let extra = t_elem.second_derivative().scale(&-Rat::one());
        let conj = exp_ad_with_derivation(world, &t_elem, &base, &extra, k - two_i, window)?;
        eprintln!("grade {k}: conj in {:?}", _t0.elapsed());
        let slot = conj.graded_component(g, zdeg, k - two_i);
        // remove the constant curvature itself at its own grade
        let slot = if k - two_i == lam2.min_grade(g, zdeg).unwrap_or(i64::MAX) {
            &slot - &lam2
        } else {
            slot
        };
        let (_, image_part) = dec.split(g, &slot);
        if image_part.is_zero() {
            continue;
        }
        let tk = dec.invert_ad_lambda_sq(g, &image_part, &world.vars)?;
        tk.check_window(window)?;
        t_elem = &t_elem + &tk;
    }
    // the kernel-valued curvature remainder, certified
    let extra = t_elem.second_derivative().scale(&-Rat::one());
    let conj = exp_ad_with_derivation(world, &t_elem, &base, &extra, grade_bound, window)?;
    let h_elem = &conj - &lam2;
    let h_valid = grade_bound;
    let (_, h_image) = dec.split(g, &h_elem);
    if !h_image.is_zero() {
        let bad = h_image.min_grade(g, zdeg).unwrap_or(0);
        return Err(Error::KernelEscape(bad));
    }
    // first-order remainder K from the spectral operator itself
    let lam = lambda_loop(world);
    let y = &lax.q + &lam;
    let k_bound = cutoff - world.rd.deg_i;
    let extra = t_elem.d_bracket(g).scale(&-Rat::one());
    let conj = exp_ad_with_derivation(world, &t_elem, &y, &extra, k_bound, window)?;
    let k_elem = &conj - &lam;
    let (_, k_image) = dec.split(g, &k_elem);
    if !k_image.is_zero() {
        let bad = k_image.min_grade(g, zdeg).unwrap_or(0);
        return Err(Error::KernelEscape(bad));
    }
    Ok(DressingResult {
        t_elem,
        h_elem,
        k_elem,
        cutoff,
        k_valid: k_bound,
        h_valid,
    })
}

/// Verifies `H = [D, K] + half [K, K] + [Lambda (x) 1, K]` on the grades
/// where both sides are exact.
pub fn check_remainder_identity(
    world: &ReductionWorld,
    dr: &DressingResult,
    window: ZWindow,
) -> Result<CheckReport> {
    let g = &world.rd.algebra;
    let zdeg = world.rd.z_degree();
    let mut report = CheckReport {
        name: "remainder-identity".into(),
        ..Default::default()
    };
    let k = &dr.k_elem;
    let lam = lambda_loop(world);
    let mut rhs = k.d_bracket(g);
    rhs = &rhs + &loop_bracket(g, k, k, Some(window))?.scale(&crate::ratio(1, 2));
    rhs = &rhs + &loop_bracket(g, &lam, k, Some(window))?;
    let bound = dr.h_valid.min(dr.k_valid - world.rd.deg_i);
    let diff = &dr.h_elem.truncate_grades_above(g, zdeg, bound)
        - &rhs.truncate_grades_above(g, zdeg, bound);
    report.cases += 1;
    if !diff.is_zero() {
        report.failures.push(format!(
            "identity fails: {}",
            diff.display(g, &world.vars)
        ));
    }
    Ok(report)
}

/// Validates that the vector lies in the computed center.
pub fn center_element(dec: &LoopDecomposition, c: &GVector) -> Result<()> {
    if crate::linalg::coordinates_in_span(&dec.center_basis, c).is_none() {
        return Err(Error::NotInCenter);
    }
    Ok(())
}

/// The conserved density `(K | C (x) z^n)`.
pub fn hamiltonian_h(
    world: &ReductionWorld,
    dec: &LoopDecomposition,
    dr: &DressingResult,
    c: &GVector,
    n: i64,
) -> Result<SPoly> {
    center_element(dec, c)?;
    let g = &world.rd.algebra;
    // required grade of the K components entering the pairing
    let needed = g
        .basis
        .iter()
        .enumerate()
        .filter(|(i, _)| !g.pair(&g.basis_vector(*i), c).is_zero())
        .map(|(_, b)| b.degree + n * (world.rd.deg_i + world.rd.deg_j))
        .max();
    if let Some(need) = needed {
        if need > dr.k_valid {
            return Err(Error::WindowOverflow {
                power: -n,
                min: -(dr.k_valid),
                max: dr.k_valid,
            });
        }
    }
    let probe = LoopElem::from_vector(c, n, &SPoly::one());
    Ok(loop_pair(g, &dr.k_elem, &probe))
}

/// The linear-plus-quadratic part of the conserved density, from the
/// canonical dressing data: `(Q_K | C z^n) + half (Q_I | [C z^n, T_l])`.
pub fn quadratic_part(
    world: &ReductionWorld,
    dec: &LoopDecomposition,
    dr_canonical: &DressingResult,
    q_canonical: &LoopElem,
    c: &GVector,
    n: i64,
    window: ZWindow,
) -> Result<Functional> {
    center_element(dec, c)?;
    let g = &world.rd.algebra;
    let (qk, qi) = dec.split(g, q_canonical);
    let probe = LoopElem::from_vector(c, n, &SPoly::one());
    let linear = loop_pair(g, &qk, &probe);
    // linear (degree-one) part of the conjugator
    let t_l = {
        let mut out = LoopElem::zero();
        for (i, z, p) in dr_canonical.t_elem.entries() {
            let lin: SPoly = p
                .terms()
                .filter(|m| m.factors.iter().map(|(_, mult)| mult).sum::<u32>() == 1)
                .fold(SPoly::zero(), |acc, m| {
                    &acc + &SPoly::monomial(m.coeff, m.factors)
                });
            out.add_entry(i, z, lin);
        }
        out
    };
    let br = loop_bracket(g, &probe, &t_l, Some(window))?;
    let quad = loop_pair(g, &qi, &br).scale(&crate::ratio(1, 2));
    Ok(Functional::new(&(&linear + &quad)))
}

/// The commuting Lax element `e^{-ad T}(C (x) z^n)` with its spectral
/// splitting.
#[derive(Debug, Clone)]
pub struct HierarchyElement {
    pub m_full: LoopElem,
    pub m_plus: LoopElem,
    pub m_minus: LoopElem,
    pub valid_to_grade: i64,
}

pub fn lax_pair_m(
    world: &ReductionWorld,
    dr: &DressingResult,
    c: &GVector,
    n: i64,
    window: ZWindow,
) -> Result<HierarchyElement> {
    let g = &world.rd.algebra;
    let zdeg = world.rd.z_degree();
    let base = LoopElem::from_vector(c, n, &SPoly::one());
    let base_grade = base.min_grade(g, zdeg).unwrap_or(0);
    let bound = base_grade + dr.cutoff;
    let m_full = exp_ad(
        world,
        &dr.t_elem.scale(&-Rat::one()),
        &base,
        bound,
        window,
    )?;
    let mut m_plus = LoopElem::zero();
    let mut m_minus = LoopElem::zero();
    for (i, z, p) in m_full.entries() {
        if z >= 0 {
            m_plus.add_entry(i, z, p.clone());
        } else {
            m_minus.add_entry(i, z, p.clone());
        }
    }
    Ok(HierarchyElement {
        m_full,
        m_plus,
        m_minus,
        valid_to_grade: bound,
    })
}

/// `[x, L_s]` including the derivation part of the operator.
pub fn bracket_with_lax(
    world: &ReductionWorld,
    x: &LoopElem,
    x_parity: crate::superpoly::Parity,
    lax: &LaxOperator,
    window: ZWindow,
) -> Result<LoopElem> {
    let g = &world.rd.algebra;
    // [x, D] = -(-1)^{p(x)} [D, x]
    let mut out = x.d_bracket(g);
    if !x_parity.is_odd() {
        out = out.scale(&-Rat::one());
    }
    let body = lax.loop_part(&world.rd);
    out = &out + &loop_bracket(g, x, &body, Some(window))?;
    Ok(out)
}

/// Checks `[M_C, L_s] = 0` on every component within the valid grades.
pub fn check_lax_commutation(
    world: &ReductionWorld,
    m: &HierarchyElement,
    lax: &LaxOperator,
    window: ZWindow,
) -> Result<CheckReport> {
    let g = &world.rd.algebra;
    let zdeg = world.rd.z_degree();
    let mut report = CheckReport {
        name: "lax-commutation".into(),
        ..Default::default()
    };
    let comm = bracket_with_lax(world, &m.m_full, crate::superpoly::Parity::Even, lax, window)?;
    let bound = m.valid_to_grade - world.rd.deg_i;
    let trimmed = comm.truncate_grades_above(g, zdeg, bound);
    report.cases += 1;
    if !trimmed.is_zero() {
        report.failures.push(format!(
            "commutator residual {}",
            trimmed.display(g, &world.vars)
        ));
    }
    Ok(report)
}

/// Coordinates of a loop element along the dual pairs at z power zero;
/// errors if components fall outside the span of the orthogonal complement
/// when `strict` is set.
fn dual_coordinates(world: &ReductionWorld, x: &LoopElem, z: i64) -> Result<Vec<SPoly>> {
    let g = &world.rd.algebra;
    let dim = g.dim();
    let mut matrix = crate::linalg::QMatrix::zeros(dim, dim);
    for (col, qt) in world.rd.q_upper.iter().enumerate() {
        for row in 0..dim {
            matrix[(row, col)] = qt[row].clone();
        }
    }
    let solver = LinearSolver::new(&matrix);
    let mut coords = vec![SPoly::zero(); dim];
    for (i, zz, p) in x.entries() {
        if zz != z {
            continue;
        }
        let mut rhs = gvec_zero(dim);
        rhs[i] = Rat::one();
        let c = solver
            .solve(&rhs)
            .ok_or_else(|| Error::SolveFailure("dual basis is not a basis".into()))?;
        for (t, coeff) in c.iter().enumerate() {
            if !coeff.is_zero() {
                coords[t] = &coords[t] + &p.scale(coeff);
            }
        }
    }
    Ok(coords)
}

/// The flow of a coordinate generator under the second affine structure.
pub fn evolution(world: &ReductionWorld, h: &SPoly, t_var: Variable) -> Result<SPoly> {
    hamiltonian_flow(&world.affine2, h, &SPoly::var(t_var))
}

/// The same flow extracted from the Lax form `-[M^+, L_s]`: the derivation
/// acts on a coordinate with the sign carried by its dual pair.
pub fn flow_via_lax(
    world: &ReductionWorld,
    dr_universal: &DressingResult,
    c: &GVector,
    n: i64,
    lax: &LaxOperator,
    window: ZWindow,
) -> Result<Vec<SPoly>> {
    let g = &world.rd.algebra;
    let m = lax_pair_m(world, dr_universal, c, n - 1, window)?;
    let b = bracket_with_lax(
        world,
        &m.m_plus,
        crate::superpoly::Parity::Even,
        lax,
        window,
    )?
    .scale(&-Rat::one());
    // the bracket must be z-constant on the coordinate directions
    let coords = dual_coordinates(world, &b, 0)?;
    let c_parity = g.vector_parity(c).unwrap_or(crate::superpoly::Parity::Even);
    let mut flows = Vec::new();
    for t in 0..world.rd.i_count {
        let qt_parity = g
            .vector_parity(&world.rd.q_upper[t])
            .unwrap_or(crate::superpoly::Parity::Even);
        let sign = if qt_parity.is_odd() && c_parity.is_odd() {
            -Rat::one()
        } else {
            Rat::one()
        };
        flows.push(coords[t].scale(&sign));
    }
    // coordinates in the quotient directions must vanish
    for t in world.rd.i_count..g.dim() {
        if !coords[t].is_zero() {
            return Err(Error::SolveFailure(format!(
                "lax flow leaves the operator space in direction {t}"
            )));
        }
    }
    Ok(flows)
}

/// Everything needed to run the hierarchy on a reduction world.
pub struct HierarchyEngine {
    pub dec: LoopDecomposition,
    pub dr_universal: DressingResult,
    pub dr_canonical: DressingResult,
    pub q_canonical: LoopElem,
    pub window: ZWindow,
    pub cutoff: i64,
}

impl HierarchyEngine {
    pub fn new(world: &ReductionWorld, window: ZWindow) -> Result<Self> {
        let rd = &world.rd;
        let dec = decompose(rd)?;
        let period = rd.deg_i + rd.deg_j;
        let max_deg = rd.algebra.basis.iter().map(|b| b.degree).max().unwrap_or(0);
        let cutoff = (-window.min) * period - max_deg;
        let lax_u = crate::dsred::universal_lax(rd, &world.vars, true);
        let dr_universal = dressing(world, &dec, &lax_u, cutoff, window)?;
        let mut q_canonical = LoopElem::zero();
        for (a, v) in rd.v_basis.iter().enumerate() {
            q_canonical = &q_canonical + &LoopElem::from_vector(v, 0, &SPoly::var(world.w_vars[a]));
        }
        let lax_c = LaxOperator::new(q_canonical.clone(), true);
        let dr_canonical = dressing(world, &dec, &lax_c, cutoff, window)?;
        Ok(HierarchyEngine {
            dec,
            dr_universal,
            dr_canonical,
            q_canonical,
            window,
            cutoff,
        })
    }

    /// Conserved density at depth n from the canonical remainder, as a
    /// polynomial in the reduced generators.
    pub fn rho(&self, world: &ReductionWorld, c: &GVector, n: i64) -> Result<SPoly> {
        hamiltonian_h(world, &self.dec, &self.dr_canonical, c, n)
    }

    /// The same class from the universal remainder, in coordinates.
    pub fn rho_universal(&self, world: &ReductionWorld, c: &GVector, n: i64) -> Result<SPoly> {
        hamiltonian_h(world, &self.dec, &self.dr_universal, c, n)
    }
}

/// Reduced evolution: the flow of a generator under the first reduced
/// structure with density `rho_n`, asserted equal to the flow under the
/// second reduced structure with density `rho_{n+1}`.
pub fn reduced_evolution(
    world: &ReductionWorld,
    wspec1: &BracketSpec,
    wspec2: &BracketSpec,
    rho_n: &SPoly,
    rho_next: &SPoly,
    w_var: Variable,
) -> Result<SPoly> {
    let target = SPoly::var(w_var);
    let via_first = master_bracket(wspec1, rho_n, &target)?.coeff(0);
    let via_second = master_bracket(wspec2, rho_next, &target)?.coeff(0);
    if via_first != via_second {
        return Err(Error::LadderMismatch {
            generator: world.vars.name(w_var.index).to_string(),
            lhs: via_first.display(&world.vars).to_string(),
            rhs: via_second.display(&world.vars).to_string(),
        });
    }
    Ok(via_first)
}

/// The full hierarchy verification: pairwise involution of the densities in
/// both reduced structures, supercommuting flows on every generator,
/// conservation of every density along every flow, and linear independence
/// of the quadratic parts.
pub struct HierarchyRun {
    pub rhos: Vec<SPoly>,
    pub flows: Vec<Vec<SPoly>>,
    pub report: CheckReport,
}

pub fn check_hierarchy(
    world: &ReductionWorld,
    engine: &HierarchyEngine,
    wspec1: &BracketSpec,
    wspec2: &BracketSpec,
    c: &GVector,
    depth: i64,
) -> Result<HierarchyRun> {
    let mut report = CheckReport {
        name: "hierarchy".into(),
        ..Default::default()
    };
    let mut rhos = Vec::new();
    for n in 0..=depth {
        rhos.push(engine.rho(world, c, n)?);
    }
    // flows via the bi-Hamiltonian ladder (first structure at depth n must
    // agree with second structure at depth n+1)
    let mut flows = Vec::new();
    for n in 0..=depth {
        let mut row = Vec::new();
        for &wv in &world.w_vars {
            let fl = if (n as usize) + 1 < rhos.len() {
                reduced_evolution(world, wspec1, wspec2, &rhos[n as usize], &rhos[n as usize + 1], wv)?
            } else {
                master_bracket(wspec1, &rhos[n as usize], &SPoly::var(wv))?.coeff(0)
            };
            row.push(fl);
        }
        flows.push(row);
    }
    // (a) pairwise involution in both structures
    for m in 0..=depth as usize {
        for n in 0..=depth as usize {
            for (which, spec) in [(1u8, wspec1), (2, wspec2)] {
                report.cases += 1;
                let br = master_bracket(spec, &rhos[m], &rhos[n])?.coeff(0);
                let f = Functional::new(&br);
                if !f.is_zero() {
                    report.failures.push(format!(
                        "densities {m} and {n} fail involution in structure {which}: {}",
                        f.representative().display(&world.vars).to_string()
                    ));
                }
            }
        }
    }
    // (b) flows supercommute on every generator: the flow derivations are
    // even (their densities are even), so the plain commutator must vanish
    for m in 0..=depth as usize {
        for n in 0..=depth as usize {
            for (k, &wv) in world.w_vars.iter().enumerate() {
                report.cases += 1;
                let xm_of_xn = master_bracket(wspec1, &rhos[m], &flows[n][k])?.coeff(0);
                let xn_of_xm = master_bracket(wspec1, &rhos[n], &flows[m][k])?.coeff(0);
                let resid = &xm_of_xn - &xn_of_xm;
                if !resid.is_zero() {
                    report.failures.push(format!(
                        "flows {m} and {n} do not commute on {}: {}",
                        world.vars.name(wv.index),
                        resid.display(&world.vars).to_string()
                    ));
                }
            }
        }
    }
    // (c) every density is conserved along every flow
    for m in 0..=depth as usize {
        for (n, rho) in rhos.iter().enumerate() {
            report.cases += 1;
            let drho = master_bracket(wspec1, &rhos[m], rho)?.coeff(0);
            if !Functional::new(&drho).is_zero() {
                report.failures.push(format!(
                    "density {n} is not conserved along flow {m}"
                ));
            }
        }
    }
    // (d) linear independence through the quadratic parts
    let mut quads = Vec::new();
    for n in 0..=depth {
        let q = quadratic_part(
            world,
            &engine.dec,
            &engine.dr_canonical,
            &engine.q_canonical,
            c,
            n,
            engine.window,
        )?;
        quads.push(q);
    }
    report.cases += 1;
    if !functionals_independent(&quads) {
        report
            .failures
            .push("quadratic parts are linearly dependent".into());
    }
    Ok(HierarchyRun {
        rhos,
        flows,
        report,
    })
}

/// Rational linear independence of functionals through their canonical
/// representatives.
fn functionals_independent(fs: &[Functional]) -> bool {
    use std::collections::BTreeMap;
    let mut monomials: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for f in fs {
        let mut row: BTreeMap<usize, Rat> = BTreeMap::new();
        for m in f.representative().terms() {
            let key = format!("{:?}", m.factors).into_bytes();
            let next = monomials.len();
            let idx = *monomials.entry(key).or_insert(next);
            row.insert(idx, m.coeff);
        }
        rows.push((0..monomials.len() + 8)
            .map(|i| row.get(&i).cloned().unwrap_or_else(Rat::zero))
            .collect());
    }
    let width = monomials.len().max(1);
    let rows: Vec<Vec<Rat>> = rows
        .into_iter()
        .map(|mut r| {
            r.resize(width, Rat::zero());
            r
        })
        .collect();
    let m = crate::linalg::QMatrix::from_rows(rows);
    m.rank() == fs.len()
}
