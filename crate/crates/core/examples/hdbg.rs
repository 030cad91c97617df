use superw::dsred::*;
use superw::hierarchy::*;
use superw::liesuper::osp22;
use superw::loopalg::ZWindow;
use superw::superpoly::*;

fn main() {
    let (_, rd) = osp22().unwrap();
    let world = ReductionWorld::new(rd).unwrap();
    let window = ZWindow::new(-5, 3);
    let g = world.rd.algebra.clone();

    // curvature of the canonical operator
    let mut qc = superw::loopalg::LoopElem::zero();
    for (a, v) in world.rd.v_basis.iter().enumerate() {
        qc = &qc + &superw::loopalg::LoopElem::from_vector(v, 0, &SPoly::var(world.w_vars[a]));
    }
    let laxc = LaxOperator::new(qc.clone(), true);
    let u = lax_curvature(&world, &laxc, window).unwrap();
    println!("U = {}", u.display(&g, &world.vars));

    let engine = match HierarchyEngine::new(&world, window) { Ok(e) => e, Err(e) => { println!("ENGINE ERROR: {e}"); return; } };
    println!("cutoff = {}", engine.cutoff);

    // T linear part, e1 row at z^-1..z^-3
    let e1 = g.index_of("e1").unwrap();
    for k in 1..=3i64 {
        let p = engine.dr_canonical.t_elem.entry(e1, -k);
        let lin: SPoly = p.terms().filter(|m| m.factors.iter().map(|(_, mm)| mm).sum::<u32>() == 1)
            .fold(SPoly::zero(), |acc, m| &acc + &SPoly::monomial(m.coeff, m.factors));
        println!("T[e1, z^-{k}] linear = {}", lin.display(&world.vars));
    }

    // densities
    let h2vec = g.basis_vector(g.index_of("h2").unwrap());
    for n in 0..=2i64 {
        match engine.rho(&world, &h2vec, n) {
            Ok(r) => println!("rho_{n} = {}", r.display(&world.vars)),
            Err(e) => println!("rho_{n} ERROR {e}"),
        }
    }
}
