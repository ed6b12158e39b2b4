#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use bvquant::algebra::{parse, q, total_d, DGAlgebra, GeneratorSpec, Monomial, Poly, Signature, VarKind, Q};
use bvquant::connection::{function_monomials, vector_words, RightConnection};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn p(sig: &Arc<Signature>, s: &str) -> Poly {
    parse(sig, s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

/// `R[x, xi]` with `deg xi = -2` and zero differential.
pub fn cotangent_a1() -> DGAlgebra {
    DGAlgebra::free(vec![GeneratorSpec::new("x", 0), GeneratorSpec::new("xi", -2)]).unwrap()
}

/// `R[x, x^-1, xi]` with zero differential.
pub fn cotangent_gm() -> DGAlgebra {
    DGAlgebra::free(vec![GeneratorSpec::invertible("x"), GeneratorSpec::new("xi", -2)]).unwrap()
}

/// A Koszul-type algebra with nonzero differential:
/// `de1 = x`, `de2 = y`, `dxi = y*e1 - x*e2`.
pub fn koszul() -> DGAlgebra {
    let sig = Signature::new(vec![
        GeneratorSpec::new("x", 0),
        GeneratorSpec::new("y", 0),
        GeneratorSpec::new("e1", -1),
        GeneratorSpec::new("e2", -1),
        GeneratorSpec::new("xi", -2),
    ])
    .unwrap();
    let d = BTreeMap::from([
        ("e1".to_string(), p(&sig, "x")),
        ("e2".to_string(), p(&sig, "y")),
        ("xi".to_string(), p(&sig, "y*e1 - x*e2")),
    ]);
    DGAlgebra::with_differential(&sig, d).unwrap()
}

pub fn small_q(r: &mut TestRng) -> Q {
    let n: i64 = r.gen_range(-3..=3);
    let d: i64 = if r.gen_bool(0.2) { 2 } else { 1 };
    Q::new(n.into(), d.into())
}

/// Random monomial using only the listed variable kinds.
pub fn random_mono(sig: &Signature, r: &mut TestRng, kinds: &[VarKind], max_len: usize) -> Monomial {
    let mut m = Monomial::one(sig.nvars());
    let len = r.gen_range(0..=max_len);
    let vars: Vec<usize> = (0..sig.nvars()).filter(|&v| kinds.contains(&sig.kind(v))).collect();
    if vars.is_empty() {
        return m;
    }
    for _ in 0..len {
        let v = vars[r.gen_range(0..vars.len())];
        if sig.invertible(v) && r.gen_bool(0.3) {
            m.0[v] -= 1;
        } else if !sig.odd(v) || m.0[v] == 0 {
            m.0[v] += 1;
        }
    }
    m
}

/// Random polynomial with up to `terms` terms over the given variable kinds.
pub fn random_poly(sig: &Arc<Signature>, r: &mut TestRng, kinds: &[VarKind], terms: usize, max_len: usize) -> Poly {
    let mut out = Poly::zero(sig);
    for _ in 0..r.gen_range(1..=terms) {
        let m = random_mono(sig, r, kinds, max_len);
        out = out + &Poly::monomial(sig, m, small_q(r));
    }
    out
}

/// Random homogeneous piece: keep the terms sharing the degree and parity of the first term.
pub fn homogeneous(p: &Poly) -> Poly {
    let sig = p.sig().clone();
    match p.leading() {
        None => p.clone(),
        Some((m0, _)) => {
            let key = |m: &Monomial| {
                let one = Poly::monomial(&sig, m.clone(), Q::from_integer(1.into()));
                (one.degree(), one.parity(), one.vector_weight(), one.form_weight())
            };
            let k0 = key(m0);
            p.filter(|m| key(m) == k0)
        }
    }
}

pub fn random_homogeneous(sig: &Arc<Signature>, r: &mut TestRng, kinds: &[VarKind], terms: usize, max_len: usize) -> Poly {
    loop {
        let h = homogeneous(&random_poly(sig, r, kinds, terms, max_len));
        if !h.is_zero() {
            return h;
        }
    }
}

pub fn sign(odd: bool) -> Q {
    if odd {
        Q::from_integer((-1).into())
    } else {
        Q::from_integer(1.into())
    }
}

pub const FUN: &[VarKind] = &[VarKind::Gen];
pub const PV: &[VarKind] = &[VarKind::Gen, VarKind::Vector];
pub const FORM: &[VarKind] = &[VarKind::Gen, VarKind::Form];

pub fn two_dim() -> DGAlgebra {
    DGAlgebra::free(vec![
        GeneratorSpec::invertible("x"),
        GeneratorSpec::invertible("y"),
        GeneratorSpec::new("xi", -2),
        GeneratorSpec::new("eta", -2),
    ])
    .unwrap()
}

pub fn with_odd_pair() -> DGAlgebra {
    DGAlgebra::free(vec![
        GeneratorSpec::invertible("x"),
        GeneratorSpec::new("e", -1),
        GeneratorSpec::new("f", -1),
        GeneratorSpec::new("xi", -2),
    ])
    .unwrap()
}

/// A closed form of total degree 1 in positive weight: exact when possible,
/// otherwise `c x^k dx`.
pub fn random_closed(a: &DGAlgebra, r: &mut TestRng) -> Poly {
    for _ in 0..30 {
        let b = random_poly(a.sig(), r, FORM, 4, 3).filter(|m| {
            let o = Poly::monomial(a.sig(), m.clone(), q(1));
            o.form_degree() == Some(0) && o.form_weight().unwrap() >= 1
        });
        let al = total_d(a, &b);
        if !al.is_zero() {
            return al;
        }
    }
    let k: i32 = if a.sig().invertible(0) { r.gen_range(-2..=2) } else { r.gen_range(0..=2) };
    let mut m = Monomial::one(a.sig().nvars());
    m.0[0] = k;
    m.0[a.sig().form_var(0)] = 1;
    Poly::monomial(a.sig(), m, small_q(r))
}

/// A random degree-correct higher table entry, if one exists for the drawn word.
pub fn random_table_entry(a: &DGAlgebra, r: &mut TestRng, k: usize) -> Option<(Monomial, Poly)> {
    let sig = a.sig();
    let words = vector_words(sig, k - 1, 2);
    if words.is_empty() {
        return None;
    }
    let w = words[r.gen_range(0..words.len())].clone();
    let one = Poly::monomial(sig, w.clone(), q(1));
    if one.is_zero() {
        return None;
    }
    let target = one.pol_degree().unwrap() - (k as i32 - 1) + 1;
    let funs: Vec<Monomial> = function_monomials(sig, 2)
        .into_iter()
        .filter(|m| Poly::monomial(sig, m.clone(), q(1)).degree() == Some(target))
        .collect();
    if funs.is_empty() {
        return None;
    }
    let m = funs[r.gen_range(0..funs.len())].clone();
    Some((w, Poly::monomial(sig, m, small_q(r))))
}

pub fn random_higher(a: &DGAlgebra, r: &mut TestRng) -> RightConnection {
    let mut c = RightConnection::coordinate(a);
    for _ in 0..4 {
        let k = r.gen_range(3..=4);
        if let Some((w, v)) = random_table_entry(a, r, k) {
            c.set_table(w, v).unwrap();
        }
    }
    c
}

/// A random strict Poisson bivector of `DR^r`-degree zero, found by rejection.
pub fn random_mc_pi(a: &DGAlgebra, r: &mut TestRng) -> Poly {
    let sig = a.sig().clone();
    let vars: Vec<usize> = (0..sig.ngens()).map(|g| sig.vector_var(g)).collect();
    let funs: Vec<Monomial> = function_monomials(&sig, 2).into_iter().filter(|m| sig_degree(&sig, m) == 0).collect();
    loop {
        let mut pi = Poly::zero(&sig);
        for _ in 0..r.gen_range(1..=3) {
            let mut m = funs[r.gen_range(0..funs.len())].clone();
            let (i, j) = (vars[r.gen_range(0..vars.len())], vars[r.gen_range(0..vars.len())]);
            m.0[i] += 1;
            m.0[j] += 1;
            let t = Poly::monomial(&sig, m, small_q(r));
            if t.pol_degree() == Some(2) {
                pi = pi + &t;
            }
        }
        if !pi.is_zero() && bvquant::polyvector::mc_check(a, &bvquant::polyvector::PoissonStructure::strict(pi.clone())).pass {
            return pi;
        }
    }
}

fn sig_degree(sig: &Arc<Signature>, m: &Monomial) -> i32 {
    bvquant::algebra::mono_pol_degree(sig, m)
}

/// Small random polynomial in the base coordinates of a toy geometry.
fn random_base_poly(sig: &Arc<Signature>, n: usize, r: &mut TestRng) -> Poly {
    let mut out = Poly::zero(sig);
    for _ in 0..r.gen_range(1..=2) {
        let mut m = Monomial::one(sig.nvars());
        for i in 0..n {
            m.0[i] = r.gen_range(0..=1);
        }
        out = out + &Poly::monomial(sig, m, small_q(r));
    }
    out
}

/// A random geometry satisfying the toy-model invariants: `Q` is built from
/// hyperbolic blocks and unit diagonal entries, the connection is
/// `Q^-1 (dQ/2 + B)` with `B` antisymmetric, and `phi` is isotropic up to constants.
/// Non-constant diagonal entries make the trace nonzero.
pub fn random_toy(r: &mut TestRng, n: usize, rank: usize) -> bvquant::toy_models::ToyGeometry {
    use bvquant::algebra::de_rham_d;
    use bvquant::toy_models::{ToyGeometry, ToyGeometrySpec};
    let base: Vec<String> = ["x", "y"][..n].iter().map(|s| s.to_string()).collect();
    let invertible = if r.gen_bool(0.5) { vec!["x".to_string()] } else { vec![] };
    let mut qs = vec![vec!["0".to_string(); rank]; rank];
    let mut blocks: Vec<(usize, bool, bool)> = Vec::new();
    let mut l = 0;
    while l < rank {
        if rank - l >= 2 && r.gen_bool(0.5) {
            qs[l][l + 1] = "1".into();
            qs[l + 1][l] = "1".into();
            blocks.push((l, true, false));
            l += 2;
        } else {
            let c = [1, 2, -1, 3][r.gen_range(0..4)];
            let varying = !invertible.is_empty() && r.gen_bool(0.5);
            qs[l][l] = if varying { format!("{c}*x^{}", [-2, -1, 1, 2][r.gen_range(0..4)]) } else { c.to_string() };
            blocks.push((l, false, varying));
            l += 1;
        }
    }
    let spec0 = ToyGeometrySpec {
        base: base.clone(),
        e_rank: rank,
        q: qs.clone(),
        nabla_e: vec![],
        phi: vec![],
        invertible: invertible.clone(),
    };
    let g0 = ToyGeometry::new(spec0).unwrap();
    let sig = g0.sig().clone();
    let zero = Poly::zero(&sig);
    let mut bmat = vec![vec![zero.clone(); rank]; rank];
    for l in 0..rank {
        for m in l + 1..rank {
            if r.gen_bool(0.7) {
                let b = (0..n).fold(zero.clone(), |acc, i| acc + &(&random_base_poly(&sig, n, r) * &g0.dx(i)));
                bmat[m][l] = -&b;
                bmat[l][m] = b;
            }
        }
    }
    let qinv = g0.q_inverse().unwrap();
    let half = Q::new(1.into(), 2.into());
    let mut nabla = vec![vec![vec![String::new(); n]; rank]; rank];
    for l in 0..rank {
        for j in 0..rank {
            let a = (0..rank).fold(zero.clone(), |acc, m| {
                acc + &(&qinv[l][m] * &(&de_rham_d(&g0.q()[m][j]).scale(&half) + &bmat[m][j]))
            });
            for i in 0..n {
                nabla[l][j][i] = a.dleft(sig.form_var(i)).to_string();
            }
        }
    }
    let mut phi = vec!["0".to_string(); rank];
    for (l, hyperbolic, varying) in blocks {
        if hyperbolic {
            phi[l + usize::from(r.gen_bool(0.5))] = random_base_poly(&sig, n, r).to_string();
        } else if !varying {
            phi[l] = small_q(r).to_string();
        }
    }
    let spec = ToyGeometrySpec { base, e_rank: rank, q: qs, nabla_e: nabla, phi, invertible };
    let g = ToyGeometry::new(spec).unwrap();
    g.validate().unwrap();
    g
}
