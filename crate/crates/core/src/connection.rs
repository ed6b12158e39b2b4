//! Flat right connections and the right de Rham operator `D`.
//!
//! Polyvectors pair with forms written to their right ([`contract`]). A
//! connection acts from the left and is right-linear:
//! `nabla_2(pd(g) a) = c_g a - d^L_g(a)`, while `nabla_k` for `k >= 3` is an
//! A-linear table on words of `k - 1` vector symbols.
//!
//! [`apply_d`] recovers `D(u)` from its values on basis forms:
//!
//! ```text
//! D_1(u)(w) = delta(u(w)) - (-1)^|u| u(delta w)
//! D_2(u)(w) = nabla_2(u -| w) - (-1)^|u| u(dw)
//! D_k(u)(w) = nabla_k(u -| w)
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{apply_delta, de_rham_d, delta_form, total_d, DGAlgebra, Monomial, Poly, Signature, VarKind, Q};
use crate::polyvector::{contract, delta_pol, inverse_flat_form, nondegeneracy_check, pairing, PoissonStructure};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConnectionError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("value of nabla on {word} must have degree {expected}, got {found}")]
    Degree { word: String, expected: i32, found: String },
    #[error("value of nabla on {0} is not a function")]
    NotFunction(String),
    #[error("table words must have at least two vector symbols")]
    ShortWord,
    #[error("twisting form is not closed: {0}")]
    NotClosed(String),
    #[error("twisting form must lie in positive Hodge weight with total degree 1")]
    NotFiltered,
    #[error("Poisson structure is not strict and nondegenerate")]
    Degenerate,
    #[error("connection and input belong to different algebras")]
    SignatureMismatch,
}

/// A right connection `{nabla_k}` on a free CDGA.
#[derive(Clone, Debug)]
pub struct RightConnection {
    alg: DGAlgebra,
    nabla2: Vec<Poly>,
    higher: BTreeMap<usize, BTreeMap<Monomial, Poly>>,
}

fn word_name(sig: &Arc<Signature>, w: &Monomial) -> String {
    Poly::monomial(sig, w.clone(), Q::from_integer(1.into())).to_string()
}

/// DR^r-degree of a polyvector monomial: Pol-degree minus weight.
fn drr_degree(sig: &Signature, m: &Monomial) -> i32 {
    crate::algebra::mono_pol_degree(sig, m) - m.count(sig, VarKind::Vector)
}

impl RightConnection {
    /// The coordinate connection `nabla_2(pd(g)) = 0`, no higher terms.
    pub fn coordinate(alg: &DGAlgebra) -> Self {
        let n = alg.sig().ngens();
        RightConnection { alg: alg.clone(), nabla2: vec![alg.zero(); n], higher: BTreeMap::new() }
    }

    /// Build from values on `pd(g)` and on higher words (lists of generator names).
    pub fn new(
        alg: &DGAlgebra,
        nabla2: BTreeMap<String, Poly>,
        higher: Vec<(Vec<String>, Poly)>,
    ) -> Result<Self, ConnectionError> {
        let sig = alg.sig().clone();
        let mut c = RightConnection::coordinate(alg);
        for (name, v) in nabla2 {
            let g = sig.gen_index(&name).ok_or_else(|| ConnectionError::UnknownGenerator(name.clone()))?;
            c.set_nabla2(g, v)?;
        }
        for (word, v) in higher {
            let mut m = Monomial::one(sig.nvars());
            for name in &word {
                let g = sig.gen_index(name).ok_or_else(|| ConnectionError::UnknownGenerator(name.clone()))?;
                m.0[sig.vector_var(g)] += 1;
            }
            c.set_table(m, v)?;
        }
        Ok(c)
    }

    fn check_value(&self, word: &Monomial, v: &Poly) -> Result<(), ConnectionError> {
        let sig = self.alg.sig();
        if !Signature::same(v.sig(), sig) {
            return Err(ConnectionError::SignatureMismatch);
        }
        let name = word_name(sig, word);
        if !v.is_function() {
            return Err(ConnectionError::NotFunction(name));
        }
        let expected = drr_degree(sig, word) + 1;
        if !v.is_zero() && v.degree() != Some(expected) {
            return Err(ConnectionError::Degree { word: name, expected, found: v.to_string() });
        }
        Ok(())
    }

    pub fn set_nabla2(&mut self, g: usize, v: Poly) -> Result<(), ConnectionError> {
        let sig = self.alg.sig().clone();
        let w = Poly::var(&sig, sig.vector_var(g)).leading().unwrap().0.clone();
        self.check_value(&w, &v)?;
        self.nabla2[g] = v;
        Ok(())
    }

    /// Set `nabla_2(pd(g))` without the degree check.
    pub fn set_nabla2_unchecked(&mut self, g: usize, v: Poly) {
        self.nabla2[g] = v;
    }

    pub fn set_table(&mut self, word: Monomial, v: Poly) -> Result<(), ConnectionError> {
        let sig = self.alg.sig().clone();
        let k = word.count(&sig, VarKind::Vector) as usize + 1;
        if k < 3 {
            return Err(ConnectionError::ShortWord);
        }
        if !crate::algebra::valid_mono(&sig, &word) {
            return Ok(());
        }
        self.check_value(&word, &v)?;
        let table = self.higher.entry(k).or_default();
        if v.is_zero() {
            table.remove(&word);
        } else {
            table.insert(word, v);
        }
        Ok(())
    }

    pub fn alg(&self) -> &DGAlgebra {
        &self.alg
    }

    pub fn sig(&self) -> &Arc<Signature> {
        self.alg.sig()
    }

    pub fn nabla2_values(&self) -> &[Poly] {
        &self.nabla2
    }

    pub fn tables(&self) -> &BTreeMap<usize, BTreeMap<Monomial, Poly>> {
        &self.higher
    }

    /// True when every `nabla_k` with `k >= 3` vanishes.
    pub fn is_strict(&self) -> bool {
        self.higher.values().all(|t| t.is_empty())
    }

    pub fn max_k(&self) -> usize {
        self.higher.iter().filter(|(_, t)| !t.is_empty()).map(|(k, _)| *k).max().unwrap_or(2)
    }

    /// `nabla_{w+1}` applied to a polyvector of weight `w >= 1`.
    pub fn nabla(&self, u: &Poly) -> Poly {
        let sig = self.sig().clone();
        let n = sig.ngens();
        let mut out = Poly::zero(&sig);
        for (m, c) in u.terms() {
            let w = m.count(&sig, VarKind::Vector);
            let mut am = m.clone();
            for g in 0..n {
                am.0[sig.vector_var(g)] = 0;
            }
            let a = Poly::monomial(&sig, am, c.clone());
            let mut word = m.clone();
            word.0[..2 * n].iter_mut().for_each(|e| *e = 0);
            let word_odd = Poly::monomial(&sig, word.clone(), Q::from_integer(1.into())).parity() == Some(true);
            let flip = word_odd && a.parity() == Some(true);
            let val = match w {
                0 => continue,
                1 => {
                    let g = (0..n).find(|&g| m.0[sig.vector_var(g)] == 1).unwrap();
                    let da = a.dleft(sig.gen_var(g));
                    let da = if sig.odd(sig.gen_var(g)) { -da } else { da };
                    &self.nabla2[g] * &a - &da
                }
                _ => match self.higher.get(&(w as usize + 1)).and_then(|t| t.get(&word)) {
                    Some(t) => t * &a,
                    None => continue,
                },
            };
            out = out + &if flip { -val } else { val };
        }
        out
    }

    /// Twist by a closed form `alpha` of total degree 1 in positive Hodge weight:
    /// `nabla^alpha_{p+1}(u) = nabla_{p+1}(u) + (-1)^|u| (u -| alpha_p)`.
    pub fn twist(&self, alpha: &Poly) -> Result<RightConnection, ConnectionError> {
        let sig = self.sig().clone();
        if !Signature::same(alpha.sig(), &sig) {
            return Err(ConnectionError::SignatureMismatch);
        }
        if alpha.has_kind(VarKind::Vector) || (!alpha.is_zero() && (alpha.form_degree() != Some(1) || alpha.weight_part(VarKind::Form, 0) != Poly::zero(&sig))) {
            return Err(ConnectionError::NotFiltered);
        }
        let dalpha = total_d(&self.alg, alpha);
        if !dalpha.is_zero() {
            return Err(ConnectionError::NotClosed(dalpha.to_string()));
        }
        let mut out = self.clone();
        for p in 1..=alpha.max_form_weight() {
            let ap = alpha.weight_part(VarKind::Form, p);
            if ap.is_zero() {
                continue;
            }
            for w in vector_words(&sig, p as usize, p as usize) {
                let v = signed_contract(&Poly::monomial(&sig, w.clone(), Q::from_integer(1.into())), &ap);
                if v.is_zero() {
                    continue;
                }
                if p == 1 {
                    let g = (0..sig.ngens()).find(|&g| w.0[sig.vector_var(g)] == 1).unwrap();
                    out.nabla2[g] = &out.nabla2[g] + &v;
                } else {
                    let prev = out.higher.get(&(p as usize + 1)).and_then(|t| t.get(&w)).cloned().unwrap_or_else(|| Poly::zero(&sig));
                    out.set_table(w, prev + &v)?;
                }
            }
        }
        Ok(out)
    }
}

/// `(-1)^|u| (u -| alpha)`, summed over the parity parts of `u`.
pub fn signed_contract(u: &Poly, alpha: &Poly) -> Poly {
    let (even, odd) = u.parity_parts();
    contract(&even, alpha) - &contract(&odd, alpha)
}

/// All monomials in vector symbols of weight `q`, even symbols repeated at most `max_even` times.
pub fn vector_words(sig: &Signature, q: usize, max_even: usize) -> Vec<Monomial> {
    words_of(sig, q, max_even, VarKind::Vector)
}

/// All monomials in form symbols of weight `q`, even symbols repeated at most `max_even` times.
pub fn form_words(sig: &Signature, q: usize, max_even: usize) -> Vec<Monomial> {
    words_of(sig, q, max_even, VarKind::Form)
}

fn words_of(sig: &Signature, q: usize, max_even: usize, kind: VarKind) -> Vec<Monomial> {
    let vars: Vec<usize> = (0..sig.nvars()).filter(|&v| sig.kind(v) == kind).collect();
    let mut out = Vec::new();
    let mut cur = Monomial::one(sig.nvars());
    fn rec(sig: &Signature, vars: &[usize], i: usize, left: usize, max_even: usize, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if i == vars.len() {
            return;
        }
        let v = vars[i];
        let cap = if sig.odd(v) { 1 } else { max_even };
        for e in 0..=cap.min(left) {
            cur.0[v] = e as i32;
            rec(sig, vars, i + 1, left - e, max_even, cur, out);
        }
        cur.0[v] = 0;
    }
    rec(sig, &vars, 0, q, max_even, &mut cur, &mut out);
    out
}

/// The form word dual to a vector word.
fn dual_form(sig: &Signature, w: &Monomial) -> Monomial {
    let n = sig.ngens();
    let mut m = Monomial::one(sig.nvars());
    for g in 0..n {
        m.0[sig.form_var(g)] = w.0[sig.vector_var(g)];
    }
    m
}

fn homogeneous_parts(u: &Poly) -> BTreeMap<(i32, bool), Poly> {
    let sig = u.sig().clone();
    let mut out: BTreeMap<(i32, bool), Poly> = BTreeMap::new();
    for (m, c) in u.terms() {
        let w = m.count(&sig, VarKind::Vector);
        let odd = m.odd(&sig);
        out.entry((w, odd)).or_insert_with(|| Poly::zero(&sig)).add_term(m.clone(), c.clone());
    }
    out
}

fn sgn(odd: bool) -> Q {
    Q::from_integer(if odd { (-1).into() } else { 1.into() })
}

/// The defining functional `D(u)(omega)` for `u` homogeneous in weight and parity.
pub fn evaluate_d(conn: &RightConnection, u: &Poly, omega: &Poly) -> Poly {
    let sig = conn.sig().clone();
    let mut out = Poly::zero(&sig);
    for ((p, odd), up) in homogeneous_parts(u) {
        for (r, wr) in homogeneous_form_weights(omega) {
            let s = sgn(odd);
            if r == p {
                let a = apply_delta(&conn.alg, &contract(&up, &wr));
                let b = contract(&up, &delta_form(&conn.alg, &wr));
                out = out + &a - &b.scale(&s);
            } else if r + 1 == p {
                let a = conn.nabla(&contract(&up, &wr));
                let b = contract(&up, &de_rham_d(&wr));
                out = out + &a - &b.scale(&s);
            } else if r + 1 < p {
                out = out + &conn.nabla(&contract(&up, &wr));
            }
        }
    }
    out
}

fn homogeneous_form_weights(omega: &Poly) -> Vec<(i32, Poly)> {
    (0..=omega.max_form_weight())
        .map(|r| (r, omega.weight_part(VarKind::Form, r)))
        .filter(|(_, w)| !w.is_zero())
        .collect()
}

fn max_even_exponent(u: &Poly) -> usize {
    let sig = u.sig();
    u.terms()
        .keys()
        .flat_map(|m| (0..sig.ngens()).map(move |g| m.0[sig.vector_var(g)]))
        .max()
        .unwrap_or(0)
        .max(0) as usize
}

/// Recover a polyvector `X` of weight `q` from its values `f(w)` on basis forms.
fn recover(sig: &Arc<Signature>, q: usize, max_even: usize, f: &dyn Fn(&Poly) -> Poly) -> Poly {
    let mut out = Poly::zero(sig);
    let one = Q::from_integer(1.into());
    for w in vector_words(sig, q, max_even) {
        let theta = Poly::monomial(sig, w.clone(), one.clone());
        let form = Poly::monomial(sig, dual_form(sig, &w), one.clone());
        let norm = contract(&theta, &form).constant_term();
        let val = f(&form);
        if val.is_zero() {
            continue;
        }
        let form_odd = form.parity() == Some(true);
        let (even, oddp) = val.parity_parts();
        let x = even + &if form_odd { -oddp } else { oddp };
        out = out + &(&theta * &x).scale(&(one.clone() / norm));
    }
    out
}

/// `D(u)`, computed by evaluating the defining identity on every basis form.
pub fn apply_d(conn: &RightConnection, u: &Poly) -> Poly {
    let sig = conn.sig().clone();
    let mut out = Poly::zero(&sig);
    let kmax = conn.max_k();
    for ((p, _), up) in homogeneous_parts(u) {
        let max_even = max_even_exponent(&up) + p as usize + 1;
        let lo = (p as i64 + 1 - kmax as i64).max(0) as usize;
        for q in lo..=p as usize {
            out = out + &recover(&sig, q, max_even, &|w| evaluate_d(conn, &up, w));
        }
    }
    out
}

/// The BV Laplacian of the coordinate connection, `-sum_g (-1)^|g| d^L_{pd(g)} d^L_g`.
pub fn bv_laplacian(u: &Poly) -> Poly {
    let sig = u.sig().clone();
    let mut out = Poly::zero(&sig);
    for g in 0..sig.ngens() {
        let a = u.dleft(sig.gen_var(g));
        if !a.is_zero() {
            let t = a.dleft(sig.vector_var(g));
            out = if sig.odd(sig.gen_var(g)) { out + &t } else { out - &t };
        }
    }
    out
}

/// The 1-form `alpha` with `nabla_2(pd(g)) = (-1)^|pd(g)| (pd(g) -| alpha)`.
pub fn connection_form(conn: &RightConnection) -> Poly {
    let sig = conn.sig().clone();
    let mut out = Poly::zero(&sig);
    for (g, c) in conn.nabla2.iter().enumerate() {
        let t = &Poly::var(&sig, sig.form_var(g)) * c;
        out = if sig.odd(sig.vector_var(g)) { out - &t } else { out + &t };
    }
    out
}

/// Closed form of `D` for strict connections:
/// `delta-bracket + BV Laplacian + (-1)^|u| (u -| alpha)` with `alpha` the
/// [`connection_form`], plus the
/// table contributions for higher `nabla_k` evaluated on basis forms.
pub fn apply_d_fast(conn: &RightConnection, u: &Poly) -> Poly {
    let sig = conn.sig().clone();
    let mut out = delta_pol(&conn.alg, u) + &bv_laplacian(u) + &twist_term(conn, u);
    if !conn.is_strict() {
        for ((p, _), up) in homogeneous_parts(u) {
            let max_even = max_even_exponent(&up) + p as usize + 1;
            for k in 3..=conn.max_k() {
                if (k as i32) - 1 > p {
                    continue;
                }
                let q = (p + 1 - k as i32) as usize;
                out = out + &recover(&sig, q, max_even, &|w| conn.nabla(&contract(&up, w)));
            }
        }
    }
    out
}

fn twist_term(conn: &RightConnection, u: &Poly) -> Poly {
    let alpha = connection_form(conn);
    if alpha.is_zero() {
        return alpha;
    }
    signed_contract(u, &alpha)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatnessViolation {
    pub input: String,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatnessReport {
    pub pass: bool,
    pub checked: usize,
    pub violations: Vec<FlatnessViolation>,
}

/// Function monomials with polynomial degree at most `degree_bound`; Laurent
/// exponents range over `[-degree_bound, degree_bound]`.
pub fn function_monomials(sig: &Signature, degree_bound: usize) -> Vec<Monomial> {
    let n = sig.ngens();
    let mut out = Vec::new();
    let mut cur = Monomial::one(sig.nvars());
    fn rec(sig: &Signature, g: usize, n: usize, left: i32, bound: i32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if g == n {
            out.push(cur.clone());
            return;
        }
        let (lo, hi) = if sig.invertible(g) {
            (-bound, bound)
        } else if sig.odd(g) {
            (0, 1.min(left))
        } else {
            (0, left)
        };
        for e in lo..=hi {
            let cost = if sig.invertible(g) { 0 } else { e };
            if cost > left {
                break;
            }
            cur.0[g] = e;
            rec(sig, g + 1, n, left - cost, bound, cur, out);
        }
        cur.0[g] = 0;
    }
    rec(sig, 0, n, degree_bound as i32, degree_bound as i32, &mut cur, &mut out);
    out
}

/// Basis polyvectors `a * word` with weight at most `weight_bound` and
/// coefficient polynomial degree at most `degree_bound`.
pub fn polyvector_basis(sig: &Arc<Signature>, weight_bound: usize, degree_bound: usize) -> Vec<Poly> {
    let mut out = Vec::new();
    let one = Q::from_integer(1.into());
    let funs = function_monomials(sig, degree_bound);
    for w in 0..=weight_bound {
        for word in vector_words(sig, w, w) {
            for f in &funs {
                let mut m = f.clone();
                for v in 0..sig.nvars() {
                    m.0[v] += word.0[v];
                }
                out.push(Poly::monomial(sig, m, one.clone()));
            }
        }
    }
    out.retain(|p| !p.is_zero());
    out
}

/// Check `D o D = 0` on a spanning set of polyvectors within the bounds.
pub fn flatness_check(conn: &RightConnection, weight_bound: usize, degree_bound: usize) -> FlatnessReport {
    let basis = polyvector_basis(conn.sig(), weight_bound, degree_bound);
    let mut violations = Vec::new();
    for b in &basis {
        let dd = apply_d_fast(conn, &apply_d_fast(conn, b));
        if !dd.is_zero() {
            violations.push(FlatnessViolation { input: b.to_string(), residual: dd.to_string() });
        }
    }
    FlatnessReport { pass: violations.is_empty(), checked: basis.len(), violations }
}

/// An operator on polyvectors given as a closure, with its parity.
pub struct Operator<'a> {
    pub odd: bool,
    pub apply: Box<dyn Fn(&Poly) -> Poly + 'a>,
}

/// Iterated graded commutator `[...[[op, a_1], a_2], ..., a_k](b)` with
/// multiplication operators `a_i`, expanded over parity parts of the arguments.
pub fn iterated_commutator(op: &Operator<'_>, args: &[Poly], at: &Poly) -> Poly {
    let mut parts: Vec<Vec<(bool, Poly)>> = Vec::new();
    for a in args {
        let (e, o) = a.parity_parts();
        let mut v = Vec::new();
        if !e.is_zero() {
            v.push((false, e));
        }
        if !o.is_zero() {
            v.push((true, o));
        }
        parts.push(v);
    }
    let mut total = Poly::zero(at.sig());
    let mut choice = vec![0usize; args.len()];
    loop {
        if parts.iter().all(|p| !p.is_empty()) {
            let chosen: Vec<&(bool, Poly)> = choice.iter().enumerate().map(|(i, &c)| &parts[i][c]).collect();
            total = total + &commutator_at(op, &chosen, chosen.len(), at);
        } else {
            return total;
        }
        let mut i = 0;
        loop {
            if i == args.len() {
                return total;
            }
            choice[i] += 1;
            if choice[i] < parts[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// `op_k(b)` where `op_0 = op` and `op_k(b) = op_{k-1}(a_k b) - (-1)^{|op_{k-1}||a_k|} a_k op_{k-1}(b)`.
fn commutator_at(op: &Operator<'_>, args: &[&(bool, Poly)], k: usize, b: &Poly) -> Poly {
    if k == 0 {
        return (op.apply)(b);
    }
    let (odd_a, a) = args[k - 1];
    let op_odd = args[..k - 1].iter().fold(op.odd, |acc, (o, _)| acc ^ o);
    let first = commutator_at(op, args, k - 1, &(a * b));
    let second = a * &commutator_at(op, args, k - 1, b);
    if op_odd && *odd_a {
        first + &second
    } else {
        first - &second
    }
}

/// The L-infinity bracket `[a_1, ..., a_k]_D = [...[D, a_1], ..., a_k](1)`.
pub fn linfty_bracket(conn: &RightConnection, args: &[Poly]) -> Poly {
    let op = Operator { odd: true, apply: Box::new(|u: &Poly| apply_d_fast(conn, u)) };
    iterated_commutator(&op, args, &conn.alg.one())
}

/// The bracket built from the single component `D_k` of `D`.
pub fn linfty_bracket_component(conn: &RightConnection, k: usize, args: &[Poly]) -> Poly {
    let op = Operator { odd: true, apply: Box::new(move |u: &Poly| d_component(conn, k, u)) };
    iterated_commutator(&op, args, &conn.alg.one())
}

/// The component `D_k(u)`, lowering weight by `k - 1`.
pub fn d_component(conn: &RightConnection, k: usize, u: &Poly) -> Poly {
    let sig = conn.sig().clone();
    let mut out = Poly::zero(&sig);
    for p in 0..=u.max_vector_weight() {
        let q = p + 1 - k as i32;
        let up = u.weight_part(VarKind::Vector, p);
        if q < 0 || up.is_zero() {
            continue;
        }
        out = out + &apply_d_fast(conn, &up).weight_part(VarKind::Vector, q);
    }
    out
}

/// The connection determined by a strict nondegenerate `pi`:
/// `nabla_2(pd(h)) = pi(d((pi^flat)^{-1} pd(h)))`, no higher terms.
pub fn canonical_connection(alg: &DGAlgebra, pi: &PoissonStructure) -> Result<RightConnection, ConnectionError> {
    let cert = nondegeneracy_check(pi).map_err(|_| ConnectionError::Degenerate)?;
    if !cert.nondegenerate {
        return Err(ConnectionError::Degenerate);
    }
    let pi2 = pi.component(2).ok_or(ConnectionError::Degenerate)?;
    if !Signature::same(pi2.sig(), alg.sig()) {
        return Err(ConnectionError::SignatureMismatch);
    }
    let mut conn = RightConnection::coordinate(alg);
    for h in 0..alg.sig().ngens() {
        let beta = inverse_flat_form(&cert, h).ok_or(ConnectionError::Degenerate)?;
        conn.set_nabla2(h, pairing(pi2, &de_rham_d(&beta)))?;
    }
    Ok(conn)
}
