//! De Rham forms: `d`, the induced `delta`, and the total differential.
//!
//! Forms use the super-sign convention in which `dg` has parity `deg g + 1`.
//! Both `d` and `delta` are odd derivations, `delta(dg) = -d(delta g)`, and the
//! total differential is `d + delta`. In the bigraded convention where signs
//! ignore Hodge weight this is `d + (-1)^p delta` on `p`-forms.

use super::dga::DGAlgebra;
use super::poly::Poly;
use super::signature::VarKind;

/// The de Rham differential; vector symbols are treated as constants.
pub fn de_rham_d(omega: &Poly) -> Poly {
    let sig = omega.sig().clone();
    omega.derive(true, &|v| match sig.kind(v) {
        VarKind::Gen => Some(Poly::var(&sig, sig.form_var(v))),
        _ => None,
    })
}

/// The algebra differential extended to forms.
pub fn delta_form(alg: &DGAlgebra, omega: &Poly) -> Poly {
    let sig = alg.sig().clone();
    omega.derive(true, &|v| match sig.kind(v) {
        VarKind::Gen => Some(alg.delta_of(v).clone()),
        VarKind::Form => Some(-de_rham_d(alg.delta_of(sig.base(v)))),
        VarKind::Vector => None,
    })
}

/// Total differential `d + delta` on the de Rham complex.
pub fn total_d(alg: &DGAlgebra, omega: &Poly) -> Poly {
    de_rham_d(omega) + &delta_form(alg, omega)
}
