use crate::network::ProfileFamily;

/// Exact threshold where one is known for the disordered biased family, `None` otherwise.
///
/// Trees: `(lambda1 v 1) / (d - 1)` for `lambda1 < d - 1 <= lambda2`. Z^2: `p_c = 1/2` for
/// `lambda1 < 1 <= lambda2`. Z^d with `d >= 3` equals `p_c` there but `p_c` has no exact
/// value, so `None`. Z and the virtually-Z families: `1` once closed conductances are
/// bounded (`lambda2 >= 1`).
pub fn pc_star_closed_forms(family: &ProfileFamily, l1: f64, l2: f64) -> Option<f64> {
    if !(l1 > 0.0 && l1 < l2) {
        return None;
    }
    match family {
        ProfileFamily::Tree { d } if *d >= 3 => {
            let m = (*d - 1) as f64;
            (l1 < m && m <= l2).then(|| l1.max(1.0) / m)
        }
        ProfileFamily::Lattice { d: 1 } | ProfileFamily::ZCayley { .. } | ProfileFamily::Ladder { .. } => {
            (l2 >= 1.0).then_some(1.0)
        }
        ProfileFamily::Lattice { d: 2 } => (l1 < 1.0 && 1.0 <= l2).then_some(0.5),
        _ => None,
    }
}
