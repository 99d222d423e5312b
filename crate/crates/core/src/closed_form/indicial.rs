use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Roots of 4σ² - 4(λ+b-3)σ + (λ+b-4)(λ+b-2) = 0, i.e. (λ+b-2)/2 and (λ+b-4)/2.
pub fn indicial_roots(lambda: Complex64, b: f64) -> (Complex64, Complex64) {
    let s = lambda + b;
    ((s - 2.0) * 0.5, (s - 4.0) * 0.5)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MembershipOperator {
    L,
    LAdjoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MembershipSpace {
    L2,
    H1Tilde,
    /// Dual of H̃¹, the natural space for L*.
    H1Dual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    InPointSpectrum,
    NotIn,
    BoundaryOrLogCase,
}

/// Evaluates the strict inequalities 0 < |Re λ| < edge with
/// edge = 5-b (L, L²), 3-b (L, H̃¹), b-5 (L*, L²), b-3 (L*, H̃¹*).
///
/// Equality anywhere, and λ+b ∈ {2, 4} after reflecting to Re λ > 0, is never decided.
pub fn membership(
    lambda: Complex64,
    b: f64,
    operator: MembershipOperator,
    space: MembershipSpace,
) -> Result<Membership> {
    use MembershipOperator::*;
    use MembershipSpace::*;
    let edge = match (operator, space) {
        (L, L2) => 5.0 - b,
        (L, H1Tilde) => 3.0 - b,
        (LAdjoint, L2) => b - 5.0,
        (LAdjoint, H1Dual) => b - 3.0,
        (op, sp) => {
            return Err(Error::InvalidParameter(format!(
                "no membership rule for {op:?} on {sp:?}"
            )))
        }
    };
    let lambda = if lambda.re < 0.0 { -lambda } else { lambda };
    let r = lambda.re;
    let log_case = lambda.im == 0.0 && (r + b == 2.0 || r + b == 4.0);
    Ok(if r == 0.0 || r == edge {
        Membership::BoundaryOrLogCase
    } else if r > edge {
        Membership::NotIn
    } else if log_case {
        Membership::BoundaryOrLogCase
    } else {
        Membership::InPointSpectrum
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdjointConstantReport {
    pub lambda: Complex64,
    pub b: f64,
    /// Rows of the homogeneous system in (K₊, K₋, k(0), k'(0)).
    pub system: Vec<[Complex64; 4]>,
    pub rank: usize,
    /// True when every solution has K₊ = K₋ = 0.
    pub forced_zero: bool,
}

/// Continuity of k and k' at the crest (with M± = 0 and K₊ = K₋ from boundedness):
///
/// K± = (±(b-2) - λ) k(0),   ∓K± = (±(b-4) - λ) k'(0) + 2(2-b) k(0).
pub fn adjoint_constant_system(lambda: Complex64, b: f64) -> AdjointConstantReport {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let system = vec![
        [one, zero, -((b - 2.0) - lambda), zero],
        [zero, one, -(-(b - 2.0) - lambda), zero],
        [
            -one,
            zero,
            -Complex64::from(2.0 * (2.0 - b)),
            -((b - 4.0) - lambda),
        ],
        [
            zero,
            one,
            -Complex64::from(2.0 * (2.0 - b)),
            -(-(b - 4.0) - lambda),
        ],
        [one, -one, zero, zero],
    ];
    let null = null_space(&system);
    let forced_zero = null
        .iter()
        .all(|v| v[0].norm() < 1e-10 && v[1].norm() < 1e-10);
    AdjointConstantReport {
        lambda,
        b,
        rank: 4 - null.len(),
        system,
        forced_zero,
    }
}

/// Null space of a small complex system by Gauss–Jordan elimination with partial pivoting.
fn null_space(rows: &[[Complex64; 4]]) -> Vec<[Complex64; 4]> {
    const TOL: f64 = 1e-12;
    let mut a: Vec<[Complex64; 4]> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..4 {
        let Some(p) = (r..a.len()).max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm()))
        else {
            break;
        };
        if a[p][c].norm() < TOL {
            continue;
        }
        a.swap(r, p);
        let inv = 1.0 / a[r][c];
        for k in 0..4 {
            a[r][k] *= inv;
        }
        for i in 0..a.len() {
            if i != r {
                let f = a[i][c];
                for k in 0..4 {
                    let t = a[r][k];
                    a[i][k] -= f * t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..4)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = [Complex64::new(0.0, 0.0); 4];
            v[free] = Complex64::new(1.0, 0.0);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][free];
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn roots_at_special_sums() {
        assert_eq!(indicial_roots(c(1.0), 1.0), (c(0.0), c(-1.0)));
        assert_eq!(indicial_roots(c(1.0), 3.0), (c(1.0), c(0.0)));
        assert_eq!(indicial_roots(c(0.5), 2.5), (c(0.5), c(-0.5)));
    }

    #[test]
    fn membership_examples() {
        use Membership::*;
        use MembershipOperator::*;
        use MembershipSpace::*;
        assert_eq!(membership(c(1.0), 2.0, L, L2).unwrap(), InPointSpectrum);
        assert_eq!(membership(c(1.5), 3.0, L, H1Tilde).unwrap(), NotIn);
        // λ+b = 4 is a log case, but the band is empty at b = 3
        assert_eq!(membership(c(1.0), 3.0, L, H1Tilde).unwrap(), NotIn);
        assert_eq!(
            membership(c(1.0), 1.0, L, H1Tilde).unwrap(),
            BoundaryOrLogCase
        );
        assert_eq!(
            membership(c(0.5), 4.0, LAdjoint, H1Dual).unwrap(),
            InPointSpectrum
        );
        assert_eq!(membership(c(-1.0), 2.0, L, L2).unwrap(), InPointSpectrum);
        assert_eq!(membership(c(0.0), 2.0, L, L2).unwrap(), BoundaryOrLogCase);
        assert_eq!(membership(c(3.0), 2.0, L, L2).unwrap(), BoundaryOrLogCase);
        assert_eq!(membership(c(2.0), 2.0, L, L2).unwrap(), BoundaryOrLogCase);
        assert!(membership(c(1.0), 2.0, L, H1Dual).is_err());
    }

    #[test]
    fn constants_forced_to_zero() {
        let r = adjoint_constant_system(c(1.0), 7.0);
        assert!(r.forced_zero);
        assert_eq!(r.rank, 4);
    }

    #[test]
    fn null_space_of_rank_deficient_system() {
        let z = c(0.0);
        let rows = [[c(1.0), c(1.0), z, z], [z, z, c(1.0), z]];
        let n = null_space(&rows);
        assert_eq!(n.len(), 2);
        for v in n {
            for r in rows {
                let s: Complex64 = r.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(s.norm() < 1e-14);
            }
        }
    }
}
