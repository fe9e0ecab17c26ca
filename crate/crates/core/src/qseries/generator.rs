//! Term generators: the single definition of every series' terms.
//!
//! A generated series has the shape `constant + mult · y^mult_exp · Σ t_n`
//! with t_0 = A_0/B_0 and t_n = t_{n-1} · a_n/d_n, where every piece is a
//! sparse Laurent polynomial in the base variable y. For most series y is the
//! series argument x itself; for the two half-integer companions y² = x.

use rug::Rational;

use super::SeriesId;

/// Sparse polynomial Σ c_i y^{e_i} with small integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lp(pub Vec<(i64, i64)>);

impl Lp {
    pub fn one() -> Self {
        Lp(vec![(1, 0)])
    }

    pub fn mono(c: i64, e: i64) -> Self {
        Lp(vec![(c, e)])
    }

    pub fn terms(&self) -> &[(i64, i64)] {
        &self.0
    }

    /// Upper bound for |p(y)| given |y| = r.
    pub fn abs_bound(&self, r: f64) -> f64 {
        self.0.iter().map(|&(c, e)| c.unsigned_abs() as f64 * r.powi(e as i32)).sum()
    }
}

/// Definition of one generated series.
#[derive(Clone, Debug)]
pub struct Generator {
    pub start_num: Lp,
    pub start_den: Lp,
    /// Factor pair (a_j, d_j) for j ≥ 1.
    pub factor: fn(i64) -> (Lp, Lp),
    /// Index of the generator's t_0 in the series' own indexing.
    pub offset: u64,
    pub constant: Rational,
    pub mult: Rational,
    pub mult_exp: i64,
    /// y is a square root of the series argument.
    pub half_variable: bool,
    /// Bound on |a_j/d_j| at |y| = r, valid and nonincreasing for all larger j.
    pub ratio_bound: fn(f64, i64) -> f64,
}

fn p(terms: &[(i64, i64)]) -> Lp {
    Lp(terms.to_vec())
}

fn pos_den(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        f64::INFINITY
    }
}

fn base(factor: fn(i64) -> (Lp, Lp), ratio_bound: fn(f64, i64) -> f64) -> Generator {
    Generator {
        start_num: Lp::one(),
        start_den: Lp::one(),
        factor,
        offset: 0,
        constant: Rational::new(),
        mult: Rational::from(1),
        mult_exp: 0,
        half_variable: false,
        ratio_bound,
    }
}

// f: q^{n²}/(-q;q)_n²
fn f_factor(j: i64) -> (Lp, Lp) {
    (Lp::mono(1, 2 * j - 1), p(&[(1, 0), (2, j), (1, 2 * j)]))
}
fn f_ratio(r: f64, j: i64) -> f64 {
    pos_den(r.powi((2 * j - 1) as i32), (1.0 - r.powi(j as i32)).powi(2))
}

// ω: q^{2n(n+1)}/(q;q²)_{n+1}²
fn omega_factor(j: i64) -> (Lp, Lp) {
    let e = 2 * j + 1;
    (Lp::mono(1, 4 * j), p(&[(1, 0), (-2, e), (1, 2 * e)]))
}
fn omega_ratio(r: f64, j: i64) -> f64 {
    pos_den(r.powi((4 * j) as i32), (1.0 - r.powi((2 * j + 1) as i32)).powi(2))
}

// ψ, reindexed from n = 1: q^{(m+1)²}/(q;q²)_{m+1}
fn psi_factor(j: i64) -> (Lp, Lp) {
    let e = 2 * j + 1;
    (Lp::mono(1, e), p(&[(1, 0), (-1, e)]))
}
fn psi_ratio(r: f64, j: i64) -> f64 {
    let x = r.powi((2 * j + 1) as i32);
    pos_den(x, 1.0 - x)
}

// φ: q^{n²}/(-q²;q²)_n
fn phi_factor(j: i64) -> (Lp, Lp) {
    (Lp::mono(1, 2 * j - 1), p(&[(1, 0), (1, 2 * j)]))
}
fn phi_ratio(r: f64, j: i64) -> f64 {
    pos_den(r.powi((2 * j - 1) as i32), 1.0 - r.powi((2 * j) as i32))
}

// ν: q^{n²+n}/(-q;q²)_{n+1}
fn nu_factor(j: i64) -> (Lp, Lp) {
    (Lp::mono(1, 2 * j), p(&[(1, 0), (1, 2 * j + 1)]))
}
fn nu_ratio(r: f64, j: i64) -> f64 {
    pos_den(r.powi((2 * j) as i32), 1.0 - r.powi((2 * j + 1) as i32))
}

// χ: q^{n²}/Π_{j≤n}(1 - q^j + q^{2j})
fn chi_factor(j: i64) -> (Lp, Lp) {
    (Lp::mono(1, 2 * j - 1), p(&[(1, 0), (-1, j), (1, 2 * j)]))
}
fn chi_ratio(r: f64, j: i64) -> f64 {
    let x = r.powi(j as i32);
    pos_den(r.powi((2 * j - 1) as i32), 1.0 - x - x * x)
}

// ρ: q^{2n(n+1)}/Π_{j≤n}(1 + q^{2j+1} + q^{4j+2})
fn rho_factor(j: i64) -> (Lp, Lp) {
    let e = 2 * j + 1;
    (Lp::mono(1, 4 * j), p(&[(1, 0), (1, e), (1, 2 * e)]))
}
fn rho_ratio(r: f64, j: i64) -> f64 {
    let x = r.powi((2 * j + 1) as i32);
    pos_den(r.powi((4 * j) as i32), 1.0 - x - x * x)
}

// ψ̃_a: Σ (-q²;q²)_n q^{n+1}
fn psi_a_factor(j: i64) -> (Lp, Lp) {
    (p(&[(1, 1), (1, 2 * j + 1)]), Lp::one())
}
fn r_one_plus_2j(r: f64, j: i64) -> f64 {
    r * (1.0 + r.powi((2 * j) as i32))
}

// φ̃_a: Σ (q;q²)_n (-1)^n q^{2n+1}
fn phi_a_factor(j: i64) -> (Lp, Lp) {
    (p(&[(-1, 2), (1, 2 * j + 1)]), Lp::one())
}
fn r2_one_plus_2jm1(r: f64, j: i64) -> f64 {
    r * r * (1.0 + r.powi((2 * j - 1) as i32))
}

// ν̃_a: Σ (q;q²)_n (-1)^n q^n
fn nu_a_factor(j: i64) -> (Lp, Lp) {
    (p(&[(-1, 1), (1, 2 * j)]), Lp::one())
}
fn r_one_plus_2jm1(r: f64, j: i64) -> f64 {
    r * (1.0 + r.powi((2 * j - 1) as i32))
}

// Σ (-q²;q²)_n (-1)^n q^{n+1}, shared by f̃_a and χ̃_a
fn alt_even_factor(j: i64) -> (Lp, Lp) {
    (p(&[(-1, 1), (-1, 2 * j + 1)]), Lp::one())
}

// Σ (-q;q²)_n (-1)^n q^{2n+1}, shared by 𝔣̃_a and X̃_a
fn alt_odd_factor(j: i64) -> (Lp, Lp) {
    (p(&[(-1, 2), (-1, 2 * j + 1)]), Lp::one())
}

// Σ (-s;s²)_n s^n with s² = q, shared by ω̃_a and ρ̃_a
fn half_factor(j: i64) -> (Lp, Lp) {
    (p(&[(1, 1), (1, 2 * j)]), Lp::one())
}

/// The generator of a series, or `None` for product and theta ids.
pub fn generator(id: SeriesId) -> Option<Generator> {
    use SeriesId::*;
    let g = match id {
        F => base(f_factor, f_ratio),
        Omega => Generator {
            start_den: p(&[(1, 0), (-2, 1), (1, 2)]),
            ..base(omega_factor, omega_ratio)
        },
        Psi => Generator {
            start_num: Lp::mono(1, 1),
            start_den: p(&[(1, 0), (-1, 1)]),
            offset: 1,
            ..base(psi_factor, psi_ratio)
        },
        Phi => base(phi_factor, phi_ratio),
        Nu => Generator {
            start_den: p(&[(1, 0), (1, 1)]),
            ..base(nu_factor, nu_ratio)
        },
        Chi => base(chi_factor, chi_ratio),
        Rho => Generator {
            start_den: p(&[(1, 0), (1, 1), (1, 2)]),
            ..base(rho_factor, rho_ratio)
        },
        PsiA => Generator {
            start_num: Lp::mono(1, 1),
            ..base(psi_a_factor, r_one_plus_2j)
        },
        PhiA => Generator {
            start_num: Lp::mono(1, 1),
            constant: Rational::from(1),
            ..base(phi_a_factor, r2_one_plus_2jm1)
        },
        NuA => base(nu_a_factor, r_one_plus_2jm1),
        FA => Generator {
            start_num: Lp::mono(1, 1),
            mult: Rational::from(4),
            ..base(alt_even_factor, r_one_plus_2j)
        },
        FrakFA => Generator {
            start_num: Lp::mono(1, 1),
            constant: Rational::from(2),
            mult: Rational::from(-2),
            ..base(alt_odd_factor, r2_one_plus_2jm1)
        },
        ChiA => Generator {
            start_num: Lp::mono(1, 1),
            ..base(alt_even_factor, r_one_plus_2j)
        },
        XA => Generator {
            start_num: Lp::mono(1, 1),
            constant: Rational::from((1, 2)),
            mult: Rational::from((-1, 2)),
            ..base(alt_odd_factor, r2_one_plus_2jm1)
        },
        OmegaA => Generator {
            mult_exp: -1,
            half_variable: true,
            ..base(half_factor, r_one_plus_2jm1)
        },
        RhoA => Generator {
            mult: Rational::from((-1, 2)),
            mult_exp: -1,
            half_variable: true,
            ..base(half_factor, r_one_plus_2jm1)
        },
        UProd | VProd | WProd | XProd | Theta2 | Theta4 | QPochhammerInf => return None,
    };
    Some(g)
}
