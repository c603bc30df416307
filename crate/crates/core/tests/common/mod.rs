//! Independent oracles shared by the integration tests. Nothing here calls
//! into the crate's coupling or network code.
#![allow(dead_code, clippy::excessive_precision, clippy::needless_range_loop)]

use lis_core::linalg::{c, CMatrix, CVector, C64};
use lis_core::{PhysicalConfig, Position};
use rand::Rng;

// 15-point Kronrod nodes on [-1, 1] (non-negative half) and weights; the odd
// entries are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).norm())
}

/// Adaptive Gauss-Kronrod integral of a complex function over `[a, b]`.
pub fn integrate<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, rel_tol: f64) -> C64 {
    fn recurse<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> C64 {
        let (value, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return value;
        }
        let mid = 0.5 * (a + b);
        recurse(f, a, mid, tol / 2.0, depth - 1) + recurse(f, mid, b, tol / 2.0, depth - 1)
    }
    let (rough, _) = gk15(f, a, b);
    recurse(f, a, b, rel_tol * rough.norm().max(f64::MIN_POSITIVE), 30)
}

/// zz component of the free-space dyadic Green's function (impedance
/// units) from radial derivatives of the scalar kernel `e^{-ikR}/R`.
pub fn green_zz(d: Position, phys: &PhysicalConfig) -> C64 {
    let k = phys.wavenumber();
    let lambda = phys.wavelength();
    let r = d.norm();
    let phase = c(0.0, -k * r).exp();
    let phi = phase / r;
    let d1 = phase * c(-1.0 / (r * r), -k / r);
    let d2 = phase * c(-k * k / r + 2.0 / (r * r * r), 2.0 * k / (r * r));
    let cos2 = (d.z / r).powi(2);
    let dzz = d2 * cos2 + d1 * (1.0 / r - d.z * d.z / (r * r * r));
    c(0.0, -phys.eta() / (2.0 * lambda)) * (phi + dzz / (k * k))
}

/// Mutual impedance of two parallel z-dipoles of length `length` carrying a
/// uniform current, by double numerical integration along both wires.
pub fn finite_dipole_impedance(r: Position, length: f64, phys: &PhysicalConfig) -> C64 {
    let h = length / 2.0;
    let tol = 1e-10;
    let outer = |z: f64| {
        let inner = |zp: f64| green_zz(Position::new(r.x, r.y, r.z + z - zp), phys);
        integrate(&inner, -h, h, tol)
    };
    -integrate(&outer, -h, h, tol)
}

/// Literal transcription of the closed-form mutual impedance, adequate
/// away from zero separation.
pub fn naive_mutual_impedance(d: Position, phys: &PhysicalConfig) -> C64 {
    let k = phys.wavenumber();
    let lambda = phys.wavelength();
    let l = phys.dipole_length();
    let eta = phys.eta();
    let r = d.norm();
    let z2 = d.z * d.z;
    let kr = k * r;
    let bracket = c(1.0 - z2 / (r * r) - 1.0 / (kr * kr) + 3.0 * z2 / (k * k * r.powi(4)), -1.0 / kr + 3.0 * z2 / (k * r.powi(3)));
    c(0.0, l * l * eta / (2.0 * lambda * r)) * c(0.0, -kr).exp() * bracket
}

/// Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<C64>>, mut b: Vec<C64>) -> Vec<C64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
            let v = b[col];
            b[row] -= factor * v;
        }
    }
    let mut x = vec![c(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Solution of the terminated (N+M)-port network for prescribed surface
/// currents.
pub struct PortSolution {
    pub j_r: Vec<C64>,
    pub v_t: Vec<C64>,
    /// Time-averaged power entering the surface ports, `Re{v_tᴴ j_t}/2`.
    pub p_t: f64,
    /// `|j_rm|² z0 / 2`.
    pub p_r: Vec<f64>,
}

/// Builds the full port impedance matrix from [`naive_mutual_impedance`],
/// terminates every user port in `z0`, and solves for the user currents.
pub fn full_port_solve(lis: &[Position], ues: &[Position], j_t: &[C64], phys: &PhysicalConfig) -> PortSolution {
    let z0 = {
        let l = phys.dipole_length();
        phys.wavenumber() * l * l * phys.eta() / (3.0 * phys.wavelength())
    };
    let all: Vec<Position> = lis.iter().chain(ues).copied().collect();
    let n = lis.len();
    let m = ues.len();
    let z = |i: usize, j: usize| {
        if i == j {
            c(z0, 0.0)
        } else {
            naive_mutual_impedance(all[i] - all[j], phys)
        }
    };
    // user rows: Σ_t z_rt j_t + Σ_r' z_rr' j_r' + z0 j_r = 0
    let a: Vec<Vec<C64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| z(n + i, n + j) + if i == j { c(z0, 0.0) } else { c(0.0, 0.0) })
                .collect()
        })
        .collect();
    let b: Vec<C64> = (0..m)
        .map(|i| -(0..n).map(|t| z(n + i, t) * j_t[t]).sum::<C64>())
        .collect();
    let j_r = gauss_solve(a, b);
    let v_t: Vec<C64> = (0..n)
        .map(|t| (0..n).map(|s| z(t, s) * j_t[s]).sum::<C64>() + (0..m).map(|r| z(t, n + r) * j_r[r]).sum::<C64>())
        .collect();
    let p_t = v_t.iter().zip(j_t).map(|(v, j)| (v * j.conj()).re).sum::<f64>() / 2.0;
    let p_r = j_r.iter().map(|j| j.norm_sqr() * z0 / 2.0).collect();
    PortSolution { j_r, v_t, p_t, p_r }
}

pub fn random_complex_vector<R: Rng>(rng: &mut R, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_complex_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Up to `max_n` surface points on the yz-plane and `max_m` users in front
/// of it, every pair at least `min_spacing` apart.
pub fn random_geometry<R: Rng>(rng: &mut R, max_n: usize, max_m: usize, min_spacing: f64) -> (Vec<Position>, Vec<Position>) {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m);
    let side = min_spacing * (n as f64).sqrt() * 3.0;
    let far_enough = |set: &[Position], p: &Position| set.iter().all(|q| (*q - *p).norm() >= min_spacing);
    let mut lis = Vec::with_capacity(n);
    while lis.len() < n {
        let p = Position::new(0.0, rng.gen_range(-side..side), rng.gen_range(-side..side));
        if far_enough(&lis, &p) {
            lis.push(p);
        }
    }
    let mut ues = Vec::with_capacity(m);
    while ues.len() < m {
        let p = Position::new(
            rng.gen_range(min_spacing.max(0.3)..6.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        );
        if far_enough(&ues, &p) {
            ues.push(p);
        }
    }
    (lis, ues)
}
