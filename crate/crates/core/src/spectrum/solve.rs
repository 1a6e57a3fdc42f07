use super::cf::{f_cf, ParitySource, RawCoefficients};
use super::{EnergyLevel, SolveOptions, Spectrum, Variable};
use crate::error::{Error, Result};
use crate::model::{rabi_monic_family, EnergyValue, ModelParams, MonicCoefficients, Parity};
use crate::ops::{poly_zeros, sturm_count, NODE_TOL};
use crate::scaled::{rescale_pair, ScaledValue};
use rayon::prelude::*;

/// Number of eigenvalues strictly below `x`: zeros of `P_N` below `x` plus one if
/// `F(x) < 0`.
///
/// Crossing a pole adds one to the Sturm count while `F` jumps from negative to
/// positive, so only the zeros of `F` move the count. This stays exact when a
/// zero sits closer to its pole than `F` can resolve, which is the normal
/// situation for all but the lowest levels.
pub fn count_below<R, S>(rec0: &R, n: usize, src: &S, x: f64, opts: &SolveOptions) -> Result<usize>
where
    R: MonicCoefficients + ?Sized,
    S: RawCoefficients + ?Sized,
{
    let (f, _) = f_cf(src, x, opts.cf_tol, opts.cf_max_terms)?;
    Ok(sturm_count(rec0, x, n) + usize::from(f < 0.0))
}

/// Default lower end of the leading bracket, moved further down if needed until no
/// eigenvalue lies below it.
pub fn x_floor<R, S>(params: &ModelParams, rec0: &R, n: usize, src: &S, opts: &SolveOptions) -> Result<f64>
where
    R: MonicCoefficients + ?Sized,
    S: RawCoefficients + ?Sized,
{
    let k = params.kappa();
    let mut x = -(k + params.delta() / k + 2.0);
    for _ in 0..64 {
        if count_below(rec0, n, src, x, opts)? == 0 {
            return Ok(x);
        }
        x = 2.0 * x - 1.0;
    }
    Err(Error::NoRootInBracket { lo: f64::NEG_INFINITY, hi: x })
}

/// `(x_floor, x_{N,1})` followed by `(x_{N,k}, x_{N,k+1})` for `k = 1..count`.
pub fn pole_brackets<R: MonicCoefficients + ?Sized>(
    rec0: &R,
    n: usize,
    count: usize,
    x_floor: f64,
    tol: f64,
) -> Result<Vec<(f64, f64)>> {
    if count + 1 > n {
        return Err(Error::InvalidArgument(format!("need count <= N - 1, got count {count} with N {n}")));
    }
    let nodes = poly_zeros(rec0, n, 1, count + 1, tol)?;
    let mut out = Vec::with_capacity(count + 1);
    out.push((x_floor, nodes[0]));
    out.extend(nodes.windows(2).map(|w| (w[0], w[1])));
    Ok(out)
}

fn bisect_sign<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64, flo: f64, tol: f64) -> Result<f64> {
    while hi - lo > tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + 0.5 * (hi - lo))
}

/// Sign-change bisection of `f` on a bracket whose ends may be poles.
///
/// The ends are pulled in by `max(1e-9, 1e-3·width)` first; when that hides the
/// sign change, progressively smaller pulls are tried before giving up.
pub fn find_root<F: Fn(f64) -> Result<f64>>(f: F, bracket: (f64, f64), tol: f64) -> Result<f64> {
    let (a, b) = bracket;
    let w = b - a;
    if !(w > 0.0) {
        return Err(Error::InvalidArgument(format!("empty bracket [{a}, {b}]")));
    }
    let scale = a.abs().max(b.abs()).max(1.0);
    let pulls = [1e-9_f64.max(1e-3 * w), 1e-9, 1e-12 * scale];
    for s in pulls {
        if s >= 0.5 * w {
            continue;
        }
        let (lo, hi) = (a + s, b - s);
        let (flo, fhi) = (f(lo)?, f(hi)?);
        if flo == 0.0 {
            return Ok(lo);
        }
        if fhi == 0.0 {
            return Ok(hi);
        }
        if (flo > 0.0) != (fhi > 0.0) {
            return bisect_sign(&f, lo, hi, flo, tol);
        }
    }
    Err(Error::NoRootInBracket { lo: a, hi: b })
}

/// Sample `f` on `points` abscissas inside a pole gap.
///
/// Five eighths of the abscissas are spaced geometrically away from the lower
/// pole, starting at the node tolerance above it, because that is where the zero of `F`
/// sits once the residue of the pole is small. The rest are uniform, and the upper end is
/// pulled in by `max(1e-9, 1e-3·width)`.
pub fn branch_scan<F: Fn(f64) -> Result<f64>>(f: F, gap: (f64, f64), points: usize) -> Result<Vec<(f64, f64)>> {
    let (a, b) = gap;
    let w = b - a;
    if points < 2 || !(w > 0.0) {
        return Err(Error::InvalidArgument("branch scan needs >= 2 points and a nonempty gap".into()));
    }
    let top = 1.0 - 1e-9_f64.max(1e-3 * w) / w;
    // the pole itself is only known to NODE_TOL; closer points say nothing
    let floor = (NODE_TOL * a.abs().max(1.0) / w).min(0.25 * top);
    let n_geo = (points * 5 / 8).max(1);
    let mut g: Vec<f64> = (0..n_geo)
        .map(|j| floor * (0.5 * top / floor).powf(j as f64 / n_geo as f64))
        .collect();
    let n_lin = points - n_geo;
    for j in 0..n_lin {
        g.push(0.5 * top + 0.5 * top * (j + 1) as f64 / n_lin as f64);
    }
    g.into_iter().map(|s| a + w * s).map(|t| Ok((t, f(t)?))).collect()
}

/// Sign changes of `F` on a 64-point scan of the leading bracket.
pub fn leading_bracket_sign_changes(params: &ModelParams, parity: Parity, opts: &SolveOptions) -> Result<usize> {
    let src = ParitySource::new(*params, parity);
    let rec0 = rabi_monic_family(params, parity, 0)?;
    let n = opts.n_trunc.max(4);
    let floor = x_floor(params, &rec0, n, &src, opts)?;
    let x1 = poly_zeros(&rec0, n, 1, 1, opts.tol)?[0];
    let w = x1 - floor;
    let pull = 1e-9_f64.max(1e-3 * w);
    let mut changes = 0;
    let mut prev: Option<f64> = None;
    for j in 0..64 {
        let t = floor + pull + (w - 2.0 * pull) * j as f64 / 63.0;
        let v = f_cf(&src, t, opts.cf_tol, opts.cf_max_terms)?.0;
        if let Some(p) = prev {
            if (p > 0.0) != (v > 0.0) {
                changes += 1;
            }
        }
        prev = Some(v);
    }
    Ok(changes)
}

/// Backward error, in the working variable, of `t` as an eigenvalue.
///
/// The minimal solution `m_n` comes from backward recursion started well past
/// the turning index, so every row except `φ_1 + a_0 φ_0 = 0` holds exactly. With
/// `ψ_n = √(n!) m_n` the rows form a symmetric tridiagonal operator, and
/// `|m_1 + a_0 m_0| / ‖ψ‖₂` bounds the distance from `t` to its spectrum.
pub fn boundary_defect<S: RawCoefficients + ?Sized>(src: &S, t: f64) -> f64 {
    let top = src.turning_index(t).max(16) + 64;
    let mut m = vec![ScaledValue::ZERO; top + 1];
    m[top] = ScaledValue::ONE;
    let (mut above, mut here, mut e) = (0.0_f64, 1.0_f64, 0_i64);
    for n in (1..=top).rev() {
        let (a, b) = src.coeffs(t, n);
        let below = -(above + a * here) / b;
        above = here;
        here = below;
        e += rescale_pair(&mut above, &mut here);
        m[n - 1] = ScaledValue::from_parts(here, e);
    }
    let mut norm2 = ScaledValue::ZERO;
    let mut fact = ScaledValue::ONE;
    for (n, v) in m.iter().enumerate() {
        if n > 0 {
            fact = fact.mul_f64(n as f64);
        }
        norm2 = norm2 + *v * *v * fact;
    }
    let (a0, _) = src.coeffs(t, 0);
    let defect = m[1] + m[0].mul_f64(a0);
    let norm = ScaledValue::from_parts(norm2.mantissa().sqrt(), 0)
        * ScaledValue::from_parts(if norm2.exponent() % 2 == 0 { 1.0 } else { std::f64::consts::SQRT_2 }, norm2.exponent().div_euclid(2));
    (defect / norm).to_f64().abs()
}

struct Located {
    value: f64,
    bracket: (f64, f64),
    gap: (f64, f64),
}

/// Levels `k_lo..k_hi` (0-based) at truncation `n`.
fn locate_levels(
    params: &ModelParams,
    parity: Parity,
    n: usize,
    k_lo: usize,
    k_hi: usize,
    opts: &SolveOptions,
) -> Result<Vec<Located>> {
    let src = ParitySource::new(*params, parity);
    let rec0 = rabi_monic_family(params, parity, 0)?;
    // nodes x_{n,j} for j = max(k_lo, 1)..=k_hi
    let j0 = k_lo.max(1);
    let nodes = poly_zeros(&rec0, n, j0, k_hi, opts.tol)?;
    let floor = if k_lo == 0 { x_floor(params, &rec0, n, &src, opts)? } else { f64::NAN };
    let node = |j: usize| if j == 0 { floor } else { nodes[j - j0] };
    (k_lo..k_hi)
        .into_par_iter()
        .map(|k| refine(&rec0, n, &src, k, (node(k), node(k + 1)), opts))
        .collect()
}

fn refine<R, S>(rec0: &R, n: usize, src: &S, k: usize, gap: (f64, f64), opts: &SolveOptions) -> Result<Located>
where
    R: MonicCoefficients + ?Sized,
    S: RawCoefficients + ?Sized,
{
    let count = |x: f64| count_below(rec0, n, src, x, opts);
    let nudge = |x: f64| 8.0 * f64::EPSILON * x.abs().max(1.0);
    // start just below each pole, where the count is k and k+1 respectively
    let mut lo = if k == 0 { gap.0 } else { gap.0 - nudge(gap.0) };
    let mut hi = gap.1 - nudge(gap.1);
    let mut step = 4.0 * nudge(lo);
    let mut tries = 0;
    while count(lo)? > k {
        lo -= step;
        step *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::NoRootInBracket { lo: gap.0, hi: gap.1 });
        }
    }
    step = 4.0 * nudge(hi);
    tries = 0;
    while count(hi)? <= k {
        hi += step;
        step *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::NoRootInBracket { lo: gap.0, hi: gap.1 });
        }
    }
    while hi - lo > opts.tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if count(mid)? > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Located { value: lo + 0.5 * (hi - lo), bracket: (lo, hi), gap })
}

/// Levels `k_lo..k_hi` of one parity at truncation `n`, with residuals and, if
/// requested, the doubling check.
pub(crate) fn solve_range(
    params: &ModelParams,
    parity: Parity,
    n: usize,
    k_lo: usize,
    k_hi: usize,
    opts: &SolveOptions,
) -> Result<Vec<EnergyLevel>> {
    let first = locate_levels(params, parity, n, k_lo, k_hi, opts)?;
    let second =
        if opts.check_stability { Some(locate_levels(params, parity, 2 * n, k_lo, k_hi, opts)?) } else { None };
    // independent check: eigenvalues of the truncated Hamiltonian, whose Jacobi
    // matrix is that of the α = −1 family
    let rec_h = rabi_monic_family(params, parity, -1)?;
    let matrix = poly_zeros(&rec_h, n, k_lo + 1, k_hi, opts.tol)?;
    Ok(first
        .into_iter()
        .enumerate()
        .map(|(i, loc)| {
            let shift = second.as_ref().map_or(0.0, |s| (s[i].value - loc.value).abs());
            EnergyLevel {
                k: k_lo + i,
                parity: Some(parity),
                value: EnergyValue::from_x(loc.value, params),
                bracket: loc.bracket,
                gap: loc.gap,
                residual: (loc.value - matrix[i]).abs(),
                n_trunc: n,
                stable: second.is_some() && shift < opts.stability_tol,
                shift,
            }
        })
        .collect())
}

/// Lowest `n_levels` eigenvalues of one parity.
pub fn solve_spectrum(params: &ModelParams, parity: Parity, n_levels: usize, opts: &SolveOptions) -> Result<Spectrum> {
    if n_levels == 0 {
        return Err(Error::InvalidArgument("n_levels must be at least 1".into()));
    }
    let n = opts.n_trunc.max(4 * n_levels);
    let levels = solve_range(params, parity, n, 0, n_levels, opts)?;
    Ok(Spectrum { params: *params, parity: Some(parity), variable: Variable::X, options: opts.clone(), levels })
}
