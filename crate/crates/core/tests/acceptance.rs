//! Acceptance run: one pass/fail line per criterion, nonzero exit if any fail.

use std::f64::consts::PI;
use std::time::Instant;

use dyadic::compress::{self, Basis, Data};
use dyadic::dilation;
use dyadic::fft::{dft_naive, Fft};
use dyadic::filters::FilterCoefficients;
use dyadic::fwt::{self, Normalization, PacketTree};
use dyadic::jsr::{self, MatrixNorm};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn filter(name: &str) -> FilterCoefficients {
    FilterCoefficients::builtin(name).unwrap()
}

fn haar_anchor() -> Check {
    let haar = filter("haar");
    let p = fwt::analyze(&[9., 1., 2., 0.], &haar, 2, Normalization::Unnormalized).map_err(|e| e.to_string())?;
    let flat = p.flatten();
    ensure(flat == [3., 2., 4., 1.], || format!("analysis gave {flat:?}"))?;
    let back = fwt::synthesize(&p, &haar).map_err(|e| e.to_string())?;
    ensure(back == [9., 1., 2., 0.], || format!("synthesis gave {back:?}"))?;
    Ok("(9,1,2,0) -> (3,2,4,1) -> (9,1,2,0) exactly".into())
}

fn fft_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut worst = 0.0f64;
    for ell in 1..=12 {
        let n = 1usize << ell;
        let plan = Fft::new(n).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let a: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let (fast, _) = plan.forward(&a).map_err(|e| e.to_string())?;
            let slow = dft_naive(&a);
            let num: f64 = fast.values.iter().zip(&slow.values).map(|(x, y)| (x - y).norm_sqr()).sum();
            let den: f64 = slow.values.iter().map(|y| y.norm_sqr()).sum();
            worst = worst.max((num / den).sqrt());
        }
    }
    ensure(worst < 1e-9, || format!("worst relative error {worst:e}"))?;
    let (_, count) = Fft::new(1024)
        .and_then(|p| p.forward(&vec![Complex64::new(1.0, 0.0); 1024]))
        .map_err(|e| e.to_string())?;
    ensure(count.multiplications == 5120, || {
        format!("n=1024 used {} multiplications", count.multiplications)
    })?;
    Ok(format!("worst relative error {worst:.2e} over n=2..4096; n=1024 count 5120"))
}

fn perfect_reconstruction() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut worst_1d = 0.0f64;
    for name in ["haar", "d4"] {
        let f = filter(name);
        for ell in 1..=14 {
            let n = 1usize << ell;
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            for levels in 1..=ell {
                let p = fwt::analyze(&x, &f, levels, Normalization::Orthonormal).map_err(|e| e.to_string())?;
                let y = fwt::synthesize(&p, &f).map_err(|e| e.to_string())?;
                let err = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                worst_1d = worst_1d.max(err);
            }
        }
    }
    ensure(worst_1d < 1e-10, || format!("1-D worst error {worst_1d:e}"))?;
    let mut worst_2d = 0.0f64;
    for name in ["haar", "d4"] {
        let f = filter(name);
        for levels in 1..=6 {
            let img = DMatrix::from_fn(64, 64, |_, _| rng.random_range(0.0..255.0));
            let p = fwt::analyze_2d(&img, &f, levels, Normalization::Orthonormal).map_err(|e| e.to_string())?;
            let back = fwt::synthesize_2d(&p, &f).map_err(|e| e.to_string())?;
            worst_2d = worst_2d.max((back - img).amax());
        }
    }
    ensure(worst_2d < 1e-9, || format!("2-D worst error {worst_2d:e}"))?;
    Ok(format!("1-D worst {worst_1d:.2e} (n <= 2^14, all levels); 2-D 64x64 worst {worst_2d:.2e}"))
}

fn condition_suite() -> Check {
    let tol = 1e-10;
    let d4 = filter("d4");
    let r = d4.condition_report(tol);
    ensure(r.sum_ok && r.accuracy_order == 2 && r.ortho_ok && r.lawton_ok, || format!("d4: {r:?}"))?;
    ensure(r.ortho_residual < 1e-12, || format!("d4 O residual {:e}", r.ortho_residual))?;
    // accuracy exactly 2: the second alternating moment is far from zero
    ensure(d4.alternating_moment(2).abs() > 1e-3, || "d4 satisfies A_3".into())?;
    let hat = filter("hat").condition_report(tol);
    ensure(!hat.ortho_ok, || "hat passes O".into())?;
    let sb = filter("stretched-box").condition_report(tol);
    ensure(sb.ortho_ok && !sb.lawton_ok, || format!("stretched-box: {sb:?}"))?;
    let mut worst = 0.0f64;
    for name in ["haar", "d4"] {
        // |P|^2 + |P(xi + pi)|^2 sampled directly from the coefficients
        let c = filter(name).coeffs().to_vec();
        let p = |xi: f64| -> f64 {
            let z: Complex64 = c.iter().enumerate().map(|(k, ck)| ck * Complex64::from_polar(0.5, k as f64 * xi)).sum();
            z.norm_sqr()
        };
        for s in 0..1024 {
            let xi = 2.0 * PI * s as f64 / 1024.0;
            worst = worst.max((p(xi) + p(xi + PI) - 1.0).abs());
        }
        worst = worst.max(filter(name).mirror_identity_residual(1024));
    }
    ensure(worst < 1e-12, || format!("mirror identity residual {worst:e}"))?;
    Ok(format!(
        "d4 sum/A2/O/Lawton ok (O residual {:.1e}); hat fails O; stretched-box O ok, Lawton fails; mirror residual {worst:.1e}",
        r.ortho_residual
    ))
}

fn dilation_solver() -> Check {
    let d4 = filter("d4");
    let c = d4.coeffs();
    // 2x2 oracle: (M - I) v = 0 with M = [[c1, c0], [c3, c2]] gives v ~ (c0, 1 - c1)
    let (v1, v2) = (c[0], 1.0 - c[1]);
    let oracle = [v1 / (v1 + v2), v2 / (v1 + v2)];
    let s3 = 3f64.sqrt();
    ensure(
        (oracle[0] - (1.0 + s3) / 2.0).abs() < 1e-12 && (oracle[1] - (1.0 - s3) / 2.0).abs() < 1e-12,
        || format!("oracle disagrees with (1 +- sqrt 3)/2: {oracle:?}"),
    )?;
    let iv = dilation::integer_values(&d4).map_err(|e| e.to_string())?;
    let interior = iv.interior();
    ensure(
        interior.len() == 2 && (interior[0] - oracle[0]).abs() < 1e-12 && (interior[1] - oracle[1]).abs() < 1e-12,
        || format!("integer values {:?}", iv.values),
    )?;
    let phi = dilation::refine(&d4, 10).map_err(|e| e.to_string())?;
    let res = phi.dilation_residual();
    ensure(res < 1e-10, || format!("dilation residual {res:e}"))?;
    let pou = phi.partition_of_unity_residual();
    ensure(pou < 1e-8, || format!("partition of unity residual {pou:e}"))?;
    let integral = phi.riemann_integral();
    ensure((integral - 1.0).abs() < 1e-6, || format!("integral of phi {integral}"))?;
    let w = dilation::wavelet_samples(&d4, 10).map_err(|e| e.to_string())?;
    let (m0, m1) = (w.riemann_integral(), w.riemann_moment(1));
    ensure(m0.abs() < 1e-8, || format!("integral of W {m0:e}"))?;
    ensure(m1.abs() < 1e-6, || format!("first moment of W {m1:e}"))?;
    Ok(format!(
        "d4 phi(1), phi(2) match oracle; residual {res:.1e}, unity {pou:.1e}, int phi - 1 = {:.1e}, int W = {m0:.1e}, int xW = {m1:.1e}",
        integral - 1.0
    ))
}

fn jsr_bounds() -> Check {
    let a = DMatrix::from_row_slice(2, 2, &[0., 2., 0., 0.]);
    let b = DMatrix::from_row_slice(2, 2, &[0., 0., 2., 0.]);
    let toy = jsr::jsr_bounds(&a, &b, 12, MatrixNorm::Spectral).map_err(|e| e.to_string())?;
    ensure(toy.lower <= 2.0 + 1e-12 && toy.upper >= 2.0 - 1e-12 && toy.gap() < 0.05, || {
        format!("toy pair [{}, {}]", toy.lower, toy.upper)
    })?;
    let hat = jsr::holder_estimate(&filter("hat"), 12).map_err(|e| e.to_string())?;
    ensure(hat.alpha_lower <= 1.0 + 1e-9 && hat.alpha_upper >= 1.0 - 1e-9, || {
        format!("hat alpha [{}, {}]", hat.alpha_lower, hat.alpha_upper)
    })?;
    let d4 = jsr::holder_estimate(&filter("d4"), 12).map_err(|e| e.to_string())?;
    let width = d4.alpha_upper - d4.alpha_lower;
    ensure(d4.alpha_lower <= 0.55 && d4.alpha_upper >= 0.55 && width <= 0.2, || {
        format!("d4 alpha [{}, {}]", d4.alpha_lower, d4.alpha_upper)
    })?;
    Ok(format!(
        "toy [{:.4}, {:.4}]; hat alpha [{:.4}, {:.4}]; d4 alpha [{:.4}, {:.4}] width {width:.3}",
        toy.lower, toy.upper, hat.alpha_lower, hat.alpha_upper, d4.alpha_lower, d4.alpha_upper
    ))
}

/// Orthonormal Haar coefficients by inner products with the basis functions.
fn haar_coefficients_direct(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![x.iter().sum::<f64>() / (n as f64).sqrt()];
    let mut len = n;
    while len >= 2 {
        let half = len / 2;
        for start in (0..n).step_by(len) {
            let first: f64 = x[start..start + half].iter().sum();
            let second: f64 = x[start + half..start + len].iter().sum();
            out.push((first - second) / (len as f64).sqrt());
        }
        len = half;
    }
    out
}

fn contest() -> Check {
    let n = 1024;
    let step: Vec<f64> = (0..n).map(|i| if i < n / 2 { 1.0 } else { 0.0 }).collect();
    let nonzero = haar_coefficients_direct(&step).iter().filter(|c| c.abs() > 1e-12).count();
    let keep = compress::kept_count(0.05, n).map_err(|e| e.to_string())?;
    ensure(nonzero <= keep, || format!("{nonzero} nonzero Haar coefficients exceed {keep} kept"))?;
    let haar = Basis::wavelet("haar").map_err(|e| e.to_string())?;
    let data = Data::Signal(step);
    let rows = compress::contest_report(&data, &[haar.clone(), Basis::Fourier], &[0.05]).map_err(|e| e.to_string())?;
    let (eh, ef) = (rows[0].l2_rel_error, rows[1].l2_rel_error);
    ensure(eh < 1e-10, || format!("haar error {eh:e}"))?;
    ensure(ef > 1e-3, || format!("fourier error {ef:e}"))?;
    ensure(ef >= 10.0 * eh, || format!("ratio {}", ef / eh))?;

    let m = 4096;
    let shifted: Vec<f64> = (0..m).map(|i| if i < m / 3 { 1.0 } else { 0.0 }).collect();
    let fourier_fit = compress::decay_profile(&shifted, &Basis::Fourier)
        .map_err(|e| e.to_string())?
        .fit
        .ok_or("no fourier fit")?;
    ensure((fourier_fit.slope + 1.0).abs() <= 0.15, || format!("fourier slope {}", fourier_fit.slope))?;
    let haar_fit = compress::decay_profile(&shifted, &haar)
        .map_err(|e| e.to_string())?
        .fit
        .ok_or("no haar fit")?;
    ensure((haar_fit.slope + 0.5).abs() <= 0.05, || format!("haar slope {}", haar_fit.slope))?;

    let sine = Data::Signal((0..n).map(|i| (2.0 * PI * i as f64 / n as f64).sin()).collect());
    let rows = compress::contest_report(&sine, &[haar, Basis::Fourier], &[0.05]).map_err(|e| e.to_string())?;
    let (sh, sf) = (rows[0].l2_rel_error, rows[1].l2_rel_error);
    ensure(sf < sh, || format!("sinusoid: fourier {sf:e} vs haar {sh:e}"))?;
    Ok(format!(
        "step: haar {eh:.1e} ({nonzero} nonzero), fourier {ef:.3e}; slopes fourier {:.3} (rms {:.2}), haar {:.3} (rms {:.2}); sine: fourier {sf:.1e} < haar {sh:.1e}",
        fourier_fit.slope, fourier_fit.residual, haar_fit.slope, haar_fit.residual
    ))
}

fn walsh_packet() -> Check {
    let haar = filter("haar");
    for (n, depth) in [(4usize, 2usize), (8, 3)] {
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for col in 0..n {
            e[col] = 1.0;
            let bands = fwt::packet_analyze(&e, &haar, &PacketTree::full(depth), Normalization::Orthonormal)
                .map_err(|e| e.to_string())?;
            let flat: Vec<f64> = bands.into_iter().flat_map(|b| b.coeffs).collect();
            m.column_mut(col).copy_from_slice(&flat);
            e[col] = 0.0;
        }
        let scaled = &m * (n as f64).sqrt();
        ensure(scaled.iter().all(|v| (v.abs() - 1.0).abs() < 1e-12), || format!("n={n}: entries not +-1"))?;
        let gram = &m * m.transpose() - DMatrix::identity(n, n);
        ensure(gram.amax() < 1e-12, || format!("n={n}: not orthogonal ({:e})", gram.amax()))?;
    }
    Ok("sqrt(n) * packet matrix is +-1 and orthogonal for n = 4, 8".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("haar anchor", haar_anchor),
        ("fft oracle", fft_oracle),
        ("perfect reconstruction", perfect_reconstruction),
        ("condition suite", condition_suite),
        ("dilation solver", dilation_solver),
        ("jsr bounds", jsr_bounds),
        ("compression contest", contest),
        ("walsh packet", walsh_packet),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
