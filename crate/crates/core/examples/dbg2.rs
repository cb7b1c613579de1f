use bethe_rc::scalar::{big_to_decimal_string, Scalar};
use bethe_rc::solver::{solve_sector, SolverConfig};
use std::time::Instant;

fn main() {
    let cfg = SolverConfig::default();
    let t = Instant::now();
    let census = solve_sector(25, 2, &cfg, None);
    println!("{} sols ({}r {}c) in {:.0?}", census.solutions.len(), census.counts.real, census.counts.complex, t.elapsed());
    for (i, s) in census.solutions.iter().enumerate() {
        if !s.is_real(1e-9) {
            println!("#{i} {:?} ({:+.9},{:+.9}) ({:+.9},{:+.9}) resid {:.2e}",
                s.classification, s.roots[0].re, s.roots[0].im, s.roots[1].re, s.roots[1].im, s.residual_norm);
            if let Some(hp) = &s.roots_hp {
                let im0 = big_to_decimal_string(&hp[0].im);
                let re0 = big_to_decimal_string(&hp[0].re);
                println!("    hp re {} im {}", &re0[..re0.len().min(40)], &im0[..im0.len().min(45)]);
            }
            let rel = bethe_rc::bethe::residual_norms_f64(25, &s.roots).relative;
            println!("    f64 rel {:.2e}", rel);
            let _ = Scalar::to_f64(&bethe_rc::scalar::Big::ZERO);
        }
    }
}
