use bethe_rc::bethe::residual_norms;
use bethe_rc::scalar::{BigField, Cx, Field};

fn main() {
    let f = BigField::with_decimal_digits(60);
    let a = -0.0023827641437817360570497868011047223;
    let b = 0.0000126289702939898987310303169776241;
    let eps = Cx::from_f64(&f, a, b);
    let l1 = Cx::from_f64(&f, 0.0, 0.5).add(&eps);
    let l2 = Cx::from_f64(&f, 0.0, -0.5).add(&eps);
    let norms = residual_norms(&f, 25, &[l1, l2]);
    println!("spurious point now: scaled {:.3e} rel {:.3e}", norms.scaled, norms.relative);
}
