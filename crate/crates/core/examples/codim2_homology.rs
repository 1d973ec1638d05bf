use flagforge::complex::koszul;
use flagforge::deform::{assemble, canonical_path};
use flagforge::diffmod::{default_window, homology_hilbert};
use flagforge::field::Field;
use flagforge::poly::Ring;

fn main() -> flagforge::error::Result<()> {
    let r = Ring::new(Field::Rational, &["x", "y", "z"])?;
    let k = koszul(&r, &[r.var(0), r.var(1)])?;
    let (state, _log) = canonical_path(&k, 0)?;
    let d = assemble(&state)?;
    let (lo, hi) = default_window(&d);
    println!("{:?}", homology_hilbert(&d, lo, hi));
    Ok(())
}
