//! Build a 3x3 light field from sub-aperture views, store it as NDF, read it
//! back and subtract the center view.

use sparsecap::signal::{assemble_lightfield, center_index, center_view_subtract, read_ndf, write_ndf};
use sparsecap::{SignalKind, SignalTensor};

fn main() -> sparsecap::Result<()> {
    let (rows, cols, h, w) = (3, 3, 4, 6);
    // a ramp shifted by one pixel per view column
    let views: Vec<SignalTensor> = (0..rows * cols)
        .map(|v| {
            let shift = (v % cols) as f64;
            let px = (0..h * w).map(|i| ((i % w) as f64 + shift) / w as f64).collect();
            SignalTensor::new(vec![h, w], px, SignalKind::Image)
        })
        .collect::<Result<_, _>>()?;
    let lf = assemble_lightfield(&views, (rows, cols))?;

    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("lf.ndf");
    write_ndf(&lf, &path)?;
    let bytes = std::fs::metadata(&path).expect("written").len();
    let back = read_ndf(&path)?.with_kind(SignalKind::Lightfield)?;
    assert_eq!(back, lf);
    println!("dims {:?}, {bytes} bytes on disk, round trip exact", back.dims());

    let (cr, cc) = center_index(rows, cols);
    let residual = center_view_subtract(&back)?;
    println!("center view ({cr},{cc})");
    println!(
        "energy before {:.3}, after center subtraction {:.3}",
        back.energy(),
        residual.energy()
    );
    for c in 0..cols {
        println!("  view (0,{c}) residual energy {:.3}", residual.view(0, c)?.energy());
    }
    Ok(())
}
