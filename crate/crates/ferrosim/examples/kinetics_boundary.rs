//! Switching-kinetics calibration and the amplitude/pulse-width boundary:
//! two anchors pin the Merz law, the rest of the curve follows, and the
//! same law quantifies disturb risk at operating bias.

use ferrosim::analysis::{disturb_projection, emit_halid};
use ferrosim::device::{calibrate_kinetics, switching_boundary_width};

fn main() {
    let kinetics = calibrate_kinetics((4.0, 10e-9), (2.0, 100.0)).unwrap();
    println!("calibrated: tau0 = {:.4e} s, v0 = {:.3} V", kinetics.tau0, kinetics.v0);

    println!("\n50%-switching boundary:");
    for amp in [4.5, 4.0, 3.5, 3.0, 2.5, 2.0, 1.5, 1.0] {
        let w = switching_boundary_width(&kinetics, amp).unwrap();
        println!("  {amp:>4.1} V -> {w:10.3e} s");
    }

    println!("\ndisturb projections (switched fraction of an opposing segment):");
    for (bias, horizon, label) in [
        (1.0, 1000.0, "1 V for 1000 s"),
        (1.0, 3.156e8, "1 V for ten years"),
        (2.0, 1000.0, "2 V for 1000 s (overdrive what-if)"),
        (4.0, 10e-9, "4 V for 10 ns (boundary anchor)"),
    ] {
        println!("  {label:<34} {:.3e}", disturb_projection(&kinetics, bias, horizon));
    }

    let curve = emit_halid(&kinetics, &[1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5]).unwrap();
    std::fs::create_dir_all("target/example-out").unwrap();
    let mut f = std::fs::File::create("target/example-out/halid_boundary.csv").unwrap();
    curve.write_csv(&mut f, "amplitude_volts", "width_seconds").unwrap();
    println!("\nboundary curve written to target/example-out/halid_boundary.csv");
}
