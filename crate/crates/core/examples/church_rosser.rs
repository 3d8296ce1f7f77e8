//! `◇□p → □◇p` is valid on a Kripke frame exactly when the frame is Church–Rosser, and
//! exactly when its nominal reduced form holds.

use std::time::Instant;

use latcorr::classical::church_rosser_sweep_exact;

fn main() {
    for states in 1..=4 {
        let start = Instant::now();
        let r = church_rosser_sweep_exact(states).expect("within limits");
        println!(
            "{states} states: {} frames, {} Church–Rosser, {} disagreements ({:.2}s)",
            r.frames,
            r.church_rosser_frames,
            r.disagreements.len(),
            start.elapsed().as_secs_f64()
        );
    }
}
