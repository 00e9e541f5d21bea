use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let r = brl_core::verify::check_binary_labels_optimal(200, 42).unwrap();
    println!("{}  ({:.1?})", r.summary_line(), t0.elapsed());

    let t0 = Instant::now();
    let r = brl_core::verify::check_shared_minimizer_reward(100, 42).unwrap();
    println!("{}  ({:.1?})", r.summary_line(), t0.elapsed());
    let t0 = Instant::now();
    let r = brl_core::verify::check_shared_minimizer_bellman(100, 42).unwrap();
    println!("{}  ({:.1?})", r.summary_line(), t0.elapsed());

    let t0 = Instant::now();
    let r = brl_core::verify::check_affine_reward(100, 42).unwrap();
    println!("{}  ({:.1?})", r.summary_line(), t0.elapsed());
    let t0 = Instant::now();
    let r = brl_core::verify::check_affine_bellman(100, 42).unwrap();
    println!("{}  ({:.1?})", r.summary_line(), t0.elapsed());
    let t0 = Instant::now();
    let r = brl_core::verify::check_affine_control(100, 42).unwrap();
    println!("{}  ({:.1?})", r.summary_line(), t0.elapsed());

    let t0 = Instant::now();
    let r = brl_core::verify::check_gradient_alignment_reward(100, 42).unwrap();
    println!("{}  ({:.1?})", r.summary_line(), t0.elapsed());
    let t0 = Instant::now();
    let r = brl_core::verify::check_gradient_alignment_bellman(100, 42).unwrap();
    println!("{}  ({:.1?})", r.summary_line(), t0.elapsed());
    let t0 = Instant::now();
    let r = brl_core::verify::check_gradient_fd_reward(100, 42).unwrap();
    println!("{}  ({:.1?})", r.summary_line(), t0.elapsed());
    let t0 = Instant::now();
    let r = brl_core::verify::check_gradient_fd_bellman(100, 42).unwrap();
    println!("{}  ({:.1?})", r.summary_line(), t0.elapsed());
    let t0 = Instant::now();
    let r = brl_core::verify::check_gradient_alignment_control(100, 42).unwrap();
    println!("{}  ({:.1?})", r.summary_line(), t0.elapsed());
    let t0 = Instant::now();
    let r = brl_core::verify::check_gradient_oracle(20, 42).unwrap();
    println!("{}  ({:.1?})", r.summary_line(), t0.elapsed());
}
