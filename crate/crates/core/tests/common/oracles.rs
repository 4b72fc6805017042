/// Counts windows by adding one at a time until the next would not fit.
pub fn packing_count(wall: f64, width: f64, margin: f64, gap: f64) -> usize {
    let available = wall - 2.0 * margin;
    let mut n = 0usize;
    loop {
        let next = n + 1;
        let needed = next as f64 * width + n as f64 * gap;
        if width <= 0.0 || needed > available + 1e-9 {
            return n;
        }
        n = next;
    }
}

/// Day of week with 0 = Sunday (Sakamoto's method).
pub fn sakamoto(y: i32, m: u32, d: u32) -> usize {
    const T: [i32; 12] = [0, 3, 2, 5, 0, 3, 5, 1, 4, 6, 2, 4];
    let y = if m < 3 { y - 1 } else { y };
    ((y + y / 4 - y / 100 + y / 400 + T[(m - 1) as usize] + d as i32).rem_euclid(7)) as usize
}

/// Analytic steady state of the well-mixed CO₂ balance, ppm.
pub fn steady_state_co2(outdoor: f64, occupants: f64, generation: f64, volume: f64, ach: f64) -> f64 {
    outdoor + 1e6 * occupants * generation / (volume * ach / 3600.0)
}
