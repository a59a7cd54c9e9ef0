// Scratch diagnostic: exact tail probabilities of the stratified shuffle
// on the worked comparison, under several threshold conventions.

fn ln_choose(n: u64, k: u64) -> f64 {
    fn lg(x: f64) -> f64 {
        // Stirling via ln(Gamma) from the standard library-free approach:
        // use lgamma from libm-style series; simpler: product log for small n.
        let mut s = 0.0;
        let mut i = 2.0;
        while i <= x {
            s += i.ln();
            i += 1.0;
        }
        s
    }
    lg(n as f64) - lg(k as f64) - lg((n - k) as f64)
}

fn main() {
    let (c_both, c1, c2) = (19u64, 28u64, 6u64);
    let (s_both, s1, s2) = (5u64, 43u64, 9u64);
    let total = 103u64;
    let c_ex = c1 + c2;
    let s_ex = s1 + s2;

    // log2 weights: P(kc, ks) = C(c_ex,kc) C(s_ex,ks) / 2^(c_ex+s_ex)
    let weight = |kc: u64, ks: u64| -> f64 {
        (ln_choose(c_ex, kc) + ln_choose(s_ex, ks)
            - (c_ex + s_ex) as f64 * std::f64::consts::LN_2)
        .exp()
    };

    let prec_diff_2_minus_1 = |kc: u64, ks: u64| -> f64 {
        let r1 = (c_both + kc) as f64;
        let s1v = (s_both + ks) as f64;
        let r2 = (c_both + (c_ex - kc)) as f64;
        let s2v = (s_both + (s_ex - ks)) as f64;
        r2 / (r2 + s2v) - r1 / (r1 + s1v)
    };
    let f_diff_1_minus_2 = |kc: u64, ks: u64| -> f64 {
        let r1 = (c_both + kc) as f64;
        let s1v = (s_both + ks) as f64;
        let r2 = (c_both + (c_ex - kc)) as f64;
        let s2v = (s_both + (s_ex - ks)) as f64;
        2.0 * r1 / (total as f64 + r1 + s1v) - 2.0 * r2 / (total as f64 + r2 + s2v)
    };

    let tail = |pred: &dyn Fn(u64, u64) -> bool| -> f64 {
        let mut p = 0.0;
        for kc in 0..=c_ex {
            for ks in 0..=s_ex {
                if pred(kc, ks) {
                    p += weight(kc, ks);
                }
            }
        }
        p
    };

    let obs_prec = 25.0 / 39.0 - 47.0 / 95.0;
    println!("observed precision diff (II-I) = {obs_prec:.7}");
    for (name, thr) in [
        ("exact", obs_prec),
        ("0.146", 0.146),
        ("0.145", 0.145),
        ("0.144", 0.144),
        ("0.143", 0.143),
        ("0.142", 0.142),
        ("0.141", 0.141),
        ("0.140", 0.140),
        ("0.135", 0.135),
    ] {
        let p = tail(&|kc, ks| prec_diff_2_minus_1(kc, ks) >= thr - 1e-12);
        println!("P(prec II-I >= {name}) = {p:.6}  (x 2^20 = {:.0})", p * 1048576.0);
    }
    let two = tail(&|kc, ks| prec_diff_2_minus_1(kc, ks).abs() >= obs_prec - 1e-12);
    println!("two-sided precision = {two:.6}");
    let other = tail(&|kc, ks| prec_diff_2_minus_1(kc, ks) <= -obs_prec + 1e-12);
    println!("other tail (I better) = {:.6}", other);

    let obs_f = 94.0 / 198.0 - 50.0 / 142.0;
    println!("\nobserved F diff = {obs_f:.7}");
    for (name, thr) in [("exact", obs_f), ("0.123", 0.123), ("0.122", 0.122)] {
        let p = tail(&|kc, ks| f_diff_1_minus_2(kc, ks) >= thr - 1e-12);
        println!("P(F diff >= {name}) = {p:.6}  (x 2^20 = {:.0})", p * 1048576.0);
    }

    // Recall, exact binomial tail over kc only.
    let recall_tail: f64 = (0..=c_ex)
        .map(|kc| {
            if 2 * kc >= c_ex + 22 {
                (ln_choose(c_ex, kc) - c_ex as f64 * 2f64.ln()).exp()
            } else {
                0.0
            }
        })
        .sum();
    println!("\nrecall exact tail = {recall_tail:.6e}  (x 2^20 = {:.0})", recall_tail * 1048576.0);
}
