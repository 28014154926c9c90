use nimseq::optimize::{k_asymptotic, li, li_inverse, primes_up_to};

fn prime_sum_ratio(x: u64) -> f64 {
    let s: u64 = primes_up_to(x).iter().sum();
    s as f64 / li((x * x) as f64)
}

#[test]
fn prime_sum_tracks_li_of_square() {
    // Within 15% only from 97 on; below that the step function lags by up
    // to about 42% (x = 10: 17 against 29.1).
    for x in 97..=3000 {
        let r = prime_sum_ratio(x);
        assert!((0.85..=1.15).contains(&r), "x = {x}: {r}");
    }
    for x in 2..97 {
        let r = prime_sum_ratio(x);
        assert!((0.55..=1.15).contains(&r), "x = {x}: {r}");
    }
    assert!(prime_sum_ratio(96) < 0.85);
}

#[test]
fn li_inverse_round_trip() {
    for y in [0.0, 0.5, 1.0, 5.0, 29.0, 100.0, 1000.0] {
        assert!((li(li_inverse(y)) - y).abs() < 1e-5, "{y}");
    }
    assert!((li_inverse(0.0) - 2.0).abs() < 1e-6);
    assert!(k_asymptotic(2).is_none());
    assert!(k_asymptotic(3).unwrap() > 1.0);
}
