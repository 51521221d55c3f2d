use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;
use randfib::words::*;
use randfib::ModelCase::{self, Linear, NonLinear};

fn w(s: &str) -> SignWord {
    s.parse().unwrap()
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Plain recurrence on machine integers, the oracle for short words.
fn direct(word: &SignWord, case: ModelCase) -> i64 {
    let (mut a, mut b) = (1i64, 1i64);
    for &l in &word.letters {
        let c = match l {
            Letter::R => b + a,
            Letter::L => b - a,
        };
        let c = if case == NonLinear { c.abs() } else { c };
        a = b;
        b = c;
    }
    b
}

#[test]
fn label_examples() {
    assert_eq!(
        label_trace(&w("RR"), TreeKind::T).unwrap(),
        ints(&[1, 1, 2, 3])
    );
    assert_eq!(
        label_trace(&w("RRLL"), TreeKind::T).unwrap(),
        ints(&[1, 1, 2, 3, 1, -2])
    );
    assert_eq!(
        label_trace(&w("RRLL"), TreeKind::Ttilde).unwrap(),
        ints(&[1, 1, 2, 3, 1, 2])
    );
    let fig = label_trace(&w("RLRRLRRLRLRLRR"), TreeKind::Rtree).unwrap();
    assert_eq!(fig[fig.len() - 2..], ints(&[20, 27]));
}

#[test]
fn matrix_examples() {
    assert_eq!(Mat2::A * Mat2::B * Mat2::B * Mat2::B, -Mat2::A);
    assert_eq!(Mat2::A * Mat2::B * Mat2::B * Mat2::A, -Mat2::B);
    assert_eq!(
        label_via_matrices(&w("RR")),
        (BigInt::from(2), BigInt::from(3))
    );
    assert_eq!(
        label_via_matrices(&SignWord::empty()),
        (BigInt::from(1), BigInt::from(1))
    );
    let (prev, last) = label_via_matrices(&w("RLL"));
    assert_eq!(prev, BigInt::from(1));
    assert_eq!(last, BigInt::from(-1));
}

#[test]
fn matrices_follow_the_labels() {
    for len in 0..=10 {
        for bits in 0..(1u64 << len) {
            let word = SignWord::from_bits(bits, len);
            let trace = label_trace(&word, TreeKind::T).unwrap();
            let (prev, last) = label_via_matrices(&word);
            assert_eq!(last, trace[len + 1]);
            assert_eq!(prev, trace[len]);
        }
    }
}

#[test]
fn reduction_trace_example() {
    let trace: Vec<String> = reduce_trace(&w("RRLLRLR"), Linear)
        .iter()
        .map(|x| x.to_string())
        .collect();
    assert_eq!(trace, ["R", "RR", "RRL", "R", "RL", "", "L"]);
}

#[test]
fn r_paths_are_already_reduced() {
    let y = w("RLRRLRRLRLRLRR");
    for case in [Linear, NonLinear] {
        let (red, stats) = reduce(&y, case);
        assert_eq!(red.letters, y);
        assert_eq!(stats.d, 0);
    }
}

#[test]
fn reduction_sound_up_to_fourteen() {
    for len in 0..=14 {
        for bits in 0..(1u64 << len) {
            let word = SignWord::from_bits(bits, len);
            for case in [Linear, NonLinear] {
                let (red, _) = reduce(&word, case);
                let via = sequence_value(&red.letters, case);
                let expected = direct(&word, case);
                match case {
                    Linear => assert_eq!(via.magnitude(), BigInt::from(expected).magnitude()),
                    NonLinear => assert_eq!(via, BigInt::from(expected)),
                }
            }
        }
    }
}

#[test]
fn strip_leading_l_examples() {
    let (red, _) = reduce(&w("LRRRLR"), NonLinear);
    let stripped = strip_leading_l(&red).unwrap();
    assert_eq!(stripped.letters, w("RLR"));
    // labels after the three removed letters are back to (1, 1) up to sign
    let before = label_trace(&red.letters, TreeKind::T).unwrap();
    let after = label_trace(&stripped.letters, TreeKind::T).unwrap();
    let n = before.len();
    assert_eq!(
        before[n - 1].magnitude(),
        after[after.len() - 1].magnitude()
    );
    assert_eq!(
        before[n - 2].magnitude(),
        after[after.len() - 2].magnitude()
    );

    let (red, _) = reduce(&w("RRL"), NonLinear);
    assert_eq!(strip_leading_l(&red).unwrap(), red);
    let (red, _) = reduce(&w("LR"), NonLinear);
    assert!(strip_leading_l(&red).is_err());
}

#[test]
fn nd_examples() {
    let nd = |s: &str| {
        let c = if s.is_empty() {
            nd_coefficients(&SignWord::empty()).unwrap()
        } else {
            nd_coefficients(&w(s)).unwrap()
        };
        (c.n, c.d)
    };
    let u = |x: u32| BigUint::from(x);
    assert_eq!(nd(""), (u(1), u(0)));
    assert_eq!(nd("R"), (u(1), u(1)));
    assert_eq!(nd("RR"), (u(2), u(1)));
}

/// Every word of length `len` with one `L` switched to `R`.
fn raised(word: &SignWord) -> Vec<SignWord> {
    (0..word.len())
        .filter(|&i| word.letters[i] == Letter::L)
        .map(|i| {
            let mut x = word.clone();
            x.letters[i] = Letter::R;
            x
        })
        .collect()
}

#[test]
fn raising_a_letter_never_lowers_a_label() {
    for len in 0..=12 {
        for bits in 0..(1u64 << len) {
            let word = SignWord::from_bits(bits, len);
            let low = label_trace(&word, TreeKind::Ttilde).unwrap();
            for up in raised(&word) {
                let high = label_trace(&up, TreeKind::Ttilde).unwrap();
                assert!(low.iter().zip(&high).all(|(a, b)| a <= b), "{word} vs {up}");
            }
        }
    }
}

fn word_strategy(max: usize) -> impl Strategy<Value = SignWord> {
    prop::collection::vec(prop_oneof![Just(Letter::R), Just(Letter::L)], 0..max)
        .prop_map(SignWord::new)
}

/// R-paths: starts with R, no LL.
fn r_path_strategy(max_pieces: usize) -> impl Strategy<Value = SignWord> {
    prop::collection::vec(any::<bool>(), 1..max_pieces).prop_map(|pieces| {
        let mut letters = Vec::new();
        for elbow in pieces {
            letters.push(Letter::R);
            if elbow {
                letters.push(Letter::L);
            }
        }
        SignWord::new(letters)
    })
}

proptest! {
    #[test]
    fn raising_random_long_words(word in word_strategy(200), pick in any::<prop::sample::Index>()) {
        let ups = raised(&word);
        prop_assume!(!ups.is_empty());
        let up = &ups[pick.index(ups.len())];
        let low = label_trace(&word, TreeKind::Ttilde).unwrap();
        let high = label_trace(up, TreeKind::Ttilde).unwrap();
        prop_assert!(low.iter().zip(&high).all(|(a, b)| a <= b));
    }

    #[test]
    fn length_bookkeeping(word in word_strategy(300), linear in any::<bool>()) {
        let case = if linear { Linear } else { NonLinear };
        let (red, stats) = reduce(&word, case);
        prop_assert_eq!(stats.n, stats.k + 3 * stats.d);
        prop_assert_eq!(red.lengths.len(), word.len());
        prop_assert_eq!(red.n_of_k.len(), red.letters.len());
        prop_assert!(red.n_of_k.windows(2).all(|p| p[0] < p[1]));
        if case == NonLinear {
            prop_assert_eq!(red.flips, 0);
        }
    }

    #[test]
    fn no_rll_at_any_stage(word in word_strategy(120), linear in any::<bool>()) {
        let case = if linear { Linear } else { NonLinear };
        for stage in reduce_trace(&word, case) {
            prop_assert!(!stage.to_string().contains("RLL"));
        }
    }

    #[test]
    fn reduction_sound_on_long_words(word in word_strategy(400), linear in any::<bool>()) {
        let case = if linear { Linear } else { NonLinear };
        prop_assert!(reduction_is_sound(&word, case));
    }

    #[test]
    fn split_labels_are_linear(head in r_path_strategy(20), tail in r_path_strategy(20)) {
        // label after head·tail = d(tail)·a + n(tail)·b, (a, b) the last edge of head
        let whole = head.concat(&tail);
        let labels = label_trace(&whole, TreeKind::Rtree).unwrap();
        let before = label_trace(&head, TreeKind::Rtree).unwrap();
        let a = before[before.len() - 2].clone();
        let b = before[before.len() - 1].clone();
        let nd = nd_coefficients(&tail).unwrap();
        let expected = BigInt::from(nd.d) * a + BigInt::from(nd.n) * b;
        prop_assert_eq!(labels.last().unwrap(), &expected);
    }
}
