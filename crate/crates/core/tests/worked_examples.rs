use std::collections::BTreeSet;

use nimseq::cutset::{CutRow, MultiCut};
use nimseq::optimize::{
    binary_rep, from_binary, near_path, optimize_cutset, optimized, optimized_successor,
    AdjoinPlan, BinaryRep,
};

fn c0() -> MultiCut {
    MultiCut::new(
        -2,
        3,
        vec![
            CutRow::from_pairs(&[(-2, 3)], &[(1, -1)]),
            CutRow::from_pairs(&[(0, 2)], &[(1, -2)]),
            CutRow::new(),
        ],
    )
}

fn c1() -> MultiCut {
    MultiCut::new(
        -2,
        3,
        vec![
            CutRow::new(),
            CutRow::from_pairs(&[(-1, 2)], &[(1, -1)]),
            CutRow::from_pairs(&[(0, 2)], &[(1, -1)]),
        ],
    )
}

/// Parses rows like `+3 · · −1`, ignoring `|`.
fn grid(text: &str) -> Vec<Vec<Option<i64>>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split_whitespace()
                .filter(|t| *t != "|")
                .map(|t| match t {
                    "·" => None,
                    t => Some(t.replace('−', "-").replace('+', "").parse().unwrap()),
                })
                .collect()
        })
        .collect()
}

#[test]
fn example_edge_and_matrices() {
    assert!(c0().is_edge(&c1()));
    let b0 = binary_rep(&c0());
    let b1 = binary_rep(&c1());
    assert_eq!(b0.to_string(), "+---+\n-+--+\n---++\n");
    assert_eq!(b1.to_string(), "---++\n+---+\n-+--+\n");
}

#[test]
fn optimization_matrix() {
    let path = optimize_cutset(&c0()).unwrap();
    let m = path.matrix().unwrap();
    println!("{m}");
    let expected = grid(
        "+3 · · | −1 +3 +3 −2 −2 | −2 ·
         · · +2 | −2 +3 −2 +3 −2 | −2 ·
         · · · | +3 +3 −2 −2 −2 | · ·",
    );
    assert_eq!(m.first_index, -2);
    assert_eq!(m.cells, expected);
}

#[test]
fn near_path_matrix() {
    let start = optimized(&c0()).unwrap();
    assert_eq!(
        start.rows,
        vec![
            CutRow::from_pairs(&[(-2, 3)], &[(1, -2)]),
            CutRow::from_pairs(&[(-1, 3)], &[(1, -2)]),
            CutRow::new(),
        ]
    );
    let plan = AdjoinPlan::from_edge(&c0(), &c1()).unwrap();
    assert_eq!(
        plan,
        AdjoinPlan {
            zero_rows: BTreeSet::new(),
            positives: vec![(2, BTreeSet::from([2]))],
            negatives: vec![(1, BTreeSet::from([1, 2]))],
        }
    );
    let path = near_path(&start, &plan).unwrap();
    assert_eq!(path.len(), 11);
    let m = path.matrix().unwrap();
    println!("{m}");
    let expected = grid(
        "+3 · · −2 +3 +3 −2 −2 −2 +3 +3 −2 −2 −2 ·
         · +3 · −2 +3 −2 +3 −2 −2 −1 +3 +3 −2 −2 −2
         · · · +2 +3 −2 −2 +3 −2 −1 +3 −2 +3 −2 −2",
    );
    for (row, exp) in m.cells.iter().zip(&expected) {
        assert_eq!(&row[..exp.len()], &exp[..]);
    }
    let end = path.cuts.last().unwrap();
    assert_eq!(*end, from_binary(&binary_rep(&c1())).unwrap());
}

#[test]
fn optimized_successor_rotates() {
    let start = optimized(&c0()).unwrap();
    let b = binary_rep(&start);
    assert_eq!(
        binary_rep(&optimized_successor(&start).unwrap()),
        b.rotated()
    );
    let _: BinaryRep = b;
}

#[test]
fn three_cycle_kinds() {
    let b = BinaryRep::parse(-3, 3, "++-+--\n+-+-+-\n++---+\n+-++--\n++--+-\n+-+--+").unwrap();
    let c = b.column_cycles();
    assert!(c.closed);
    assert_eq!(c.cycles, vec![1, 2, 3]);
    assert_eq!(c.order, 6);
    assert!(c.matches_rows);
    assert!(from_binary(&b).unwrap().validate().is_ok());
}

#[test]
fn single_long_cycle() {
    let text = "+++---\n-+++--\n--+++-\n---+++\n+---++\n++---+";
    let b = BinaryRep::parse(-3, 3, text).unwrap();
    let c = b.column_cycles();
    assert_eq!(c.cycles, vec![6]);
    // Read bottom-up, one optimized step realizes the cycled cut set.
    let mut rows = b.rows.clone();
    rows.reverse();
    let rev = BinaryRep { rows, ..b };
    assert_eq!(rev.rotated(), rev.cycled());
    let start = from_binary(&rev).unwrap();
    let next = optimized_successor(&start).unwrap();
    assert_eq!(next, start.cycled());
}

/// Cut set after index 0 of a grid starting at index `first`: S from the
/// cells at `≤ 0`, T from later cells landing at `≤ 0`.
fn cut_from_grid(first: i64, cells: &[Option<i64>]) -> CutRow {
    let mut e = std::collections::BTreeMap::new();
    for (k, c) in cells.iter().enumerate() {
        let i = first + k as i64;
        if let Some(d) = *c {
            if i <= 0 || i + d <= 0 {
                e.insert(i, d);
            }
        }
    }
    CutRow::from_entries(e)
}

#[test]
fn six_rows_without_column_cycles() {
    let cells = grid(
        "+2 +2 | −2 −2 +2 +2 | −2 −2
         · +2 | +2 −2 −2 +2 | · −2
         · · | +2 +2 −2 −2 | · ·
         +2 · | −2 +2 +2 −2 | −2 ·
         · +2 | −2 +2 −2 +2 | −2 ·
         +2 · | +2 −2 +2 −2 | · −2",
    );
    let start = MultiCut::new(-2, 2, cells.iter().map(|r| cut_from_grid(-1, r)).collect());
    assert!(start.validate().is_ok());
    let b = binary_rep(&start);
    assert_eq!(b.to_string(), "++--\n-++-\n--++\n+--+\n-+-+\n+-+-\n");
    assert!(!b.column_cycles().closed);
}

#[test]
fn reversible_swaps_in_the_example() {
    let b0 = binary_rep(&c0());
    assert!(b0.swap_reversible(0, 4));
    assert!(b0.swap_reversible(2, 3));
    // Undoing the rotation, the successor is the ancestor with both swaps.
    let b1 = binary_rep(&c1());
    assert_eq!(b1.unrotated_by(1), b0.swap_columns(0, 4).swap_columns(2, 3));
}

#[test]
fn coprime_cycle_columns_do_not_swap() {
    let parts = nimseq::optimize::best_partition(7, 4);
    let b = nimseq::optimize::cycle_matrix(-4, 4, &parts).unwrap();
    let cycles = b.column_cycles();
    assert_eq!(cycles.cycles, vec![1, 3, 4]);
    assert!(!b.swap_reversible(1, 5));
}
